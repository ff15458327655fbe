"""Centered L2 discrepancy and related uniformity diagnostics.

Two variants of the centered L2 formula are available:

``"classical"``
    Hickernell's centered L2 discrepancy (squared), whose pairwise factor is
    ``1 + |x_ik - 1/2|/2 + |x_jk - 1/2|/2 - |x_ik - x_jk|/2``.  This is the
    quantity computed by ``scipy.stats.qmc.discrepancy(method="CD")`` and the
    one the published benchmark values correspond to.  Default.
``"printed"``
    The same expression with the pairwise distance squared,
    ``- |x_ik - x_jk|**2 / 2``.

Both variants agree on any design where all pairwise distances are 0, e.g. a
single point or a fully collapsed design.
"""

import numpy as np

from . import _kernels

VARIANTS = ("classical", "printed")


def as_design(points):
    """Validate and return ``points`` as a float64 ``(n, d)`` array.

    Raises
    ------
    ValueError
        If the design is empty, not two-dimensional, contains non-finite
        values, or has a coordinate outside the closed unit interval.
    """
    x = np.asarray(points, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise ValueError(f"design must be 2-D (n, d), got shape {x.shape}")
    n, d = x.shape
    if n < 1 or d < 1:
        raise ValueError(f"design must have n >= 1 and d >= 1, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("design contains non-finite coordinates")
    if x.min() < 0.0 or x.max() > 1.0:
        bad = np.argwhere((x < 0.0) | (x > 1.0))[0]
        raise ValueError(
            f"coordinate x[{bad[0]}, {bad[1]}] = {x[tuple(bad)]!r} lies outside [0, 1]"
        )
    return x


def _squared_flag(variant):
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    return variant == "printed"


def centered_l2_discrepancy(design, variant="classical"):
    """Squared centered L2 discrepancy of a design in ``[0, 1]^d``.

    Parameters
    ----------
    design : array_like, shape (n, d)
        Points in the closed unit cube.  A 1-D input is read as ``n`` points
        in one dimension.
    variant : {"classical", "printed"}
        Which pairwise factor to use, see the module docstring.

    Returns
    -------
    float
        Nonnegative discrepancy value.  It is unbounded above; a fully
        collapsed design at the cube center scores ``(13/12)**d - 1``.
    """
    x = as_design(design)
    squared = _squared_flag(variant)
    return float(_kernels.cd2_batch(x[None, :, :], squared)[0])


def centered_l2_discrepancy_batch(designs, variant="classical"):
    """Discrepancy of every design in an ``(a, n, d)`` stack.

    The stack is validated as a whole; no per-design copies are made.
    """
    stack = np.asarray(designs, dtype=np.float64)
    if stack.ndim != 3 or 0 in stack.shape:
        raise ValueError(f"expected a nonempty (a, n, d) stack, got shape {stack.shape}")
    as_design(stack.reshape(-1, stack.shape[2]))
    return _kernels.cd2_batch(stack, _squared_flag(variant))


def mean_squared_distance_to_center(design):
    """Average of ``||x_i - (1/2, ..., 1/2)||^2`` over the rows of ``design``."""
    x = as_design(design)
    return float(np.mean(np.sum((x - 0.5) ** 2, axis=1)))
