"""Discretized 1-D mass functions and their Fourier-coefficient sphere.

A mass function ``p`` over ``m`` equal-width cells of ``[0, 1]`` maps to
unit-norm complex coefficients via ``c = DFT(sqrt(p))`` with the unitary
DFT.  Any unit vector ``c`` maps back to a valid mass function through
``|IDFT(c)|**2``, so optimizing over the coefficient sphere never leaves the
set of probability distributions.  The sphere itself is parametrized by
``2m - 1`` angles (hyperspherical coordinates on the real ``2m``-sphere).
"""

import json
import warnings

import numpy as np

TWO_PI = 2.0 * np.pi
NORM_ATOL = 1e-12
# tails of the real component vector below this norm count as exactly zero
SINGULAR_TOL = 1e-14


def check_pmf(masses, atol=NORM_ATOL):
    """Return ``masses`` as a float array after checking it is a pmf."""
    p = np.asarray(masses, dtype=np.float64)
    if p.ndim != 1 or p.size < 1:
        raise ValueError(f"pmf must be a nonempty 1-D array, got shape {p.shape}")
    if not np.all(np.isfinite(p)) or p.min() < 0.0:
        raise ValueError("pmf masses must be finite and nonnegative")
    total = float(np.sum(p))
    if abs(total - 1.0) > atol:
        raise ValueError(f"pmf masses sum to {total!r}, not 1")
    return p


def uniform_pmf(m):
    return np.full(m, 1.0 / m)


def sqrt_transform(masses):
    return np.sqrt(check_pmf(masses))


def dft_matrix(m):
    """Unitary DFT matrix, ``F[k, j] = exp(-2 pi i j k / m) / sqrt(m)``."""
    jk = np.outer(np.arange(m), np.arange(m)) % m
    return np.exp(-2j * np.pi * jk / m) / np.sqrt(m)


def forward_dft(q):
    q = np.asarray(q)
    return dft_matrix(q.shape[-1]) @ q


def inverse_dft(c):
    c = np.asarray(c, dtype=np.complex128)
    return dft_matrix(c.shape[-1]).conj().T @ c


def angles_to_coefficients(theta):
    """Map ``2m - 1`` angles to a unit vector in ``C^m``.

    With real components ``v_j = sin(t_1) ... sin(t_{j-1}) cos(t_j)`` for
    ``j < 2m`` and ``v_{2m} = sin(t_1) ... sin(t_{2m-1})``, consecutive pairs
    ``(v_{2t-1}, v_{2t})`` are the real and imaginary parts of ``c_{t-1}``.
    Angles outside ``[0, 2 pi]`` are clipped with a ``RuntimeWarning``.
    """
    theta = np.asarray(theta, dtype=np.float64)
    if theta.ndim != 1 or theta.size % 2 == 0:
        raise ValueError(f"expected an odd-length 1-D angle vector, got shape {theta.shape}")
    if theta.min() < 0.0 or theta.max() > TWO_PI:
        warnings.warn("angles outside [0, 2*pi] were clipped", RuntimeWarning, stacklevel=2)
        theta = np.clip(theta, 0.0, TWO_PI)
    sines = np.concatenate(([1.0], np.cumprod(np.sin(theta))))
    v = sines.copy()
    v[:-1] *= np.cos(theta)
    return v[0::2] + 1j * v[1::2]


def _unit_to_angles(v, free):
    # tail[j] = ||v[j:]||
    tail = np.sqrt(np.cumsum(v[::-1] ** 2)[::-1])
    k = v.size - 1
    theta = np.full(k, float(free))
    for j in range(k - 1):
        if tail[j] <= SINGULAR_TOL:
            break
        theta[j] = np.arctan2(tail[j + 1], v[j])
    else:
        if tail[k - 1] > SINGULAR_TOL:
            theta[k - 1] = np.arctan2(v[k], v[k - 1]) % TWO_PI
    return theta


def coefficients_to_angles(c, free=0.0):
    """Inverse of :func:`angles_to_coefficients`.

    The first ``2m - 2`` angles land in ``[0, pi]`` and the last in
    ``[0, 2 pi)``.  Where the remaining tail of real components vanishes
    (norm at most ``SINGULAR_TOL``) the parametrization is singular and the
    remaining angles do not affect ``c``; they are set to ``free``.
    """
    c = np.asarray(c, dtype=np.complex128)
    v = np.empty(2 * c.size)
    v[0::2] = c.real
    v[1::2] = c.imag
    return _unit_to_angles(v, free)


def uniform_start_angles(m):
    """Angles of the uniform pmf chosen for starting a local search.

    The uniform pmf is ``c = (e^{i phi}, 0, ..., 0)``: only the first angle
    is pinned and the rest are free.  The first angle is set to ``pi``
    (``c_0 = -1``) so it sits inside the box and can move either way.  The
    free angles point the remaining weight at the lowest real cosine mode,
    ``Re c_1 = Re c_{m-1}``, so moving the first angle reshapes the pmf
    smoothly (more mass centrally in one direction, at the edges in the
    other) instead of doing nothing.
    """
    if m == 1:
        return np.array([np.pi])
    tail = np.zeros(2 * m - 1)
    # real part of c_t sits at index 2t of the full vector, 2t - 1 of the tail
    tail[[1, 2 * (m - 1) - 1]] = 1.0
    tail /= np.linalg.norm(tail)
    return np.concatenate(([np.pi], _unit_to_angles(tail, 0.0)))


def coefficients_to_pmf(c):
    """Mass function ``|IDFT(c)|**2``; sums to ``||c||**2``."""
    q = inverse_dft(c)
    return q.real**2 + q.imag**2


def pmf_to_angles(masses):
    return coefficients_to_angles(forward_dft(sqrt_transform(masses)))


def angles_to_pmf(theta):
    return coefficients_to_pmf(angles_to_coefficients(theta))


def sample_design(masses, n, d, rng):
    """Draw an ``(n, d)`` design whose coordinates are i.i.d. from the pmf.

    Each coordinate picks cell ``i`` with probability ``masses[i]`` by
    inverting the cumulative masses, then lands uniformly in
    ``[i/m, (i+1)/m)``.
    """
    return sample_designs(masses, 1, n, d, rng)[0]


def sample_designs(masses, a, n, d, rng):
    """``a`` independent designs from the pmf, shape ``(a, n, d)``."""
    p = check_pmf(masses)
    if min(a, n, d) < 1:
        raise ValueError(f"need a, n, d >= 1, got a={a}, n={n}, d={d}")
    m = p.size
    cdf = np.cumsum(p)
    cdf[-1] = 1.0
    cells = np.searchsorted(cdf, rng.random((a, n, d)), side="right")
    x = (cells + rng.random((a, n, d))) / m
    return np.minimum(x, np.nextafter((cells + 1) / m, 0.0))


# ---------------------------------------------------------------------------
# persistence


def pdf_document(masses, angles, meta):
    """JSON-ready dict for an optimized pmf."""
    p = check_pmf(masses, atol=1e-9)
    return {
        "m": int(p.size),
        "masses": [float(v) for v in p],
        "angles": [float(v) for v in angles],
        "meta": dict(meta),
    }


def write_pdf(path, masses, angles, meta):
    with open(path, "w") as fh:
        json.dump(pdf_document(masses, angles, meta), fh, indent=2)
        fh.write("\n")


def read_pdf(path):
    """Load a pmf document; returns ``(masses, angles, meta)``."""
    with open(path) as fh:
        doc = json.load(fh)
    try:
        m = int(doc["m"])
        masses = np.asarray(doc["masses"], dtype=np.float64)
        angles = np.asarray(doc.get("angles", []), dtype=np.float64)
        meta = dict(doc.get("meta", {}))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"{path}: not a pmf document ({exc})") from exc
    if masses.shape != (m,):
        raise ValueError(f"{path}: 'm' is {m} but {masses.size} masses are listed")
    check_pmf(masses, atol=1e-9)
    return masses, angles, meta
