"""Comparison designs: uniform random, Latin hypercube, and Sobol."""

from functools import lru_cache
from importlib import resources

import numpy as np

SOBOL_BITS = 32
SOBOL_MODES = ("unscrambled", "shift", "lms")


def uniform_random_design(n, d, rng):
    """``n`` i.i.d. uniform points in ``[0, 1)^d``."""
    _check_size(n, d)
    return rng.random((n, d))


def latin_hypercube_design(n, d, rng):
    """Classic jittered Latin hypercube sample.

    Each column is an independent random permutation of the ``n`` strata
    ``[k/n, (k+1)/n)`` with a uniform jitter inside the stratum, so every
    one-dimensional projection has exactly one point per stratum.
    """
    _check_size(n, d)
    strata = np.argsort(rng.random((n, d)), axis=0)
    x = (strata + rng.random((n, d))) / n
    # (k + u)/n can round up to (k + 1)/n for u close to 1
    upper = np.nextafter((strata + 1) / n, 0.0)
    return np.minimum(x, upper)


def _check_size(n, d):
    if int(n) < 1 or int(d) < 1:
        raise ValueError(f"need n >= 1 and d >= 1, got n={n}, d={d}")


# ---------------------------------------------------------------------------
# Sobol


def parse_direction_numbers(text):
    """Parse a direction-number table.

    Lines are ``dim s a m_1 ... m_s``; blank lines, ``#`` comments and a
    ``dim ...`` header are skipped.  Returns ``{dim: (s, a, (m_1, ..., m_s))}``.
    """
    table = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("dim"):
            continue
        fields = line.split()
        try:
            dim, s, a, *m = (int(f) for f in fields)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: non-integer field in {raw!r}") from exc
        if len(m) != s:
            raise ValueError(f"line {lineno}: degree {s} but {len(m)} initial values")
        for i, mi in enumerate(m, start=1):
            if mi % 2 == 0 or mi >= 2**i:
                raise ValueError(f"line {lineno}: m_{i}={mi} must be odd and < 2**{i}")
        if dim in table:
            raise ValueError(f"line {lineno}: duplicate dimension {dim}")
        table[dim] = (s, a, tuple(m))
    return table


@lru_cache(maxsize=1)
def _bundled_table():
    text = resources.files("sfsfd").joinpath("data/direction_numbers.txt").read_text()
    return parse_direction_numbers(text)


def max_sobol_dimension():
    table = _bundled_table()
    return 1 + len(table)


def direction_integers(d, bits=SOBOL_BITS, table=None):
    """Direction numbers as ``bits``-bit integers, shape ``(d, bits)``.

    Row ``j`` holds ``v_{j,k} * 2**bits`` for ``k = 1..bits``.  Values past
    the polynomial degree follow the standard Sobol recurrence.
    """
    table = _bundled_table() if table is None else table
    limit = 1 + len(table)
    if d > limit:
        raise ValueError(f"Sobol dimension {d} exceeds the supported maximum of {limit}")
    v = np.zeros((d, bits), dtype=np.int64)
    v[0] = [1 << (bits - k) for k in range(1, bits + 1)]
    for j in range(1, d):
        s, a, m0 = table[j + 1]
        m = list(m0)
        for k in range(s, bits):
            new = m[k - s] ^ (m[k - s] << s)
            for t in range(1, s):
                if (a >> (s - 1 - t)) & 1:
                    new ^= m[k - t] << t
            m.append(new)
        v[j] = [m[k] << (bits - 1 - k) for k in range(bits)]
    return v


def _lms_scramble(v, rng, bits):
    """Left-multiply each dimension's direction numbers by a random
    lower-triangular binary matrix with unit diagonal."""
    d = v.shape[0]
    out = np.empty_like(v)
    for j in range(d):
        lower = np.tril(rng.integers(0, 2, size=(bits, bits)), k=-1)
        np.fill_diagonal(lower, 1)
        # bit t of a column is its coefficient of 2**-(t+1), MSB first
        shifts = np.arange(bits - 1, -1, -1, dtype=np.int64)
        colbits = (v[j][None, :] >> shifts[:, None]) & 1  # (bits, columns)
        scrambled = (lower @ colbits) & 1
        out[j] = (scrambled << shifts[:, None]).sum(axis=0)
    return out


class SobolState:
    """Gray-code Sobol generator with optional digital randomization.

    Parameters
    ----------
    d : int
        Dimension, at most :func:`max_sobol_dimension`.
    mode : {"unscrambled", "shift", "lms"}
        ``"shift"`` XORs every point with one random ``bits``-bit vector per
        dimension; ``"lms"`` additionally applies linear matrix scrambling
        to the direction numbers.
    seed : int or numpy Generator, optional
        Source of randomization.  Ignored in unscrambled mode.
    shift : array_like of int, optional
        Explicit digital shift (one integer per dimension), overriding the
        seeded one.  A zero shift reproduces the unscrambled sequence.

    The first emitted point is index 0, i.e. the origin before
    randomization; no points are skipped.
    """

    def __init__(self, d, mode="shift", seed=None, shift=None, bits=SOBOL_BITS):
        if mode not in SOBOL_MODES:
            raise ValueError(f"mode must be one of {SOBOL_MODES}, got {mode!r}")
        if d < 1:
            raise ValueError(f"Sobol dimension must be >= 1, got {d}")
        self.dimension = d
        self.mode = mode
        self.bits = bits
        self.index = 0
        rng = np.random.default_rng(seed)
        v = direction_integers(d, bits)
        if mode == "lms":
            v = _lms_scramble(v, rng, bits)
        self.direction_numbers = v
        if shift is not None:
            self.shift = np.asarray(shift, dtype=np.int64).reshape(d)
        elif mode == "unscrambled":
            self.shift = np.zeros(d, dtype=np.int64)
        else:
            self.shift = rng.integers(0, 1 << bits, size=d, dtype=np.int64)

    def integers(self, n):
        """Next ``n`` points as ``bits``-bit integers, advancing the state."""
        idx = np.arange(self.index, self.index + n, dtype=np.int64)
        gray = idx ^ (idx >> 1)
        out = np.zeros((n, self.dimension), dtype=np.int64)
        for k in range(self.bits):
            hit = ((gray >> k) & 1).astype(bool)
            if hit.any():
                out[hit] ^= self.direction_numbers[:, k]
        self.index += n
        return out ^ self.shift

    def random(self, n):
        return self.integers(n) / float(1 << self.bits)


def sobol_design(n, d, seed=None, mode="shift"):
    """First ``n`` points of a (randomized) Sobol sequence in ``[0, 1)^d``."""
    _check_size(n, d)
    return SobolState(d, mode=mode, seed=seed).random(n)
