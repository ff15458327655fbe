"""Benchmark grid: (method x d x n x seed) runs, aggregation, and reports.

Records are kept in an append-only JSON-lines store so that an interrupted
grid can be resumed; cells already present (without an error) are skipped.
"""

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import baselines, spectral
from .discrepancy import centered_l2_discrepancy
from .optimizer import ObjectiveSpec, run_sfsfd

METHODS = ("sfsfd", "lhs", "sobol", "uniform")
_METHOD_CODE = {name: code for code, name in enumerate(METHODS)}

PAPER_DIMS = (5, 10, 15, 20, 25, 30)
PAPER_SIZES = (100, 200, 300, 400, 500)


@dataclass(frozen=True)
class GridConfig:
    m: int = 10
    budget: int = 1000
    a_initial: int = 50
    a_growth_period: int = 10
    variant: str = "classical"
    sobol_mode: str = "unscrambled"

    def variant_flags(self, method):
        flags = {"discrepancy": self.variant}
        if method == "sobol":
            flags["sobol_mode"] = self.sobol_mode
        elif method == "sfsfd":
            flags.update(
                optimizer_budget=self.budget,
                m=self.m,
                a_initial=self.a_initial,
                a_growth_period=self.a_growth_period,
            )
        return flags


PRESETS = {
    "desk": dict(
        methods=METHODS,
        dims=(5, 20, 30),
        sizes=(100,),
        seeds=tuple(range(3)),
        config=GridConfig(budget=200, a_initial=20),
    ),
    "paper": dict(
        methods=METHODS,
        dims=PAPER_DIMS,
        sizes=PAPER_SIZES,
        seeds=tuple(range(10)),
        config=GridConfig(),
    ),
}


@dataclass
class ExperimentRecord:
    method: str
    d: int
    n: int
    seed: int
    discrepancy: float
    wall_time_seconds: float
    variant_flags: dict
    error: str = None
    extra: dict = field(default_factory=dict)

    @property
    def key(self):
        return record_key(self.method, self.d, self.n, self.seed, self.variant_flags)

    @property
    def ok(self):
        return self.error is None

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, line):
        return cls(**json.loads(line))


def record_key(method, d, n, seed, flags):
    return (method, int(d), int(n), int(seed), json.dumps(flags, sort_keys=True))


@dataclass(frozen=True)
class AggregateCell:
    method: str
    d: int
    n: int
    mean_discrepancy: float
    std_discrepancy: float
    seed_count: int


def cell_rng(method, d, n, seed):
    """Random stream owned by one grid cell."""
    return np.random.default_rng(np.random.SeedSequence([seed, _METHOD_CODE[method], d, n]))


def cell_seed(method, d, n, seed):
    """Integer root seed for one grid cell (used for the optimizer)."""
    ss = np.random.SeedSequence([seed, _METHOD_CODE[method], d, n])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def generate_design(method, n, d, seed, config, masses=None):
    """The design a grid cell scores.  ``masses`` is required for sfsfd."""
    rng = cell_rng(method, d, n, seed)
    if method == "uniform":
        return baselines.uniform_random_design(n, d, rng)
    if method == "lhs":
        return baselines.latin_hypercube_design(n, d, rng)
    if method == "sobol":
        return baselines.sobol_design(n, d, seed=rng, mode=config.sobol_mode)
    if method == "sfsfd":
        if masses is None:
            raise ValueError("sfsfd designs need an optimized pmf")
        return spectral.sample_design(masses, n, d, rng)
    raise ValueError(f"unknown method {method!r}")


def run_cell(method, d, n, seed, config):
    """Compute one record; failures come back as a record with ``error`` set."""
    flags = config.variant_flags(method)
    start = time.perf_counter()
    extra = {}
    try:
        masses = None
        if method == "sfsfd":
            spec = ObjectiveSpec(
                n=n,
                d=d,
                m=config.m,
                a_initial=config.a_initial,
                a_growth_period=config.a_growth_period,
                max_iterations=config.budget,
                seed=cell_seed(method, d, n, seed),
                variant=config.variant,
            )
            masses, trace = run_sfsfd(spec)
            extra = {
                "objective_estimate": trace.rescored_objective,
                "initial_objective": trace.initial_objective,
                "evaluations": len(trace.iterates),
                "masses": [float(v) for v in masses],
            }
        design = generate_design(method, n, d, seed, config, masses)
        value = centered_l2_discrepancy(design, config.variant)
        error = None
    except Exception as exc:  # recorded, never fatal for the grid
        value, error = None, f"{type(exc).__name__}: {exc}"
    return ExperimentRecord(
        method=method,
        d=int(d),
        n=int(n),
        seed=int(seed),
        discrepancy=None if value is None else float(value),
        wall_time_seconds=time.perf_counter() - start,
        variant_flags=flags,
        error=error,
        extra=extra,
    )


def _run_cell_args(args):
    return run_cell(*args)


def load_records(path):
    """Read a record store; later lines supersede earlier ones with the same key."""
    records = {}
    if path is None or not os.path.exists(path):
        return records
    with open(path) as fh:
        for line in fh:
            if line.strip():
                rec = ExperimentRecord.from_json(line)
                records[rec.key] = rec
    return records


def grid_cells(methods, dims, sizes, seeds):
    for method in methods:
        if method not in _METHOD_CODE:
            raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
        for d in dims:
            for n in sizes:
                for seed in seeds:
                    yield method, int(d), int(n), int(seed)


def run_grid(methods, dims, sizes, seeds, config, store=None, workers=1, progress=None):
    """Run every grid cell not already stored.

    Parameters
    ----------
    methods, dims, sizes, seeds : iterables
        Grid axes; all must be nonempty.
    config : GridConfig
    store : path, optional
        JSON-lines record store, appended to as cells finish.
    workers : int
        Process count; results are written in grid order regardless.
    progress : callable, optional
        Called with each new record.

    Returns
    -------
    list of ExperimentRecord
        One record per grid cell, in grid order.
    """
    axes = [list(a) for a in (methods, dims, sizes, seeds)]
    if not all(axes):
        raise ValueError("every grid axis must be nonempty")
    existing = load_records(store)
    cells = list(grid_cells(*axes))
    todo = [
        c for c in cells
        if not (
            (rec := existing.get(record_key(*c, config.variant_flags(c[0]))))
            and rec.ok
        )
    ]
    jobs = [(*c, config) for c in todo]

    fh = open(store, "a") if store is not None else None
    try:
        if workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = pool.map(_run_cell_args, jobs)
                for rec in results:
                    _commit(rec, existing, fh, progress)
        else:
            for job in jobs:
                _commit(run_cell(*job), existing, fh, progress)
    finally:
        if fh is not None:
            fh.close()
    return [existing[record_key(*c, config.variant_flags(c[0]))] for c in cells]


def _commit(rec, existing, fh, progress):
    existing[rec.key] = rec
    if fh is not None:
        fh.write(rec.to_json() + "\n")
        fh.flush()
    if progress is not None:
        progress(rec)


def aggregate(records):
    """Mean and sample std per (method, d, n), ordered by method, d, n.

    Records carrying an error are ignored.  A single-record cell reports a
    std of 0.
    """
    groups = {}
    flags_seen = {}
    for rec in records:
        if not rec.ok:
            continue
        key = (rec.method, rec.d, rec.n)
        flags = json.dumps(rec.variant_flags, sort_keys=True)
        if flags_seen.setdefault(key, flags) != flags:
            raise ValueError(f"inconsistent variant_flags within cell {key}")
        groups.setdefault(key, []).append(rec.discrepancy)

    def order(key):
        method, d, n = key
        return (_METHOD_CODE.get(method, len(METHODS)), method, d, n)

    cells = []
    for key in sorted(groups, key=order):
        values = np.sort(np.asarray(groups[key]))
        count = values.size
        mean = math.fsum(values) / count
        std = math.sqrt(math.fsum((values - mean) ** 2) / (count - 1)) if count > 1 else 0.0
        cells.append(AggregateCell(*key, mean, std, count))
    return cells


@dataclass(frozen=True)
class ConcentrationRow:
    d: int
    mean_radius_sq: float
    relative_std: float
    degenerate: bool


def concentration_sweep(dims, n, seeds, rng_factory=None):
    """Radial spread of uniform designs around the cube center.

    For each dimension, reports the mean of ``||x - 1/2||^2`` and the
    coefficient of variation of ``||x - 1/2||`` over the ``n`` points,
    both averaged over ``seeds``.  With ``n == 1`` the spread is reported as
    0 and flagged degenerate.
    """
    dims = list(dims)
    if not dims:
        raise ValueError("dims must be nonempty")
    seeds = list(seeds)
    rng_factory = rng_factory or (lambda d, seed: cell_rng("uniform", d, n, seed))
    rows = []
    for d in dims:
        r2_means, rel = [], []
        for seed in seeds:
            x = baselines.uniform_random_design(n, d, rng_factory(d, seed))
            r2 = np.sum((x - 0.5) ** 2, axis=1)
            r = np.sqrt(r2)
            r2_means.append(r2.mean())
            rel.append(r.std() / r.mean() if n > 1 else 0.0)
        rows.append(ConcentrationRow(int(d), float(np.mean(r2_means)), float(np.mean(rel)), n == 1))
    return rows


# ---------------------------------------------------------------------------
# reports

CSV_HEADER = ("method", "d", "n", "seed_count", "mean_discrepancy", "std_discrepancy")
CSV_NAME = "summary.csv"
_SERIES_COLORS = {"sfsfd": "#d62728", "lhs": "#1f77b4", "sobol": "#2ca02c", "uniform": "#7f7f7f"}


def cells_to_csv(cells):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for c in cells:
        writer.writerow(
            [c.method, c.d, c.n, c.seed_count, f"{c.mean_discrepancy:.6g}", f"{c.std_discrepancy:.6g}"]
        )
    return buf.getvalue()


def dimension_curves(cells):
    """Per-method ``[(d, mean over n of the cell means), ...]``.

    Each (d, n) mean gets equal weight regardless of its seed count.
    """
    by = {}
    for c in cells:
        by.setdefault(c.method, {}).setdefault(c.d, []).append(c.mean_discrepancy)
    order = sorted(by, key=lambda m: (_METHOD_CODE.get(m, len(METHODS)), m))
    return {m: [(d, math.fsum(v) / len(v)) for d, v in sorted(by[m].items())] for m in order}


def render_svg(curves, log_scale, width=640, height=420):
    """Line chart of mean discrepancy against dimension."""
    left, right, top, bottom = 70, 130, 30, 50
    series = {}
    for method, pts in curves.items():
        ys = [math.log10(v) if log_scale else v for _, v in pts]
        series[method] = [(d, y) for (d, _), y in zip(pts, ys)]
    all_d = [d for pts in series.values() for d, _ in pts]
    all_y = [y for pts in series.values() for _, y in pts]
    if not all_d:
        raise ValueError("nothing to plot")
    d_lo, d_hi = min(all_d), max(all_d)
    y_lo, y_hi = min(all_y), max(all_y)
    if d_hi == d_lo:
        d_lo, d_hi = d_lo - 1, d_hi + 1
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 1, y_hi + 1
    pw, ph = width - left - right, height - top - bottom

    def px(d):
        return left + (d - d_lo) / (d_hi - d_lo) * pw

    def py(y):
        return top + (y_hi - y) / (y_hi - y_lo) * ph

    ylabel = "log10 mean discrepancy" if log_scale else "mean discrepancy"
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle" '
        f'font-size="12">dimension d</text>',
        f'<text x="15" y="{top + ph / 2:.1f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 15 {top + ph / 2:.1f})">{ylabel}</text>',
    ]
    for d in sorted(set(all_d)):
        out.append(
            f'<text x="{px(d):.2f}" y="{top + ph + 16}" text-anchor="middle" font-size="10">{d}</text>'
        )
    for y in np.linspace(y_lo, y_hi, 5):
        out.append(
            f'<text x="{left - 6}" y="{py(y) + 3:.2f}" text-anchor="end" font-size="10">{y:.3g}</text>'
        )
    for i, (method, pts) in enumerate(series.items()):
        color = _SERIES_COLORS.get(method, "black")
        coords = " ".join(f"{px(d):.2f},{py(y):.2f}" for d, y in pts)
        values = " ".join(f"{y:.6g}" for _, y in pts)
        out.append(
            f'<polyline class="series" data-method="{method}" data-values="{values}" '
            f'points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>'
        )
        ly = top + 10 + 18 * i
        out.append(
            f'<line x1="{width - right + 10}" y1="{ly}" x2="{width - right + 30}" y2="{ly}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        out.append(
            f'<text class="legend" x="{width - right + 35}" y="{ly + 4}" font-size="11">{method}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_report(cells, out_dir, formats=("csv", "svg")):
    """Write ``summary.csv`` and/or the two dimension-sweep SVG charts.

    Returns the list of paths written.
    """
    os.makedirs(out_dir, exist_ok=True)
    written = []
    if "csv" in formats:
        path = os.path.join(out_dir, CSV_NAME)
        with open(path, "w", newline="") as fh:
            fh.write(cells_to_csv(cells))
        written.append(path)
    if "svg" in formats:
        curves = dimension_curves(cells)
        for scale in ("linear", "log"):
            path = os.path.join(out_dir, f"discrepancy_vs_d_{scale}.svg")
            with open(path, "w") as fh:
                fh.write(render_svg(curves, log_scale=scale == "log"))
            written.append(path)
    return written
