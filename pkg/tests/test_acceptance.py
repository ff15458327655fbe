"""Acceptance criteria, one test per criterion at its stated tolerance.

Each test prints a single ``criterion N: PASS|FAIL`` line; the lines are
also collected into the terminal summary.
"""

import contextlib
import json
import math
import shutil

import numpy as np
import pytest

from sfsfd import _kernels, baselines, bench, cli, spectral
from sfsfd.bench import GridConfig
from sfsfd.discrepancy import centered_l2_discrepancy
from sfsfd.optimizer import ObjectiveSpec, run_sfsfd

from .conftest import ACCEPTANCE_LINES
from .oracles import naive_cd2

DESK = bench.PRESETS["desk"]["config"]


@contextlib.contextmanager
def criterion(number, title):
    notes = []
    try:
        yield notes
    except BaseException as exc:
        line = f"criterion {number}: FAIL  {title}  ({type(exc).__name__}: {exc})"
        print(line)
        ACCEPTANCE_LINES.append(line)
        raise
    detail = f"  [{'; '.join(notes)}]" if notes else ""
    line = f"criterion {number}: PASS  {title}{detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)


def within(value, target, rel):
    return abs(value - target) <= rel * abs(target)


def test_criterion_1_oracle_equivalence():
    backends = [b for b in _kernels.BACKENDS if b != "numba" or _kernels.HAS_NUMBA]
    with criterion(1, "kernel equals naive triple loop within 1e-12 (200 designs, n<=10, d<=4)") as notes:
        rng = np.random.default_rng(1)
        worst = 0.0
        for _ in range(200):
            n, d = rng.integers(1, 11), rng.integers(1, 5)
            x = rng.random((n, d))
            if rng.random() < 0.2:
                x[rng.random((n, d)) < 0.3] = rng.choice([0.0, 0.5, 1.0])
            expected = naive_cd2(x.tolist())
            for name in backends:
                previous = _kernels.set_backend(name)
                try:
                    got = centered_l2_discrepancy(x)
                finally:
                    _kernels.set_backend(previous)
                worst = max(worst, abs(got - expected))
        notes.append(f"max abs error {worst:.2e} over {', '.join(backends)}")
        assert worst <= 1e-12


def test_criterion_2_hand_values():
    with criterion(2, "single center point = 1/12; all-at-center d=10 = (13/12)^10 - 1") as notes:
        single = centered_l2_discrepancy(np.array([[0.5]]))
        collapsed = centered_l2_discrepancy(np.full((5, 10), 0.5))
        notes.append(f"errors {abs(single - 1 / 12):.1e}, {abs(collapsed - ((13 / 12) ** 10 - 1)):.1e}")
        assert abs(single - 1.0 / 12.0) <= 1e-15
        assert abs(collapsed - ((13.0 / 12.0) ** 10 - 1.0)) <= 1e-12


# (method, d, target, relative band)
TABLE_TARGETS = [
    ("uniform", 5, 0.0157, 0.15),
    ("lhs", 5, 0.0042, 0.15),
    ("uniform", 30, 7.9939, 0.15),
    ("lhs", 30, 7.3923, 0.15),
    ("sobol", 5, 0.0017, 0.40),
    ("sobol", 30, 25.5500, 0.40),
]


def test_criterion_3_table_baselines():
    with criterion(3, "baseline means over 10 seeds at n=100 within reference bands") as notes:
        records = bench.run_grid(["lhs", "sobol", "uniform"], [5, 30], [100], range(10), GridConfig())
        means = {(c.method, c.d): c.mean_discrepancy for c in bench.aggregate(records)}
        misses = []
        for method, d, target, band in TABLE_TARGETS:
            got = means[(method, d)]
            notes.append(f"{method} d={d}: {got:.4g} vs {target}")
            if not within(got, target, band):
                misses.append(f"{method} d={d} {got:.4g} outside {target}±{band:.0%}")
        assert not misses, "; ".join(misses)


def test_criterion_4_sfsfd_improvement():
    with criterion(4, "desk-scale SF-SFD improves on its start and orders d=30 cells") as notes:
        initial, final = [], []
        for seed in range(3):
            spec = ObjectiveSpec(n=100, d=20, m=10, a_initial=20, max_iterations=200, seed=seed)
            _, trace = run_sfsfd(spec)
            initial.append(trace.initial_objective)
            final.append(trace.rescored_objective)
        notes.append(f"d=20 objective {np.mean(initial):.4f} -> {np.mean(final):.4f}")
        assert np.mean(final) < np.mean(initial)

        records = bench.run_grid(bench.METHODS, [20, 30], [100], range(3), DESK)
        means = {(c.method, c.d): c.mean_discrepancy for c in bench.aggregate(records)}
        notes.append(f"d=20 realized sfsfd {means['sfsfd', 20]:.4f} vs uniform {means['uniform', 20]:.4f}")
        assert means["sfsfd", 20] < means["uniform", 20]
        order = [means[m, 30] for m in ("sfsfd", "lhs", "uniform", "sobol")]
        notes.append("d=30 sfsfd<lhs<uniform<sobol: " + " < ".join(f"{v:.4g}" for v in order))
        assert order == sorted(order) and len(set(order)) == 4


def test_criterion_5_spectral_invariants():
    draws = 10_000
    with criterion(5, f"spectral invariants over {draws} random draws") as notes:
        rng = np.random.default_rng(5)
        worst = {"norm": 0.0, "parseval": 0.0, "roundtrip": 0.0, "pmf_sum": 0.0}
        for _ in range(draws):
            m = int(rng.integers(1, 17))
            theta = rng.uniform(0.0, spectral.TWO_PI, 2 * m - 1)
            c = spectral.angles_to_coefficients(theta)
            worst["norm"] = max(worst["norm"], abs(np.linalg.norm(c) - 1.0))

            q = rng.normal(size=m) + 1j * rng.normal(size=m)
            f = spectral.forward_dft(q)
            worst["parseval"] = max(
                worst["parseval"],
                abs(np.linalg.norm(f) - np.linalg.norm(q)),
                np.max(np.abs(spectral.inverse_dft(f) - q)),
            )

            p = spectral.coefficients_to_pmf(c)
            assert p.min() >= 0.0
            worst["pmf_sum"] = max(worst["pmf_sum"], abs(p.sum() - 1.0))

            # masses bounded away from zero keep the chart away from its singular set
            masses = rng.dirichlet(np.ones(m)) * 0.9 + 0.1 / m
            back = spectral.angles_to_pmf(spectral.pmf_to_angles(masses))
            worst["roundtrip"] = max(worst["roundtrip"], np.max(np.abs(back - masses)))
        notes.append(", ".join(f"{k} {v:.1e}" for k, v in worst.items()))
        assert worst["norm"] <= 1e-12
        assert worst["parseval"] <= 1e-12
        assert worst["pmf_sum"] <= 1e-12
        assert worst["roundtrip"] <= 1e-10


def test_criterion_6_concentration():
    with criterion(6, "uniform radius^2 at d=12 is 1.0 +- 0.05; relative std shrinks from d=3 to d=300") as notes:
        rows = {r.d: r for r in bench.concentration_sweep([3, 12, 300], 10_000, [0])}
        notes.append(
            f"d=12 mean r^2 {rows[12].mean_radius_sq:.4f}; rel std d=3 {rows[3].relative_std:.4f}, "
            f"d=300 {rows[300].relative_std:.4f}"
        )
        assert abs(rows[12].mean_radius_sq - 1.0) <= 0.05
        assert rows[300].relative_std < rows[3].relative_std


def test_criterion_7_generators():
    with criterion(7, "LHS stratification, Sobol d=1 prefix, dyadic balance for n=2^k, k<=8"):
        for seed in range(100):
            rng = np.random.default_rng(seed)
            n, d = int(rng.integers(1, 50)), int(rng.integers(1, 8))
            x = baselines.latin_hypercube_design(n, d, rng)
            for col in x.T:
                assert sorted(np.floor(col * n).astype(int)) == list(range(n))

        first = baselines.sobol_design(4, 1, mode="unscrambled")[:, 0]
        assert first.tolist() == [0.0, 0.5, 0.75, 0.25]

        for mode in baselines.SOBOL_MODES:
            x = baselines.sobol_design(256, 8, seed=3, mode=mode)
            for k in range(9):
                n = 2**k
                for col in x[:n].T:
                    counts = np.bincount(np.floor(col * n).astype(int), minlength=n)
                    assert np.all(counts == 1), (mode, k)


def _cli(*argv):
    code = cli.main([str(a) for a in argv])
    assert code == 0, argv
    return code


def _strip_wall_time(path):
    rows = []
    for line in path.read_text().splitlines():
        row = json.loads(line)
        row.pop("wall_time_seconds")
        rows.append(row)
    return rows


def test_criterion_8_reproducibility(tmp_path, capsys):
    with criterion(8, "repeated CLI runs are byte-identical; resumed benchmark equals uninterrupted") as notes:
        design = tmp_path / "design.csv"
        outputs = {}
        for run in ("a", "b"):
            d = tmp_path / run
            d.mkdir()
            _cli("optimize", "--n", 30, "--d", 6, "--budget", 25, "--a-initial", 4, "--seed", 2,
                 "--out", d / "pdf.json")
            for method in ("lhs", "sobol", "uniform"):
                _cli("sample", "--method", method, "--n", 32, "--d", 6, "--seed", 5, "--out", d / f"{method}.csv")
            _cli("sample", "--method", "sfsfd", "--pdf", d / "pdf.json", "--n", 32, "--d", 6, "--seed", 5,
                 "--out", d / "sfsfd.csv")
            shutil.copy(d / "lhs.csv", design)
            _cli("discrepancy", design)
            _cli("benchmark", "--methods", "sfsfd,lhs,sobol,uniform", "--dims", "4", "--sizes", "16",
                 "--seeds", "0..1", "--budget", 10, "--a-initial", 2, "--out", d / "bench")
            outputs[run] = capsys.readouterr().out.replace(str(d), "<dir>")
        files = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*") if p.is_file())
        for rel in files:
            if rel.name == "records.jsonl":
                # wall_time_seconds is a measurement, not a computed result
                assert _strip_wall_time(tmp_path / "a" / rel) == _strip_wall_time(tmp_path / "b" / rel)
            else:
                assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes(), rel
        assert outputs["a"] == outputs["b"]
        notes.append(f"{len(files)} files compared")

        axes = (list(bench.METHODS), [3, 5], [12], [0, 1, 2])
        config = GridConfig(budget=10, a_initial=2)
        whole = tmp_path / "whole.jsonl"
        bench.run_grid(*axes, config, store=whole)

        part = tmp_path / "part.jsonl"
        seen = []

        def interrupt(rec):
            seen.append(rec)
            if len(seen) == 7:
                raise KeyboardInterrupt

        with pytest.raises(KeyboardInterrupt):
            bench.run_grid(*axes, config, store=part, progress=interrupt)
        bench.run_grid(*axes, config, store=part)
        assert _strip_wall_time(part) == _strip_wall_time(whole)
        notes.append(f"resume after 7/{len(_strip_wall_time(whole))} cells matches")
