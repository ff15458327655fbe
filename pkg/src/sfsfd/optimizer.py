"""Stochastic optimization of the pmf's Fourier coefficients.

The optimizer works on the ``2m - 1`` sphere angles inside the box
``[0, 2 pi]``.  Every objective evaluation draws a fresh batch of designs
from the current pmf and averages their discrepancy; the batch size grows
by one every ``a_growth_period`` evaluations so that the estimation noise
shrinks as the search proceeds.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import spectral
from .discrepancy import centered_l2_discrepancy_batch

TWO_PI = spectral.TWO_PI

# spawn-key namespaces for child random streams
_EVAL_STREAM = 0
_RESCORE_STREAM = 1


@dataclass(frozen=True)
class ObjectiveSpec:
    n: int
    d: int
    m: int = 10
    a_initial: int = 50
    a_growth_period: int = 10
    max_iterations: int = 1000
    seed: int = 0
    rho_begin: float = 0.5
    rho_end: float = 1e-4
    variant: str = "classical"
    rescore_factor: int = 4

    def __post_init__(self):
        for name in ("n", "d", "m", "a_initial", "a_growth_period", "max_iterations"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if self.seed < 0:
            raise ValueError(f"seed must be nonnegative, got {self.seed}")
        if not 0 < self.rho_end <= self.rho_begin:
            raise ValueError("need 0 < rho_end <= rho_begin")


@dataclass
class Iterate:
    iteration: int
    theta: np.ndarray
    replicates: int
    objective: float


@dataclass
class OptimizationTrace:
    iterates: list = field(default_factory=list)
    best_angles: np.ndarray = None
    best_objective: float = math.inf
    best_iteration: int = -1
    rescored_objective: float = math.nan
    rescore_replicates: int = 0
    status: str = ""

    def append(self, iteration, theta, replicates, objective):
        self.iterates.append(Iterate(iteration, np.array(theta), replicates, objective))
        if objective < self.best_objective:
            self.best_objective = objective
            self.best_angles = np.array(theta)
            self.best_iteration = iteration

    @property
    def initial_objective(self):
        return self.iterates[0].objective

    def jsonl_lines(self):
        for it in self.iterates:
            yield json.dumps({"iter": it.iteration, "a": it.replicates, "objective": it.objective})

    def write_jsonl(self, path):
        with open(path, "w") as fh:
            for line in self.jsonl_lines():
                fh.write(line + "\n")


def replicate_schedule(iteration, a_initial=50, period=10):
    """Designs per objective evaluation at zero-based ``iteration``."""
    if iteration < 0:
        raise ValueError(f"iteration must be >= 0, got {iteration}")
    return a_initial + iteration // period


def child_rng(seed, *key):
    """Independent generator for ``(seed, key)``; identical inputs give
    identical streams."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def estimate_expected_discrepancy(theta, spec, a, rng):
    """Mean discrepancy of ``a`` designs drawn from the pmf encoded by ``theta``."""
    if a < 1:
        raise ValueError(f"replicate count must be >= 1, got {a}")
    masses = spectral.angles_to_pmf(theta)
    designs = spectral.sample_designs(masses, a, spec.n, spec.d, rng)
    values = centered_l2_discrepancy_batch(designs, spec.variant)
    return math.fsum(values) / a


def minimize_blackbox(f, theta0, budget, lower=0.0, upper=TWO_PI, rho_begin=0.5, rho_end=1e-4):
    """Minimize ``f`` over a box with COBYLA.

    The box is passed to COBYLA as linear inequality constraints.  Points
    are clipped into the box before ``f`` sees them, and ``f`` is called at
    most ``budget`` times.

    Returns
    -------
    best_x : ndarray
        Best point evaluated (clipped into the box).
    best_value : float
    status : str
        COBYLA's termination message; running out of budget is a normal
        outcome.
    """
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    x0 = np.clip(np.asarray(theta0, dtype=np.float64), lower, upper)
    best = {"x": x0.copy(), "value": math.inf, "calls": 0}

    def wrapped(x):
        if best["calls"] >= budget:
            return best["value"]
        x = np.clip(x, lower, upper)
        best["calls"] += 1
        value = float(f(x))
        if value < best["value"]:
            best["x"], best["value"] = x.copy(), value
        return value

    box = {"type": "ineq", "fun": lambda x: np.concatenate((x - lower, upper - x))}
    result = minimize(
        wrapped,
        x0,
        method="COBYLA",
        constraints=[box],
        tol=rho_end,
        options={"rhobeg": rho_begin, "maxiter": int(budget)},
    )
    return best["x"], best["value"], str(result.message)


def run_sfsfd(spec):
    """Optimize the 1-D pmf for ``n``-point designs in ``d`` dimensions.

    Starts from the uniform pmf.  Evaluation ``i`` averages
    ``replicate_schedule(i)`` designs drawn with a stream derived from
    ``(spec.seed, i)``.  The best evaluated angles are re-scored once with
    ``rescore_factor`` times the last replicate count.

    Returns
    -------
    masses : ndarray
        Pmf of the best angles.
    trace : OptimizationTrace
    """
    theta0 = spectral.uniform_start_angles(spec.m)
    trace = OptimizationTrace()

    def objective(theta):
        i = len(trace.iterates)
        a = replicate_schedule(i, spec.a_initial, spec.a_growth_period)
        value = estimate_expected_discrepancy(theta, spec, a, child_rng(spec.seed, _EVAL_STREAM, i))
        trace.append(i, theta, a, value)
        return value

    _, _, trace.status = minimize_blackbox(
        objective, theta0, spec.max_iterations, rho_begin=spec.rho_begin, rho_end=spec.rho_end
    )

    last_a = trace.iterates[-1].replicates
    trace.rescore_replicates = spec.rescore_factor * last_a
    trace.rescored_objective = estimate_expected_discrepancy(
        trace.best_angles, spec, trace.rescore_replicates, child_rng(spec.seed, _RESCORE_STREAM)
    )
    return spectral.angles_to_pmf(trace.best_angles), trace
