"""Monte Carlo experiments for the direction estimators.

Two experiment designs:

chat_experiment
    Fixed Sigma = I, mean-zero mixture, h = sqrt(tau) e_1. For each cell
    (method, alpha1, tau, n) it estimates the limiting constant by
    C_hat = n * Var[t' theta_hat / ||theta_hat||] over M replicates,
    with t a fixed unit vector orthogonal to h, and tabulates it next to
    the theoretical constant.

msi_experiment
    Per replicate a fresh Sigma = AA' (A with i.i.d. standard normal
    entries) and a uniformly random direction for h, rescaled so that
    h' Sigma^{-1} h hits the requested tau. Tabulates mean maximal
    similarity index per cell.

Replicates are independent jobs with their own deterministic random
stream; results reduce in replicate order, so tables are identical for
any worker count. Replicates whose estimator fails or does not converge
are excluded from the aggregates and counted in reps_failed.
"""

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import estimators
from .asymptotics import c0_constant, c_lda, c_skewvec
from .errors import ConfigError, Error, WeightDivergenceError
from .model import MixtureParams, sample

SIGMA_IDENTITY = "identity"
SIGMA_RANDOM_AAT = "random-aat"
SIGMA_MODES = (SIGMA_IDENTITY, SIGMA_RANDOM_AAT)

#: Environment variable consulted for the default worker count.
WORKERS_ENV = "SKEWDISC_WORKERS"


@dataclass(frozen=True)
class ExperimentConfig:
    """A full experiment grid. Cells are the cartesian product
    alpha_grid x tau_grid x n_grid, each run for reps replicates, each
    replicate evaluated by every method in methods."""

    p: int
    alpha_grid: tuple
    tau_grid: tuple
    n_grid: tuple
    reps: int
    master_seed: int
    methods: tuple
    sigma_mode: str = SIGMA_IDENTITY

    def __post_init__(self):
        object.__setattr__(self, "alpha_grid", tuple(self.alpha_grid))
        object.__setattr__(self, "tau_grid", tuple(self.tau_grid))
        object.__setattr__(self, "n_grid", tuple(self.n_grid))
        object.__setattr__(self, "methods", tuple(self.methods))
        if not (isinstance(self.p, int) and self.p >= 2):
            raise ConfigError(f"p: must be an integer >= 2, got {self.p!r}")
        if not self.alpha_grid or not all(0.5 < a < 1.0 for a in self.alpha_grid):
            raise ConfigError(
                f"alpha_grid: every weight must lie in (0.5, 1), got {self.alpha_grid!r}")
        if not self.tau_grid or not all(t > 0 for t in self.tau_grid):
            raise ConfigError(
                f"tau_grid: every value must be positive, got {self.tau_grid!r}")
        if not self.n_grid or not all(isinstance(n, int) and n >= 2 for n in self.n_grid):
            raise ConfigError(
                f"n_grid: every sample size must be an integer >= 2, got {self.n_grid!r}")
        if not (isinstance(self.reps, int) and self.reps >= 2):
            raise ConfigError(f"reps: must be at least 2, got {self.reps!r}")
        if not (isinstance(self.master_seed, int) and self.master_seed >= 0):
            raise ConfigError(
                f"master_seed: must be a nonnegative integer, got {self.master_seed!r}")
        unknown = [m for m in self.methods if m not in estimators.METHODS]
        if not self.methods or unknown:
            raise ConfigError(
                f"methods: expected a nonempty subset of {estimators.METHODS}, "
                f"got {self.methods!r}")
        if self.sigma_mode not in SIGMA_MODES:
            raise ConfigError(
                f"sigma_mode: expected one of {SIGMA_MODES}, got {self.sigma_mode!r}")

    @property
    def cells(self):
        return tuple(itertools.product(self.alpha_grid, self.tau_grid, self.n_grid))


@dataclass(frozen=True)
class ReplicateResult:
    """Outcome of one method on one replicate. t_projection and msi are
    None when the estimator raised; converged=False marks the replicate
    as excluded from aggregates."""

    method: str
    n: int
    alpha1: float
    tau: float
    rep_index: int
    t_projection: Optional[float]
    msi: Optional[float]
    converged: bool


def rng_stream(master_seed, index):
    """Independent deterministic generator for one replicate. Streams
    for distinct indices never overlap; the same (seed, index) pair
    always reproduces the same stream."""
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))
    return np.random.default_rng(seq)


def orth_unit(h):
    """Deterministic unit vector orthogonal to h: Gram-Schmidt of the
    standard basis vector least aligned with h."""
    h = np.asarray(h, dtype=float)
    if h.ndim != 1 or h.shape[0] < 2:
        raise ValueError("h must be a vector of dimension at least 2")
    nrm = np.linalg.norm(h)
    if nrm == 0.0:
        raise ValueError("h must be nonzero")
    j = int(np.argmin(np.abs(h)))
    t = np.zeros(h.shape[0])
    t[j] = 1.0
    t -= (h[j] / nrm ** 2) * h
    return t / np.linalg.norm(t)


def msi(u, v):
    """Maximal similarity index |u'v| / (||u|| ||v||), in [0, 1]; equals
    1 for (anti)parallel vectors."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("msi is undefined for zero vectors")
    return min(abs(float(u @ v)) / (nu * nv), 1.0)


def _mean_zero_params(alpha1, h, sigma):
    alpha2 = 1.0 - alpha1
    return MixtureParams(alpha1=alpha1, mu1=-alpha2 * h, mu2=alpha1 * h, sigma=sigma)


def _estimate_one(method, data, alpha1, rng):
    if method == estimators.MOM:
        return estimators.est_mom(data, alpha1)
    if method == estimators.SKEWVEC:
        return estimators.est_skewvec(data)
    if method == estimators.TOBI:
        return estimators.est_tobi(data)
    if method == estimators.JADE3:
        return estimators.est_jade3(data, rng=rng)
    if method == estimators.LDA:
        return estimators.est_lda(data)
    if method == estimators.PP:
        return estimators.est_pp(data, rng=rng)
    raise ConfigError(f"methods: unknown method {method!r}")


def _evaluate(methods, data, theta, t, alpha1, tau, n, rep_index, rng):
    out = []
    for method in methods:
        try:
            est = _estimate_one(method, data, alpha1, rng)
        except (Error, ValueError, np.linalg.LinAlgError):
            out.append(ReplicateResult(method, n, alpha1, tau, rep_index,
                                       None, None, False))
            continue
        est = estimators.align_sign(est, theta)
        out.append(ReplicateResult(
            method, n, alpha1, tau, rep_index,
            float(t @ est.unit), msi(est.unit, theta), est.converged))
    return out


def _chat_replicate(config, cell_index, alpha1, tau, n, rep_index):
    rng = rng_stream(config.master_seed, cell_index * config.reps + rep_index)
    h = np.zeros(config.p)
    h[0] = math.sqrt(tau)
    data = sample(_mean_zero_params(alpha1, h, np.eye(config.p)), n, rng)
    # Sigma = I, so theta = h.
    return _evaluate(config.methods, data, h, orth_unit(h),
                     alpha1, tau, n, rep_index, rng)


def _msi_replicate(config, cell_index, alpha1, tau, n, rep_index):
    rng = rng_stream(config.master_seed, cell_index * config.reps + rep_index)
    p = config.p
    if config.sigma_mode == SIGMA_RANDOM_AAT:
        a = rng.standard_normal((p, p))
        sigma = a @ a.T
    else:
        a = np.eye(p)
        sigma = a
    direction = rng.standard_normal(p)
    direction /= np.linalg.norm(direction)
    # The replicate is the image under x -> A x of a canonical mixture
    # with identity covariance and separation sqrt(tau) * direction, so
    # h' Sigma^{-1} h = tau holds exactly.
    h = math.sqrt(tau) * (a @ direction)
    data = sample(_mean_zero_params(alpha1, h, sigma), n, rng)
    return _evaluate(config.methods, data, np.linalg.solve(sigma, h),
                     orth_unit(h), alpha1, tau, n, rep_index, rng)


def _worker_count(workers):
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    if not workers >= 1:
        raise ConfigError(f"workers: must be at least 1, got {workers!r}")
    return workers


def _run_replicates(config, replicate, workers):
    jobs = [(ci, cell, m)
            for ci, cell in enumerate(config.cells)
            for m in range(config.reps)]

    def run(job):
        ci, (alpha1, tau, n), m = job
        return replicate(config, ci, alpha1, tau, n, m)

    count = _worker_count(workers)
    if count == 1:
        batches = [run(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=count) as pool:
            batches = list(pool.map(run, jobs))
    return [r for batch in batches for r in batch]


def _grouped(config, results):
    groups = {}
    for (alpha1, tau, n) in config.cells:
        for method in config.methods:
            groups[(method, alpha1, tau, n)] = []
    for r in results:
        groups[(r.method, r.alpha1, r.tau, r.n)].append(r)
    return groups


def _theory_constant(method, alpha1, tau, p):
    try:
        if method in (estimators.TOBI, estimators.JADE3, estimators.PP):
            return c0_constant(alpha1, tau)
        if method == estimators.SKEWVEC:
            return c_skewvec(alpha1, tau, p)
        if method == estimators.LDA:
            return c_lda(alpha1, tau)
    except WeightDivergenceError:
        return None
    return None


def chat_experiment(config, workers=None):
    """Run the constant-recovery experiment. Returns rows sorted by
    (method, alpha1, tau, n) with keys method, alpha1, tau, n,
    reps_used, reps_failed, c_hat, c_theory. c_hat needs at least two
    usable replicates, c_theory is None for MOM (no shared constant
    applies)."""
    if config.sigma_mode != SIGMA_IDENTITY:
        raise ConfigError(
            "sigma_mode: the constant-recovery experiment requires 'identity'")
    results = _run_replicates(config, _chat_replicate, workers)
    rows = []
    for (method, alpha1, tau, n), group in _grouped(config, results).items():
        used = [r for r in group if r.converged]
        c_hat = None
        if len(used) >= 2:
            c_hat = float(n * np.var([r.t_projection for r in used], ddof=1))
        rows.append({
            "method": method, "alpha1": alpha1, "tau": tau, "n": n,
            "reps_used": len(used), "reps_failed": len(group) - len(used),
            "c_hat": c_hat,
            "c_theory": _theory_constant(method, alpha1, tau, config.p),
        })
    rows.sort(key=lambda r: (r["method"], r["alpha1"], r["tau"], r["n"]))
    return rows


def msi_experiment(config, workers=None):
    """Run the direction-recovery experiment. Returns rows sorted by
    (method, alpha1, tau, n) with keys method, alpha1, tau, n, p,
    reps_used, reps_failed, mean_msi."""
    results = _run_replicates(config, _msi_replicate, workers)
    rows = []
    for (method, alpha1, tau, n), group in _grouped(config, results).items():
        used = [r for r in group if r.converged]
        mean = float(np.mean([r.msi for r in used])) if used else None
        rows.append({
            "method": method, "alpha1": alpha1, "tau": tau, "n": n,
            "p": config.p,
            "reps_used": len(used), "reps_failed": len(group) - len(used),
            "mean_msi": mean,
        })
    rows.sort(key=lambda r: (r["method"], r["alpha1"], r["tau"], r["n"]))
    return rows
