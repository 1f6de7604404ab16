"""Direction estimators for the two-component Gaussian location mixture.

Four unsupervised estimators of theta / ||theta||:

MOM      method of moments; needs the true mixture weight, not affine
         equivariant.
SKEWVEC  whitened third-moment (skewness) vector mapped back by the
         whitener.
TOBI     leading eigenvector of the sum of squared third-moment slices
         of whitened data.
JADE3    maximizer of sum_k (v' T_k v)^2 over the unit sphere, found by
         a fixed-point iteration.

Plus the supervised LDA baseline and an experimental projection pursuit
plug-in (PP). SKEWVEC, TOBI and JADE3 are affine equivariant; their
estimates are defined up to sign, which align_sign resolves against a
reference vector.
"""

import dataclasses
from dataclasses import dataclass

import numpy as np

from . import moments as mom
from .errors import DegenerateSkewnessError, SupervisionRequiredError
from .linalg import SpdMatrix, inv_sqrt, sym_eigen

MOM = "MOM"
SKEWVEC = "SKEWVEC"
TOBI = "TOBI"
JADE3 = "JADE3"
LDA = "LDA"
PP = "PP"

#: All recognized method tags.
METHODS = (MOM, SKEWVEC, TOBI, JADE3, LDA, PP)

#: Default fixed-point settings for JADE3 and PP.
DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 200
_MAX_RESTARTS = 5
_UNDERFLOW = 1e-300


@dataclass(frozen=True)
class DirectionEstimate:
    """An estimated direction with its diagnostics.

    raw is the estimator's native output (carrying its Fisher-consistency
    scale), unit the normalized direction. For non-iterative methods
    converged is True and iterations 0. notes carries warnings such as a
    tied leading eigenvalue.
    """

    raw: np.ndarray
    unit: np.ndarray
    method: str
    converged: bool
    iterations: int
    sign_reference_applied: bool = False
    notes: tuple = ()


@dataclass(frozen=True)
class Whitening:
    """Centering and whitening of a dataset: whitener = C2_hat^{-1/2},
    whitened rows = whitener @ (x_i - mean). The whitened sample
    covariance (divisor n) is the identity."""

    whitener: SpdMatrix
    mean: np.ndarray
    whitened: np.ndarray


def _estimate(raw, method, converged=True, iterations=0, notes=()):
    raw = np.asarray(raw, dtype=float)
    nrm = np.linalg.norm(raw)
    if nrm == 0.0:
        raise DegenerateSkewnessError(f"{method} produced a zero direction")
    return DirectionEstimate(raw=raw, unit=raw / nrm, method=method,
                             converged=converged, iterations=iterations,
                             notes=tuple(notes))


def _third_moment(z):
    # (1/n) sum_i z_i z_i' z_i for already centered rows.
    return z.T @ (z * z).sum(axis=1) / z.shape[0]


def skewness_floor(c2_trace):
    """Degeneracy floor for third-moment norms: below it the sample is
    treated as symmetric and direction estimation refuses to guess."""
    return 1e-10 * c2_trace ** 1.5


def whiten(data):
    """Center and whiten a dataset by the inverse square root of its
    sample covariance (divisor n).

    Raises
    ------
    NearSingularError
        If the sample covariance is numerically singular.
    """
    ms = mom.sample_moments(data)
    whitener = inv_sqrt(ms.c2_hat)
    z = (data.observations - ms.mean) @ np.asarray(whitener)
    return Whitening(whitener=whitener, mean=ms.mean, whitened=z)


def mom_direction(c2, c3, alpha1):
    """Method-of-moments direction from second and third moments.

    Solves (C2 - b^{1/3} g^{-2/3} ||c3||^{-4/3} c3 c3')^{-1}
    b^{-1/3} g^{-1/3} ||c3||^{-2/3} c3 with b = alpha1 alpha2 and
    g = alpha1 - alpha2. With exact population moments this returns
    theta itself.
    """
    if not 0.5 < alpha1 < 1.0:
        raise ValueError(f"alpha1 must be in (0.5, 1), got {alpha1}")
    c2 = np.asarray(c2, dtype=float)
    c3 = np.asarray(c3, dtype=float)
    alpha2 = 1.0 - alpha1
    beta = alpha1 * alpha2
    gamma = alpha1 - alpha2
    nc3 = np.linalg.norm(c3)
    inner = c2 - beta ** (1 / 3) * gamma ** (-2 / 3) * nc3 ** (-4 / 3) * np.outer(c3, c3)
    rhs = beta ** (-1 / 3) * gamma ** (-1 / 3) * nc3 ** (-2 / 3) * c3
    return np.linalg.solve(inner, rhs)


def est_mom(data, alpha1):
    """Method-of-moments estimate; requires the true weight alpha1.

    Raises
    ------
    DegenerateSkewnessError
        If the sample third moment is below the degeneracy floor.
    numpy.linalg.LinAlgError
        If the inner matrix is singular.
    """
    ms = mom.sample_moments(data)
    if np.linalg.norm(ms.c3_hat) < skewness_floor(float(np.trace(ms.c2_hat))):
        raise DegenerateSkewnessError(
            "sample third moment is numerically zero; the sample looks symmetric"
        )
    return _estimate(mom_direction(ms.c2_hat, ms.c3_hat, alpha1), MOM)


def skewvec_direction(whitener, c3_whitened):
    """Skewness-vector direction: the whitener applied to the
    third-moment vector of the whitened data."""
    return np.asarray(whitener) @ np.asarray(c3_whitened, dtype=float)


def est_skewvec(data):
    """Skewness-vector estimate.

    Raises
    ------
    DegenerateSkewnessError
        If the whitened third moment is below the degeneracy floor
        (the floor is evaluated in whitened coordinates, where the
        covariance trace is p, so the check is affine invariant).
    """
    wh = whiten(data)
    c3w = _third_moment(wh.whitened)
    if np.linalg.norm(c3w) < skewness_floor(float(data.p)):
        raise DegenerateSkewnessError(
            "whitened third moment is numerically zero; the sample looks symmetric"
        )
    return _estimate(skewvec_direction(wh.whitener, c3w), SKEWVEC)


def tobi_unit(tk):
    """Leading unit eigenvector of sum_k T_k^2 in whitened coordinates.

    Returns
    -------
    (u, ambiguous) : (ndarray, bool)
        ambiguous flags a leading eigenvalue gap within 1e-10 relative,
        in which case the returned eigenvector is arbitrary within the
        tied subspace.
    """
    t = mom.tobi_matrix(tk)
    pairs = sym_eigen(t)
    ambiguous = False
    if len(pairs) > 1:
        lead, second = pairs[0].value, pairs[1].value
        ambiguous = (lead - second) <= 1e-10 * max(abs(lead), _UNDERFLOW)
    return pairs[0].vector, ambiguous


def est_tobi(data):
    """Third-order blind identification estimate: whitener times the
    leading eigenvector of the squared-slice sum. A tied leading
    eigenvalue is reported through notes, not raised."""
    wh = whiten(data)
    u, ambiguous = tobi_unit(mom.tk_slices(wh.whitened))
    notes = ("ambiguous leading eigenvalue",) if ambiguous else ()
    return _estimate(np.asarray(wh.whitener) @ u, TOBI, notes=notes)


def _jade_objective(tk, u):
    return sum(float(u @ s @ u) ** 2 for s in tk.slices)


def jade3_unit(tk, init, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, rng=None):
    """Fixed-point iteration u <- sum_k (u' T_k u) T_k u, renormalized,
    on the unit sphere.

    Stops when 1 - |u_new' u_old| < tol (sign-invariant) or after
    max_iter accepted steps. An update whose norm underflows triggers a
    restart from a fresh random unit vector, at most 5 times.

    Returns
    -------
    (u, converged, iterations, notes)
    """
    if rng is None:
        rng = np.random.default_rng(0)
    u = np.asarray(init, dtype=float)
    u = u / np.linalg.norm(u)
    slices = tk.slices
    notes = []
    iterations = 0
    restarts = 0
    prev_obj = _jade_objective(tk, u)
    while iterations < max_iter:
        update = sum(float(u @ s @ u) * (s @ u) for s in slices)
        nrm = np.linalg.norm(update)
        if not np.isfinite(nrm) or nrm < _UNDERFLOW:
            if restarts >= _MAX_RESTARTS:
                notes.append("restarts exhausted")
                return u, False, iterations, tuple(notes)
            restarts += 1
            u = rng.standard_normal(len(u))
            u /= np.linalg.norm(u)
            prev_obj = _jade_objective(tk, u)
            continue
        new_u = update / nrm
        iterations += 1
        obj = _jade_objective(tk, new_u)
        if obj < prev_obj - 1e-12 * max(1.0, prev_obj):
            notes.append("objective decreased")
        prev_obj = obj
        crit = 1.0 - abs(float(new_u @ u))
        u = new_u
        if crit < tol:
            return u, True, iterations, tuple(notes)
    return u, False, iterations, tuple(notes)


def est_jade3(data, init=None, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, rng=None):
    """3-JADE estimate. init defaults to the TOBI eigenvector, computed
    from the same whitened slices; restarts draw from rng."""
    wh = whiten(data)
    tk = mom.tk_slices(wh.whitened)
    notes = ()
    if init is None:
        init, ambiguous = tobi_unit(tk)
        if ambiguous:
            notes = ("ambiguous leading eigenvalue in init",)
    u, converged, iterations, jade_notes = jade3_unit(
        tk, init, tol=tol, max_iter=max_iter, rng=rng)
    return _estimate(np.asarray(wh.whitener) @ u, JADE3, converged=converged,
                     iterations=iterations, notes=notes + jade_notes)


def est_lda(data):
    """Supervised baseline: pooled within-class covariance (divisor n)
    inverse applied to the difference of class means, oriented from the
    -1 class toward the +1 class.

    Raises
    ------
    SupervisionRequiredError
        If the dataset has no labels.
    ValueError
        If either class occupies fewer than 2 rows.
    NearSingularError
        If the pooled covariance is numerically singular.
    """
    if data.labels is None:
        raise SupervisionRequiredError("LDA needs labeled data")
    x = data.observations
    neg = x[data.labels == -1]
    pos = x[data.labels == 1]
    if len(neg) < 2 or len(pos) < 2:
        raise ValueError("each class must occupy at least 2 rows")
    mean_neg = neg.mean(axis=0)
    mean_pos = pos.mean(axis=0)
    cn = neg - mean_neg
    cp = pos - mean_pos
    s_w = (cn.T @ cn + cp.T @ cp) / data.n
    root = np.asarray(inv_sqrt((s_w + s_w.T) / 2.0))
    return _estimate(root @ (root @ (mean_pos - mean_neg)), LDA)


def est_pp(data, init=None, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, rng=None):
    """Projection pursuit plug-in (experimental): fixed point
    u <- normalize(mean((u'z)^2 z)) on the whitened data, a stationary
    point of the squared projection skewness. Same restart policy as
    JADE3; may legitimately return converged=False."""
    if rng is None:
        rng = np.random.default_rng(0)
    wh = whiten(data)
    z = wh.whitened
    c3w = _third_moment(z)
    if np.linalg.norm(c3w) < skewness_floor(float(data.p)):
        raise DegenerateSkewnessError(
            "whitened third moment is numerically zero; the sample looks symmetric"
        )
    if init is None:
        init = c3w
    u = np.asarray(init, dtype=float)
    u = u / np.linalg.norm(u)
    iterations = 0
    restarts = 0
    notes = []
    converged = False
    while iterations < max_iter:
        update = z.T @ ((z @ u) ** 2) / z.shape[0]
        nrm = np.linalg.norm(update)
        if not np.isfinite(nrm) or nrm < _UNDERFLOW:
            if restarts >= _MAX_RESTARTS:
                notes.append("restarts exhausted")
                break
            restarts += 1
            u = rng.standard_normal(data.p)
            u /= np.linalg.norm(u)
            continue
        new_u = update / nrm
        iterations += 1
        crit = 1.0 - abs(float(new_u @ u))
        u = new_u
        if crit < tol:
            converged = True
            break
    return _estimate(np.asarray(wh.whitener) @ u, PP, converged=converged,
                     iterations=iterations, notes=tuple(notes))


def align_sign(est, reference):
    """Resolve the sign ambiguity of an estimate against a reference
    vector: flip when unit' reference < 0, leave the orthogonal case
    untouched. Always marks sign_reference_applied."""
    reference = np.asarray(reference, dtype=float)
    if np.linalg.norm(reference) == 0.0:
        raise ValueError("sign reference must be nonzero")
    flip = float(est.unit @ reference) < 0.0
    return dataclasses.replace(
        est,
        raw=-est.raw if flip else est.raw,
        unit=-est.unit if flip else est.unit,
        sign_reference_applied=True,
    )
