"""Two-component Gaussian location mixture: parameters, sampling and
closed-form population moments.

The generative model is x ~ alpha1 N(mu1, Sigma) + alpha2 N(mu2, Sigma)
with shared covariance and alpha1 in (0.5, 1). The optimal projection
direction for separating the components is theta / ||theta|| with
theta = Sigma^{-1} h and h = mu2 - mu1.

All population moment formulas below are stated for the centered
parametrization mu1 = -alpha2 h, mu2 = alpha1 h (so E x = 0); the public
functions shift arbitrary means internally. Second- and higher-order
central moments do not depend on the shift.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import SpdMatrix, commutation_matrix, inv_sqrt


@dataclass(frozen=True)
class MixtureParams:
    """Parameters of the two-component location mixture.

    alpha1 is the weight of component 1 and must lie in (0.5, 1); the
    perfectly symmetric case alpha1 = 0.5 is excluded because skewness
    carries no direction information there.
    """

    alpha1: float
    mu1: np.ndarray
    mu2: np.ndarray
    sigma: SpdMatrix

    def __post_init__(self):
        if not 0.5 < self.alpha1 < 1.0:
            raise ValueError(f"alpha1 must be in (0.5, 1), got {self.alpha1}")
        mu1 = np.asarray(self.mu1, dtype=float)
        mu2 = np.asarray(self.mu2, dtype=float)
        sigma = self.sigma if isinstance(self.sigma, SpdMatrix) else SpdMatrix(self.sigma)
        if mu1.shape != mu2.shape or mu1.ndim != 1:
            raise ValueError("mu1 and mu2 must be vectors of equal length")
        if sigma.shape != (len(mu1), len(mu1)):
            raise ValueError("sigma shape does not match the mean vectors")
        if np.array_equal(mu1, mu2):
            raise ValueError("mu1 and mu2 must differ (degenerate mixture)")
        object.__setattr__(self, "mu1", mu1)
        object.__setattr__(self, "mu2", mu2)
        object.__setattr__(self, "sigma", sigma)

    @property
    def p(self):
        return len(self.mu1)


@dataclass(frozen=True)
class DerivedParams:
    """Every derived population symbol of the mixture.

    h      mean difference mu2 - mu1
    theta  Sigma^{-1} h, the unnormalized discriminant direction
    tau    h' Sigma^{-1} h, squared Mahalanobis distance of the means
    beta   alpha1 * alpha2
    gamma  alpha1 - alpha2
    delta  (1 + beta tau)^{-1/2}
    m      Sigma^{-1/2} h
    w      m / ||m||
    """

    h: np.ndarray
    theta: np.ndarray
    tau: float
    beta: float
    gamma: float
    delta: float
    w: np.ndarray
    m: np.ndarray


@dataclass(frozen=True)
class DataSet:
    """An n x p observation matrix with optional component labels.

    Labels take values in {-1, +1}; component 1 maps to -1.
    """

    observations: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        obs = np.asarray(self.observations, dtype=float)
        if obs.ndim != 2:
            raise ValueError("observations must be an n x p matrix")
        object.__setattr__(self, "observations", obs)
        if self.labels is not None:
            lab = np.asarray(self.labels)
            if lab.shape != (obs.shape[0],):
                raise ValueError("labels length must match the number of rows")
            if not np.isin(lab, (-1, 1)).all():
                raise ValueError("labels must take values in {-1, +1}")
            object.__setattr__(self, "labels", lab.astype(int))

    @property
    def n(self):
        return self.observations.shape[0]

    @property
    def p(self):
        return self.observations.shape[1]


@dataclass(frozen=True)
class PopulationMoments:
    """Closed-form covariance blocks of (x, x kron x, x x'x) for the
    centered mixture, plus the moments c2 and c3 themselves.

    Kronecker coordinates are laid out so that (x kron x)[i*p + j]
    equals x_i x_j, matching numpy.kron.
    """

    c2: SpdMatrix
    c3: np.ndarray
    cov_x_xkronx: np.ndarray
    cov_xkronx: np.ndarray
    cov_x_xxtx: np.ndarray
    cov_xkronx_xxtx: np.ndarray
    cov_xxtx: np.ndarray


def derive(params):
    """Compute all derived population symbols from the raw parameters."""
    sigma = np.asarray(params.sigma)
    h = params.mu2 - params.mu1
    theta = np.linalg.solve(sigma, h)
    tau = float(h @ theta)
    alpha2 = 1.0 - params.alpha1
    beta = params.alpha1 * alpha2
    gamma = params.alpha1 - alpha2
    delta = (1.0 + beta * tau) ** -0.5
    m = np.asarray(inv_sqrt(sigma)) @ h
    w = m / np.linalg.norm(m)
    return DerivedParams(h=h, theta=theta, tau=tau, beta=beta, gamma=gamma,
                         delta=delta, w=w, m=m)


def sample(params, n, rng):
    """Draw n observations from the mixture.

    Each row comes from component 1 with probability alpha1 (label -1)
    and from component 2 otherwise (label +1). The draw is fully
    determined by the state of ``rng``: first n uniforms pick the
    components, then n*p standard normals supply the noise.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    p = params.p
    from_first = rng.random(n) < params.alpha1
    noise = rng.standard_normal((n, p))
    chol = np.linalg.cholesky(np.asarray(params.sigma))
    means = np.where(from_first[:, None], params.mu1, params.mu2)
    obs = means + noise @ chol.T
    labels = np.where(from_first, -1, 1)
    return DataSet(observations=obs, labels=labels)


def population_moments(params):
    """Evaluate the six closed-form covariance blocks of
    (x, x kron x, x x'x) for the centered version of ``params``.

    Returns
    -------
    PopulationMoments
        c2 = Sigma + beta h h'
        c3 = beta gamma ||h||^2 h
        and the four higher-order blocks; see the field docstrings.
    """
    d = derive(params)
    sigma = np.asarray(params.sigma)
    h = d.h
    beta, gamma = d.beta, d.gamma
    p = params.p
    hh = np.outer(h, h)
    nh2 = float(h @ h)
    tr_s = float(np.trace(sigma))
    s2 = sigma @ sigma
    k_pp = commutation_matrix(p)
    kron_h = np.kron(h, h)

    c2 = sigma + beta * hh
    c3 = beta * gamma * nh2 * h

    cov_x_xkronx = beta * gamma * np.outer(h, kron_h)

    cov_x_xxtx = (
        tr_s * sigma + 2.0 * s2
        + 2.0 * beta * (hh @ sigma) + 2.0 * beta * (sigma @ hh)
        + beta * nh2 * sigma + beta * tr_s * hh
        + beta * (1.0 - 3.0 * beta) * nh2 * hh
    )

    cov_xkronx = (
        (np.eye(p * p) + k_pp)
        @ (np.kron(sigma, sigma) + beta * np.kron(hh, sigma) + beta * np.kron(sigma, hh))
        + beta * (1.0 - 4.0 * beta) * np.kron(hh, hh)
    )

    col_h = h[:, None]
    cov_xkronx_xxtx = (
        beta * gamma * (tr_s + (1.0 - 3.0 * beta) * nh2) * np.outer(kron_h, h)
        + 2.0 * beta * gamma
        * ((np.kron(np.eye(p), sigma) + np.kron(sigma, np.eye(p))) @ np.outer(kron_h, h))
        + 2.0 * beta * gamma * np.outer(kron_h, sigma @ h)
        + beta * gamma * nh2 * np.kron(col_h, sigma)
        + beta * gamma * nh2 * np.kron(sigma, col_h)
    )

    # Two coefficients below are (1 - 3 beta), not gamma; the gathered
    # sixth moment has no odd dependence on the weight difference.
    inner = (
        tr_s * sigma + 2.0 * s2
        + 2.0 * beta * (hh @ sigma) + beta * tr_s * hh + 2.0 * beta * (sigma @ hh)
        + beta * (1.0 - 3.0 * beta) * nh2 * hh + beta * nh2 * sigma
    )
    cov_xxtx = (
        4.0 * beta * tr_s * (sigma @ hh)
        + 8.0 * beta * (s2 @ hh)
        + 4.0 * beta * (1.0 - 3.0 * beta) * nh2 * (sigma @ hh)
        + (2.0 * float(np.trace(s2)) + tr_s ** 2) * (sigma + beta * hh)
        + 4.0 * (inner @ sigma)
        + beta * (2.0 * tr_s * nh2 + 4.0 * float(h @ sigma @ h))
        * (sigma + (1.0 - 3.0 * beta) * hh)
        + beta * (1.0 - 3.0 * beta) * nh2 ** 2 * (sigma + (1.0 - 3.0 * beta) * hh)
    )

    return PopulationMoments(
        c2=SpdMatrix((c2 + c2.T) / 2.0),
        c3=c3,
        cov_x_xkronx=cov_x_xkronx,
        cov_xkronx=(cov_xkronx + cov_xkronx.T) / 2.0,
        cov_x_xxtx=(cov_x_xxtx + cov_x_xxtx.T) / 2.0,
        cov_xkronx_xxtx=cov_xkronx_xxtx,
        cov_xxtx=(cov_xxtx + cov_xxtx.T) / 2.0,
    )


def whitened_population(params):
    """The canonical law of the whitened mixture variable.

    Whitening x by C2^{-1/2} after centering yields, up to an orthogonal
    rotation, the mixture returned here: means -alpha2 * s * w and
    alpha1 * s * w with s = sqrt(tau / (1 + beta tau)), and component
    covariance I - (beta tau / (1 + beta tau)) w w'. Its total covariance
    is the identity and the standardized distance between the component
    means is still tau.
    """
    d = derive(params)
    p = params.p
    sep = np.sqrt(d.tau / (1.0 + d.beta * d.tau))
    shrink = d.beta * d.tau / (1.0 + d.beta * d.tau)
    comp_cov = np.eye(p) - shrink * np.outer(d.w, d.w)
    alpha2 = 1.0 - params.alpha1
    return MixtureParams(
        alpha1=params.alpha1,
        mu1=-alpha2 * sep * d.w,
        mu2=params.alpha1 * sep * d.w,
        sigma=SpdMatrix((comp_cov + comp_cov.T) / 2.0),
    )


def whitened_mixture(params):
    """The exact law of C2^{-1/2} (x - E x), without the orthogonal
    rotation that ``whitened_population`` hides.

    Useful for injecting exact population moments into the estimators:
    the whitened variable is again a two-component location mixture,
    with mean difference C2^{-1/2} h and component covariance
    C2^{-1/2} Sigma C2^{-1/2}.
    """
    d = derive(params)
    c2 = np.asarray(params.sigma) + d.beta * np.outer(d.h, d.h)
    root = np.asarray(inv_sqrt(c2))
    h_w = root @ d.h
    sigma_w = root @ np.asarray(params.sigma) @ root
    alpha2 = 1.0 - params.alpha1
    return MixtureParams(
        alpha1=params.alpha1,
        mu1=-alpha2 * h_w,
        mu2=params.alpha1 * h_w,
        sigma=SpdMatrix((sigma_w + sigma_w.T) / 2.0),
    )


def population_third_moment_slices(params):
    """Frontal slices of the third central moment tensor of the mixture.

    The tensor is beta gamma (h kron h kron h), so slice k equals
    beta gamma h_k h h'. For the whitened law these are the population
    counterparts of the sample T_k matrices.
    """
    d = derive(params)
    hh = np.outer(d.h, d.h)
    return [d.beta * d.gamma * d.h[k] * hh for k in range(params.p)]
