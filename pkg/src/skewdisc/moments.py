"""Sample moment statistics: mean, second and third central moments and
the third-moment slices of whitened data.

The second moment uses divisor n (not n - 1) throughout, matching the
estimator definitions the asymptotic theory is stated for.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MomentSet:
    """Sample mean, centered second moment and third-moment vector."""

    mean: np.ndarray
    c2_hat: np.ndarray
    c3_hat: np.ndarray
    n: int


@dataclass(frozen=True)
class TkSet:
    """Third-moment slices T_k of centered, whitened observations.

    slices[k] = (1/n) sum_i z_i z_i' (e_k' z_i), each symmetric.
    """

    slices: tuple

    def __post_init__(self):
        slices = tuple(np.asarray(s, dtype=float) for s in self.slices)
        for s in slices:
            gap = np.linalg.norm(s - s.T)
            if gap > 1e-10 * max(np.linalg.norm(s), 1.0):
                raise ValueError("third-moment slices must be symmetric")
        object.__setattr__(self, "slices", slices)

    @property
    def p(self):
        return len(self.slices)


def sample_moments(data):
    """Mean, covariance (divisor n) and third-moment vector of a sample.

    c3_hat = (1/n) sum_i (x_i - mean)(x_i - mean)'(x_i - mean), the
    vector of row-wise squared norms weighted against the centered rows.
    """
    x = data.observations
    n = data.n
    if n < 2:
        raise ValueError("need at least 2 observations for sample moments")
    mean = x.mean(axis=0)
    xc = x - mean
    c2 = xc.T @ xc / n
    c3 = xc.T @ (xc * xc).sum(axis=1) / n
    return MomentSet(mean=mean, c2_hat=(c2 + c2.T) / 2.0, c3_hat=c3, n=n)


def tk_slices(whitened):
    """Third-moment slices of already centered and whitened data.

    One pass per coordinate; no p^3 intermediate tensor is stored.
    """
    z = np.asarray(whitened, dtype=float)
    n = z.shape[0]
    out = []
    for k in range(z.shape[1]):
        s = z.T @ (z * z[:, [k]]) / n
        out.append((s + s.T) / 2.0)
    return TkSet(slices=tuple(out))


def tobi_matrix(tk):
    """Sum of squared third-moment slices; symmetric positive
    semidefinite by construction."""
    t = sum(s @ s for s in tk.slices)
    return (t + t.T) / 2.0
