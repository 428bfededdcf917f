"""Post-hoc verification of a selected subset.

Everything here is recomputed from the raw inputs; nothing from the
selector's internal state is trusted. The lambda_min claim is discharged
exactly through the Gram matrix: for all coefficient choices,
|| sum a_i w_i ||^2 >= lambda_min(Gram) * sum a_i^2.
"""

import math
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from .decomposition import Decomposition, from_standard_basis
from .errors import IndexRangeError, ModeError
from .matrix_core import frobenius_norm_sq, gram_min_eigenvalue, spectral_norm
from .tolerances import Tolerances, default_tolerances


@dataclass(frozen=True)
class Certificate:
    """Independently recomputed evidence that sigma meets the guarantee.

    sigma is stored 0-based and sorted; lambda_min is +inf for the empty
    subset so vacuous runs compare gracefully.
    """

    sigma: List[int]
    epsilon: float
    subset_size_bound: int
    lambda_min: float
    guarantee_bound: float
    stable_rank: float
    b0: float
    delta: float
    independent: bool
    passes: bool
    vacuous: bool
    independence_tolerance: float

    def to_json_dict(self) -> dict:
        return {
            "sigma": [i + 1 for i in self.sigma],
            "epsilon": self.epsilon,
            "t": self.subset_size_bound,
            "lambda_min": None if math.isinf(self.lambda_min) else self.lambda_min,
            "bound": self.guarantee_bound,
            "stable_rank": self.stable_rank,
            "b0": self.b0,
            "delta": self.delta,
            "passes": self.passes,
            "vacuous": self.vacuous,
        }


def _checked_sigma(sigma: Sequence[int], m: int) -> List[int]:
    sigma = [int(i) for i in sigma]
    if len(set(sigma)) != len(sigma):
        raise IndexRangeError("sigma contains repeated indices")
    if any(i < 0 or i >= m for i in sigma):
        raise IndexRangeError(f"sigma indices must lie in [0, {m})")
    return sorted(sigma)


def verify(
    dec: Decomposition, epsilon: float, sigma: Sequence[int], tol: Tolerances | None = None
) -> Certificate:
    """Certificate for sigma against the size and lambda_min guarantees.

    passes iff |sigma| >= floor(eps^2 * stable_rank), the selected vectors
    are linearly independent, and the Gram lambda_min strictly exceeds
    (1 - eps)^2 ||L||_F^2 / m. Strictness carries no added slack: the
    guarantee holds with margin, so a borderline value signals genuine
    numerical trouble.
    """
    tol = tol or default_tolerances()
    L = np.asarray(dec.L, dtype=float)
    m = dec.m
    sigma = _checked_sigma(sigma, m)
    frob_sq = frobenius_norm_sq(L)
    spec_sq = spectral_norm(L) ** 2
    srank = frob_sq / spec_sq
    t_bound = int(math.floor(epsilon * epsilon * srank))
    bound = (1.0 - epsilon) ** 2 * frob_sq / m
    b0 = (1.0 - epsilon) * frob_sq / m
    delta = (1.0 - epsilon) * spec_sq / (epsilon * m)

    if sigma:
        W = dec.mapped_vectors()[sigma]
        lam_min = gram_min_eigenvalue(W)
        row_sq = float(np.max(np.sum(W * W, axis=1)))
        independent = lam_min > tol.independence * row_sq
    else:
        lam_min = math.inf
        independent = True

    passes = len(sigma) >= t_bound and independent and lam_min > bound
    return Certificate(
        sigma=sigma,
        epsilon=epsilon,
        subset_size_bound=t_bound,
        lambda_min=lam_min,
        guarantee_bound=bound,
        stable_rank=srank,
        b0=b0,
        delta=delta,
        independent=independent,
        passes=passes,
        vacuous=t_bound == 0,
        independence_tolerance=tol.independence,
    )


def verify_classical(
    L, epsilon: float, sigma: Sequence[int], tol: Tolerances | None = None
) -> Certificate:
    """Unit-column certificate: |sigma| >= floor(eps^2 n / ||L||_2^2) and
    lambda_min of the Gram of the selected columns strictly above (1-eps)^2.

    Because the columns have unit norm, ||L||_F^2 = n and both checks
    coincide with the general certificate on the standard-basis system.
    """
    tol = tol or default_tolerances()
    L = np.asarray(L, dtype=float)
    norms = np.linalg.norm(L, axis=0)
    worst = int(np.argmax(np.abs(norms - 1.0)))
    if abs(norms[worst] - 1.0) > tol.unit_column:
        raise ModeError(
            f"classical certificate needs unit-norm columns; column {worst + 1} "
            f"has norm {norms[worst]:.12g}"
        )
    dec = from_standard_basis(L, tol=tol)
    return verify(dec, epsilon, sigma, tol)
