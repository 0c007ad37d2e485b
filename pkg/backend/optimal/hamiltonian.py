import logging
import math
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from backend.config import settings
from backend.core.exception_handler import (
    DegenerateBeta,
    IndexBeyondRank,
    NoConvergenceCertificate,
    OutOfRange,
)
from backend.gibbs.solver import FiniteHamiltonian, GibbsState, Hamiltonian, SequenceHamiltonian
from backend.spectra.spectrum import Spectrum, eta

logger = logging.getLogger(__name__)


class Case(str, Enum):
    A = "A"  # finite rank, uniform Gibbs state
    B = "B"


class BreakpointTable(BaseModel):
    """E_1 = 0, E_k = E0/(d_k + k p_k): m은 E ∈ (E_m, E_{m+1}] 로 결정"""

    model_config = ConfigDict(frozen=True)

    E0: float
    values: List[float]

    def __len__(self) -> int:
        return len(self.values)

    def kernel_dimension(self, E: float) -> int:
        """E_m < E ≤ E_{m+1} 인 m (오른쪽 끝은 상대 허용오차로 비교)"""
        upper = np.asarray(self.values[1:])
        inside = E <= upper * (1.0 + settings.EQUALITY_RTOL)
        if not inside.any():
            raise IndexBeyondRank(f"breakpoint table ends at E_{len(self.values)}={self.values[-1]:.6g} < E={E:.6g}")
        return int(np.argmax(inside)) + 1


def _validate_energies(E0: float, E: float) -> None:
    if not (E0 > 0 and math.isfinite(E0)):
        raise OutOfRange(f"E0 must be a positive number, got {E0}")
    if not (E > 0 and math.isfinite(E)):
        raise OutOfRange(f"E must be a positive number, got {E}")


def _breakpoint_values(spec: Spectrum, E0: float, K: int) -> np.ndarray:
    p, d, _ = spec.tail_arrays(K)
    k = np.arange(1, p.size + 1)
    values = E0 / (d + k * p)
    values[0] = 0.0
    return values


def breakpoints(spec: Spectrum, E0: float, upto: float) -> BreakpointTable:
    """E_K ≥ upto 이거나 k = n 이 될 때까지 표를 확장"""
    _validate_energies(E0, upto)
    limit = spec.known_prefix
    K = 64 if limit is None else min(64, limit)
    while True:
        values = _breakpoint_values(spec, E0, K)
        if values[-1] * (1.0 + settings.EQUALITY_RTOL) >= upto or (spec.rank is not None and K >= spec.rank):
            return BreakpointTable(E0=E0, values=values.tolist())
        if limit is not None and K >= limit:
            raise IndexBeyondRank(
                f"E={upto:.6g} needs more than the {limit} known eigenvalues of the {spec.model} spectrum"
            )
        K = 2 * K if limit is None else min(2 * K, limit)


def _case_a_kernel(spec: Spectrum) -> int:
    n = spec.rank
    p = spec.eigenvalues(n)
    ties = int(np.isclose(p, p[-1], rtol=settings.EQUALITY_RTOL, atol=0.0).sum())
    return n - min(ties, n - 1)


def classify(spec: Spectrum, E0: float, E: float) -> Tuple[Case, int]:
    """경우 A/B 판정과 커널 차원 m"""
    _validate_energies(E0, E)
    if spec.rank is not None:
        n = spec.rank
        threshold = E0 / (spec.eigenvalue(n) * n)
        if E >= threshold * (1.0 - settings.EQUALITY_RTOL):
            return Case.A, _case_a_kernel(spec)
    m = breakpoints(spec, E0, E).kernel_dimension(E)
    return Case.B, m


class OptimalHamiltonian(BaseModel):
    """H(ρ,E0,E): 경우 B에서는 C·P_m(−ln ρ + shift), 경우 A에서는 C·P_m"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    case: Case
    m: int
    theta: float
    E0: float
    E: float
    rank: Optional[int]
    beta: Optional[float] = None
    C: float
    D: Optional[float] = None
    level_shift: Optional[float] = None
    d_m: float
    s_m: float
    spectrum: Spectrum = Field(exclude=True, repr=False)

    def levels(self, upto: Optional[int] = None) -> np.ndarray:
        """h_1..h_upto (유한 랭크에서는 h_n 까지)"""
        if upto is None:
            upto = self.rank if self.rank is not None else max(settings.LEVELS_PREVIEW, self.m + 1)
        if self.rank is not None:
            upto = min(upto, self.rank)
        i = np.arange(1, upto + 1)
        return self._levels_at(i)

    def _levels_at(self, i: np.ndarray) -> np.ndarray:
        i = np.asarray(i, dtype=np.int64)
        h = np.zeros(i.shape, dtype=float)
        upper = i > self.m
        if not upper.any():
            return h
        if self.case is Case.A:
            h[upper] = self.C
        else:
            # log space: no cancellation for tiny p_i
            h[upper] = self.C * (self.level_shift - self.spectrum.log_eigenvalues(i[upper]))
            np.maximum(h, 0.0, out=h)
        return h

    def level(self, i: int) -> float:
        if i < 1:
            raise IndexBeyondRank(f"level index must be ≥ 1, got {i}")
        if self.rank is not None and i > self.rank:
            return math.inf
        return float(self._levels_at(np.array([i]))[0])

    @property
    def entropy(self) -> float:
        """S(γ_H(E)): 경우 A는 ln n"""
        if self.case is Case.A:
            return math.log(self.rank)
        theta, d = self.theta, self.d_m
        rest = 1.0 - d * theta
        return theta * self.s_m + eta(rest) + rest * math.log(self.m) + d * eta(theta)

    @property
    def gibbs_beta(self) -> float:
        """준위 h_i 기준 γ_H(E) 의 역온도 β_m / E0"""
        return 0.0 if self.case is Case.A else self.beta / self.E0

    @property
    def satisfies_gibbs_condition(self) -> Optional[bool]:
        """모든 β > 0 에서 Tr e^{−βH} < ∞ 인지"""
        if self.rank is not None:
            return True
        return self.spectrum.has_all_power_sums()

    def as_hamiltonian(self) -> Hamiltonian:
        if self.rank is not None:
            return FiniteHamiltonian(self.levels(self.rank))
        if self.spectrum.known_prefix is not None:
            raise NoConvergenceCertificate(
                f"levels of a {self.spectrum.model} spectrum are known only up to index {self.spectrum.known_prefix}"
            )
        spectrum, m, C, shift = self.spectrum, self.m, self.C, self.level_shift

        def tail_bound(b: float, N: int) -> float:
            # Σ_{i>N} e^{−b h_i} = e^{−bC·shift} Σ_{i>N} p_i^{bC} for N ≥ m
            head = max(0, m - N)
            return head + math.exp(-b * C * shift) * spectrum.power_tail(b * C, max(N, m))

        return SequenceHamiltonian(self._levels_at, tail_bound=tail_bound)


def optimal_hamiltonian(spec: Spectrum, E0: float, E: float) -> OptimalHamiltonian:
    """최적 해밀토니안 H(ρ,E0,E) 구성"""
    case, m = classify(spec, E0, E)
    theta = E / E0

    if case is Case.A:
        n = spec.rank
        level = E0 / (spec.eigenvalue(n) * (n - m))
        logger.debug(f"case A: n={n}, m={m}, level={level:.12g}")
        return OptimalHamiltonian(
            case=case, m=m, theta=theta, E0=E0, E=E, rank=n,
            C=level, d_m=0.0, s_m=0.0, spectrum=spec,
        )

    tails = spec.tail_sums(m)
    shift = math.log1p(-theta * tails.d) - math.log(theta * m)
    beta = tails.s + tails.d * shift
    if beta <= settings.BETA_DEGENERACY_TOL:
        raise DegenerateBeta(f"β_m={beta:.3e} is not positive (m={m}, θ={theta:.6g})")
    D = math.log1p(-tails.d) - math.log(theta * m)
    logger.debug(f"case B: m={m}, theta={theta:.6g}, beta={beta:.12g}")
    return OptimalHamiltonian(
        case=case, m=m, theta=theta, E0=E0, E=E, rank=spec.rank,
        beta=beta, C=E0 / beta, D=D, level_shift=shift,
        d_m=tails.d, s_m=tails.s, spectrum=spec,
    )


def optimal_entropy(spec: Spectrum, E0: float, E: float) -> float:
    """min_H S(γ_H(E)) 의 닫힌 형태"""
    return optimal_hamiltonian(spec, E0, E).entropy


def optimal_gibbs(spec: Spectrum, E0: float, E: float, preview: Optional[int] = None) -> GibbsState:
    """최적 해밀토니안의 Gibbs 상태 (무한 랭크에서는 앞부분 가중치만)"""
    H = optimal_hamiltonian(spec, E0, E)

    if H.case is Case.A:
        n = H.rank
        return GibbsState(
            beta=0.0,
            weights=[1.0 / n] * n,
            mean_energy=float(H.levels(n).sum() / n),
            entropy=math.log(n),
            finite_dim_uniform=True,
        )

    count = H.rank if H.rank is not None else max(preview or settings.LEVELS_PREVIEW, H.m + 1)
    beta = H.gibbs_beta
    log_Z = math.log(H.m) - math.log1p(-H.theta * H.d_m)
    h = H.levels(count)
    weights = np.exp(-beta * h - log_Z)
    # 앞부분 이후 가중치는 θ p_i: 꼬리 에너지 θC(shift·d + s)
    tail = spec.tail_sums(count)
    tail_mass = 0.0 if H.rank is not None else H.theta * tail.d
    tail_energy = H.theta * H.C * (H.level_shift * tail.d + tail.s)
    return GibbsState(
        beta=beta,
        weights=weights.tolist(),
        mean_energy=float(np.dot(h, weights)) + tail_energy,
        entropy=H.entropy,
        tail_mass=tail_mass,
    )
