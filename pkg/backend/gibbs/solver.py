import json
import logging
import math
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Callable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.optimize import brentq
from scipy.special import entr

from backend.config import settings
from backend.core.exception_handler import (
    BadConfig,
    InvalidHamiltonian,
    NoConvergenceCertificate,
    NoGibbsState,
    OutOfRange,
)

logger = logging.getLogger(__name__)

TailBound = Callable[[float, int], float]


class GibbsState(BaseModel):
    """γ_H(E): 가중치는 유한 영역 전체 또는 무한 영역의 앞부분"""

    model_config = ConfigDict(frozen=True)

    beta: float
    weights: List[float]
    mean_energy: float
    entropy: float
    finite_dim_uniform: bool = False
    tail_mass: float = 0.0


class Hamiltonian(ABC):
    """비감소 고유값 h_1 = 0 ≤ h_2 ≤ ... 로 주어진 접지 해밀토니안"""

    @property
    @abstractmethod
    def dimension(self) -> Optional[int]:
        """영역 차원, 무한이면 None"""

    @property
    def finite_domain(self) -> bool:
        return self.dimension is not None

    @abstractmethod
    def levels(self, upto: int) -> np.ndarray:
        """h_1..h_min(upto, dim)"""

    @abstractmethod
    def sums(self, b: float) -> Tuple[float, float]:
        """(Z(b), Σ h_i e^{−b h_i})"""

    @abstractmethod
    def converges(self, b: float) -> bool:
        """Z(b) < ∞ 여부"""

    @abstractmethod
    def scaled(self, c: float) -> "Hamiltonian":
        ...


class FiniteHamiltonian(Hamiltonian):
    """유한 차원 영역: 나머지 준위는 +∞"""

    def __init__(self, levels):
        h = np.asarray(levels, dtype=float)
        if h.ndim != 1 or h.size == 0:
            raise InvalidHamiltonian("levels must be a nonempty list")
        if np.any(np.isnan(h)) or np.any(h < 0):
            raise InvalidHamiltonian("levels must be nonnegative numbers")
        h = np.sort(h[np.isfinite(h)])
        if h.size == 0 or h[0] != 0.0:
            raise InvalidHamiltonian("the minimal level must be 0")
        self._h = h

    @property
    def dimension(self) -> int:
        return int(self._h.size)

    def levels(self, upto: int) -> np.ndarray:
        return self._h[:upto].copy()

    def sums(self, b: float):
        boltzmann = np.exp(-b * self._h)
        return float(boltzmann.sum()), float(np.dot(self._h, boltzmann))

    def converges(self, b: float) -> bool:
        return True

    def scaled(self, c: float) -> "FiniteHamiltonian":
        return FiniteHamiltonian(c * self._h)


class SequenceHamiltonian(Hamiltonian):
    """무한 차원 영역: 준위 생성 함수 + 꼬리 인증

    `tail_bound(b, N)` 은 Σ_{i>N} e^{−b h_i} 의 상계 (발산하면 +∞), `energy_tail_bound(b, N)` 은
    Σ_{i>N} h_i e^{−b h_i} 의 상계. 또는 `min_gap` 이 i ≥ `gap_from` 에서 h_{i+1} − h_i ≥ min_gap 을 보장.
    """

    def __init__(self, level_fn: Callable[[np.ndarray], np.ndarray], tail_bound: Optional[TailBound] = None,
                 min_gap: Optional[float] = None, gap_from: int = 1, scale: float = 1.0,
                 energy_tail_bound: Optional[TailBound] = None):
        if tail_bound is None and (min_gap is None or min_gap <= 0):
            logger.debug("sequence Hamiltonian without tail certificate; series will be probed only")
        self._level_fn = level_fn
        self._tail_bound = tail_bound
        self._energy_tail_bound = energy_tail_bound
        self._min_gap = min_gap
        self._gap_from = gap_from
        self._scale = scale
        if float(self._levels(np.array([1]))[0]) != 0.0:
            raise InvalidHamiltonian("the minimal level must be 0")

    @property
    def dimension(self) -> None:
        return None

    def _levels(self, indices: np.ndarray) -> np.ndarray:
        return self._scale * np.asarray(self._level_fn(indices), dtype=float)

    def levels(self, upto: int) -> np.ndarray:
        return self._levels(np.arange(1, upto + 1))

    def tail(self, b: float, N: int, last_level: float) -> float:
        """Σ_{i>N} e^{−b h_i} 의 인증된 상계"""
        if self._tail_bound is not None:
            return float(self._tail_bound(b * self._scale, N))
        if self._min_gap is not None and self._min_gap > 0 and N >= self._gap_from:
            ratio = math.exp(-b * self._scale * self._min_gap)
            return math.exp(-b * last_level) * ratio / (1.0 - ratio)
        return math.inf

    def converges(self, b: float) -> bool:
        if b <= 0:
            return False
        N = max(self._gap_from, settings.SERIES_CHUNK)
        last = float(self._levels(np.array([N]))[0])
        if self._tail_bound is not None:
            return math.isfinite(self.tail(b, N, last))
        if math.isfinite(self.tail(b, N, last)):
            return True
        partial = 0.0
        start = 1
        while start <= settings.SERIES_MAX_TERMS:
            idx = np.arange(start, start + settings.SERIES_CHUNK)
            partial += float(np.exp(-b * self._levels(idx)).sum())
            if partial > settings.DIVERGENCE_THRESHOLD:
                return False
            start += settings.SERIES_CHUNK
        raise NoConvergenceCertificate(f"cannot decide convergence of Tr e^(-bH) at b={b:.6g}")

    def _energy_tail(self, b: float, N: int, last_level: float) -> float:
        best = math.inf
        if self._energy_tail_bound is not None:
            best = self._scale * float(self._energy_tail_bound(b * self._scale, N))
        # h e^{−bh} ≤ e^{−(b−t)h} / (e t) for any 0 < t < b
        for fraction in (0.5, 0.125, 1.0 / 64):
            t = b * fraction
            best = min(best, self.tail(b - t, N, last_level) / (math.e * t))
        return best

    def sums(self, b: float):
        if b <= 0:
            return math.inf, math.inf
        Z = 0.0
        energy = 0.0
        start = 1
        while start <= settings.SERIES_MAX_TERMS:
            idx = np.arange(start, start + settings.SERIES_CHUNK)
            h = self._levels(idx)
            boltzmann = np.exp(-b * h)
            Z += float(boltzmann.sum())
            energy += float(np.dot(h, boltzmann))
            N = int(idx[-1])
            z_tail = self.tail(b, N, float(h[-1]))
            e_tail = self._energy_tail(b, N, float(h[-1]))
            if z_tail <= 1e-16 * Z and e_tail <= 1e-16 * max(energy, 1e-300):
                return Z, energy
            if Z > settings.DIVERGENCE_THRESHOLD and not math.isfinite(z_tail):
                return math.inf, math.inf
            start += settings.SERIES_CHUNK
        raise NoConvergenceCertificate(f"series for Tr e^(-bH) not certified at b={b:.6g}")

    def scaled(self, c: float) -> "SequenceHamiltonian":
        return SequenceHamiltonian(self._level_fn, self._tail_bound, self._min_gap, self._gap_from, self._scale * c,
                                  self._energy_tail_bound)


def partition_function(H: Hamiltonian, b: float) -> float:
    """Z(b) = Σ e^{−b h_i}, +∞ 준위는 0으로 기여"""
    if b <= 0:
        raise OutOfRange(f"partition function needs b > 0, got {b}")
    Z, _ = H.sums(b)
    return Z


def mean_energy(H: Hamiltonian, b: float) -> float:
    """⟨H⟩_b = Σ h_i e^{−b h_i} / Z(b)"""
    if b <= 0:
        raise OutOfRange(f"mean energy needs b > 0, got {b}")
    Z, energy = H.sums(b)
    if not math.isfinite(Z) or not math.isfinite(energy):
        raise NoConvergenceCertificate(f"⟨H⟩_b is not finite at b={b:.6g}")
    return energy / Z


def g_abscissa(H: Hamiltonian) -> float:
    """g(H): Z(b) < ∞ 인 b의 하한 (이분법, 마지막으로 수렴한 b 반환)"""
    if H.finite_domain:
        return 0.0
    tol = settings.G_ABSCISSA_TOL
    if H.converges(tol):
        return 0.0
    lo, hi = tol, 1.0
    while not H.converges(hi):
        lo, hi = hi, 2.0 * hi
        if hi > 1e12:
            raise NoConvergenceCertificate("Tr e^(-bH) diverges for every probed b")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if H.converges(mid):
            hi = mid
        else:
            lo = mid
    return hi


def h_star(H: Hamiltonian) -> float:
    """h_*(H): 유한 영역이면 준위의 산술평균, 아니면 ⟨H⟩_{g(H)} 또는 +∞"""
    if H.finite_domain:
        return float(H.levels(H.dimension).mean())
    g = g_abscissa(H)
    if g <= settings.G_ABSCISSA_TOL or not H.converges(g):
        return math.inf
    try:
        return mean_energy(H, g)
    except NoConvergenceCertificate:
        return math.inf


def _bracket(residual: Callable[[float], float], floor: float) -> Tuple[float, float]:
    """residual(lo) > 0 > residual(hi) 인 구간 찾기 (residual 은 b 에 대해 감소)"""
    b = max(1.0, 2.0 * floor)
    r = residual(b)
    if r == 0.0:
        return b, b
    if r > 0:
        lo = b
        hi = 2.0 * b
        while residual(hi) > 0:
            lo, hi = hi, 2.0 * hi
            if hi > 1e300:
                raise NoConvergenceCertificate("no upper bracket for the Gibbs equation")
        return lo, hi
    hi = b
    lo = floor + 0.5 * (b - floor)
    for _ in range(settings.GIBBS_MAX_ITER * 5):
        if residual(lo) > 0:
            return lo, hi
        hi, lo = lo, floor + 0.5 * (lo - floor)
    raise NoConvergenceCertificate("no lower bracket for the Gibbs equation")


def _uniform_state(H: Hamiltonian) -> GibbsState:
    dim = H.dimension
    h = H.levels(dim)
    return GibbsState(
        beta=0.0,
        weights=[1.0 / dim] * dim,
        mean_energy=float(h.mean()),
        entropy=math.log(dim),
        finite_dim_uniform=True,
    )


def solve_gibbs(H: Hamiltonian, E: float, preview: Optional[int] = None) -> GibbsState:
    """⟨H⟩_β = E 를 풀어 Gibbs 상태 계산 (유한 영역에서 E ≥ h_* 이면 균등 상태)"""
    if not E > 0:
        raise OutOfRange(f"energy must be positive, got {E}")

    hs = h_star(H)
    if H.finite_domain and E >= hs * (1.0 - settings.EQUALITY_RTOL):
        return _uniform_state(H)
    if not H.finite_domain and E > hs:
        raise NoGibbsState(f"E={E:.6g} exceeds h_*(H)={hs:.6g} on an infinite-dimensional domain")

    floor = g_abscissa(H)

    def residual(b: float) -> float:
        return mean_energy(H, b) - E

    if not H.finite_domain and math.isfinite(hs) and E >= hs * (1.0 - settings.EQUALITY_RTOL):
        beta = floor
    else:
        lo, hi = _bracket(residual, floor)
        if lo == hi:
            beta = lo
        else:
            beta = brentq(residual, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                          maxiter=settings.GIBBS_MAX_ITER)

    Z, energy = H.sums(beta)
    achieved = energy / Z
    if abs(achieved - E) > settings.GIBBS_RESIDUAL_TOL * max(1.0, E):
        raise NoConvergenceCertificate(f"Gibbs residual {abs(achieved - E):.3e} too large at E={E:.6g}")
    logger.debug(f"solved Gibbs equation: E={E:.6g}, beta={beta:.12g}")

    count = H.dimension if H.finite_domain else (preview or settings.LEVELS_PREVIEW)
    h = H.levels(count)
    weights = np.exp(-beta * h) / Z
    entropy = beta * achieved + math.log(Z)
    return GibbsState(
        beta=float(beta),
        weights=weights.tolist(),
        mean_energy=float(achieved),
        entropy=float(entropy),
        tail_mass=0.0 if H.finite_domain else float(max(0.0, 1.0 - weights.sum())),
    )


def max_entropy(H: Hamiltonian, E: float) -> float:
    """F_H(E) = inf_{b>g(H)} (E b + ln Z(b))"""
    state = solve_gibbs(H, E, preview=1)
    return state.entropy


def weights_entropy(weights) -> float:
    return float(entr(np.asarray(weights, dtype=float)).sum())


def load_hamiltonian(path: str) -> FiniteHamiltonian:
    """{"levels": [...], "finite_domain": true} 형식의 파일 읽기"""
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise BadConfig(f"cannot read Hamiltonian file {path}: {e}")
    return hamiltonian_from_payload(payload)


def hamiltonian_from_payload(payload: dict) -> FiniteHamiltonian:
    levels = payload.get("levels")
    if not isinstance(levels, list):
        raise BadConfig("Hamiltonian payload needs a 'levels' list")
    if not payload.get("finite_domain", True):
        raise BadConfig("infinite domains cannot be given as a finite level list")
    return FiniteHamiltonian(levels)
