import json
import logging
import math
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Annotated, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, model_validator
from scipy.special import entr

from backend.config import settings
from backend.core.exception_handler import (
    BadConfig,
    IndexBeyondRank,
    InfiniteEntropy,
    NonNormalized,
    NotMixed,
)

logger = logging.getLogger(__name__)


def eta(x):
    """η(x) = −x ln x, η(0) = 0"""
    value = entr(x)
    return float(value) if np.ndim(value) == 0 else value


def oscillator_entropy(energy: float) -> float:
    """g(E) = (E+1)ln(E+1) − E ln E: 평균 양자수 E인 조화진동자 Gibbs 상태의 엔트로피"""
    if energy < 0:
        raise ValueError("energy must be nonnegative")
    if energy == 0:
        return 0.0
    return (energy + 1.0) * math.log1p(energy) - energy * math.log(energy)


class TailSums(BaseModel):
    """d_k = Σ_{i>k} p_i, s_k = Σ_{i>k} η(p_i)"""

    model_config = ConfigDict(frozen=True)

    k: int
    d: float
    s: float


class Spectrum(ABC):
    """유한 엔트로피 혼합 상태의 비증가 고유값 {p_i}"""

    model: str = ""

    @property
    @abstractmethod
    def rank(self) -> Optional[int]:
        """None 이면 무한 랭크"""

    @property
    @abstractmethod
    def entropy(self) -> float:
        ...

    @property
    def is_finite(self) -> bool:
        return self.rank is not None

    @property
    def known_prefix(self) -> Optional[int]:
        """실제로 꺼낼 수 있는 고유값 개수 (None: 제한 없음)"""
        return self.rank

    def _check_index(self, i: int) -> None:
        limit = self.known_prefix
        if i < 1 or (limit is not None and i > limit):
            raise IndexBeyondRank(f"index {i} outside 1..{limit if limit is not None else '∞'} for {self.model} spectrum")

    def eigenvalue(self, i: int) -> float:
        self._check_index(i)
        return float(self.eigenvalues(i)[i - 1])

    @abstractmethod
    def eigenvalues(self, upto: int) -> np.ndarray:
        """p_1..p_min(upto, n)"""

    def log_eigenvalues(self, indices: np.ndarray) -> np.ndarray:
        indices = np.asarray(indices, dtype=np.int64)
        if indices.size == 0:
            return np.empty(0)
        self._check_index(int(indices.max()))
        self._check_index(int(indices.min()))
        return np.log(self.eigenvalues(int(indices.max()))[indices - 1])

    @abstractmethod
    def tail_arrays(self, upto: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """k = 1..min(upto, n) 의 (p_k, d_k, s_k)"""

    def tail_sums(self, k: int) -> TailSums:
        if k < 1:
            raise IndexBeyondRank(f"tail index must be ≥ 1, got {k}")
        if self.rank is not None and k >= self.rank:
            return TailSums(k=k, d=0.0, s=0.0)
        _, d, s = self.tail_arrays(k)
        return TailSums(k=k, d=float(d[k - 1]), s=float(s[k - 1]))

    @abstractmethod
    def power_tail(self, t: float, k: int) -> float:
        """Σ_{i>k} p_i^t 의 상계, 인증 불가면 +∞"""

    @abstractmethod
    def has_all_power_sums(self) -> Optional[bool]:
        """모든 β > 0 에서 Tr ρ^β < ∞ 인지 (None: 판정 불가)"""

    def describe(self, preview: int = 5) -> dict:
        shown = self.eigenvalues(preview if self.known_prefix is None else min(preview, self.known_prefix))
        return {
            "model": self.model,
            "rank": self.rank,
            "entropy": self.entropy,
            "leading_eigenvalues": [float(p) for p in shown],
            "tail_sums": [self.tail_sums(k).model_dump() for k in range(1, len(shown) + 1)],
        }


class FiniteSpectrum(Spectrum):
    """유한 랭크 스펙트럼 (꼬리 합은 뒤에서부터 누적)"""

    def __init__(self, p: np.ndarray, model: str):
        self.model = model
        self._p = np.asarray(p, dtype=float)
        self._logp = np.log(self._p)
        self._eta = entr(self._p)
        # suffix sums: index k holds Σ_{i>k}
        self._d = np.concatenate([np.cumsum(self._p[::-1])[::-1], [0.0]])
        self._s = np.concatenate([np.cumsum(self._eta[::-1])[::-1], [0.0]])
        self._entropy = float(self._s[0])

    @property
    def rank(self) -> int:
        return int(self._p.size)

    @property
    def entropy(self) -> float:
        return self._entropy

    def eigenvalues(self, upto: int) -> np.ndarray:
        return self._p[:max(0, min(upto, self.rank))].copy()

    def log_eigenvalues(self, indices: np.ndarray) -> np.ndarray:
        indices = np.asarray(indices, dtype=np.int64)
        if indices.size and (indices.min() < 1 or indices.max() > self.rank):
            raise IndexBeyondRank(f"indices outside 1..{self.rank}")
        return self._logp[indices - 1]

    def tail_arrays(self, upto: int):
        K = max(0, min(upto, self.rank))
        return self._p[:K].copy(), self._d[1:K + 1].copy(), self._s[1:K + 1].copy()

    def power_tail(self, t: float, k: int) -> float:
        if k >= self.rank:
            return 0.0
        return float(np.exp(t * self._logp[k:]).sum())

    def has_all_power_sums(self) -> bool:
        return True


class ExplicitSpectrum(FiniteSpectrum):
    def __init__(self, p: List[float]):
        weights = np.asarray(p, dtype=float)
        if weights.ndim != 1 or weights.size == 0 or not np.all(np.isfinite(weights)):
            raise NonNormalized("eigenvalue list must be a nonempty list of finite numbers")
        if np.any(weights < 0):
            raise NonNormalized("eigenvalues must be nonnegative")
        total = float(weights.sum())
        if abs(total - 1.0) > settings.NORMALIZATION_TOL:
            raise NonNormalized(f"eigenvalues sum to {total!r}, expected 1 within {settings.NORMALIZATION_TOL}")
        weights = weights[weights > 0]
        if np.any(np.diff(weights) > 0):
            logger.warning("explicit spectrum was not nonincreasing; sorting it")
            weights = np.sort(weights)[::-1]
        weights = weights / weights.sum()
        if weights.size < 2:
            raise NotMixed("a mixed state needs at least two positive eigenvalues")
        super().__init__(weights, "explicit")


class UniformSpectrum(FiniteSpectrum):
    def __init__(self, n: int):
        if n < 2:
            raise NotMixed(f"uniform spectrum needs n ≥ 2, got {n}")
        self.n = n
        super().__init__(np.full(n, 1.0 / n), "uniform")
        self._entropy = math.log(n)
        k = np.arange(n + 1)
        self._d = (n - k) / n
        self._s = (n - k) * math.log(n) / n

    def power_tail(self, t: float, k: int) -> float:
        return max(0, self.n - k) * self.n ** (-t)


class LinearSpectrum(FiniteSpectrum):
    """p_i = 2(n−i+1)/(n(n+1))"""

    def __init__(self, n: int):
        if n < 2:
            raise NotMixed(f"linear spectrum needs n ≥ 2, got {n}")
        self.n = n
        i = np.arange(1, n + 1)
        super().__init__(2.0 * (n - i + 1) / (n * (n + 1)), "linear")
        k = np.arange(n + 1)
        self._d = (n - k) * (n - k + 1) / (n * (n + 1))


class GeometricSpectrum(Spectrum):
    """p_i = (1−q) q^{i−1}: 평균 에너지 E0 = q/(1−q)인 진동자 Gibbs 상태"""

    model = "geometric"

    def __init__(self, q: float):
        if not 0.0 < q < 1.0:
            raise NotMixed(f"geometric spectrum needs 0 < q < 1, got {q}")
        self.q = q
        self.E0 = q / (1.0 - q)
        self._log_q = math.log(q)
        self._log_1q = math.log1p(-q)
        self._entropy = oscillator_entropy(self.E0)

    @classmethod
    def from_energy(cls, E0: float) -> "GeometricSpectrum":
        if E0 <= 0:
            raise NotMixed(f"oscillator energy must be positive, got {E0}")
        spectrum = cls(E0 / (E0 + 1.0))
        spectrum.E0 = E0
        spectrum._entropy = oscillator_entropy(E0)
        return spectrum

    @property
    def rank(self) -> None:
        return None

    @property
    def entropy(self) -> float:
        return self._entropy

    def eigenvalues(self, upto: int) -> np.ndarray:
        return np.exp(self.log_eigenvalues(np.arange(1, upto + 1)))

    def log_eigenvalues(self, indices: np.ndarray) -> np.ndarray:
        indices = np.asarray(indices, dtype=np.int64)
        if indices.size and indices.min() < 1:
            raise IndexBeyondRank("indices start at 1")
        return self._log_1q + (indices - 1) * self._log_q

    def tail_arrays(self, upto: int):
        k = np.arange(1, upto + 1)
        d = np.exp(k * self._log_q)
        return np.exp(self._log_1q + (k - 1) * self._log_q), d, d * (self._entropy - k * self._log_q)

    def power_tail(self, t: float, k: int) -> float:
        if t <= 0:
            return math.inf
        return math.exp(t * self._log_1q + t * k * self._log_q) / -math.expm1(t * self._log_q)

    def has_all_power_sums(self) -> bool:
        return True


class TruncatedSpectrum(Spectrum):
    """무한 랭크 스펙트럼의 앞부분 + 인증된 꼬리 허용오차 τ"""

    model = "truncated"

    def __init__(self, p: List[float], tau: Optional[float] = None):
        self.tau = settings.TAIL_TOL if tau is None else tau
        weights = np.asarray(p, dtype=float)
        if weights.ndim != 1 or weights.size == 0 or np.any(weights <= 0) or not np.all(np.isfinite(weights)):
            raise NonNormalized("truncated spectrum needs a nonempty list of positive numbers")
        if np.any(np.diff(weights) > 0):
            logger.warning("truncated spectrum prefix was not nonincreasing; sorting it")
            weights = np.sort(weights)[::-1]
        total = float(weights.sum())
        if total > 1.0 + settings.NORMALIZATION_TOL:
            raise NonNormalized(f"prefix mass {total!r} exceeds 1")
        residual = max(0.0, 1.0 - total)
        if residual > self.tau:
            raise NonNormalized(f"residual mass {residual:.3e} exceeds tail tolerance {self.tau:.1e}")
        if weights.size < 2 or weights[0] >= 1.0:
            raise NotMixed("a mixed state needs at least two positive eigenvalues")
        last = float(entr(weights[-1]))
        if last > self.tau:
            raise InfiniteEntropy(
                f"entropy partial sums have not settled: last term contributes {last:.3e} > τ={self.tau:.1e}"
            )
        residual_entropy = self.residual_entropy(residual, float(weights[-1]))
        if residual_entropy > self.tau:
            raise InfiniteEntropy(
                f"residual entropy estimate {residual_entropy:.3e} exceeds tail tolerance τ={self.tau:.1e}"
            )
        self._p = weights
        self._residual = residual
        self._residual_entropy = residual_entropy
        eta_terms = entr(weights)
        self._d = np.concatenate([np.cumsum(weights[::-1])[::-1], [0.0]]) + residual
        self._s = np.concatenate([np.cumsum(eta_terms[::-1])[::-1], [0.0]]) + residual_entropy
        self._entropy = float(self._s[0])

    @staticmethod
    def residual_entropy(residual: float, last: float) -> float:
        """빠진 질량 r 을 p_last 에서 이어지는 기하 꼬리로 채웠을 때의 엔트로피

        빠진 고유값은 모두 p_last 이하이므로 r·ln(1/p_last) 가 하한, 여기에 기하 꼬리 보정을 더함.
        """
        if residual <= 0.0:
            return 0.0
        # q_j = p_last ρ^j, Σ q_j = r  →  ρ = r / (p_last + r)
        spread = residual * (1.0 + residual / last) * math.log1p(last / residual)
        return residual * -math.log(last) + spread

    @property
    def rank(self) -> None:
        return None

    @property
    def known_prefix(self) -> int:
        return int(self._p.size)

    @property
    def entropy(self) -> float:
        return self._entropy

    def eigenvalues(self, upto: int) -> np.ndarray:
        if upto > self.known_prefix:
            raise IndexBeyondRank(f"only {self.known_prefix} leading eigenvalues are known")
        return self._p[:max(0, upto)].copy()

    def tail_arrays(self, upto: int):
        if upto > self.known_prefix:
            raise IndexBeyondRank(f"only {self.known_prefix} leading eigenvalues are known")
        return self._p[:upto].copy(), self._d[1:upto + 1].copy(), self._s[1:upto + 1].copy()

    def power_tail(self, t: float, k: int) -> float:
        if t < 1:
            return math.inf
        listed = float(np.power(self._p[k:], t).sum()) if k < self.known_prefix else 0.0
        return listed + self._residual * float(self._p[-1]) ** (t - 1)

    def has_all_power_sums(self) -> None:
        return None


class UniformDescriptor(BaseModel):
    type: Literal["uniform"]
    n: int


class LinearDescriptor(BaseModel):
    type: Literal["linear"]
    n: int


class GeometricDescriptor(BaseModel):
    type: Literal["geometric"]
    E0: Optional[float] = None
    q: Optional[float] = None

    @model_validator(mode="after")
    def exactly_one(self):
        if (self.E0 is None) == (self.q is None):
            raise ValueError("geometric spectrum takes exactly one of E0, q")
        return self


class ExplicitDescriptor(BaseModel):
    type: Literal["explicit"]
    p: List[float]


class TruncatedDescriptor(BaseModel):
    type: Literal["truncated"]
    p: List[float]
    tau: Optional[float] = None


SpectrumDescriptor = Annotated[
    Union[UniformDescriptor, LinearDescriptor, GeometricDescriptor, ExplicitDescriptor, TruncatedDescriptor],
    Field(discriminator="type"),
]

_descriptor_adapter = TypeAdapter(SpectrumDescriptor)


def make_spectrum(descriptor) -> Spectrum:
    """디스크립터(dict 또는 모델)로부터 Spectrum 생성"""
    if isinstance(descriptor, dict):
        try:
            descriptor = _descriptor_adapter.validate_python(descriptor)
        except ValidationError as e:
            raise BadConfig(f"invalid spectrum descriptor: {e}")

    if isinstance(descriptor, UniformDescriptor):
        spectrum = UniformSpectrum(descriptor.n)
    elif isinstance(descriptor, LinearDescriptor):
        spectrum = LinearSpectrum(descriptor.n)
    elif isinstance(descriptor, GeometricDescriptor):
        if descriptor.E0 is not None:
            spectrum = GeometricSpectrum.from_energy(descriptor.E0)
        else:
            spectrum = GeometricSpectrum(descriptor.q)
    elif isinstance(descriptor, ExplicitDescriptor):
        spectrum = ExplicitSpectrum(descriptor.p)
    elif isinstance(descriptor, TruncatedDescriptor):
        spectrum = TruncatedSpectrum(descriptor.p, descriptor.tau)
    else:
        raise BadConfig(f"unsupported spectrum descriptor: {descriptor!r}")

    if not math.isfinite(spectrum.entropy):
        raise InfiniteEntropy(f"{spectrum.model} spectrum has infinite entropy")
    logger.debug(f"built {spectrum.model} spectrum, rank={spectrum.rank}, S={spectrum.entropy:.12g}")
    return spectrum


def parse_spectrum_source(source: str) -> Spectrum:
    """'uniform:10', 'linear:10', 'geometric:1', 'explicit:0.5,0.3,0.2' 또는 JSON 파일 경로"""
    path = Path(source)
    if path.suffix == ".json" or path.is_file():
        try:
            descriptor = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise BadConfig(f"cannot read spectrum file {source}: {e}")
        return make_spectrum(descriptor)

    kind, _, arg = source.partition(":")
    kind = kind.strip().lower()
    try:
        if kind in ("uniform", "linear"):
            return make_spectrum({"type": kind, "n": int(arg)})
        if kind == "geometric":
            return make_spectrum({"type": kind, "E0": float(arg)})
        if kind in ("explicit", "truncated"):
            return make_spectrum({"type": kind, "p": [float(x) for x in arg.split(",") if x.strip()]})
    except ValueError as e:
        raise BadConfig(f"cannot parse spectrum '{source}': {e}")
    raise BadConfig(f"unknown spectrum '{source}'; expected uniform:N, linear:N, geometric:E0, explicit:p1,p2,... or a JSON file")
