import logging
import math
from concurrent.futures import Executor
from functools import partial
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from backend.config import settings
from backend.core.exception_handler import (
    BadConfig,
    NoConvergenceCertificate,
    OutOfRange,
    SamplingExhausted,
)
from backend.gibbs.solver import FiniteHamiltonian, Hamiltonian, SequenceHamiltonian, max_entropy
from backend.optimal.hamiltonian import optimal_hamiltonian
from backend.spectra.spectrum import GeometricSpectrum, LinearSpectrum, Spectrum, UniformSpectrum

logger = logging.getLogger(__name__)

Seed = Union[int, np.random.Generator, None]
Branch = Union[int, str]


class FeasiblePoint(BaseModel):
    """Ω 의 점: x₁ ∈ [0, c], x 비감소, Σ a_i x_i = 1"""

    model_config = ConfigDict(frozen=True)

    x: List[float]
    a: List[float]
    c: float

    def constraint_gap(self) -> float:
        return abs(float(np.dot(self.a, self.x)) - 1.0)

    def is_feasible(self, tol: float = 1e-12) -> bool:
        x = np.asarray(self.x)
        return (
            -tol <= x[0] <= self.c + tol
            and bool(np.all(np.diff(x) >= -tol))
            and self.constraint_gap() <= tol
        )


class Check(BaseModel):
    name: str
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.tolerance)


class LemmaReport(BaseModel):
    claim: str
    trials: int
    worst_violation: float
    tolerance: float
    checks: List[Check] = Field(default_factory=list)
    details: Dict[str, Any] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.worst_violation <= self.tolerance and all(check.passed for check in self.checks)

    def summary(self) -> dict:
        return {
            "claim": self.claim,
            "trials": self.trials,
            "worst_violation": self.worst_violation,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "checks": [{**c.model_dump(), "pass": c.passed} for c in self.checks],
            "details": self.details,
        }


def _rng(seed: Seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(settings.ORACLE_SEED if seed is None else seed)


def _weights(a) -> np.ndarray:
    """a: 양수, 비증가, 합 ≤ 1 인 유한 튜플 (n ≥ 2)"""
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or a.size < 2:
        raise BadConfig("weight tuple needs at least two entries")
    if np.any(~np.isfinite(a)) or np.any(a <= 0):
        raise BadConfig("weights must be positive numbers")
    if np.any(np.diff(a) > 0):
        raise BadConfig("weights must be nonincreasing")
    if a.sum() > 1.0 + settings.NORMALIZATION_TOL:
        raise BadConfig(f"weights sum to {a.sum():.15g} > 1")
    return a


def _tails(a: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """d[k] = Σ_{i>k} a_i, s[k] = Σ_{i>k} η(a_i), k = 0..n"""
    eta = -a * np.log(a)
    d = np.concatenate([np.cumsum(a[::-1])[::-1], [0.0]])
    s = np.concatenate([np.cumsum(eta[::-1])[::-1], [0.0]])
    return d, s


def thresholds(a, c: float = 0.0) -> np.ndarray:
    """b_0, b_1, ..., b_n (b_n = 0)"""
    a = _weights(a)
    if c < 0:
        raise OutOfRange(f"c must be nonnegative, got {c}")
    n = a.size
    d, s = _tails(a)
    b = np.empty(n + 1)
    b[1:] = s[:n] + d[:n] * np.log(a)
    b[n] = 0.0
    b[0] = (s[0] + d[0] * math.log(a[0])) / (1.0 - c * d[0]) if c * d[0] < 1.0 else math.inf
    return b


def _branch(b_thr: np.ndarray, b: float, c: float) -> Branch:
    n = b_thr.size - 1
    if c > 0 and math.isfinite(b_thr[0]) and b >= b_thr[0]:
        return "c"
    k = int(np.count_nonzero(b_thr[:n] > b)) - 1
    return max(k, 1) if c == 0 else max(k, 0)


def _branch_z(a: np.ndarray, d: np.ndarray, s: np.ndarray, b: float, c: float, branch: Branch) -> float:
    if branch == "c":
        return math.exp(-b * c) * (1.0 + d[1] * math.exp((s[1] - b * (1.0 - c * d[0])) / d[1]))
    k = branch
    return k + d[k] * math.exp((s[k] - b) / d[k])


def _branch_x(a: np.ndarray, d: np.ndarray, s: np.ndarray, b: float, c: float, branch: Branch) -> np.ndarray:
    x = np.zeros(a.size)
    if branch == "c":
        x[0] = c
        x[1:] = ((b * (1.0 - a[0] * c) - s[1]) / d[1] - np.log(a[1:])) / b
        return x
    k = branch
    x[k:] = ((b - s[k]) / d[k] - np.log(a[k:])) / b
    return x


def _check_b(b: float) -> None:
    if not b > 0:
        raise OutOfRange(f"b must be positive, got {b}")


def z_closed_form(a, b: float, c: float = 0.0) -> float:
    """inf_Ω Σ e^{−b x_i} 의 닫힌 형태 z_c(b)"""
    _check_b(b)
    a = _weights(a)
    d, s = _tails(a)
    return _branch_z(a, d, s, b, c, _branch(thresholds(a, c), b, c))


def minimizer_x(a, b: float, c: float = 0.0) -> FeasiblePoint:
    _check_b(b)
    a = _weights(a)
    d, s = _tails(a)
    x = _branch_x(a, d, s, b, c, _branch(thresholds(a, c), b, c))
    return FeasiblePoint(x=x.tolist(), a=a.tolist(), c=c)


def objective(x, b: float) -> float:
    return float(np.exp(-b * np.asarray(x, dtype=float)).sum())


def _draw(a: np.ndarray, d0: float, c: float, rng: np.random.Generator, attempts: int = 1000) -> np.ndarray:
    n = a.size
    x1_max = min(c, 1.0 / d0)
    for _ in range(attempts):
        x1 = rng.uniform(0.0, x1_max) if x1_max > 0 else 0.0
        steps = rng.exponential(1.0, n - 1) * (rng.random(n - 1) > 0.3)
        x = x1 + np.concatenate([[0.0], np.cumsum(steps)])
        spread = float(np.dot(a, x - x1))
        room = 1.0 - x1 * d0
        if spread <= 0 or room <= 0:
            continue
        # total mass below 1 first, then stretch the part above a random pivot
        x = x1 + (x - x1) * rng.uniform(0.0, 1.0) * room / spread
        j = int(rng.integers(1, n))
        anchor = x[j - 1]
        base = float(np.dot(a[:j], x[:j]) + anchor * a[j:].sum())
        excess = float(np.dot(a[j:], x[j:] - anchor))
        if excess <= 0:
            continue
        x[j:] = anchor + (1.0 - base) / excess * (x[j:] - anchor)
        return x
    raise SamplingExhausted(f"no feasible point after {attempts} attempts (n={n}, c={c})")


def sample_feasible(a, c: float = 0.0, seed: Seed = None) -> FeasiblePoint:
    """Ω 의 무작위 점 (고정 seed 면 결정적)"""
    a = _weights(a)
    if c < 0:
        raise OutOfRange(f"c must be nonnegative, got {c}")
    x = _draw(a, float(a.sum()), c, _rng(seed))
    return FeasiblePoint(x=x.tolist(), a=a.tolist(), c=c)


def verify_lemma_ml(a, b: float, c: float = 0.0, trials: Optional[int] = None, seed: Seed = None,
                    tol: float = 1e-12) -> LemmaReport:
    """Ω 위에서 z_c(b) ≤ Σ e^{−b x_i}, 닫힌 형태 최소점에서 등호"""
    _check_b(b)
    a = _weights(a)
    trials = trials or settings.ORACLE_TRIALS
    rng = _rng(seed)
    z = z_closed_form(a, b, c)
    xbar = minimizer_x(a, b, c)
    scale = max(1.0, z)

    worst = -math.inf
    for _ in range(trials):
        x = _draw(a, float(a.sum()), c, rng)
        worst = max(worst, (z - objective(x, b)) / scale)

    # small moves along the constraint plane that stay in Ω
    x0 = np.asarray(xbar.x)
    free = x0 > 0
    local_worst, moves = -math.inf, 0
    for _ in range(min(trials, 200)):
        v = np.where(free, rng.normal(size=a.size), 0.0)
        v[free] -= np.dot(a[free], v[free]) / np.dot(a[free], a[free]) * a[free]
        moved = x0 + 1e-3 * v / np.abs(v).max()
        if not (0.0 <= moved[0] <= c and np.all(np.diff(moved) >= 0)):
            continue
        moves += 1
        local_worst = max(local_worst, (z - objective(moved, b)) / scale)

    report = LemmaReport(
        claim="lemma-ml",
        trials=trials,
        worst_violation=max(worst, 0.0),
        tolerance=tol,
        checks=[
            Check(name="objective at minimizer equals closed form",
                  value=abs(objective(xbar.x, b) - z) / scale, tolerance=tol),
            Check(name="minimizer constraint gap", value=xbar.constraint_gap(), tolerance=tol),
            Check(name="minimizer monotone with x1 in [0,c]",
                  value=0.0 if xbar.is_feasible(1e-9) else 1.0, tolerance=0.0),
            Check(name="local moves do not decrease the objective",
                  value=max(local_worst, 0.0), tolerance=tol),
        ],
        details={"z": z, "branch": str(_branch(thresholds(a, c), b, c)), "local_moves": moves},
    )
    logger.info(f"lemma-ml: b={b:.6g}, c={c:.6g}, trials={trials}, worst={report.worst_violation:.3e}")
    return report


def kernel_dimension(a, theta: float) -> int:
    """m = 1 if θ < 1/d_0, else max{k : d_k + k a_k ≥ 1/θ}"""
    a = _weights(a)
    d, _ = _tails(a)
    if theta < 1.0 / d[0]:
        return 1
    k = np.arange(1, a.size)
    c_k = d[1:a.size] + k * a[:-1]
    hits = np.nonzero(c_k >= (1.0 / theta) * (1.0 - settings.EQUALITY_RTOL))[0]
    return int(k[hits[-1]]) if hits.size else 1


def _z0(a: np.ndarray, d: np.ndarray, s: np.ndarray, b_thr: np.ndarray, b: float) -> float:
    if b == 0:
        return float(a.size)
    return _branch_z(a, d, s, b, 0.0, _branch(b_thr, b, 0.0))


def verify_lemma_ml2(a, theta: float, grid_points: Optional[int] = None, tol: float = 1e-6) -> LemmaReport:
    """f(b) = θb + ln z_0(b) 격자 탐색으로 닫힌 형태 b* 확인"""
    if not theta > 0:
        raise OutOfRange(f"θ must be positive, got {theta}")
    a = _weights(a)
    n = a.size
    d, s = _tails(a)
    b_thr = thresholds(a, 0.0)
    points = grid_points or settings.ORACLE_GRID_POINTS

    def f(b: float) -> float:
        return theta * b + math.log(_z0(a, d, s, b_thr, b))

    case_a = a[-1] * n >= (1.0 / theta) * (1.0 - settings.EQUALITY_RTOL)
    m = kernel_dimension(a, theta)
    if case_a:
        b_star, f_star = 0.0, math.log(n)
    else:
        b_star = s[m] + d[m] * math.log((1.0 - theta * d[m]) / (theta * m))
        f_star = b_star * theta + math.log(m / (1.0 - d[m] * theta))

    grid = np.linspace(0.0, 4.0 * b_star + 10.0, points)
    values = np.array([f(b) for b in grid])
    i = int(np.argmin(values))
    # second pass around the coarse minimum, still closed-form free
    step = grid[1] - grid[0]
    fine = np.linspace(max(0.0, grid[i] - step), grid[i] + step, 2001)
    fine_values = np.array([f(b) for b in fine])
    grid_min = float(min(values.min(), fine_values.min()))
    grid_argmin = float(fine[int(np.argmin(fine_values))]) if fine_values.min() <= values.min() else float(grid[i])

    h = 1e-7 * a[-1]
    slope = (f(h) - f(0.0)) / h
    expected_slope = theta - 1.0 / (a[-1] * n)
    checks = [
        Check(name="grid minimum matches f(b*)", value=abs(grid_min - f_star), tolerance=tol),
        Check(name="closed-form f(b*) equals f evaluated at b*", value=abs(f(b_star) - f_star) if b_star > 0 else 0.0,
              tolerance=1e-10 * max(1.0, abs(f_star))),
        Check(name="right derivative at 0",
              value=abs(slope - expected_slope) / max(1.0, abs(expected_slope)), tolerance=1e-4),
    ]
    details: Dict[str, Any] = {
        "case": "A" if case_a else "B",
        "m": m,
        "b_star": b_star,
        "f_star": f_star,
        "grid_min": grid_min,
        "grid_argmin": grid_argmin,
    }

    if case_a:
        checks.append(Check(name="f(0) = ln n", value=abs(f(0.0) - math.log(n)), tolerance=1e-12))
    else:
        x_star = _branch_x(a, d, s, b_star, 0.0, m)
        boltzmann = np.exp(-b_star * x_star)
        residual = abs(float(np.dot(x_star, boltzmann)) - theta * float(boltzmann.sum()))
        checks.append(Check(name="stationarity residual", value=residual, tolerance=1e-10))

        # the two ways of writing x* above the kernel
        tail = np.arange(n) >= m
        for label, numerator in (("(1-theta d_m)", 1.0 - theta * d[m]), ("(1-d_m)", 1.0 - d[m])):
            x = np.where(tail, np.log(numerator / (a * theta * m)) / b_star, 0.0)
            details[f"x_star_constraint_gap {label}"] = abs(float(np.dot(a, x)) - 1.0)
        rest = 1.0 - theta * d[m]
        for label, weight in (("(1-theta d_m) ln m", rest), ("(1-d_m) ln m", 1.0 - d[m])):
            value = theta * s[m] + (-rest * math.log(rest)) + weight * math.log(m) + d[m] * (-theta * math.log(theta))
            details[f"f_star_gap {label}"] = abs(value - grid_min)

    worst = max(0.0, f_star - grid_min)
    report = LemmaReport(claim="lemma-ml2", trials=points, worst_violation=worst, tolerance=tol,
                         checks=checks, details=details)
    logger.info(f"lemma-ml2: θ={theta:.6g}, case={details['case']}, m={m}, worst={worst:.3e}")
    return report


def _finite_competitor(p: np.ndarray, E0: float, rng: np.random.Generator) -> FiniteHamiltonian:
    levels = E0 * _draw(p, 1.0, 0.0, rng)
    if rng.random() < 0.3:
        # levels outside the support of ρ
        extra = np.sort(rng.uniform(0.0, 2.0 * levels.max(), int(rng.integers(1, 4))))
        levels = np.concatenate([levels, extra])
    return FiniteHamiltonian(levels)


def _moment(spec: Spectrum, k: int, gamma: float) -> float:
    """Σ_i p_i max(0, i−k)^γ (항이 무시할 만해질 때까지 합산)"""
    total, start, chunk = 0.0, 1, settings.SERIES_CHUNK
    while start <= settings.SERIES_MAX_TERMS:
        i = np.arange(start, start + chunk)
        terms = np.exp(spec.log_eigenvalues(i)) * np.maximum(0, i - k) ** gamma
        total += float(terms.sum())
        if terms[-1] * i[-1] < 1e-18 * max(total, 1e-300):
            return total
        start += chunk
    raise NoConvergenceCertificate("competitor energy series did not settle")


class PowerLevels:
    """h_i = α·max(0, i−k)^γ"""

    def __init__(self, alpha: float, k: int, gamma: float):
        self.alpha = alpha
        self.k = k
        self.gamma = gamma

    def __call__(self, i: np.ndarray) -> np.ndarray:
        return self.alpha * np.maximum(0, np.asarray(i) - self.k) ** self.gamma


def _sequence_competitor(spec: Spectrum, E0: float, rng: np.random.Generator) -> SequenceHamiltonian:
    k = int(rng.integers(1, 6))
    gamma = float(rng.uniform(1.0, 2.0))
    alpha = E0 / _moment(spec, k, gamma)
    return SequenceHamiltonian(PowerLevels(alpha, k, gamma), min_gap=alpha, gap_from=k)


def _excess(candidate: Hamiltonian, E: float, S_opt: float) -> float:
    return max_entropy(candidate, E) - S_opt


def verify_optimality(spec: Spectrum, E0: float, E: float, trials: Optional[int] = None, seed: Seed = None,
                      tol: Optional[float] = None, pool: Optional[Executor] = None) -> LemmaReport:
    """Σ p_i h'_i = E0 인 무작위 접지 경쟁자에 대해 F_{H'}(E) ≥ S_opt"""
    trials = trials or settings.ORACLE_TRIALS
    tol = settings.ORACLE_TOL if tol is None else tol
    rng = _rng(seed)
    H = optimal_hamiltonian(spec, E0, E)
    S_opt = H.entropy

    if spec.rank is not None:
        p = spec.eigenvalues(spec.rank)
        competitors: List[Hamiltonian] = [_finite_competitor(p, E0, rng) for _ in range(trials)]
    elif spec.has_all_power_sums():
        competitors = [_sequence_competitor(spec, E0, rng) for _ in range(trials)]
    else:
        raise NoConvergenceCertificate(f"competitor energies need the full {spec.model} spectrum")

    excess = partial(_excess, E=E, S_opt=S_opt)
    gaps = list(pool.map(excess, competitors)) if pool is not None else [excess(h) for h in competitors]
    scale = max(1.0, abs(S_opt))
    worst = max(0.0, -min(gaps) / scale)

    self_gap = abs(max_entropy(H.as_hamiltonian(), E) - S_opt) / scale
    report = LemmaReport(
        claim="optimality",
        trials=trials,
        worst_violation=worst,
        tolerance=tol,
        checks=[Check(name="optimal levels reproduce S_opt", value=self_gap, tolerance=max(tol, 1e-8))],
        details={"S_opt": S_opt, "case": H.case.value, "m": H.m, "min_excess": float(min(gaps))},
    )
    logger.info(f"optimality: {spec.model} E0={E0:.6g} E={E:.6g}, trials={trials}, worst={worst:.3e}")
    return report


def _tie_blocks(a: np.ndarray) -> List[Tuple[int, int]]:
    blocks, start = [], 0
    for i in range(1, a.size + 1):
        if i == a.size or not math.isclose(a[i], a[start], rel_tol=settings.EQUALITY_RTOL):
            if i - start > 1:
                blocks.append((start, i))
            start = i
    return blocks


def verify_symmetrization(a, b: float, trials: Optional[int] = None, seed: Seed = None,
                          tol: float = 1e-12) -> LemmaReport:
    """같은 a_i 블록에서 x 를 평균내도 Σ a_i x_i 유지, Σ e^{−b x_i} 는 증가하지 않음"""
    _check_b(b)
    a = _weights(a)
    blocks = _tie_blocks(a)
    if not blocks:
        raise BadConfig("symmetrization needs at least two equal weights")
    trials = trials or settings.ORACLE_TRIALS
    rng = _rng(seed)

    worst, worst_gap = 0.0, 0.0
    for _ in range(trials):
        x = rng.exponential(1.0, a.size)
        x /= np.dot(a, x)
        lo, hi = blocks[int(rng.integers(len(blocks)))]
        y = x.copy()
        y[lo:hi] = x[lo:hi].mean()
        worst = max(worst, objective(y, b) - objective(x, b))
        worst_gap = max(worst_gap, abs(float(np.dot(a, y)) - 1.0))

    return LemmaReport(
        claim="symmetrization",
        trials=trials,
        worst_violation=worst,
        tolerance=tol,
        checks=[Check(name="constraint preserved", value=worst_gap, tolerance=tol)],
        details={"blocks": blocks},
    )


def verify_partial_agreement(a, b: float, k: int, trials: Optional[int] = None, seed: Seed = None,
                             tol: float = 1e-12) -> LemmaReport:
    """k 이후 e^{−b x_i} = λ a_i 인 x̄ 가 앞 k 좌표가 같은 모든 ȳ 보다 작거나 같음"""
    _check_b(b)
    a = _weights(a)
    n = a.size
    if not 0 <= k < n:
        raise OutOfRange(f"k must lie in 0..{n - 1}, got {k}")
    d, s = _tails(a)
    b_next = s[k] + d[k] * math.log(a[k])
    if b <= b_next:
        raise OutOfRange(f"b={b:.6g} must exceed b_{k + 1}={b_next:.6g}")
    trials = trials or settings.ORACLE_TRIALS
    rng = _rng(seed)

    worst = 0.0
    for _ in range(trials):
        head_mass = rng.uniform(0.0, 1.0 - b_next / b)
        x = np.zeros(n)
        if k:
            w = rng.exponential(1.0, k)
            x[:k] = w * head_mass / np.dot(a[:k], w)
        else:
            head_mass = 0.0
        log_lambda = (s[k] - b * (1.0 - head_mass)) / d[k]
        x[k:] = -(log_lambda + np.log(a[k:])) / b

        y = x.copy()
        w = rng.exponential(1.0, n - k)
        y[k:] = w * (1.0 - head_mass) / np.dot(a[k:], w)
        worst = max(worst, objective(x, b) - objective(y, b))

    return LemmaReport(claim="partial-agreement", trials=trials, worst_violation=worst, tolerance=tol,
                       details={"k": k})


def verify_continuity(a, c: float = 0.0, tol: float = 1e-8) -> LemmaReport:
    """양수 접합점마다 x̄_b, z_c(b) 의 좌우 값 비교"""
    a = _weights(a)
    d, s = _tails(a)
    b_thr = thresholds(a, c)
    n = a.size
    pairs: List[Tuple[float, Branch, Branch]] = []
    first = 2 if c == 0 else 1
    for k in range(first, n):
        if b_thr[k] > 0:
            pairs.append((float(b_thr[k]), k - 1, k))
    if c > 0 and math.isfinite(b_thr[0]) and b_thr[0] > 0:
        pairs.append((float(b_thr[0]), "c", 0))

    worst, worst_z = 0.0, 0.0
    for b, left, right in pairs:
        gap = np.abs(_branch_x(a, d, s, b, c, left) - _branch_x(a, d, s, b, c, right)).max()
        worst = max(worst, float(gap))
        worst_z = max(worst_z, abs(_branch_z(a, d, s, b, c, left) - _branch_z(a, d, s, b, c, right)))

    return LemmaReport(
        claim="continuity",
        trials=len(pairs),
        worst_violation=worst,
        tolerance=tol,
        checks=[Check(name="z continuous at gluing points", value=worst_z, tolerance=tol)],
        details={"gluing_points": [p[0] for p in pairs]},
    )


def verify_threshold_recursion(a, tol: float = 1e-12) -> LemmaReport:
    """k ≥ 2 에서 b_k = b_{k−1} − d_{k−1} ln(a_{k−1}/a_k)"""
    a = _weights(a)
    d, _ = _tails(a)
    b_thr = thresholds(a, 0.0)
    n = a.size
    worst = 0.0
    for k in range(2, n + 1):
        predicted = b_thr[k - 1] - d[k - 1] * math.log(a[k - 2] / a[k - 1])
        worst = max(worst, abs(predicted - b_thr[k]) / max(1.0, abs(b_thr[k])))
    return LemmaReport(claim="threshold-recursion", trials=n - 1, worst_violation=worst, tolerance=tol)


def verify_all(seed: Seed = None, trials: Optional[int] = None) -> List[LemmaReport]:
    """기본 입력에 대한 전체 검증 묶음"""
    trials = trials or settings.ORACLE_TRIALS
    seed = settings.ORACLE_SEED if seed is None else seed
    rng = _rng(seed)

    linear4 = LinearSpectrum(4).eigenvalues(4)
    linear10 = LinearSpectrum(10).eigenvalues(10)
    uniform10 = UniformSpectrum(10).eigenvalues(10)
    geometric = GeometricSpectrum(0.5).eigenvalues(60)
    ties = np.array([0.3, 0.2, 0.2, 0.2, 0.1])

    reports = [
        verify_lemma_ml(linear4, 1.0, 0.0, trials, rng),
        verify_lemma_ml(linear10, 0.3, 0.0, trials, rng),
        verify_lemma_ml(ties, 2.0, 1.5, trials, rng),
        verify_lemma_ml2(uniform10, 2.0),
        verify_lemma_ml2(geometric, 1.0),
        verify_lemma_ml2(linear10, 0.5),
        verify_symmetrization(ties, 1.0, trials, rng),
        verify_partial_agreement(linear10, 2.0, 3, trials, rng),
        verify_continuity(linear10, 0.0),
        verify_continuity(linear4, 0.8),
        verify_threshold_recursion(linear10),
        verify_threshold_recursion(ties),
        verify_optimality(LinearSpectrum(10), 1.0, 2.0, min(trials, 1000), rng),
        verify_optimality(UniformSpectrum(10), 1.0, 0.5, min(trials, 1000), rng),
    ]
    failed = [r.claim for r in reports if not r.passed]
    if failed:
        logger.warning(f"oracle failures: {failed}")
    return reports
