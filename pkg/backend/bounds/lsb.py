import json
import logging
import math
from functools import lru_cache
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from backend.config import settings
from backend.core.exception_handler import BadConfig, OutOfRange
from backend.optimal.hamiltonian import Case, optimal_hamiltonian
from backend.spectra.spectrum import Spectrum, eta

logger = logging.getLogger(__name__)


class CharacteristicPreset(BaseModel):
    """f(ρ)−f(σ) ≤ C·ε·F_H(E/ε) + D·h↑(ε) 형태의 특성량 상수"""

    model_config = ConfigDict(frozen=True)

    key: str
    name: str
    n_parties: int = Field(ge=1)
    C: float = Field(gt=0)
    D: float = Field(gt=0)
    metric_note: str


class GibbsConditionReport(BaseModel):
    satisfied: Optional[bool]
    reason: str


class LsbResult(BaseModel):
    preset: str
    eps: float
    C: float
    D: float
    main_term: float
    envelope: float
    value: float
    case: Case
    m: int
    gibbs_condition: GibbsConditionReport


@lru_cache(maxsize=4)
def _read_presets(path: str) -> tuple:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        return tuple(CharacteristicPreset(**entry) for entry in raw)
    except (OSError, json.JSONDecodeError, TypeError) as e:
        raise BadConfig(f"cannot read preset catalog {path}: {e}")
    except ValidationError as e:
        raise BadConfig(f"invalid preset catalog {path}: {e}")


def load_presets(path: Optional[Path] = None) -> List[CharacteristicPreset]:
    return list(_read_presets(str(path or settings.PRESET_FILE)))


def find_preset(name: str, path: Optional[Path] = None) -> CharacteristicPreset:
    """키 또는 이름(대소문자 무시)으로 프리셋 검색"""
    wanted = name.strip().lower()
    for preset in load_presets(path):
        if wanted in (preset.key.lower(), preset.name.lower()):
            return preset
    known = ", ".join(p.key for p in load_presets(path))
    raise BadConfig(f"unknown characteristic '{name}'; known presets: {known}")


def binary_entropy_envelope(eps: float) -> float:
    """h↑(ε): ε ≤ 1/2 에서 이진 엔트로피, 그 위에서는 ln 2"""
    if not 0.0 <= eps <= 1.0:
        raise OutOfRange(f"ε must lie in [0, 1], got {eps}")
    if eps > 0.5:
        return math.log(2)
    return eta(eps) + eta(1.0 - eps)


def _check_eps(eps: float) -> None:
    if not 0.0 < eps <= 1.0:
        raise OutOfRange(f"ε must lie in (0, 1], got {eps}")


def lsb_main_term(spec: Spectrum, eps: float) -> float:
    """F_{H(ρ,1,1/ε)}(1/ε): 최적 해밀토니안으로 얻는 주항"""
    _check_eps(eps)
    return optimal_hamiltonian(spec, 1.0, 1.0 / eps).entropy


def gibbs_condition_report(spec: Spectrum) -> GibbsConditionReport:
    """최적 해밀토니안이 모든 β > 0 에서 Tr e^{−βH} < ∞ 인지 판정"""
    if spec.rank is not None:
        return GibbsConditionReport(satisfied=True, reason="finite rank")
    verdict = spec.has_all_power_sums()
    if verdict is None:
        return GibbsConditionReport(
            satisfied=None,
            reason="Tr ρ^β for small β cannot be decided from a truncated spectrum",
        )
    return GibbsConditionReport(
        satisfied=verdict,
        reason="Tr ρ^β < ∞ for all β > 0" if verdict else "Tr ρ^β diverges for some β > 0",
    )


def lsb_bound(spec: Spectrum, eps: float, preset: CharacteristicPreset) -> LsbResult:
    _check_eps(eps)
    H = optimal_hamiltonian(spec, 1.0, 1.0 / eps)
    main = H.entropy
    envelope = binary_entropy_envelope(eps)
    value = preset.C * eps * main + preset.D * envelope
    logger.debug(f"lsb[{preset.key}] eps={eps:.3g}: main={main:.12g}, envelope={envelope:.12g}")
    return LsbResult(
        preset=preset.key,
        eps=eps,
        C=preset.C,
        D=preset.D,
        main_term=main,
        envelope=envelope,
        value=value,
        case=H.case,
        m=H.m,
        gibbs_condition=gibbs_condition_report(spec),
    )
