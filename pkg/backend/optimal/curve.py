import logging
import math
from concurrent.futures import Executor
from functools import partial
from typing import Iterable, List, Literal, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from backend.core.exception_handler import OutOfRange
from backend.optimal.hamiltonian import Case, optimal_hamiltonian
from backend.spectra.spectrum import Spectrum, oscillator_entropy

logger = logging.getLogger(__name__)

Units = Literal["nats", "bits"]


class CurveRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    E: float
    theta: float
    m: int
    case: Case
    S_opt: float
    S_ref: Optional[float] = None


def _row(spec: Spectrum, E0: float, E: float, reference: bool) -> CurveRow:
    H = optimal_hamiltonian(spec, E0, E)
    return CurveRow(
        E=E,
        theta=H.theta,
        m=H.m,
        case=H.case,
        S_opt=H.entropy,
        S_ref=oscillator_entropy(E) if reference else None,
    )


def energy_grid(E_min: float, E_max: float, steps: int, log_spaced: bool = False) -> List[float]:
    """양 끝을 포함하는 에너지 격자"""
    if not (0 < E_min <= E_max) or steps < 1:
        raise OutOfRange(f"invalid energy grid [{E_min}, {E_max}] with {steps} steps")
    if steps == 1:
        return [float(E_min)]
    grid = np.geomspace(E_min, E_max, steps) if log_spaced else np.linspace(E_min, E_max, steps)
    return grid.tolist()


def entropy_curve(spec: Spectrum, E0: float, grid: Iterable[float], reference: bool = False,
                  pool: Optional[Executor] = None) -> List[CurveRow]:
    """E ↦ min_H S(γ_H(E)); reference=True 이면 진동자 기준 곡선 g(E)를 함께 계산

    pool 은 Thread/ProcessPoolExecutor 모두 가능 (_row 는 모듈 수준 함수)
    """
    energies = [float(E) for E in grid]
    if pool is None:
        rows = [_row(spec, E0, E, reference) for E in energies]
    else:
        rows = list(pool.map(partial(_row, spec, E0, reference=reference), energies))
    logger.info(f"entropy curve: {len(rows)} points for {spec.model} spectrum, E0={E0:.6g}")
    return rows


def curve_frame(rows: List[CurveRow], units: Units = "nats") -> pd.DataFrame:
    """CurveRow 목록을 표로 변환 (bits 선택 시 엔트로피 열을 ln 2로 나눔)"""
    frame = pd.DataFrame([row.model_dump(mode="json") for row in rows],
                         columns=["E", "theta", "m", "case", "S_opt", "S_ref"])
    if frame["S_ref"].isna().all():
        frame = frame.drop(columns=["S_ref"])
    if units == "bits":
        for column in ("S_opt", "S_ref"):
            if column in frame:
                frame[column] = frame[column] / math.log(2)
    return frame
