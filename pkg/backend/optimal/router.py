import logging

from fastapi import APIRouter
from pydantic import BaseModel, Field

from backend.config import settings
from backend.core.exception_handler import HamiltonianError
from backend.optimal.curve import energy_grid, entropy_curve
from backend.optimal.hamiltonian import optimal_hamiltonian
from backend.spectra.spectrum import SpectrumDescriptor, make_spectrum

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/optimal", tags=["optimal"])


class HamiltonianRequest(BaseModel):
    spectrum: SpectrumDescriptor
    E0: float = Field(1.0, gt=0)
    E: float = Field(..., gt=0)
    levels: int = Field(settings.LEVELS_PREVIEW, ge=1, le=10_000)


class CurveRequest(BaseModel):
    spectrum: SpectrumDescriptor
    E0: float = Field(1.0, gt=0)
    E_min: float = Field(..., gt=0)
    E_max: float = Field(..., gt=0)
    points: int = Field(100, ge=2, le=5000)
    log_spaced: bool = False
    reference: bool = False


@router.post("/hamiltonian")
async def build_hamiltonian(request: HamiltonianRequest):
    """최적 해밀토니안 H(ρ,E0,E) 계산"""
    spec = make_spectrum(request.spectrum)
    H = optimal_hamiltonian(spec, request.E0, request.E)
    return {
        "success": True,
        "message": "최적 해밀토니안 계산 완료",
        "data": {
            **H.model_dump(mode="json"),
            "levels": [float(h) for h in H.levels(request.levels)],
            "entropy": H.entropy,
            "gibbs_beta": H.gibbs_beta,
            "satisfies_gibbs_condition": H.satisfies_gibbs_condition
        }
    }


@router.post("/curve")
async def minimal_entropy_curve(request: CurveRequest):
    """에너지 격자 위의 최소 엔트로피 곡선"""
    try:
        spec = make_spectrum(request.spectrum)
        grid = energy_grid(request.E_min, request.E_max, request.points, request.log_spaced)
        rows = entropy_curve(spec, request.E0, grid, reference=request.reference)
        return {
            "success": True,
            "message": "엔트로피 곡선 계산 완료",
            "data": [row.model_dump(mode="json") for row in rows]
        }

    except HamiltonianError:
        raise
    except Exception as e:
        logger.error(f"curve evaluation failed: {e}", exc_info=True)
        raise HamiltonianError(f"곡선 계산 중 오류가 발생했습니다: {str(e)}", status_code=500)
