from fastapi import APIRouter
from pydantic import BaseModel, Field

from backend.bounds.lsb import find_preset, load_presets, lsb_bound
from backend.spectra.spectrum import SpectrumDescriptor, make_spectrum

router = APIRouter(prefix="/bounds", tags=["bounds"])


class LsbRequest(BaseModel):
    spectrum: SpectrumDescriptor
    characteristic: str
    eps: float = Field(..., gt=0, le=1)


@router.get("/presets")
async def list_presets():
    """특성량 프리셋 목록 (C, D)"""
    return {
        "success": True,
        "message": "프리셋 조회 완료",
        "data": [preset.model_dump() for preset in load_presets()]
    }


@router.post("/lsb")
async def evaluate_bound(request: LsbRequest):
    """하반연속성 한계 C·ε·F_H(1/ε) + D·h↑(ε)"""
    preset = find_preset(request.characteristic)
    result = lsb_bound(make_spectrum(request.spectrum), request.eps, preset)
    return {
        "success": True,
        "message": "한계 계산 완료",
        "data": result.model_dump(mode="json")
    }
