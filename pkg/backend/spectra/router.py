from fastapi import APIRouter
from pydantic import BaseModel, Field

from backend.spectra.spectrum import SpectrumDescriptor, make_spectrum

router = APIRouter(prefix="/spectra", tags=["spectra"])


class DescribeRequest(BaseModel):
    spectrum: SpectrumDescriptor
    preview: int = Field(5, ge=1, le=1000)


@router.post("/describe")
async def describe_spectrum(request: DescribeRequest):
    """스펙트럼 요약: 랭크, 엔트로피, 앞쪽 꼬리 합"""
    spec = make_spectrum(request.spectrum)
    return {
        "success": True,
        "message": "스펙트럼 조회 완료",
        "data": spec.describe(request.preview)
    }
