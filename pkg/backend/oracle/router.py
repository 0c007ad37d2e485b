from typing import Optional

from fastapi import APIRouter
from pydantic import BaseModel, Field

from backend.config import settings
from backend.oracle.lemmas import verify_all

router = APIRouter(prefix="/oracle", tags=["oracle"])


class VerifyRequest(BaseModel):
    seed: int = settings.ORACLE_SEED
    trials: Optional[int] = Field(None, ge=1, le=100_000)


@router.post("/verify")
def verify(request: VerifyRequest):
    """보조정리 검증 보고서"""
    reports = verify_all(seed=request.seed, trials=request.trials)
    passed = all(r.passed for r in reports)
    return {
        "success": passed,
        "message": "모든 검증 통과" if passed else "검증 실패 항목이 있습니다",
        "data": [r.summary() for r in reports]
    }
