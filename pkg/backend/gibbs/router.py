from typing import List

from fastapi import APIRouter
from pydantic import BaseModel, Field

from backend.gibbs.solver import hamiltonian_from_payload, h_star, solve_gibbs

router = APIRouter(prefix="/gibbs", tags=["gibbs"])


class GibbsRequest(BaseModel):
    levels: List[float] = Field(..., min_length=1)
    finite_domain: bool = True
    E: float = Field(..., gt=0)


@router.post("/solve")
async def solve(request: GibbsRequest):
    """유한 준위 해밀토니안의 Gibbs 상태"""
    H = hamiltonian_from_payload(request.model_dump())
    state = solve_gibbs(H, request.E)
    return {
        "success": True,
        "message": "Gibbs 상태 계산 완료",
        "data": {
            **state.model_dump(),
            "h_star": h_star(H)
        }
    }
