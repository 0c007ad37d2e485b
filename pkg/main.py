import logging

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.exceptions import RequestValidationError

from backend.config import settings
from backend.spectra.router import router as spectra_router
from backend.optimal.router import router as optimal_router
from backend.gibbs.router import router as gibbs_router
from backend.bounds.router import router as bounds_router
from backend.oracle.router import router as oracle_router
from backend.core.exception_handler import (
    global_exception_handler,
    hamiltonian_exception_handler,
    validation_exception_handler,
    http_exception_handler,
    HamiltonianError
)

logging.basicConfig(
    level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
    format="%(asctime)s %(levelname)s %(name)s: %(message)s"
)

app = FastAPI(
    title="Optimal Hamiltonian API",
    description="최소 Gibbs 엔트로피를 주는 접지 해밀토니안 계산 API",
    version="1.0.0"
)

# CORS 설정
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# 예외 핸들러 등록
app.add_exception_handler(Exception, global_exception_handler)
app.add_exception_handler(HamiltonianError, hamiltonian_exception_handler)
app.add_exception_handler(RequestValidationError, validation_exception_handler)
app.add_exception_handler(HTTPException, http_exception_handler)

# 라우터 등록
app.include_router(spectra_router)
app.include_router(optimal_router)
app.include_router(gibbs_router)
app.include_router(bounds_router)
app.include_router(oracle_router)

@app.get("/")
async def root():
    """루트 엔드포인트"""
    return {
        "success": True,
        "message": "Optimal Hamiltonian API 서버가 실행 중입니다.",
        "data": {
            "version": "1.0.0",
            "endpoints": {
                "spectra": "/spectra",
                "optimal": "/optimal",
                "gibbs": "/gibbs",
                "bounds": "/bounds",
                "oracle": "/oracle"
            }
        }
    }

@app.get("/health")
async def health_check():
    """헬스 체크 엔드포인트"""
    return {
        "success": True,
        "message": "서버 상태 정상",
        "data": {
            "status": "healthy",
            "units": settings.DEFAULT_UNITS
        }
    }

if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="0.0.0.0", port=8000)
