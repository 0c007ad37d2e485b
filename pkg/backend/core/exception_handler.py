from fastapi import Request, HTTPException
from fastapi.responses import JSONResponse
from fastapi.exceptions import RequestValidationError
from fastapi.encoders import jsonable_encoder
import logging

logger = logging.getLogger(__name__)


class HamiltonianError(Exception):
    """모든 도메인 예외의 기반 (HTTP 상태 코드와 CLI 종료 코드 포함)"""

    status_code: int = 400
    exit_code: int = 1

    def __init__(self, message: str, status_code: int = None):
        super().__init__(message)
        self.message = message
        if status_code is not None:
            self.status_code = status_code


class BadConfig(HamiltonianError):
    exit_code = 2


class NonNormalized(HamiltonianError):
    exit_code = 10


class NotMixed(HamiltonianError):
    exit_code = 11


class InfiniteEntropy(HamiltonianError):
    exit_code = 12


class IndexBeyondRank(HamiltonianError):
    exit_code = 13


class InvalidHamiltonian(HamiltonianError):
    exit_code = 20


class NoConvergenceCertificate(HamiltonianError):
    status_code = 422
    exit_code = 21


class NoGibbsState(HamiltonianError):
    status_code = 422
    exit_code = 22


class DegenerateBeta(HamiltonianError):
    status_code = 422
    exit_code = 30


class OutOfRange(HamiltonianError):
    exit_code = 40


class SamplingExhausted(HamiltonianError):
    status_code = 500
    exit_code = 50


async def global_exception_handler(request: Request, exc: Exception):
    """Global exception handler for all unhandled exceptions"""
    logger.error(f"Unhandled exception: {exc}", exc_info=True)

    return JSONResponse(
        status_code=500,
        content={
            "success": False,
            "message": "Internal server error",
            "data": None
        }
    )


async def hamiltonian_exception_handler(request: Request, exc: HamiltonianError):
    """Handler for domain errors"""
    return JSONResponse(
        status_code=exc.status_code,
        content={
            "success": False,
            "message": exc.message,
            "data": {"error": type(exc).__name__}
        }
    )


async def validation_exception_handler(request: Request, exc: RequestValidationError):
    """Handler for validation errors"""
    return JSONResponse(
        status_code=422,
        content={
            "success": False,
            "message": "Validation error",
            "data": {"errors": jsonable_encoder(exc.errors())}
        }
    )


async def http_exception_handler(request: Request, exc: HTTPException):
    """Handler for HTTP exceptions"""
    return JSONResponse(
        status_code=exc.status_code,
        content={
            "success": False,
            "message": exc.detail,
            "data": None
        }
    )
