"""Mapping of library errors to JSON responses."""
import logging

from fastapi import Request
from fastapi.responses import JSONResponse

from stsa.core.errors import StsaError

logger = logging.getLogger(__name__)


async def stsa_error_handler(request: Request, exc: StsaError) -> JSONResponse:
    logger.warning(f"{request.method} {request.url.path} failed: {exc.code}: {exc.detail}")
    return JSONResponse(status_code=exc.status_code, content=exc.to_dict())
