import time
import logging
from fastapi import Request
from starlette.middleware.base import BaseHTTPMiddleware
from typing import Callable

logger = logging.getLogger(__name__)


class LoggingMiddleware(BaseHTTPMiddleware):
    """
    Middleware to log request/response details and processing time.
    """

    async def dispatch(self, request: Request, call_next: Callable):
        start_time = time.perf_counter()
        logger.info(f"→ Request: {request.method} {request.url.path}")

        try:
            response = await call_next(request)
            duration = time.perf_counter() - start_time
            logger.info(f"← Response: {response.status_code} in {duration:.3f}s")
            response.headers["X-Process-Time"] = f"{duration:.3f}s"
            return response

        except Exception as e:
            duration = time.perf_counter() - start_time
            logger.error(f"✗ Error processing request: {str(e)} after {duration:.3f}s")
            raise
