from fastapi import FastAPI
import logging

from stsa import __version__
from stsa.core.config import settings
from stsa.core.errors import StsaError
from stsa.core.logging_config import configure_logging
from stsa.api.errors import stsa_error_handler
from stsa.api.middleware import LoggingMiddleware
from stsa.api.routers.health_router import router as health_router
from stsa.api.routers.benchmark_router import router as benchmark_router
from stsa.api.routers.sweep_router import router as sweep_router

logger = logging.getLogger(__name__)


def create_app() -> FastAPI:
    configure_logging(settings.log_level)
    app = FastAPI(
        title="STSA Harness API",
        description="""
## STSA Harness API

Cost model and subspace-size sweeps for spatial-temporal subspace attention
over latent video.

### Features:
* **Benchmark**: closed-form MAC counts for subspace, temporal, crossframe and full attention
* **Sweep**: cost and along-flow consistency per subspace size on a synthetic scene
        """,
        version=__version__,
        swagger_ui_parameters={
            "defaultModelsExpandDepth": 1,
            "docExpansion": "none",
        },
    )
    app.add_exception_handler(StsaError, stsa_error_handler)
    app.add_middleware(LoggingMiddleware)

    app.include_router(health_router, prefix="/health", tags=["health"])
    app.include_router(benchmark_router, prefix="/benchmark", tags=["benchmark"])
    app.include_router(sweep_router, prefix="/sweep", tags=["sweep"])
    return app


app = create_app()
