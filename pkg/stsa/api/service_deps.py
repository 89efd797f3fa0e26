"""
Service dependency providers for FastAPI dependency injection.
Creates service instances wired to the process settings.
"""
from stsa.core.config import settings
from stsa.services.cost_service import CostService
from stsa.services.sweep_service import SweepService


def get_cost_service() -> CostService:
    """Provide CostService instance."""
    return CostService()


def get_sweep_service() -> SweepService:
    """Provide SweepService instance."""
    return SweepService(settings=settings)
