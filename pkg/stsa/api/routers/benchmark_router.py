from fastapi import APIRouter, Depends

from stsa.api.service_deps import get_cost_service
from stsa.schemas.cost import CostReport, CostRequest
from stsa.services.cost_service import CostService

router = APIRouter()


@router.post("", response_model=CostReport)
def benchmark(data: CostRequest, cost_service: CostService = Depends(get_cost_service)):
    """
    Closed-form MAC counts of one attention variant.

    `subspace` is required when `mode` is `subspace`.
    """
    return cost_service.cost_model(
        data.mode, data.frames, data.height, data.width,
        data.channels, data.dim, data.subspace, data.heads,
    )
