from fastapi import APIRouter, Depends

from stsa.api.service_deps import get_sweep_service
from stsa.schemas.report import SweepRow
from stsa.schemas.sweep import SweepRequest
from stsa.services.sweep_service import SweepService

router = APIRouter()


@router.post("", response_model=list[SweepRow])
def sweep(data: SweepRequest, sweep_service: SweepService = Depends(get_sweep_service)):
    """
    Cost and consistency per subspace size on a generated scene.

    Sizes that do not divide the scene are skipped.
    """
    return sweep_service.sweep_subspace_sizes(data.sizes, data.scene, data.seed, data.dim)
