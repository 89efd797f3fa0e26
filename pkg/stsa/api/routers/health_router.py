from fastapi import APIRouter

from stsa import __version__

router = APIRouter()


@router.get("")
def health():
    """Liveness check."""
    return {"status": "ok", "version": __version__}
