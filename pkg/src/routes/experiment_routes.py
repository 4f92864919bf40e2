from fastapi import APIRouter

from ..controllers.experiment_controller import ExperimentController
from ..interfaces.evaluate_request import EvaluateRequest
from ..interfaces.reduce_request import ReduceRequest
from ..interfaces.validity_request import ValidityRequest

router = APIRouter(
    prefix="/api",
    tags=["dimension reduction"],
    responses={400: {"description": "Invalid parameters"}, 422: {"description": "Unusable data"}},
)

experiment_controller = ExperimentController()


@router.post("/reductions", summary="Reduce documents")
async def create_reduction(body: ReduceRequest):
    """
    Tokenizes the documents and reduces them to k features.

    - **FC**: fuzzy memberships to k spherical clusters (fuzzifier `q`, default 1.5)
    - **SVD** / **PCA**: truncated factorization scores

    Returns the reduced rows and the vocabulary size.
    """
    return await experiment_controller.reduce(body)


@router.post("/evaluations", summary="Cross-validate one reduction")
async def create_evaluation(body: EvaluateRequest):
    """
    Runs stratified k-fold cross-validation of one (method, k) cell.

    The reduction is fitted on the training rows of every fold only.
    Returns one report per classifier with fold accuracies and confusion matrices.
    """
    return await experiment_controller.evaluate(body)


@router.post("/validity", summary="Xie-Beni scan")
async def create_validity_scan(body: ValidityRequest):
    """
    Computes the Xie-Beni index of the fuzzy clustering for every k in `ks`.

    Lower is better; `best_k` minimizes the index.
    """
    return await experiment_controller.validity(body)
