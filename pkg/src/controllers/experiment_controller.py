import math

from pydantic import ValidationError
from starlette.concurrency import run_in_threadpool

from ..interfaces.evaluate_request import EvaluateRequest
from ..interfaces.fuzzy_params import FuzzyParams
from ..interfaces.labeled_corpus import LabeledCorpus
from ..interfaces.reduce_request import ReduceRequest
from ..interfaces.reducer_spec import ReducerSpec
from ..interfaces.validity_request import ValidityRequest
from ..usecases.fuzzy_usecases import FuzzyUseCases
from ..usecases.linear_usecases import LinearUseCases
from ..usecases.validation_usecases import EvaluationUseCases
from ..utils.error_handler import FuzzyDrError, raise_http_error
from ..utils.logger import get_logger

logger = get_logger(__name__)


def _report_body(report):
    return {
        "classifier": report.classifier,
        "method": report.variant,
        "k": report.k,
        "fold_accuracies": list(report.fold_accuracies),
        "mean_accuracy": report.mean_accuracy,
        "std_accuracy": report.std_accuracy,
        "confusions": [
            {"tn": cm.tn, "fp": cm.fp, "fn": cm.fn, "tp": cm.tp} for cm in report.confusions
        ],
    }


class ExperimentController:
    """Runs single-shot reductions, evaluations and validity scans for the HTTP routes."""

    def __init__(self):
        self.fuzzy_use_cases = FuzzyUseCases()
        self.linear_use_cases = LinearUseCases()
        self.evaluation_use_cases = EvaluationUseCases()

    async def _call(self, action: str, func, *args):
        try:
            return await run_in_threadpool(func, *args)
        except FuzzyDrError as e:
            logger.warning(f"{action} rejected: {e.message}")
            raise_http_error(e.status_code, e.message)
        except ValidationError as e:
            raise_http_error(400, f"{action}: {e.errors()[0]['msg']}")

    async def reduce(self, body: ReduceRequest):
        return await self._call("reduce", self._reduce, body)

    async def evaluate(self, body: EvaluateRequest):
        return await self._call("evaluate", self._evaluate, body)

    async def validity(self, body: ValidityRequest):
        return await self._call("validity", self._validity, body)

    def _reduce(self, body: ReduceRequest):
        if body.method == "FC":
            params = FuzzyParams(k=body.k, q=body.q or 1.5, seed=body.seed)
            vocab, _, reduced = self.fuzzy_use_cases.reduce_documents(body.documents, body.tokenizer, params)
        else:
            vocab, reduced = self.linear_use_cases.reduce_documents(
                body.documents, body.tokenizer, body.method, body.k, body.seed, body.normalize_rows
            )
        return {
            "method": body.method,
            "k": body.k,
            "vocabulary_size": vocab.size,
            "rank_deficient": reduced.rank_deficient,
            "rows": reduced.values.tolist(),
        }

    def _evaluate(self, body: EvaluateRequest):
        corpus = LabeledCorpus(tuple(body.documents), tuple(body.labels))
        q = (body.q or 1.5) if body.method == "FC" else None
        spec = ReducerSpec(method=body.method, k=body.k, q=q)
        reports = self.evaluation_use_cases.evaluate_corpus(
            corpus, body.tokenizer, spec, body.classifiers, folds=body.folds, seed=body.seed, dataset="request"
        )
        return {"reports": [_report_body(reports[name]) for name in body.classifiers]}

    def _validity(self, body: ValidityRequest):
        scores, best_k = self.fuzzy_use_cases.scan_documents(body.documents, body.tokenizer, body.ks, body.q, body.seed)
        return {
            "scores": {str(k): (None if math.isinf(v) else v) for k, v in scores.items()},
            "best_k": best_k,
        }
