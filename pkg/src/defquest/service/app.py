"""The review/curation HTTP API.

JSON over HTTP; see the README for the endpoint catalogue. Generation runs
synchronously against the stored book using the offline backends (or
service URLs passed in the request), and its JSONL export is byte-
identical to a CLI run with the same configuration.
"""


from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from .. import corpus, pipeline
from ..errors import DataError, DefquestError, ServiceError
from ..evalkit import agreement
from ..evalkit.scheme import apply_gating, load_scheme
from ..generation import dump_record
from ..rng import SplitMix64
from ..selection import RuleScorer, SelectionConfig, load_default_patterns
from .store import EventStore

VERDICTS = ("accept", "reject", "edit")


class BookPayload(BaseModel):
    book_text: str
    index_text: str
    book_id: str | None = None
    domain_label: str = ""


class GeneratePayload(BaseModel):
    parses_text: str
    threshold: float = 0.7
    scorer: str = "rule"
    generator: str = "template"
    seed: int = 0
    skip_failed: bool = False


class SweepPayload(BaseModel):
    thresholds: list[float]


class DecisionPayload(BaseModel):
    author_id: str
    verdict: str
    edited_text: str | None = None
    force: bool = False
    ts: float = 0.0


class AnnotationPayload(BaseModel):
    rater_id: str
    responses: dict
    ts: float = 0.0


def _question_status(state: dict, question_id: str) -> str:
    decision = state["decisions"].get(question_id)
    if decision is None:
        return "pending"
    return "rejected" if decision["verdict"] == "reject" else "accepted"


def _run_pipeline(state: dict, book_id: str, payload: GeneratePayload) -> pipeline.PipelineResult:
    book_entry = state["books"].get(book_id)
    if book_entry is None:
        raise HTTPException(status_code=404, detail=f"unknown book {book_id}")
    book = corpus.load_textbook(
        book_entry["book_text"], book_id=book_id, domain_label=book_entry["domain_label"]
    )
    index = corpus.load_index(book_entry["index_text"])
    provider = pipeline.FileGraphProvider(payload.parses_text)
    config = pipeline.PipelineConfig(
        selection=SelectionConfig(
            threshold=payload.threshold,
            scorer="rule" if payload.scorer == "rule" else "external",
        ),
        generator="template" if payload.generator == "template" else "external",
        parser="conllu",
        seed=payload.seed,
    )
    if payload.scorer != "rule" or payload.generator != "template":
        from .. import clients
        from ..generation import ExternalBackend

        scorer = (
            RuleScorer()
            if payload.scorer == "rule"
            else clients.RemoteScorer(clients.ServiceEndpoint(base_url=payload.scorer))
        )
        backend = None
        if payload.generator != "template":
            endpoint = clients.ServiceEndpoint(base_url=payload.generator)
            backend = ExternalBackend(
                lambda inputs: clients.remote_generate(endpoint, inputs), payload.generator
            )
        return pipeline.ask(
            book, index, config, scorer=scorer, graph_provider=provider,
            backend=backend, skip_failed=payload.skip_failed,
        )
    return pipeline.ask(
        book, index, config, graph_provider=provider, skip_failed=payload.skip_failed
    )


def create_app(data_dir, ui_dir=None, scheme_source=None) -> FastAPI:
    app = FastAPI(title="defquest review service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    store = EventStore(data_dir)
    scheme = load_scheme(scheme_source)
    app.state.store = store
    app.state.scheme = scheme

    @app.exception_handler(RequestValidationError)
    async def invalid_payload(request: Request, exc):  # noqa: ARG001
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(DefquestError)
    async def domain_error(request: Request, exc):  # noqa: ARG001
        status = 503 if isinstance(exc, ServiceError) else 400
        return JSONResponse(status_code=status, content={"detail": str(exc)})

    @app.post("/api/books")
    def add_book(payload: BookPayload):
        book = corpus.load_textbook(
            payload.book_text, book_id=payload.book_id, domain_label=payload.domain_label
        )
        corpus.load_index(payload.index_text)  # validate now, store raw
        store.append(
            "book-added",
            {
                "book_id": book.id,
                "title": book.title,
                "domain_label": book.domain_label,
                "book_text": payload.book_text,
                "index_text": payload.index_text,
                "paragraphs": {
                    p.id: p.text for s in book.sections for p in s.paragraphs
                },
            },
        )
        return {"book_id": book.id}

    @app.post("/api/books/{book_id}/generate")
    def generate(book_id: str, payload: GeneratePayload):
        result = _run_pipeline(store.view(), book_id, payload)
        store.append(
            "questions-added",
            {
                "book_id": book_id,
                "records": result.records,
                "parses_text": payload.parses_text,
                "config": result.manifest["config"],
                "manifest": result.manifest,
            },
        )
        return {
            "question_count": len(result.records),
            "per_stage_counts": result.manifest["counts"],
        }

    @app.post("/api/books/{book_id}/sweep")
    def sweep(book_id: str, payload: SweepPayload):
        state = store.view()
        entry = state["books"].get(book_id)
        if entry is None:
            raise HTTPException(status_code=404, detail=f"unknown book {book_id}")
        parses_text = entry.get("parses_text")
        if not parses_text:
            raise HTTPException(status_code=400, detail="book has no stored parses; generate first")
        book = corpus.load_textbook(entry["book_text"], book_id=book_id)
        index = corpus.load_index(entry["index_text"])
        points = pipeline.threshold_sweep(
            list(book.sentences()),
            index,
            RuleScorer(),
            pipeline.FileGraphProvider(parses_text),
            load_default_patterns(),
            sorted(payload.thresholds),
        )
        return {"points": [{"threshold": t, "count": c} for t, c in points]}

    @app.get("/api/books/{book_id}/questions.jsonl")
    def export_questions(book_id: str):
        state = store.view()
        if book_id not in state["books"]:
            raise HTTPException(status_code=404, detail=f"unknown book {book_id}")
        order = state["question_order"].get(book_id, [])
        body = "".join(dump_record(state["questions"][qid]) + "\n" for qid in order)
        return PlainTextResponse(body, media_type="application/jsonl")

    @app.get("/api/questions")
    def list_questions(
        book: str | None = None,
        status: str | None = None,
        page: int = 1,
        page_size: int = 50,
        shuffle_seed: int | None = None,
    ):
        if status not in (None, "pending", "accepted", "rejected"):
            raise HTTPException(status_code=400, detail=f"unknown status {status!r}")
        state = store.view()
        if book is not None and book not in state["books"]:
            raise HTTPException(status_code=404, detail=f"unknown book {book}")
        books = [book] if book else sorted(state["question_order"])
        question_ids = [qid for b in books for qid in state["question_order"].get(b, [])]
        rows = []
        for qid in question_ids:
            record = state["questions"][qid]
            q_status = _question_status(state, qid)
            if status and q_status != status:
                continue
            decision = state["decisions"].get(qid)
            rows.append(
                {
                    **record,
                    "status": q_status,
                    "edited_text": decision.get("edited_text") if decision else None,
                    "context_paragraph": state["books"][record["book_id"]]["paragraphs"].get(
                        record["paragraph_id"], ""
                    ),
                }
            )
        if shuffle_seed is not None:
            rng = SplitMix64(shuffle_seed)
            rows = [rows[i] for i in rng.sample_without_replacement(len(rows), len(rows))]
        total = len(rows)
        start = (page - 1) * page_size
        return {
            "questions": rows[start : start + page_size],
            "total": total,
            "page": page,
            "page_size": page_size,
        }

    @app.post("/api/questions/{question_id:path}/decision", status_code=204)
    def decide(question_id: str, payload: DecisionPayload):
        state = store.view()
        if question_id not in state["questions"]:
            raise HTTPException(status_code=404, detail=f"unknown question {question_id}")
        if payload.verdict not in VERDICTS:
            raise HTTPException(status_code=400, detail=f"unknown verdict {payload.verdict!r}")
        if (payload.verdict == "edit") != (payload.edited_text is not None):
            raise HTTPException(
                status_code=400, detail="edited_text is required exactly when verdict is 'edit'"
            )
        if payload.edited_text is not None and not payload.edited_text.endswith("?"):
            raise HTTPException(status_code=400, detail="edited question must end with '?'")
        if question_id in state["decisions"] and not payload.force:
            raise HTTPException(
                status_code=409, detail="question already has a decision; pass force to overwrite"
            )
        store.append(
            "decision",
            {
                "question_id": question_id,
                "author_id": payload.author_id,
                "verdict": payload.verdict,
                "edited_text": payload.edited_text,
                "ts": payload.ts,
            },
        )

    @app.post("/api/questions/{question_id:path}/annotations", status_code=204)
    def annotate(question_id: str, payload: AnnotationPayload):
        state = store.view()
        if question_id not in state["questions"]:
            raise HTTPException(status_code=404, detail=f"unknown question {question_id}")
        try:
            record = apply_gating(
                scheme,
                payload.responses,
                question_id=question_id,
                rater_id=payload.rater_id,
                ts=payload.ts,
            )
        except DataError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        store.append(
            "annotation",
            {
                "question_id": record.question_id,
                "rater_id": record.rater_id,
                "responses": record.responses,
                "ts": record.ts,
            },
        )

    @app.get("/api/questions/{question_id:path}/annotations")
    def list_annotations(question_id: str):
        state = store.view()
        if question_id not in state["questions"]:
            raise HTTPException(status_code=404, detail=f"unknown question {question_id}")
        return {
            "annotations": [
                a for a in state["annotations"] if a["question_id"] == question_id
            ]
        }

    def _annotation_records(state):
        from ..evalkit.scheme import AnnotationRecord

        return [
            AnnotationRecord(
                question_id=a["question_id"],
                rater_id=a["rater_id"],
                responses=a["responses"],
                ts=a["ts"],
            )
            for a in state["annotations"]
        ]

    @app.get("/api/reports/agreement")
    def agreement_endpoint(
        item: str, bootstrap: int = 0, n: int = 1000, seed: int = 0
    ):
        records = _annotation_records(store.view())
        if not records:
            raise HTTPException(status_code=400, detail="no annotations stored")
        opts = (bootstrap, n, seed) if bootstrap else None
        try:
            report = agreement.agreement_report(records, item, scheme=scheme, bootstrap=opts)
        except DataError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return report.to_dict()

    @app.get("/api/reports/distribution")
    def distribution_endpoint():
        records = _annotation_records(store.view())
        return agreement.distribution_report(records, scheme)

    @app.get("/api/scheme")
    def scheme_endpoint():
        return scheme.to_dict()

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
