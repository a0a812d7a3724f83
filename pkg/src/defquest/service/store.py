"""Append-only event log with periodic snapshots.

State is a pure fold of the log: replaying events.jsonl from scratch must
reconstruct exactly what the in-memory store holds, which is what makes
crash recovery trivial (and testable). All appends serialize through one
lock; sequence numbers are strictly monotone.

Event types: book-added, questions-added, decision, annotation.
"""

import copy
import json
import threading
import time
from pathlib import Path

from ..errors import DataError

SNAPSHOT_INTERVAL = 100


def empty_state() -> dict:
    return {
        "books": {},
        "questions": {},
        "question_order": {},
        "decisions": {},
        "annotations": [],
    }


def apply_event(state: dict, event: dict) -> dict:
    """Fold one event into the state (mutates and returns it)."""
    etype = event["type"]
    payload = event["payload"]
    if etype == "book-added":
        state["books"][payload["book_id"]] = {
            "title": payload["title"],
            "domain_label": payload.get("domain_label", ""),
            "book_text": payload["book_text"],
            "index_text": payload["index_text"],
            "paragraphs": payload["paragraphs"],
        }
    elif etype == "questions-added":
        book_id = payload["book_id"]
        state["question_order"][book_id] = []
        for record in payload["records"]:
            state["questions"][record["question_id"]] = record
            state["question_order"][book_id].append(record["question_id"])
        state["books"][book_id]["parses_text"] = payload.get("parses_text", "")
        state["books"][book_id]["generate_config"] = payload.get("config", {})
    elif etype == "decision":
        state["decisions"][payload["question_id"]] = payload
    elif etype == "annotation":
        state["annotations"].append(payload)
    else:
        raise DataError(f"unknown event type {etype!r}")
    return state


class EventStore:
    def __init__(self, data_dir, snapshot_interval: int = SNAPSHOT_INTERVAL):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.log_path = self.data_dir / "events.jsonl"
        self.snapshot_path = self.data_dir / "snapshot.json"
        self.snapshot_interval = snapshot_interval
        self._lock = threading.Lock()
        self.seq = 0
        self.state = empty_state()
        self._load()

    def _load(self):
        if self.snapshot_path.exists():
            snap = json.loads(self.snapshot_path.read_text("utf-8"))
            self.state = snap["state"]
            self.seq = snap["seq"]
        if self.log_path.exists():
            with self.log_path.open(encoding="utf-8") as f:
                for line in f:
                    if not line.strip():
                        continue
                    event = json.loads(line)
                    if event["seq"] <= self.seq:
                        continue
                    apply_event(self.state, event)
                    self.seq = event["seq"]

    def append(self, etype: str, payload: dict) -> int:
        with self._lock:
            self.seq += 1
            event = {"seq": self.seq, "ts": time.time(), "type": etype, "payload": payload}
            with self.log_path.open("a", encoding="utf-8") as f:
                f.write(json.dumps(event, ensure_ascii=False, sort_keys=True) + "\n")
            apply_event(self.state, event)
            if self.seq % self.snapshot_interval == 0:
                self._write_snapshot()
            return self.seq

    def _write_snapshot(self):
        tmp = self.snapshot_path.with_suffix(".json.tmp")
        tmp.write_text(
            json.dumps({"seq": self.seq, "state": self.state}, ensure_ascii=False, sort_keys=True),
            "utf-8",
        )
        tmp.replace(self.snapshot_path)

    def view(self) -> dict:
        """Consistent copy of the folded state."""
        with self._lock:
            return copy.deepcopy(self.state)

    def replay(self) -> dict:
        """Fresh fold of the full log, ignoring snapshots and memory."""
        state = empty_state()
        if self.log_path.exists():
            with self.log_path.open(encoding="utf-8") as f:
                for line in f:
                    if line.strip():
                        apply_event(state, json.loads(line))
        return state
