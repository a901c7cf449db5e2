"""File-backed document store for fields, judgments, responses, artifacts.

One JSON document per field under ``<root>/fields/``, artifact files under
``<root>/artifacts/<field>/<artifact-id>/``, and an append-only audit log
of every mutation at ``<root>/audit.log``.  Documents are written to a
temporary file and renamed into place, so concurrent readers always see a
complete revision; writers serialize on a per-field lock within the
process.

Every mutation bumps the document revision.  Artifacts remember the
revision they were computed from; readers receive a ``stale`` flag when
the document has moved on.  Deletion is a tombstone so the audit trail
stays intact; a deleted id can be recreated and continues its revision
sequence.
"""
from __future__ import annotations

import json
import os
import threading
import time
from pathlib import Path
from typing import Mapping, Sequence

from .errors import MorphspaceError, NotFoundError, RevisionConflictError


class ConflictError(MorphspaceError):
    """Create collides with an existing live document."""

    code = "conflict"


class StalePrerequisiteError(MorphspaceError):
    """A dependent analysis stage needs a fresh upstream artifact."""

    code = "stale-prerequisite"


class FieldStore:
    def __init__(self, root) -> None:
        self.root = Path(root)
        (self.root / "fields").mkdir(parents=True, exist_ok=True)
        (self.root / "artifacts").mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        self._audit_lock = threading.Lock()

    # -- plumbing -----------------------------------------------------------

    def _lock(self, fid: str) -> threading.Lock:
        with self._registry_lock:
            if fid not in self._locks:
                self._locks[fid] = threading.Lock()
            return self._locks[fid]

    def _doc_path(self, fid: str) -> Path:
        return self.root / "fields" / f"{fid}.json"

    def _artifact_dir(self, fid: str, aid: str) -> Path:
        return self.root / "artifacts" / fid / aid

    def _write_doc(self, fid: str, doc: dict) -> None:
        path = self._doc_path(fid)
        tmp = path.with_suffix(".json.tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)

    def _read_doc(self, fid: str, allow_deleted: bool = False) -> dict:
        path = self._doc_path(fid)
        if not path.is_file():
            raise NotFoundError(f"field {fid!r} does not exist")
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        if doc.get("deleted") and not allow_deleted:
            raise NotFoundError(f"field {fid!r} is deleted")
        return doc

    def _audit(self, fid: str, revision: int, action: str, detail: str = "") -> None:
        entry = {
            "ts": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime()),
            "field": fid,
            "revision": revision,
            "action": action,
            "detail": detail,
        }
        with self._audit_lock:
            with open(self.root / "audit.log", "a", encoding="utf-8") as fh:
                fh.write(json.dumps(entry, sort_keys=True) + "\n")

    @staticmethod
    def _check_revision(doc: dict, base_revision: int | None) -> None:
        if base_revision is not None and base_revision != doc["revision"]:
            raise RevisionConflictError(
                f"base revision {base_revision} is stale;"
                f" current revision is {doc['revision']}"
            )

    # -- field CRUD ---------------------------------------------------------

    def list_fields(self) -> list[dict]:
        out = []
        for path in sorted((self.root / "fields").glob("*.json")):
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
            if doc.get("deleted"):
                continue
            out.append(
                {
                    "id": doc["field"]["id"],
                    "title": doc["field"]["title"],
                    "revision": doc["revision"],
                    "dimensions": len(doc["field"]["dimensions"]),
                }
            )
        return out

    def create_field(self, field_doc: Mapping) -> dict:
        fid = field_doc["id"]
        with self._lock(fid):
            path = self._doc_path(fid)
            revision = 1
            if path.is_file():
                old = self._read_doc(fid, allow_deleted=True)
                if not old.get("deleted"):
                    raise ConflictError(f"field {fid!r} already exists")
                revision = old["revision"] + 1  # recreation continues the sequence
            doc = {
                "field": dict(field_doc),
                "revision": revision,
                "deleted": False,
                "responses": [],
                "judgments": [],
                "artifacts": {},
            }
            self._write_doc(fid, doc)
            self._audit(fid, revision, "create")
            return doc

    def get_field(self, fid: str) -> dict:
        return self._read_doc(fid)

    def update_field(self, fid: str, field_doc: Mapping, base_revision: int | None) -> dict:
        with self._lock(fid):
            doc = self._read_doc(fid)
            self._check_revision(doc, base_revision)
            if field_doc["id"] != fid:
                raise ConflictError(
                    f"document id {field_doc['id']!r} does not match path id {fid!r}"
                )
            doc["field"] = dict(field_doc)
            doc["revision"] += 1
            self._write_doc(fid, doc)
            self._audit(fid, doc["revision"], "update")
            return doc

    def delete_field(self, fid: str) -> dict:
        with self._lock(fid):
            doc = self._read_doc(fid)
            doc["deleted"] = True
            doc["revision"] += 1
            self._write_doc(fid, doc)
            self._audit(fid, doc["revision"], "delete")
            return doc

    # -- responses and judgments ---------------------------------------------

    def add_responses(self, fid: str, rows: Sequence[Mapping]) -> dict:
        with self._lock(fid):
            doc = self._read_doc(fid)
            doc["responses"].extend(dict(r) for r in rows)
            doc["revision"] += 1
            self._write_doc(fid, doc)
            self._audit(fid, doc["revision"], "responses", f"+{len(rows)}")
            return doc

    def put_judgments(
        self, fid: str, rows: Sequence[Mapping], base_revision: int | None
    ) -> dict:
        with self._lock(fid):
            doc = self._read_doc(fid)
            self._check_revision(doc, base_revision)
            doc["judgments"] = [dict(r) for r in rows]
            doc["revision"] += 1
            self._write_doc(fid, doc)
            self._audit(fid, doc["revision"], "judgments", f"count={len(rows)}")
            return doc

    # -- artifacts ------------------------------------------------------------

    def record_artifact(
        self, fid: str, meta: Mapping, files: Mapping[str, str]
    ) -> dict:
        """Persist artifact files and register them in the document."""
        aid = meta["id"]
        adir = self._artifact_dir(fid, aid)
        adir.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            with open(adir / name, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        with self._lock(fid):
            doc = self._read_doc(fid)
            record = dict(meta)
            record["files"] = sorted(files)
            doc["artifacts"][aid] = record
            self._write_doc(fid, doc)
            self._audit(fid, doc["revision"], "artifact", aid)
            return record

    def get_artifact(self, fid: str, aid: str) -> tuple[dict, dict[str, str]]:
        doc = self._read_doc(fid)
        if aid not in doc["artifacts"]:
            raise NotFoundError(f"artifact {aid!r} does not exist on field {fid!r}")
        meta = dict(doc["artifacts"][aid])
        meta["stale"] = meta["revision"] < doc["revision"]
        adir = self._artifact_dir(fid, aid)
        files = {}
        for name in meta["files"]:
            with open(adir / name, "r", encoding="utf-8", newline="") as fh:
                files[name] = fh.read()
        return meta, files

    def artifact_metas(self, fid: str) -> list[dict]:
        doc = self._read_doc(fid)
        out = []
        for aid in sorted(doc["artifacts"]):
            meta = dict(doc["artifacts"][aid])
            meta["stale"] = meta["revision"] < doc["revision"]
            out.append(meta)
        return out

    def latest_artifact(self, fid: str, stage: str, revision: int) -> dict | None:
        """Most recent artifact of a stage computed at the given revision."""
        doc = self._read_doc(fid)
        best = None
        for meta in doc["artifacts"].values():
            if meta["stage"] != stage or meta["revision"] != revision:
                continue
            if best is None or meta["seq"] > best["seq"]:
                best = dict(meta)
        return best

    def next_sequence(self, fid: str) -> int:
        doc = self._read_doc(fid)
        return 1 + max(
            (meta.get("seq", 0) for meta in doc["artifacts"].values()), default=0
        )

    def artifact_path(self, fid: str, aid: str) -> Path:
        return self._artifact_dir(fid, aid)
