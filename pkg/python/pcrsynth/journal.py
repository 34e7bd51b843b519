"""Append-only JSON-lines record of finished campaign rows.

The first line is a header with the campaign options and their fingerprint;
a resumed campaign must present the same options.
"""
import json
from pathlib import Path

import filelock
from deepdiff import DeepDiff
from deepdiff.deephash import UNPROCESSED_KEY, DeepHash

from . import hashers
from .exceptions import JournalMismatch, NumericError
from .util import log_info, log_warning

LOCK_TIMEOUT = 30


def fingerprint(options_record):
    """DeepHash of a json-able options record"""
    res = DeepHash(options_record, hasher=hashers.hash_str)
    if UNPROCESSED_KEY in res:  # pragma: no cover
        raise ValueError("Hashing failed on options", list(res[UNPROCESSED_KEY]))
    return res[options_record]


def row_key(cell_index, target_name):
    return f"cell{int(cell_index):03d}-{target_name}"


class Journal:
    def __init__(self, path, options_record):
        self.path = Path(path)
        self.options = options_record
        self.fingerprint = fingerprint(options_record)
        self.lock = filelock.FileLock(str(self.path) + ".lock", timeout=LOCK_TIMEOUT)
        self.rows = {}

    def _drop_partial_line(self):
        """Cut a crash-truncated last line so later appends start on a fresh line"""
        raw = self.path.read_bytes()
        if not raw or raw.endswith(b"\n"):
            return
        keep = raw.rfind(b"\n") + 1
        log_warning(f"Dropping truncated last journal line in {self.path}")
        with open(self.path, "r+b") as op:
            op.truncate(keep)

    def _read(self):
        lines = self.path.read_text().splitlines()
        records = []
        for ii, line in enumerate(lines):
            if not line.strip():
                continue
            try:
                records.append(json.loads(line))
            except ValueError:
                # a crash while appending leaves a truncated last line
                if ii == len(lines) - 1:
                    log_warning(f"Ignoring truncated last journal line in {self.path}")
                    continue
                raise NumericError(f"Corrupt journal line {ii + 1} in {self.path}")
        return records

    def open(self, resume=False):
        """Start a new journal or pick up an existing one. Returns the completed rows by key."""
        self.path.parent.mkdir(exist_ok=True, parents=True)
        with self.lock:
            if resume and self.path.exists():
                self._drop_partial_line()
                records = self._read()
                header = records[0] if records else None
                if header is None or header.get("kind") != "header":
                    raise JournalMismatch(f"{self.path} has no header line")
                if header["fingerprint"] != self.fingerprint:
                    diff = DeepDiff(header["options"], self.options)
                    raise JournalMismatch(
                        f"Can not resume {self.path}, the options changed: {diff.pretty()}"
                    )
                for rec in records[1:]:
                    if rec.get("kind") == "row":
                        self.rows[rec["row_key"]] = rec["row"]
                log_info(f"Resuming journal {self.path}: {len(self.rows)} rows already done")
            else:
                if self.path.exists():
                    self.path.replace(self.path.with_name(self.path.name + ".backup"))
                header = {"kind": "header", "fingerprint": self.fingerprint, "options": self.options}
                self.path.write_text(json.dumps(header) + "\n")
        return dict(self.rows)

    def append(self, key, row):
        line = json.dumps({"kind": "row", "row_key": key, "row": row})
        with self.lock:
            with open(self.path, "a") as op:
                op.write(line + "\n")
                op.flush()
        self.rows[key] = row

    def __contains__(self, key):
        return key in self.rows


class JsonLinesSink:
    """Callable appending one json record per call (optimizer evaluation traces)"""

    def __init__(self, path):
        self.path = Path(path)
        self.path.parent.mkdir(exist_ok=True, parents=True)
        self.lock = filelock.FileLock(str(self.path) + ".lock", timeout=LOCK_TIMEOUT)

    def __call__(self, record):
        with self.lock:
            with open(self.path, "a") as op:
                op.write(json.dumps(record) + "\n")
