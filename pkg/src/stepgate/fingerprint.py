"""Content fingerprints over a step's watched sources.

The digest is SHA-256 over the sources in label-sorted order, each
contributing label bytes, a NUL, LF-normalized content, and a NUL.
Sorting plus newline normalization makes the digest independent of
declaration order and of CRLF/LF checkouts.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import DuplicateLabel

ALGORITHM = "sha256"


@dataclass(frozen=True)
class Fingerprint:
    algorithm: str
    digest: str  # 64 lowercase hex chars
    labels: tuple[str, ...]

    def to_json_dict(self) -> dict:
        return {"algorithm": self.algorithm, "digest": self.digest, "labels": list(self.labels)}

    @classmethod
    def from_json_dict(cls, d: Mapping) -> "Fingerprint":
        return cls(algorithm=d["algorithm"], digest=d["digest"], labels=tuple(d["labels"]))


def normalize_newlines(content: bytes) -> bytes:
    return content.replace(b"\r\n", b"\n").replace(b"\r", b"\n")


def fingerprint_sources(sources: Sequence[tuple[str, bytes]]) -> Fingerprint:
    """Digest a list of (label, content bytes) pairs; labels must be unique."""
    labels = [label for label, _ in sources]
    if len(set(labels)) != len(labels):
        dupes = sorted({l for l in labels if labels.count(l) > 1})
        raise DuplicateLabel(f"duplicate watched-source labels: {dupes}")
    h = hashlib.sha256()
    for label, content in sorted(sources, key=lambda lc: lc[0]):
        h.update(label.encode("utf-8"))
        h.update(b"\x00")
        h.update(normalize_newlines(content))
        h.update(b"\x00")
    return Fingerprint(algorithm=ALGORITHM, digest=h.hexdigest(), labels=tuple(sorted(labels)))
