"""Text formats for hypergraphs and labels, JSON result bundles, CSV tables.

Hypergraph files hold one hyperedge per line as whitespace-separated node
tokens, optionally followed by ``# w=<float>``. Blank lines and lines
starting with ``#`` are ignored. Label files hold ``<node> <label>`` lines.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from io import StringIO
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from .hypergraph import Hypergraph, HypergraphError

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
_WEIGHT = re.compile(r"^w=(\S+)$")


class FormatError(ValueError):
    pass


@dataclass
class LoadedHypergraph:
    hypergraph: Hypergraph
    tokens: list[str]
    dropped: int = 0

    @property
    def index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.tokens)}


def _read_text(source) -> str:
    if isinstance(source, (str, Path)) and Path(source).exists():
        return Path(source).read_text(encoding="utf-8")
    if hasattr(source, "read"):
        return source.read()
    raise FileNotFoundError(str(source))


def parse_hypergraph_text(text: str) -> LoadedHypergraph:
    tokens: dict[str, int] = {}
    edges, weights = [], []
    dropped = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        body, hash_, note = line.partition("#")
        weight = 1.0
        if hash_:
            match = _WEIGHT.match(note.strip())
            if not match:
                raise FormatError(f"line {lineno}: malformed annotation {note.strip()!r}")
            try:
                weight = float(match.group(1))
            except ValueError:
                raise FormatError(f"line {lineno}: bad weight {match.group(1)!r}") from None
            if not (math.isfinite(weight) and weight > 0):
                raise FormatError(f"line {lineno}: weight must be positive, got {weight}")
        names = list(dict.fromkeys(body.split()))
        if len(names) < 2:
            dropped += 1
            continue
        edges.append([tokens.setdefault(t, len(tokens)) for t in names])
        weights.append(weight)
    if not edges and not dropped:
        raise FormatError("no hyperedges found")
    if dropped:
        log.warning("dropped %d hyperedge line(s) with fewer than 2 nodes", dropped)
    return LoadedHypergraph(Hypergraph(len(tokens), edges, weights), list(tokens), dropped)


def parse_hypergraph(source) -> LoadedHypergraph:
    """Read a hypergraph file; node tokens are interned in order of appearance."""
    return parse_hypergraph_text(_read_text(source))


def format_hypergraph(h: Hypergraph, tokens: list[str] | None = None) -> str:
    tokens = tokens or [str(v) for v in range(h.n_nodes)]
    lines = []
    for e, w in zip(h.edges, h.edge_weights):
        line = " ".join(tokens[v] for v in e)
        if w != 1.0:
            line += f" # w={w!r}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def write_hypergraph(path, h: Hypergraph, tokens: list[str] | None = None) -> None:
    Path(path).write_text(format_hypergraph(h, tokens), encoding="utf-8")


def parse_labels(source) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(_read_text(source).splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise FormatError(f"line {lineno}: expected '<node> <label>'")
        if parts[0] in out:
            raise FormatError(f"line {lineno}: node {parts[0]!r} labeled twice")
        out[parts[0]] = parts[1]
    return out


def labels_for(tokens: list[str], labels: dict[str, str]) -> np.ndarray:
    """Label array aligned with ``tokens``; every token must be labeled."""
    missing = [t for t in tokens if t not in labels]
    if missing:
        raise FormatError(f"{len(missing)} node(s) without a label, e.g. {missing[0]!r}")
    return np.array([labels[t] for t in tokens])


def write_labels(path, tokens: list[str], labels: Iterable) -> None:
    Path(path).write_text("".join(f"{t} {l}\n" for t, l in zip(tokens, labels)), encoding="utf-8")


def load_zoo() -> tuple[LoadedHypergraph, np.ndarray]:
    """The bundled Zoo hypergraph and its animal-type labels."""
    data = resources.files("hyperricci") / "data"
    loaded = parse_hypergraph_text(data.joinpath("zoo.txt").read_text(encoding="utf-8"))
    labels = parse_labels_text(data.joinpath("zoo.labels").read_text(encoding="utf-8"))
    return loaded, labels_for(loaded.tokens, labels)


def parse_labels_text(text: str) -> dict[str, str]:
    return parse_labels(StringIO(text))


@dataclass
class ResultBundle:
    config: dict
    edge_weights: list[float]
    curve: list[dict]
    tau: float
    labels: dict[str, int]
    scores: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {"schema_version": self.schema_version, "config": self.config,
                "edge_weights": self.edge_weights, "curve": self.curve, "tau": self.tau,
                "labels": self.labels, "scores": self.scores, "timing": self.timing}

    @classmethod
    def from_dict(cls, d: dict) -> "ResultBundle":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise FormatError(f"unsupported schema version {d.get('schema_version')!r}")
        return cls(d["config"], d["edge_weights"], d["curve"], d["tau"], d["labels"],
                   d.get("scores", {}), d.get("timing", {}), d["schema_version"])

    def dumps(self) -> str:
        return json.dumps(_plain(self.to_dict()), indent=2, allow_nan=True)

    def save(self, path) -> None:
        Path(path).write_text(self.dumps() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "ResultBundle":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _plain(obj):
    # numpy scalars and arrays to builtins; float repr round-trips exactly
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def write_csv(path_or_file, fieldnames: list[str], rows: Iterable[dict]) -> None:
    def emit(f: TextIO):
        writer = csv.DictWriter(f, fieldnames=fieldnames, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})

    if hasattr(path_or_file, "write"):
        emit(path_or_file)
    else:
        with open(path_or_file, "w", newline="", encoding="utf-8") as f:
            emit(f)


def read_csv(path_or_file, types: dict[str, type] | None = None) -> list[dict]:
    types = types or {}

    def load(f: TextIO):
        return [{k: types.get(k, str)(v) for k, v in row.items()} for row in csv.DictReader(f)]

    if hasattr(path_or_file, "read"):
        return load(path_or_file)
    with open(path_or_file, newline="", encoding="utf-8") as f:
        return load(f)


__all__ = ["FormatError", "HypergraphError", "LoadedHypergraph", "ResultBundle",
           "format_hypergraph", "labels_for", "load_zoo", "parse_hypergraph",
           "parse_hypergraph_text", "parse_labels", "read_csv", "write_csv",
           "write_hypergraph", "write_labels"]
