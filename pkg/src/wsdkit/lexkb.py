"""WordNet-style lexical knowledge base: loading, validation and traversal.

The lexicon is read from a portable tab-separated text format::

    SYNSET  pos  key  lemma1,lemma2,...  gloss text
    REL     hypernym  src_pos:src_key  dst_pos:dst_key
    DOMAIN  pos:key  label
    INDEX   lemma  pos  key1,key2,...        (sense-frequency order)

Lines starting with ``#`` are comments.  References may point forward;
everything is validated once the whole stream has been read.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, TextIO

POS_TAGS = ("N", "V", "A", "R")

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


class LexiconError(ValueError):
    """Raised when a lexicon stream cannot be turned into a valid LexicalDb."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DanglingReferenceError(LexiconError):
    pass


class HypernymCycleError(LexiconError):
    def __init__(self, cycle: list["SynsetId"]):
        self.cycle = cycle
        super().__init__("hypernym cycle: " + " -> ".join(str(s) for s in cycle))


@dataclass(frozen=True, order=True)
class SynsetId:
    pos: str
    key: str

    def __str__(self) -> str:
        return f"{self.pos}:{self.key}"

    @classmethod
    def parse(cls, text: str) -> "SynsetId":
        pos, sep, key = text.partition(":")
        if not sep or pos not in POS_TAGS or not key:
            raise ValueError(f"bad synset reference {text!r}")
        return cls(pos, key)


@dataclass(frozen=True)
class Synset:
    id: SynsetId
    lemmas: tuple[str, ...]
    gloss: str = ""
    hypernyms: tuple[SynsetId, ...] = ()
    hyponyms: tuple[SynsetId, ...] = ()
    domains: tuple[str, ...] = ()

    @property
    def pos(self) -> str:
        return self.id.pos


def normalize_lemma(lemma: str) -> str:
    return " ".join(lemma.replace("_", " ").lower().split())


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Read a one-word-per-line stop-list; the bundled default when *path* is None."""
    if path is None:
        text = resources.files("wsdkit.data").joinpath("stopwords.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    words = (line.strip().lower() for line in text.splitlines())
    return frozenset(w for w in words if w and not w.startswith("#"))


def tokenize(text: str, stopwords: Iterable[str] = ()) -> list[str]:
    """Lowercase alphanumeric tokens of length >= 2, stop-words removed."""
    stop = stopwords if isinstance(stopwords, (set, frozenset)) else set(stopwords)
    return [t for t in (m.group().lower() for m in _TOKEN_RE.finditer(text))
            if len(t) >= 2 and t not in stop]


@dataclass
class LexicalDb:
    """Indexed, immutable-after-load collection of synsets."""

    synsets: dict[SynsetId, Synset] = field(default_factory=dict)
    index: dict[tuple[str, str], tuple[SynsetId, ...]] = field(default_factory=dict)
    stopwords: frozenset[str] = field(default_factory=load_stopwords)

    def __post_init__(self):
        self._chains: dict[SynsetId, tuple[tuple[SynsetId, ...], ...]] = {}
        self._gloss_tokens: dict[SynsetId, tuple[str, ...]] = {}

    def __len__(self) -> int:
        return len(self.synsets)

    def __contains__(self, sid: SynsetId) -> bool:
        return sid in self.synsets

    def __getitem__(self, sid: SynsetId) -> Synset:
        try:
            return self.synsets[sid]
        except KeyError:
            raise KeyError(f"unknown synset {sid}") from None

    def senses(self, lemma: str, pos: str = "N") -> list[SynsetId]:
        """Senses of *lemma* in frequency order (rank 1 first); [] if unknown."""
        return list(self.index.get((normalize_lemma(lemma), pos), ()))

    def sense_rank(self, lemma: str, pos: str, sid: SynsetId) -> int:
        """1-based rank of *sid* among the senses of *lemma*; large if absent."""
        ranked = self.index.get((normalize_lemma(lemma), pos), ())
        try:
            return ranked.index(sid) + 1
        except ValueError:
            return len(ranked) + 1

    def hypernym_chains(self, sid: SynsetId) -> list[tuple[SynsetId, ...]]:
        """Every path from *sid* up to a root, *sid* first.

        Multiple hypernyms fork the walk, so a node of the DAG yields one
        chain per distinct root path.
        """
        self[sid]
        return list(self._chains_of(sid))

    def _chains_of(self, sid: SynsetId) -> tuple[tuple[SynsetId, ...], ...]:
        cached = self._chains.get(sid)
        if cached is not None:
            return cached
        parents = self.synsets[sid].hypernyms
        if not parents:
            chains = ((sid,),)
        else:
            chains = tuple((sid,) + up for p in parents for up in self._chains_of(p))
        self._chains[sid] = chains
        return chains

    def hyponym_descendants(self, sid: SynsetId,
                            max_depth: int | None = None) -> list[tuple[int, SynsetId]]:
        """Preorder walk of the subhierarchy under *sid* as (depth, id) pairs.

        Children are visited in SynsetId order and each node only once
        (at its first preorder visit).
        """
        self[sid]
        if max_depth is not None and max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        out: list[tuple[int, SynsetId]] = []
        seen: set[SynsetId] = set()
        stack = [(0, sid)]
        while stack:
            depth, node = stack.pop()
            if node in seen:
                continue
            seen.add(node)
            out.append((depth, node))
            if max_depth is not None and depth >= max_depth:
                continue
            for child in sorted(self.synsets[node].hyponyms, reverse=True):
                if child not in seen:
                    stack.append((depth + 1, child))
        return out

    def gloss_tokens(self, sid: SynsetId) -> list[str]:
        cached = self._gloss_tokens.get(sid)
        if cached is None:
            cached = tuple(tokenize(self[sid].gloss, self.stopwords))
            self._gloss_tokens[sid] = cached
        return list(cached)

    def roots(self, pos: str | None = None) -> list[SynsetId]:
        return sorted(s.id for s in self.synsets.values()
                      if not s.hypernyms and (pos is None or s.pos == pos))

    def dump(self, out: TextIO) -> None:
        """Write the db in the lexicon file format (reloads to an equal db)."""
        for sid in sorted(self.synsets):
            s = self.synsets[sid]
            out.write(f"SYNSET\t{sid.pos}\t{sid.key}\t{','.join(s.lemmas)}\t{s.gloss}\n")
        for sid in sorted(self.synsets):
            for h in self.synsets[sid].hypernyms:
                out.write(f"REL\thypernym\t{sid}\t{h}\n")
        for sid in sorted(self.synsets):
            for label in self.synsets[sid].domains:
                out.write(f"DOMAIN\t{sid}\t{label}\n")
        for (lemma, pos), ids in self.index.items():
            out.write(f"INDEX\t{lemma}\t{pos}\t{','.join(i.key for i in ids)}\n")

    def dumps(self) -> str:
        buf = io.StringIO()
        self.dump(buf)
        return buf.getvalue()


def _records(source: TextIO) -> Iterator[tuple[int, list[str]]]:
    for lineno, raw in enumerate(source, 1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        yield lineno, line.split("\t")


def load_lexicon(source: TextIO | str | Path,
                 stopwords: Iterable[str] | None = None) -> LexicalDb:
    """Parse a lexicon stream (or path) into a validated LexicalDb."""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            return load_lexicon(fh, stopwords)

    synsets: dict[SynsetId, dict] = {}
    rels: list[tuple[int, SynsetId, SynsetId]] = []
    doms: list[tuple[int, SynsetId, str]] = []
    idx: list[tuple[int, str, str, list[str]]] = []

    def ref(text: str, lineno: int) -> SynsetId:
        try:
            return SynsetId.parse(text)
        except ValueError as exc:
            raise LexiconError(str(exc), lineno) from None

    for lineno, fields in _records(source):
        kind = fields[0]
        if kind == "SYNSET":
            if len(fields) < 4 or len(fields) > 5:
                raise LexiconError("SYNSET needs pos, key, lemmas[, gloss]", lineno)
            pos, key, lemmas = fields[1], fields[2], fields[3]
            if pos not in POS_TAGS or not key:
                raise LexiconError(f"bad synset id {pos}:{key}", lineno)
            names = tuple(normalize_lemma(l) for l in lemmas.split(",") if l.strip())
            if not names:
                raise LexiconError("synset without lemmas", lineno)
            sid = SynsetId(pos, key)
            if sid in synsets:
                raise LexiconError(f"duplicate synset {sid}", lineno)
            synsets[sid] = dict(lemmas=names, gloss=fields[4] if len(fields) == 5 else "",
                                hypernyms=[], hyponyms=[], domains=[], line=lineno)
        elif kind == "REL":
            if len(fields) != 4:
                raise LexiconError("REL needs relation, source, target", lineno)
            if fields[1] != "hypernym":
                raise LexiconError(f"unsupported relation {fields[1]!r}", lineno)
            rels.append((lineno, ref(fields[2], lineno), ref(fields[3], lineno)))
        elif kind == "DOMAIN":
            if len(fields) != 3 or not fields[2]:
                raise LexiconError("DOMAIN needs synset and label", lineno)
            doms.append((lineno, ref(fields[1], lineno), fields[2]))
        elif kind == "INDEX":
            if len(fields) != 4 or fields[2] not in POS_TAGS:
                raise LexiconError("INDEX needs lemma, pos, keys", lineno)
            keys = [k for k in fields[3].split(",") if k]
            idx.append((lineno, normalize_lemma(fields[1]), fields[2], keys))
        else:
            raise LexiconError(f"unknown record type {kind!r}", lineno)

    for lineno, src, dst in rels:
        for end in (src, dst):
            if end not in synsets:
                raise DanglingReferenceError(f"unknown synset {end}", lineno)
        if dst not in synsets[src]["hypernyms"]:
            synsets[src]["hypernyms"].append(dst)
            synsets[dst]["hyponyms"].append(src)
    for lineno, sid, label in doms:
        if sid not in synsets:
            raise DanglingReferenceError(f"unknown synset {sid}", lineno)
        if label not in synsets[sid]["domains"]:
            synsets[sid]["domains"].append(label)

    index: dict[tuple[str, str], list[SynsetId]] = {}
    for lineno, lemma, pos, keys in idx:
        if (lemma, pos) in index:
            raise LexiconError(f"duplicate INDEX entry for {lemma}/{pos}", lineno)
        ids = []
        for key in keys:
            sid = SynsetId(pos, key)
            if sid not in synsets:
                raise DanglingReferenceError(f"unknown synset {sid}", lineno)
            if lemma not in synsets[sid]["lemmas"]:
                raise LexiconError(f"{sid} does not contain lemma {lemma!r}", lineno)
            if sid in ids:
                raise LexiconError(f"{sid} listed twice for {lemma!r}", lineno)
            ids.append(sid)
        index[(lemma, pos)] = ids
    # lemmas never mentioned by INDEX still get an entry, in file order
    for sid, rec in sorted(synsets.items(), key=lambda kv: kv[1]["line"]):
        for lemma in rec["lemmas"]:
            ids = index.setdefault((lemma, sid.pos), [])
            if sid not in ids:
                ids.append(sid)

    db = LexicalDb(
        synsets={sid: Synset(sid, rec["lemmas"], rec["gloss"], tuple(rec["hypernyms"]),
                             tuple(sorted(rec["hyponyms"])), tuple(rec["domains"]))
                 for sid, rec in synsets.items()},
        index={k: tuple(v) for k, v in index.items()},
        stopwords=frozenset(stopwords) if stopwords is not None else load_stopwords(),
    )
    _check_acyclic(db)
    return db


def _check_acyclic(db: LexicalDb) -> None:
    WHITE, GREY, BLACK = 0, 1, 2
    color = dict.fromkeys(db.synsets, WHITE)
    for start in sorted(db.synsets):
        if color[start] != WHITE:
            continue
        # iterative DFS keeping the current path for cycle reporting
        path = [start]
        iters = [iter(db.synsets[start].hypernyms)]
        color[start] = GREY
        while iters:
            nxt = next(iters[-1], None)
            if nxt is None:
                color[path.pop()] = BLACK
                iters.pop()
            elif color[nxt] == GREY:
                cycle = path[path.index(nxt):] + [nxt]
                raise HypernymCycleError(cycle)
            elif color[nxt] == WHITE:
                color[nxt] = GREY
                path.append(nxt)
                iters.append(iter(db.synsets[nxt].hypernyms))


@lru_cache(maxsize=None)
def fixture(name: str) -> LexicalDb:
    """Load one of the bundled hand-built lexicons (``plant``, ``sister``...)."""
    with resources.files("wsdkit.data").joinpath(f"{name}.lex").open(encoding="utf-8") as fh:
        return load_lexicon(fh)


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("wsdkit.data").joinpath(name)))
