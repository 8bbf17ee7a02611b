"""Annotated lexical-sample corpora.

File layout (UTF-8, tab separated)::

    EXAMPLE  id  target_lemma  pos  sense_label  target_index
    TOKEN    index  surface  lemma  pos_tag  dep_head|-  dep_rel|-  0|1
    ...
    END
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, TextIO


class CorpusError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class AnnotatedToken:
    surface: str
    lemma: str
    pos: str
    dep_head: int | None = None
    dep_rel: str | None = None
    multiword: bool = False

    @property
    def is_noun(self) -> bool:
        return self.pos[:1].upper() == "N"

    @property
    def is_content(self) -> bool:
        return self.pos[:1].upper() in "NVAJR" and bool(self.pos)


@dataclass(frozen=True)
class TrainingExample:
    id: str
    target_lemma: str
    target_pos: str
    sense: str
    tokens: tuple[AnnotatedToken, ...]
    target_index: int

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if not self.tokens:
            raise ValueError(f"example {self.id}: no tokens")
        if not 0 <= self.target_index < len(self.tokens):
            raise ValueError(f"example {self.id}: target index out of range")
        if self.tokens[self.target_index].lemma.lower() != self.target_lemma.lower():
            raise ValueError(f"example {self.id}: token {self.target_index} is not "
                             f"{self.target_lemma!r}")
        for i, tok in enumerate(self.tokens):
            if tok.dep_head is not None and not (0 <= tok.dep_head < len(self.tokens)
                                                 and tok.dep_head != i):
                raise ValueError(f"example {self.id}: bad dependency head on token {i}")

    @property
    def word(self) -> tuple[str, str]:
        return (self.target_lemma, self.target_pos)

    @property
    def target(self) -> AnnotatedToken:
        return self.tokens[self.target_index]

    def retarget(self, index: int, sense: str = "?") -> "TrainingExample":
        """The same sentence viewed as an instance of the word at *index*."""
        tok = self.tokens[index]
        return TrainingExample(f"{self.id}@{index}", tok.lemma, _coarse(tok.pos), sense,
                               self.tokens, index)


def _coarse(tag: str) -> str:
    first = tag[:1].upper()
    return {"J": "A"}.get(first, first) if first in "NVAJR" else tag


def _opt_int(text: str, lineno: int) -> int | None:
    if text == "-":
        return None
    try:
        return int(text)
    except ValueError:
        raise CorpusError(f"expected an integer or '-', got {text!r}", lineno) from None


def read_corpus(source: TextIO | str | Path) -> list[TrainingExample]:
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            return read_corpus(fh)
    return list(iter_corpus(source))


def iter_corpus(source: TextIO) -> Iterator[TrainingExample]:
    header = None
    tokens: list[AnnotatedToken] = []
    for lineno, raw in enumerate(source, 1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        kind = fields[0]
        if kind == "EXAMPLE":
            if header is not None:
                raise CorpusError("EXAMPLE before END of the previous example", lineno)
            if len(fields) != 6:
                raise CorpusError("EXAMPLE needs id, lemma, pos, sense, target index", lineno)
            target = _opt_int(fields[5], lineno)
            if target is None:
                raise CorpusError("missing target index", lineno)
            header = (lineno, fields[1], fields[2], fields[3], fields[4], target)
            tokens = []
        elif kind == "TOKEN":
            if header is None:
                raise CorpusError("TOKEN outside an example", lineno)
            if len(fields) != 8:
                raise CorpusError("TOKEN needs 7 fields", lineno)
            if _opt_int(fields[1], lineno) != len(tokens):
                raise CorpusError(f"expected token index {len(tokens)}", lineno)
            mw = fields[7].removeprefix("mw:")
            if mw not in ("0", "1"):
                raise CorpusError(f"multiword flag must be 0 or 1, got {fields[7]!r}", lineno)
            tokens.append(AnnotatedToken(fields[2], fields[3], fields[4],
                                         _opt_int(fields[5], lineno),
                                         None if fields[6] == "-" else fields[6],
                                         mw == "1"))
        elif kind == "END":
            if header is None:
                raise CorpusError("END outside an example", lineno)
            start, ex_id, lemma, pos, sense, target = header
            try:
                yield TrainingExample(ex_id, lemma, pos, sense, tuple(tokens), target)
            except ValueError as exc:
                raise CorpusError(str(exc), start) from None
            header = None
        else:
            raise CorpusError(f"unknown record type {kind!r}", lineno)
    if header is not None:
        raise CorpusError("unterminated example at end of file", header[0])


def write_corpus(examples: Iterable[TrainingExample], out: TextIO) -> None:
    for ex in examples:
        out.write(f"EXAMPLE\t{ex.id}\t{ex.target_lemma}\t{ex.target_pos}\t{ex.sense}\t"
                  f"{ex.target_index}\n")
        for i, t in enumerate(ex.tokens):
            head = "-" if t.dep_head is None else t.dep_head
            rel = "-" if t.dep_rel is None else t.dep_rel
            out.write(f"TOKEN\t{i}\t{t.surface}\t{t.lemma}\t{t.pos}\t{head}\t{rel}\t"
                      f"{int(t.multiword)}\n")
        out.write("END\n")


def group_by_word(examples: Iterable[TrainingExample]
                  ) -> dict[tuple[str, str], list[TrainingExample]]:
    out: dict[tuple[str, str], list[TrainingExample]] = {}
    for ex in examples:
        out.setdefault(ex.word, []).append(ex)
    return dict(sorted(out.items()))
