"""Feature templates and predicate extraction.

A selection string such as ``"sbcprdk3"`` names the templates in use.
Lowercase codes produce position-and-value predicates (``"p-1=adjective"``)
that become one feature per observed (predicate, sense) pair.  Uppercase
codes produce grouped predicates (``"P-1=adjective"``) whose group key
(``"P-1"``) becomes one feature per sense, firing when the value belongs to
the bag of values seen with that sense during training.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .corpus import TrainingExample

CODES = "0spbckrdmLWSBCPDMK"
THRESHOLD_CODES = "kK"
OFFSETS = (-3, -2, -1, 1, 2, 3)
# collocation positions: two to the left, straddling the target, two to the right
PAIRS = ((-2, -1), (-1, 1), (1, 2))
BOUNDARY_LEFT = "<s>"
BOUNDARY_RIGHT = "</s>"


class SelectionError(ValueError):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} at position {position}")


@dataclass(frozen=True)
class Template:
    code: str
    threshold: int | None = None

    def __str__(self) -> str:
        return self.code if self.threshold is None else f"{self.code}{self.threshold}"

    @property
    def collapsed(self) -> bool:
        return self.code.isupper()


@dataclass(frozen=True)
class FeatureSelection:
    templates: tuple[Template, ...] = ()

    def __str__(self) -> str:
        return "".join(str(t) for t in self.templates)

    def __bool__(self) -> bool:
        return bool(self.templates)

    def codes(self) -> set[str]:
        return {t.code for t in self.templates}


def parse_selection(code: str) -> FeatureSelection:
    templates = []
    i = 0
    while i < len(code):
        ch = code[i]
        if ch not in CODES:
            raise SelectionError(f"unknown feature code {ch!r}", i)
        if ch in THRESHOLD_CODES:
            j = i + 1
            while j < len(code) and code[j].isdigit():
                j += 1
            if j == i + 1:
                raise SelectionError(f"code {ch!r} needs a percentage threshold", i)
            templates.append(Template(ch, int(code[i + 1:j])))
            i = j
        else:
            templates.append(Template(ch))
            i += 1
    out = FeatureSelection(tuple(templates))
    if str(out) != code:
        # e.g. "k03": the threshold would not render back the same way
        raise SelectionError("threshold must not have leading zeros", 0)
    return out


def render_selection(sel: FeatureSelection) -> str:
    return str(sel)


def _at(ex: TrainingExample, offset: int, attr: str) -> str:
    i = ex.target_index + offset
    if i < 0:
        return BOUNDARY_LEFT
    if i >= len(ex.tokens):
        return BOUNDARY_RIGHT
    return getattr(ex.tokens[i], attr)


def _off(n: int) -> str:
    return f"{n:+d}"


def keyword_prefix(t: Template) -> str:
    return f"{t.code}{t.threshold}"


def is_keyword(predicate: str) -> bool:
    return predicate[:1] in THRESHOLD_CODES and predicate[1:2].isdigit()


def split_predicate(predicate: str) -> tuple[str, str]:
    key, _, value = predicate.partition("=")
    return key, value


def context_nouns(ex: TrainingExample) -> set[str]:
    return {t.lemma.lower() for i, t in enumerate(ex.tokens)
            if t.is_noun and i != ex.target_index}


def _content_window(ex: TrainingExample, attr: str) -> Iterable[str]:
    for off in OFFSETS:
        i = ex.target_index + off
        if 0 <= i < len(ex.tokens) and ex.tokens[i].is_content:
            yield getattr(ex.tokens[i], attr)


def extract_features(ex: TrainingExample, sel: FeatureSelection) -> set[str]:
    """Active predicates of *ex* under *sel*.

    Keyword predicates (``k3=bank``) are emitted for every context noun;
    which of them become features is settled at training time.
    """
    preds: set[str] = set()
    for t in sel.templates:
        c = t.code
        low = c.lower()
        if c == "0":
            preds.add(f"0={ex.target.surface}")
        elif low in "sp":
            attr = "surface" if low == "s" else "pos"
            for off in OFFSETS:
                preds.add(f"{c}{_off(off)}={_at(ex, off, attr)}")
        elif low in "bc":
            attr = "lemma" if low == "b" else "surface"
            for a, b in PAIRS:
                preds.add(f"{c}{_off(a)}{_off(b)}={_at(ex, a, attr)} {_at(ex, b, attr)}")
        elif low == "k":
            prefix = keyword_prefix(t)
            preds.update(f"{prefix}={n}" for n in context_nouns(ex))
        elif c == "r":
            if ex.target.dep_rel is not None:
                preds.add(f"r={ex.target.dep_rel}")
        elif low == "d":
            head = ex.target.dep_head
            if head is not None:
                preds.add(f"{c}={ex.tokens[head].lemma}")
        elif low == "m":
            if ex.target.multiword:
                preds.add(f"{c}=1")
        elif c == "L":
            preds.update(f"L={w}" for w in _content_window(ex, "lemma"))
        elif c == "W":
            preds.update(f"W={w}" for w in _content_window(ex, "surface"))
    return preds
