"""Relevant-domains lexicon and domain-vector disambiguation.

Glosses of domain-labelled synsets are treated as a labelled corpus.  Each
word gets an Association Ratio per domain,

    AR(w, D) = P(w|D) * log(P(w|D) / P(w)),

and the positive ones form its weighted domain list.  Summing the lists
of a set of words gives a domain vector; a target sense is chosen by the
cosine between its gloss vector and the context vector.
"""

from __future__ import annotations

import math
import warnings
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, TextIO

from .lexkb import LexicalDb, SynsetId, normalize_lemma
from .specmarks import NOUN, Context, SenseAssignment

DEFAULT_TOP_K = 8


@dataclass
class DomainLexicon:
    entries: dict[str, tuple[tuple[str, float], ...]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, word: str) -> bool:
        return normalize_lemma(word) in self.entries

    def get(self, word: str, top_k: int | None = None) -> tuple[tuple[str, float], ...]:
        found = self.entries.get(normalize_lemma(word), ())
        return found if top_k is None else found[:top_k]

    def scaled(self, factor: float) -> "DomainLexicon":
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return DomainLexicon({w: tuple((d, v * factor) for d, v in lst)
                              for w, lst in self.entries.items()})

    def dump(self, out: TextIO) -> None:
        for word in sorted(self.entries):
            for label, weight in self.entries[word]:
                out.write(f"DOM\t{word}\t{label}\t{weight:.17g}\n")

    @classmethod
    def load(cls, source: TextIO) -> "DomainLexicon":
        raw: dict[str, list[tuple[str, float]]] = defaultdict(list)
        for lineno, line in enumerate(source, 1):
            line = line.rstrip("\r\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 4 or fields[0] != "DOM":
                raise ValueError(f"line {lineno}: expected DOM<TAB>lemma<TAB>label<TAB>weight")
            try:
                weight = float(fields[3])
            except ValueError:
                raise ValueError(f"line {lineno}: bad weight {fields[3]!r}") from None
            if not math.isfinite(weight) or weight <= 0:
                raise ValueError(f"line {lineno}: weights must be finite and positive")
            raw[normalize_lemma(fields[1])].append((fields[2], weight))
        return cls({w: _ordered(lst) for w, lst in raw.items()})


def _ordered(pairs: Iterable[tuple[str, float]]) -> tuple[tuple[str, float], ...]:
    return tuple(sorted(pairs, key=lambda p: (-p[1], p[0])))


def domain_probabilities(db: LexicalDb, blacklist: Iterable[str] = ()
                         ) -> tuple[dict[str, dict[str, float]], dict[str, float]]:
    """Maximum-likelihood P(w|D) per domain and P(w) over all labelled glosses.

    A gloss carrying several labels counts once towards P(w) and once
    towards each of its labels.
    """
    banned = set(blacklist)
    by_domain: dict[str, Counter] = defaultdict(Counter)
    overall: Counter = Counter()
    for sid in sorted(db.synsets):
        labels = [d for d in db.synsets[sid].domains if d not in banned]
        tokens = db.gloss_tokens(sid)
        if not labels or not tokens:
            continue
        overall.update(tokens)
        for label in labels:
            by_domain[label].update(tokens)
    total = sum(overall.values())
    p_w = {w: c / total for w, c in overall.items()}
    p_w_d = {}
    for label, counts in by_domain.items():
        n = sum(counts.values())
        p_w_d[label] = {w: c / n for w, c in counts.items()}
    return p_w_d, p_w


def association_ratio(p_w_given_d: float, p_w: float) -> float:
    return p_w_given_d * math.log(p_w_given_d / p_w)


def build_relevant_domains(db: LexicalDb, blacklist: Iterable[str] = ()) -> DomainLexicon:
    p_w_d, p_w = domain_probabilities(db, blacklist)
    if not p_w_d:
        warnings.warn("no domain-labelled glosses; the domain lexicon is empty")
        return DomainLexicon()
    lists: dict[str, list[tuple[str, float]]] = defaultdict(list)
    for label, dist in p_w_d.items():
        for word, p in dist.items():
            ar = association_ratio(p, p_w[word])
            if ar > 0:
                lists[word].append((label, ar))
    return DomainLexicon({w: _ordered(lst) for w, lst in lists.items()})


@dataclass(frozen=True)
class DomainVector:
    components: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "components",
                           {k: v for k, v in self.components.items() if v != 0})

    def __bool__(self) -> bool:
        return bool(self.components)

    def norm(self) -> float:
        return math.sqrt(sum(v * v for v in self.components.values()))

    def top(self, n: int = 3) -> list[str]:
        ranked = sorted(self.components.items(), key=lambda kv: (-kv[1], kv[0]))
        return [label for label, _ in ranked[:n]]


def context_vector(words: Iterable[str], lex: DomainLexicon,
                   top_k: int = DEFAULT_TOP_K) -> DomainVector:
    acc: dict[str, float] = defaultdict(float)
    for word in words:
        for label, weight in lex.get(word, top_k):
            acc[label] += weight
    return DomainVector(dict(acc))


def sense_vector(sid: SynsetId, db: LexicalDb, lex: DomainLexicon,
                 top_k: int = DEFAULT_TOP_K) -> DomainVector:
    return context_vector(db.gloss_tokens(sid), lex, top_k)


def cosine(a: DomainVector, b: DomainVector) -> float:
    na, nb = a.norm(), b.norm()
    if na == 0 or nb == 0:
        return 0.0
    dot = sum(v * b.components.get(k, 0.0) for k, v in a.components.items())
    return min(1.0, max(0.0, dot / (na * nb)))


def domain_disambiguate(word: str, ctx: Context, db: LexicalDb, lex: DomainLexicon,
                        candidates: Iterable[SynsetId] | None = None,
                        top_k: int = DEFAULT_TOP_K, pos: str = NOUN) -> SenseAssignment:
    """Pick the sense whose gloss vector is closest (cosine) to the context vector.

    The target word itself is left out of the context vector since it
    pulls towards every one of its senses alike.
    """
    word = normalize_lemma(word)
    senses = db.senses(word, pos)
    if candidates is not None:
        keep = set(candidates)
        senses = [s for s in senses if s in keep]
    cv = context_vector([n for n in ctx.nouns if n != word], lex, top_k)
    scores = {s: cosine(sense_vector(s, db, lex, top_k), cv) for s in senses}
    if not scores or max(scores.values()) <= 0:
        return SenseAssignment.none(word, "domain", weights=scores)
    best = max(scores.values())
    top = [s for s in senses if math.isclose(scores[s], best, rel_tol=1e-12)]
    return SenseAssignment.reduce(word, top, "domain", best, weights=scores)


def word_domain_labels(word: str, ctx: Context, db: LexicalDb, lex: DomainLexicon,
                       top_k: int = DEFAULT_TOP_K, pos: str = NOUN
                       ) -> tuple[list[str], list[str]]:
    """Domain labels of the sense the domain heuristic picks for *word*, and
    the three heaviest domains of the whole context.

    A reduced outcome contributes the union of its senses' labels.
    """
    result = domain_disambiguate(word, ctx, db, lex, top_k=top_k, pos=pos)
    labels = sorted({d for s in result.senses for d in db[s].domains})
    top3 = context_vector(ctx.nouns, lex, top_k).top(3)
    return labels, top3
