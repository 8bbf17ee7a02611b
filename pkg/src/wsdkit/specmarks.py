"""Specification Marks disambiguation of nouns plus the taxonomy/gloss heuristics.

A context is a bag of nouns.  Every sense of every noun contributes its
hypernym chains; each synset on a chain is a *specification mark* that
subsumes the context words having some sense below it.  Disambiguation
starts at the top marks and descends level by level while senses of the
target remain tied on the number of subsumed words.

Words that the marks cannot resolve are handed to heuristics, combined
either as a cascade (each heuristic sees only the surviving senses) or by
majority vote.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .lexkb import LexicalDb, SynsetId, normalize_lemma

ASSIGNED = "assigned"
REDUCED = "reduced"
UNASSIGNED = "unassigned"

NOUN = "N"


@dataclass(frozen=True)
class Context:
    """Ordered context nouns, one of which (``target``) is being disambiguated."""

    nouns: tuple[str, ...]
    target: int = 0

    def __post_init__(self):
        object.__setattr__(self, "nouns", tuple(normalize_lemma(n) for n in self.nouns))
        if not self.nouns:
            raise ValueError("empty context")
        if not 0 <= self.target < len(self.nouns):
            raise ValueError(f"target index {self.target} out of range")

    @property
    def target_lemma(self) -> str:
        return self.nouns[self.target]

    def lemmas(self) -> list[str]:
        """Distinct context lemmas in first-occurrence order."""
        return list(dict.fromkeys(self.nouns))

    def others(self, word: str | None = None) -> set[str]:
        word = normalize_lemma(word) if word is not None else self.target_lemma
        return {n for n in self.nouns if n != word}


def window(nouns: Sequence[str], target: int, policy: str | int = "whole") -> Context:
    """Cut a context around ``nouns[target]``.

    ``policy`` is ``"whole"`` (keep everything) or an odd noun count such
    as 15, meaning 7 nouns before and 7 after the target.
    """
    if policy in ("whole", None):
        return Context(tuple(nouns), target)
    size = int(policy)
    if size < 1:
        raise ValueError("window size must be positive")
    half = (size - 1) // 2
    lo = max(0, target - half)
    hi = min(len(nouns), target + half + 1)
    return Context(tuple(nouns[lo:hi]), target - lo)


@dataclass(frozen=True)
class SenseAssignment:
    word: str
    outcome: str
    senses: tuple[SynsetId, ...] = ()
    source: str = ""
    score: float = 0.0
    mark: SynsetId | None = None
    weights: Mapping[SynsetId, float] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        n = len(self.senses)
        if self.outcome == ASSIGNED and n != 1:
            raise ValueError("an assigned outcome carries exactly one sense")
        if self.outcome == REDUCED and n < 2:
            raise ValueError("a reduced outcome carries at least two senses")
        if self.outcome == UNASSIGNED and n:
            raise ValueError("an unassigned outcome carries no senses")

    @classmethod
    def assign(cls, word, sense, source, score=0.0, **kw) -> "SenseAssignment":
        return cls(word, ASSIGNED, (sense,), source, float(score), **kw)

    @classmethod
    def reduce(cls, word, senses, source, score=0.0, **kw) -> "SenseAssignment":
        senses = tuple(senses)
        if len(senses) == 1:
            return cls.assign(word, senses[0], source, score, **kw)
        return cls(word, REDUCED, senses, source, float(score), **kw)

    @classmethod
    def none(cls, word, source, **kw) -> "SenseAssignment":
        return cls(word, UNASSIGNED, (), source, 0.0, **kw)

    @property
    def assigned(self) -> bool:
        return self.outcome == ASSIGNED

    @property
    def reduced(self) -> bool:
        return self.outcome == REDUCED

    @property
    def unassigned(self) -> bool:
        return self.outcome == UNASSIGNED

    @property
    def sense(self) -> SynsetId | None:
        return self.senses[0] if self.assigned else None


# --------------------------------------------------------------------------
# mark table and the core algorithm


@dataclass
class MarkTable:
    """mark -> sense -> distinct context lemmas the mark subsumes.

    Only (mark, sense) pairs where the mark lies on one of the sense's
    chains are stored; elsewhere a sense subsumes just its own word.
    """

    entries: dict[SynsetId, dict[SynsetId, frozenset[str]]]
    owners: dict[SynsetId, str]

    def subsumed(self, mark: SynsetId, sense: SynsetId) -> frozenset[str]:
        found = self.entries.get(mark, {}).get(sense)
        if found is not None:
            return found
        owner = self.owners.get(sense)
        return frozenset([owner]) if owner is not None else frozenset()

    def count(self, mark: SynsetId, sense: SynsetId) -> int:
        return len(self.subsumed(mark, sense))


def _allowed_senses(ctx: Context, db: LexicalDb,
                    fixed: Mapping[int, SynsetId] | None) -> dict[str, list[SynsetId]]:
    fixed = fixed or {}
    if ctx.target in fixed:
        raise ValueError("the target word cannot be fixed")
    positions: dict[str, list[int]] = defaultdict(list)
    for i, lemma in enumerate(ctx.nouns):
        positions[lemma].append(i)
    allowed = {}
    for lemma, where in positions.items():
        senses = db.senses(lemma, NOUN)
        if where and all(i in fixed for i in where):
            pinned = {fixed[i] for i in where}
            bad = pinned.difference(senses)
            if bad:
                raise ValueError(f"{sorted(map(str, bad))} are not senses of {lemma!r}")
            senses = [s for s in senses if s in pinned]
        allowed[lemma] = senses
    return allowed


def build_mark_table(ctx: Context, db: LexicalDb,
                     fixed: Mapping[int, SynsetId] | None = None) -> MarkTable:
    allowed = _allowed_senses(ctx, db, fixed)
    under: dict[SynsetId, set[str]] = defaultdict(set)
    on_chain: dict[SynsetId, set[SynsetId]] = defaultdict(set)
    owners: dict[SynsetId, str] = {}
    for lemma, senses in allowed.items():
        for s in senses:
            owners.setdefault(s, lemma)
            for chain in db.hypernym_chains(s):
                for mark in chain:
                    under[mark].add(lemma)
                    on_chain[mark].add(s)
    entries = {}
    for mark, senses in on_chain.items():
        lemmas = frozenset(under[mark])
        entries[mark] = {s: lemmas for s in senses}
    # the target keeps its own senses even when it shares a synset with a fixed noun
    for s in db.senses(ctx.target_lemma, NOUN):
        owners[s] = ctx.target_lemma
    return MarkTable(entries, owners)


def specification_marks(ctx: Context, db: LexicalDb,
                        fixed: Mapping[int, SynsetId] | None = None) -> SenseAssignment:
    """Disambiguate ``ctx``'s target noun by descending specification marks."""
    word = ctx.target_lemma
    senses = db.senses(word, NOUN)
    if not senses:
        return SenseAssignment.none(word, "oov")
    table = build_mark_table(ctx, db, fixed)
    # one walker per (sense, chain); chains are read top-down
    alive = [(s, chain[::-1]) for s in senses for chain in db.hypernym_chains(s)]
    level = 0
    while True:
        scored = [(table.count(chain[level], s), s, chain) for s, chain in alive]
        best = max(c for c, _, _ in scored)
        winners = [(s, chain) for c, s, chain in scored if c == best]
        tied = {s for s, _ in winners}
        if len(tied) == 1:
            s, chain = min(winners, key=lambda w: w[1])
            return SenseAssignment.assign(word, s, "specification-marks", best,
                                          mark=chain[level])
        if any(len(chain) == level + 1 for _, chain in winners):
            return SenseAssignment.none(word, "specification-marks")
        alive = winners
        level += 1


# --------------------------------------------------------------------------
# heuristics


def _ranked(word: str, db: LexicalDb, candidates: Iterable[SynsetId] | None) -> list[SynsetId]:
    senses = db.senses(word, NOUN)
    if candidates is not None:
        keep = set(candidates)
        senses = [s for s in senses if s in keep]
    return senses


def _decide(word: str, weights: dict[SynsetId, Fraction | int], source: str,
            ranked: list[SynsetId]) -> SenseAssignment:
    as_float = {s: float(w) for s, w in weights.items()}
    if not weights:
        return SenseAssignment.none(word, source, weights=as_float)
    best = max(weights.values())
    if best <= 0:
        return SenseAssignment.none(word, source, weights=as_float)
    top = [s for s in ranked if weights.get(s, 0) == best]
    return SenseAssignment.reduce(word, top, source, float(best), weights=as_float)


def _matches(lemmas: Iterable[str], context: set[str]) -> bool:
    for lemma in lemmas:
        if lemma in context:
            return True
        if any(part in context for part in lemma.split()):
            return True
    return False


def heuristic_hypernym(word: str, ctx: Context, db: LexicalDb, direction: str = "up",
                       candidates: Iterable[SynsetId] | None = None) -> SenseAssignment:
    """Weight senses by depth-scaled matches of context words in their taxonomy.

    Upwards, a chain of L synsets numbers its levels 1 (root) .. L (the
    sense) and every synset whose lemmas match a context word adds
    level/L; a sense keeps its best chain.  Downwards, the sense is level
    1 and its deepest hyponym level D+1.
    """
    word = normalize_lemma(word)
    context = ctx.others(word)
    ranked = _ranked(word, db, candidates)
    weights: dict[SynsetId, Fraction] = {}
    for s in ranked:
        if direction == "up":
            best = Fraction(0)
            for chain in db.hypernym_chains(s):
                total = len(chain)
                w = sum((Fraction(total - i, total) for i, node in enumerate(chain)
                         if _matches(db[node].lemmas, context)), Fraction(0))
                best = max(best, w)
            weights[s] = best
        elif direction == "down":
            nodes = db.hyponym_descendants(s)
            total = max(d for d, _ in nodes) + 1
            weights[s] = sum((Fraction(d + 1, total) for d, node in nodes
                              if _matches(db[node].lemmas, context)), Fraction(0))
        else:
            raise ValueError(f"direction must be 'up' or 'down', not {direction!r}")
    source = "hypernym" if direction == "up" else "hyponym"
    return _decide(word, weights, source, ranked)


def _gloss_hits(db: LexicalDb, sid: SynsetId, context: set[str]) -> int:
    return len(context.intersection(db.gloss_tokens(sid)))


def heuristic_definition(word: str, ctx: Context, db: LexicalDb,
                         candidates: Iterable[SynsetId] | None = None) -> SenseAssignment:
    """One point per context word found in the sense's own gloss."""
    word = normalize_lemma(word)
    context = ctx.others(word)
    ranked = _ranked(word, db, candidates)
    weights = {s: _gloss_hits(db, s, context) for s in ranked}
    return _decide(word, weights, "definition", ranked)


def heuristic_gloss_hyper(word: str, ctx: Context, db: LexicalDb, direction: str = "up",
                          candidates: Iterable[SynsetId] | None = None) -> SenseAssignment:
    """Like the definition heuristic, summed over the glosses of the chains
    (up) or of the hyponym subtree (down)."""
    word = normalize_lemma(word)
    context = ctx.others(word)
    ranked = _ranked(word, db, candidates)
    weights = {}
    for s in ranked:
        if direction == "up":
            nodes = {n for chain in db.hypernym_chains(s) for n in chain}
        elif direction == "down":
            nodes = {n for _, n in db.hyponym_descendants(s)}
        else:
            raise ValueError(f"direction must be 'up' or 'down', not {direction!r}")
        weights[s] = sum(_gloss_hits(db, n, context) for n in nodes)
    source = "gloss-hypernym" if direction == "up" else "gloss-hyponym"
    return _decide(word, weights, source, ranked)


def heuristic_common_mark(word: str, ctx: Context, db: LexicalDb,
                          candidates: Iterable[SynsetId] | None = None) -> SenseAssignment:
    """Keep the senses passing through the most specific mark shared by all
    context nouns; usually a reduction rather than a full assignment."""
    word = normalize_lemma(word)
    ranked = _ranked(word, db, candidates)
    known = [l for l in ctx.lemmas() if db.senses(l, NOUN)]
    if len(known) < 2 or word not in known or not ranked:
        return SenseAssignment.none(word, "common-mark")
    depth: dict[SynsetId, int] = {}
    common: set[SynsetId] | None = None
    for lemma in known:
        marks = set()
        for s in db.senses(lemma, NOUN):
            for chain in db.hypernym_chains(s):
                for d, m in enumerate(reversed(chain)):
                    marks.add(m)
                    depth[m] = max(depth.get(m, 0), d)
        common = marks if common is None else common & marks
    if not common:
        return SenseAssignment.none(word, "common-mark")
    deepest = max(depth[m] for m in common)
    marks = {m for m in common if depth[m] == deepest}
    chosen = [s for s in ranked
              if any(marks.intersection(chain) for chain in db.hypernym_chains(s))]
    if not chosen:
        return SenseAssignment.none(word, "common-mark")
    return SenseAssignment.reduce(word, chosen, "common-mark", deepest, mark=min(marks))


def _domain(word, ctx, db, candidates=None, lex=None):
    from .domains import domain_disambiguate
    if lex is None:
        raise ValueError("the domain heuristic needs a DomainLexicon")
    return domain_disambiguate(word, ctx, db, lex, candidates=candidates)


HEURISTICS: dict[str, Callable[..., SenseAssignment]] = {
    "hypernym": lambda w, c, db, candidates=None, lex=None:
        heuristic_hypernym(w, c, db, "up", candidates),
    "definition": lambda w, c, db, candidates=None, lex=None:
        heuristic_definition(w, c, db, candidates),
    "hyponym": lambda w, c, db, candidates=None, lex=None:
        heuristic_hypernym(w, c, db, "down", candidates),
    "gloss-hypernym": lambda w, c, db, candidates=None, lex=None:
        heuristic_gloss_hyper(w, c, db, "up", candidates),
    "gloss-hyponym": lambda w, c, db, candidates=None, lex=None:
        heuristic_gloss_hyper(w, c, db, "down", candidates),
    "common-mark": lambda w, c, db, candidates=None, lex=None:
        heuristic_common_mark(w, c, db, candidates),
    "domain": _domain,
}

DEFAULT_ORDER = ("hypernym", "definition", "hyponym", "gloss-hypernym",
                 "gloss-hyponym", "common-mark", "domain")


def _check_order(order: Sequence[str]) -> None:
    if not order:
        raise ValueError("heuristic order must not be empty")
    unknown = [h for h in order if h not in HEURISTICS]
    if unknown:
        raise ValueError(f"unknown heuristics: {', '.join(unknown)}")


def cascade(word: str, ctx: Context, db: LexicalDb, order: Sequence[str] = DEFAULT_ORDER,
            lex=None, fixed: Mapping[int, SynsetId] | None = None) -> SenseAssignment:
    """Specification marks first, then each heuristic on what is still ambiguous."""
    _check_order(order)
    word = normalize_lemma(word)
    if word != ctx.target_lemma:
        raise ValueError(f"{word!r} is not the context target")
    sm = specification_marks(ctx, db, fixed)
    if sm.assigned or sm.source == "oov":
        return sm
    surviving = db.senses(word, NOUN)
    narrowed: SenseAssignment | None = None
    for label in order:
        result = HEURISTICS[label](word, ctx, db, candidates=surviving, lex=lex)
        if result.assigned:
            return result
        if result.reduced and len(result.senses) < len(surviving):
            surviving = list(result.senses)
            narrowed = result
    return narrowed if narrowed is not None else SenseAssignment.none(word, "cascade")


def independent(word: str, ctx: Context, db: LexicalDb, order: Sequence[str] = DEFAULT_ORDER,
                lex=None, fixed: Mapping[int, SynsetId] | None = None) -> list[SenseAssignment]:
    """Specification marks and every heuristic, each run on the full sense set."""
    _check_order(order)
    word = normalize_lemma(word)
    out = [specification_marks(ctx, db, fixed)]
    out.extend(HEURISTICS[label](word, ctx, db, lex=lex) for label in order)
    return out


def vote(assignments: Sequence[SenseAssignment], db: LexicalDb,
         word: str | None = None, pos: str = NOUN) -> SenseAssignment:
    """Plurality vote; a reduced outcome splits one vote over its senses.

    Ties go to the better-ranked sense.  With no votes at all the first
    (most frequent) sense is returned so that coverage stays complete.
    """
    words = {a.word for a in assignments}
    if word is not None:
        words.add(normalize_lemma(word))
    if len(words) != 1:
        raise ValueError(f"assignments concern different words: {sorted(words)}")
    (word,) = words
    tally: dict[SynsetId, Fraction] = defaultdict(Fraction)
    for a in assignments:
        for s in a.senses:
            tally[s] += Fraction(1, len(a.senses))
    senses = db.senses(word, pos)
    if not tally:
        if not senses:
            return SenseAssignment.none(word, "vote")
        return SenseAssignment.assign(word, senses[0], "mfs-fallback", 0.0)
    best = max(tally.values())
    tied = [s for s, v in tally.items() if v == best]
    winner = min(tied, key=lambda s: (db.sense_rank(word, pos, s), s))
    return SenseAssignment.assign(word, winner, "vote", float(best),
                                  weights={s: float(v) for s, v in tally.items()})
