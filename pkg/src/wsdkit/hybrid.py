"""Combinations of the knowledge-based and the supervised disambiguators.

* ME pre-labelling: confident ME classifiers fix the senses of some
  context nouns, and Specification Marks then only consider those senses.
* Domain features: domain labels of neighbouring nouns and of the whole
  context become extra ME predicates.
* vME+SM: plurality vote of three ME systems plus Specification Marks.
"""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .domains import DomainLexicon, context_vector, word_domain_labels
from .lexkb import LexicalDb, SynsetId, normalize_lemma
from .maxent.corpus import TrainingExample
from .maxent.features import OFFSETS, FeatureSelection, parse_selection
from .maxent.model import DEFAULT_MAX_ITERS, DEFAULT_TOL, Classifier, Prediction, classify, train
from .maxent.selection import SYSTEM_PRIORITY, plurality
from .specmarks import NOUN, Context, SenseAssignment, specification_marks

# "0" plus the lowercase set listed alongside it for the domain comparison
DOMAIN_SELECTION = "0Wsbcpdm"
DEFAULT_PRECISION = 0.90
CV_KEY = "cv_accuracy"


@dataclass(frozen=True)
class FixedContext:
    ctx: Context
    fixed: Mapping[int, SynsetId] = field(default_factory=dict)

    def __post_init__(self):
        for i in self.fixed:
            if not 0 <= i < len(self.ctx.nouns):
                raise ValueError(f"fixed index {i} outside the context")
        if self.ctx.target in self.fixed:
            raise ValueError("the target word cannot be fixed")


def label_to_synset(label: str, pos: str = NOUN) -> SynsetId:
    """Corpus sense labels are synset keys, optionally ``pos:``-prefixed."""
    if ":" in label:
        return SynsetId.parse(label)
    return SynsetId(pos, label)


def cv_precision(clf: Classifier) -> float | None:
    raw = clf.meta.get(CV_KEY)
    return float(raw) if raw is not None else None


def noun_context(ex: TrainingExample, db: LexicalDb) -> tuple[Context | None, list[int]]:
    """Nouns of *ex* known to the lexicon, with their token positions.

    The target is always kept so it can be disambiguated.
    """
    nouns, where = [], []
    target = None
    for i, tok in enumerate(ex.tokens):
        lemma = normalize_lemma(tok.lemma)
        if i == ex.target_index:
            target = len(nouns)
        elif not (tok.is_noun and db.senses(lemma, NOUN)):
            continue
        nouns.append(lemma)
        where.append(i)
    if target is None:
        return None, []
    return Context(tuple(nouns), target), where


def prelabel_with_me(ctx: Context, classifiers: Mapping[str, Classifier],
                     instances: Mapping[int, TrainingExample], db: LexicalDb,
                     precision_threshold: float = DEFAULT_PRECISION) -> FixedContext:
    """Fix each context noun whose classifier cross-validated at or above
    the threshold to that classifier's prediction.

    ``instances`` maps a context index to the example that views that
    noun as the target; nouns without an instance stay free.
    """
    fixed = {}
    for i, lemma in enumerate(ctx.nouns):
        if i == ctx.target or i not in instances:
            continue
        clf = classifiers.get(lemma)
        if clf is None:
            continue
        precision = cv_precision(clf)
        if precision is None or precision < precision_threshold:
            continue
        sid = label_to_synset(classify(clf, instances[i]).sense)
        if sid not in db.senses(lemma, NOUN):
            warnings.warn(f"classifier for {lemma!r} predicted {sid}, not one of its senses")
            continue
        fixed[i] = sid
    return FixedContext(ctx, fixed)


def sm_with_fixed(fc: FixedContext, db: LexicalDb) -> SenseAssignment:
    return specification_marks(fc.ctx, db, fc.fixed)


def domain_predicates(ex: TrainingExample, db: LexicalDb, lex: DomainLexicon) -> set[str]:
    """``dom-1=economy`` style labels of nouns at +-1..3 and ``domctx=...``
    for the three heaviest domains of the example's nouns."""
    ctx, where = noun_context(ex, db)
    if ctx is None or not len(lex):
        return set()
    position = {tok: k for k, tok in enumerate(where)}
    preds = set()
    for off in OFFSETS:
        k = position.get(ex.target_index + off)
        if k is None:
            continue
        labels, _ = word_domain_labels(ctx.nouns[k], Context(ctx.nouns, k), db, lex)
        preds.update(f"dom{off:+d}={label}" for label in labels)
    preds.update(f"domctx={label}" for label in context_vector(ctx.nouns, lex).top(3))
    return preds


def me_with_domain_features(examples: Sequence[TrainingExample], sel: FeatureSelection | str,
                            db: LexicalDb, lex: DomainLexicon,
                            max_iters: int = DEFAULT_MAX_ITERS,
                            tol: float = DEFAULT_TOL) -> Classifier:
    if isinstance(sel, str):
        sel = parse_selection(sel)
    clf = train(examples, sel, max_iters=max_iters, tol=tol,
                extra=lambda ex: domain_predicates(ex, db, lex))
    clf.meta["domain_features"] = "1"
    return clf


def classify_with_domains(clf: Classifier, ex: TrainingExample, db: LexicalDb,
                          lex: DomainLexicon) -> Prediction:
    return classify(clf, ex, extra=lambda e: domain_predicates(e, db, lex))


def sm_votes(answer: SenseAssignment | None) -> dict[str, Fraction]:
    if answer is None or answer.unassigned:
        return {}
    share = Fraction(1, len(answer.senses))
    return {s.key: share for s in answer.senses}


def vme_sm(answers_me: Sequence[tuple[str, str | None]], answer_sm: SenseAssignment | None,
           word: str | None = None, pos: str = NOUN, mfs: str | None = None) -> str | None:
    """Plurality over the ME answers plus the SM outcome.

    SM only takes part for nouns; a reduced outcome splits its vote
    evenly and an unassigned one abstains.
    """
    if not answers_me:
        raise ValueError("no ME answers to vote on")
    if word is not None and answer_sm is not None and \
            answer_sm.word != normalize_lemma(word):
        raise ValueError(f"SM answer is for {answer_sm.word!r}, not {word!r}")
    votes: Counter = Counter()
    for _, sense in answers_me:
        if sense is not None:
            votes[sense] += 1
    if pos == NOUN:
        for sense, share in sm_votes(answer_sm).items():
            votes[sense] += share
    return plurality(votes, dict(answers_me), SYSTEM_PRIORITY, mfs)
