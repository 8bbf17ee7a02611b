"""Stratified cross-validation, per-word / per-POS feature selection and voting."""

from __future__ import annotations

import random
import warnings
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .corpus import TrainingExample, group_by_word
from .features import FeatureSelection, parse_selection
from .model import DEFAULT_MAX_ITERS, DEFAULT_TOL, ExtraFeatures, classify, train

PER_WORD = "per-word"
PER_POS = "per-pos"
# tie-break order among the supervised systems when votes split evenly
SYSTEM_PRIORITY = ("MEbfs.pos", "MEbfs", "MEfix")


class CrossValidationError(ValueError):
    pass


@dataclass(frozen=True)
class CVResult:
    accuracy: float
    fold_accuracies: tuple[float, ...]
    excluded_senses: tuple[str, ...]
    examples: int


def stratified_folds(examples: Sequence[TrainingExample], folds: int = 3, seed: int = 0
                     ) -> tuple[list[list[TrainingExample]], list[str]]:
    """Split into *folds* parts holding each sense as evenly as possible.

    Senses with fewer than *folds* examples are dropped (second return
    value).  Within a sense the examples are shuffled by a seeded RNG and
    dealt round-robin; the dealing position carries over between senses so
    fold sizes stay balanced too.
    """
    if folds < 2:
        raise CrossValidationError("need at least 2 folds")
    by_sense: dict[str, list[TrainingExample]] = defaultdict(list)
    for ex in examples:
        by_sense[ex.sense].append(ex)
    rng = random.Random(seed)
    parts: list[list[TrainingExample]] = [[] for _ in range(folds)]
    dropped = []
    cursor = 0
    for sense in sorted(by_sense):
        group = sorted(by_sense[sense], key=lambda e: e.id)
        if len(group) < folds:
            dropped.append(sense)
            continue
        rng.shuffle(group)
        for ex in group:
            parts[cursor % folds].append(ex)
            cursor += 1
    if not any(parts):
        raise CrossValidationError(f"no sense has at least {folds} examples")
    return parts, dropped


def cross_validate(examples: Sequence[TrainingExample], sel: FeatureSelection | str,
                   folds: int = 3, seed: int = 0, max_iters: int = DEFAULT_MAX_ITERS,
                   tol: float = DEFAULT_TOL, extra: ExtraFeatures | None = None) -> CVResult:
    if isinstance(sel, str):
        sel = parse_selection(sel)
    parts, dropped = stratified_folds(examples, folds, seed)
    accs = []
    for k, test in enumerate(parts):
        train_set = [ex for j, part in enumerate(parts) if j != k for ex in part]
        clf = train(train_set, sel, max_iters=max_iters, tol=tol, extra=extra)
        correct = sum(classify(clf, ex, extra).sense == ex.sense for ex in test)
        accs.append(correct / len(test))
    return CVResult(sum(accs) / len(accs), tuple(accs), tuple(dropped),
                    sum(len(p) for p in parts))


def word_key(word: tuple[str, str]) -> str:
    return f"{word[0]},{word[1]}"


def cv_table(examples: Sequence[TrainingExample], candidates: Sequence[FeatureSelection],
             folds: int = 3, seed: int = 0, max_iters: int = DEFAULT_MAX_ITERS,
             tol: float = DEFAULT_TOL) -> dict[tuple[str, str], list[float]]:
    """Cross-validated accuracy of every candidate for every word."""
    table = {}
    for word, group in group_by_word(examples).items():
        try:
            table[word] = [cross_validate(group, sel, folds, seed, max_iters, tol).accuracy
                           for sel in candidates]
        except CrossValidationError as exc:
            warnings.warn(f"skipping {word_key(word)}: {exc}")
    return table


def _first_best(scores: Sequence[float]) -> int:
    best = max(scores)
    return next(i for i, s in enumerate(scores) if s == best)


def select_best(examples: Sequence[TrainingExample], candidates: Sequence[FeatureSelection | str],
                mode: str = PER_WORD, folds: int = 3, seed: int = 0,
                max_iters: int = DEFAULT_MAX_ITERS, tol: float = DEFAULT_TOL,
                table: Mapping[tuple[str, str], Sequence[float]] | None = None
                ) -> dict[str, FeatureSelection]:
    """Best candidate per word (keys ``"lemma,POS"``) or per POS (keys ``"N"``...).

    Per-POS picks the candidate with the highest accuracy averaged over
    that POS's words.  Ties go to the earlier candidate.
    """
    if not candidates:
        raise ValueError("no candidate selections")
    cands = [parse_selection(c) if isinstance(c, str) else c for c in candidates]
    if table is None:
        table = cv_table(examples, cands, folds, seed, max_iters, tol)
    if mode == PER_WORD:
        return {word_key(w): cands[_first_best(s)] for w, s in table.items()}
    if mode == PER_POS:
        by_pos: dict[str, list[Sequence[float]]] = defaultdict(list)
        for (lemma, pos), scores in table.items():
            by_pos[pos].append(scores)
        out = {}
        for pos, rows in sorted(by_pos.items()):
            means = [sum(r[i] for r in rows) / len(rows) for i in range(len(cands))]
            out[pos] = cands[_first_best(means)]
        return out
    raise ValueError(f"unknown selection mode {mode!r}")


def plurality(votes: Mapping[str, Fraction | int], answers: Mapping[str, str | None],
              priority: Sequence[str], mfs: str | None = None) -> str | None:
    """Sense with most votes; ties go to the first system in *priority*
    whose answer is among the tied senses, then to *mfs* if it is tied."""
    if not votes:
        return mfs
    top = max(votes.values())
    if top <= 0:
        return mfs
    tied = sorted(s for s, v in votes.items() if v == top)
    if len(tied) == 1:
        return tied[0]
    for system in priority:
        if answers.get(system) in tied:
            return answers[system]
    return mfs if mfs in tied else tied[0]


def vote_me(answers: Sequence[tuple[str, str | None]], mfs: str | None = None,
            priority: Sequence[str] = SYSTEM_PRIORITY) -> str | None:
    if not answers:
        raise ValueError("no answers to vote on")
    votes = Counter(sense for _, sense in answers if sense is not None)
    return plurality(votes, dict(answers), priority, mfs)
