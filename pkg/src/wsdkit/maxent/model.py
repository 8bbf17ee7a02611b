"""Conditional maximum-entropy classifier trained by generalized iterative scaling.

p(c|x) = (1/Z(x)) * prod_i alpha_i ** f_i(x, c)

Features are binary.  A non-collapsed feature is a (predicate, sense)
pair seen in training; a collapsed feature is a (group, sense) pair that
fires when any of the context's values for the group is in the bag of
values that group took with that sense.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, TextIO

import numpy as np
from scipy import sparse
from scipy.special import logsumexp

from .corpus import TrainingExample
from .features import (FeatureSelection, extract_features, is_keyword, parse_selection,
                       split_predicate)

DEFAULT_MAX_ITERS = 100
DEFAULT_TOL = 1e-4
FORMAT_HEADER = "MEMODEL 1"

ExtraFeatures = Callable[[TrainingExample], Iterable[str]]


class TrainingError(ValueError):
    pass


@dataclass(frozen=True)
class Prediction:
    sense: str
    probabilities: dict[str, float]
    fallback: bool = False

    @property
    def source(self) -> str:
        return "mfs-fallback" if self.fallback else "me"


@dataclass
class Classifier:
    word: str
    pos: str
    senses: tuple[str, ...]
    priors: tuple[float, ...]
    selection: FeatureSelection
    # (predicate or collapsed group, sense) -> multiplicative weight
    alphas: dict[tuple[str, str], float] = field(default_factory=dict)
    bags: dict[tuple[str, str], frozenset[str]] = field(default_factory=dict)
    correction: tuple[int, float] = (0, 1.0)
    meta: dict[str, str] = field(default_factory=dict)
    log_likelihood: list[float] = field(default_factory=list)

    @property
    def mfs(self) -> str:
        return self.senses[0]

    @property
    def degenerate(self) -> bool:
        return len(self.senses) == 1

    @property
    def features(self) -> dict[tuple[str, str], int]:
        return {key: i for i, key in enumerate(sorted(self.alphas))}

    @property
    def converged(self) -> bool:
        return self.meta.get("converged") == "1"

    def active(self, preds: set[str], sense: str) -> list[tuple[str, str]]:
        """Features firing for (context, sense)."""
        out = [(p, sense) for p in preds if (p, sense) in self.alphas]
        groups: dict[str, set[str]] = defaultdict(set)
        for p in preds:
            key, value = split_predicate(p)
            if key[:1].isupper():
                groups[key].add(value)
        for key, values in groups.items():
            bag = self.bags.get((key, sense))
            if bag and (key, sense) in self.alphas and not bag.isdisjoint(values):
                out.append((key, sense))
        return out

    def distribution(self, preds: set[str]) -> tuple[np.ndarray, bool]:
        """Model p(c|x) over self.senses and whether no feature fired at all.

        With nothing firing the model is uniform; classification then falls
        back to the training priors instead.
        """
        if self.degenerate:
            return np.ones(1), False
        width, corr_alpha = self.correction
        log_corr = math.log(corr_alpha)
        scores = np.empty(len(self.senses))
        fired = 0
        for j, s in enumerate(self.senses):
            act = self.active(preds, s)
            fired += len(act)
            total = sum(math.log(self.alphas[f]) for f in act)
            pad = width - len(act)
            if pad != 0:
                total += pad * log_corr
            scores[j] = total
        probs = np.exp(scores - logsumexp(scores))
        return probs / probs.sum(), fired == 0


def sense_order(labels: Iterable[str]) -> list[str]:
    counts = Counter(labels)
    return sorted(counts, key=lambda s: (-counts[s], s))


def _qualifying_keywords(contexts: Sequence[set[str]], labels: Sequence[str]
                         ) -> set[tuple[str, str]]:
    """(keyword predicate, sense) pairs meeting their percentage threshold.

    A noun qualifies for a sense when it occurs in at least m% of that
    sense's examples and in at least two of them.
    """
    per_sense = Counter(labels)
    seen: Counter = Counter()
    for preds, s in zip(contexts, labels):
        for p in preds:
            if is_keyword(p):
                seen[(p, s)] += 1
    keep = set()
    for (p, s), n in seen.items():
        m = int(split_predicate(p)[0][1:])
        if n >= 2 and n * 100 >= m * per_sense[s]:
            keep.add((p, s))
    return keep


def fit(contexts: Sequence[set[str]], labels: Sequence[str], *, word: str = "", pos: str = "",
        selection: FeatureSelection = FeatureSelection(), max_iters: int = DEFAULT_MAX_ITERS,
        tol: float = DEFAULT_TOL) -> Classifier:
    """Train on pre-extracted predicate sets."""
    if not contexts:
        raise TrainingError("no training examples")
    if len(contexts) != len(labels):
        raise TrainingError("contexts and labels differ in length")
    if tol <= 0:
        raise TrainingError("tol must be positive")
    senses = sense_order(labels)
    n = len(labels)
    counts = Counter(labels)
    priors = tuple(counts[s] / n for s in senses)
    clf = Classifier(word, pos, tuple(senses), priors, selection)
    clf.meta.update(examples=str(n), iterations="0", converged="1")
    if len(senses) == 1:
        clf.meta["degenerate"] = "1"
        return clf

    keywords = _qualifying_keywords(contexts, labels)
    bags: dict[tuple[str, str], set[str]] = defaultdict(set)
    observed: set[tuple[str, str]] = set()
    for preds, s in zip(contexts, labels):
        for p in preds:
            if is_keyword(p) and (p, s) not in keywords:
                continue
            key, value = split_predicate(p)
            if key[:1].isupper():
                bags[(key, s)].add(value)
                observed.add((key, s))
            else:
                observed.add((p, s))
    clf.bags = {k: frozenset(v) for k, v in bags.items()}
    if not observed:
        clf.meta["mfs_only"] = "1"
        return clf

    keys = sorted(observed)
    index = {k: i for i, k in enumerate(keys)}
    clf.alphas = {k: 1.0 for k in keys}
    n_classes = len(senses)
    rows, cols = [], []
    for i, preds in enumerate(contexts):
        for j, s in enumerate(senses):
            for f in clf.active(preds, s):
                rows.append(i * n_classes + j)
                cols.append(index[f])
    A = sparse.csr_matrix((np.ones(len(rows)), (rows, cols)),
                          shape=(n * n_classes, len(keys)))
    row_sums = np.asarray(A.sum(axis=1)).ravel()
    gold_rows = np.array([i * n_classes + senses.index(s) for i, s in enumerate(labels)])
    width = int(row_sums.max())
    if np.all(row_sums[gold_rows] == width):
        # the padding feature would never be seen with a gold sense
        width += 1
    pad = width - row_sums

    emp = np.asarray(A[gold_rows].sum(axis=0)).ravel()
    emp_pad = pad[gold_rows].sum()
    lam = np.zeros(len(keys))
    lam_pad = 0.0
    history = []
    converged = False
    it = 0
    while True:
        scores = (A @ lam + pad * lam_pad).reshape(n, n_classes)
        log_p = scores - logsumexp(scores, axis=1, keepdims=True)
        history.append(float(log_p.ravel()[gold_rows].sum()))
        p = np.exp(log_p).ravel()
        model = A.T @ p
        model_pad = pad @ p
        gap = float(np.max(np.abs(emp - model)))
        if gap < tol:
            converged = True
            break
        if it >= max_iters:
            break
        lam += (np.log(emp) - np.log(model)) / width
        lam_pad += (math.log(emp_pad) - math.log(model_pad)) / width
        it += 1

    clf.alphas = {k: float(np.exp(lam[i])) for k, i in index.items()}
    clf.correction = (width, float(np.exp(lam_pad)))
    clf.log_likelihood = history
    clf.meta.update(iterations=str(it), converged="1" if converged else "0",
                    gap=f"{gap:.6g}")
    bad = [k for k, a in clf.alphas.items() if not (math.isfinite(a) and a > 0)]
    if bad or not (math.isfinite(clf.correction[1]) and clf.correction[1] > 0):
        raise TrainingError(f"weights left the representable range for {word!r}; "
                            "lower max_iters")
    return clf


def _check_word(examples: Sequence[TrainingExample]) -> tuple[str, str]:
    words = {ex.word for ex in examples}
    if len(words) != 1:
        raise TrainingError(f"training examples mix target words: {sorted(words)}")
    return words.pop()


def train(examples: Sequence[TrainingExample], sel: FeatureSelection | str,
          max_iters: int = DEFAULT_MAX_ITERS, tol: float = DEFAULT_TOL,
          extra: ExtraFeatures | None = None) -> Classifier:
    if isinstance(sel, str):
        sel = parse_selection(sel)
    if not examples:
        raise TrainingError("no training examples")
    word, pos = _check_word(examples)
    contexts = [context_predicates(ex, sel, extra) for ex in examples]
    return fit(contexts, [ex.sense for ex in examples], word=word, pos=pos, selection=sel,
               max_iters=max_iters, tol=tol)


def context_predicates(ex: TrainingExample, sel: FeatureSelection,
                       extra: ExtraFeatures | None = None) -> set[str]:
    preds = extract_features(ex, sel)
    if extra is not None:
        preds.update(extra(ex))
    return preds


def classify_predicates(clf: Classifier, preds: set[str]) -> Prediction:
    probs, empty = clf.distribution(preds)
    if empty:
        probs = np.asarray(clf.priors, dtype=float)
    dist = {s: float(p) for s, p in zip(clf.senses, probs)}
    best = float(probs.max())
    tied = [s for s, p in zip(clf.senses, probs) if p >= best * (1 - 1e-12)]
    # senses are already in frequency order, so the first tied one is the MFS
    return Prediction(tied[0], dist, fallback=empty or len(tied) > 1)


def classify(clf: Classifier, ex: TrainingExample,
             extra: ExtraFeatures | None = None) -> Prediction:
    if ex.target_lemma.lower() != clf.word.lower() or (clf.pos and ex.target_pos != clf.pos):
        raise ValueError(f"example {ex.id} targets {ex.target_lemma}/{ex.target_pos}, "
                         f"classifier is for {clf.word}/{clf.pos}")
    return classify_predicates(clf, context_predicates(ex, clf.selection, extra))


def dump(clf: Classifier, out: TextIO) -> None:
    out.write(FORMAT_HEADER + "\n")
    out.write(f"WORD\t{clf.word}\n")
    out.write(f"POS\t{clf.pos}\n")
    out.write(f"SELECTION\t{clf.selection}\n")
    out.write("SENSES\t" + "\t".join(clf.senses) + "\n")
    out.write("PRIORS\t" + "\t".join(f"{p:.17g}" for p in clf.priors) + "\n")
    out.write(f"CORRECTION\t{clf.correction[0]}\t{clf.correction[1]:.17g}\n")
    for key in sorted(clf.meta):
        out.write(f"META\t{key}\t{clf.meta[key]}\n")
    for (group, sense) in sorted(clf.bags):
        out.write(f"BAG\t{group}\t{sense}\t" + "\t".join(sorted(clf.bags[group, sense])) + "\n")
    for (pred, sense) in sorted(clf.alphas):
        out.write(f"FEAT\t{pred}\t{sense}\t{clf.alphas[pred, sense]:.17g}\n")


def dumps(clf: Classifier) -> str:
    import io
    buf = io.StringIO()
    dump(clf, buf)
    return buf.getvalue()


def load(source: TextIO) -> Classifier:
    lines = [ln.rstrip("\r\n") for ln in source]
    if not lines or lines[0] != FORMAT_HEADER:
        raise ValueError(f"line 1: expected {FORMAT_HEADER!r}")
    head: dict[str, list[str]] = {}
    meta, bags, alphas = {}, {}, {}
    for lineno, line in enumerate(lines[1:], 2):
        if not line:
            continue
        f = line.split("\t")
        kind = f[0]
        try:
            if kind in ("WORD", "POS", "SELECTION", "SENSES", "PRIORS", "CORRECTION"):
                head[kind] = f[1:]
            elif kind == "META":
                meta[f[1]] = f[2]
            elif kind == "BAG":
                bags[(f[1], f[2])] = frozenset(f[3:])
            elif kind == "FEAT":
                alpha = float(f[3])
                if not (math.isfinite(alpha) and alpha > 0):
                    raise ValueError("alpha must be finite and positive")
                alphas[(f[1], f[2])] = alpha
            else:
                raise ValueError(f"unknown record {kind!r}")
        except (IndexError, ValueError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    missing = {"WORD", "POS", "SELECTION", "SENSES", "PRIORS", "CORRECTION"} - set(head)
    if missing:
        raise ValueError(f"classifier file lacks {sorted(missing)}")
    senses = tuple(head["SENSES"])
    priors = tuple(float(x) for x in head["PRIORS"])
    if len(priors) != len(senses) or not senses:
        raise ValueError("SENSES and PRIORS disagree")
    clf = Classifier(head["WORD"][0], head["POS"][0], senses, priors,
                     parse_selection(head["SELECTION"][0] if head["SELECTION"] else ""),
                     alphas, bags, (int(head["CORRECTION"][0]), float(head["CORRECTION"][1])),
                     meta)
    return clf


def loads(text: str) -> Classifier:
    import io
    return load(io.StringIO(text))
