"""Scoring and pairwise comparison of sense-tagging systems."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence, TextIO, Union

from .lexkb import LexicalDb, SynsetId
from .maxent.corpus import TrainingExample
from .maxent.model import sense_order

Answer = Union[str, tuple[str, ...], None]
ABSTAIN = "-"
STRICT = "strict"
SOFT = "soft"


class AnswerFormatError(ValueError):
    pass


@dataclass
class AnswerSet:
    system: str
    answers: dict[str, Answer] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.answers)

    def get(self, instance: str) -> Answer:
        return self.answers.get(instance)

    def ids(self) -> set[str]:
        return set(self.answers)


def _render(answer: Answer) -> str:
    if answer is None:
        return ABSTAIN
    if isinstance(answer, tuple):
        return ",".join(answer)
    return answer


def _parse(field_: str) -> Answer:
    if field_ == ABSTAIN or field_ == "":
        return None
    if "," in field_:
        return tuple(field_.split(","))
    return field_


def write_answers(sets: AnswerSet | Sequence[AnswerSet], out: TextIO) -> None:
    """``ANSWER<TAB>system<TAB>id<TAB>sense|-`` lines sorted by instance id."""
    if isinstance(sets, AnswerSet):
        sets = [sets]
    for s in sets:
        for instance in sorted(s.answers):
            out.write(f"ANSWER\t{s.system}\t{instance}\t{_render(s.answers[instance])}\n")


def read_answers(source: TextIO | str | Path) -> dict[str, AnswerSet]:
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            return read_answers(fh)
    out: dict[str, AnswerSet] = {}
    for lineno, raw in enumerate(source, 1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 4 or fields[0] != "ANSWER":
            raise AnswerFormatError(f"line {lineno}: expected ANSWER<TAB>system<TAB>id<TAB>sense")
        system, instance = fields[1], fields[2]
        target = out.setdefault(system, AnswerSet(system))
        if instance in target.answers:
            raise AnswerFormatError(f"line {lineno}: duplicate answer for {instance!r} "
                                    f"from {system!r}")
        target.answers[instance] = _parse(fields[3])
    return out


def gold_from_examples(examples: Iterable[TrainingExample]) -> dict[str, str]:
    gold = {}
    for ex in examples:
        if ex.id in gold:
            raise AnswerFormatError(f"duplicate gold instance {ex.id!r}")
        gold[ex.id] = ex.sense
    return gold


def gold_from_answers(sets: Mapping[str, AnswerSet]) -> dict[str, str]:
    if len(sets) != 1:
        raise AnswerFormatError("a gold answer file must hold exactly one system")
    (only,) = sets.values()
    gold = {}
    for instance, answer in only.answers.items():
        if not isinstance(answer, str):
            raise AnswerFormatError(f"gold for {instance!r} must be a single sense")
        gold[instance] = answer
    return gold


# --------------------------------------------------------------------------
# single-system scores


@dataclass(frozen=True)
class ScoreReport:
    system: str
    correct: Fraction
    attempted: int
    total: int

    @property
    def precision(self) -> float:
        return float(self.correct / self.attempted) if self.attempted else 0.0

    @property
    def recall(self) -> float:
        return float(self.correct / self.total) if self.total else 0.0

    @property
    def coverage(self) -> float:
        return self.attempted / self.total if self.total else 0.0

    def as_dict(self) -> dict[str, float | int]:
        return {"precision": self.precision, "recall": self.recall,
                "coverage": self.coverage, "attempted": self.attempted,
                "correct": float(self.correct), "total": self.total}


def _credit(answer: Answer, gold: str, mode: str) -> Fraction | None:
    """Credit for one answer, or None when it does not count as attempted."""
    if answer is None:
        return None
    if isinstance(answer, tuple):
        if mode == STRICT:
            return None
        return Fraction(1, len(answer)) if gold in answer else Fraction(0)
    return Fraction(int(answer == gold))


def _check_ids(sys: AnswerSet, gold: Mapping[str, str]) -> None:
    extra = sys.ids() - set(gold)
    if extra:
        raise KeyError(f"{sys.system}: answers for unknown instances {sorted(extra)[:5]}")


def score(sys: AnswerSet, gold: Mapping[str, str], mode: str = STRICT) -> ScoreReport:
    """Precision, recall and coverage over all gold instances.

    Reduced (multi-sense) answers are abstentions in strict mode and earn
    1/|set| when the set holds the gold sense in soft mode.
    """
    if mode not in (STRICT, SOFT):
        raise ValueError(f"unknown scoring mode {mode!r}")
    _check_ids(sys, gold)
    correct = Fraction(0)
    attempted = 0
    for instance, key in gold.items():
        credit = _credit(sys.get(instance), key, mode)
        if credit is not None:
            attempted += 1
            correct += credit
    return ScoreReport(sys.system, correct, attempted, len(gold))


def mfs_baseline(train_examples: Iterable[TrainingExample],
                 test_examples: Iterable[TrainingExample], db: LexicalDb | None = None,
                 system: str = "MFS") -> AnswerSet:
    """Answer each test instance with its word's most frequent training sense.

    Equal counts are settled by lexicon sense rank.  Words missing from
    training get their rank-1 lexicon sense (or an abstention without a
    lexicon).
    """
    counts: dict[tuple[str, str], Counter] = {}
    for ex in train_examples:
        counts.setdefault(ex.word, Counter())[ex.sense] += 1

    def rank(lemma: str, pos: str, label: str) -> int:
        if db is None:
            return 0
        sid = SynsetId.parse(label) if ":" in label else SynsetId(pos, label)
        try:
            return db.sense_rank(lemma, pos, sid)
        except (KeyError, ValueError):
            return 1 << 30

    best: dict[tuple[str, str], str] = {}
    for (lemma, pos), c in counts.items():
        top = max(c.values())
        tied = sorted(s for s in c if c[s] == top)
        best[(lemma, pos)] = min(tied, key=lambda s: (rank(lemma, pos, s), s))
    out = AnswerSet(system)
    for ex in test_examples:
        answer = best.get(ex.word)
        if answer is None and db is not None:
            senses = db.senses(ex.target_lemma, ex.target_pos)
            answer = senses[0].key if senses else None
        out.answers[ex.id] = answer
    return out


# --------------------------------------------------------------------------
# two-system comparisons


def _correct_flags(a: AnswerSet, b: AnswerSet, gold: Mapping[str, str]
                   ) -> list[tuple[bool, bool]]:
    _check_ids(a, gold)
    _check_ids(b, gold)
    if a.answers and b.answers and not a.ids() & b.ids():
        raise ValueError(f"{a.system} and {b.system} answer disjoint instance sets")
    return [(a.get(i) == g, b.get(i) == g) for i, g in sorted(gold.items())]


@dataclass(frozen=True)
class Agreement:
    both_ok: Fraction
    one_ok: Fraction
    zero_ok: Fraction


def pair_agreement(a: AnswerSet, b: AnswerSet, gold: Mapping[str, str]) -> Agreement:
    flags = _correct_flags(a, b, gold)
    n = len(flags)
    if n == 0:
        raise ValueError("no gold instances")
    both = sum(x and y for x, y in flags)
    zero = sum(not x and not y for x, y in flags)
    return Agreement(Fraction(both, n), Fraction(n - both - zero, n), Fraction(zero, n))


def optimal_combination(a: AnswerSet, b: AnswerSet, gold: Mapping[str, str]) -> Fraction:
    """Accuracy of an oracle picking whichever system is right."""
    return 1 - pair_agreement(a, b, gold).zero_ok


def wins_ties_loses(a: AnswerSet, b: AnswerSet, gold: Mapping[str, str]
                    ) -> tuple[int, int, int]:
    flags = _correct_flags(a, b, gold)
    wins = sum(x and not y for x, y in flags)
    loses = sum(y and not x for x, y in flags)
    return wins, len(flags) - wins - loses, loses


def kappa(a: AnswerSet, b: AnswerSet, abstentions: str = "category",
          instances: Iterable[str] | None = None) -> float:
    """Cohen's kappa between the answers of two systems.

    Each system's own answer distribution gives the chance model.  An
    abstention is a category of its own unless ``abstentions="drop"``,
    which removes instances where either system abstained.
    """
    if abstentions not in ("category", "drop"):
        raise ValueError(f"unknown abstention handling {abstentions!r}")
    ids = sorted(set(instances) if instances is not None else a.ids() | b.ids())
    pairs = [(_render(a.get(i)), _render(b.get(i))) for i in ids]
    if abstentions == "drop":
        pairs = [(x, y) for x, y in pairs if x != ABSTAIN and y != ABSTAIN]
    n = len(pairs)
    if n == 0:
        raise ValueError("no instances to compare")
    p_o = Fraction(sum(x == y for x, y in pairs), n)
    ca = Counter(x for x, _ in pairs)
    cb = Counter(y for _, y in pairs)
    p_e = sum(Fraction(ca[k] * cb[k], n * n) for k in ca)
    if p_e == 1:
        if p_o == 1:
            return 1.0
        raise ValueError("kappa undefined: chance agreement is 1")
    return float((p_o - p_e) / (1 - p_e))


# --------------------------------------------------------------------------
# reports


def format_table(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    cells = [list(map(str, header))] + [[_cell(v) for v in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = []
    for r in cells:
        parts = [r[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(r[1:], widths[1:])]
        lines.append("  ".join(parts).rstrip())
    return "\n".join(lines) + "\n"


def _cell(v: object) -> str:
    if isinstance(v, (float, Fraction)):
        return f"{float(v):.4f}"
    return str(v)


def key_values(prefix: str, values: Mapping[str, object]) -> str:
    return "".join(f"{prefix}.{k}={_kv(v)}\n" for k, v in values.items())


def _kv(v: object) -> str:
    if isinstance(v, (float, Fraction)):
        return f"{float(v):.12g}"
    return str(v)


def score_report(reports: Sequence[ScoreReport]) -> str:
    table = format_table(("system", "precision", "recall", "coverage", "correct", "attempted",
                          "total"),
                         [(r.system, r.precision, r.recall, r.coverage, float(r.correct),
                           r.attempted, r.total) for r in reports])
    block = "".join(key_values(r.system, r.as_dict()) for r in reports)
    return table + "\n" + block


def compare_report(a: AnswerSet, b: AnswerSet, gold: Mapping[str, str],
                   abstentions: str = "category") -> str:
    agr = pair_agreement(a, b, gold)
    w, t, l = wins_ties_loses(a, b, gold)
    ra, rb = score(a, gold), score(b, gold)
    values = {
        "recall_a": ra.recall, "recall_b": rb.recall,
        "both_ok": agr.both_ok, "one_ok": agr.one_ok, "zero_ok": agr.zero_ok,
        "optimal_combination": 1 - agr.zero_ok,
        "wins": w, "ties": t, "loses": l,
        "kappa": kappa(a, b, abstentions, instances=gold),
    }
    rows = [(k, v) for k, v in values.items()]
    title = f"{a.system} vs {b.system}\n"
    return title + format_table(("measure", "value"), rows) + "\n" + key_values("compare", values)
