"""Command-line driver.

Exit codes: 1 bad usage, 2 malformed input, 3 algorithmic precondition.
"""

from __future__ import annotations

import argparse
import io
import re
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, Sequence, TextIO

from . import eval as ev
from . import hybrid, importers
from .domains import DomainLexicon, build_relevant_domains
from .lexkb import LexicalDb, LexiconError, load_lexicon, load_stopwords
from .maxent import corpus as mc
from .maxent import model as mm
from .maxent import selection as ms
from .maxent.features import FeatureSelection, SelectionError, parse_selection
from .specmarks import DEFAULT_ORDER, HEURISTICS, SenseAssignment, cascade, independent, \
    specification_marks, vote, window

EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_ALGO = 3

CONFIG_KEYS = {
    "lexicon", "stopwords", "window", "method", "heuristics", "domain_lexicon", "blacklist",
    "max_iters", "tol", "folds", "selection", "candidates", "mode", "threshold", "seed", "jobs",
    "score_mode", "kappa_abstentions", "system",
}
DEFAULTS = {
    "window": "whole", "method": "sm", "heuristics": ",".join(DEFAULT_ORDER),
    "max_iters": str(mm.DEFAULT_MAX_ITERS), "tol": str(mm.DEFAULT_TOL), "folds": "3",
    "mode": ms.PER_WORD, "threshold": str(hybrid.DEFAULT_PRECISION), "seed": "0", "jobs": "1",
    "score_mode": ev.STRICT, "kappa_abstentions": "category", "blacklist": "",
}
MODEL_SUFFIX = ".memodel"


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class AlgorithmError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --------------------------------------------------------------------------
# configuration


def read_config(path: str) -> dict[str, str]:
    cfg = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep:
            raise InputError(f"{path}:{lineno}: expected key=value")
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        cfg[key] = value.strip()
    return cfg


class Settings:
    """Flag values over config values over defaults."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.cfg = read_config(args.config) if args.config else {}

    def get(self, key: str, required: bool = False) -> str | None:
        flag = getattr(self.args, key, None)
        if flag is not None:
            return str(flag)
        if key in self.cfg:
            return self.cfg[key]
        if required and key not in DEFAULTS:
            raise UsageError(f"missing setting {key!r} (flag --{key.replace('_', '-')} "
                             "or config key)")
        return DEFAULTS.get(key)

    def num(self, key: str, kind: Callable = int):
        raw = self.get(key)
        try:
            return kind(raw)
        except (TypeError, ValueError):
            raise UsageError(f"setting {key!r} must be a number, got {raw!r}") from None

    def selection(self, key: str = "selection") -> FeatureSelection:
        return parse_selection(self.get(key, required=True))

    def lexicon(self) -> LexicalDb:
        path = self.get("lexicon", required=True)
        stops = self.get("stopwords")
        return load_lexicon(path, load_stopwords(stops) if stops else None)


def _open_out(args) -> TextIO:
    if args.out and args.out != "-":
        return open(args.out, "w", encoding="utf-8", newline="\n")
    return sys.stdout


def _pmap(fn, items: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _answer(a: SenseAssignment):
    if a.assigned:
        return a.senses[0].key
    if a.reduced:
        return tuple(s.key for s in a.senses)
    return None


def _read_corpus(path: str) -> list[mc.TrainingExample]:
    examples = mc.read_corpus(path)
    seen = set()
    for ex in examples:
        if ex.id in seen:
            raise InputError(f"{path}: duplicate example id {ex.id!r}")
        seen.add(ex.id)
    return examples


# --------------------------------------------------------------------------
# commands


def cmd_validate_lexicon(args, st: Settings, out: TextIO) -> int:
    status = 0
    for path in args.paths:
        try:
            db = load_lexicon(path)
        except (LexiconError, OSError) as exc:
            out.write(f"FAIL\t{path}\t{exc}\n")
            status = EXIT_INPUT
            continue
        lemmas = len({lemma for lemma, _ in db.index})
        out.write(f"OK\t{path}\tsynsets={len(db)}\tlemmas={lemmas}\troots={len(db.roots())}\n")
    return status


def _heuristic_order(st: Settings) -> list[str]:
    order = [h.strip() for h in st.get("heuristics").split(",") if h.strip()]
    unknown = [h for h in order if h not in HEURISTICS]
    if unknown:
        raise UsageError(f"unknown heuristics {unknown}; choose from {sorted(HEURISTICS)}")
    return order


def _load_domains(st: Settings) -> DomainLexicon | None:
    path = st.get("domain_lexicon")
    if not path:
        return None
    with open(path, encoding="utf-8") as fh:
        return DomainLexicon.load(fh)


def _window_policy(st: Settings) -> str | int:
    raw = st.get("window")
    if raw == "whole":
        return raw
    if not raw.isdigit() or int(raw) < 1:
        raise UsageError(f"window must be 'whole' or a positive noun count, not {raw!r}")
    return int(raw)


def cmd_sm(args, st: Settings, out: TextIO) -> int:
    db = st.lexicon()
    examples = _read_corpus(args.corpus)
    method = st.get("method")
    if method not in ("sm", "cascade", "vote"):
        raise UsageError(f"method must be sm, cascade or vote, not {method!r}")
    order = _heuristic_order(st)
    lex = _load_domains(st)
    if "domain" in order and lex is None and method != "sm":
        if st.get("heuristics") != DEFAULTS["heuristics"]:
            raise UsageError("the domain heuristic needs --domain-lexicon")
        order.remove("domain")
    policy = _window_policy(st)

    def run(ex):
        ctx, _ = hybrid.noun_context(ex, db)
        if ctx is None or not db.senses(ctx.target_lemma):
            return ex.id, None
        ctx = window(ctx.nouns, ctx.target, policy)
        if method == "sm":
            result = specification_marks(ctx, db)
        elif method == "cascade":
            result = cascade(ctx.target_lemma, ctx, db, order, lex=lex)
        else:
            result = vote(independent(ctx.target_lemma, ctx, db, order, lex=lex), db,
                          word=ctx.target_lemma)
        return ex.id, _answer(result)

    answers = dict(_pmap(run, examples, st.num("jobs")))
    ev.write_answers(ev.AnswerSet(st.get("system") or method.upper(), answers), out)
    return 0


def cmd_domains_build(args, st: Settings, out: TextIO) -> int:
    db = st.lexicon()
    blacklist = [b for b in st.get("blacklist").split(",") if b]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        lex = build_relevant_domains(db, blacklist)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    lex.dump(out)
    return 0


def _model_name(word: tuple[str, str]) -> str:
    lemma = re.sub(r"[^\w.#-]+", "_", word[0])
    return f"{lemma}.{word[1]}{MODEL_SUFFIX}"


def _selection_map(path: str | None) -> dict[str, FeatureSelection]:
    if not path:
        return {}
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            f = line.rstrip("\r\n").split("\t")
            if f[0] == "SELECT":
                if len(f) != 3:
                    raise InputError(f"{path}:{lineno}: expected SELECT<TAB>key<TAB>selection")
                out[f[1]] = parse_selection(f[2])
    return out


def _selection_for(word, default: FeatureSelection | None, table: dict) -> FeatureSelection:
    for key in (ms.word_key(word), word[1]):
        if key in table:
            return table[key]
    if default is None:
        raise UsageError(f"no feature selection for {ms.word_key(word)}")
    return default


def cmd_me_train(args, st: Settings, out: TextIO) -> int:
    examples = _read_corpus(args.corpus)
    table = _selection_map(args.selection_map)
    default = st.selection() if (st.get("selection") is not None or not table) else None
    max_iters, tol = st.num("max_iters"), st.num("tol", float)
    folds, seed = st.num("folds"), st.num("seed")
    model_dir = Path(args.model_dir)
    model_dir.mkdir(parents=True, exist_ok=True)
    groups = list(mc.group_by_word(examples).items())

    def run(item):
        word, group = item
        sel = _selection_for(word, default, table)
        clf = mm.train(group, sel, max_iters=max_iters, tol=tol)
        if args.cv:
            try:
                acc = ms.cross_validate(group, sel, folds, seed, max_iters, tol).accuracy
                clf.meta[hybrid.CV_KEY] = f"{acc:.12g}"
            except ms.CrossValidationError:
                pass
        text = mm.dumps(clf)
        (model_dir / _model_name(word)).write_text(text, encoding="utf-8")
        return word, clf, sel

    rows = []
    for word, clf, sel in _pmap(run, groups, st.num("jobs")):
        rows.append((ms.word_key(word), str(sel), len(clf.senses), len(clf.alphas),
                     clf.meta.get("iterations"), clf.meta.get("converged"),
                     clf.meta.get(hybrid.CV_KEY, "-")))
    out.write(ev.format_table(("word", "selection", "senses", "features", "iterations",
                               "converged", "cv_accuracy"), rows))
    return 0


def load_models(model_dir: str) -> dict[tuple[str, str], mm.Classifier]:
    models = {}
    paths = sorted(Path(model_dir).glob("*" + MODEL_SUFFIX))
    if not paths:
        raise InputError(f"no {MODEL_SUFFIX} files in {model_dir}")
    for path in paths:
        with open(path, encoding="utf-8") as fh:
            try:
                clf = mm.load(fh)
            except ValueError as exc:
                raise InputError(f"{path}: {exc}") from None
        models[(clf.word, clf.pos)] = clf
    return models


def cmd_me_classify(args, st: Settings, out: TextIO) -> int:
    examples = _read_corpus(args.corpus)
    models = load_models(args.model_dir)

    def run(ex):
        clf = models.get(ex.word)
        return ex.id, (mm.classify(clf, ex).sense if clf is not None else None)

    answers = dict(_pmap(run, examples, st.num("jobs")))
    ev.write_answers(ev.AnswerSet(st.get("system") or "ME", answers), out)
    return 0


def cmd_me_cv(args, st: Settings, out: TextIO) -> int:
    examples = _read_corpus(args.corpus)
    sel = st.selection()
    folds, seed = st.num("folds"), st.num("seed")
    max_iters, tol = st.num("max_iters"), st.num("tol", float)
    groups = list(mc.group_by_word(examples).items())

    def run(item):
        word, group = item
        try:
            return word, ms.cross_validate(group, sel, folds, seed, max_iters, tol)
        except ms.CrossValidationError as exc:
            return word, exc

    rows, kv = [], {}
    for word, res in _pmap(run, groups, st.num("jobs")):
        key = ms.word_key(word)
        if isinstance(res, Exception):
            rows.append((key, "-", "-", "-"))
            kv[key] = "skipped"
            continue
        rows.append((key, res.accuracy, " ".join(f"{a:.4f}" for a in res.fold_accuracies),
                     ",".join(res.excluded_senses) or "-"))
        kv[key] = res.accuracy
    if not kv or all(v == "skipped" for v in kv.values()):
        raise AlgorithmError("no word has enough examples for cross-validation")
    out.write(f"selection={sel} folds={folds} seed={seed}\n")
    out.write(ev.format_table(("word", "accuracy", "folds", "excluded"), rows))
    out.write("\n" + ev.key_values("cv", kv))
    return 0


def cmd_me_select(args, st: Settings, out: TextIO) -> int:
    examples = _read_corpus(args.corpus)
    raw = st.get("candidates", required=True)
    cands = [parse_selection(c.strip()) for c in raw.split(",") if c.strip()]
    if not cands:
        raise UsageError("no candidate selections")
    mode = st.get("mode")
    if mode not in (ms.PER_WORD, ms.PER_POS):
        raise UsageError(f"mode must be {ms.PER_WORD} or {ms.PER_POS}")
    folds, seed = st.num("folds"), st.num("seed")
    max_iters, tol = st.num("max_iters"), st.num("tol", float)
    groups = list(mc.group_by_word(examples).items())

    def run(item):
        word, group = item
        try:
            return word, [ms.cross_validate(group, c, folds, seed, max_iters, tol).accuracy
                          for c in cands]
        except ms.CrossValidationError:
            return word, None

    table = {}
    for word, scores in _pmap(run, groups, st.num("jobs")):
        if scores is None:
            print(f"warning: skipping {ms.word_key(word)}: too few examples", file=sys.stderr)
        else:
            table[word] = scores
    if not table:
        raise AlgorithmError("no word has enough examples for cross-validation")
    best = ms.select_best(examples, cands, mode, table=table)
    rows = [(ms.word_key(w), *s) for w, s in table.items()]
    out.write(ev.format_table(("word", *map(str, cands)), rows))
    out.write("\n")
    for key in sorted(best):
        out.write(f"SELECT\t{key}\t{best[key]}\n")
    return 0


def _noun_instances(ex: mc.TrainingExample, db: LexicalDb):
    ctx, where = hybrid.noun_context(ex, db)
    if ctx is None:
        return None, {}
    inst = {k: ex.retarget(tok) for k, tok in enumerate(where) if k != ctx.target}
    return ctx, inst


def cmd_hybrid_prelabel(args, st: Settings, out: TextIO) -> int:
    db = st.lexicon()
    examples = _read_corpus(args.corpus)
    models = {w[0]: clf for w, clf in load_models(args.model_dir).items() if w[1] == "N"}
    threshold = st.num("threshold", float)
    policy = _window_policy(st)

    def run(ex):
        ctx, inst = _noun_instances(ex, db)
        if ctx is None or not db.senses(ctx.target_lemma):
            return ex.id, None
        fc = hybrid.prelabel_with_me(ctx, models, inst, db, threshold)
        if policy != "whole":
            size = policy
            half = (size - 1) // 2
            lo = max(0, ctx.target - half)
            small = window(ctx.nouns, ctx.target, size)
            fixed = {i - lo: s for i, s in fc.fixed.items() if 0 <= i - lo < len(small.nouns)}
            fc = hybrid.FixedContext(small, fixed)
        return ex.id, _answer(hybrid.sm_with_fixed(fc, db))

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        answers = dict(_pmap(run, examples, st.num("jobs")))
    ev.write_answers(ev.AnswerSet(st.get("system") or "SM+ME", answers), out)
    return 0


def cmd_hybrid_domainfeat(args, st: Settings, out: TextIO) -> int:
    db = st.lexicon()
    lex = _load_domains(st)
    if lex is None:
        raise UsageError("domainfeat needs --domain-lexicon")
    train_set = _read_corpus(args.train)
    test_set = _read_corpus(args.test)
    sel_raw = st.get("selection") or hybrid.DOMAIN_SELECTION
    sel = parse_selection(sel_raw)
    max_iters, tol = st.num("max_iters"), st.num("tol", float)
    models = {w: hybrid.me_with_domain_features(g, sel, db, lex, max_iters, tol)
              for w, g in mc.group_by_word(train_set).items()}

    def run(ex):
        clf = models.get(ex.word)
        if clf is None:
            return ex.id, None
        return ex.id, hybrid.classify_with_domains(clf, ex, db, lex).sense

    answers = dict(_pmap(run, test_set, st.num("jobs")))
    ev.write_answers(ev.AnswerSet(st.get("system") or "ME+domains", answers), out)
    return 0


def _as_assignment(word: str, answer) -> SenseAssignment:
    if answer is None:
        return SenseAssignment.none(word, "answers")
    labels = answer if isinstance(answer, tuple) else (answer,)
    return SenseAssignment.reduce(word, [hybrid.label_to_synset(a) for a in labels], "answers")


def cmd_hybrid_vmesm(args, st: Settings, out: TextIO) -> int:
    sets: dict[str, ev.AnswerSet] = {}
    for path in args.answers:
        for name, s in ev.read_answers(path).items():
            if name in sets:
                raise InputError(f"system {name!r} appears in more than one answer file")
            sets[name] = s
    me_names = [n.strip() for n in args.me_systems.split(",")]
    missing = [n for n in me_names + [args.sm_system] if n not in sets]
    if missing:
        raise InputError(f"answer files lack systems {missing}")
    pos_of, mfs_of = {}, {}
    if args.corpus:
        for ex in _read_corpus(args.corpus):
            pos_of[ex.id] = ex
    if args.train:
        counts: dict = {}
        for ex in _read_corpus(args.train):
            counts.setdefault(ex.word, []).append(ex.sense)
        mfs_of = {w: mm.sense_order(v)[0] for w, v in counts.items()}
    ids = sorted(set().union(*(sets[n].ids() for n in me_names + [args.sm_system])))
    answers = {}
    for i in ids:
        ex = pos_of.get(i)
        pos = ex.target_pos if ex is not None else "N"
        mfs = mfs_of.get(ex.word) if ex is not None else None
        votes = [(n, _single(sets[n].get(i))) for n in me_names]
        sm = _as_assignment(ex.target_lemma if ex else "", sets[args.sm_system].get(i))
        answers[i] = hybrid.vme_sm(votes, sm, pos=pos, mfs=mfs)
    ev.write_answers(ev.AnswerSet(st.get("system") or "vME+SM", answers), out)
    return 0


def _single(answer):
    return answer if isinstance(answer, str) else None


def _load_gold(path: str) -> dict[str, str]:
    with open(path, encoding="utf-8") as fh:
        head = ""
        for line in fh:
            if line.strip() and not line.startswith("#"):
                head = line.split("\t", 1)[0].strip()
                break
    if head == "EXAMPLE":
        return ev.gold_from_examples(_read_corpus(path))
    if head == "ANSWER":
        return ev.gold_from_answers(ev.read_answers(path))
    raise InputError(f"{path}: neither a corpus nor an answer file")


def _all_answers(paths: Iterable[str]) -> dict[str, ev.AnswerSet]:
    sets: dict[str, ev.AnswerSet] = {}
    for path in paths:
        for name, s in ev.read_answers(path).items():
            if name in sets:
                raise InputError(f"system {name!r} appears in more than one answer file")
            sets[name] = s
    return sets


def cmd_score(args, st: Settings, out: TextIO) -> int:
    gold = _load_gold(args.gold)
    sets = _all_answers(args.answers)
    mode = ev.SOFT if args.soft else st.get("score_mode")
    try:
        reports = [ev.score(sets[name], gold, mode) for name in sorted(sets)]
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from None
    out.write(ev.score_report(reports))
    return 0


def cmd_compare(args, st: Settings, out: TextIO) -> int:
    gold = _load_gold(args.gold)
    sets = _all_answers(args.answers)
    names = [args.a, args.b] if args.a and args.b else sorted(sets)
    if len(names) != 2:
        raise UsageError("name the two systems with --a and --b")
    for n in names:
        if n not in sets:
            raise InputError(f"no answers from system {n!r}")
    try:
        out.write(ev.compare_report(sets[names[0]], sets[names[1]], gold,
                                    st.get("kappa_abstentions")))
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from None
    return 0


def cmd_import_wordnet(args, st: Settings, out: TextIO) -> int:
    root = Path(args.dict_dir)
    with open(root / "data.noun", encoding="utf-8", errors="replace") as data, \
            open(root / "index.noun", encoding="utf-8", errors="replace") as index:
        dom = open(args.domains, encoding="utf-8") if args.domains else None
        try:
            importers.convert_wordnet(data, index, out, dom)
        finally:
            if dom is not None:
                dom.close()
    return 0


def cmd_import_semcor(args, st: Settings, out: TextIO) -> int:
    db = st.lexicon()
    mc.write_corpus(importers.convert_semcor(sorted(args.files), db), out)
    return 0


# --------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="flat key=value settings file (flags win)")
    common.add_argument("--seed", type=int, help="seed for fold shuffling (default 0)")
    common.add_argument("--jobs", type=int, help="worker threads (default 1)")
    common.add_argument("--out", help="output file (default stdout)")

    p = _Parser(prog="wsdkit", description="Word sense disambiguation toolkit.",
                parents=[common])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(parent, name, fn, help_):
        q = parent.add_parser(name, help=help_, parents=[common])
        q.set_defaults(func=fn)
        return q

    def lexicon_opts(q):
        q.add_argument("--lexicon", help="lexicon file")
        q.add_argument("--stopwords", help="stop-word list (default bundled)")

    def me_opts(q):
        q.add_argument("--max-iters", dest="max_iters", type=int)
        q.add_argument("--tol", type=float)
        q.add_argument("--folds", type=int)

    q = add(sub, "validate-lexicon", cmd_validate_lexicon, "check lexicon files")
    q.add_argument("paths", nargs="+")

    q = add(sub, "sm", cmd_sm, "Specification Marks and heuristics over a corpus")
    lexicon_opts(q)
    q.add_argument("corpus")
    q.add_argument("--method", choices=["sm", "cascade", "vote"])
    q.add_argument("--heuristics", help="comma-separated heuristic order")
    q.add_argument("--window", help="'whole' or a noun count such as 15")
    q.add_argument("--domain-lexicon", dest="domain_lexicon")
    q.add_argument("--system", help="system name in the answer file")

    q = add(sub, "domains-build", cmd_domains_build, "build the relevant-domains lexicon")
    lexicon_opts(q)
    q.add_argument("--blacklist", help="comma-separated labels to ignore")

    me = sub.add_parser("me", help="maximum-entropy classifiers")
    me_sub = me.add_subparsers(dest="me_command", required=True, parser_class=_Parser)
    q = add(me_sub, "train", cmd_me_train, "train one classifier per word")
    q.add_argument("corpus")
    q.add_argument("--model-dir", dest="model_dir", required=True)
    q.add_argument("--selection")
    q.add_argument("--selection-map", dest="selection_map",
                   help="SELECT lines from 'me select'")
    q.add_argument("--cv", action="store_true", help="store cross-validated accuracy")
    me_opts(q)
    q = add(me_sub, "classify", cmd_me_classify, "classify with trained models")
    q.add_argument("corpus")
    q.add_argument("--model-dir", dest="model_dir", required=True)
    q.add_argument("--system")
    q = add(me_sub, "cv", cmd_me_cv, "stratified cross-validation per word")
    q.add_argument("corpus")
    q.add_argument("--selection")
    me_opts(q)
    q = add(me_sub, "select", cmd_me_select, "pick the best feature selection")
    q.add_argument("corpus")
    q.add_argument("--candidates", help="comma-separated selection strings")
    q.add_argument("--mode", choices=[ms.PER_WORD, ms.PER_POS])
    me_opts(q)

    hy = sub.add_parser("hybrid", help="combined systems")
    hy_sub = hy.add_subparsers(dest="hybrid_command", required=True, parser_class=_Parser)
    q = add(hy_sub, "prelabel", cmd_hybrid_prelabel, "SM with ME-fixed context nouns")
    lexicon_opts(q)
    q.add_argument("corpus")
    q.add_argument("--model-dir", dest="model_dir", required=True)
    q.add_argument("--threshold", type=float)
    q.add_argument("--window")
    q.add_argument("--system")
    q = add(hy_sub, "domainfeat", cmd_hybrid_domainfeat, "ME with domain features")
    lexicon_opts(q)
    q.add_argument("train")
    q.add_argument("test")
    q.add_argument("--domain-lexicon", dest="domain_lexicon")
    q.add_argument("--selection")
    q.add_argument("--system")
    me_opts(q)
    q = add(hy_sub, "vmesm", cmd_hybrid_vmesm, "vote of three ME systems and SM")
    q.add_argument("answers", nargs="+")
    q.add_argument("--me-systems", dest="me_systems", default=",".join(ms.SYSTEM_PRIORITY))
    q.add_argument("--sm-system", dest="sm_system", default="SM")
    q.add_argument("--corpus", help="test corpus, for POS (SM only votes on nouns)")
    q.add_argument("--train", help="training corpus, for the MFS tie-break")
    q.add_argument("--system")

    q = add(sub, "score", cmd_score, "precision / recall / coverage")
    q.add_argument("answers", nargs="+")
    q.add_argument("--gold", required=True, help="corpus or answer file")
    q.add_argument("--soft", action="store_true", help="partial credit for reduced answers")

    q = add(sub, "compare", cmd_compare, "agreement, wins/ties/loses and kappa")
    q.add_argument("answers", nargs="+")
    q.add_argument("--gold", required=True)
    q.add_argument("--a")
    q.add_argument("--b")

    q = add(sub, "import-wordnet", cmd_import_wordnet, "convert a WordNet dict directory")
    q.add_argument("dict_dir")
    q.add_argument("--domains", help="offset-n<TAB>labels file")
    q = add(sub, "import-semcor", cmd_import_semcor, "convert SemCor tag files")
    lexicon_opts(q)
    q.add_argument("files", nargs="+")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        st = Settings(args)
        out = _open_out(args)
        buf = io.StringIO()
        try:
            status = args.func(args, st, buf)
            out.write(buf.getvalue())
        finally:
            if out is not sys.stdout:
                out.close()
        return status
    except (UsageError, SelectionError) as exc:
        print(f"wsdkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputError, LexiconError, mc.CorpusError, ev.AnswerFormatError, OSError) as exc:
        print(f"wsdkit: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (AlgorithmError, mm.TrainingError, ms.CrossValidationError, ValueError) as exc:
        print(f"wsdkit: cannot proceed: {exc}", file=sys.stderr)
        return EXIT_ALGO


if __name__ == "__main__":
    sys.exit(main())
