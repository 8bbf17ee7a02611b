"""Converters from WordNet database files and SemCor tag files.

WordNet: ``data.noun`` and ``index.noun`` from a WordNet ``dict``
directory become a noun lexicon in the package's text format.  Synset
keys are ``<first lemma>#<its sense number>`` (``plant#2``), falling back
to the byte offset when the first lemma is not indexed.  An optional
domain file with lines ``<offset>-n<TAB>label label ...`` (the layout of
the WordNet Domains distribution) adds DOMAIN records.

SemCor: each noun with a ``wnsn`` sense number becomes one corpus
example whose tokens span seven tagged nouns on either side of it.
"""

from __future__ import annotations

import html
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, TextIO

from .lexkb import LexicalDb, normalize_lemma
from .maxent.corpus import AnnotatedToken, TrainingExample

WINDOW_NOUNS = 7


@dataclass
class _RawSynset:
    offset: str
    lemmas: list[str]
    hypernyms: list[str]
    gloss: str


def _clean_lemma(word: str) -> str:
    # adjective markers such as "(a)" never occur on nouns but strip anyway
    return re.sub(r"\([a-z]+\)$", "", word).replace("_", " ").lower()


def read_wordnet_data(source: TextIO) -> Iterator[_RawSynset]:
    for line in source:
        if line.startswith("  ") or not line.strip():
            continue  # licence header
        body, _, gloss = line.partition(" | ")
        f = body.split()
        offset, w_cnt = f[0], int(f[3], 16)
        lemmas = [_clean_lemma(f[4 + 2 * i]) for i in range(w_cnt)]
        k = 4 + 2 * w_cnt
        p_cnt = int(f[k])
        hypers = []
        for i in range(p_cnt):
            sym, target, pos = f[k + 1 + 4 * i: k + 4 + 4 * i]
            if sym in ("@", "@i") and pos == "n":
                hypers.append(target)
        yield _RawSynset(offset, lemmas, hypers, gloss.strip())


def read_wordnet_index(source: TextIO) -> dict[str, list[str]]:
    out = {}
    for line in source:
        if line.startswith("  ") or not line.strip():
            continue
        f = line.split()
        lemma = _clean_lemma(f[0])
        synset_cnt, p_cnt = int(f[2]), int(f[3])
        offsets = f[4 + p_cnt + 2:]
        out[lemma] = offsets[:synset_cnt]
    return out


def read_domain_map(source: TextIO) -> dict[str, list[str]]:
    out = {}
    for line in source:
        f = line.split()
        if len(f) < 2 or not f[0].endswith("-n"):
            continue
        out[f[0][:-2]] = f[1:]
    return out


def _tsv_safe(text: str) -> str:
    return text.replace("\t", " ").replace("\n", " ")


def convert_wordnet(data: TextIO, index: TextIO, out: TextIO,
                    domains: TextIO | None = None) -> int:
    """Write a noun lexicon; returns the number of synsets written."""
    raw = list(read_wordnet_data(data))
    idx = read_wordnet_index(index)
    dom = read_domain_map(domains) if domains is not None else {}
    keys = {}
    for s in raw:
        first = s.lemmas[0]
        ranks = idx.get(first, [])
        keys[s.offset] = (f"{first.replace(' ', '_')}#{ranks.index(s.offset) + 1}"
                          if s.offset in ranks else s.offset)
    if len(set(keys.values())) != len(keys):
        keys = {o: o for o in keys}  # fall back to offsets rather than collide
    out.write("# converted from WordNet data.noun / index.noun\n")
    for s in raw:
        lemmas = ",".join(dict.fromkeys(_tsv_safe(l).replace(",", " ") for l in s.lemmas))
        out.write(f"SYNSET\tN\t{keys[s.offset]}\t{lemmas}\t{_tsv_safe(s.gloss)}\n")
    for s in raw:
        for h in s.hypernyms:
            if h in keys:
                out.write(f"REL\thypernym\tN:{keys[s.offset]}\tN:{keys[h]}\n")
    for s in raw:
        for label in dom.get(s.offset, []):
            out.write(f"DOMAIN\tN:{keys[s.offset]}\t{label}\n")
    for lemma in sorted(idx):
        ids = [keys[o] for o in idx[lemma] if o in keys]
        if ids:
            out.write(f"INDEX\t{_tsv_safe(lemma).replace(',', ' ')}\tN\t{','.join(ids)}\n")
    return len(raw)


# --------------------------------------------------------------------------
# SemCor

_TAG_RE = re.compile(r"<(wf|punc)([^>]*)>([^<]*)</\1>")
_ATTR_RE = re.compile(r"(\w+)=(\"[^\"]*\"|\S+)")


@dataclass
class _Tagged:
    token: AnnotatedToken
    wnsn: int | None


def read_semcor(source: TextIO) -> list[_Tagged]:
    """Flatten one tag file into tokens, keeping the first sense number."""
    out = []
    for m in _TAG_RE.finditer(source.read()):
        kind, attrs, text = m.groups()
        text = html.unescape(text)
        a = {k: v.strip('"') for k, v in _ATTR_RE.findall(attrs)}
        if kind == "punc":
            out.append(_Tagged(AnnotatedToken(text, text, "PUNCT"), None))
            continue
        pos = a.get("pos", "X")
        lemma = a.get("lemma", text).lower()
        wnsn = None
        if "wnsn" in a:
            first = re.split(r"[;,]", a["wnsn"])[0]
            if first.isdigit() and int(first) > 0:
                wnsn = int(first)
        out.append(_Tagged(AnnotatedToken(text, lemma, pos), wnsn))
    return out


def semcor_examples(tagged: list[_Tagged], db: LexicalDb, prefix: str,
                    window: int = WINDOW_NOUNS) -> Iterator[TrainingExample]:
    nouns = [i for i, t in enumerate(tagged)
             if t.token.is_noun and db.senses(normalize_lemma(t.token.lemma))]
    for rank, i in enumerate(nouns):
        t = tagged[i]
        if t.wnsn is None:
            continue
        senses = db.senses(normalize_lemma(t.token.lemma))
        if t.wnsn > len(senses):
            continue
        lo = nouns[max(0, rank - window)]
        hi = nouns[min(len(nouns) - 1, rank + window)]
        tokens = tuple(x.token for x in tagged[lo:hi + 1])
        yield TrainingExample(f"{prefix}.{i}", t.token.lemma, "N", senses[t.wnsn - 1].key,
                              tokens, i - lo)


def convert_semcor(paths: Iterable[str | Path], db: LexicalDb) -> Iterator[TrainingExample]:
    for path in paths:
        path = Path(path)
        with open(path, encoding="utf-8", errors="replace") as fh:
            tagged = read_semcor(fh)
        yield from semcor_examples(tagged, db, path.name)
