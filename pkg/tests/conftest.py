import random

import pytest

from wsdkit.lexkb import fixture
from wsdkit.maxent.corpus import AnnotatedToken, TrainingExample


@pytest.fixture(scope="session")
def plant_db():
    return fixture("plant")


@pytest.fixture(scope="session")
def sister_db():
    return fixture("sister")


@pytest.fixture(scope="session")
def plane_db():
    return fixture("plane")


@pytest.fixture(scope="session")
def year_db():
    return fixture("year")


@pytest.fixture(scope="session")
def genotype_db():
    return fixture("genotype")


def make_example(ex_id, lemma, sense, left=(), right=(), pos="N", tag="NN"):
    """Example from (surface, lemma, tag) triples around the target."""
    toks = [AnnotatedToken(s, l, t) for s, l, t in left]
    toks.append(AnnotatedToken(lemma, lemma, tag))
    toks += [AnnotatedToken(s, l, t) for s, l, t in right]
    return TrainingExample(ex_id, lemma, pos, sense, tuple(toks), len(left))


def cue_corpus(lemma="bank", n_per_sense=9, seed=0, noise=0.0, pos="N"):
    """Two senses told apart by the word right before the target.

    With probability ``noise`` the cue is swapped, so the data stay
    non-separable when noise > 0.
    """
    rng = random.Random(seed)
    cues = {f"{lemma}#1": ("river", "muddy"), f"{lemma}#2": ("savings", "central")}
    out = []
    k = 0
    for sense, words in cues.items():
        for i in range(n_per_sense):
            cue = words[i % 2]
            if rng.random() < noise:
                other = [s for s in cues if s != sense][0]
                cue = cues[other][i % 2]
            filler = rng.choice(["old", "new", "big"])
            ex = make_example(f"{lemma}.{k:03d}", lemma, sense,
                              left=[("the", "the", "DT"), (filler, filler, "JJ"),
                                    (cue, cue, "NN")],
                              right=[("was", "be", "VB"), ("closed", "close", "VB")],
                              pos=pos)
            out.append(ex)
            k += 1
    return out


# one status line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
