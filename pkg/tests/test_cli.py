import io
import re
from contextlib import redirect_stderr, redirect_stdout

import pytest

from conftest import cue_corpus
from wsdkit import cli
from wsdkit.eval import read_answers
from wsdkit.lexkb import fixture_path
from wsdkit.maxent.corpus import write_corpus

PLANT_LEX = str(fixture_path("plant.lex"))
PLANT_CORPUS = str(fixture_path("plant.corpus"))
INTEREST = str(fixture_path("interest.corpus"))


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        try:
            code = cli.main([str(a) for a in argv])
        except SystemExit as exc:
            code = exc.code
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def bank_corpus(tmp_path):
    path = tmp_path / "bank.corpus"
    with open(path, "w", encoding="utf-8") as fh:
        write_corpus(cue_corpus(n_per_sense=12, noise=0.1, seed=3), fh)
    return path


class TestSm:
    def test_plant_sentence(self):
        code, out, _ = run("sm", PLANT_CORPUS, "--lexicon", PLANT_LEX)
        assert code == 0
        got = read_answers(io.StringIO(out))["SM"].answers
        assert got == {"plant.1": "plant#2", "plant.2": "tree#1", "plant.3": "perennial#1",
                       "plant.4": None}

    def test_pipes_into_score_and_compare(self, tmp_path):
        sm = tmp_path / "sm.ans"
        vote = tmp_path / "vote.ans"
        assert run("sm", PLANT_CORPUS, "--lexicon", PLANT_LEX, "--out", sm)[0] == 0
        assert run("sm", PLANT_CORPUS, "--lexicon", PLANT_LEX, "--method", "vote",
                   "--out", vote)[0] == 0
        code, out, _ = run("score", sm, "--gold", PLANT_CORPUS)
        assert code == 0 and "SM.recall=0.75" in out and "SM.precision=1" in out
        code, out, _ = run("compare", sm, vote, "--gold", PLANT_CORPUS)
        assert code == 0 and "compare.wins=" in out

    @pytest.mark.parametrize("method", ["sm", "cascade", "vote"])
    def test_jobs_do_not_change_output(self, method):
        one = run("sm", PLANT_CORPUS, "--lexicon", PLANT_LEX, "--method", method)
        four = run("sm", PLANT_CORPUS, "--lexicon", PLANT_LEX, "--method", method,
                   "--jobs", 4)
        assert one[0] == 0 and one[1] == four[1]

    def test_config_and_flag_precedence(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(f"lexicon = {PLANT_LEX}\nmethod = cascade\nsystem = FROMCFG\n")
        _, out, _ = run("sm", PLANT_CORPUS, "--config", cfg)
        assert "FROMCFG" in read_answers(io.StringIO(out))
        _, out, _ = run("sm", PLANT_CORPUS, "--config", cfg, "--system", "FLAG")
        assert set(read_answers(io.StringIO(out))) == {"FLAG"}


class TestScore:
    def test_perfect(self, tmp_path):
        ans = tmp_path / "gold.ans"
        ans.write_text("ANSWER\tG\ta\tx#1\nANSWER\tG\tb\tx#2\n")
        code, out, _ = run("score", ans, "--gold", ans)
        assert code == 0
        for key in ("precision", "recall", "coverage"):
            assert f"G.{key}=1\n" in out

    def test_soft(self, tmp_path):
        gold = tmp_path / "gold.ans"
        gold.write_text("ANSWER\tG\ta\tx#1\n")
        ans = tmp_path / "sys.ans"
        ans.write_text("ANSWER\tS\ta\tx#1,x#2\n")
        assert "S.recall=0\n" in run("score", ans, "--gold", gold)[1]
        assert "S.recall=0.5\n" in run("score", ans, "--gold", gold, "--soft")[1]


class TestMe:
    def test_cv_is_deterministic(self, bank_corpus):
        a = run("me", "cv", bank_corpus, "--selection", "0sp", "--seed", 5)
        b = run("me", "cv", bank_corpus, "--selection", "0sp", "--seed", 5)
        assert a[0] == 0 and a[1] == b[1] and a[1]

    def test_train_then_classify(self, bank_corpus, tmp_path):
        models = tmp_path / "models"
        assert run("me", "train", bank_corpus, "--model-dir", models,
                   "--selection", "0sp", "--cv")[0] == 0
        assert sorted(p.name for p in models.iterdir()) == ["bank.N.memodel"]
        assert "META\tcv_accuracy" in (models / "bank.N.memodel").read_text()
        code, out, _ = run("me", "classify", bank_corpus, "--model-dir", models)
        assert code == 0
        ans = read_answers(io.StringIO(out))["ME"]
        assert len(ans) == 24 and all(a is not None for a in ans.answers.values())

    def test_select(self, bank_corpus):
        code, out, _ = run("me", "select", bank_corpus, "--candidates", "0,sp,0sp")
        assert code == 0
        assert re.search(r"^SELECT\tbank,N\t\S+$", out, re.M)

    def test_interest_cv_drops_small_senses(self):
        # three examples cannot fill three folds for either sense
        code, _, err = run("me", "cv", INTEREST, "--selection", "0")
        assert code == 3 and "enough examples" in err


class TestHybrid:
    def test_prelabel_without_confident_models_is_sm(self, tmp_path):
        models = tmp_path / "m"
        assert run("me", "train", PLANT_CORPUS, "--model-dir", models,
                   "--selection", "0")[0] == 0
        _, sm_out, _ = run("sm", PLANT_CORPUS, "--lexicon", PLANT_LEX)
        code, out, _ = run("hybrid", "prelabel", PLANT_CORPUS, "--lexicon", PLANT_LEX,
                           "--model-dir", models)
        assert code == 0
        assert read_answers(io.StringIO(out))["SM+ME"].answers == \
            read_answers(io.StringIO(sm_out))["SM"].answers

    def test_vmesm_unanimous(self, tmp_path):
        files = []
        for name, sense in [("MEbfs.pos", "a#1"), ("MEbfs", "a#1"), ("MEfix", "a#1"),
                            ("SM", "a#2")]:
            p = tmp_path / f"{name}.ans"
            p.write_text(f"ANSWER\t{name}\ti1\t{sense}\n")
            files.append(p)
        code, out, _ = run("hybrid", "vmesm", *files)
        assert code == 0
        assert read_answers(io.StringIO(out))["vME+SM"].answers == {"i1": "a#1"}

    def test_domainfeat_needs_lexicon(self, bank_corpus):
        code, _, err = run("hybrid", "domainfeat", bank_corpus, bank_corpus,
                           "--lexicon", PLANT_LEX)
        assert code == 1 and "domain-lexicon" in err


class TestExitCodes:
    def test_unknown_command(self):
        assert run("frobnicate")[0] == 1

    def test_bad_selection(self, bank_corpus):
        code, _, err = run("me", "cv", bank_corpus, "--selection", "01W")
        assert code == 1 and "position 1" in err

    def test_bad_window(self):
        assert run("sm", PLANT_CORPUS, "--lexicon", PLANT_LEX, "--window", "x")[0] == 1

    def test_missing_lexicon_setting(self):
        assert run("sm", PLANT_CORPUS)[0] == 1

    def test_malformed_corpus(self, tmp_path):
        bad = tmp_path / "bad.corpus"
        bad.write_text("EXAMPLE\tx\n")
        assert run("sm", bad, "--lexicon", PLANT_LEX)[0] == 2

    def test_missing_file(self, tmp_path):
        assert run("score", tmp_path / "none.ans", "--gold", PLANT_CORPUS)[0] == 2

    def test_validate_lexicon(self, tmp_path):
        bad = tmp_path / "bad.lex"
        bad.write_text("REL\thypernym\tN:a#1\tN:b#1\n")
        code, out, _ = run("validate-lexicon", PLANT_LEX, bad)
        assert code == 2 and out.startswith("OK\t") and "FAIL\t" in out

    def test_training_precondition(self, tmp_path):
        one = tmp_path / "one.corpus"
        with open(one, "w", encoding="utf-8") as fh:
            write_corpus(cue_corpus(n_per_sense=1), fh)
        assert run("me", "cv", one, "--selection", "0")[0] == 3


WN_DATA = """\
  1 licence header
00001740 03 n 01 entity 0 000 | that which is perceived
00002000 03 n 01 organism 0 001 @ 00001740 n 0000 | a living thing
00003000 03 n 02 plant 0 flora 0 001 @ 00002000 n 0000 | a living organism lacking locomotion
00004000 03 n 01 plant 0 001 @ 00001740 n 0000 | buildings for carrying on industrial labor
"""
WN_INDEX = """\
  1 licence header
entity n 1 0 1 0 00001740
flora n 1 1 @ 1 0 00003000
organism n 1 1 @ 1 0 00002000
plant n 2 1 @ 2 0 00004000 00003000
"""
SEMCOR = """<s snum=1>
<wf cmd=done pos=DT>The</wf>
<wf cmd=done pos=NN lemma=plant wnsn=2 lexsn=1:03:00::>plant</wf>
<wf cmd=done pos=VB lemma=be wnsn=1>is</wf>
<wf cmd=done pos=DT>an</wf>
<wf cmd=done pos=NN lemma=organism wnsn=1 lexsn=1:03:00::>organism</wf>
<punc>.</punc>
</s>
"""


class TestImport:
    def test_wordnet_then_semcor(self, tmp_path):
        (tmp_path / "data.noun").write_text(WN_DATA)
        (tmp_path / "index.noun").write_text(WN_INDEX)
        lex = tmp_path / "wn.lex"
        assert run("import-wordnet", tmp_path, "--out", lex)[0] == 0
        text = lex.read_text()
        assert "SYNSET\tN\tplant#2\tplant,flora\t" in text
        assert "REL\thypernym\tN:plant#2\tN:organism#1" in text
        assert run("validate-lexicon", lex)[0] == 0
        tags = tmp_path / "br-a01"
        tags.write_text(SEMCOR)
        code, out, _ = run("import-semcor", tags, "--lexicon", lex)
        assert code == 0
        heads = [l.split("\t") for l in out.splitlines() if l.startswith("EXAMPLE")]
        assert [(h[2], h[4]) for h in heads] == [("plant", "plant#2"), ("organism", "organism#1")]
