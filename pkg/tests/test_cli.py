import json

import pytest

from surfbraid.cli import SUITES, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestSingleShot:
    def test_abelianize(self, capsys):
        code, out, _ = run(capsys, "abelianize", "BnK", "3")
        assert code == 0
        assert out.strip() == "free_rank=1 torsion=[2,2]"

    def test_abelianize_genus(self, capsys):
        code, out, _ = run(capsys, "abelianize", "BnNg", "3", "3")
        assert code == 0
        assert out.strip() == "free_rank=3 torsion=[2]"

    def test_catalog(self, capsys):
        code, out, _ = run(capsys, "catalog", "Pi1K", "1")
        assert code == 0
        assert "generators: a[1] b[1]" in out
        assert "relator:" in out

    def test_nq(self, capsys):
        code, out, _ = run(capsys, "nq", "BnK", "3", "3")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "layer1: free_rank=1 torsion=[2,2]"
        assert lines[1] == "layer2: free_rank=0 torsion=[]"

    def test_tower(self, capsys):
        code, out, _ = run(capsys, "tower", "P2K_reduced", "2", "3")
        assert code == 0
        assert out.strip() == "orders=[1, 16, 512]"

    def test_solve_trivial(self, capsys):
        code, out, _ = run(capsys, "solve", "2", "a1*a2*a1^-1*a2^-1")
        assert code == 0
        assert out.strip() == "trivial"

    def test_solve_nontrivial(self, capsys):
        code, out, _ = run(capsys, "solve", "2", "a2*b2")
        assert code == 0
        assert out.strip() != "trivial"

    def test_unknown_family_is_usage_error(self, capsys):
        code, _, err = run(capsys, "abelianize", "Nope", "2")
        assert code == 2
        assert "error:" in err

    def test_bad_word_is_usage_error(self, capsys):
        code, _, err = run(capsys, "solve", "2", "a1*")
        assert code == 2

    def test_unknown_subcommand(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_unknown_suite(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["verify", "nope"])
        assert exc.value.code == 2


class TestVerify:
    def _report(self, capsys, suite, *extra):
        code, out, _ = run(capsys, "verify", suite, *extra)
        return code, json.loads(out)

    def test_schema(self, capsys):
        code, rep = self._report(capsys, "section")
        assert code == 0
        assert rep["suite"] == "section"
        assert set(rep["bounds"]) >= {"max_cosets", "class", "depth", "seed"}
        for claim in rep["claims"]:
            assert {"id", "verdict", "ms"} <= set(claim)
            assert claim["verdict"] in ("PASS", "FAIL", "INDETERMINATE")

    def test_claims_sorted(self, capsys):
        _, rep = self._report(capsys, "center")
        ids = [c["id"] for c in rep["claims"]]
        assert ids == sorted(ids)

    def test_colchete_eight_claims(self, capsys):
        code, rep = self._report(capsys, "colchete")
        assert code == 0
        assert len(rep["claims"]) == 8
        assert all(c["verdict"] == "PASS" for c in rep["claims"])

    @pytest.mark.parametrize("suite", ["action", "gammaP2", "gamma2P2",
                                       "torus-derived", "klein-derived",
                                       "bnT1-instances", "separation"])
    def test_fast_suites_pass(self, capsys, suite):
        code, rep = self._report(capsys, suite)
        assert code == 0
        assert all(c["verdict"] == "PASS" for c in rep["claims"])

    def test_json_file(self, capsys, tmp_path):
        path = tmp_path / "report.json"
        code, rep = self._report(capsys, "section", "--json", str(path))
        assert code == 0
        assert json.loads(path.read_text()) == rep

    def test_suite_names_complete(self):
        assert len(SUITES) == 12


def test_deterministic_reports(capsys):
    code1, out1, _ = run(capsys, "verify", "center")
    code2, out2, _ = run(capsys, "verify", "center")
    r1, r2 = json.loads(out1), json.loads(out2)
    strip = lambda r: [(c["id"], c["verdict"]) for c in r["claims"]]
    assert strip(r1) == strip(r2)
