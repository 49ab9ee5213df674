import os
import subprocess
import sys

import pytest

from dsys.cli import main
from dsys.io_dsys import ParseError, format_instance, load_instance, \
    parse_instance

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
INSTANCES = os.path.join(ROOT, "instances")
MALFORMED = os.path.join(ROOT, "tests", "data", "malformed")


def run_cli(*argv):
    return main(list(argv))


class TestFormat:
    def test_roundtrip_shipped(self):
        for name in sorted(os.listdir(INSTANCES)):
            path = os.path.join(INSTANCES, name)
            text = open(path).read()
            obj = parse_instance(text, path=path)
            assert format_instance(obj) == text

    def test_parse_rejects_malformed(self):
        for name in sorted(os.listdir(MALFORMED)):
            with pytest.raises(ParseError):
                load_instance(os.path.join(MALFORMED, name))

    def test_morphism_file(self, tmp_path):
        src = open(os.path.join(INSTANCES, "p1.dsys")).read()
        (tmp_path / "a.dsys").write_text(src)
        (tmp_path / "b.dsys").write_text(src)
        mor = "\n".join([
            "dsys 1", "kind morphism",
            "source a.dsys", "target b.dsys",
            "[matrix]", "1 0", "0 1", ""])
        (tmp_path / "f.dsys").write_text(mor)
        f = load_instance(str(tmp_path / "f.dsys"))
        f.check()


class TestExitCodes:
    def test_validate_pass(self, capsys):
        assert run_cli("validate", os.path.join(INSTANCES, "p1.dsys")) == 0

    def test_validate_math_fail(self):
        path = os.path.join(ROOT, "tests", "data", "non_nilpotent.dsys")
        assert run_cli("validate", path) == 1

    def test_validate_parse_fail(self):
        for name in sorted(os.listdir(MALFORMED)):
            assert run_cli("validate", os.path.join(MALFORMED, name)) == 2

    def test_missing_file(self):
        assert run_cli("validate", "/nonexistent/x.dsys") == 2

    def test_compute_expect_match(self, tmp_path):
        out = str(tmp_path / "tau.txt")
        code = run_cli("compute", os.path.join(INSTANCES, "p1.dsys"),
                       "--what", "tau", "-o", out)
        assert code == 0 and os.path.exists(out)

    def test_verify(self):
        assert run_cli("verify", os.path.join(INSTANCES, "p1.dsys"),
                       "--theorem", "tau-postconditions") == 0

    def test_generate_roundtrip(self, tmp_path):
        out = str(tmp_path / "gen.dsys")
        code = run_cli("generate", "--kind", "dh", "--n", "1", "--dims",
                       "4", "--seed", "3", "--mode", "transport",
                       "-o", out)
        assert code == 0
        obj = load_instance(out)
        assert obj.validate().ok


class TestDeterminism:
    def test_artifacts_byte_identical(self, tmp_path):
        a, b = str(tmp_path / "a.txt"), str(tmp_path / "b.txt")
        for out in (a, b):
            run_cli("compute", os.path.join(INSTANCES, "p1_dh.dsys"),
                    "--what", "fhat", "-o", out)
        assert open(a).read() == open(b).read()

    def test_campaign_outputs_identical(self, tmp_path):
        d1, d2 = str(tmp_path / "c1"), str(tmp_path / "c2")
        for d in (d1, d2):
            code = run_cli("campaign", "--theorem", "classification",
                           "--count", "2", "--n", "1", "--dims", "4",
                           "--kind", "deligne", "--t-grid", "2,4",
                           "--out-dir", d)
            assert code == 0
        name = "campaign-classification.txt"
        assert open(os.path.join(d1, name)).read() == \
            open(os.path.join(d2, name)).read()
