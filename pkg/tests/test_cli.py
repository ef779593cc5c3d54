import io
import json
import shutil

import pytest

from conftest import FIXTURES
from whitehead_dgl.cli import EXIT_CAP, EXIT_INVALID, EXIT_OK, run


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out=out)
    return code, out.getvalue()


def fixture(name):
    return str(FIXTURES / name)


def test_validate_ok_and_invalid():
    code, text = call("validate", fixture("example6_7.dgl"))
    assert code == EXIT_OK
    code, text = call("validate", fixture("bad_d2.dgl"))
    assert code == EXIT_INVALID and "d∘d" in text


def test_homology_json_is_byte_stable():
    args = ("homology", fixture("example6_7.dgl"), "--degrees", "2..4", "--mode", "free", "--json")
    code1, first = call(*args)
    code2, second = call(*args)
    assert code1 == code2 == EXIT_OK
    assert first == second
    report = json.loads(first)
    assert report["schema"] == 1 and report["status"] == 0
    assert len(report["input"]["sha256"]) == 64


def test_product_reports_nonboundary():
    code, text = call("product", fixture("example6_7.dgl"), "--mode", "free", "--classes", "2.0,3.0",
                      "--cap", "5", "--json")
    assert code == EXIT_OK
    result = json.loads(text)["result"]
    assert any(c != "0" for c in result["coordinates"])


def test_cap_too_low_exit_code():
    code, text = call("wl", fixture("example6_7.dgl"), "--mode", "free", "--cap", "9", "--json")
    assert code == EXIT_CAP
    assert json.loads(text)["error"]["type"] == "CapTooLow"


def test_usage_errors_exit_one():
    code, text = call("homology", fixture("example6_7.dgl"), "--degrees", "x..y")
    assert code == EXIT_INVALID
    code, text = call("frobnicate")
    assert code == EXIT_INVALID
    code, text = call("validate", "/nonexistent/file.dgl", "--json")
    assert code == EXIT_INVALID and json.loads(text)["error"]["type"] == "UsageError"


def test_parse_error_has_position(tmp_path):
    bad = tmp_path / "bad.dgl"
    bad.write_text("algebra L free-dgl\n  a : 1\n  d a = [a,q]\nend\n")
    code, text = call("validate", str(bad), "--json")
    err = json.loads(text)["error"]
    assert code == EXIT_INVALID and err["type"] == "ParseError" and err["line"] == 3


def test_wl_and_sphere_commands():
    code, text = call("wl", fixture("cp2_to_s4_model.dgl"), "--mode", "based", "--cap", "8")
    assert code == EXIT_OK and "WL (based) = 2" in text
    code, text = call("sphere", fixture("cp2_to_s4.prob"), "--cross-check", "--json")
    result = json.loads(text)["result"]
    assert code == EXIT_OK
    assert result["based"] == 2 and result["free"] == 1
    assert result["cross_check"]["agrees"]


def test_suite_over_bundled_fixtures(tmp_path):
    code, text = call("suite", str(FIXTURES), "--report-dir", str(tmp_path))
    assert code == EXIT_OK, text
    assert list(tmp_path.glob("*.json"))


def test_suite_reports_a_failed_expectation(tmp_path):
    shutil.copy(FIXTURES / "s2xs2_to_s4.prob", tmp_path / "a.prob")
    text = (tmp_path / "a.prob").read_text().replace("based = 2 free = 2", "based = 1 free = 2")
    (tmp_path / "a.prob").write_text(text)
    code, out = call("suite", str(tmp_path))
    assert code == EXIT_INVALID


def test_console_entry_point():
    from whitehead_dgl.cli import main
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
