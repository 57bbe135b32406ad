from pathlib import Path

import pytest

import lfm2

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


def read(name):
    return (FIXTURES / name).read_text()


@pytest.mark.parametrize("name", ["eval.elf", "plus.elf", "subred.elf"])
def test_fixtures_check(name):
    report = lfm2.check(read(name))
    assert report
    assert all(entry["ok"] for entry in report)


def test_missing_clause_is_reported():
    report = lfm2.check(read("negative/missing_clause.elf"))
    failed = [entry for entry in report if not entry["ok"]]
    assert [entry["error_kind"] for entry in failed] == ["CoverageFailure"]
    assert failed[0]["family"] == "subred"


def test_solve_addition():
    found, text = lfm2.solve(read("plus.elf"), "D : plus (s z) (s z) N")
    assert found
    assert "s (s z)" in text
    found, _ = lfm2.solve(read("plus.elf"), "plus (s z) z z")
    assert not found


def test_solve_budget():
    with pytest.raises(lfm2.Error) as info:
        lfm2.solve(read("eval.elf"), "eval (app (abs [x] app x x) (abs [x] app x x)) V", depth=100)
    assert info.value.kind == "BudgetExhausted"


@pytest.mark.parametrize("name", ["plus.elf", "subred.elf"])
def test_prove_verify_round_trip(name):
    text = read(name)
    cert = lfm2.prove(text)
    assert cert.startswith("m2proof/1")
    assert lfm2.prove(text) == cert
    lfm2.verify(text, cert)


def test_verify_rejects_a_changed_signature():
    text = read("plus.elf")
    cert = lfm2.prove(text)
    changed = text.replace("plus-z : plus z N N.", "plus-z : plus z N (s N).")
    assert changed != text
    with pytest.raises(lfm2.Error) as info:
        lfm2.verify(changed, cert)
    assert info.value.category == "m2"


def test_malformed_certificate():
    with pytest.raises(lfm2.Error) as info:
        lfm2.verify(read("plus.elf"), "m2proof/2\n")
    assert info.value.kind == "VersionMismatch"


def test_trace_header():
    assert lfm2.trace(read("plus.elf")).startswith("covtrace/1")


def test_syntax_error_kind():
    with pytest.raises(lfm2.Error) as info:
        lfm2.check("tm : type.\nc : foo.\n")
    assert info.value.category == "syntax"
    assert info.value.kind == "UndeclaredIdentifier"


def test_print_signature_makes_implicits_explicit():
    printed = lfm2.print_signature(read("plus.elf"))
    assert "{N:nat}" in printed.replace(" ", "")
