"""Identity checks and the audit sweep.

Closed-form anchors: at k=1 the recurrence specializes to
B(1,2) + B(2,1) = 1 = B(1,1); the transform spot value at s=t=2, g=1/2
with the unit classical kernel is Gamma(1/2) B(3/2, 3/2) = pi**1.5 / 8;
the claimed gamma closed form at s=1/2, unit classical parameters,
prints -1/4 while the integral is Gamma(1/2).
"""

import json
import math

import pytest

from kbeta.errors import DomainError
from kbeta.extfun import ExtBetaArgs, extended_beta_k
from kbeta.identities import (
    AUDIT_SECTIONS,
    DEFAULT_GRID,
    EMPTY_GRID,
    GRIDS,
    SMOKE_GRID,
    IdentityReport,
    MellinQuery,
    Verdict,
    audit_passed,
    check_functional_relation,
    check_lemma_closed_form,
    check_mellin,
    check_reductions,
    check_representation,
    check_symmetry,
    render_audit_csv,
    render_audit_json,
    run_audit,
)
from kbeta.kcore import GammaMode, MLParams
from kbeta.repr import CANONICAL_REPRESENTATIONS, Representation

CL = GammaMode.CLASSICAL
KD = GammaMode.K_DEFORMED

ANCHOR_ARGS = ExtBetaArgs(1.7, 0.9, 1.3)
ANCHOR_PARAMS = MLParams(k=1.5, p=0.8, q=1.1, r=1.2, denominator_gamma=CL)
UNIT = MLParams(k=1.0, p=1.0, q=1.0, r=1.0, denominator_gamma=CL)

MELLIN_SPOT = math.pi**1.5 / 8.0


# ---------------------------------------------------------------- recurrence


@pytest.mark.parametrize("k", [0.5, 1.0, 1.5, 2.0])
def test_functional_relation_holds_across_k(k):
    params = MLParams(k=k, p=0.8, q=1.1, r=1.2, denominator_gamma=CL)
    rep = check_functional_relation(ANCHOR_ARGS, params)
    assert rep.verdict is Verdict.HOLDS
    assert rep.rel_diff < 1e-12


def test_functional_relation_holds_deformed_mode():
    params = MLParams(k=2.0, p=1.0, q=1.0, r=1.0, denominator_gamma=KD)
    rep = check_functional_relation(ExtBetaArgs(0.6, 2.5, 0.5), params)
    assert rep.verdict is Verdict.HOLDS


def test_functional_relation_unit_point_exact():
    # B(1,2) + B(2,1) = 1 = B(1,1)
    rep = check_functional_relation(ExtBetaArgs(1.0, 1.0, 0.0), UNIT)
    assert rep.verdict is Verdict.HOLDS
    assert rep.lhs == pytest.approx(1.0, rel=1e-12)
    assert rep.rhs == pytest.approx(1.0, rel=1e-12)


def test_functional_relation_shift_is_k_not_one():
    # at k != 1 a unit shift breaks the relation by a visible margin,
    # which is why the check shifts the arguments by k
    s, t, v = ANCHOR_ARGS.s, ANCHOR_ARGS.t, ANCHOR_ARGS.v
    a = extended_beta_k(s, t + 1.0, v, ANCHOR_PARAMS)
    b = extended_beta_k(s + 1.0, t, v, ANCHOR_PARAMS)
    c = extended_beta_k(s, t, v, ANCHOR_PARAMS)
    gap = abs(a.value + b.value - c.value) / abs(c.value)
    assert gap > 0.1


def test_functional_relation_report_fields():
    rep = check_functional_relation(ANCHOR_ARGS, ANCHOR_PARAMS)
    assert rep.identity_id == "FunctionalRelation"
    assert rep.inputs["s"] == ANCHOR_ARGS.s
    assert rep.inputs["mode"] == "classical"
    assert rep.abs_diff <= rep.lhs_error + rep.rhs_error


# ------------------------------------------------------------------ symmetry


@pytest.mark.parametrize("k", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("mode", [CL, KD])
def test_symmetry_holds(k, mode):
    params = MLParams(k=k, p=0.8, q=1.1, r=1.2, denominator_gamma=mode)
    rep = check_symmetry(ExtBetaArgs(0.7, 2.3, 1.1), params)
    assert rep.verdict is Verdict.HOLDS
    assert rep.rel_diff < 1e-12


def test_symmetry_equal_arguments_trivially_holds():
    rep = check_symmetry(ExtBetaArgs(1.0, 1.0, 0.0), UNIT)
    assert rep.verdict is Verdict.HOLDS
    assert rep.rel_diff == 0.0


# ------------------------------------------------------------ representations


@pytest.mark.parametrize(
    "rep", CANONICAL_REPRESENTATIONS, ids=lambda r: r.label()
)
def test_representations_hold_at_anchor(rep):
    out = check_representation(rep, ANCHOR_ARGS, ANCHOR_PARAMS)
    assert out.verdict is Verdict.HOLDS
    assert out.identity_id == f"ReprEquivalence({rep.label()})"


def test_representation_hard_corner_decided():
    # strongest amplification on the default grid: sigma = 10 with the
    # kernel at its largest argument; the bars must still certify 1e-7
    params = MLParams(k=0.5, p=0.75, q=0.75, r=1.5, denominator_gamma=CL)
    out = check_representation(
        Representation.tan_squared(1.5, 2.5), ExtBetaArgs(2.5, 2.5, 2.0), params
    )
    assert out.verdict is Verdict.HOLDS


# -------------------------------------------------------------------- mellin


def test_mellin_spot_value():
    reports = check_mellin(ExtBetaArgs(2.0, 2.0, 1.0), MellinQuery(0.5), UNIT)
    by_id = {r.identity_id: r for r in reports}
    corrected = by_id["MellinCorrected"]
    assert corrected.verdict is Verdict.HOLDS
    assert corrected.lhs == pytest.approx(MELLIN_SPOT, abs=1e-6)
    assert corrected.rhs == pytest.approx(MELLIN_SPOT, rel=1e-9)
    literal = by_id["MellinPaperLiteral"]
    assert literal.verdict is Verdict.FAILS
    assert literal.rel_diff > 0.1


@pytest.mark.parametrize("s,t,g", [(2.0, 3.0, 0.25), (3.0, 3.0, 0.5)])
def test_mellin_corrected_holds_on_subgrid(s, t, g):
    reports = check_mellin(ExtBetaArgs(s, t, 1.0), MellinQuery(g), UNIT)
    by_id = {r.identity_id: r for r in reports}
    assert by_id["MellinCorrected"].verdict is Verdict.HOLDS
    assert by_id["MellinPaperLiteral"].verdict is Verdict.FAILS


def test_mellin_inconclusive_when_transform_unreachable():
    kd = MLParams(k=2.0, p=1.0, q=1.0, r=1.0, denominator_gamma=KD)
    reports = check_mellin(ExtBetaArgs(2.0, 2.0, 1.0), MellinQuery(0.25), kd)
    assert [r.verdict for r in reports] == [Verdict.INCONCLUSIVE] * 2
    assert all(r.note for r in reports)


def test_mellin_query_validation():
    with pytest.raises(DomainError):
        MellinQuery(0.0).validate(ExtBetaArgs(2.0, 2.0, 1.0), UNIT)
    with pytest.raises(DomainError):
        # s - k*k*g must stay positive
        MellinQuery(0.6).validate(ExtBetaArgs(2.0, 2.0, 1.0),
                                  MLParams(k=2.0, p=1.0, q=1.0, r=1.0))
    with pytest.raises(DomainError):
        # classical mode needs g < r
        MellinQuery(1.5).validate(ExtBetaArgs(9.0, 9.0, 1.0), UNIT)


# ---------------------------------------------------------------- closed form


def test_lemma_closed_form_fails_at_unit_point():
    rep = check_lemma_closed_form(0.5, UNIT)
    assert rep.verdict is Verdict.FAILS
    assert rep.lhs == pytest.approx(math.gamma(0.5), rel=1e-9)
    assert rep.rhs == pytest.approx(-0.25, rel=1e-12)


def test_lemma_closed_form_inconclusive_off_strip():
    kd = MLParams(k=2.0, p=1.0, q=1.0, r=1.0, denominator_gamma=KD)
    rep = check_lemma_closed_form(2.0, kd)
    assert rep.verdict is Verdict.INCONCLUSIVE
    assert "diverges" in rep.note


# ----------------------------------------------------------------- reductions


def test_reductions_classical_unit_all_hold():
    rows = check_reductions(ExtBetaArgs(1.5, 0.8, 0.0), UNIT)
    variants = [r.inputs.get("variant") for r in rows]
    assert variants == ["beta", None]  # beta collapse plus closed-form row
    assert all(r.verdict is Verdict.HOLDS for r in rows)


def test_reductions_gated_on_q_and_r():
    off = MLParams(k=1.0, p=1.0, q=1.5, r=1.0, denominator_gamma=CL)
    assert check_reductions(ExtBetaArgs(1.0, 1.0, 0.5), off) == []


def test_reductions_deformed_mode_quantifies_gap():
    kd = MLParams(k=2.0, p=1.0, q=1.0, r=1.0, denominator_gamma=KD)
    rows = check_reductions(ExtBetaArgs(1.0, 1.0, 0.0), kd)
    by_variant = {r.inputs.get("variant"): r for r in rows}
    assert by_variant["beta"].verdict is Verdict.FAILS
    assert by_variant["gamma"].verdict is Verdict.INCONCLUSIVE
    assert "diverges" in by_variant["gamma"].note
    closed = by_variant[None]
    assert closed.identity_id == "Remark25"
    assert closed.verdict is Verdict.FAILS


def test_reductions_deformed_unit_k_matches_classical():
    kd1 = MLParams(k=1.0, p=1.0, q=1.0, r=1.0, denominator_gamma=KD)
    rows = check_reductions(ExtBetaArgs(1.5, 0.8, 0.5), kd1)
    assert rows and all(r.verdict is Verdict.HOLDS for r in rows)


def test_reduction_gamma_row_only_in_deformed_mode():
    rows = check_reductions(ExtBetaArgs(1.0, 1.0, 0.5), UNIT)
    assert all(r.inputs.get("variant") != "gamma" for r in rows)


# --------------------------------------------------------------------- audit


@pytest.fixture(scope="module")
def smoke_doc():
    return run_audit(grid=SMOKE_GRID)


def test_audit_document_shape(smoke_doc):
    assert smoke_doc["config"]["grid"]["name"] == "smoke"
    assert sorted(smoke_doc["config"]["sections"]) == sorted(AUDIT_SECTIONS)
    summary = smoke_doc["summary"]
    assert summary["total"] == len(smoke_doc["checks"])
    counted = sum(
        n for counts in summary["by_identity"].values() for n in counts.values()
    )
    assert counted == summary["total"]
    assert summary["passed"] is True
    assert summary["asserted_failures"] == 0


def test_audit_asserted_families_clean(smoke_doc):
    for row in smoke_doc["checks"]:
        family = row["identity_id"].split("(")[0]
        if family in ("FunctionalRelation", "Symmetry", "ReprEquivalence"):
            assert row["verdict"] == "Holds", row
        if family in ("Remark22", "Remark25") and row["inputs"]["mode"] == "classical":
            assert row["verdict"] != "Fails", row


def test_audit_probe_rows_present(smoke_doc):
    ids = {row["identity_id"] for row in smoke_doc["checks"]}
    assert "MellinPaperLiteral" in ids
    assert "Lemma23PaperLiteral" in ids


def test_audit_renderings_deterministic(smoke_doc):
    again = run_audit(grid=SMOKE_GRID)
    assert render_audit_json(smoke_doc) == render_audit_json(again)
    assert render_audit_csv(smoke_doc) == render_audit_csv(again)


def test_audit_json_round_trips(smoke_doc):
    text = render_audit_json(smoke_doc)
    assert text.endswith("\n")
    parsed = json.loads(text)
    assert parsed["summary"]["total"] == smoke_doc["summary"]["total"]


def test_audit_csv_shape(smoke_doc):
    lines = render_audit_csv(smoke_doc).splitlines()
    assert lines[0].startswith("identity_id,")
    assert len(lines) == 1 + len(smoke_doc["checks"])


def test_audit_writes_files(tmp_path, smoke_doc):
    jp = tmp_path / "audit.json"
    cp = tmp_path / "audit.csv"
    doc = run_audit(grid=SMOKE_GRID, json_path=jp, csv_path=cp)
    assert jp.read_text(encoding="utf-8") == render_audit_json(doc)
    assert cp.read_text(encoding="utf-8") == render_audit_csv(doc)


def test_audit_include_filter():
    doc = run_audit(grid=SMOKE_GRID, include=["Symmetry"])
    ids = {row["identity_id"] for row in doc["checks"]}
    assert ids == {"Symmetry"}


def test_audit_unknown_section_rejected():
    with pytest.raises(DomainError):
        run_audit(grid=SMOKE_GRID, include=["Symmetri"])


def test_audit_empty_grid():
    doc = run_audit(grid=EMPTY_GRID)
    assert doc["checks"] == []
    assert doc["summary"]["total"] == 0
    assert doc["summary"]["passed"] is True


def test_grid_registry():
    assert set(GRIDS) == {"default", "smoke", "empty"}
    assert GRIDS["default"] is DEFAULT_GRID


def test_audit_passed_ignores_probe_failures():
    bad_probe = IdentityReport(
        "Lemma23PaperLiteral", {"s": 0.5}, 1.0, -0.25, 1.25, 1.0,
        Verdict.FAILS, 0.0, 0.0, "",
    )
    asserted = IdentityReport(
        "Symmetry", {"mode": "classical"}, 1.0, 2.0, 1.0, 0.5,
        Verdict.FAILS, 0.0, 0.0, "",
    )
    assert audit_passed([bad_probe])
    assert not audit_passed([bad_probe, asserted])
