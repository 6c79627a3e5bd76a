import json
import random
import string
import subprocess
import sys

import pytest

import pfaffkit as pk
from pfaffkit.cli import run
from pfaffkit.diffalg import BaseDiffField
from pfaffkit.parser import (
    EvalContext,
    ParseError,
    eval_ratfunc,
    eval_uexpr,
    parse_expression_text,
    parse_field_decl_text,
    parse_fixture_text,
    parse_group_text,
    parse_linear_text,
    parse_ode_text,
)

LAMBERT = "tests/fixtures/lambert_backward.pfaff"
SQRT_FWD = "tests/fixtures/sqrt_shift_forward.pfaff"


def invoke(*argv):
    doc, code = run(list(argv))
    if doc is not None:
        doc.pop("_pretty", None)
    return doc, code


class TestExpressionParsing:
    def test_ode_with_field_declaration(self):
        spec = parse_ode_text("y' = (y-2)*(y-(1+r))/(y*(y-1)) over Q(r: r^2-2)")
        assert spec.base.field is not None
        assert spec.base.field.degree == 2
        assert spec.base.var is None

    def test_independent_variable_is_detected(self):
        spec = parse_ode_text("y' = y^2 + t*y")
        assert spec.base.var == "t"
        spec_z = parse_ode_text("y' = y/z")
        assert spec_z.base.var == "z"

    def test_parse_error_position(self):
        with pytest.raises(ParseError) as err:
            parse_ode_text("y' = )(")
        assert err.value.col == 6

    def test_unknown_identifier(self):
        with pytest.raises(ParseError):
            parse_ode_text("y' = q + 1")

    def test_derivatives_rejected_in_rhs(self):
        with pytest.raises(ParseError):
            parse_ode_text("y' = y' + 1")

    def test_linear_parse(self):
        spec = parse_linear_text("y''' - t*y = 0")
        assert len(spec.coeffs) == 4
        assert spec.coeffs[0] == (-1) * spec.base.gen()
        assert (spec.coeffs[3] - spec.base.one()).is_zero()

    def test_linear_requires_homogeneous(self):
        with pytest.raises(ParseError):
            parse_linear_text("y'' + t = 0")

    def test_linear_rejects_products_of_y(self):
        with pytest.raises(ParseError):
            parse_linear_text("y*y' = 0")

    def test_field_decl_forms(self):
        d1 = parse_field_decl_text("Q")
        assert d1.field is None and d1.var is None
        d2 = parse_field_decl_text("Q(t)")
        assert d2.var == "t"
        d3 = parse_field_decl_text("Q(r: r^2-2, z)")
        assert d3.field.degree == 2 and d3.var == "z"

    def test_trailing_garbage_after_declaration(self):
        with pytest.raises(ParseError):
            parse_ode_text("y' = y over Q over Q")

    def test_huge_exponent_rejected(self):
        with pytest.raises(ParseError):
            parse_ode_text("y' = (y+1)^999999")

    def test_constant_right_hand_sides(self):
        for eq in ("y' = 0", "y' = 5", "y' = 1/2", "y' = t"):
            doc, code = invoke("classify-ode", eq)
            assert code == 0, eq
            assert doc["verdicts"] == {"pfaffian": "yes", "rationally_pfaffian": "yes"}


class TestRoundTrips:
    def test_expression_round_trip_on_fixture_strings(self):
        fixtures = [
            "y^2 + t*y",
            "(y-2)*(y-3)/(y*(y-1))",
            "1/(2*y)",
            "-(1/z)*(1-y)*y^2",
            "y^3 - 1/2*y + 7/3",
        ]
        for text in fixtures:
            tokens_var = "z" if "z" in text else ("t" if "t" in text else None)
            base = BaseDiffField(None, tokens_var)
            ctx = EvalContext(base=base, ring=("y",), gen_name=None)
            node = parse_expression_text(text)
            value = eval_ratfunc(node, ctx)
            reparsed = eval_ratfunc(parse_expression_text(str(value)), ctx)
            assert reparsed == value, text

    def test_group_round_trip(self):
        fixtures = [
            "Ga", "Gm", "GaxGm", "E", "Fin", "SL(2)", "GL(3)", "PSL(4)",
            "T(3)", "Prod(SL(2), SL(2), Gm)", "Ext(SL(2), Gm)",
            "Sub(Prod(SL(2), T(2)))", "Ext(Prod(Ga, Gm), Sub(SL(2)))",
        ]
        for text in fixtures:
            g = parse_group_text(text)
            assert parse_group_text(str(g)) == g, text

    def test_uexpr_round_trip(self):
        base = BaseDiffField(None, "t")
        red = pk.riccati_reduce(
            [(-1) * base.gen(), base.coerce(0), base.coerce(0), base.one()], base
        )
        reparsed = eval_uexpr(parse_expression_text(str(red)), base)
        assert reparsed == red

    def test_chain_serialization_round_trip(self):
        doc, code = invoke("classify-ode", "y' = 1/(2*y)")
        lines = ["rule: " + s for s in doc["certificates"]["pfaffian_chain"]]
        lines += ["element: " + doc["certificates"]["element"], "ode: y' = 1/(2*y)"]
        fixture = parse_fixture_text("\n".join(lines))
        assert fixture.chain.serialize() == doc["certificates"]["pfaffian_chain"]


class TestCommands:
    def test_classify_ode_theorem_family(self):
        doc, code = invoke(
            "classify-ode", "y' = (y-2)*(y-(1+r))/(y*(y-1)) over Q(r: r^2-2)"
        )
        assert code == 0
        assert doc["verdicts"] == {"pfaffian": "no", "rationally_pfaffian": "yes"}
        assert doc["criteria"][0]["name"] == "degree+disintegration"
        assert doc["certificates"]["noetherian_system"]

    def test_classify_ode_embeds_verifiable_certificate(self, tmp_path):
        doc, code = invoke("classify-ode", "y' = 1/(2*y)")
        assert code == 0 and doc["verdicts"]["pfaffian"] == "yes"
        lines = ["rule: " + s for s in doc["certificates"]["pfaffian_chain"]]
        lines += ["element: " + doc["certificates"]["element"], "ode: y' = 1/(2*y)"]
        fx = tmp_path / "cert.pfaff"
        fx.write_text("\n".join(lines), encoding="utf-8")
        doc2, code2 = invoke("chain-verify", "--mode", "forward", str(fx))
        assert code2 == 0 and doc2["result"] == "pass"

    def test_rational_certificates_feed_back_through_chain_verify(self, tmp_path):
        eq = "y' = (y-2)*(y-3)/(y*(y-1))"
        doc, code = invoke("classify-ode", eq)
        assert code == 0 and doc["verdicts"]["rationally_pfaffian"] == "yes"

        # one-rule rational chain, defining equation renamed to w
        chain_fx = tmp_path / "rational.pfaff"
        chain_fx.write_text("\n".join(
            ["rule: " + s for s in doc["certificates"]["rational_chain"]]
            + ["defining: w' = (w-2)*(w-3)/(w*(w-1))", "assign: w"]
        ), encoding="utf-8")
        d1, c1 = invoke("chain-verify", "--mode", "backward", str(chain_fx))
        assert c1 == 0 and d1["result"] == "pass"

        # unconstrained two-variable system with its embedded assignments
        noeth_fx = tmp_path / "noetherian.pfaff"
        noeth_fx.write_text("\n".join(
            ["system: noetherian", "defining: " + eq]
            + ["rule: " + s for s in doc["certificates"]["noetherian_system"]]
            + ["assign: " + a for a in doc["certificates"]["noetherian_assignments"]]
        ), encoding="utf-8")
        d2, c2 = invoke("chain-verify", "--mode", "backward", str(noeth_fx))
        assert c2 == 0 and d2["result"] == "pass"

    def test_group_check_obstruction(self):
        doc, code = invoke("group-check", "--allowed", "d-solvable:2", "GL(3)")
        assert code == 0
        assert doc["verdict"] == "no"
        assert "PSL(3)" in doc["obstruction"]

    def test_group_check_witness(self):
        doc, code = invoke("group-check", "--allowed", "eulerian", "Ext(SL(2), Gm)")
        assert code == 0 and doc["verdict"] == "yes"
        assert doc["witness"] == ["Gm", "PSL(2)", "Fin"]

    def test_group_check_one_reducible(self):
        doc, code = invoke("group-check", "--allowed", "1-reducible", "E")
        assert code == 0 and doc["verdict"] == "yes"

    def test_chain_verify_backward_fixture(self):
        doc, code = invoke("chain-verify", "--mode", "backward", LAMBERT)
        assert code == 0 and doc["result"] == "pass"

    def test_chain_verify_forward_fixture(self):
        doc, code = invoke("chain-verify", "--mode", "forward", SQRT_FWD)
        assert code == 0 and doc["result"] == "pass"

    def test_chain_verify_mode_mismatch(self):
        doc, code = invoke("chain-verify", "--mode", "forward", LAMBERT)
        assert code == 1 and "error" in doc

    def test_noetherianize(self):
        doc, code = invoke("noetherianize", "y' = (y-2)*(y-3)/(y*(y-1))")
        assert code == 0
        assert doc["variables"] == ["y", "w"]
        assert len(doc["noetherian_system"]) == 2

    def test_residues_command(self):
        doc, code = invoke(
            "residues", "(y-2)*(y-(1+r))/(y*(y-1)) over Q(r: r^2-2)"
        )
        assert code == 0
        assert doc["residue_sum_zero"] is True
        assert {e["pole"] for e in doc["entries"]} == {"2", "r + 1"}

    def test_residues_unfactorable_is_validation_error(self):
        doc, code = invoke("residues", "(y^2-2)/(y*(y-1))")
        assert code == 1 and "error" in doc

    def test_logderiv_reduce(self):
        doc, code = invoke("logderiv-reduce", "y''' - t*y = 0")
        assert code == 0
        assert doc["reduction"] == "u^3 + 3*u*u' + u'' - t"
        assert doc["order"] == 2

    def test_search_presentation_found(self):
        doc, code = invoke("search-presentation", "y' = 1/(2*y)")
        assert code == 0 and doc["found"] is True
        assert doc["presentation"] == {"h": "1/x", "p": "-1/2*x^3"}

    def test_search_presentation_empty(self):
        doc, code = invoke(
            "search-presentation", "y' = (y-2)*(y-(1+r))/(y*(y-1)) over Q(r: r^2-2)"
        )
        assert code == 0 and doc["found"] is False

    def test_asserted_field_provenance_note(self):
        doc, code = invoke(
            "classify-ode", "y' = (y-s)/(y*(y-1)) over Q(s: s^4-s-2)"
        )
        assert code == 0
        assert any("asserted" in note for note in doc["provenance"])

    def test_pretty_flag_same_data(self):
        doc1, _ = invoke("group-check", "--allowed", "eulerian", "Gm")
        doc2, _ = invoke("--pretty", "group-check", "--allowed", "eulerian", "Gm")
        assert doc1 == doc2


class TestExitCodes:
    def test_parse_error_is_exit_1(self):
        doc, code = invoke("classify-ode", "y' = )(")
        assert code == 1
        assert doc["error"]["kind"] == "parse"
        assert doc["error"]["column"] == 6

    def test_unknown_subcommand_is_exit_1(self):
        doc, code = invoke("frobnicate")
        assert code == 1

    def test_fuzzed_inputs_never_exit_2(self):
        rng = random.Random(1234)
        alphabet = string.ascii_letters + string.digits + "+-*/^()=,:' "
        commands = (
            ["classify-ode"], ["classify-linear", "--group", "SL(2)"],
            ["noetherianize"], ["residues"], ["logderiv-reduce"],
            ["search-presentation"],
        )
        for _ in range(300):
            text = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 40)))
            cmd = list(rng.choice(commands)) + [text]
            _, code = invoke(*cmd)
            assert code in (0, 1), (cmd, code)
        for _ in range(100):
            text = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 30)))
            _, code = invoke("group-check", "--allowed", "eulerian", text)
            assert code in (0, 1), text

    def test_console_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "pfaffkit.cli", "group-check",
             "--allowed", "eulerian", "SL(3)"],
            capture_output=True, text=True, check=False,
        )
        assert proc.returncode == 0
        doc = json.loads(proc.stdout)
        assert doc["verdict"] == "no"
