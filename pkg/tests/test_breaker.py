import pathlib

import pytest

from pbsym import breaker
from pbsym import constraints as pb
from pbsym import orders
from pbsym import parsing
from pbsym.checker import VERIFIED, check_document

DATA = pathlib.Path(__file__).parent / "data"


def php32():
    return parsing.parse_opb((DATA / "php32.opb").read_text())


def sigma():
    return breaker.parse_symmetry("(x1 x3)(x2 x4)")


def tau():
    return breaker.parse_symmetry(
        "x5 -> x4 x6 -> x3 x1 -> x6 x2 -> x5 x3 -> x2 x4 -> x1")


def checked(formula, builder):
    return check_document(formula, parsing.parse_proof(builder.text()))


# ------------------------------------------------------------- symmetries

def test_parse_cycles():
    s = sigma()
    assert s.mapping == {"x1": "x3", "x3": "x1", "x2": "x4", "x4": "x2"}


def test_parse_arrow_list():
    t = tau()
    assert t.image("x5") == "x4"
    assert t.image("~x5") == "~x4"


def test_parse_negation_cycle():
    s = breaker.parse_symmetry("(x1 ~x1)")
    assert s.mapping == {"x1": "~x1"}
    assert s.image("~x1") == "x1"


def test_parse_rejects_non_permutation():
    with pytest.raises(breaker.BreakError):
        breaker.parse_symmetry("x1 -> x2 x3 -> x2")


def test_parse_rejects_garbage():
    with pytest.raises(breaker.BreakError):
        breaker.parse_symmetry("x1 x2 x3")


def test_identity_mappings_dropped():
    s = breaker.parse_symmetry("x1 -> x1 x2 -> x3 x3 -> x2")
    assert s.support() == ["x2", "x3"]


def test_apply_constraint():
    cons, _ = php32()
    s = sigma()
    assert s.apply(cons[0]) == pb.normalize([(1, "x3"), (1, "x4")], 1)


def test_verify_symmetry_accepts_both_generators():
    cons, _ = php32()
    assert breaker.verify_symmetry(cons, sigma())
    assert breaker.verify_symmetry(cons, tau())


def test_verify_symmetry_rejects_non_symmetry():
    cons, _ = php32()
    with pytest.raises(breaker.BreakError):
        breaker.verify_symmetry(cons, breaker.parse_symmetry("(x1 x2)"))


def test_choose_binding_puts_first_support_last():
    got = breaker.choose_binding(["x%d" % i for i in range(1, 7)], [sigma()])
    assert got == ["x5", "x6", "x1", "x2", "x3", "x4"]


# -------------------------------------------------------- order definition

def test_lex_definition_matches_golden_block():
    golden = parsing.parse_proof((DATA / "php32_lex.pbp").read_text())
    mine = parsing.parse_proof(
        parsing.HEADER + "\n" + breaker.lex_order_definition(6) + "\n")
    assert (parsing.strip_lines(mine["steps"][0])
            == parsing.strip_lines(golden["steps"][0]))


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_lex_definition_validates(n):
    binding = " ".join("x%d" % i for i in range(1, n + 1))
    text = (parsing.HEADER + "\n" + breaker.lex_order_definition(n) + "\n"
            + "load_order lex%d %s;\n" % (n, binding))
    formula, _ = parsing.parse_opb(
        "".join("+1 x%d >= 0 ;\n" % i for i in range(1, n + 1)))
    verdict, _ = check_document(formula, parsing.parse_proof(text))
    assert verdict == VERIFIED


@pytest.mark.parametrize("n", [2, 4])
def test_big_definition_validates(n):
    binding = " ".join("x%d" % i for i in range(1, n + 1))
    text = (parsing.HEADER + "\n" + breaker.big_order_definition(n) + "\n"
            + "load_order biglex%d %s;\n" % (n, binding))
    formula, _ = parsing.parse_opb(
        "".join("+1 x%d >= 0 ;\n" % i for i in range(1, n + 1)))
    verdict, _ = check_document(formula, parsing.parse_proof(text))
    assert verdict == VERIFIED


def test_lex_spec_passes_specification_check():
    order = breaker.build_lex_order(3)
    assert orders.verify_specification(order.spec, order.aux_vars)


def test_lex_definition_line_count_linear():
    lines10 = breaker.lex_order_definition(10).count("\n")
    lines40 = breaker.lex_order_definition(40).count("\n")
    assert lines40 < 5 * lines10


# ------------------------------------------------------------ full proofs

def test_php32_document_matches_golden():
    cons, variables = php32()
    b = breaker.break_symmetries(cons, variables, [sigma(), tau()])
    golden = parsing.parse_proof((DATA / "php32_lex.pbp").read_text())
    assert (parsing.strip_lines(parsing.parse_proof(b.text()))
            == parsing.strip_lines(golden))


def test_php32_document_counters():
    cons, variables = php32()
    b = breaker.break_symmetries(cons, variables, [sigma(), tau()])
    verdict, counters = checked(cons, b)
    assert verdict == VERIFIED
    assert counters["spec_materializations"] == 88
    assert counters["implicit_reflexivity_skips"] == 36
    assert counters["rup_calls"] == 150


def test_cp_variant_verifies():
    cons, variables = php32()
    b = breaker.break_symmetries(cons, variables, [sigma(), tau()],
                                 cp_variant=True)
    verdict, counters = checked(cons, b)
    assert verdict == VERIFIED
    # the explicit derivations replace most hint-free RUP lemmas
    assert counters["rup_calls"] < 150


def test_old_method_verifies_and_agrees():
    cons, variables = php32()
    new = breaker.break_symmetries(cons, variables, [sigma(), tau()])
    old = breaker.break_symmetries(cons, variables, [sigma(), tau()],
                                   method="old")
    verdict, _ = checked(cons, old)
    assert verdict == VERIFIED
    assert (sorted(c.key() for c in new.kept)
            == sorted(c.key() for c in old.kept))


def test_kept_constraints_are_clauses():
    cons, variables = php32()
    b = breaker.break_symmetries(cons, variables, [sigma(), tau()])
    assert len(b.kept) == 26      # (3k - 2) for k = 4 and k = 6, twice over
    assert all(c.degree == 1 and set(c.terms.values()) == {1} for c in b.kept)


def test_single_transposition_fragment():
    cons, variables = php32()
    swap = breaker.parse_symmetry("(x1 x3)(x2 x4)")
    b = breaker.break_symmetries(cons, variables, [swap])
    verdict, _ = checked(cons, b)
    assert verdict == VERIFIED
    assert len(b.kept) == 3 * 4 - 2


def test_non_suffix_support_still_verifies():
    # with tau first, the binding leaves sigma's support at positions 1..4
    cons, variables = php32()
    b = breaker.break_symmetries(cons, variables, [tau(), sigma()])
    verdict, _ = checked(cons, b)
    assert verdict == VERIFIED


def test_cp_variant_requires_suffix_support():
    cons, variables = php32()
    with pytest.raises(breaker.BreakError):
        breaker.break_symmetries(cons, variables, [tau(), sigma()],
                                 cp_variant=True)


def test_identity_symmetry_adds_nothing():
    cons, variables = php32()
    b = breaker.break_symmetries(cons, variables,
                                 [breaker.SymmetrySpec({})])
    assert b.kept == []
    assert b.text() == parsing.HEADER + "\n"


def test_breaking_satisfiable_formula_is_sound():
    # a negation symmetry of x1 + x2 = 1; the broken formula stays SAT
    cons, variables = parsing.parse_opb(
        "+1 x1 +1 x2 >= 1 ;\n+1 ~x1 +1 ~x2 >= 1 ;\n")
    flip = breaker.parse_symmetry("(x1 ~x1)(x2 ~x2)")
    breaker.verify_symmetry(cons, flip)
    b = breaker.break_symmetries(cons, variables, [flip])
    verdict, _ = checked(cons, b)
    assert verdict == VERIFIED
    from oracle import satisfiable
    assert satisfiable(list(cons) + list(b.kept))


def test_stats_track_support_and_size():
    cons, variables = php32()
    b = breaker.break_symmetries(cons, variables, [sigma(), tau()])
    assert [s["support"] for s in b.stats] == [4, 6]
    assert all(s["chars"] > 0 for s in b.stats)
