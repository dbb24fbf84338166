import itertools

import pytest
from hypothesis import given, settings, strategies as st

from pbsym import constraints as pb
from pbsym.constraints import (
    CONFLICT, Constraint, add, divide, evaluate_polish, multiply, neg,
    negate, normalize, propagate, rup_check, saturate, slack, substitute,
    weaken,
)

import oracle


def C(*terms, ge):
    return normalize(list(terms), ge)


def test_neg_is_involution():
    assert neg("x1") == "~x1"
    assert neg(neg("x1")) == "x1"
    assert neg(neg("~$d6")) == "~$d6"


def test_normalize_merges_terms():
    c = C((1, "x1"), (1, "x1"), ge=1)
    assert c.terms == {"x1": 2} and c.degree == 1


def test_normalize_flips_negative_coefficient():
    c = normalize([(-1, "x1")], 0)
    assert c.terms == {"~x1": 1} and c.degree == 1


def test_normalize_keeps_normal_form():
    c = C((2, "~x1"), (3, "x2"), (2, "x3"), ge=5)
    assert c.terms == {"~x1": 2, "x2": 3, "x3": 2} and c.degree == 5


def test_normalize_cancels_opposite_literals():
    # 2 x1 + 1 ~x1 >= 1  ==  1 x1 + 1 >= 1  ==  x1 >= 0
    c = C((2, "x1"), (1, "~x1"), ge=1)
    assert c.terms == {"x1": 1} and c.degree == 0


def test_negate_single_literal():
    assert negate(C((1, "x1"), ge=1)) == C((1, "~x1"), ge=1)


def test_negate_example():
    c = C((2, "~x1"), (3, "x2"), (2, "x3"), ge=5)
    assert negate(c) == C((2, "x1"), (3, "~x2"), (2, "~x3"), ge=3)


def test_negate_falsum_is_tautology():
    assert negate(Constraint({}, 1)).is_tautology()


lits = st.integers(1, 6).flatmap(
    lambda i: st.sampled_from(["x%d" % i, "~x%d" % i]))
raw_cons = st.builds(
    normalize,
    st.lists(st.tuples(st.integers(-4, 4), lits), max_size=5),
    st.integers(-3, 6),
)


@given(raw_cons)
def test_negate_is_involution(c):
    # double negation restores the constraint unless degree clamping
    # collapsed information (negating an over-contradictory constraint)
    if negate(c).is_tautology():
        return
    assert negate(negate(c)) == c


@given(raw_cons, raw_cons)
def test_substitute_distributes_over_addition(c1, c2):
    w = {"x1": "x2", "x2": 0, "x3": "~x4"}
    summed = add(c1, c2)
    lhs = substitute(summed, w)
    rhs = add(substitute(c1, w), substitute(c2, w))
    # degree clamping at 0 loses slack, so the law only holds when no
    # intermediate result clamped; degree 0 is the clamp fingerprint
    parts = (summed, lhs, substitute(c1, w), substitute(c2, w))
    if all(p.degree > 0 for p in parts):
        assert lhs == rhs


def test_substitute_swap():
    c = C((1, "~x1"), (1, "~x3"), ge=1)
    got = substitute(c, {"x1": "x3", "x3": "x1"})
    assert got == C((1, "~x3"), (1, "~x1"), ge=1)


def test_substitute_to_constant_tautologizes():
    c = C((1, "~s1"), (1, "x1"), (1, "~x3"), ge=1)
    assert substitute(c, {"s1": 0}).is_tautology()


def test_substitute_identity():
    c = C((1, "x1"), (1, "~x2"), ge=1)
    assert substitute(c, {}) == c


def test_substitute_negated_literal_image():
    # needed for Tseitin-style symmetries mapping x -> ~x
    c = C((2, "x1"), (1, "~x2"), ge=2)
    got = substitute(c, {"x1": "~x1"})
    assert got == C((2, "~x1"), (1, "~x2"), ge=2)


@given(raw_cons)
def test_saturate_preserves_solutions(c):
    sat = saturate(c)
    vs = oracle.vars_of([c])
    for rho in oracle.all_assignments(vs | {"x1"}):
        assert oracle.con_holds(c, rho) == oracle.con_holds(sat, rho)


@given(raw_cons, st.integers(1, 5))
def test_divide_preserves_solutions_after_multiply(c, k):
    # ceil-division is the inverse of multiplication on solution sets
    back = divide(multiply(c, k), k)
    vs = oracle.vars_of([c])
    for rho in oracle.all_assignments(vs | {"x1"}):
        assert oracle.con_holds(c, rho) == oracle.con_holds(back, rho)


@given(raw_cons, st.integers(2, 4))
def test_divide_is_sound(c, k):
    got = divide(c, k)
    assert oracle.implies([c], got)


def test_weaken_removes_term():
    c = C((2, "~x1"), (3, "x2"), ge=5)
    assert weaken(c, "x1") == C((3, "x2"), ge=3)


def test_weaken_absent_variable_is_noop():
    c = C((1, "x1"), ge=1)
    assert weaken(c, "zz") == c


def test_polish_worked_example():
    db = {9: C((2, "~x1"), (3, "x2"), (2, "x3"), ge=5)}
    got = evaluate_polish("9 x2 2 * + x1 w s 2 d".split(), db.__getitem__)
    assert got == C((2, "x2"), (1, "x3"), ge=2)


def test_polish_copy():
    db = {5: C((1, "x1"), ge=1)}
    assert evaluate_polish(["5"], db.__getitem__) == db[5]


def test_polish_stack_underflow():
    with pytest.raises(pb.ConstraintError):
        evaluate_polish(["+"], {}.__getitem__)


def test_polish_leftover_items_rejected():
    db = {1: C((1, "x1"), ge=1)}
    with pytest.raises(pb.ConstraintError):
        evaluate_polish(["1", "1"], db.__getitem__)


def test_polish_nonpositive_multiplier():
    db = {1: C((1, "x1"), ge=1)}
    with pytest.raises(pb.ConstraintError):
        evaluate_polish(["1", "0", "*"], db.__getitem__)


@given(st.lists(st.sampled_from("1 2 + * s d w x1 x2 3".split()), max_size=8))
def test_polish_is_sound_or_rejects(tokens):
    db = {1: C((1, "x1"), (1, "x2"), ge=1),
          2: C((2, "~x1"), (1, "x3"), ge=2)}
    try:
        got = evaluate_polish(tokens, db.__getitem__)
    except (pb.ConstraintError, KeyError):
        return
    assert oracle.implies(list(db.values()), got)


def test_slack_example():
    c = C((2, "~x1"), (3, "x2"), (2, "x3"), ge=5)
    assert slack(c, {}) == 2


def test_propagate_example():
    c = C((2, "~x1"), (3, "x2"), (2, "x3"), ge=5)
    rho = propagate([c])
    assert rho != CONFLICT and rho["x2"] == 1


def test_propagate_conflict():
    assert propagate([C((1, "x1"), ge=1), C((1, "~x1"), ge=1)]) == CONFLICT


def test_propagate_after_first_round():
    rho = propagate([C((3, "x2"), (2, "x3"), ge=3)])
    assert rho == {"x2": 1}


def test_rup_with_hint_filter():
    db = {9: C((2, "~x1"), (3, "x2"), (2, "x3"), ge=5),
          4: C((1, "~x2"), ge=1)}  # would break the instance if not filtered out
    goal = C((2, "x2"), (1, "x3"), ge=2)
    assert rup_check(db, goal, hints=[9])


def test_rup_tautology_accepted_without_hints():
    assert rup_check({}, C((1, "~$a3"), (1, "$a3"), ge=1))


def test_rup_falsum_from_contradictory_premises():
    db = {1: C((1, "$d6"), ge=1), 2: C((1, "~$d6"), ge=1)}
    assert rup_check(db, Constraint({}, 1))


def test_rup_rejects_non_implied():
    db = {1: C((1, "x1"), (1, "x2"), ge=1)}
    assert not rup_check(db, C((1, "x1"), ge=1))


@given(raw_cons, raw_cons, raw_cons)
@settings(max_examples=60)
def test_rup_accept_implies_semantic_implication(p1, p2, goal):
    db = {1: p1, 2: p2}
    if rup_check(db, goal):
        assert oracle.implies([p1, p2], goal)
