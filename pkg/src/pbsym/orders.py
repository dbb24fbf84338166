"""Preorders with auxiliary variables.

An order definition consists of placeholder variable lists u/v, auxiliary
variables, a specification (an ordered list of constraints introduced by
redundance with witnesses over the aux variables only) and the order
constraints themselves.  Validation checks the specification obligations
plus reflexivity and transitivity subproofs; only validated orders may be
loaded by the checker.
"""

from . import constraints as pb


class OrderError(Exception):
    pass


class OrderDefinition:

    def __init__(self, name, u_vars, v_vars, aux_vars, spec, order_constraints):
        if len(u_vars) != len(v_vars):
            raise OrderError("left/right lists differ in length")
        overlap = set(aux_vars) & (set(u_vars) | set(v_vars))
        if overlap:
            raise OrderError("aux variables %s overlap u/v" % sorted(overlap))
        self.name = name
        self.u_vars = list(u_vars)
        self.v_vars = list(v_vars)
        self.aux_vars = list(aux_vars)
        self.spec = list(spec)  # [(Constraint, Witness)]
        self.order_constraints = list(order_constraints)
        self.validated = False

    @property
    def n(self):
        return len(self.u_vars)


# Initial configuration: the trivial order over zero variables.
TRIVIAL = OrderDefinition("trivial", [], [], [], [], [])
TRIVIAL.validated = True


def verify_specification(spec, aux_vars):
    """Check the redundance obligations of a specification, in list order.

    Entry i must satisfy {C_1..C_{i-1}, neg(C_i)} |- {C_1..C_i} under its
    witness; goals are discharged by syntactic identity with a premise,
    substituted tautology, or hint-free RUP.
    """
    aux = set(aux_vars)
    premises = []
    for i, (con, wit) in enumerate(spec, start=1):
        bad = set(wit) - aux
        if bad:
            raise OrderError(
                "spec entry %d witnesses non-aux variables %s" % (i, sorted(bad)))
        context = premises + [pb.negate(con)]
        keys = {p.key() for p in context}
        db = dict(enumerate(context))
        for G in premises + [con]:
            goal = pb.substitute(G, wit)
            if goal.is_tautology():
                continue
            if goal.key() in keys:
                continue
            if pb.rup_check(db, goal):
                continue
            raise OrderError(
                "spec entry %d: goal %s not derivable" % (i, pb.render(goal)))
        premises.append(con)
    return True


def _mapping(order, left, right, aux_map=None):
    m = {}
    for u, img in zip(order.u_vars, left):
        m[u] = img
    for v, img in zip(order.v_vars, right):
        m[v] = img
    if aux_map:
        m.update(aux_map)
    return m


def spec_instance(order, left, right, aux_map=None):
    """Thunks for S(left, right, aux), one per spec entry, in spec order.

    left/right are literal (or 0/1 constant) lists of length n; evaluation
    is deferred so the checker can count lazy materializations.
    """
    if len(left) != order.n or len(right) != order.n:
        raise OrderError("arity mismatch: expected %d variables" % order.n)
    m = _mapping(order, left, right, aux_map)
    return [(lambda c=c: pb.substitute(c, m)) for c, _w in order.spec]


def order_instance(order, left, right, aux_map=None):
    """O(left, right, aux), eagerly computed (the list is small)."""
    if len(left) != order.n or len(right) != order.n:
        raise OrderError("arity mismatch: expected %d variables" % order.n)
    m = _mapping(order, left, right, aux_map)
    return [pb.substitute(c, m) for c in order.order_constraints]


def _aux_renaming(order, fresh_aux):
    if len(fresh_aux) != len(order.aux_vars):
        raise OrderError("fresh aux list length mismatch")
    return dict(zip(order.aux_vars, fresh_aux))


def transitivity_obligation(order, fresh_right, fresh_aux_1, fresh_aux_2):
    """Premises (in ID assignment order) and goals of the transitivity check.

    Premises: S(u,v,a), S(v,w,b), S(u,w,c), O(u,v,a), O(v,w,b);
    goals: O(u,w,c).
    """
    if len(fresh_right) != order.n:
        raise OrderError("fresh_right length mismatch")
    u, v, w = order.u_vars, order.v_vars, list(fresh_right)
    ren_b = _aux_renaming(order, fresh_aux_1)
    ren_c = _aux_renaming(order, fresh_aux_2)
    premises = []
    premises.extend(c() for c in spec_instance(order, u, v))
    premises.extend(c() for c in spec_instance(order, v, w, ren_b))
    premises.extend(c() for c in spec_instance(order, u, w, ren_c))
    premises.extend(order_instance(order, u, v))
    premises.extend(order_instance(order, v, w, ren_b))
    goals = order_instance(order, u, w, ren_c)
    return premises, goals


def reflexivity_obligation(order):
    """Premises S(u,u,a) and goals O(u,u,a) of the reflexivity check."""
    u = order.u_vars
    premises = [c() for c in spec_instance(order, u, u)]
    goals = order_instance(order, u, u)
    return premises, goals


def check_reflexivity(order, subproof_goals):
    from . import checker
    premises, goals = reflexivity_obligation(order)
    checker.run_obligation(premises, goals, subproof_goals, "reflexivity")
    return True


def check_transitivity(order, fresh_right, fresh_aux_1, fresh_aux_2,
                       subproof_goals):
    from . import checker
    premises, goals = transitivity_obligation(
        order, fresh_right, fresh_aux_1, fresh_aux_2)
    checker.run_obligation(premises, goals, subproof_goals, "transitivity")
    return True


def validate(order, transitivity, reflexivity):
    """Full validation pipeline for a parsed def_order block."""
    verify_specification(order.spec, order.aux_vars)
    check_transitivity(order, transitivity["fresh_right"],
                       transitivity["fresh_aux_1"], transitivity["fresh_aux_2"],
                       transitivity["goals"])
    check_reflexivity(order, reflexivity["goals"])
    order.validated = True
    return order
