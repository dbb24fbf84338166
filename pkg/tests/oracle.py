"""Brute-force semantic oracles used across the test suite.

Deliberately written against the raw data (dicts of literal -> coeff)
rather than reusing the library's algebra, so the two code paths are
independent.
"""

import itertools


def lit_holds(lit, assignment):
    if lit.startswith("~"):
        return assignment[lit[1:]] == 0
    return assignment[lit] == 1


def con_holds(con, assignment):
    lhs = 0
    for lit, a in con.terms.items():
        if lit_holds(lit, assignment):
            lhs += a
    return lhs >= con.degree


def all_assignments(variables):
    variables = sorted(variables)
    for bits in itertools.product((0, 1), repeat=len(variables)):
        yield dict(zip(variables, bits))


def vars_of(cons):
    vs = set()
    for c in cons:
        for lit in c.terms:
            vs.add(lit[1:] if lit.startswith("~") else lit)
    return vs


def implies(premises, goal):
    """Every total assignment satisfying all premises satisfies the goal."""
    vs = vars_of(list(premises) + [goal])
    assert len(vs) <= 16, "oracle is exponential; keep instances small"
    for rho in all_assignments(vs):
        if all(con_holds(p, rho) for p in premises) and not con_holds(goal, rho):
            return False
    return True


def satisfiable(cons, extra_vars=()):
    vs = vars_of(cons) | set(extra_vars)
    assert len(vs) <= 20
    for rho in all_assignments(vs):
        if all(con_holds(c, rho) for c in cons):
            return rho
    return None


def models(cons, variables=None):
    vs = set(variables) if variables is not None else vars_of(cons)
    return [rho for rho in all_assignments(vs)
            if all(con_holds(c, rho) for c in cons)]
