"""Pseudo-Boolean constraint algebra.

A constraint is a normalized integer-linear inequality

    a_1 l_1 + ... + a_m l_m >= A

over 0/1 literals: at most one term per variable, every coefficient >= 1,
degree A >= 0.  Literals are plain strings such as ``x3`` or ``~x3``;
auxiliary variables belonging to a loaded order carry a ``$`` prefix
(``$d6``, ``~$d6``).  Coefficients are Python ints, so arbitrary precision
comes for free.
"""


class ConstraintError(Exception):
    pass


CONFLICT = "conflict"


def neg(lit):
    """Negate a literal string."""
    if lit.startswith("~"):
        return lit[1:]
    return "~" + lit


def var_of(lit):
    if lit.startswith("~"):
        return lit[1:]
    return lit


def is_positive(lit):
    return not lit.startswith("~")


def is_aux_var(var):
    """Order-auxiliary variables are namespaced with a '$' prefix."""
    return var.startswith("$")


class Constraint:
    """A normalized PB constraint.

    ``terms`` maps a literal string to its (positive) coefficient; each
    variable occurs under at most one polarity.  ``degree`` is the
    right-hand side, clamped at zero.  Instances are treated as immutable
    once built; all algebra goes through :func:`normalize`.
    """

    __slots__ = ("terms", "degree")

    def __init__(self, terms, degree):
        self.terms = terms
        self.degree = degree

    def __eq__(self, other):
        if not isinstance(other, Constraint):
            return NotImplemented
        return self.degree == other.degree and self.terms == other.terms

    def __hash__(self):
        return hash((frozenset(self.terms.items()), self.degree))

    def __repr__(self):
        return "Constraint(%s)" % render(self)

    def key(self):
        """Order-insensitive identity, for multiset comparisons."""
        return (frozenset(self.terms.items()), self.degree)

    def is_tautology(self):
        return self.degree == 0

    def is_contradiction(self):
        """No assignment can satisfy the constraint (sum of coefficients < degree)."""
        return sum(self.terms.values()) < self.degree

    def variables(self):
        return set(var_of(l) for l in self.terms)


def normalize(raw_terms, raw_degree):
    """Build the unique normalized constraint from signed OPB-style input.

    Negative coefficients are flipped with a*l = a - a*~l, terms on the
    same variable are merged, and the degree is clamped at >= 0.
    """
    acc = {}  # variable -> signed coefficient of the POSITIVE literal
    order = []
    degree = raw_degree
    for coeff, lit in raw_terms:
        v = var_of(lit)
        if v not in acc:
            acc[v] = 0
            order.append(v)
        if is_positive(lit):
            acc[v] += coeff
        else:
            # a * ~x = a - a * x
            acc[v] -= coeff
            degree -= coeff
    terms = {}
    for v in order:
        a = acc[v]
        if a > 0:
            terms[v] = a
        elif a < 0:
            terms["~" + v] = -a
            degree -= a
    if degree < 0:
        degree = 0
    return Constraint(terms, degree)


FALSUM = Constraint({}, 1)


def negate(c):
    """Negation: sum a_i ~l_i >= sum a_i - A + 1 (then renormalized)."""
    total = sum(c.terms.values())
    return normalize([(a, neg(l)) for l, a in c.terms.items()],
                     total - c.degree + 1)


def apply_witness_lit(witness, lit):
    """Image of a literal under a witness (variable -> literal | 0 | 1)."""
    v = var_of(lit)
    if v not in witness:
        return lit
    img = witness[v]
    if img == 0 or img == 1:
        return img if is_positive(lit) else 1 - img
    return img if is_positive(lit) else neg(img)


def substitute(c, witness):
    """Apply a substitution and renormalize; constants fold into the degree."""
    raw = []
    degree = c.degree
    for lit, a in c.terms.items():
        img = apply_witness_lit(witness, lit)
        if img == 1:
            degree -= a
        elif img == 0:
            pass
        else:
            raw.append((a, img))
    return normalize(raw, degree)


def add(c1, c2):
    raw = [(a, l) for l, a in c1.terms.items()]
    raw.extend((a, l) for l, a in c2.terms.items())
    return normalize(raw, c1.degree + c2.degree)


def multiply(c, k):
    if k <= 0:
        raise ConstraintError("multiplier must be positive, got %d" % k)
    return Constraint({l: a * k for l, a in c.terms.items()}, c.degree * k)


def divide(c, k):
    """Division with ceiling on every coefficient and on the degree."""
    if k <= 0:
        raise ConstraintError("divisor must be positive, got %d" % k)
    terms = {l: -(-a // k) for l, a in c.terms.items()}
    return Constraint(terms, -(-c.degree // k))


def saturate(c):
    terms = {l: min(a, c.degree) for l, a in c.terms.items() if min(a, c.degree) > 0}
    return Constraint(terms, c.degree)


def weaken(c, variable):
    """Cancel the term on `variable` by adding literal axioms.

    Weakening a variable that does not occur is a no-op.
    """
    for lit in (variable, "~" + variable):
        if lit in c.terms:
            a = c.terms[lit]
            terms = {l: b for l, b in c.terms.items() if l != lit}
            return Constraint(terms, max(c.degree - a, 0))
    return c


def literal_axiom(lit):
    """The axiom l >= 0 (trivially true, useful as a polish operand)."""
    return Constraint({lit: 1}, 0)


def evaluate_polish(tokens, resolve):
    """Evaluate a reverse-Polish cutting planes program.

    ``tokens`` is a list of strings; ``resolve`` maps a (possibly negative,
    i.e. relative) constraint ID to a Constraint.  Number tokens are lazy:
    popped by ``*`` or ``d`` they act as integers, anywhere a constraint is
    needed they act as constraint IDs.  Literal tokens act as literal
    axioms when used as constraints, and name the variable for ``w``.
    """
    stack = []

    def as_constraint(item):
        kind, val = item
        if kind == "con":
            return val
        if kind == "num":
            return resolve(val)
        return literal_axiom(val)  # kind == "lit"

    def pop(what="operand"):
        if not stack:
            raise ConstraintError("polish stack underflow at %s" % what)
        return stack.pop()

    for tok in tokens:
        if tok == "+":
            b = as_constraint(pop("+"))
            a = as_constraint(pop("+"))
            stack.append(("con", add(a, b)))
        elif tok == "*":
            kind, k = pop("*")
            if kind != "num":
                raise ConstraintError("multiplier must be a number")
            c = as_constraint(pop("*"))
            stack.append(("con", multiply(c, k)))
        elif tok == "d":
            kind, k = pop("d")
            if kind != "num":
                raise ConstraintError("divisor must be a number")
            c = as_constraint(pop("d"))
            stack.append(("con", divide(c, k)))
        elif tok == "s":
            stack.append(("con", saturate(as_constraint(pop("s")))))
        elif tok == "w":
            kind, name = pop("w")
            if kind != "lit":
                raise ConstraintError("weakening needs a variable name")
            c = as_constraint(pop("w"))
            stack.append(("con", weaken(c, var_of(name))))
        else:
            try:
                stack.append(("num", int(tok)))
            except ValueError:
                stack.append(("lit", tok))
    if len(stack) != 1:
        raise ConstraintError("polish program left %d items on the stack" % len(stack))
    return as_constraint(stack[0])


def lit_value(assignment, lit):
    """0/1 value of a literal under a partial assignment, or None."""
    v = assignment.get(var_of(lit))
    if v is None:
        return None
    return v if is_positive(lit) else 1 - v


def slack(c, assignment):
    """Sum of coefficients of non-falsified literals minus the degree."""
    s = -c.degree
    for lit, a in c.terms.items():
        if lit_value(assignment, lit) != 0:
            s += a
    return s


def propagate(constraints, assignment=None):
    """Run slack-based unit propagation to fixpoint.

    Returns the extended assignment, or the string CONFLICT if some
    constraint's slack goes negative.  A literal l_i with a_i > slack is
    propagated to 1.
    """
    rho = dict(assignment) if assignment else {}
    constraints = list(constraints)
    changed = True
    while changed:
        changed = False
        for c in constraints:
            s = slack(c, rho)
            if s < 0:
                return CONFLICT
            for lit, a in c.terms.items():
                if a > s and lit_value(rho, lit) is None:
                    rho[var_of(lit)] = 1 if is_positive(lit) else 0
                    changed = True
    return rho


def rup_check(db, goal, hints=None):
    """Reverse unit propagation: db' + not(goal) must propagate to conflict.

    ``db`` maps IDs to constraints.  When hints are given they act as a
    filter (order is not semantically binding); otherwise the whole
    database is used.
    """
    if hints is not None:
        premises = [db[h] for h in hints]
    else:
        premises = list(db.values())
    premises.append(negate(goal))
    return propagate(premises) == CONFLICT


def render(c):
    """OPB-style text form: `+2 ~x1 +3 x2 >= 5`."""
    parts = []
    for lit, a in c.terms.items():
        parts.append("+%d %s" % (a, lit))
    parts.append(">= %d" % c.degree)
    return " ".join(parts)


def satisfies(c, assignment):
    """Total-assignment satisfaction test (used by the brute-force oracles)."""
    lhs = 0
    for lit, a in c.terms.items():
        val = lit_value(assignment, lit)
        if val is None:
            raise ConstraintError("assignment leaves %s unset" % lit)
        lhs += a * val
    return lhs >= c.degree
