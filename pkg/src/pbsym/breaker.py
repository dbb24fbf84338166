"""Proof-logging lex-leader symmetry breaking.

Given a formula F and a syntactic symmetry sigma, we derive the standard
lex-leader breaking clauses together with a proof that the checker in
:mod:`pbsym.checker` accepts.  Two derivation strategies are provided:

* the *chain* method ("new"): a lexicographic order whose specification
  introduces prefix-equality variables $a_i and prefix-comparison
  variables $d_i.  Per symmetry we introduce a small reified circuit over
  the support (variables s_j, t_j), derive ``t_k >= 1`` by dominance and
  turn it into clauses.  The fragment size scales with the support, not
  with the total variable count.

* the *aggregate* method ("old"): a one-constraint order with exponential
  coefficients sum 2^(n-i) (v_i + ~u_i) >= 2^n - 1.  Dominance introduces
  the instantiated big constraint directly and the clauses are carved out
  of it by weakening, which costs Theta(n) bits per symmetry.

The chain method's dominance subproofs come in two flavours: hint-free
reverse unit propagation lemmas (default) or explicit cutting planes
derivations (``cp_variant=True``, supported when the symmetry's support
is contiguous under the loaded variable order).
"""

from . import constraints as pb
from . import orders
from . import parsing


class BreakError(Exception):
    pass


# ------------------------------------------------------------- symmetries

class SymmetrySpec:
    """A candidate symmetry given as a variable -> literal substitution.

    The mapping must permute the literals: every moved variable occurs
    exactly once among the image variables.  Images may be negated
    (value symmetries such as x -> ~y are fine).
    """

    def __init__(self, mapping):
        clean = {}
        for var, img in mapping.items():
            if var.startswith("~"):
                raise BreakError("mapping keys must be variables, got %r" % var)
            if pb.is_aux_var(var) or pb.is_aux_var(pb.var_of(img)):
                raise BreakError("symmetries may not touch order-aux variables")
            if img != var:
                clean[var] = img
        image_vars = sorted(pb.var_of(i) for i in clean.values())
        if image_vars != sorted(clean):
            raise BreakError("substitution does not permute its support")
        self.mapping = clean

    def is_identity(self):
        return not self.mapping

    def support(self):
        """Moved variables, in mapping insertion order."""
        return list(self.mapping)

    def image(self, lit):
        img = self.mapping.get(pb.var_of(lit))
        if img is None:
            return lit
        return img if pb.is_positive(lit) else pb.neg(img)

    def apply(self, con):
        return pb.substitute(con, self.mapping)

    def witness_text(self):
        return " ".join("%s -> %s" % (v, img) for v, img in self.mapping.items())

    def __repr__(self):
        return "SymmetrySpec(%s)" % self.witness_text()


def parse_symmetry(text):
    """Parse one symmetry: cycle form ``(x1 x3)(x2 x4)`` or an arrow list
    ``x1 -> x3 x3 -> x1``.  Cycles are cycles of literals, so a negation
    symmetry reads ``(x1 ~x1)``."""
    text = text.strip()
    if not text:
        raise BreakError("empty symmetry description")
    mapping = {}

    def put(var, img):
        if var in mapping and mapping[var] != img:
            raise BreakError("conflicting images for %s" % var)
        mapping[var] = img

    if "(" in text:
        rest = text
        while rest.strip():
            rest = rest.strip()
            if not rest.startswith("("):
                raise BreakError("malformed cycle notation %r" % text)
            close = rest.find(")")
            if close < 0:
                raise BreakError("unbalanced parenthesis in %r" % text)
            lits = rest[1:close].split()
            rest = rest[close + 1:]
            if len(lits) < 2:
                raise BreakError("cycles need at least two literals")
            for i, lit in enumerate(lits):
                nxt = lits[(i + 1) % len(lits)]
                img = nxt if pb.is_positive(lit) else pb.neg(nxt)
                put(pb.var_of(lit), img)
    else:
        toks = text.split()
        if len(toks) % 3 != 0 or any(toks[i] != "->" for i in range(1, len(toks), 3)):
            raise BreakError("expected `var -> literal` triples in %r" % text)
        for i in range(0, len(toks), 3):
            put(toks[i], toks[i + 2])
    return SymmetrySpec(mapping)


def parse_symmetries(text):
    """One symmetry per non-empty, non-comment line."""
    syms = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("*"):
            syms.append(parse_symmetry(line))
    return syms


def verify_symmetry(formula, sym):
    """The substituted formula must equal the formula as a multiset."""
    want = {}
    for c in formula:
        want[c.key()] = want.get(c.key(), 0) + 1
    for c in formula:
        k = sym.apply(c).key()
        if not want.get(k):
            raise BreakError(
                "image of constraint `%s` is missing from the formula"
                % pb.render(c))
        want[k] -= 1
    return True


def choose_binding(variables, syms):
    """Variable order for load_order: the first symmetry's support goes
    last (contiguously), everything else keeps formula order."""
    if not syms:
        return list(variables)
    supp = set(syms[0].support())
    head = [v for v in variables if v not in supp]
    return head + [v for v in variables if v in supp]


# -------------------------------------------------- lexicographic order

def _fmt(terms, degree):
    return " ".join("+%d %s" % (a, l) for a, l in terms) + " >= %d" % degree


def _a_pair(cur, prev, u, v):
    """Reification cur <-> (prev and u >= v); prev None at the top level."""
    if prev is None:
        one = ([(1, pb.neg(cur)), (1, u), (1, pb.neg(v))], 1)
        two = ([(2, cur), (1, pb.neg(u)), (1, v)], 2)
    else:
        one = ([(3, pb.neg(cur)), (2, prev), (1, u), (1, pb.neg(v))], 3)
        two = ([(2, cur), (2, pb.neg(prev)), (1, pb.neg(u)), (1, v)], 2)
    return one, two


def _d_pair(cur, prevd, preva, u, v):
    """Reification cur <-> (u < v or (u = v and prevd)), lex style."""
    if prevd is None:
        one = ([(1, pb.neg(cur)), (1, pb.neg(u)), (1, v)], 1)
        two = ([(2, cur), (1, u), (1, pb.neg(v))], 2)
    else:
        one = ([(4, pb.neg(cur)), (3, prevd), (1, pb.neg(preva)),
                (1, pb.neg(u)), (1, v)], 4)
        two = ([(3, cur), (3, pb.neg(prevd)), (1, preva),
                (1, u), (1, pb.neg(v))], 3)
    return one, two


def _lex_rows(n, aname, dname, u, v):
    """All 4n-2 specification rows: (terms, degree, reified var, value)."""
    rows = []
    prev = None
    for i in range(1, n):
        cur = aname(i)
        one, two = _a_pair(cur, prev, u(i), v(i))
        rows.append(one + (cur, 0))
        rows.append(two + (cur, 1))
        prev = cur
    prevd = None
    for i in range(1, n + 1):
        cur = dname(i)
        one, two = _d_pair(cur, prevd, aname(i - 1) if i > 1 else None,
                           u(i), v(i))
        rows.append(one + (cur, 0))
        rows.append(two + (cur, 1))
        prevd = cur
    return rows


def lex_order_name(n):
    return "lex%d" % n


def build_lex_order(n):
    """The lexicographic OrderDefinition over n variables (not validated)."""
    u = lambda i: "u%d" % i
    v = lambda i: "v%d" % i
    a = lambda i: "$a%d" % i
    d = lambda i: "$d%d" % i
    aux = [a(i) for i in range(1, n)] + [d(i) for i in range(1, n + 1)]
    spec = [(pb.normalize(terms, deg), {wv: val})
            for terms, deg, wv, val in _lex_rows(n, a, d, u, v)]
    order = [pb.normalize([(1, d(n))], 1)]
    return orders.OrderDefinition(lex_order_name(n),
                                  [u(i) for i in range(1, n + 1)],
                                  [v(i) for i in range(1, n + 1)],
                                  aux, spec, order)


def _lex_transitivity_lines(n):
    """Subproof of O(u,w) from the three chained spec instances.

    Constraint IDs inside the obligation frame: spec S(u,v) occupies
    1..4n-2, S(v,w) and S(u,w) the next two blocks, then O(u,v), O(v,w)
    and the negated goal.  Returns the lines between ``proof`` and
    ``qed proof;``.
    """
    S = 4 * n - 2

    def a_id(block, i, half):
        return block * S + 2 * (i - 1) + half

    def d_id(block, i, half):
        return block * S + 2 * (n - 1) + 2 * (i - 1) + half

    o_uv, o_vw, neg_goal = 3 * S + 1, 3 * S + 2, 3 * S + 3
    cur = [neg_goal]
    lines = ["proofgoal #1"]

    def emit(text):
        cur[0] += 1
        lines.append(text)
        return cur[0]

    def chain(o_id, block, dn):
        """Derive ~x1 + y1 from O(x,y) by peeling the d-chain; returns the
        final ID plus the IDs of the weakened per-level constraints."""
        weak = {}
        if n == 1:
            return emit("pol %d %d +;" % (o_id, d_id(block, 1, 1))), weak
        emit("pol %d 4 * %d +;" % (o_id, d_id(block, n, 1)))
        final = None
        for j in range(n - 1, 0, -1):
            emit("rup +1 %s%d >= 1 : -1;" % (dn, j))
            weak[j] = emit("pol -2 %s%d w;" % (dn, j))
            if j >= 2:
                emit("pol -2 4 * %d +;" % d_id(block, j, 1))
            else:
                final = emit("pol -2 %d +;" % d_id(block, 1, 1))
        return final, weak

    uv_final, aweak = chain(o_uv, 0, "$d")
    vw_final, bweak = chain(o_vw, 1, "$e")

    ca, cb = {}, {}
    if n >= 2:
        ca[1] = emit("pol %d %d + -1 + s;" % (a_id(0, 1, 2), a_id(2, 1, 1)))
        cb[1] = emit("pol %d %d + %d + s;" % (a_id(1, 1, 2), a_id(2, 1, 1),
                                              uv_final))
    for i in range(2, n):
        head = a_id(2, i, 1)
        emit("pol %d u%d w w%d w s;" % (head, i, i))
        emit("pol -1 -3 +;")
        emit("pol -2 -3 +;")
        emit("pol %d $c%d w s;" % (head, i - 1))
        ca[i] = emit("pol -2 %d + -1 + -3 2 * + %d + s;"
                     % (bweak[i - 1], a_id(0, i, 2)))
        cb[i] = emit("pol -4 %d + -2 + -3 2 * + %d + s;"
                     % (aweak[i - 1], a_id(1, i, 2)))

    emit("pol %d %d +;" % (uv_final, vw_final))
    emit("pol -1 %d + s;" % d_id(2, 1, 2))
    for i in range(2, n + 1):
        emit("pol %d %d + %d + %d + s -1 3 * +;"
             % (aweak[i - 1], bweak[i - 1], ca[i - 1], cb[i - 1]))
        emit("pol -1 %d + s;" % d_id(2, i, 2))
    emit("pol -1 %d +;" % neg_goal)
    lines.append("qed #1 : -1;")
    return lines


def lex_order_definition(n, name=None):
    """Full def_order text (without trailing newline handling) for lex(n)."""
    name = name or lex_order_name(n)
    a = lambda i: "$a%d" % i
    d = lambda i: "$d%d" % i
    u = lambda i: "u%d" % i
    v = lambda i: "v%d" % i
    rng = range(1, n + 1)
    aux = [a(i) for i in range(1, n)] + [d(i) for i in rng]
    fresh1 = [s.replace("$a", "$b").replace("$d", "$e") for s in aux]
    fresh2 = [s.replace("$a", "$c").replace("$d", "$f") for s in aux]
    L = ["def_order %s" % name,
         "vars",
         "left %s;" % " ".join(u(i) for i in rng),
         "right %s;" % " ".join(v(i) for i in rng),
         "aux %s;" % " ".join(aux),
         "end vars;",
         "spec"]
    for terms, deg, wv, val in _lex_rows(n, a, d, u, v):
        L.append("red %s : %s -> %d;" % (_fmt(terms, deg), wv, val))
    L.extend(["end spec;",
              "def",
              "+1 %s >= 1;" % d(n),
              "end def;",
              "transitivity",
              "vars",
              "fresh_right %s;" % " ".join("w%d" % i for i in rng),
              "fresh_aux_1 %s;" % " ".join(fresh1),
              "fresh_aux_2 %s;" % " ".join(fresh2),
              "end vars;",
              "proof"])
    L.extend(_lex_transitivity_lines(n))
    L.extend(["qed proof;",
              "end transitivity;",
              "reflexivity",
              "proof",
              "proofgoal #1",
              "rup >= 1;",
              "qed #1 : -1;",
              "qed proof;",
              "end reflexivity;",
              "end def_order;"])
    return "\n".join(L)


# -------------------------------------------------- aggregate (old) order

def big_order_name(n):
    return "biglex%d" % n


def build_big_order(n):
    terms = []
    for i in range(1, n + 1):
        terms.append((2 ** (n - i), "v%d" % i))
        terms.append((2 ** (n - i), "~u%d" % i))
    order = [pb.normalize(terms, 2 ** n - 1)]
    return orders.OrderDefinition(big_order_name(n),
                                  ["u%d" % i for i in range(1, n + 1)],
                                  ["v%d" % i for i in range(1, n + 1)],
                                  [], [], order)


def big_order_definition(n, name=None):
    name = name or big_order_name(n)
    rng = range(1, n + 1)
    terms = []
    for i in rng:
        terms.append((2 ** (n - i), "v%d" % i))
        terms.append((2 ** (n - i), "~u%d" % i))
    return "\n".join([
        "def_order %s" % name,
        "vars",
        "left %s;" % " ".join("u%d" % i for i in rng),
        "right %s;" % " ".join("v%d" % i for i in rng),
        "aux;",
        "end vars;",
        "spec",
        "end spec;",
        "def",
        "%s;" % _fmt(terms, 2 ** n - 1),
        "end def;",
        "transitivity",
        "vars",
        "fresh_right %s;" % " ".join("w%d" % i for i in rng),
        "fresh_aux_1;",
        "fresh_aux_2;",
        "end vars;",
        "proof",
        "proofgoal #1",
        # premises: O(u,v) = 1, O(v,w) = 2; their sum dominates O(u,w)
        "pol 1 2 +;",
        "pol -1 3 +;",
        "qed #1 : -1;",
        "qed proof;",
        "end transitivity;",
        "reflexivity",
        "proof",
        # O(u,u) normalizes to a tautology; nothing to prove
        "qed proof;",
        "end reflexivity;",
        "end def_order;"])


# ------------------------------------------------------------ the builder

class ProofBuilder:
    """Emits the proof document, mirroring the checker's ID assignment.

    Root-level constraint IDs continue the formula numbering; dominance
    subproof locals (negated dom constraint, spec instances, goal steps)
    consume IDs from the same counter even though they become invisible
    once their scope closes.
    """

    def __init__(self, formula, variables, method="new", cp_variant=False):
        if method not in ("new", "old"):
            raise BreakError("unknown method %r" % method)
        self.formula = list(formula)
        self.variables = list(variables)
        self.method = method
        self.cp = cp_variant
        self.n = len(self.variables)
        self.lines = [parsing.HEADER]
        self.next_id = len(self.formula) + 1
        self.s_count = 0
        self.binding = None
        self.kept = []          # derived breaking clauses, in proof order
        self.content = {}       # id -> Constraint, for self-checked pols
        self.stats = []         # per-symmetry {"support": k, "chars": ...}

    # -- low-level helpers

    def line(self, text):
        self.lines.append(text)

    def step(self, text, content=None):
        """Emit a step that allocates one constraint ID."""
        self.lines.append(text)
        cid = self.next_id
        self.next_id += 1
        if content is not None:
            self.content[cid] = content
        return cid

    def text(self):
        return "\n".join(self.lines) + "\n"

    # -- document skeleton

    def begin(self, syms):
        self.binding = choose_binding(self.variables, syms)
        if self.method == "new":
            name = lex_order_name(self.n)
            self.line(lex_order_definition(self.n, name))
        else:
            name = big_order_name(self.n)
            self.line(big_order_definition(self.n, name))
        self.line("load_order %s %s;" % (name, " ".join(self.binding)))

    def break_symmetry(self, sym):
        if sym.is_identity():
            self.stats.append({"support": 0, "chars": 0})
            return
        mark = len(self.lines)
        pos = [i + 1 for i, z in enumerate(self.binding) if z in sym.mapping]
        xs = [self.binding[p - 1] for p in pos]
        imgs = [sym.mapping[x] for x in xs]
        if self.method == "new":
            self._break_new(sym, pos, xs, imgs)
        else:
            self._break_old(sym, pos, xs, imgs)
        chars = sum(len(l) + 1 for l in self.lines[mark:])
        self.stats.append({"support": len(pos), "chars": chars})

    # -- chain method

    def _emit_circuit(self, xs, imgs, with_t=True):
        """Reify the support comparison chain; returns (snames, s_ids, t_ids)."""
        k = len(xs)
        snames, s_ids, t_ids = {}, {}, {}
        prev = None
        for j in range(1, k):
            self.s_count += 1
            cur = "s%d" % self.s_count
            snames[j] = cur
            one, two = _a_pair(cur, prev, xs[j - 1], imgs[j - 1])
            s_ids[j] = (
                self.step("red %s : %s -> 0;" % (_fmt(*one), cur),
                          pb.normalize(*one)),
                self.step("red %s : %s -> 1;" % (_fmt(*two), cur),
                          pb.normalize(*two)))
            prev = cur
        if with_t:
            prevt = None
            for j in range(1, k + 1):
                cur = "t%d" % j
                one, two = _d_pair(cur, prevt, snames.get(j - 1),
                                   xs[j - 1], imgs[j - 1])
                t_ids[j] = (
                    self.step("red %s : %s -> 0;" % (_fmt(*one), cur),
                              pb.normalize(*one)),
                    self.step("red %s : %s -> 1;" % (_fmt(*two), cur),
                              pb.normalize(*two)))
                prevt = cur
        return snames, s_ids, t_ids

    def _break_new(self, sym, pos, xs, imgs):
        n, k = self.n, len(pos)
        q = pos[0] - 1
        frag_start = self.next_id
        snames, s_ids, t_ids = self._emit_circuit(xs, imgs)

        self.line("dom +1 t%d >= 1 : %s : subproof" % (k, sym.witness_text()))
        neg_c = self.next_id
        self.next_id += 1
        S = 4 * n - 2

        # spec instance IDs inside the leq frame
        base = self.next_id
        self.next_id += S
        A = lambda i, h: base + 2 * (i - 1) + (h - 1)
        D = lambda i, h: base + 2 * (n - 1) + 2 * (i - 1) + (h - 1)

        self.line("scope leq")
        self.line("proofgoal #1")
        self.next_id += 1  # negated order goal ~$dn
        self._leq_steps(pos, xs, imgs, snames, s_ids, t_ids, A, D, q)
        self.line("qed #1 : -1;")
        self.line("end scope;")

        self.line("scope geq")
        gbase = self.next_id
        self.next_id += S
        GA = lambda i, h: gbase + 2 * (i - 1) + (h - 1)
        GD = lambda i, h: gbase + 2 * (n - 1) + 2 * (i - 1) + (h - 1)
        o_id = self.next_id
        self.next_id += 1
        self.line("proofgoal #2")
        self._geq_steps(pos, xs, imgs, snames, s_ids, t_ids, GA, GD, q,
                        o_id, neg_c)
        self.line("qed #2 : -1;")
        self.line("end scope;")
        self.line("qed dom;")
        result = self.next_id
        self.next_id += 1
        self.content[result] = pb.normalize([(1, "t%d" % k)], 1)

        self._cleanup_new(pos, xs, imgs, snames, s_ids, t_ids,
                          frag_start, neg_c, result)

    def _leq_steps(self, pos, xs, imgs, snames, s_ids, t_ids, A, D, q):
        """Derive falsum from S(sigma z, z), ~(sigma z >= z) and ~t_k."""
        n, k = self.n, len(pos)
        emit = self.step
        f = q + 1

        emit("rup +1 ~$d%d >= 1;" % n)
        aq_id = emit("rup +1 $a%d >= 1;" % q) if q else emit("rup >= 0;")

        # rewrite the $a chain above the untouched prefix
        a_taut = {}
        a_first = {}
        if f <= n - 1:
            if q:
                a_first[1] = emit("pol %d ~$a%d 2 * + s;" % (A(f, 1), q))
                a_first[2] = emit("pol %d -2 2 * +;" % A(f, 2))
            else:
                a_first[1] = emit("pol %d;" % A(1, 1))
                a_first[2] = emit("pol %d;" % A(1, 2))
            for lv in range(f + 1, n):
                t1 = emit("rup +1 ~$a%d +1 $a%d >= 1;" % (lv - 1, lv - 1))
                t2 = emit("rup +1 $a%d +1 ~$a%d >= 1;" % (lv - 1, lv - 1))
                a_taut[lv - 1] = (t1, t2)
                emit("pol %d -2 2 * +;" % A(lv, 1))
                emit("pol %d -2 2 * +;" % A(lv, 2))
            t1 = emit("rup +1 ~$a%d +1 $a%d >= 1;" % (n - 1, n - 1))
            t2 = emit("rup +1 $a%d +1 ~$a%d >= 1;" % (n - 1, n - 1))
            a_taut[n - 1] = (t1, t2)

        # rewrite the $d chain likewise
        if q:
            emit("rup +1 $d%d >= 1;" % q)
            emit("pol %d ~$d%d 3 * + %d + s;" % (D(f, 1), q, aq_id))
            b2rew = emit("pol %d -2 3 * + ~$a%d +;" % (D(f, 2), q))
        else:
            emit("rup >= 0;")
            emit("pol %d;" % D(1, 1))
            b2rew = emit("pol %d;" % D(1, 2))
        for lv in range(f + 1, n + 1):
            emit("rup +1 ~$d%d +1 $d%d >= 1;" % (lv - 1, lv - 1))
            emit("rup +1 $d%d +1 ~$d%d >= 1;" % (lv - 1, lv - 1))
            ref = a_taut[lv - 1]
            emit("pol %d -2 3 * + %d +;" % (D(lv, 1), ref[1] - self.next_id))
            emit("pol %d -2 3 * + %d +;" % (D(lv, 2), ref[0] - self.next_id))

        if self.cp:
            self._leq_cp(pos, xs, imgs, snames, s_ids, t_ids, A, D, q,
                         a_first, b2rew)
            return

        # bridge lemmas between the circuit and the order's chain
        for j in range(1, k):
            emit("rup +1 $d%d +1 ~%s >= 1;" % (pos[j - 1], snames[j]))
        for j in range(1, k):
            emit("rup +1 t%d +1 ~$a%d >= 1;" % (j, pos[j - 1]))
        for j in range(1, k):
            emit("rup +1 t%d +1 ~t%d +1 $d%d >= 1;" % (j + 1, j, pos[j - 1]))
        for j in range(1, k):
            emit("rup +1 $d%d +1 ~$d%d +1 t%d >= 1;" % (pos[j], pos[j - 1], j))
        for m in range(1, k + 1):
            for j in (m - 1, m, m + 1):
                if 1 <= j <= k:
                    emit("rup +1 $d%d +1 t%d >= 1;" % (pos[m - 1], j))
        emit("rup >= 1;")

    def _leq_cp(self, pos, xs, imgs, snames, s_ids, t_ids, A, D, q,
                a_first, b2rew):
        """Cutting planes replacement for the leq bridge/chain/grid lemmas."""
        n, k = self.n, len(pos)
        if pos != list(range(q + 1, q + k + 1)) or pos[-1] != n:
            raise BreakError("cutting planes variant needs the support "
                             "contiguous at the end of the variable order")
        emit = self.step
        avar = lambda j: "$a%d" % pos[j - 1]

        sd, at = {}, {}
        if k >= 2:
            sd[1] = emit("pol %d %d + s;" % (b2rew, s_ids[1][0]))
            at[1] = emit("pol %d %d + s;" % (t_ids[1][1], a_first[1]))
        for j in range(1, k - 1):
            sd[j + 1] = emit(
                "pol %d %d %s w + %d 3 * + 2 * %d + %s w %s w s;"
                % (s_ids[j + 1][0], D(pos[j], 2), avar(j), sd[j],
                   s_ids[j + 1][0], xs[j], pb.var_of(imgs[j])))
            at[j + 1] = emit(
                "pol %d %d %s w + %d 3 * + 2 * %d + %s w %s w s;"
                % (A(pos[j], 1), t_ids[j + 1][1], snames[j], at[j],
                   A(pos[j], 1), pb.var_of(imgs[j]), xs[j]))
        tchain, dchain = {}, {}
        for j in range(1, k):
            tchain[j] = emit("pol %d %d + %s w %s w s;"
                             % (t_ids[j + 1][1], sd[j],
                                xs[j], pb.var_of(imgs[j])))
            dchain[j] = emit("pol %d %d + %s w %s w s;"
                             % (D(pos[j], 2), at[j],
                                pb.var_of(imgs[j]), xs[j]))
        grid = {1: emit("pol %d %d + s 2 d;" % (b2rew, t_ids[1][1]))}
        e2, e3 = {}, {}
        for j in range(1, k):
            e2[j] = emit("pol %d %d + s;" % (grid[j], tchain[j]))
            e3[j] = emit("pol %d %d + s;" % (grid[j], dchain[j]))
            grid[j + 1] = emit("pol %d %s w %d %s w + %d 3 * + %d 3 * + s 2 d;"
                               % (t_ids[j + 1][1], snames[j],
                                  D(pos[j], 2), avar(j),
                                  e2[j], e3[j]))
        emit("rup >= 1;")

    def _geq_steps(self, pos, xs, imgs, snames, s_ids, t_ids, GA, GD, q,
                   o_id, neg_c):
        """Derive falsum from S(z, sigma z), sigma z >= z and ~t_k."""
        n, k = self.n, len(pos)
        emit = self.step
        if self.cp:
            self._geq_cp(pos, xs, imgs, snames, s_ids, t_ids, GA, GD, q,
                         o_id, neg_c)
            return
        for i in range(n - 1, q, -1):
            emit("rup +1 $d%d >= 1;" % i)
        for j in range(1, k):
            emit("rup +1 ~%s +1 $a%d >= 1;" % (snames[j], pos[j - 1]))
        for j in range(1, k):
            emit("rup +1 t%d >= 1;" % j)
        emit("rup >= 1;")

    def _geq_cp(self, pos, xs, imgs, snames, s_ids, t_ids, GA, GD, q,
                o_id, neg_c):
        n, k = self.n, len(pos)
        if pos != list(range(q + 1, q + k + 1)) or pos[-1] != n:
            raise BreakError("cutting planes variant needs the support "
                             "contiguous at the end of the variable order")
        emit = self.step
        dlem = {n: o_id}
        for i in range(n - 1, q, -1):
            dlem[i] = emit("rup +1 $d%d >= 1;" % i)

        if q:
            aq_id = emit("rup +1 $a%d >= 1;" % q)
            arew = emit("pol %d -1 2 * +;" % GA(q + 1, 2))
            drew = emit("pol %d ~$d%d 3 * + %d + s;" % (GD(q + 1, 1), q, aq_id))
        else:
            arew = emit("pol %d;" % GA(1, 2))
            drew = emit("pol %d;" % GD(1, 1))

        asu = {}
        if k >= 2:
            asu[1] = emit("pol %d %d + s;" % (arew, s_ids[1][0]))
        for j in range(1, k - 1):
            asu[j + 1] = emit("pol %d %d + %d 2 * + s;"
                              % (GA(pos[j], 2), s_ids[j + 1][0], asu[j]))
        tl = {1: emit("pol %d %d + %d + s;" % (t_ids[1][1], drew, dlem[pos[0]]))}
        for j in range(1, k):
            tl[j + 1] = emit("pol %d %d + %d + %d 4 * + %d 3 * + $d%d w s;"
                             % (GD(pos[j], 1), t_ids[j + 1][1], asu[j],
                                dlem[pos[j]], tl[j], pos[j - 1]))
        emit("pol %d %d +;" % (tl[k], neg_c))

    def _cleanup_new(self, pos, xs, imgs, snames, s_ids, t_ids,
                     frag_start, neg_c, result):
        """Turn t_k >= 1 into the breaking clauses and drop the scaffolding."""
        k = len(pos)
        tlem = {k: result}
        for j in range(k - 1, 0, -1):
            tlem[j] = self.step("rup +1 t%d >= 1 : -1 %d;" % (j, t_ids[j + 1][0]),
                                pb.normalize([(1, "t%d" % j)], 1))
        clause_pols = []
        for j in range(1, k):
            clause_pols.append("pol %d %s + s;" % (s_ids[j][1], xs[j - 1]))
        for j in range(1, k):
            clause_pols.append("pol %d %s + s;" % (s_ids[j][1],
                                                   pb.neg(imgs[j - 1])))
        clause_pols.append("pol %d %d + s;" % (t_ids[1][0], tlem[1]))
        for j in range(1, k):
            clause_pols.append("pol %d ~t%d 3 * + %d 4 * + s;"
                               % (t_ids[j + 1][0], j, tlem[j + 1]))
        self._emit_clauses(clause_pols)
        self.line("del range %d %d;" % (frag_start, neg_c + 2))
        self.line("del range %d %d;" % (result, result + k))

    def _emit_clauses(self, clause_pols):
        """Emit clause-producing pol steps, recording their evaluated content."""
        for text in clause_pols:
            tokens = text[len("pol "):-1].split()
            cid = self.next_id
            con = pb.evaluate_polish(tokens, self._resolve(cid))
            self.step(text, con)
            self.kept.append(con)

    def _resolve(self, cid):
        def lookup(ref):
            key = cid + ref if ref < 0 else ref
            try:
                return self.content[key]
            except KeyError:
                raise BreakError("pol cites untracked constraint %d" % key)
        return lookup

    # -- aggregate method

    def _break_old(self, sym, pos, xs, imgs):
        n, k = self.n, len(pos)
        frag_start = self.next_id
        snames, s_ids, _ = self._emit_circuit(xs, imgs, with_t=False)

        order = build_big_order(n)
        left = [sym.mapping.get(z, z) for z in self.binding]
        big = orders.order_instance(order, self.binding, left)[0]
        self.line("dom %s : %s : subproof" % (pb.render(big),
                                              sym.witness_text()))
        neg_c = self.next_id
        self.next_id += 1
        self.line("scope leq")
        self.line("proofgoal #1")
        neg_goal = self.next_id
        self.next_id += 1
        self.step("pol %d %d +;" % (neg_c, neg_goal))
        self.line("qed #1 : -1;")
        self.line("end scope;")
        self.line("scope geq")
        o_id = self.next_id
        self.next_id += 1
        self.line("proofgoal #2")
        self.step("pol %d %d +;" % (neg_c, o_id))
        self.line("qed #2 : -1;")
        self.line("end scope;")
        self.line("qed dom;")
        big_id = self.next_id
        self.next_id += 1
        self.content[big_id] = big

        # chain lemmas: under s_{j-1}, every earlier support level is >=
        lemma = {}
        for j in range(2, k + 1):
            for m in range(1, j):
                lemma[j, m] = self.step(
                    "rup +1 ~%s +1 %s +1 %s >= 1;"
                    % (snames[j - 1], xs[m - 1], pb.neg(imgs[m - 1])),
                    pb.normalize([(1, pb.neg(snames[j - 1])), (1, xs[m - 1]),
                                  (1, pb.neg(imgs[m - 1]))], 1))

        clause_pols = []
        for j in range(1, k):
            clause_pols.append("pol %d %s + s;" % (s_ids[j][1], xs[j - 1]))
        for j in range(1, k):
            clause_pols.append("pol %d %s + s;" % (s_ids[j][1],
                                                   pb.neg(imgs[j - 1])))
        for j in range(1, k + 1):
            clause_pols.append(self._carve_clause(
                big, big_id, pos, xs, imgs, snames, lemma, j))
        first_clause = self.next_id
        self._emit_clauses(clause_pols)
        self.line("del range %d %d;" % (frag_start, first_clause))

    def _carve_clause(self, big, big_id, pos, xs, imgs, snames, lemma, j):
        """pol program extracting breaking clause j from the big constraint."""
        n = self.n
        tokens = [str(big_id)]
        cur = big
        for m in range(1, j):
            coef = 2 ** (n - pos[m - 1])
            tokens += [str(lemma[j, m]), str(coef), "*", "+"]
            cur = pb.add(cur, pb.multiply(self.content[lemma[j, m]], coef))
        wanted = {pb.var_of(xs[j - 1]), pb.var_of(imgs[j - 1])}
        if j > 1:
            wanted.add(snames[j - 1])
        for var in [pb.var_of(l) for l in cur.terms]:
            if var not in wanted:
                tokens += [var, "w"]
                cur = pb.weaken(cur, var)
        cur = pb.saturate(cur)
        tokens.append("s")
        delta = cur.degree
        if delta < 1:
            raise BreakError("aggregate clause %d degenerated to a tautology" % j)
        if delta > 1:
            tokens += [str(delta), "d"]
            cur = pb.divide(cur, delta)
        want_terms = [(1, pb.neg(xs[j - 1])), (1, imgs[j - 1])]
        if j > 1:
            want_terms.insert(0, (1, pb.neg(snames[j - 1])))
        if cur != pb.normalize(want_terms, 1):
            raise BreakError("aggregate clause %d came out as %s"
                             % (j, pb.render(cur)))
        return "pol %s;" % " ".join(tokens)


def break_symmetries(formula, variables, syms, method="new", cp_variant=False):
    """Emit breaking clauses plus proof for every symmetry, in order.

    Returns the :class:`ProofBuilder`; use ``.text()`` for the document,
    ``.kept`` for the derived clauses and ``.binding`` for the variable
    order used by the lexicographic comparison.
    """
    for sym in syms:
        verify_symmetry(formula, sym)
    builder = ProofBuilder(formula, variables, method=method,
                           cp_variant=cp_variant)
    active = [s for s in syms if not s.is_identity()]
    if active:
        builder.begin(active)
        for sym in active:
            builder.break_symmetry(sym)
    else:
        builder.binding = list(variables)
    return builder
