"""Parsers and serializers for OPB formulas, DIMACS CNF and proof documents.

The proof AST is a list of dict-shaped steps (key ``kind``), each carrying
the source line number under ``line`` so checker rejections can cite the
offending statement.  Relative constraint IDs (negative integers) are kept
symbolic; they only make sense against the live counter at check time.
"""

from . import constraints as pb

HEADER = "pseudo-Boolean proof version 3.0"


class ParseError(Exception):
    def __init__(self, message, line=None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


# ---------------------------------------------------------------- formulas

def parse_opb(text):
    """Parse an OPB file into a list of normalized constraints.

    Returns (constraints, variables-in-order-of-first-use).
    """
    cons = []
    seen = []
    seen_set = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("*"):
            continue
        toks = line.split()
        if toks[-1] == ";":
            toks = toks[:-1]
        elif toks[-1].endswith(";"):
            toks[-1] = toks[-1][:-1]
        if ";" in toks:
            raise ParseError("stray ';' inside constraint", lineno)
        terms, degree, rest = _parse_terms(toks, lineno)
        if rest:
            raise ParseError("trailing tokens %r" % rest, lineno)
        for _, lit in terms:
            v = pb.var_of(lit)
            if v not in seen_set:
                seen_set.add(v)
                seen.append(v)
        cons.append(pb.normalize(terms, degree))
    return cons, seen


def parse_cnf(text):
    """Parse DIMACS CNF; clauses become sum of literals >= 1."""
    nvars = None
    cons = []
    clause = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError("bad problem line %r" % line, lineno)
            nvars = int(parts[2])
            continue
        if nvars is None:
            raise ParseError("clause before 'p cnf' header", lineno)
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                cons.append(pb.normalize(
                    [(1, ("x%d" % lit2) if lit2 > 0 else ("~x%d" % -lit2))
                     for lit2 in clause], 1))
                clause = []
            else:
                if abs(lit) > nvars:
                    raise ParseError("literal %d exceeds declared %d variables"
                                     % (lit, nvars), lineno)
                clause.append(lit)
    if clause:
        raise ParseError("last clause lacks terminating 0")
    return cons


def render_cnf(cons, nvars):
    lines = ["p cnf %d %d" % (nvars, len(cons))]
    for c in cons:
        if c.degree != 1 or any(a != 1 for a in c.terms.values()):
            raise ParseError("constraint %s is not a clause" % pb.render(c))
        lits = []
        for lit in c.terms:
            v = pb.var_of(lit)
            if not v.startswith("x"):
                raise ParseError("non-indexed variable %s" % v)
            lits.append(("-" if lit.startswith("~") else "") + v[1:])
        lines.append(" ".join(lits) + " 0")
    return "\n".join(lines) + "\n"


def _parse_terms(toks, lineno):
    """Parse `<coef> <lit> ... >= <int>` from a token list.

    Returns (terms, degree, remaining tokens after the degree).
    """
    terms = []
    i = 0
    while i < len(toks) and toks[i] != ">=":
        try:
            coef = int(toks[i])
        except ValueError:
            raise ParseError("expected coefficient, got %r" % toks[i], lineno)
        if i + 1 >= len(toks):
            raise ParseError("coefficient without literal", lineno)
        terms.append((coef, toks[i + 1]))
        i += 2
    if i >= len(toks):
        raise ParseError("missing '>='", lineno)
    if i + 1 >= len(toks):
        raise ParseError("missing degree after '>='", lineno)
    try:
        degree = int(toks[i + 1])
    except ValueError:
        raise ParseError("bad degree %r" % toks[i + 1], lineno)
    return terms, degree, toks[i + 2:]


# ------------------------------------------------------------------ proofs

def _parse_witness(toks, lineno):
    """Witness text: arrow form `x1 -> x3 x2 -> 0` or pair list `x5 x4 ...`."""
    w = {}
    if "->" in toks:
        if len(toks) % 3 != 0:
            raise ParseError("malformed arrow witness", lineno)
        for j in range(0, len(toks), 3):
            var, arrow, img = toks[j], toks[j + 1], toks[j + 2]
            if arrow != "->":
                raise ParseError("malformed arrow witness", lineno)
            _witness_put(w, var, img, lineno)
    else:
        if len(toks) % 2 != 0:
            raise ParseError("odd pair-list witness", lineno)
        for j in range(0, len(toks), 2):
            _witness_put(w, toks[j], toks[j + 1], lineno)
    return w


def _witness_put(w, var, img, lineno):
    if var.startswith("~"):
        raise ParseError("witness keys must be variables, got %r" % var, lineno)
    if var in w:
        raise ParseError("variable %s witnessed twice" % var, lineno)
    w[var] = int(img) if img in ("0", "1") else img


class _Lines:
    """Token stream over the significant lines of a proof document."""

    def __init__(self, text):
        self.items = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("*"):
                continue
            toks = stripped.replace(";", " ").split()
            if toks:
                self.items.append((lineno, toks))
        self.pos = 0

    def peek(self):
        if self.pos >= len(self.items):
            return None, None
        return self.items[self.pos]

    def take(self):
        lineno, toks = self.peek()
        if toks is None:
            raise ParseError("unexpected end of proof")
        self.pos += 1
        return lineno, toks

    def expect(self, *head):
        lineno, toks = self.take()
        if tuple(toks[: len(head)]) != head:
            raise ParseError("expected %r, got %r" % (" ".join(head), " ".join(toks)),
                             lineno)
        return lineno, toks


def _split_on_colons(toks):
    parts = [[]]
    for t in toks:
        if t == ":":
            parts.append([])
        else:
            parts[-1].append(t)
    return parts


def _parse_rup(toks, lineno):
    parts = _split_on_colons(toks)
    terms, degree, rest = _parse_terms(parts[0], lineno)
    if rest:
        raise ParseError("trailing tokens in rup goal", lineno)
    hints = None
    if len(parts) == 2:
        hints = [int(t) for t in parts[1]]
    elif len(parts) > 2:
        raise ParseError("too many ':' sections in rup", lineno)
    return {"kind": "rup", "line": lineno,
            "constraint": pb.normalize(terms, degree), "hints": hints}


def _parse_red(toks, lineno):
    parts = _split_on_colons(toks)
    if len(parts) != 2:
        raise ParseError("red needs exactly one ':' before the witness", lineno)
    terms, degree, rest = _parse_terms(parts[0], lineno)
    if rest:
        raise ParseError("trailing tokens in red constraint", lineno)
    return {"kind": "red", "line": lineno,
            "constraint": pb.normalize(terms, degree),
            "witness": _parse_witness(parts[1], lineno)}


def _parse_goal_key(tok, lineno):
    if tok.startswith("#"):
        try:
            return "#%d" % int(tok[1:])
        except ValueError:
            raise ParseError("bad proofgoal key %r" % tok, lineno)
    try:
        return int(tok)
    except ValueError:
        raise ParseError("bad proofgoal key %r" % tok, lineno)


def _parse_proofgoals(lines, closer):
    """Parse a sequence of `proofgoal <key> ... qed <key> [: hint]` blocks.

    Stops (without consuming) at the token sequence `closer`.
    """
    goals = []
    while True:
        lineno, toks = lines.peek()
        if toks is None:
            raise ParseError("unterminated subproof, expected %r" % (closer,))
        if tuple(toks[: len(closer)]) == closer:
            return goals
        lineno, toks = lines.expect("proofgoal")
        key = _parse_goal_key(toks[1], lineno)
        steps = []
        qed_hint = None
        while True:
            qlineno, qtoks = lines.take()
            if qtoks[0] == "qed":
                if len(qtoks) >= 2 and _parse_goal_key(qtoks[1], qlineno) != key:
                    raise ParseError("qed key mismatch for proofgoal %s" % key,
                                     qlineno)
                if len(qtoks) == 4 and qtoks[2] == ":":
                    qed_hint = int(qtoks[3])
                elif len(qtoks) > 2:
                    raise ParseError("malformed qed", qlineno)
                break
            steps.append(_parse_simple_step(qtoks, qlineno))
        goals.append({"key": key, "line": lineno, "steps": steps,
                      "qed_hint": qed_hint})


def _parse_simple_step(toks, lineno):
    head = toks[0]
    if head == "pol":
        return {"kind": "pol", "line": lineno, "tokens": toks[1:]}
    if head == "rup":
        return _parse_rup(toks[1:], lineno)
    if head == "red":
        return _parse_red(toks[1:], lineno)
    raise ParseError("unknown step %r inside subproof" % head, lineno)


def _parse_var_decls(lines, expected_heads):
    decls = {}
    for head in expected_heads:
        lineno, toks = lines.expect(head)
        decls[head] = toks[1:]
    lines.expect("end", "vars")
    return decls


def _parse_def_order(lines, lineno0, name):
    lines.expect("vars")
    decls = _parse_var_decls(lines, ("left", "right", "aux"))
    lines.expect("spec")
    spec = []
    while True:
        lineno, toks = lines.peek()
        if toks[:2] == ["end", "spec"]:
            lines.take()
            break
        lineno, toks = lines.take()
        if toks[0] != "red":
            raise ParseError("spec entries must be red steps", lineno)
        step = _parse_red(toks[1:], lineno)
        spec.append((step["constraint"], step["witness"]))
    lines.expect("def")
    order_cons = []
    while True:
        lineno, toks = lines.peek()
        if toks[:2] == ["end", "def"]:
            lines.take()
            break
        lineno, toks = lines.take()
        terms, degree, rest = _parse_terms(toks, lineno)
        if rest:
            raise ParseError("trailing tokens in order constraint", lineno)
        order_cons.append(pb.normalize(terms, degree))
    lines.expect("transitivity")
    lines.expect("vars")
    fresh = _parse_var_decls(lines, ("fresh_right", "fresh_aux_1", "fresh_aux_2"))
    lines.expect("proof")
    trans_goals = _parse_proofgoals(lines, ("qed", "proof"))
    lines.expect("qed", "proof")
    lines.expect("end", "transitivity")
    lines.expect("reflexivity")
    lines.expect("proof")
    refl_goals = _parse_proofgoals(lines, ("qed", "proof"))
    lines.expect("qed", "proof")
    lines.expect("end", "reflexivity")
    lines.expect("end", "def_order")
    return {"kind": "def_order", "line": lineno0, "name": name,
            "left": decls["left"], "right": decls["right"], "aux": decls["aux"],
            "spec": spec, "def": order_cons,
            "transitivity": {"fresh_right": fresh["fresh_right"],
                             "fresh_aux_1": fresh["fresh_aux_1"],
                             "fresh_aux_2": fresh["fresh_aux_2"],
                             "goals": trans_goals},
            "reflexivity": {"goals": refl_goals}}


def _parse_dom(lines, toks, lineno):
    parts = _split_on_colons(toks)
    if len(parts) != 3 or parts[2] != ["subproof"]:
        raise ParseError("dom must end in ': subproof'", lineno)
    terms, degree, rest = _parse_terms(parts[0], lineno)
    if rest:
        raise ParseError("trailing tokens in dom constraint", lineno)
    witness = _parse_witness(parts[1], lineno)
    scopes = {}
    for expected in ("leq", "geq"):
        slineno, stoks = lines.expect("scope")
        if stoks[1] != expected:
            raise ParseError("expected scope %s, got %s" % (expected, stoks[1]),
                             slineno)
        scopes[expected] = _parse_proofgoals(lines, ("end", "scope"))
        lines.expect("end", "scope")
    lines.expect("qed", "dom")
    return {"kind": "dom", "line": lineno,
            "constraint": pb.normalize(terms, degree),
            "witness": witness, "leq": scopes["leq"], "geq": scopes["geq"]}


def parse_proof(text):
    """Parse a proof document into {"header":..., "steps": [...]}."""
    lines = _Lines(text)
    lineno, toks = lines.take()
    if " ".join(toks) != HEADER:
        raise ParseError("missing proof header", lineno)
    steps = []
    while True:
        lineno, toks = lines.peek()
        if toks is None:
            break
        lines.take()
        head = toks[0]
        if head == "def_order":
            if len(toks) != 2:
                raise ParseError("def_order needs a name", lineno)
            steps.append(_parse_def_order(lines, lineno, toks[1]))
        elif head == "load_order":
            steps.append({"kind": "load_order", "line": lineno,
                          "name": toks[1], "vars": toks[2:]})
        elif head == "pol":
            steps.append({"kind": "pol", "line": lineno, "tokens": toks[1:]})
        elif head == "rup":
            steps.append(_parse_rup(toks[1:], lineno))
        elif head == "red":
            steps.append(_parse_red(toks[1:], lineno))
        elif head == "dom":
            steps.append(_parse_dom(lines, toks[1:], lineno))
        elif head == "del":
            if len(toks) != 4 or toks[1] != "range":
                raise ParseError("only 'del range a b' is supported", lineno)
            steps.append({"kind": "del_range", "line": lineno,
                          "start": int(toks[2]), "stop": int(toks[3])})
        elif head == "output":
            steps.append({"kind": "output", "line": lineno, "value": toks[1:]})
        elif head == "conclusion":
            steps.append({"kind": "conclusion", "line": lineno,
                          "value": toks[1:]})
        elif head == "end":
            # `end pseudo-Boolean proof` trailer
            break
        else:
            raise ParseError("unknown keyword %r" % head, lineno)
    return {"header": HEADER, "steps": steps}


# -------------------------------------------------------------- serializer

def _render_witness(w):
    out = []
    for var, img in w.items():
        out.append("%s -> %s" % (var, img))
    return " ".join(out)


def _render_goals(out, goals):
    for g in goals:
        key = g["key"] if isinstance(g["key"], int) else g["key"]
        out.append("proofgoal %s" % key)
        for s in g["steps"]:
            _render_simple(out, s)
        if g["qed_hint"] is not None:
            out.append("qed %s : %d;" % (key, g["qed_hint"]))
        else:
            out.append("qed %s;" % key)


def _render_simple(out, s):
    if s["kind"] == "pol":
        out.append("pol %s;" % " ".join(s["tokens"]))
    elif s["kind"] == "rup":
        line = "rup %s" % pb.render(s["constraint"])
        if s["hints"] is not None:
            line += " : %s" % " ".join(str(h) for h in s["hints"])
        out.append(line + ";")
    elif s["kind"] == "red":
        out.append("red %s : %s;" % (pb.render(s["constraint"]),
                                     _render_witness(s["witness"])))
    else:
        raise ParseError("cannot serialize %r in subproof" % s["kind"])


def serialize_proof(doc):
    out = [doc["header"]]
    for s in doc["steps"]:
        kind = s["kind"]
        if kind in ("pol", "rup", "red"):
            _render_simple(out, s)
        elif kind == "load_order":
            out.append("load_order %s %s;" % (s["name"], " ".join(s["vars"])))
        elif kind == "del_range":
            out.append("del range %d %d;" % (s["start"], s["stop"]))
        elif kind == "dom":
            out.append("dom %s : %s : subproof" % (pb.render(s["constraint"]),
                                                   _render_witness(s["witness"])))
            for scope in ("leq", "geq"):
                out.append("scope %s" % scope)
                _render_goals(out, s[scope])
                out.append("end scope;")
            out.append("qed dom;")
        elif kind == "def_order":
            out.append("def_order %s" % s["name"])
            out.append("vars")
            out.append("left %s;" % " ".join(s["left"]))
            out.append("right %s;" % " ".join(s["right"]))
            out.append("aux %s;" % " ".join(s["aux"]))
            out.append("end vars;")
            out.append("spec")
            for con, w in s["spec"]:
                out.append("red %s : %s;" % (pb.render(con), _render_witness(w)))
            out.append("end spec;")
            out.append("def")
            for con in s["def"]:
                out.append("%s;" % pb.render(con))
            out.append("end def;")
            out.append("transitivity")
            out.append("vars")
            out.append("fresh_right %s;" % " ".join(s["transitivity"]["fresh_right"]))
            out.append("fresh_aux_1 %s;" % " ".join(s["transitivity"]["fresh_aux_1"]))
            out.append("fresh_aux_2 %s;" % " ".join(s["transitivity"]["fresh_aux_2"]))
            out.append("end vars;")
            out.append("proof")
            _render_goals(out, s["transitivity"]["goals"])
            out.append("qed proof;")
            out.append("end transitivity;")
            out.append("reflexivity")
            out.append("proof")
            _render_goals(out, s["reflexivity"]["goals"])
            out.append("qed proof;")
            out.append("end reflexivity;")
            out.append("end def_order;")
        elif kind in ("output", "conclusion"):
            out.append("%s %s;" % (kind, " ".join(s["value"])))
        else:
            raise ParseError("cannot serialize step kind %r" % kind)
    return "\n".join(out) + "\n"


def strip_lines(doc):
    """Structural copy with source line numbers removed, for round-trip tests."""
    import copy

    def scrub(obj):
        if isinstance(obj, dict):
            return {k: scrub(v) for k, v in obj.items() if k != "line"}
        if isinstance(obj, list):
            return [scrub(x) for x in obj]
        if isinstance(obj, tuple):
            return tuple(scrub(x) for x in obj)
        return obj

    return scrub(copy.deepcopy(doc))
