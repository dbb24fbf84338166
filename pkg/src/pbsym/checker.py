"""The proof state machine.

Maintains the configuration (core set, derived set, loaded order, z-binding,
ID-indexed constraint database, scope stack) and executes proof steps.
Constraint IDs increase monotonically and are never reused; deletion only
removes visibility.  Subproof scopes get their own frame whose local
constraints become invisible once the scope is closed.
"""

from . import constraints as pb
from . import orders as ordmod

UNSAT = "UNSAT"
VERIFIED = "VERIFIED-DERIVATION"


class CheckError(Exception):
    def __init__(self, message, line=None, goal=None, reason="invalid-step"):
        self.line = line
        self.goal = goal
        self.reason = reason
        prefix = "line:%s goal:%s reason:%s" % (
            line if line is not None else "-",
            goal if goal is not None else "-", reason)
        super().__init__("%s %s" % (prefix, message))


class _Thunk:
    """A lazily materialized spec constraint."""

    __slots__ = ("fn",)

    def __init__(self, fn):
        self.fn = fn

    def force(self, state):
        if state is not None:
            state.counters["spec_materializations"] += 1
        return self.fn()


def _is_falsum(c):
    return not c.terms and c.degree >= 1


class Frame:
    """One visibility scope.  The ID counter may be shared with the parent
    (subproofs continue the global numbering) or local (def_order blocks
    restart at 1)."""

    def __init__(self, state=None, parent=None, counter=None):
        self.state = state if state is not None else (
            parent.state if parent else None)
        self.parent = parent
        self.cons = {}
        self.deleted = set()
        if counter is not None:
            self.counter = counter
        elif parent is not None:
            self.counter = parent.counter
        else:
            self.counter = [1]

    def alloc(self):
        cid = self.counter[0]
        self.counter[0] += 1
        return cid

    def add(self, con):
        cid = self.alloc()
        self.cons[cid] = con
        return cid

    def add_thunk(self, fn):
        cid = self.alloc()
        self.cons[cid] = _Thunk(fn)
        return cid

    def get(self, cid, line=None):
        f = self
        while f is not None:
            if cid in f.deleted:
                break
            if cid in f.cons:
                val = f.cons[cid]
                if isinstance(val, _Thunk):
                    val = val.force(self.state)
                    f.cons[cid] = val
                return val
            f = f.parent
        raise CheckError("constraint %d is not visible here" % cid,
                         line=line, reason="invisible-id")

    def resolve_id(self, cid):
        return self.counter[0] + cid if cid < 0 else cid

    def get_rel(self, cid, line=None):
        return self.get(self.resolve_id(cid), line)

    def visible(self):
        """All visible constraints as id -> Constraint (materializes thunks)."""
        out = {}
        deleted = set()
        f = self
        while f is not None:
            deleted |= f.deleted
            for cid in f.cons:
                if cid not in deleted and cid not in out:
                    out[cid] = self.get(cid)
            f = f.parent
        return out


def _run_rup(state, frame, goal, hints, line):
    if state is not None:
        state.counters["rup_calls"] += 1
    if hints is not None:
        db = {}
        for h in hints:
            rid = frame.resolve_id(h)
            db[rid] = frame.get(rid, line)
    else:
        db = frame.visible()
    return pb.rup_check(db, goal)


def _run_simple_steps(state, frame, steps):
    for step in steps:
        kind = step["kind"]
        line = step["line"]
        if kind == "pol":
            try:
                con = pb.evaluate_polish(
                    step["tokens"], lambda cid: frame.get_rel(cid, line))
            except pb.ConstraintError as e:
                raise CheckError(str(e), line=line, reason="bad-polish")
            frame.add(con)
        elif kind == "rup":
            if not _run_rup(state, frame, step["constraint"], step["hints"], line):
                raise CheckError("RUP did not reach a conflict for %s"
                                 % pb.render(step["constraint"]),
                                 line=line, reason="rup-failed")
            frame.add(step["constraint"])
        else:
            raise CheckError("step %r not allowed inside a subproof" % kind,
                             line=line, reason="invalid-step")


def _qed(state, frame, qed_hint, line, goal_key):
    if qed_hint is not None:
        con = frame.get_rel(qed_hint, line)
        if not con.is_contradiction():
            raise CheckError("cited constraint %s is not contradictory"
                             % pb.render(con), line=line, goal=goal_key,
                             reason="qed-not-contradiction")
    else:
        if not _run_rup(state, frame, pb.FALSUM, None, line):
            raise CheckError("no contradiction at qed", line=line,
                             goal=goal_key, reason="qed-failed")


def run_obligation(premises, goals, blocks, label):
    """Run the proofgoal blocks of a reflexivity/transitivity subproof.

    Premises get IDs 1..len(premises); each goal #k appends its negation
    (unless the goal is falsum) and must reach a contradiction.
    """
    frame = Frame(counter=[1])
    for p in premises:
        frame.add(p)
    by_key = {}
    for b in blocks:
        key = b["key"]
        if key in by_key:
            raise CheckError("proofgoal %s given twice in %s" % (key, label),
                             line=b["line"], goal=key, reason="duplicate-goal")
        by_key[key] = b
    for k, goalcon in enumerate(goals, start=1):
        key = "#%d" % k
        b = by_key.pop(key, None)
        if b is None:
            if goalcon.is_tautology():
                continue
            raise CheckError("missing proofgoal %s in %s" % (key, label),
                             goal=key, reason="unproven-goal")
        g = Frame(parent=frame)
        if not _is_falsum(goalcon):
            g.add(pb.negate(goalcon))
        _run_simple_steps(None, g, b["steps"])
        _qed(None, g, b["qed_hint"], b["line"], key)
    if by_key:
        raise CheckError("unmatched proofgoal keys %s in %s"
                         % (sorted(by_key), label), reason="unknown-goal")


class Checker:
    """Checks one proof document against one formula."""

    def __init__(self, formula):
        self.root = Frame(state=self)
        self.core_ids = set()
        for c in formula:
            self.core_ids.add(self.root.add(c))
        self.orders = {}
        self.loaded = ordmod.TRIVIAL
        self.z_binding = []
        self.counters = {"spec_materializations": 0,
                         "implicit_reflexivity_skips": 0,
                         "rup_calls": 0,
                         "proof_bytes": 0}
        self.trace = None  # optional list collecting goal discharge decisions

    # -------------------------------------------------------------- helpers

    def _note(self, msg):
        if self.trace is not None:
            self.trace.append(msg)

    def _check_rule_constraint(self, c, w, line):
        aux = [v for v in c.variables() if pb.is_aux_var(v)]
        if aux:
            raise CheckError("constraint mentions order-aux variables %s"
                             % sorted(aux), line=line, reason="aux-in-constraint")
        for var, img in w.items():
            if pb.is_aux_var(var):
                raise CheckError("witness maps order-aux variable %s" % var,
                                 line=line, reason="aux-in-witness")
            if isinstance(img, str) and pb.is_aux_var(pb.var_of(img)):
                raise CheckError("witness image %s is an order-aux variable" % img,
                                 line=line, reason="aux-in-witness")

    def _derived_ids(self):
        return [cid for cid in self.root.cons
                if cid not in self.core_ids and cid not in self.root.deleted]

    def _witness_images(self, w):
        return [pb.apply_witness_lit(w, zv) for zv in self.z_binding]

    # ---------------------------------------------------------------- steps

    def step_pol(self, step):
        try:
            con = pb.evaluate_polish(
                step["tokens"],
                lambda cid: self.root.get_rel(cid, step["line"]))
        except pb.ConstraintError as e:
            raise CheckError(str(e), line=step["line"], reason="bad-polish")
        self.root.add(con)

    def step_rup(self, step):
        if not _run_rup(self, self.root, step["constraint"], step["hints"],
                        step["line"]):
            raise CheckError("RUP did not reach a conflict for %s"
                             % pb.render(step["constraint"]),
                             line=step["line"], reason="rup-failed")
        self.root.add(step["constraint"])

    def step_red(self, step):
        c, w, line = step["constraint"], step["witness"], step["line"]
        self._check_rule_constraint(c, w, line)
        visible = self.root.visible()
        negc = pb.negate(c)
        premise_keys = {con.key() for con in visible.values()}
        premise_keys.add(negc.key())
        domw = set(w)
        touches = bool(domw & set(self.z_binding))

        spec_cache = []
        if touches:
            left = self._witness_images(w)
        else:
            self.counters["implicit_reflexivity_skips"] += 1

        def rup_db():
            # spec premises of the order goal, materialized on first use
            if touches and not spec_cache:
                for fn in ordmod.spec_instance(self.loaded, left,
                                               self.z_binding):
                    self.counters["spec_materializations"] += 1
                    spec_cache.append(fn())
            db = dict(visible)
            db["neg-c"] = negc
            for i, s in enumerate(spec_cache):
                db[("spec", i)] = s
            return db

        def discharge(goal_key, goal):
            if goal.is_tautology():
                self._note("goal %s: tautology" % goal_key)
                return
            if goal.key() in premise_keys:
                self._note("goal %s: syntactic premise" % goal_key)
                return
            self.counters["rup_calls"] += 1
            if pb.rup_check(rup_db(), goal):
                self._note("goal %s: rup" % goal_key)
                return
            raise CheckError("goal %s not derivable" % pb.render(goal),
                             line=line, goal=goal_key, reason="undischarged-goal")

        for gid, G in visible.items():
            if not (G.variables() & domw):
                self._note("goal %s: untouched by witness" % gid)
                continue
            discharge(gid, pb.substitute(G, w))
        discharge("self", pb.substitute(c, w))

        if touches and self.loaded.n > 0:
            left = self._witness_images(w)
            for k, og in enumerate(ordmod.order_instance(
                    self.loaded, left, self.z_binding), start=1):
                discharge("#%d" % k, og)

        self.root.add(c)

    def step_dom(self, step):
        c, w, line = step["constraint"], step["witness"], step["line"]
        if self.loaded.n == 0:
            raise CheckError("dominance requires a loaded non-trivial order",
                             line=line, reason="no-order")
        self._check_rule_constraint(c, w, line)
        left = self._witness_images(w)
        if all(l == z for l, z in zip(left, self.z_binding)):
            raise CheckError("witness acts as identity on the z-binding",
                             line=line, reason="identity-witness")

        sub = Frame(parent=self.root)
        sub.add(pb.negate(c))

        # --- leq scope: S(z|w, z) premises; goals C|w plus each order constraint
        leqf = Frame(parent=sub)
        for fn in ordmod.spec_instance(self.loaded, left, self.z_binding):
            leqf.add_thunk(fn)
        ord_goals = ordmod.order_instance(self.loaded, left, self.z_binding)
        core_keys = {self.root.get(cid).key() for cid in self.core_ids
                     if cid not in self.root.deleted}
        pending_core = {}
        for cid in sorted(self.core_ids):
            goal = pb.substitute(self.root.get(cid), w)
            if goal.is_tautology() or goal.key() in core_keys:
                self._note("core goal %d: auto" % cid)
            else:
                pending_core[cid] = goal
        pending_order = {"#%d" % k: og for k, og in enumerate(ord_goals, 1)}

        for block in step["leq"]:
            key = block["key"]
            if isinstance(key, int):
                if key not in pending_core:
                    raise CheckError("proofgoal %s is not pending" % key,
                                     line=block["line"], goal=key,
                                     reason="unknown-goal")
                goalcon = pending_core.pop(key)
            else:
                if key not in pending_order:
                    raise CheckError("proofgoal %s is not pending" % key,
                                     line=block["line"], goal=key,
                                     reason="unknown-goal")
                goalcon = pending_order.pop(key)
            g = Frame(parent=leqf)
            if not _is_falsum(goalcon):
                g.add(pb.negate(goalcon))
            _run_simple_steps(self, g, block["steps"])
            _qed(self, g, block["qed_hint"], block["line"], key)

        for key, goalcon in list(pending_order.items()):
            if goalcon.is_tautology():
                continue
            if _run_rup(self, leqf, goalcon, None, line):
                continue
            raise CheckError("order goal %s undischarged" % key, line=line,
                             goal=key, reason="undischarged-goal")
        if pending_core:
            raise CheckError("core goals %s undischarged"
                             % sorted(pending_core), line=line,
                             goal=sorted(pending_core)[0],
                             reason="undischarged-goal")

        # --- geq scope: S(z, z|w) and O(z, z|w) premises; single falsum goal
        geqf = Frame(parent=sub)
        for fn in ordmod.spec_instance(self.loaded, self.z_binding, left):
            geqf.add_thunk(fn)
        for og in ordmod.order_instance(self.loaded, self.z_binding, left):
            geqf.add(og)
        falsum_key = "#%d" % (len(ord_goals) + 1)
        blocks = step["geq"]
        if len(blocks) != 1 or blocks[0]["key"] != falsum_key:
            raise CheckError("geq scope must prove exactly goal %s" % falsum_key,
                             line=line, goal=falsum_key, reason="unknown-goal")
        g = Frame(parent=geqf)
        _run_simple_steps(self, g, blocks[0]["steps"])
        _qed(self, g, blocks[0]["qed_hint"], blocks[0]["line"], falsum_key)

        self.root.add(c)

    def step_def_order(self, step):
        try:
            order = ordmod.OrderDefinition(
                step["name"], step["left"], step["right"], step["aux"],
                step["spec"], step["def"])
            ordmod.validate(order, step["transitivity"], step["reflexivity"])
        except ordmod.OrderError as e:
            raise CheckError(str(e), line=step["line"], reason="bad-order")
        self.orders[step["name"]] = order

    def step_load_order(self, step):
        name, zvars, line = step["name"], step["vars"], step["line"]
        order = self.orders.get(name)
        if order is None or not order.validated:
            raise CheckError("order %r is not defined and validated" % name,
                             line=line, reason="unknown-order")
        if len(zvars) != order.n:
            raise CheckError("order %s needs %d variables, got %d"
                             % (name, order.n, len(zvars)),
                             line=line, reason="arity-mismatch")
        if self._derived_ids():
            raise CheckError("cannot change order with a non-empty derived set",
                             line=line, reason="derived-not-empty")
        self.loaded = order
        self.z_binding = list(zvars)

    def step_delete(self, step):
        line = step["line"]
        for cid in range(step["start"], step["stop"]):
            if cid in self.core_ids:
                raise CheckError("cannot delete core constraint %d" % cid,
                                 line=line, reason="core-delete")
            if cid in self.root.cons:
                self.root.deleted.add(cid)
            # IDs that were never assigned at top level (or are already
            # invisible) are skipped: visibility is a set.

    def conclude(self):
        for cid, con in self.root.cons.items():
            if cid in self.root.deleted or isinstance(con, _Thunk):
                continue
            if con.is_contradiction():
                return UNSAT
        return VERIFIED

    # ----------------------------------------------------------------- main

    def run(self, doc):
        for step in doc["steps"]:
            kind = step["kind"]
            if kind == "pol":
                self.step_pol(step)
            elif kind == "rup":
                self.step_rup(step)
            elif kind == "red":
                self.step_red(step)
            elif kind == "dom":
                self.step_dom(step)
            elif kind == "def_order":
                self.step_def_order(step)
            elif kind == "load_order":
                self.step_load_order(step)
            elif kind == "del_range":
                self.step_delete(step)
            elif kind == "output":
                pass
            elif kind == "conclusion":
                claim = " ".join(step["value"]).upper()
                if claim == "UNSAT" and self.conclude() != UNSAT:
                    raise CheckError("conclusion UNSAT but no contradiction "
                                     "was derived", line=step["line"],
                                     reason="bad-conclusion")
            else:
                raise CheckError("unsupported step kind %r" % kind,
                                 line=step.get("line"), reason="invalid-step")
        return self.conclude()


def check_document(formula, doc, proof_bytes=0, trace=None):
    """Convenience wrapper: returns (verdict, counters)."""
    chk = Checker(formula)
    chk.trace = trace
    verdict = chk.run(doc)
    chk.counters["proof_bytes"] = proof_bytes
    return verdict, chk.counters
