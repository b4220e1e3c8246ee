"""Refutation search, checkable proofs, and evidence detection.

`refute` develops a branch depth-first, always applying the first
applicable instance (rule priority, then member insertion order), so runs
are deterministic.  In the restricted calculus a single saturation either
closes every branch — yielding a Refuted verdict with a proof tree — or
reaches a branch with no applicable instance, which by construction
satisfies the model-existence conditions and yields a Satisfiable verdict
with an extracted, certified model.  The unrestricted calculus iterates
over a schedule of instantiation fuels; an open branch there proves
satisfiability only when no functional equations remain (their instance
condition ranges over infinitely many terms), otherwise the search answers
Unknown.

A Proof is a tree of rule instances, one child per alternative; leaves are
instances with no alternatives, witnessing closure.  `check_proof` replays
a proof against the initial branch using only `rules.check_instance`, so
its soundness rests on the instance checker alone.

`is_evident` reports the model-existence conditions member by member; on a
branch in the restricted language it is exact, and agrees with "no
applicable instance" on non-closed branches.  In the unrestricted language
the conditions on functional equations are checked up to a fuel bound and
the report says so (`bounded`).
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field

from .branch import Branch, FormulaKind, branch_of
from .fragments import FragmentViolation, quasi_efo_violation
from .kernel import Name, Term, eq, neg, show_term
from .normalize import apply_norm, normalize
from .rules import (
    EAGER_RULES,
    EFO_RULES,
    STT_RULES,
    RuleInstance,
    applicable_efo,
    applicable_stt,
    check_instance,
    closing_instance,
    has_instance,
    has_witness_diseq,
    has_witness_neg_inst,
    instantiation_candidates,
)
from .semantics import (
    DEFAULT_MAX_TABLE,
    CardinalityError,
    Model,
    extract_model,
)

__all__ = [
    "BudgetExceeded",
    "EvidenceReport",
    "Proof",
    "Refuted",
    "Satisfiable",
    "SearchConfig",
    "Unknown",
    "Violation",
    "check_proof",
    "is_evident",
    "refute",
    "route_calculus",
    "saturate_efo",
]


# ---------------------------------------------------------------------------
# Proofs and verdicts


@dataclass(frozen=True)
class Proof:
    """A closed tableau: a rule instance and one subproof per alternative."""

    instance: RuleInstance
    children: tuple["Proof", ...]

    def __post_init__(self):
        if len(self.children) != len(self.instance.alternatives):
            raise ValueError("proof arity does not match the instance")

    def nodes(self):
        """All proof nodes, depth-first, this node first."""
        stack = [self]
        while stack:
            p = stack.pop()
            yield p
            stack.extend(reversed(p.children))

    def size(self) -> int:
        return sum(1 for _ in self.nodes())

    def rule_counts(self) -> dict[str, int]:
        return dict(Counter(p.instance.rule.value for p in self.nodes()))


@dataclass(frozen=True)
class Refuted:
    """The assumptions are unsatisfiable; proof closes every branch."""

    proof: Proof
    calculus: str


@dataclass(frozen=True)
class Satisfiable:
    """A saturated branch was reached and a model extracted from it."""

    model: Model
    branch: Branch


@dataclass(frozen=True)
class Unknown:
    """Search gave up: budget exhausted, or saturation was inconclusive."""

    reason: str


Verdict = Refuted | Satisfiable | Unknown


class BudgetExceeded(Exception):
    pass


@dataclass(frozen=True)
class SearchConfig:
    """Search parameters; defaults suit interactive use.

    calculus: "stt", "efo", or "auto" (route by the input's language).
    fuel_schedule: strictly increasing instantiation-size bounds tried in
    turn by the unrestricted calculus.  max_nodes counts rule applications
    across the whole run; timeout is wall-clock seconds; either may be None
    for no limit.  eager_close also closes on complementary non-atoms and
    reflexive disequations, recorded with dedicated leaf rules.  reserved
    names are never chosen for introduced variables.  max_table bounds
    function-space enumeration during model extraction.
    """

    calculus: str = "auto"
    fuel_schedule: tuple[int, ...] = (1, 2, 3, 4)
    max_nodes: int | None = 100_000
    timeout: float | None = 10.0
    eager_close: bool = False
    reserved: tuple[Name, ...] = ()
    max_table: int = DEFAULT_MAX_TABLE

    def __post_init__(self):
        if self.calculus not in ("auto", "stt", "efo"):
            raise ValueError(f"unknown calculus {self.calculus!r}")
        sched = tuple(self.fuel_schedule)
        if not sched or any(f < 1 for f in sched) or list(sched) != sorted(set(sched)):
            raise ValueError("fuel_schedule must be strictly increasing, >= 1")
        object.__setattr__(self, "fuel_schedule", sched)


def _as_branch(obj) -> Branch:
    if isinstance(obj, Branch):
        return obj
    return branch_of(*(normalize(s) for s in obj))


def route_calculus(branch: Branch) -> str:
    """Pick the calculus for a branch by its language.

    Branches of restricted formulas (and disequations between restricted
    terms) go to the restricted calculus; branches in the pure negation and
    equality language go to the unrestricted one.  A branch mixing the two
    extensions fits neither and raises FragmentViolation.
    """
    if all(quasi_efo_violation(s) is None for s in branch.formulas):
        return "efo"
    offender = None
    for s in branch.formulas:
        if branch.info(s).kind in (
            FormulaKind.IMP,
            FormulaKind.NEG_IMP,
            FormulaKind.FORALL,
            FormulaKind.NEG_FORALL,
        ):
            offender = s
            break
    if offender is None:
        return "stt"
    raise FragmentViolation(
        f"mixed input: {show_term(offender)} needs the restricted calculus, "
        "but other members use equality outside its fragment"
    )


# ---------------------------------------------------------------------------
# Depth-first saturation


@dataclass
class _Frame:
    instance: RuleInstance
    branch: Branch
    children: list = field(default_factory=list)


def _saturate(branch, applicable, eager, deadline, counter, max_nodes):
    """Develop a branch depth-first.

    Returns ("closed", Proof) when every branch closes, or ("open", Branch)
    for the leftmost branch with no applicable instance.  Raises
    BudgetExceeded when limits run out.
    """
    stack: list[_Frame] = []
    cur = branch
    while True:
        leaf = closing_instance(cur, eager)
        if leaf is None:
            instances = applicable(cur)
            if not instances:
                return "open", cur
            r = instances[0]
            counter[0] += 1
            if max_nodes is not None and counter[0] > max_nodes:
                raise BudgetExceeded(f"node budget exhausted ({max_nodes})")
            if deadline is not None and time.monotonic() > deadline:
                raise BudgetExceeded("timeout")
            stack.append(_Frame(r, cur))
            cur = cur.add_all(r.alternatives[0])
            continue
        proof = Proof(leaf, ())
        while stack:
            frame = stack[-1]
            frame.children.append(proof)
            if len(frame.children) < len(frame.instance.alternatives):
                cur = frame.branch.add_all(
                    frame.instance.alternatives[len(frame.children)]
                )
                break
            proof = Proof(frame.instance, tuple(frame.children))
            stack.pop()
        else:
            return "closed", proof


def saturate_efo(branch_or_formulas, cfg: SearchConfig | None = None):
    """Saturate under the restricted calculus.

    Returns ("closed", Proof) or ("open", Branch); the open branch is
    evident.  Raises BudgetExceeded or FragmentViolation.
    """
    cfg = cfg or SearchConfig(calculus="efo")
    branch = _as_branch(branch_or_formulas)
    deadline = None if cfg.timeout is None else time.monotonic() + cfg.timeout
    return _saturate(
        branch,
        lambda b: applicable_efo(b, cfg.reserved),
        cfg.eager_close,
        deadline,
        [0],
        cfg.max_nodes,
    )


def refute(branch_or_formulas, cfg: SearchConfig | None = None) -> Verdict:
    """Decide or attempt to decide a set of assumptions.

    Returns Refuted (with a checkable proof), Satisfiable (with a certified
    model and the saturated branch), or Unknown.  Raises FragmentViolation
    when the input fits no calculus (or not the requested one).
    """
    cfg = cfg or SearchConfig()
    branch = _as_branch(branch_or_formulas)
    calculus = cfg.calculus
    if calculus == "auto":
        calculus = route_calculus(branch)
    deadline = None if cfg.timeout is None else time.monotonic() + cfg.timeout
    counter = [0]

    try:
        if calculus == "efo":
            status, payload = _saturate(
                branch,
                lambda b: applicable_efo(b, cfg.reserved),
                cfg.eager_close,
                deadline,
                counter,
                cfg.max_nodes,
            )
            if status == "closed":
                return Refuted(payload, "efo")
            return _satisfiable(payload, cfg)

        for fuel in cfg.fuel_schedule:
            status, payload = _saturate(
                branch,
                lambda b, f=fuel: applicable_stt(b, f, cfg.reserved),
                cfg.eager_close,
                deadline,
                counter,
                cfg.max_nodes,
            )
            if status == "closed":
                return Refuted(payload, "stt")
            if not payload.members(FormulaKind.FUN_EQ):
                return _satisfiable(payload, cfg)
        return Unknown(
            "saturation left functional equations open at every fuel in "
            f"{cfg.fuel_schedule}; cannot certify satisfiability"
        )
    except BudgetExceeded as e:
        return Unknown(str(e))


def _satisfiable(branch: Branch, cfg: SearchConfig) -> Verdict:
    try:
        model = extract_model(branch, max_table=cfg.max_table)
    except CardinalityError as e:
        return Unknown(f"saturated, but model extraction overflowed: {e}")
    return Satisfiable(model, branch)


# ---------------------------------------------------------------------------
# Proof checking


def check_proof(
    branch_or_formulas, proof: Proof, calculus: str = "auto", eager: bool = False
) -> bool:
    """Replay a proof against the assumptions it claims to refute.

    Every node's instance must pass check_instance on the reconstructed
    branch, use only the calculus's rules (plus the eager leaf rules when
    eager is set), and have one child per alternative.
    """
    try:
        branch = _as_branch(branch_or_formulas)
    except (TypeError, ValueError):
        return False
    if calculus == "auto":
        try:
            calculus = route_calculus(branch)
        except FragmentViolation:
            return False
    allowed = STT_RULES if calculus == "stt" else EFO_RULES
    if eager:
        allowed = allowed | EAGER_RULES

    stack = [(branch, proof)]
    while stack:
        b, node = stack.pop()
        r = node.instance
        if r.rule not in allowed:
            return False
        if len(node.children) != len(r.alternatives):
            return False
        if not check_instance(b, r, eager):
            return False
        for alt, child in zip(r.alternatives, node.children):
            stack.append((b.add_all(alt), child))
    return True


# ---------------------------------------------------------------------------
# Evidence


@dataclass(frozen=True)
class Violation:
    """One unmet model-existence condition."""

    condition: str
    members: tuple[Term, ...]
    detail: str


@dataclass(frozen=True)
class EvidenceReport:
    """Outcome of the member-by-member model-existence check.

    bounded is True when conditions ranging over all terms (instances of
    functional equations) were only checked up to the fuel bound, so
    `evident` is then an "up to this bound" statement.
    """

    evident: bool
    scope: str
    bounded: bool
    fuel: int | None
    violations: tuple[Violation, ...]

    def describe(self) -> str:
        head = "evident" if self.evident else "not evident"
        qual = " (bounded check)" if self.bounded else ""
        lines = [f"{head} [{self.scope}]{qual}"]
        for v in self.violations:
            on = ", ".join(show_term(m) for m in v.members)
            lines.append(f"  {v.condition}: {v.detail} (on {on})")
        return "\n".join(lines)


def _check_forall(branch, s, info, out) -> None:
    discs = branch.discriminating_terms(info.sort)
    for u in discs:
        if apply_norm(info.pred, u) not in branch:
            out.append(
                Violation(
                    "forall-inst",
                    (s,),
                    f"discriminating term {show_term(u)} is not instantiated",
                )
            )
            break
    if not has_instance(branch, info.sort, info.pred):
        out.append(
            Violation("forall-inst-default", (s,), "no instance on the branch")
        )


def _check_mate_pairs(branch, out) -> None:
    for head in branch.atom_heads():
        for p in branch.pos_atoms(head):
            pi = branch.info(p)
            for q in branch.neg_atoms(head):
                qi = branch.info(q)
                if not any(
                    diseq_st in branch
                    for diseq_st in (
                        neg(eq(a, b)) for a, b in zip(pi.args, qi.args)
                    )
                ):
                    out.append(
                        Violation(
                            "mate",
                            (p, q),
                            "no argument disequation separates the pair",
                        )
                    )


def _check_confront_pairs(branch, out) -> None:
    for sort_ty in branch.eq_sorts():
        for e in branch.equations(sort_ty):
            ei = branch.info(e)
            for d in branch.disequations(sort_ty):
                di = branch.info(d)
                left = (neg(eq(ei.lhs, di.lhs)), neg(eq(ei.rhs, di.lhs)))
                right = (neg(eq(ei.lhs, di.rhs)), neg(eq(ei.rhs, di.rhs)))
                if not (
                    all(f in branch for f in left)
                    or all(f in branch for f in right)
                ):
                    out.append(
                        Violation(
                            "confront",
                            (e, d),
                            "equation is not confronted with the disequation",
                        )
                    )


def is_evident(
    branch_or_formulas, scope: str = "auto", fuel: int = 3
) -> EvidenceReport:
    """Check the model-existence conditions member by member.

    scope "efo" checks the restricted-calculus conditions (exact); "stt"
    checks the unrestricted ones, where instance conditions on functional
    equations are bounded by fuel; "auto" picks by language.  On non-closed
    branches in the restricted language, evident coincides with
    `applicable_efo` returning nothing.
    """
    branch = _as_branch(branch_or_formulas)
    if scope == "auto":
        scope = (
            "efo"
            if all(quasi_efo_violation(s) is None for s in branch.formulas)
            else "stt"
        )
    if scope == "efo":
        for s in branch.formulas:
            w = quasi_efo_violation(s)
            if w is not None:
                raise FragmentViolation(
                    f"{show_term(s)} is outside the restricted fragment"
                )
    out: list[Violation] = []
    bounded = False

    for s in branch.formulas:
        info = branch.info(s)
        kind = info.kind
        if kind is FormulaKind.DOUBLE_NEG:
            if info.lhs not in branch:
                out.append(Violation("double-neg", (s,), "body is missing"))
        elif kind is FormulaKind.BOOL_EQ:
            if not (
                (info.lhs in branch and info.rhs in branch)
                or (neg(info.lhs) in branch and neg(info.rhs) in branch)
            ):
                out.append(
                    Violation("bool-eq", (s,), "sides are not jointly settled")
                )
        elif kind is FormulaKind.BOOL_DISEQ:
            if not (
                (info.lhs in branch and neg(info.rhs) in branch)
                or (neg(info.lhs) in branch and info.rhs in branch)
            ):
                out.append(
                    Violation("bool-ext", (s,), "sides are not settled opposite")
                )
        elif kind is FormulaKind.FUN_EQ:
            bounded = True
            for u in instantiation_candidates(branch, info.ty.dom, fuel):
                concl = eq(apply_norm(info.lhs, u), apply_norm(info.rhs, u))
                if concl not in branch:
                    out.append(
                        Violation(
                            "fun-eq",
                            (s,),
                            f"instance {show_term(u)} is missing",
                        )
                    )
                    break
        elif kind is FormulaKind.FUN_DISEQ:
            if not has_witness_diseq(branch, info.lhs, info.rhs):
                out.append(
                    Violation("fun-ext", (s,), "no variable witnesses the sides apart")
                )
        elif kind is FormulaKind.IMP:
            if scope == "stt":
                raise FragmentViolation(f"{show_term(s)} is outside this calculus")
            if neg(info.lhs) not in branch and info.rhs not in branch:
                out.append(Violation("imp", (s,), "neither side is settled"))
        elif kind is FormulaKind.NEG_IMP:
            if scope == "stt":
                raise FragmentViolation(f"{show_term(s)} is outside this calculus")
            if info.lhs not in branch or neg(info.rhs) not in branch:
                out.append(Violation("imp-neg", (s,), "components are missing"))
        elif kind is FormulaKind.FORALL:
            if scope == "stt":
                raise FragmentViolation(f"{show_term(s)} is outside this calculus")
            _check_forall(branch, s, info, out)
        elif kind is FormulaKind.NEG_FORALL:
            if scope == "stt":
                raise FragmentViolation(f"{show_term(s)} is outside this calculus")
            if not has_witness_neg_inst(branch, info.sort, info.pred):
                out.append(
                    Violation("forall-neg", (s,), "no variable witnesses the negation")
                )
        elif kind is FormulaKind.SORT_DISEQ:
            if info.decomposable and not any(
                neg(eq(a, b)) in branch for a, b in zip(info.largs, info.rargs)
            ):
                out.append(
                    Violation(
                        "decompose",
                        (s,),
                        "no argument disequation supports the disequation",
                    )
                )
        elif kind is FormulaKind.OTHER:
            raise FragmentViolation(f"no conditions cover {show_term(s)}")

    _check_mate_pairs(branch, out)
    _check_confront_pairs(branch, out)

    return EvidenceReport(
        evident=not out,
        scope=scope,
        bounded=bounded,
        fuel=fuel if bounded else None,
        violations=tuple(out),
    )
