"""Tableau rule instances: applicability, admissibility, and checking.

A rule instance names the rule, the branch members it consumes, an optional
instantiation term (the chosen instance of a functional equation or a
quantifier, or the variable a witness rule introduces), and the alternatives:
a tuple of formula tuples, one per successor branch.  An instance with no
alternatives is a leaf — it witnesses that the branch is closed.

`applicable_stt` and `applicable_efo` list the instances the corresponding
calculus admits on a branch, in a deterministic order (rule priority first,
then member insertion order).  Both skip instances that cannot make
progress: an instance is withheld whenever one of its alternatives is
already contained in the branch, since developing that alternative would
change nothing.  Together with the admissibility restrictions below this
makes "no instance applicable" coincide with the closure conditions that
guarantee a model exists (see `search.is_evident`).

The restricted calculus enforces, per branch A:

  * witness rules (functional disequations, negated quantifiers) only fire
    when no variable already witnesses them in A, and introduce a variable
    not free in A;
  * a quantifier at a sort with discriminating terms is instantiated only
    with those terms;
  * with no discriminating terms, a quantifier that already has some
    instance in A gets no further ones, and otherwise receives a single
    variable: the first free variable of the sort, or a fresh one if none
    is free.

`check_instance` validates a claimed instance against a branch by
recomputing what the rule would produce and comparing, enforcing the same
admissibility restrictions; it is the trusted core behind proof checking.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

from .branch import Branch, FormulaKind, classify
from .fragments import FragmentViolation, efo_violation, quasi_efo_violation
from .kernel import (
    NOT,
    App,
    Bound,
    Fun,
    Lam,
    Name,
    Ref,
    Term,
    Type,
    as_diseq,
    diseq,
    eq,
    eq_const,
    fresh_var,
    is_sort,
    is_var_ref,
    neg,
    o,
    ref,
    show_term,
)
from .normalize import apply_norm, is_normal


class RuleId(Enum):
    DOUBLE_NEG = "double-neg"
    BOOL_EQ = "bool-eq"
    BOOL_EXT = "bool-ext"
    FUN_EQ = "fun-eq"
    FUN_EXT = "fun-ext"
    MATE = "mate"
    DECOMPOSE = "decompose"
    CONFRONT = "confront"
    IMP = "imp"
    IMP_NEG = "imp-neg"
    FORALL_INST = "forall-inst"
    FORALL_NEG = "forall-neg"
    CLOSE_COMPL = "close-compl"
    CLOSE_REFL = "close-refl"


#: Rules of the unrestricted calculus (negation and equality language).
STT_RULES = frozenset(
    {
        RuleId.DOUBLE_NEG,
        RuleId.BOOL_EQ,
        RuleId.BOOL_EXT,
        RuleId.FUN_EQ,
        RuleId.FUN_EXT,
        RuleId.MATE,
        RuleId.DECOMPOSE,
        RuleId.CONFRONT,
    }
)

#: Rules of the restricted calculus (implication and quantifier language).
EFO_RULES = frozenset(
    {
        RuleId.DOUBLE_NEG,
        RuleId.BOOL_EXT,
        RuleId.IMP,
        RuleId.IMP_NEG,
        RuleId.MATE,
        RuleId.DECOMPOSE,
        RuleId.CONFRONT,
        RuleId.FUN_EXT,
        RuleId.FORALL_INST,
        RuleId.FORALL_NEG,
    }
)

#: Leaf rules available only in eager-closing mode (plus n = 0 mate and
#: decompose instances, which both calculi already provide).
EAGER_RULES = frozenset({RuleId.CLOSE_COMPL, RuleId.CLOSE_REFL})


@dataclass(frozen=True)
class RuleInstance:
    """One admissible rule application.

    premises are branch members, in the rule's fixed order; alternatives
    hold the formulas each successor branch adds (empty tuple of
    alternatives = closing leaf); inst is the instantiation term, or the
    introduced variable for witness rules.
    """

    rule: RuleId
    premises: tuple[Term, ...]
    alternatives: tuple[tuple[Term, ...], ...]
    inst: Term | None = None

    def __repr__(self) -> str:
        parts = [self.rule.value]
        parts.append("premises=" + ", ".join(show_term(p) for p in self.premises))
        if self.inst is not None:
            parts.append("inst=" + show_term(self.inst))
        alts = " | ".join(
            "{" + ", ".join(show_term(f) for f in alt) + "}"
            for alt in self.alternatives
        )
        parts.append("alts=" + (alts or "(closed)"))
        return "RuleInstance(" + "; ".join(parts) + ")"


# Lower group number = applied first.  Within a group, instances follow the
# insertion order of their (last) premise.
_PRIORITY = {
    RuleId.DOUBLE_NEG: 0,
    RuleId.IMP_NEG: 1,
    RuleId.FUN_EXT: 2,
    RuleId.FORALL_NEG: 3,
    RuleId.FUN_EQ: 4,
    RuleId.FORALL_INST: 4,
    RuleId.BOOL_EQ: 5,
    RuleId.BOOL_EXT: 6,
    RuleId.IMP: 7,
    RuleId.MATE: 8,
    RuleId.DECOMPOSE: 9,
    RuleId.CONFRONT: 10,
}


# ---------------------------------------------------------------------------
# Instance detection by template matching.
#
# Several admissibility conditions ask whether the branch already contains
# an instance of a schematic formula: "is there a term u with [s u] in A?",
# "is there a variable x with [s x] != [t x] in A?".  We answer by building
# the schema once, with a reserved hole variable in the instance position,
# and matching branch members against it.  Substituting a variable for the
# hole never creates a new redex, and substituting a sort-typed term never
# does either (sort-typed terms cannot be applied), so in every case the
# calculus needs, syntactic matching against the normalized schema decides
# the question exactly.

_HOLE_IDENT = "•"  # not producible by the grammar or fresh_var


def _hole(ty: Type) -> Name:
    return Name(_HOLE_IDENT, ty)


def _locally_closed(t: Term, depth: int = 0) -> bool:
    if type(t) is Bound:
        return t.index < depth
    if type(t) is App:
        return _locally_closed(t.fun, depth) and _locally_closed(t.arg, depth)
    if type(t) is Lam:
        return _locally_closed(t.body, depth + 1)
    return True


def match_schema(
    schema: Term, w: Term, hole: Name
) -> tuple[bool, Term | None]:
    """Match w against schema, solving for the hole.

    Returns (True, u) when schema[hole := u] == w for the unique filler u;
    (True, None) when schema == w and the hole does not occur (any filler
    works); (False, None) otherwise.  Fillers must be closed with respect
    to w's binders — a would-be filler mentioning a bound variable of w is
    not a term in the branch's scope, so such positions reject.
    """
    found: list[Term] = []

    def go(a: Term, b: Term) -> bool:
        if type(a) is Ref and a.name == hole:
            if b.ty != hole.ty or not _locally_closed(b):
                return False
            if found:
                return found[0] == b
            found.append(b)
            return True
        if type(a) is not type(b):
            return False
        if type(a) is Ref:
            return a.name == b.name
        if type(a) is Bound:
            return a.index == b.index
        if type(a) is App:
            return go(a.fun, b.fun) and go(a.arg, b.arg)
        if type(a) is Lam:
            return a.dom == b.dom and go(a.body, b.body)
        raise AssertionError(f"unknown term node {a!r}")

    if go(schema, w):
        return True, (found[0] if found else None)
    return False, None


def _first_match(
    branch: Branch, schema: Term, hole: Name, var_only: bool
) -> tuple[bool, Term | None]:
    """First branch member matching the schema, with its filler.

    With var_only, only matches whose filler is a variable (or absent,
    meaning every term works) count.
    """
    for w in branch.formulas:
        if w.ty != schema.ty:
            continue
        ok, filler = match_schema(schema, w, hole)
        if ok and (not var_only or filler is None or is_var_ref(filler)):
            return True, filler
    return False, None


def has_witness_diseq(branch: Branch, l: Term, r: Term) -> bool:
    """Is there a variable x with [l x] != [r x] on the branch?"""
    h = _hole(l.ty.dom)
    schema = diseq(apply_norm(l, ref(h)), apply_norm(r, ref(h)))
    return _first_match(branch, schema, h, var_only=True)[0]


def has_witness_neg_inst(branch: Branch, sort: Type, pred: Term) -> bool:
    """Is there a variable x with not [pred x] on the branch?"""
    h = _hole(sort)
    schema = neg(apply_norm(pred, ref(h)))
    return _first_match(branch, schema, h, var_only=True)[0]


def has_instance(branch: Branch, sort: Type, pred: Term) -> bool:
    """Is there any normal term u with [pred u] on the branch?"""
    h = _hole(sort)
    schema = apply_norm(pred, ref(h))
    return _first_match(branch, schema, h, var_only=False)[0]


# ---------------------------------------------------------------------------
# Bounded enumeration of normal terms over a branch signature.
#
# Instances of functional equations range over all normal terms, so the
# unrestricted calculus needs a fair enumeration.  Terms are generated
# small-to-large, where the size of a term counts its leaves plus its
# abstractions.  Heads are branch variables (partial application allowed),
# bound variables, and the logical constants at full arity.  For each
# instance type the branch's discriminating terms at that type come first.


def _compositions(total: int, k: int):
    """Ordered k-tuples of positive ints summing to total, lexicographic."""
    if k == 0:
        if total == 0:
            yield ()
        return
    if k == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - k + 2):
        for rest in _compositions(total - first, k - 1):
            yield (first,) + rest


def _arg_chains(head_ty: Type, target: Type):
    """Argument-type tuples that take a head of head_ty to target."""
    args: list[Type] = []
    ty = head_ty
    while True:
        if ty == target:
            yield tuple(args)
        if type(ty) is Fun:
            args.append(ty.dom)
            ty = ty.cod
        else:
            return


class TermEnumerator:
    """Deterministic size-ordered enumeration of normal terms.

    The signature is a tuple of variables plus the operand types at which
    equality may be used; negation is always available.  Logical constants
    are only generated fully applied.
    """

    def __init__(self, variables: tuple[Name, ...], eq_types: tuple[Type, ...]):
        self.variables = variables
        self.eq_types = eq_types
        self._memo: dict[tuple, tuple[Term, ...]] = {}

    def terms(self, ty: Type, max_size: int):
        for size in range(1, max_size + 1):
            yield from self._pool(ty, size, ())

    def _pool(self, ty: Type, size: int, ctx: tuple[Type, ...]) -> tuple[Term, ...]:
        key = (ty, size, ctx)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        out: list[Term] = []
        # Heads: innermost bound variables first, then signature variables.
        heads: list[Term] = [
            Bound(i, ctx[len(ctx) - 1 - i]) for i in range(len(ctx))
        ]
        heads.extend(ref(n) for n in self.variables)
        for head in heads:
            for chain in _arg_chains(head.ty, ty):
                self._spines(head, chain, size, ctx, out)
        if ty == o:
            self._spines(ref(NOT), (o,), size, ctx, out)
            for ety in self.eq_types:
                self._spines(ref(eq_const(ety)), (ety, ety), size, ctx, out)
        if type(ty) is Fun:
            for body in self._pool(ty.cod, size - 1, ctx + (ty.dom,)):
                out.append(Lam(ty.dom, body))
        result = tuple(out)
        self._memo[key] = result
        return result

    def _spines(self, head, chain, size, ctx, out) -> None:
        budget = size - 1
        k = len(chain)
        if k == 0:
            if budget == 0:
                out.append(head)
            return
        if budget < k:
            return
        for split in _compositions(budget, k):
            for args in itertools.product(
                *(self._pool(aty, asize, ctx) for aty, asize in zip(chain, split))
            ):
                t = head
                for a in args:
                    t = App(t, a)
                out.append(t)


def _diseq_sides(branch: Branch, ty: Type) -> tuple[Term, ...]:
    """Sides of the branch's disequations at an arbitrary type, in order."""
    if is_sort(ty):
        return branch.discriminating_terms(ty)
    kind = FormulaKind.BOOL_DISEQ if ty == o else FormulaKind.FUN_DISEQ
    seen: dict[Term, None] = {}
    for d in branch.members(kind):
        info = branch.info(d)
        if info.ty == ty:
            seen.setdefault(info.lhs)
            seen.setdefault(info.rhs)
    return tuple(seen)


def branch_signature(branch: Branch) -> tuple[tuple[Name, ...], tuple[Type, ...]]:
    """Free variables (first occurrence order) and equality operand types."""
    eq_tys: dict[Type, None] = {}
    for kind in (
        FormulaKind.BOOL_EQ,
        FormulaKind.BOOL_DISEQ,
        FormulaKind.FUN_EQ,
        FormulaKind.FUN_DISEQ,
        FormulaKind.SORT_EQ,
        FormulaKind.SORT_DISEQ,
    ):
        for s in branch.members(kind):
            eq_tys.setdefault(branch.info(s).ty)
    return branch.free_names, tuple(eq_tys)


def instantiation_candidates(branch: Branch, ty: Type, fuel: int):
    """Candidate instances at a type: discriminating sides, then enumerated
    normal terms of size up to fuel, deduplicated, deterministic."""
    seen: set[Term] = set()
    for u in _diseq_sides(branch, ty):
        if u not in seen:
            seen.add(u)
            yield u
    variables, eq_tys = branch_signature(branch)
    for u in TermEnumerator(variables, eq_tys).terms(ty, fuel):
        if u not in seen:
            seen.add(u)
            yield u


# ---------------------------------------------------------------------------
# Alternative construction (shared by applicability and checking)


def _alts_double_neg(info) -> tuple:
    return ((info.lhs,),)


def _alts_bool_eq(info) -> tuple:
    return ((info.lhs, info.rhs), (neg(info.lhs), neg(info.rhs)))


def _alts_bool_ext(info) -> tuple:
    return ((info.lhs, neg(info.rhs)), (neg(info.lhs), info.rhs))


def _alts_fun_eq(info, u: Term) -> tuple:
    return ((eq(apply_norm(info.lhs, u), apply_norm(info.rhs, u)),),)


def _alts_fun_ext(info, x: Term) -> tuple:
    return ((diseq(apply_norm(info.lhs, x), apply_norm(info.rhs, x)),),)


def _alts_mate(pos_info, neg_info) -> tuple:
    if len(pos_info.args) != len(neg_info.args):
        raise AssertionError("same-head atoms must share arity")
    return tuple(
        (diseq(s, t),) for s, t in zip(pos_info.args, neg_info.args)
    )


def _alts_decompose(info) -> tuple:
    return tuple((diseq(s, t),) for s, t in zip(info.largs, info.rargs))


def _alts_confront(eq_info, dq_info) -> tuple:
    s, t = eq_info.lhs, eq_info.rhs
    u, v = dq_info.lhs, dq_info.rhs
    return ((diseq(s, u), diseq(t, u)), (diseq(s, v), diseq(t, v)))


def _alts_imp(info) -> tuple:
    return ((neg(info.lhs),), (info.rhs,))


def _alts_imp_neg(info) -> tuple:
    return ((info.lhs, neg(info.rhs)),)


def _alts_forall_inst(info, u: Term) -> tuple:
    return ((apply_norm(info.pred, u),),)


def _alts_forall_neg(info, x: Term) -> tuple:
    return ((neg(apply_norm(info.pred, x)),),)


def make_instance(
    rule: RuleId, premises: tuple[Term, ...], inst: Term | None = None
) -> RuleInstance:
    """Reconstruct a rule instance from the data that determines it.

    Alternatives are a function of the rule, its premises, and the
    instantiation term, so external representations (proof files) need not
    carry conclusions.  Raises ValueError when the premises do not have the
    shape the rule consumes.  Branch-dependent admissibility is not
    examined here; check_instance enforces it during replay.
    """
    premises = tuple(premises)

    def need(cond: bool) -> None:
        if not cond:
            shown = ", ".join(show_term(p) for p in premises)
            raise ValueError(f"{rule.value}: premises have the wrong shape: {shown}")

    if rule in (RuleId.CLOSE_COMPL, RuleId.CLOSE_REFL):
        need(inst is None)
        return RuleInstance(rule, premises, ())
    infos = tuple(classify(p) for p in premises)
    if rule is RuleId.MATE:
        need(
            len(premises) == 2
            and inst is None
            and infos[0].kind is FormulaKind.POS_ATOM
            and infos[1].kind is FormulaKind.NEG_ATOM
            and infos[0].head == infos[1].head
        )
        return RuleInstance(rule, premises, _alts_mate(infos[0], infos[1]))
    if rule is RuleId.CONFRONT:
        need(
            len(premises) == 2
            and inst is None
            and infos[0].kind is FormulaKind.SORT_EQ
            and infos[1].kind is FormulaKind.SORT_DISEQ
            and infos[0].ty == infos[1].ty
        )
        return RuleInstance(rule, premises, _alts_confront(infos[0], infos[1]))

    need(len(premises) == 1)
    info = infos[0]
    plain = {
        RuleId.DOUBLE_NEG: (FormulaKind.DOUBLE_NEG, _alts_double_neg),
        RuleId.BOOL_EQ: (FormulaKind.BOOL_EQ, _alts_bool_eq),
        RuleId.BOOL_EXT: (FormulaKind.BOOL_DISEQ, _alts_bool_ext),
        RuleId.IMP: (FormulaKind.IMP, _alts_imp),
        RuleId.IMP_NEG: (FormulaKind.NEG_IMP, _alts_imp_neg),
    }
    if rule in plain:
        kind, alts = plain[rule]
        need(info.kind is kind and inst is None)
        return RuleInstance(rule, premises, alts(info))
    with_inst = {
        RuleId.FUN_EQ: (FormulaKind.FUN_EQ, _alts_fun_eq),
        RuleId.FUN_EXT: (FormulaKind.FUN_DISEQ, _alts_fun_ext),
        RuleId.FORALL_INST: (FormulaKind.FORALL, _alts_forall_inst),
        RuleId.FORALL_NEG: (FormulaKind.NEG_FORALL, _alts_forall_neg),
    }
    if rule in with_inst:
        kind, alts = with_inst[rule]
        need(info.kind is kind and inst is not None)
        return RuleInstance(rule, premises, alts(info, inst), inst)
    if rule is RuleId.DECOMPOSE:
        need(info.kind is FormulaKind.SORT_DISEQ and info.decomposable and inst is None)
        return RuleInstance(rule, premises, _alts_decompose(info))
    raise ValueError(f"unknown rule {rule!r}")


# ---------------------------------------------------------------------------
# Applicability


def _productive(branch: Branch, alternatives: tuple) -> bool:
    """An instance helps only if every alternative adds something new."""
    return all(any(f not in branch for f in alt) for alt in alternatives)


def _emit(out, branch, rule, premises, alternatives, inst=None) -> None:
    if _productive(branch, alternatives):
        out.append(RuleInstance(rule, premises, alternatives, inst))


def _mate_partners(branch, pos_index, s, info, out) -> None:
    """Mate instances whose later premise is s (insertion order pairing)."""
    if info.kind is FormulaKind.POS_ATOM:
        partners = branch.neg_atoms(info.head)
        for other in partners:
            if pos_index[other] < pos_index[s]:
                _emit(
                    out,
                    branch,
                    RuleId.MATE,
                    (s, other),
                    _alts_mate(info, branch.info(other)),
                )
    else:
        partners = branch.pos_atoms(info.head)
        for other in partners:
            if pos_index[other] < pos_index[s]:
                _emit(
                    out,
                    branch,
                    RuleId.MATE,
                    (other, s),
                    _alts_mate(branch.info(other), info),
                )


def _confront_partners(branch, pos_index, s, info, out) -> None:
    """Confrontation instances whose later premise is s."""
    if info.kind is FormulaKind.SORT_EQ:
        for other in branch.disequations(info.ty):
            if pos_index[other] < pos_index[s]:
                _emit(
                    out,
                    branch,
                    RuleId.CONFRONT,
                    (s, other),
                    _alts_confront(info, branch.info(other)),
                )
    else:
        for other in branch.equations(info.ty):
            if pos_index[other] < pos_index[s]:
                _emit(
                    out,
                    branch,
                    RuleId.CONFRONT,
                    (other, s),
                    _alts_confront(branch.info(other), info),
                )


def _fresh_witness(branch: Branch, ty: Type, reserved: tuple[Name, ...]) -> Term:
    return ref(fresh_var(ty, branch.free_names + tuple(reserved)))


def _sorted_instances(out: list[RuleInstance]) -> list[RuleInstance]:
    return sorted(out, key=lambda r: _PRIORITY[r.rule])


def applicable_stt(
    branch: Branch, fuel: int = 3, reserved: tuple[Name, ...] = ()
) -> list[RuleInstance]:
    """Instances the unrestricted calculus admits on the branch.

    fuel bounds the size of enumerated instances of functional equations;
    reserved names are avoided when introducing witness variables.  On a
    closed branch nothing is applicable.  Raises FragmentViolation for
    members outside the negation-and-equality language.
    """
    for s in branch.formulas:
        if branch.info(s).kind in (
            FormulaKind.IMP,
            FormulaKind.NEG_IMP,
            FormulaKind.FORALL,
            FormulaKind.NEG_FORALL,
        ):
            raise FragmentViolation(
                f"no rule for {show_term(s)}: implication and quantifiers "
                "are outside this calculus — use the restricted calculus"
            )
    if branch.is_closed:
        return []
    pos_index = {s: i for i, s in enumerate(branch.formulas)}
    out: list[RuleInstance] = []
    for s in branch.formulas:
        info = branch.info(s)
        kind = info.kind
        if kind is FormulaKind.DOUBLE_NEG:
            _emit(out, branch, RuleId.DOUBLE_NEG, (s,), _alts_double_neg(info))
        elif kind is FormulaKind.BOOL_EQ:
            _emit(out, branch, RuleId.BOOL_EQ, (s,), _alts_bool_eq(info))
        elif kind is FormulaKind.BOOL_DISEQ:
            _emit(out, branch, RuleId.BOOL_EXT, (s,), _alts_bool_ext(info))
        elif kind is FormulaKind.FUN_EQ:
            for u in instantiation_candidates(branch, info.ty.dom, fuel):
                _emit(out, branch, RuleId.FUN_EQ, (s,), _alts_fun_eq(info, u), u)
        elif kind is FormulaKind.FUN_DISEQ:
            if not has_witness_diseq(branch, info.lhs, info.rhs):
                x = _fresh_witness(branch, info.ty.dom, reserved)
                _emit(
                    out, branch, RuleId.FUN_EXT, (s,), _alts_fun_ext(info, x), x
                )
        elif kind is FormulaKind.SORT_DISEQ:
            if info.decomposable and info.largs:
                _emit(out, branch, RuleId.DECOMPOSE, (s,), _alts_decompose(info))
            _confront_partners(branch, pos_index, s, info, out)
        elif kind is FormulaKind.SORT_EQ:
            _confront_partners(branch, pos_index, s, info, out)
        elif kind in (FormulaKind.POS_ATOM, FormulaKind.NEG_ATOM):
            if info.args:
                _mate_partners(branch, pos_index, s, info, out)
        elif kind is FormulaKind.OTHER:
            raise FragmentViolation(f"no rule for {show_term(s)}")
    return _sorted_instances(out)


def applicable_efo(
    branch: Branch, reserved: tuple[Name, ...] = ()
) -> list[RuleInstance]:
    """Instances the restricted calculus admits on the branch.

    The branch must consist of restricted formulas or disequations between
    restricted terms; anything else raises FragmentViolation.  On a closed
    branch nothing is applicable.  The result is empty exactly when the
    branch is closed or satisfies the model-existence conditions.
    """
    for s in branch.formulas:
        w = quasi_efo_violation(s)
        if w is not None:
            raise FragmentViolation(
                f"{show_term(s)} is outside the restricted fragment "
                f"(offending subterm {show_term(w)})"
            )
    if branch.is_closed:
        return []
    pos_index = {s: i for i, s in enumerate(branch.formulas)}
    out: list[RuleInstance] = []
    for s in branch.formulas:
        info = branch.info(s)
        kind = info.kind
        if kind is FormulaKind.DOUBLE_NEG:
            _emit(out, branch, RuleId.DOUBLE_NEG, (s,), _alts_double_neg(info))
        elif kind is FormulaKind.BOOL_DISEQ:
            _emit(out, branch, RuleId.BOOL_EXT, (s,), _alts_bool_ext(info))
        elif kind is FormulaKind.IMP:
            _emit(out, branch, RuleId.IMP, (s,), _alts_imp(info))
        elif kind is FormulaKind.NEG_IMP:
            _emit(out, branch, RuleId.IMP_NEG, (s,), _alts_imp_neg(info))
        elif kind is FormulaKind.FUN_DISEQ:
            if not has_witness_diseq(branch, info.lhs, info.rhs):
                x = _fresh_witness(branch, info.ty.dom, reserved)
                _emit(
                    out, branch, RuleId.FUN_EXT, (s,), _alts_fun_ext(info, x), x
                )
        elif kind is FormulaKind.FORALL:
            for u in _forall_instances(branch, info, reserved):
                _emit(
                    out,
                    branch,
                    RuleId.FORALL_INST,
                    (s,),
                    _alts_forall_inst(info, u),
                    u,
                )
        elif kind is FormulaKind.NEG_FORALL:
            if not has_witness_neg_inst(branch, info.sort, info.pred):
                x = _fresh_witness(branch, info.sort, reserved)
                _emit(
                    out,
                    branch,
                    RuleId.FORALL_NEG,
                    (s,),
                    _alts_forall_neg(info, x),
                    x,
                )
        elif kind is FormulaKind.SORT_DISEQ:
            if info.decomposable and info.largs:
                _emit(out, branch, RuleId.DECOMPOSE, (s,), _alts_decompose(info))
            _confront_partners(branch, pos_index, s, info, out)
        elif kind is FormulaKind.SORT_EQ:
            _confront_partners(branch, pos_index, s, info, out)
        elif kind in (FormulaKind.POS_ATOM, FormulaKind.NEG_ATOM):
            if info.args:
                _mate_partners(branch, pos_index, s, info, out)
        elif kind is FormulaKind.OTHER:
            raise FragmentViolation(f"no rule for {show_term(s)}")
    return _sorted_instances(out)


def _forall_instances(branch: Branch, info, reserved) -> list[Term]:
    """Admissible quantifier instances under the restrictions.

    With discriminating terms at the sort: exactly those terms.  Without:
    nothing if some instance is already present; otherwise a single
    variable — the first free one of the sort, or a fresh one.
    """
    discs = branch.discriminating_terms(info.sort)
    if discs:
        return list(discs)
    if has_instance(branch, info.sort, info.pred):
        return []
    xs = branch.vars_of_type(info.sort)
    if xs:
        return [ref(xs[0])]
    return [_fresh_witness(branch, info.sort, reserved)]


# ---------------------------------------------------------------------------
# Closing leaves


def closing_instance(branch: Branch, eager: bool = False) -> RuleInstance | None:
    """The leaf instance witnessing that the branch is closed, if any.

    Closure proper: a variable with its negation, or a reflexive
    disequation between identical variables at a sort — witnessed by a
    zero-alternative mate or decompose instance.  With eager=True the wider
    conditions (any formula with its negation, any reflexive disequation)
    are also reported, as dedicated leaf rules.
    """
    w = branch.closing_witness
    if w is not None:
        if w[0] == "compl":
            return RuleInstance(RuleId.MATE, (w[1], w[2]), ())
        return RuleInstance(RuleId.DECOMPOSE, (w[1],), ())
    if eager:
        w = branch.eager_witness
        if w is not None:
            if w[0] == "compl":
                return RuleInstance(RuleId.CLOSE_COMPL, (w[1], w[2]), ())
            return RuleInstance(RuleId.CLOSE_REFL, (w[1],), ())
    return None


# ---------------------------------------------------------------------------
# Instance checking


def check_instance(branch: Branch, inst: RuleInstance, eager: bool = False) -> bool:
    """Validate a claimed rule instance against a branch.

    Recomputes the alternatives the rule yields from the instance's
    premises (and instantiation term) and compares; enforces membership of
    the premises, the admissibility restrictions, and that branching
    instances only fire on non-closed branches.  The eager flag admits the
    two wider leaf rules.
    """
    try:
        return _check(branch, inst, eager)
    except (TypeError, ValueError, AttributeError):
        return False


def _check(branch: Branch, r: RuleInstance, eager: bool) -> bool:
    if any(p not in branch for p in r.premises):
        return False
    if r.alternatives and branch.is_closed:
        return False

    rule = r.rule
    infos = tuple(branch.info(p) for p in r.premises)

    if rule is RuleId.CLOSE_COMPL:
        return (
            eager
            and len(r.premises) == 2
            and r.premises[1] == neg(r.premises[0])
            and r.alternatives == ()
            and r.inst is None
        )
    if rule is RuleId.CLOSE_REFL:
        if not (eager and len(r.premises) == 1 and r.inst is None):
            return False
        d = as_diseq(r.premises[0])
        return d is not None and d[1] == d[2] and r.alternatives == ()

    if rule is RuleId.DOUBLE_NEG:
        return (
            len(r.premises) == 1
            and infos[0].kind is FormulaKind.DOUBLE_NEG
            and r.inst is None
            and r.alternatives == _alts_double_neg(infos[0])
        )
    if rule is RuleId.BOOL_EQ:
        return (
            len(r.premises) == 1
            and infos[0].kind is FormulaKind.BOOL_EQ
            and r.inst is None
            and r.alternatives == _alts_bool_eq(infos[0])
        )
    if rule is RuleId.BOOL_EXT:
        return (
            len(r.premises) == 1
            and infos[0].kind is FormulaKind.BOOL_DISEQ
            and r.inst is None
            and r.alternatives == _alts_bool_ext(infos[0])
        )
    if rule is RuleId.IMP:
        return (
            len(r.premises) == 1
            and infos[0].kind is FormulaKind.IMP
            and r.inst is None
            and r.alternatives == _alts_imp(infos[0])
        )
    if rule is RuleId.IMP_NEG:
        return (
            len(r.premises) == 1
            and infos[0].kind is FormulaKind.NEG_IMP
            and r.inst is None
            and r.alternatives == _alts_imp_neg(infos[0])
        )
    if rule is RuleId.FUN_EQ:
        return (
            len(r.premises) == 1
            and infos[0].kind is FormulaKind.FUN_EQ
            and r.inst is not None
            and r.inst.ty == infos[0].ty.dom
            and is_normal(r.inst)
            and r.alternatives == _alts_fun_eq(infos[0], r.inst)
        )
    if rule is RuleId.FUN_EXT:
        info = infos[0]
        return (
            len(r.premises) == 1
            and info.kind is FormulaKind.FUN_DISEQ
            and r.inst is not None
            and is_var_ref(r.inst)
            and r.inst.ty == info.ty.dom
            and r.inst.name not in branch.free_names
            and not has_witness_diseq(branch, info.lhs, info.rhs)
            and r.alternatives == _alts_fun_ext(info, r.inst)
        )
    if rule is RuleId.MATE:
        if len(r.premises) != 2 or r.inst is not None:
            return False
        pi, ni = infos
        return (
            pi.kind is FormulaKind.POS_ATOM
            and ni.kind is FormulaKind.NEG_ATOM
            and pi.head == ni.head
            and r.alternatives == _alts_mate(pi, ni)
        )
    if rule is RuleId.DECOMPOSE:
        info = infos[0]
        return (
            len(r.premises) == 1
            and info.kind is FormulaKind.SORT_DISEQ
            and info.decomposable
            and r.inst is None
            and r.alternatives == _alts_decompose(info)
        )
    if rule is RuleId.CONFRONT:
        if len(r.premises) != 2 or r.inst is not None:
            return False
        ei, di = infos
        return (
            ei.kind is FormulaKind.SORT_EQ
            and di.kind is FormulaKind.SORT_DISEQ
            and ei.ty == di.ty
            and r.alternatives == _alts_confront(ei, di)
        )
    if rule is RuleId.FORALL_INST:
        info = infos[0]
        if (
            len(r.premises) != 1
            or info.kind is not FormulaKind.FORALL
            or r.inst is None
            or r.inst.ty != info.sort
            or not is_normal(r.inst)
            or efo_violation(r.inst) is not None
        ):
            return False
        discs = branch.discriminating_terms(info.sort)
        if discs:
            if r.inst not in discs:
                return False
        else:
            if has_instance(branch, info.sort, info.pred):
                return False
            if not is_var_ref(r.inst):
                return False
            if branch.vars_of_type(info.sort):
                if r.inst.name not in branch.vars_of_type(info.sort):
                    return False
            elif r.inst.name in branch.free_names:
                return False
        return r.alternatives == _alts_forall_inst(info, r.inst)
    if rule is RuleId.FORALL_NEG:
        info = infos[0]
        return (
            len(r.premises) == 1
            and info.kind is FormulaKind.NEG_FORALL
            and r.inst is not None
            and is_var_ref(r.inst)
            and r.inst.ty == info.sort
            and r.inst.name not in branch.free_names
            and not has_witness_neg_inst(branch, info.sort, info.pred)
            and r.alternatives == _alts_forall_neg(info, r.inst)
        )
    return False
