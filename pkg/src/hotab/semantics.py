"""Standard finite models: frames, evaluation, extraction, enumeration.

A frame fixes a finite domain for every type: truth values are 0/1, each
sort gets an explicitly sized domain (elements are indices 0..n-1, optionally
labelled), and a function domain is the full space of tables.  A function
value is a tuple indexed by the position of the argument in the argument
type's domain enumeration, so values are hashable and comparable and the
full space D(a->b) is exactly `itertools.product(D(b), repeat=|D(a)|)`.

Logical constants always denote their canonical interpretations (negation,
implication, typed identity, universal quantification as the constant-true
test); a model therefore only carries values for variables.

`extract_model` realizes a saturated branch as a finite model: each sort's
domain is the branch's discriminants at that sort, base-type variables are
seeded by branch membership, and the remaining choices are found by
backtracking, certified by `check_model` before returning.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator

from .branch import Branch, FormulaKind
from .kernel import (
    App,
    Base,
    Bound,
    Fun,
    Lam,
    Name,
    Ref,
    Term,
    Type,
    eq_operand_type,
    forall_sort,
    is_sort,
    o,
    show_term,
    show_type,
)

#: Refuse to enumerate a function space with more tables than this.
DEFAULT_MAX_TABLE = 2**25

#: 0/1 at o, an element index at sorts, a table (tuple) at function types.
Value = int | tuple


class CardinalityError(Exception):
    """A function space exceeded the configured enumeration ceiling."""


class NotEvident(Exception):
    """extract_model was handed a branch that is not actually saturated."""

    def __init__(self, report):
        self.report = report
        super().__init__(f"branch is not evident: {report.describe()}")


class ExtractionFailure(Exception):
    """No admissible assignment exists (internal invariant violation)."""


class Frame:
    """Finite domains for every type over a fixed set of sorts."""

    def __init__(
        self,
        sort_sizes: dict[Base, int],
        sort_labels: dict[Base, tuple] | None = None,
        max_table: int = DEFAULT_MAX_TABLE,
    ):
        for s, n in sort_sizes.items():
            if not is_sort(s):
                raise ValueError(f"not a sort: {s!r}")
            if n < 1:
                raise ValueError(f"domain of {s!r} must be non-empty")
        self.sort_sizes = dict(sort_sizes)
        self.sort_labels = dict(sort_labels or {})
        self.max_table = max_table
        self._domains: dict[Type, tuple] = {}
        self._index: dict[Type, dict] = {}
        self._consts: dict[Name, object] = {}

    def size(self, ty: Type) -> int:
        """|D(ty)|, computed arithmetically with the ceiling enforced."""
        if ty == o:
            return 2
        if type(ty) is Base:
            if ty not in self.sort_sizes:
                raise ValueError(f"frame has no domain for sort {show_type(ty)}")
            return self.sort_sizes[ty]
        n = self.size(ty.cod) ** self.size(ty.dom)
        if n > self.max_table:
            raise CardinalityError(
                f"|D({show_type(ty)})| = {n} exceeds the ceiling {self.max_table}"
            )
        return n

    def domain(self, ty: Type) -> tuple:
        """The full domain of ty, in a fixed enumeration order."""
        d = self._domains.get(ty)
        if d is not None:
            return d
        if ty == o:
            d = (0, 1)
        elif type(ty) is Base:
            d = tuple(range(self.size(ty)))
        else:
            self.size(ty)  # ceiling check before materializing
            cod = self.domain(ty.cod)
            dom_n = self.size(ty.dom)
            d = tuple(itertools.product(cod, repeat=dom_n))
        self._domains[ty] = d
        self._index[ty] = {v: i for i, v in enumerate(d)}
        return d

    def index(self, ty: Type, v) -> int:
        if ty not in self._index:
            self.domain(ty)
        return self._index[ty][v]

    def apply(self, fty: Fun, fval: tuple, aval):
        return fval[self.index(fty.dom, aval)]

    def constant(self, n: Name):
        """Canonical value of a logical constant in this frame."""
        v = self._consts.get(n)
        if v is not None:
            return v
        if n.ident == "not":
            v = (1, 0)
        elif n.ident == "imp":
            v = ((1, 1), (0, 1))
        elif n.ident == "=":
            ty = eq_operand_type(n)
            dom = self.domain(ty)
            v = tuple(tuple(1 if x == y else 0 for y in dom) for x in dom)
        elif n.ident == "forall":
            s = forall_sort(n)
            preds = self.domain(Fun(s, o))
            v = tuple(1 if all(b == 1 for b in f) else 0 for f in preds)
        else:
            raise ValueError(f"unknown logical constant {n!r}")
        self._consts[n] = v
        return v


class Model:
    """A frame plus values for variables; constants are always canonical."""

    def __init__(self, frame: Frame, interp: dict[Name, object]):
        for n in interp:
            if not n.is_var:
                raise ValueError(f"models interpret variables only, got {n!r}")
        self.frame = frame
        self.interp = dict(interp)

    def value(self, n: Name):
        if n.is_var:
            if n not in self.interp:
                raise KeyError(f"model assigns no value to {n!r}")
            return self.interp[n]
        return self.frame.constant(n)

    def __repr__(self) -> str:
        return show_model(self)


def eval_term(model: Model, t: Term, env: dict[Name, object] | None = None):
    """Evaluate t in the model; env overrides values of free names."""
    frame = model.frame

    def go(t: Term, stack: list):
        if type(t) is Ref:
            if env is not None and t.name in env:
                return env[t.name]
            return model.value(t.name)
        if type(t) is Bound:
            return stack[-1 - t.index]
        if type(t) is App:
            f = go(t.fun, stack)
            a = go(t.arg, stack)
            return frame.apply(t.fun.ty, f, a)
        dom = frame.domain(t.dom)
        stack.append(None)
        out = []
        for v in dom:
            stack[-1] = v
            out.append(go(t.body, stack))
        stack.pop()
        return tuple(out)

    return go(t, [])


def check_model(model: Model, formulas: Iterable[Term]) -> bool:
    """True iff every formula evaluates to 1."""
    return all(eval_term(model, s) == 1 for s in formulas)


# ---------------------------------------------------------------------------
# Sort/variable collection


def _collect_types(t: Term, acc: set[Type]) -> None:
    acc.add(t.ty)
    if type(t) is App:
        _collect_types(t.fun, acc)
        _collect_types(t.arg, acc)
    elif type(t) is Lam:
        acc.add(t.dom)
        _collect_types(t.body, acc)


def sorts_in(formulas: Iterable[Term]) -> tuple[Base, ...]:
    """Every sort occurring in any type of any subterm, deterministically."""
    tys: set[Type] = set()
    for s in formulas:
        _collect_types(s, tys)
    out: dict[Base, None] = {}

    def walk(ty: Type):
        if type(ty) is Base:
            if ty != o:
                out.setdefault(ty)
        else:
            walk(ty.dom)
            walk(ty.cod)

    for ty in sorted(tys, key=show_type):
        walk(ty)
    return tuple(sorted(out, key=lambda s: s.name))


def variables_in(formulas: Iterable[Term]) -> tuple[Name, ...]:
    """Free variables of the formulas in first-occurrence order."""
    from .kernel import free_vars_ordered

    seen: dict[Name, None] = {}
    for s in formulas:
        for n in free_vars_ordered(s):
            seen.setdefault(n)
    return tuple(seen)


# ---------------------------------------------------------------------------
# Model extraction from a saturated branch


def extract_model(
    branch: Branch, max_table: int = DEFAULT_MAX_TABLE, check_evidence: bool = True
) -> Model:
    """Build a finite model of a saturated (evident) branch.

    Sorts take their discriminants as domains; a sort variable that is itself
    a discriminating term must land in a discriminant containing it; a truth
    variable in the branch must be true, a negated one false.  The remaining
    freedom is resolved by backtracking and the result is certified by
    check_model before it is returned.
    """
    if check_evidence:
        from .search import is_evident

        report = is_evident(branch)
        if not report.evident or report.bounded:
            raise NotEvident(report)

    sorts = dict.fromkeys(sorts_in(branch.formulas))
    for s in branch.diseq_sorts():
        sorts.setdefault(s)
    discs: dict[Base, tuple[frozenset, ...]] = {
        s: branch.discriminants(s) for s in sorts
    }
    frame = Frame(
        {s: len(d) for s, d in discs.items()},
        sort_labels={s: d for s, d in discs.items()},
        max_table=max_table,
    )

    variables = variables_in(branch.formulas)
    sort_vars = [n for n in variables if is_sort(n.ty)]
    bool_vars = [n for n in variables if n.ty == o]
    fun_vars = [n for n in variables if type(n.ty) is Fun]
    order = sort_vars + bool_vars + fun_vars

    def candidates(n: Name) -> list:
        if is_sort(n.ty):
            ds = discs[n.ty]
            if Ref(n) in branch.discriminating_terms(n.ty):
                return [i for i, d in enumerate(ds) if Ref(n) in d]
            return list(range(len(ds)))
        if n.ty == o:
            out = []
            if Ref(n) not in branch:  # may be false unless asserted true
                out.append(0)
            from .kernel import neg

            if neg(Ref(n)) not in branch:  # may be true unless denied
                out.append(1)
            return out
        return list(frame.domain(n.ty))

    # check each formula as soon as all its variables are assigned
    position = {n: i for i, n in enumerate(order)}
    triggers: dict[int, list[Term]] = {}
    from .kernel import free_vars

    for s in branch.formulas:
        fv = free_vars(s)
        trigger = max((position[n] for n in fv), default=-1)
        triggers.setdefault(trigger, []).append(s)

    base = Model(frame, {})
    for s in triggers.get(-1, ()):  # variable-free members
        if eval_term(base, s) != 1:
            raise ExtractionFailure(f"closed formula {show_term(s)} is false")

    assignment: dict[Name, object] = {}

    def search(i: int) -> bool:
        if i == len(order):
            return True
        n = order[i]
        for v in candidates(n):
            assignment[n] = v
            m = Model(frame, assignment)
            if all(eval_term(m, s) == 1 for s in triggers.get(i, ())):
                if search(i + 1):
                    return True
        assignment.pop(n, None)
        return False

    if not search(0):
        raise ExtractionFailure(
            "no admissible assignment over the discriminant frame"
        )
    model = Model(frame, assignment)
    if not check_model(model, branch.formulas):
        raise ExtractionFailure("extracted model failed certification")
    return model


# ---------------------------------------------------------------------------
# Brute-force enumeration (test oracle and sat cross-check)


def enumerate_models(
    formulas: Iterable[Term],
    max_size: int = 3,
    max_table: int = DEFAULT_MAX_TABLE,
) -> Iterator[Model]:
    """All models over all standard frames with sort domains up to max_size.

    Exhaustive and deterministic; exponential in everything, so callers keep
    the inputs small.  Sorts not mentioned by the formulas are omitted.
    """
    formulas = tuple(formulas)
    sorts = sorts_in(formulas)
    variables = variables_in(formulas)
    for sizes in itertools.product(range(1, max_size + 1), repeat=len(sorts)):
        frame = Frame(dict(zip(sorts, sizes)), max_table=max_table)
        domains = [frame.domain(n.ty) for n in variables]
        for values in itertools.product(*domains):
            model = Model(frame, dict(zip(variables, values)))
            if check_model(model, formulas):
                yield model


def has_model(formulas: Iterable[Term], max_size: int = 3) -> bool:
    for _ in enumerate_models(formulas, max_size):
        return True
    return False


# ---------------------------------------------------------------------------
# Printing


def show_value(frame: Frame, ty: Type, v) -> str:
    if ty == o:
        return str(v)
    if type(ty) is Base:
        return f"{ty.name}{v}"
    dom = frame.domain(ty.dom)
    cells = [
        f"{show_value(frame, ty.dom, x)} -> {show_value(frame, ty.cod, v[i])}"
        for i, x in enumerate(dom)
    ]
    return "{" + ", ".join(cells) + "}"


def show_model(model: Model) -> str:
    """Sorts with their labelled elements, then each variable's value."""
    frame = model.frame
    lines = []
    for s in sorted(frame.sort_sizes, key=lambda b: b.name):
        n = frame.sort_sizes[s]
        lines.append(f"sort {s.name} : {n} element" + ("s" if n != 1 else ""))
        labels = frame.sort_labels.get(s)
        for i in range(frame.sort_sizes[s]):
            if labels is not None:
                inside = ", ".join(sorted(show_term(t) for t in labels[i]))
                lines.append(f"  {s.name}{i} = {{{inside}}}")
            else:
                lines.append(f"  {s.name}{i}")
    for n in sorted(model.interp, key=lambda n: n.ident):
        v = model.interp[n]
        lines.append(
            f"var {n.ident} : {show_type(n.ty)} = {show_value(frame, n.ty, v)}"
        )
    return "\n".join(lines)
