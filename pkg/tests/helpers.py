"""Shared test machinery: a naive named-term oracle and seeded random generators.

The named representation here is deliberately primitive (nested tuples with
string binders, alpha-equivalence by parallel binder stacks) so it can serve
as an independent oracle for the package's canonical representation.
"""

from __future__ import annotations

import random
from typing import Iterable

from hotab.kernel import (
    Fun,
    Lam,
    Name,
    Term,
    Type,
    app,
    diseq,
    eq,
    forall,
    fun,
    imp,
    lam,
    neg,
    o,
    ref,
    sort,
)

# ---------------------------------------------------------------------------
# Named terms (oracle representation)
#
# ("V", ident, ty)  variable occurrence
# ("A", f, a)       application
# ("L", ident, ty, body)  abstraction with a named binder


def nvar(ident: str, ty: Type):
    return ("V", ident, ty)


def napp(f, *args):
    for a in args:
        f = ("A", f, a)
    return f


def nlam(ident: str, ty: Type, body):
    return ("L", ident, ty, body)


def named_alpha_eq(a, b) -> bool:
    """Naive alpha-equivalence via parallel binder stacks."""

    def lookup(stack, ident):
        for i in range(len(stack) - 1, -1, -1):
            if stack[i] == ident:
                return len(stack) - 1 - i
        return None

    def go(a, b, ea, eb):
        if a[0] != b[0]:
            return False
        if a[0] == "V":
            ia, ib = lookup(ea, a[1]), lookup(eb, b[1])
            if (ia is None) != (ib is None):
                return False
            if ia is not None:
                return ia == ib
            return a[1] == b[1] and a[2] == b[2]
        if a[0] == "A":
            return go(a[1], b[1], ea, eb) and go(a[2], b[2], ea, eb)
        return a[2] == b[2] and go(a[3], b[3], ea + (a[1],), eb + (b[1],))

    return go(a, b, (), ())


def named_to_term(t, sig: dict[str, Name]) -> Term:
    """Convert a named tuple term to the canonical representation."""
    counter = [0]

    def go(t, scope: dict[str, Name]) -> Term:
        if t[0] == "V":
            n = scope.get(t[1])
            if n is not None:
                if n.ty != t[2]:
                    raise TypeError(f"scoped variable {t[1]} at wrong type")
                return ref(n)
            return ref(sig[t[1]])
        if t[0] == "A":
            return app(go(t[1], scope), go(t[2], scope))
        counter[0] += 1
        binder = Name(f"_b{counter[0]}", t[2])
        body = go(t[3], {**scope, t[1]: binder})
        return lam(binder, body)

    return go(t, {})


def rename_binders(t, rng: random.Random):
    """Rename every binder to a globally fresh identifier (alpha-preserving)."""
    counter = [0]

    def go(t, env: dict[str, str]):
        if t[0] == "V":
            return ("V", env.get(t[1], t[1]), t[2])
        if t[0] == "A":
            return ("A", go(t[1], env), go(t[2], env))
        counter[0] += 1
        fresh = f"_r{counter[0]}_{rng.randrange(1000)}"
        return ("L", fresh, t[2], go(t[3], {**env, t[1]: fresh}))

    return go(t, {})


def named_free_idents(t) -> set[str]:
    def go(t, bound):
        if t[0] == "V":
            return set() if t[1] in bound else {t[1]}
        if t[0] == "A":
            return go(t[1], bound) | go(t[2], bound)
        return go(t[3], bound | {t[1]})

    return go(t, frozenset())


# ---------------------------------------------------------------------------
# Random generators (seeded, deterministic)


class Gen:
    """Deterministic random builder for types, terms, and formulas."""

    def __init__(self, seed: int | random.Random, sorts: Iterable[str] = ("a", "b")):
        self.rng = seed if isinstance(seed, random.Random) else random.Random(seed)
        self.sorts = [sort(s) for s in sorts]
        self._pool: dict[Type, list[Name]] = {}
        self._fresh = 0

    # -- types --

    def base(self) -> Type:
        return self.rng.choice([o] + self.sorts)

    def type(self, depth: int = 2) -> Type:
        if depth <= 0 or self.rng.random() < 0.55:
            return self.base()
        return Fun(self.type(depth - 1), self.type(depth - 1))

    def sort_type(self) -> Type:
        return self.rng.choice(self.sorts)

    # -- variables --

    def invent(self, ty: Type) -> Name:
        self._fresh += 1
        n = Name(f"v{self._fresh}", ty)
        self._pool.setdefault(ty, []).append(n)
        return n

    def var(self, ty: Type) -> Name:
        pool = self._pool.get(ty)
        if pool and self.rng.random() < 0.7:
            return self.rng.choice(pool)
        return self.invent(ty)

    def binder(self, ty: Type) -> Name:
        self._fresh += 1
        return Name(f"b{self._fresh}", ty)

    # -- terms --

    def term(
        self,
        ty: Type,
        depth: int = 3,
        scope: tuple[Name, ...] = (),
        redex_prob: float = 0.0,
    ) -> Term:
        rng = self.rng
        if depth > 0 and rng.random() < redex_prob:
            dom = self.type(1)
            b = self.binder(dom)
            body = self.term(ty, depth - 1, scope + (b,), redex_prob)
            arg = self.term(dom, depth - 1, scope, redex_prob)
            return app(lam(b, body), arg)
        if depth <= 0:
            cands = [n for n in scope if n.ty == ty]
            if cands and rng.random() < 0.6:
                return ref(rng.choice(cands))
            return ref(self.var(ty))
        if type(ty) is Fun and rng.random() < 0.45:
            b = self.binder(ty.dom)
            return lam(b, self.term(ty.cod, depth - 1, scope + (b,), redex_prob))
        k = rng.choice([0, 1, 1, 2])
        dts = [self.type(1) for _ in range(k)]
        hty = fun(*dts, ty) if dts else ty
        cands = [n for n in scope if n.ty == hty]
        head = rng.choice(cands) if cands and rng.random() < 0.5 else self.var(hty)
        args = [self.term(d, depth - 1, scope, redex_prob) for d in dts]
        return app(ref(head), *args)

    def subst(self, t: Term, depth: int = 2) -> dict[Name, Term]:
        from hotab.kernel import free_vars

        theta = {}
        for x in sorted(free_vars(t), key=lambda n: n.ident):
            if self.rng.random() < 0.6:
                theta[x] = self.term(x.ty, depth, redex_prob=0.2)
        return theta

    # -- formulas --

    def atom(self, depth: int = 2, efo: bool = False) -> Term:
        k = self.rng.choice([0, 1, 1, 2])
        dts = [self.sort_type() if efo else self.type(1) for _ in range(k)]
        hty = fun(*dts, o) if dts else o
        head = self.var(hty)
        mk = self.efo_term if efo else self.term
        return app(ref(head), *[mk(d, depth - 1) for d in dts])

    def formula(self, depth: int = 3) -> Term:
        """A random normal formula over negation and typed equality."""
        rng = self.rng
        if depth <= 0:
            return self.atom(0)
        shape = rng.choice(["atom", "neg", "eq", "eq", "diseq"])
        if shape == "atom":
            return self.atom(depth)
        if shape == "neg":
            return neg(self.formula(depth - 1))
        ty = self.type(1)
        s, t = self.term(ty, depth - 1), self.term(ty, depth - 1)
        return eq(s, t) if shape == "eq" else diseq(s, t)

    def efo_term(self, ty: Type, depth: int = 2, scope: tuple[Name, ...] = ()) -> Term:
        """A normal term whose constants stay in the restricted signature."""
        rng = self.rng
        if type(ty) is Fun and depth > 0 and rng.random() < 0.4:
            b = self.binder(ty.dom)
            return lam(b, self.efo_term(ty.cod, depth - 1, scope + (b,)))
        if depth <= 0:
            cands = [n for n in scope if n.ty == ty]
            if cands and rng.random() < 0.6:
                return ref(rng.choice(cands))
            return ref(self.var(ty))
        k = rng.choice([0, 1, 1, 2])
        dts = [self.sort_type() for _ in range(k)]
        hty = fun(*dts, ty) if dts else ty
        cands = [n for n in scope if n.ty == hty]
        head = rng.choice(cands) if cands and rng.random() < 0.5 else self.var(hty)
        return app(ref(head), *[self.efo_term(d, depth - 1, scope) for d in dts])

    def efo_formula(self, depth: int = 3, quasi: bool = False) -> Term:
        rng = self.rng
        if depth <= 0:
            return self.atom(0, efo=True)
        shape = rng.choice(
            ["atom", "neg", "imp", "eq", "diseq", "forall", "forall"]
            + (["anydiseq"] if quasi else [])
        )
        if shape == "atom":
            return self.atom(depth, efo=True)
        if shape == "neg":
            return neg(self.efo_formula(depth - 1, quasi=False))
        if shape == "imp":
            return imp(
                self.efo_formula(depth - 1, quasi=False),
                self.efo_formula(depth - 1, quasi=False),
            )
        if shape in ("eq", "diseq"):
            ty = self.sort_type()
            s, t = self.efo_term(ty, depth - 1), self.efo_term(ty, depth - 1)
            return eq(s, t) if shape == "eq" else diseq(s, t)
        if shape == "forall":
            ty = self.sort_type()
            b = self.binder(ty)
            return forall(lam(b, self.efo_formula(depth - 1, quasi=False)))
        ty = self.type(1)
        return diseq(self.efo_term(ty, depth - 1), self.efo_term(ty, depth - 1))

    # -- models --

    def value(self, frame, ty: Type):
        """A random element of D(ty) without enumerating function spaces."""
        if ty == o:
            return self.rng.choice((0, 1))
        if type(ty) is not Fun:
            return self.rng.randrange(frame.size(ty))
        return tuple(
            self.value(frame, ty.cod) for _ in range(frame.size(ty.dom))
        )

    def frame_for(self, formulas, max_size: int = 3):
        from hotab.semantics import Frame, sorts_in

        sizes = {s: self.rng.randint(1, max_size) for s in sorts_in(formulas)}
        return Frame(sizes)

    def model_for(self, formulas, max_size: int = 3):
        from hotab.semantics import Model, variables_in

        frame = self.frame_for(formulas, max_size)
        interp = {n: self.value(frame, n.ty) for n in variables_in(formulas)}
        return Model(frame, interp)

    def bsr_formula(self, n_quant: int | None = None) -> Term:
        """Quantifier prefix over a quantifier-free relational matrix."""
        rng = self.rng
        if n_quant is None:
            n_quant = rng.choice([0, 1, 1, 2])
        binders = [self.binder(self.sort_type()) for _ in range(n_quant)]

        def matrix(depth: int, scope: tuple[Name, ...]) -> Term:
            def leaf() -> Term:
                if rng.random() < 0.5:
                    ty = rng.choice([n.ty for n in scope] if scope else self.sorts)
                    cands = [n for n in scope if n.ty == ty]

                    def pick():
                        if cands and rng.random() < 0.7:
                            return ref(rng.choice(cands))
                        return ref(self.var(ty))

                    e = eq(pick(), pick())
                    return e if rng.random() < 0.5 else neg(e)
                k = rng.choice([1, 1, 2])
                dts = [self.sort_type() for _ in range(k)]
                head = self.var(fun(*dts, o))
                args = []
                for d in dts:
                    cs = [n for n in scope if n.ty == d]
                    if cs and rng.random() < 0.7:
                        args.append(ref(rng.choice(cs)))
                    else:
                        args.append(ref(self.var(d)))
                return app(ref(head), *args)

            if depth <= 0:
                return leaf()
            shape = rng.choice(["leaf", "leaf", "neg", "imp"])
            if shape == "leaf":
                return leaf()
            if shape == "neg":
                return neg(matrix(depth - 1, scope))
            return imp(matrix(depth - 1, scope), matrix(depth - 1, scope))

        body = matrix(2, tuple(binders))
        for b in reversed(binders):
            body = forall(lam(b, body))
        return body
