"""Typed term kernel: simple types, names, and alpha-canonical lambda terms.

Terms are stored locally nameless: bound variables are de Bruijn indices,
free variables and logical constants are named references.  Structural
equality therefore coincides with alpha-equivalence, and substitution can
never capture.  Everything is immutable with a cached hash, so terms are
shared freely across tableau branches and used as set/dict keys.

The logical signature is fixed: negation, implication, equality at every
type, and universal quantification at every sort.  Equality and quantifier
constants are instantiated lazily per type and interned.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Iterator


# ---------------------------------------------------------------------------
# Types


class Type:
    """A simple type: the base type `o`, a sort, or a function type."""

    __slots__ = ("_hash",)

    def __hash__(self) -> int:
        return self._hash


class Base(Type):
    __slots__ = ("name",)

    __hash__ = Type.__hash__

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_hash", hash(("Base", name)))

    def __setattr__(self, *a):  # immutable
        raise AttributeError("Type is immutable")

    def __eq__(self, other) -> bool:
        return self is other or (type(other) is Base and self.name == other.name)

    def __repr__(self) -> str:
        return show_type(self)


class Fun(Type):
    __slots__ = ("dom", "cod")

    __hash__ = Type.__hash__

    def __init__(self, dom: Type, cod: Type):
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "cod", cod)
        object.__setattr__(self, "_hash", hash(("Fun", dom, cod)))

    def __setattr__(self, *a):
        raise AttributeError("Type is immutable")

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return (
            type(other) is Fun
            and self._hash == other._hash
            and self.dom == other.dom
            and self.cod == other.cod
        )

    def __repr__(self) -> str:
        return show_type(self)


#: The type of truth values.  Every other base type is a sort.
o = Base("o")


def sort(name: str) -> Base:
    """Declare a sort; `o` is reserved for the type of truth values."""
    if name == "o":
        raise ValueError("'o' is reserved for the type of truth values")
    return Base(name)


def fun(*tys: Type) -> Type:
    """Right-associated function type: fun(a, b, c) = a -> (b -> c)."""
    if len(tys) < 2:
        raise ValueError("fun needs at least two types")
    out = tys[-1]
    for t in reversed(tys[:-1]):
        out = Fun(t, out)
    return out


def is_sort(ty: Type) -> bool:
    return type(ty) is Base and ty.name != "o"


def arg_types(ty: Type) -> tuple[Type, ...]:
    """Argument types of a fully applied use: arg_types(a->b->o) = (a, b)."""
    out = []
    while type(ty) is Fun:
        out.append(ty.dom)
        ty = ty.cod
    return tuple(out)


def result_type(ty: Type) -> Type:
    while type(ty) is Fun:
        ty = ty.cod
    return ty


# ---------------------------------------------------------------------------
# Names


class Name:
    """A free name: a variable or a logical constant, with its type."""

    __slots__ = ("ident", "ty", "is_var", "_hash")

    def __init__(self, ident: str, ty: Type, is_var: bool = True):
        object.__setattr__(self, "ident", ident)
        object.__setattr__(self, "ty", ty)
        object.__setattr__(self, "is_var", is_var)
        object.__setattr__(self, "_hash", hash(("Name", ident, ty, is_var)))

    def __setattr__(self, *a):
        raise AttributeError("Name is immutable")

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return (
            type(other) is Name
            and self._hash == other._hash
            and self.ident == other.ident
            and self.is_var == other.is_var
            and self.ty == other.ty
        )

    def __repr__(self) -> str:
        return f"{self.ident}:{show_type(self.ty)}"


NOT = Name("not", Fun(o, o), is_var=False)
IMP = Name("imp", Fun(o, Fun(o, o)), is_var=False)


@lru_cache(maxsize=None)
def eq_const(ty: Type) -> Name:
    """The equality constant at type ty (ty -> ty -> o)."""
    return Name("=", Fun(ty, Fun(ty, o)), is_var=False)


@lru_cache(maxsize=None)
def forall_const(s: Type) -> Name:
    """The universal quantifier at sort s ((s -> o) -> o)."""
    if not is_sort(s):
        raise ValueError(f"quantification is only supported at sorts, not {s!r}")
    return Name("forall", Fun(Fun(s, o), o), is_var=False)


def eq_operand_type(n: Name) -> Type | None:
    """The type sigma if n is the equality constant at sigma, else None."""
    if not n.is_var and n.ident == "=":
        return n.ty.dom
    return None


def forall_sort(n: Name) -> Type | None:
    """The sort alpha if n is the quantifier at alpha, else None."""
    if not n.is_var and n.ident == "forall":
        return n.ty.dom.dom
    return None


# ---------------------------------------------------------------------------
# Terms


class Term:
    """An intrinsically typed lambda term in alpha-canonical form."""

    __slots__ = ("ty", "_hash")

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return show_term(self)


class Ref(Term):
    """Occurrence of a free name (variable or logical constant)."""

    __slots__ = ("name",)

    __hash__ = Term.__hash__

    def __init__(self, name: Name):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "ty", name.ty)
        object.__setattr__(self, "_hash", hash(("Ref", name)))

    def __setattr__(self, *a):
        raise AttributeError("Term is immutable")

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return type(other) is Ref and self.name == other.name


class Bound(Term):
    """A bound variable as a de Bruijn index (0 = innermost binder)."""

    __slots__ = ("index",)

    __hash__ = Term.__hash__

    def __init__(self, index: int, ty: Type):
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "ty", ty)
        object.__setattr__(self, "_hash", hash(("Bound", index, ty)))

    def __setattr__(self, *a):
        raise AttributeError("Term is immutable")

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return (
            type(other) is Bound
            and self.index == other.index
            and self.ty == other.ty
        )


class App(Term):
    __slots__ = ("fun", "arg")

    __hash__ = Term.__hash__

    def __init__(self, f: Term, a: Term):
        fty = f.ty
        if type(fty) is not Fun:
            raise TypeError(f"cannot apply non-function {f!r} : {show_type(fty)}")
        if fty.dom != a.ty:
            raise TypeError(
                f"type mismatch in application: expected {show_type(fty.dom)}, "
                f"got {a!r} : {show_type(a.ty)}"
            )
        object.__setattr__(self, "fun", f)
        object.__setattr__(self, "arg", a)
        object.__setattr__(self, "ty", fty.cod)
        object.__setattr__(self, "_hash", hash(("App", f._hash, a._hash)))

    def __setattr__(self, *a):
        raise AttributeError("Term is immutable")

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return (
            type(other) is App
            and self._hash == other._hash
            and self.fun == other.fun
            and self.arg == other.arg
        )


class Lam(Term):
    """Abstraction over the domain type; the binder itself is nameless."""

    __slots__ = ("dom", "body")

    __hash__ = Term.__hash__

    def __init__(self, dom: Type, body: Term):
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "body", body)
        object.__setattr__(self, "ty", Fun(dom, body.ty))
        object.__setattr__(self, "_hash", hash(("Lam", dom, body._hash)))

    def __setattr__(self, *a):
        raise AttributeError("Term is immutable")

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return (
            type(other) is Lam
            and self._hash == other._hash
            and self.dom == other.dom
            and self.body == other.body
        )


def ref(name: Name) -> Ref:
    return Ref(name)


def app(f: Term, *args: Term) -> Term:
    for a in args:
        f = App(f, a)
    return f


def _abstract(t: Term, x: Name, depth: int) -> Term:
    if type(t) is Ref:
        return Bound(depth, x.ty) if t.name == x else t
    if type(t) is Bound:
        return t
    if type(t) is App:
        return App(_abstract(t.fun, x, depth), _abstract(t.arg, x, depth))
    return Lam(t.dom, _abstract(t.body, x, depth + 1))


def lam(x: Name, body: Term) -> Lam:
    """Bind the free variable x in body, yielding the abstraction over x."""
    if not x.is_var:
        raise ValueError(f"cannot bind logical constant {x!r}")
    return Lam(x.ty, _abstract(body, x, 0))


def _shift(t: Term, by: int, cutoff: int = 0) -> Term:
    """Raise dangling de Bruijn indices (>= cutoff) by the given amount."""
    if type(t) is Bound:
        return Bound(t.index + by, t.ty) if t.index >= cutoff else t
    if type(t) is App:
        return App(_shift(t.fun, by, cutoff), _shift(t.arg, by, cutoff))
    if type(t) is Lam:
        return Lam(t.dom, _shift(t.body, by, cutoff + 1))
    return t


def instantiate(body: Term, u: Term) -> Term:
    """Replace the outermost binder's variable in a Lam body by u.

    u may itself contain dangling indices (references to binders enclosing
    the redex); they are shifted past the binders u is pushed under.
    """

    def go(t: Term, depth: int) -> Term:
        if type(t) is Bound:
            if t.index == depth:
                return u if depth == 0 else _shift(u, depth)
            if t.index > depth:
                return Bound(t.index - 1, t.ty)
            return t
        if type(t) is App:
            return App(go(t.fun, depth), go(t.arg, depth))
        if type(t) is Lam:
            return Lam(t.dom, go(t.body, depth + 1))
        return t

    return go(body, 0)


def type_of(t: Term) -> Type:
    return t.ty


def spine(t: Term) -> tuple[Term, tuple[Term, ...]]:
    """Split nested applications: spine(h a b) = (h, (a, b))."""
    args: list[Term] = []
    while type(t) is App:
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, tuple(args)


def subterms(t: Term) -> Iterator[Term]:
    """All subterms of t, outermost first (t itself included)."""
    stack = [t]
    while stack:
        s = stack.pop()
        yield s
        if type(s) is App:
            stack.append(s.arg)
            stack.append(s.fun)
        elif type(s) is Lam:
            stack.append(s.body)


def names(t: Term) -> Iterator[Name]:
    """Every free-name occurrence in t (constants included), leftmost first."""
    if type(t) is Ref:
        yield t.name
    elif type(t) is App:
        yield from names(t.fun)
        yield from names(t.arg)
    elif type(t) is Lam:
        yield from names(t.body)


def free_vars(t: Term) -> frozenset[Name]:
    """The free variables of t; logical constants are excluded."""
    return frozenset(n for n in names(t) if n.is_var)


def free_vars_ordered(t: Term) -> tuple[Name, ...]:
    """Free variables in order of first (leftmost) occurrence."""
    seen: dict[Name, None] = {}
    for n in names(t):
        if n.is_var and n not in seen:
            seen[n] = None
    return tuple(seen)


def fresh_var(ty: Type, avoid: Iterable[Name]) -> Name:
    """A variable of type ty whose identifier collides with nothing in avoid.

    Deterministic: picks x0, x1, ... at the lowest unused index, so equal
    avoid sets always yield the same name.
    """
    used = {n.ident for n in avoid}
    i = 0
    while f"x{i}" in used:
        i += 1
    return Name(f"x{i}", ty)


# ---------------------------------------------------------------------------
# Formula builders and destructurers (formulas are terms of type o)


def neg(s: Term) -> Term:
    return App(Ref(NOT), s)


def imp(s: Term, t: Term) -> Term:
    return App(App(Ref(IMP), s), t)


def eq(s: Term, t: Term) -> Term:
    if s.ty != t.ty:
        raise TypeError(
            f"equation between distinct types {show_type(s.ty)} and {show_type(t.ty)}"
        )
    return App(App(Ref(eq_const(s.ty)), s), t)


def diseq(s: Term, t: Term) -> Term:
    return neg(eq(s, t))


def forall(s: Term) -> Term:
    """Quantify over the domain of the predicate s : alpha -> o."""
    ty = s.ty
    if type(ty) is not Fun or ty.cod != o:
        raise TypeError(f"forall needs a predicate, got {show_type(ty)}")
    return App(Ref(forall_const(ty.dom)), s)


def as_neg(t: Term) -> Term | None:
    if type(t) is App and type(t.fun) is Ref and t.fun.name == NOT:
        return t.arg
    return None


def as_imp(t: Term) -> tuple[Term, Term] | None:
    if (
        type(t) is App
        and type(t.fun) is App
        and type(t.fun.fun) is Ref
        and t.fun.fun.name == IMP
    ):
        return t.fun.arg, t.arg
    return None


def as_eq(t: Term) -> tuple[Type, Term, Term] | None:
    """Destructure an equation: returns (sigma, lhs, rhs)."""
    if (
        type(t) is App
        and type(t.fun) is App
        and type(t.fun.fun) is Ref
        and not t.fun.fun.name.is_var
        and t.fun.fun.name.ident == "="
    ):
        return t.fun.arg.ty, t.fun.arg, t.arg
    return None


def as_diseq(t: Term) -> tuple[Type, Term, Term] | None:
    s = as_neg(t)
    return as_eq(s) if s is not None else None


def as_forall(t: Term) -> tuple[Type, Term] | None:
    """Destructure a quantified formula: returns (alpha, predicate)."""
    if (
        type(t) is App
        and type(t.fun) is Ref
        and not t.fun.name.is_var
        and t.fun.name.ident == "forall"
    ):
        return t.fun.name.ty.dom.dom, t.arg
    return None


def is_var_ref(t: Term) -> bool:
    return type(t) is Ref and t.name.is_var


# ---------------------------------------------------------------------------
# Printing (concrete syntax shared with the problem-file grammar)


def show_type(ty: Type) -> str:
    if type(ty) is Base:
        return ty.name
    parts: list[str] = []
    while type(ty) is Fun:
        parts.append(show_type(ty.dom))
        ty = ty.cod
    parts.append(show_type(ty))
    return "(> " + " ".join(parts) + ")"


_DISPLAY_SCHEME = ("x", "y", "z", "u", "v", "w")


def _display_names(used: set[str]) -> Iterator[str]:
    for d in _DISPLAY_SCHEME:
        if d not in used:
            yield d
    i = 1
    while True:
        for d in _DISPLAY_SCHEME:
            c = f"{d}{i}"
            if c not in used:
                yield c
        i += 1


def show_term(t: Term) -> str:
    """Concrete syntax for t; reparses to exactly t when grammar-expressible.

    Bare quantifier applications (forall applied to a non-abstraction) have
    no grammar form and print as a loud (!forall ...) marker instead.
    """
    used = {n.ident for n in names(t)}

    def binder(env: tuple[str, ...]) -> str:
        for d in _display_names(used.union(env)):
            return d
        raise AssertionError

    def go(t: Term, env: tuple[str, ...]) -> str:
        if type(t) is Ref:
            return t.name.ident
        if type(t) is Bound:
            return env[-1 - t.index]
        if type(t) is Lam:
            x = binder(env)
            return f"(lam ({x} {show_type(t.dom)}) {go(t.body, env + (x,))})"
        head, args = spine(t)
        if type(head) is Ref and not head.name.is_var:
            n = head.name
            if n == NOT and len(args) == 1:
                return f"(not {go(args[0], env)})"
            if n == IMP and len(args) == 2:
                return f"(imp {go(args[0], env)} {go(args[1], env)})"
            if n.ident == "=" and len(args) == 2:
                return f"(= {go(args[0], env)} {go(args[1], env)})"
            if n.ident == "forall" and len(args) == 1:
                body = args[0]
                if type(body) is Lam:
                    x = binder(env)
                    return (
                        f"(forall ({x} {show_type(body.dom)}) "
                        f"{go(body.body, env + (x,))})"
                    )
                return f"(!forall {go(body, env)})"
            # Partially applied logical constant: not grammar-expressible.
            inner = " ".join(go(a, env) for a in args)
            return f"(!partial {n.ident}" + (f" {inner})" if inner else ")")
        parts = [go(head, env)] + [go(a, env) for a in args]
        return "(" + " ".join(parts) + ")"

    return go(t, ())
