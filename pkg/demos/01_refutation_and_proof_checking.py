"""
Refuting a higher-order assumption set and checking the proof
=============================================================

A property p of predicates holds for f but fails for the pointwise
double negation of f.  Since not not (f x) collapses to f x, the two
predicates are the same function and the assumptions are contradictory.
Establishing that requires genuinely higher-order steps: functional and
boolean extensionality.
"""

from hotab import (
    Name, Refuted, app, branch_of, check_proof, fun, lam, neg,
    o, parse_proof, ref, refute, serialize_proof, show_term, sort,
)

# the signature: a sort a, a predicate f on a, a property p of predicates
a = sort("a")
f = Name("f", fun(a, o))
p = Name("p", fun(fun(a, o), o))
x = Name("x", a)

# the assumptions: p f, and not (p (lam x. not (not (f x))))
assumptions = (
    app(ref(p), ref(f)),
    neg(app(ref(p), lam(x, neg(neg(app(ref(f), ref(x))))))),
)
for s in assumptions:
    print("assume", show_term(s))

# search for a refutation; the router picks the right calculus by itself
verdict = refute(branch_of(*assumptions))
assert isinstance(verdict, Refuted)
print("\ncalculus used:", verdict.calculus)
print("rule applications:", dict(verdict.proof.rule_counts()))

# the proof serializes to a line-per-node text format ...
text = serialize_proof(verdict.proof)
print("\nproof file:")
print(text)

# ... which round-trips through the parser and replays against the
# original branch, so a skeptical reader never has to trust the search
from hotab.problems import Problem

problem = Problem(sorts=(a,), variables=(f, p, x), assumptions=assumptions)
reparsed = parse_proof(text, problem)
assert check_proof(branch_of(*assumptions), reparsed, calculus=verdict.calculus)
print("proof checks: yes")
