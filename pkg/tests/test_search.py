"""Search engine: saturation, verdicts, proof checking, and evidence."""

import itertools

import pytest

from hotab.branch import FormulaKind, branch_of
from hotab.fragments import FragmentViolation
from hotab.kernel import (
    Name,
    app,
    diseq,
    eq,
    forall,
    fun,
    lam,
    neg,
    o,
    ref,
    sort,
)
from hotab.normalize import normalize
from hotab.rules import RuleId, applicable_efo, applicable_stt
from hotab.search import (
    Proof,
    Refuted,
    Satisfiable,
    SearchConfig,
    Unknown,
    check_proof,
    is_evident,
    refute,
    route_calculus,
    saturate_efo,
)
from hotab.semantics import check_model, enumerate_models, eval_term

from helpers import Gen

a = sort("a")
b = sort("b")


def V(ident, ty):
    return Name(ident, ty)


def running_example():
    """{p f, not (p (lam x. not not (f x)))} — jointly unsatisfiable."""
    f = V("f", fun(a, o))
    p = V("p", fun(fun(a, o), o))
    x = V("x", a)
    s1 = app(ref(p), ref(f))
    s2 = neg(app(ref(p), lam(x, neg(neg(app(ref(f), ref(x)))))))
    return [normalize(s1), normalize(s2)]


RUNNING_COUNTS = {
    "mate": 3,
    "fun-ext": 1,
    "bool-ext": 1,
    "double-neg": 2,
    "decompose": 2,
}


# ---------------------------------------------------------------------------
# End-to-end refutations


def test_running_example_refuted_in_every_mode():
    forms = running_example()
    for mode in ("auto", "efo", "stt"):
        v = refute(forms, SearchConfig(calculus=mode))
        assert isinstance(v, Refuted)
        assert v.calculus == ("stt" if mode == "stt" else "efo")
        assert v.proof.rule_counts() == RUNNING_COUNTS
        assert check_proof(forms, v.proof, calculus=v.calculus)
    # the first applicable instance on the initial branch is the mate pair
    v = refute(forms)
    assert v.proof.instance.rule is RuleId.MATE
    assert v.proof.size() == sum(RUNNING_COUNTS.values())


def test_running_example_deterministic():
    forms = running_example()
    v1 = refute(forms)
    v2 = refute(forms)
    assert v1.proof == v2.proof


def test_identity_vs_constant_function_refuted():
    y = V("y", o)
    x = V("x", o)
    t = normalize(eq(lam(x, ref(x)), lam(x, ref(y))))
    v = refute([t])
    assert isinstance(v, Refuted) and v.calculus == "stt"
    assert v.proof.rule_counts() == {
        "fun-eq": 2,
        "bool-eq": 3,
        "mate": 4,
        "double-neg": 1,
    }
    assert check_proof([t], v.proof)


def test_confrontation_closes_equation_against_disequation():
    x, y = V("x", a), V("y", a)
    forms = [eq(ref(x), ref(y)), diseq(ref(x), ref(y))]
    v = refute(forms)
    assert isinstance(v, Refuted)
    assert v.proof.rule_counts() == {"confront": 1, "decompose": 2}
    assert check_proof(forms, v.proof)


def test_negated_forall_closes_by_reflexivity():
    x = V("x", a)
    t = neg(forall(lam(x, eq(ref(x), ref(x)))))
    v = refute([t])
    assert isinstance(v, Refuted) and v.calculus == "efo"
    assert v.proof.rule_counts() == {"forall-neg": 1, "decompose": 1}
    assert check_proof([t], v.proof)


def test_forall_instantiates_with_existing_variable():
    p = V("p", fun(a, o))
    x, y = V("x", a), V("y", a)
    forms = [forall(lam(x, app(ref(p), ref(x)))), neg(app(ref(p), ref(y)))]
    v = refute(forms)
    assert isinstance(v, Refuted)
    assert v.proof.rule_counts() == {"forall-inst": 1, "mate": 1, "decompose": 1}
    insts = [
        n.instance.inst
        for n in v.proof.nodes()
        if n.instance.rule is RuleId.FORALL_INST
    ]
    assert insts == [ref(y)]  # reused the free variable, introduced nothing


def test_forall_instantiates_every_discriminating_term():
    p = V("p", fun(a, o))
    x, y, z = V("x", a), V("y", a), V("z", a)
    forms = [
        forall(lam(x, app(ref(p), ref(x)))),
        diseq(ref(y), ref(z)),
        neg(app(ref(p), ref(y))),
    ]
    v = refute(forms)
    assert isinstance(v, Refuted)
    assert v.proof.rule_counts() == {"forall-inst": 2, "mate": 1, "decompose": 1}
    insts = {
        n.instance.inst
        for n in v.proof.nodes()
        if n.instance.rule is RuleId.FORALL_INST
    }
    assert insts == {ref(y), ref(z)}


def test_forall_with_no_constraints_yields_singleton_model():
    x, y = V("x", a), V("y", a)
    t = forall(lam(x, eq(ref(x), ref(y))))
    v = refute([t])
    assert isinstance(v, Satisfiable)
    assert v.model.frame.sort_sizes[a] == 1
    assert eval_term(v.model, t) == 1
    assert check_model(v.model, v.branch.formulas)


def test_empty_input_is_satisfiable():
    v = refute([])
    assert isinstance(v, Satisfiable)
    assert v.model.frame.sort_sizes == {}


def test_refute_accepts_branch_input():
    forms = running_example()
    v = refute(branch_of(*forms))
    assert isinstance(v, Refuted)
    assert v.proof.rule_counts() == RUNNING_COUNTS


# ---------------------------------------------------------------------------
# Routing


def test_route_calculus():
    f, g = V("f", fun(a, a)), V("g", fun(a, a))
    x, y = V("x", a), V("y", o)
    quant = forall(lam(x, eq(ref(x), ref(x))))
    funeq = eq(ref(f), ref(g))
    assert route_calculus(branch_of(quant)) == "efo"
    assert route_calculus(branch_of(diseq(ref(f), ref(g)))) == "efo"
    assert route_calculus(branch_of(funeq)) == "stt"
    assert route_calculus(branch_of(neg(neg(ref(y))))) == "efo"
    assert route_calculus(branch_of()) == "efo"
    with pytest.raises(FragmentViolation):
        route_calculus(branch_of(quant, funeq))


def test_forced_calculus_rejects_foreign_members():
    x = V("x", a)
    quant = forall(lam(x, eq(ref(x), ref(x))))
    with pytest.raises(FragmentViolation):
        refute([quant], SearchConfig(calculus="stt"))
    f, g = V("f", fun(a, a)), V("g", fun(a, a))
    with pytest.raises(FragmentViolation):
        refute([eq(ref(f), ref(g))], SearchConfig(calculus="efo"))


# ---------------------------------------------------------------------------
# Budgets and inconclusive saturation


def test_unknown_when_functional_equations_survive():
    f, g = V("f", fun(a, a)), V("g", fun(a, a))
    forms = [eq(ref(f), ref(g))]
    v = refute(forms, SearchConfig(fuel_schedule=(1, 2)))
    assert isinstance(v, Unknown)
    assert v.reason.startswith("saturation left functional equations")
    rep = is_evident(forms)
    assert rep.scope == "stt" and rep.bounded and rep.evident
    assert "bounded" in rep.describe()


def test_node_budget_exhaustion():
    v = refute(running_example(), SearchConfig(max_nodes=1))
    assert isinstance(v, Unknown)
    assert "node budget" in v.reason


def test_timeout_exhaustion():
    v = refute(running_example(), SearchConfig(timeout=0.0))
    assert isinstance(v, Unknown)
    assert v.reason == "timeout"


def test_search_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(calculus="classical")
    with pytest.raises(ValueError):
        SearchConfig(fuel_schedule=())
    with pytest.raises(ValueError):
        SearchConfig(fuel_schedule=(2, 1))
    with pytest.raises(ValueError):
        SearchConfig(fuel_schedule=(1, 1))
    with pytest.raises(ValueError):
        SearchConfig(fuel_schedule=(0, 1))


# ---------------------------------------------------------------------------
# Eager closing


def test_eager_close_complement():
    y = V("y", o)
    forms = [neg(ref(y)), neg(neg(ref(y)))]
    lazy = refute(forms)
    assert lazy.proof.rule_counts() == {"double-neg": 1, "mate": 1}
    eager = refute(forms, SearchConfig(eager_close=True))
    assert eager.proof.rule_counts() == {"close-compl": 1}
    assert check_proof(forms, eager.proof, eager=True)
    assert not check_proof(forms, eager.proof, eager=False)


def test_eager_close_reflexivity():
    f, x = V("f", fun(a, a)), V("x", a)
    forms = [diseq(app(ref(f), ref(x)), app(ref(f), ref(x)))]
    lazy = refute(forms)
    assert lazy.proof.rule_counts() == {"decompose": 2}
    eager = refute(forms, SearchConfig(eager_close=True))
    assert eager.proof.rule_counts() == {"close-refl": 1}
    assert check_proof(forms, eager.proof, eager=True)
    assert not check_proof(forms, eager.proof, eager=False)


# ---------------------------------------------------------------------------
# Proof objects and proof checking


def test_proof_arity_mismatch_rejected_at_construction():
    forms = running_example()
    v = refute(forms)
    root = v.proof.instance
    with pytest.raises(ValueError):
        Proof(root, ())  # the mate instance has one alternative


def test_check_proof_rejects_foreign_branch():
    forms = running_example()
    v = refute(forms)
    other = [forms[0]]  # second assumption missing: premises unavailable
    assert not check_proof(other, v.proof)


def test_check_proof_rejects_wrong_calculus():
    y, x = V("y", o), V("x", o)
    t = normalize(eq(lam(x, ref(x)), lam(x, ref(y))))
    v = refute([t])
    assert check_proof([t], v.proof, calculus="stt")
    assert not check_proof([t], v.proof, calculus="efo")


def test_check_proof_permits_redundant_steps():
    # re-deriving an already-present conclusion is wasteful but sound, and
    # the checker cares about soundness only
    forms = running_example()
    v = refute(forms)
    padded = Proof(v.proof.instance, (v.proof,))
    assert check_proof(forms, padded)


def test_check_proof_rejects_tampered_instance():
    import dataclasses

    forms = running_example()
    v = refute(forms)
    # fabricated closing leaf: its premise is on no branch of this tableau
    y = V("stray", a)
    fake_leaf = Proof(
        dataclasses.replace(
            v.proof.instance, rule=RuleId.DECOMPOSE, premises=(diseq(ref(y), ref(y)),)
        ),
        (v.proof,),
    )
    assert not check_proof(forms, fake_leaf)
    # duplicated premise: the pair no longer has complementary polarity
    twisted = dataclasses.replace(
        v.proof.instance, premises=(forms[0], forms[0])
    )
    assert not check_proof(forms, Proof(twisted, v.proof.children))


def test_saturate_efo_wrapper():
    p, y = V("p", fun(a, o)), V("y", a)
    status, payload = saturate_efo([app(ref(p), ref(y))])
    assert status == "open"
    assert is_evident(payload).evident
    status, proof = saturate_efo(running_example())
    assert status == "closed"
    assert check_proof(running_example(), proof, calculus="efo")


# ---------------------------------------------------------------------------
# Evidence


def test_evident_set_golden_example():
    f = V("f", fun(a, o))
    p = V("p", fun(fun(a, o), o))
    x = V("x", a)
    flip = lam(x, neg(app(ref(f), ref(x))))
    fx = app(ref(f), ref(x))
    forms = [
        app(ref(p), ref(f)),
        neg(app(ref(p), flip)),
        diseq(ref(f), flip),
        diseq(fx, neg(fx)),
        neg(fx),
    ]
    rep = is_evident(forms)
    assert rep.scope == "efo" and rep.evident and not rep.bounded
    assert rep.violations == ()
    v = refute(forms)
    assert isinstance(v, Satisfiable)
    assert check_model(v.model, forms)


def test_not_evident_constant_predicate_needs_default_instance():
    x, y = V("x", a), V("y", o)
    from hotab.kernel import imp

    t = forall(lam(x, neg(imp(ref(y), ref(y)))))
    rep = is_evident([t])
    assert not rep.evident
    assert [w.condition for w in rep.violations] == ["forall-inst-default"]
    v = refute([t])  # the body is contradictory, so the input refutes
    assert isinstance(v, Refuted)


def test_evidence_names_missing_discriminating_instance():
    p = V("p", fun(a, o))
    x, y, z = V("x", a), V("y", a), V("z", a)
    br = branch_of(
        forall(lam(x, app(ref(p), ref(x)))),
        diseq(ref(y), ref(z)),
        app(ref(p), ref(y)),
    )
    rep = is_evident(br)
    assert not rep.evident
    assert [w.condition for w in rep.violations] == ["forall-inst"]
    done = br.add(app(ref(p), ref(z)))
    assert is_evident(done).evident


def test_evidence_scope_gates():
    x = V("x", a)
    quant = forall(lam(x, eq(ref(x), ref(x))))
    with pytest.raises(FragmentViolation):
        is_evident([quant], scope="stt")
    f, g = V("f", fun(a, a)), V("g", fun(a, a))
    with pytest.raises(FragmentViolation):
        is_evident([eq(ref(f), ref(g))], scope="efo")


def test_closed_branches_are_never_evident():
    x = V("x", o)
    rep = is_evident([ref(x), neg(ref(x))])
    assert not rep.evident
    assert [w.condition for w in rep.violations] == ["mate"]
    y = V("y", a)
    rep = is_evident([diseq(ref(y), ref(y))])
    assert not rep.evident
    assert [w.condition for w in rep.violations] == ["decompose"]


def test_evident_iff_no_applicable_instance_restricted():
    agree = 0
    for seed in range(140):
        g = Gen(seed + 9000)
        forms = [normalize(g.efo_formula(2, quasi=True)) for _ in range(2)]
        br = branch_of(*forms)
        ev = is_evident(br, scope="efo").evident
        assert ev == (applicable_efo(br) == [] and not br.is_closed)
        agree += 1
    assert agree == 140


def test_evident_iff_no_applicable_instance_unrestricted():
    for seed in range(140):
        g = Gen(seed + 11000)
        forms = [normalize(g.formula(2)) for _ in range(2)]
        br = branch_of(*forms)
        ev = is_evident(br, scope="stt", fuel=2).evident
        assert ev == (applicable_stt(br, fuel=2) == [] and not br.is_closed)


def test_open_saturations_are_evident_and_models_check():
    import hotab.search as search

    refuted = satisfiable = 0
    cfg = SearchConfig(max_nodes=3000, timeout=5.0)
    for seed in range(80):
        g = Gen(seed + 13000)
        forms = [normalize(g.efo_formula(2, quasi=True)) for _ in range(2)]
        v = refute(forms, cfg)
        if isinstance(v, Refuted):
            refuted += 1
            assert check_proof(forms, v.proof, calculus="efo")
            assert (
                next(enumerate_models(forms, max_size=2), None) is None
            ), f"seed {seed}: refuted input has a model"
        elif isinstance(v, Satisfiable):
            satisfiable += 1
            assert check_model(v.model, forms)
            rep = is_evident(v.branch)
            assert rep.evident and not rep.bounded
    assert refuted >= 10 and satisfiable >= 10


def test_unsatisfiable_random_instances_refute():
    # formula & its negation-at-the-model level: s together with not s
    hits = 0
    cfg = SearchConfig(max_nodes=3000, timeout=5.0)
    for seed in range(60):
        g = Gen(seed + 17000)
        s = normalize(g.efo_formula(2, quasi=False))
        v = refute([s, neg(s)], cfg)
        if isinstance(v, Unknown):
            continue
        assert isinstance(v, Refuted), f"seed {seed}: {s} with its negation"
        hits += 1
    assert hits >= 40
