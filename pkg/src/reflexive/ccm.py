'''
Cartesian closed monoid structure on A*:

    a o b    = lam x. a (b x)
    I        = e i
    p, q     = lam x. x t, lam x. x f
    eps      = lam x. x t (x f)
    <a, b>   = lam x. [a x, b x]
    curry(a) = lam x y. a [x, y]

The structure maps always abstract with lam-dag; `mode` picks how t, f, [.,.] and
p, q, eps are abstracted.
'''
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .abstraction import DAG, Mode, abstractor, lam_dag, lam_multi, pairing
from .common import DEFAULT_FUEL, DEFAULT_SEED
from .models import Element, PreModel, eval_closed
from .report import SuiteReport
from .terms import CLTerm, App, E, I, ElemRef, Equation, app, fresh_index, x


class Parts(NamedTuple):
    unit: CLTerm
    p: CLTerm
    q: CLTerm
    eps: CLTerm
    tru: CLTerm
    fls: CLTerm
    pair: CLTerm


def parts_terms(mode: Mode = DAG) -> Parts:
    abstract = abstractor(mode)
    pr = pairing(mode)
    x1 = x(1)
    return Parts(
        unit=App(E, I),
        p=abstract(1, App(x1, pr.tru)),
        q=abstract(1, App(x1, pr.fls)),
        eps=abstract(1, App(App(x1, pr.tru), App(x1, pr.fls))),
        tru=pr.tru,
        fls=pr.fls,
        pair=pr.pair,
    )


def compose_term(a: CLTerm, b: CLTerm) -> CLTerm:
    j = fresh_index(a, b)
    return lam_dag(j, App(a, App(b, x(j))))


def pair_term(a: CLTerm, b: CLTerm, pair: CLTerm) -> CLTerm:
    j = fresh_index(a, b)
    return lam_dag(j, app(pair, App(a, x(j)), App(b, x(j))))


def curry_term(a: CLTerm, pair: CLTerm) -> CLTerm:
    j = fresh_index(a)
    return lam_multi(DAG, [j, j + 1], App(a, app(pair, x(j), x(j + 1))))


@dataclass(frozen=True)
class CcmContext:
    model: PreModel
    mode: Mode
    unit: Element
    p: Element
    q: Element
    eps: Element
    tru: Element
    fls: Element
    pair: Element

    def refs(self) -> Parts:
        '''
        The evaluated parts as atoms, for building terms over them.
        '''
        return Parts(*(ElemRef(getattr(self, name)) for name in Parts._fields))


def ccm_context(model: PreModel, mode: Mode = DAG) -> CcmContext:
    parts = parts_terms(mode)
    ev = lambda t: eval_closed(model, t)
    return CcmContext(
        model=model,
        mode=mode,
        **{name: ev(t) for name, t in parts._asdict().items()},
    )


def ccm_compose(ctx: CcmContext, a: Element, b: Element) -> Element:
    return eval_closed(ctx.model, compose_term(ElemRef(a), ElemRef(b)))


def ccm_pair(ctx: CcmContext, a: Element, b: Element) -> Element:
    return eval_closed(ctx.model, pair_term(ElemRef(a), ElemRef(b), ElemRef(ctx.pair)))


def ccm_lam(ctx: CcmContext, a: Element) -> Element:
    return eval_closed(ctx.model, curry_term(ElemRef(a), ElemRef(ctx.pair)))


def ccm_parts(ctx: CcmContext) -> tuple[Element, Element, Element, Element]:
    return ctx.unit, ctx.p, ctx.q, ctx.eps


def ccm_equations(ctx: CcmContext) -> list[Equation]:
    '''
    Monoid, pairing and closure laws over a, b, c taken from A* (a = e x1 etc).
    The structure elements enter as atoms, so the laws stay small.
    '''
    P = ctx.refs()
    a, b, c = (App(E, x(i)) for i in (1, 2, 3))
    o = compose_term
    pr = lambda u, v: pair_term(u, v, P.pair)
    cur = lambda u: curry_term(u, P.pair)
    return [
        Equation('assoc'     , o(o(a, b), c)                        , o(a, o(b, c))),
        Equation('unit-left' , o(P.unit, a)                         , a),
        Equation('unit-right', o(a, P.unit)                         , a),
        Equation('pair-p'    , o(P.p, pr(a, b))                     , a),
        Equation('pair-q'    , o(P.q, pr(a, b))                     , b),
        Equation('pair-comp' , o(pr(a, b), c)                       , pr(o(a, c), o(b, c))),
        Equation('eval-pair' , o(P.eps, pr(P.p, P.q))               , P.eps),
        Equation('beta'      , o(P.eps, pr(o(cur(a), P.p), P.q))    , o(a, pr(P.p, P.q))),
        Equation('curry-eval', o(cur(P.eps), cur(a))                , cur(a)),
        Equation('eta'       , cur(o(P.eps, pr(o(a, P.p), P.q)))    , o(cur(P.eps), a)),
    ]


def ccm_suite(ctx: CcmContext, fuel: int = DEFAULT_FUEL, seed: int = DEFAULT_SEED) -> SuiteReport:
    from .suites import GENERIC_INSTANCE, run_equations
    return run_equations(
        ctx.model, 'ccm', ccm_equations(ctx),
        fuel=fuel, seed=seed, quantifier=GENERIC_INSTANCE,
    )


def test_compose_lambda_beta() -> None:
    from .common import Equal
    from .models import LambdaBetaModel

    m = LambdaBetaModel()
    ctx = ccm_context(m)
    assert m.show(ccm_compose(ctx, ctx.unit, ctx.unit)) == r'\x. x'

    a = m.generic(1)
    ea = m.app(m.e, a)
    eb = m.app(m.e, m.generic(2))
    assert m.eq(ccm_compose(ctx, m.i, a), ea, 1000) == Equal()
    assert m.eq(ccm_compose(ctx, a, m.i), ea, 1000) == Equal()
    assert m.eq(ccm_compose(ctx, ctx.p, ccm_pair(ctx, ea, eb)), ea, 1000) == Equal()
    assert m.eq(ccm_compose(ctx, ctx.q, ccm_pair(ctx, ea, eb)), eb, 1000) == Equal()
    assert m.eq(ccm_compose(ctx, ctx.eps, ccm_pair(ctx, ctx.p, ctx.q)), ctx.eps, 1000) == Equal()
    la = ccm_lam(ctx, ea)
    assert m.eq(ccm_compose(ctx, ccm_lam(ctx, ctx.eps), la), la, 1000) == Equal()


def test_compose_free() -> None:
    from .common import NotEqual
    from .models import FreeCLModel

    m = FreeCLModel(2)
    ctx = ccm_context(m)
    g1, g2 = m.generic(1), m.generic(2)
    c = ccm_compose(ctx, g1, g2)
    assert str(c) == 'e (s (e (k g1)) (e g2))'
    assert isinstance(m.eq(c, m.app(g1, g2), 100), NotEqual)


def test_ccm_suite() -> None:
    from .models import FreeCLModel, LambdaBetaModel

    ctx = ccm_context(LambdaBetaModel())
    # structure elements stay atoms, far below the node cap
    for eq in ccm_equations(ctx):
        assert max(eq.lhs.size, eq.rhs.size) < 20_000, eq.id

    r = ccm_suite(ctx)
    assert len(r.equations) == 10
    assert r.summary.status == 'holds', r.summary

    r = ccm_suite(ccm_context(FreeCLModel(0)))
    assert r.summary.status == 'fails'
    assert 'unit-left' in r.summary.ids


def test_star_and_dag_parts_agree_up_to_sim1() -> None:
    from .common import Equal
    from .derivations import decide_sim1
    from .models import LambdaBetaModel
    from .abstraction import STAR

    m = LambdaBetaModel()
    star, dag = ccm_context(m, STAR), ccm_context(m, DAG)
    for name in ('p', 'q', 'eps', 'pair', 'fls'):
        assert decide_sim1(m, getattr(star, name), getattr(dag, name), 1000) == Equal(), name
