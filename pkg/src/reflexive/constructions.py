'''
Pre-models derived from a base one: polynomials A[x1..xn], the quotient bar-A1
(application a.b = s a b modulo ~1) and A* (the image of e), plus the
isomorphism/retraction roundtrips between them and model selector parsing.

Derived models never rewrite on their own: every equality question is lowered
to the base model's eq/poly_eq.
'''
from __future__ import annotations

import random
from typing import Mapping, Optional, Union

from .abstraction import STAR, lam_star, pairing
from .common import (
    logger,
    DEFAULT_FUEL, DEFAULT_SEED,
    UnassignedIndeterminate, UnknownModel,
    Equal, Unknown, Verdict,
)
from .derivations import decide_sim1
from .models import Element, PreModel, FreeCLModel, LambdaBetaModel, available_generics, eval_closed
from .report import SuiteReport
from .rewrite import weak_normalize
from .suites import GENERIC_INSTANCE, run_equations
from .terms import (
    CLTerm, Atom, App, Prim, Ind, Gen, ElemRef, Equation,
    K, S, I, E,
    app, fv, map_atoms, random_term, show, subst_many, x,
)


class PolyModel(PreModel):
    '''
    A[x1..xn]: terms over the base elements and x1..xn modulo the polynomial congruence.
    '''
    def __init__(self, base: PreModel, n: int) -> None:
        super().__init__(fuel=base.fuel)
        assert n >= 0, n
        self.base = base
        self.n = n
        self.name = f'poly:{base.name}:{n}'

    def _term(self, a: Element) -> CLTerm:
        return self.check_owned(a).value

    def embed(self, a: Element) -> Element:
        return self.elem(ElemRef(self.base.check_owned(a)))

    def app(self, a: Element, b: Element) -> Element:
        return self.elem(App(self._term(a), self._term(b)))

    def constant(self, which: str) -> Element:
        return self.elem(Prim(which))

    def generic(self, j: int) -> Element:
        if j <= self.n:
            return self.elem(Ind(j))
        return self.embed(self.base.generic(j - self.n))

    def eq(self, a: Element, b: Element, fuel: int) -> Verdict:
        return self.base.poly_eq(self._term(a), self._term(b), fuel)

    def lower(self, t: CLTerm) -> CLTerm:
        '''
        Our indeterminates go after the base's own x1..xn.
        '''
        def go(a: Atom) -> CLTerm:
            if isinstance(a, Ind):
                return Ind(self.n + a.index)
            if isinstance(a, ElemRef):
                return self._term(a.element)
            if isinstance(a, Gen):
                return self._term(self.generic(a.index))
            return a
        return map_atoms(t, go)

    def poly_eq(self, t: CLTerm, u: CLTerm, fuel: int) -> Verdict:
        return self.base.poly_eq(self.lower(t), self.lower(u), fuel)

    def show(self, a: Element) -> str:
        return show(self._term(a))

    def normal_form(self, t: CLTerm, fuel: int) -> Union[str, Unknown]:
        a = eval_closed(self, t)
        nf = weak_normalize(self._term(a), fuel, self.base)
        if isinstance(nf, Unknown):
            return nf
        return show(nf)


class BarA1Model(PreModel):
    '''
    Base elements under a .1 b = s a b, compared by ~1.
    '''
    def __init__(self, base: PreModel) -> None:
        super().__init__(fuel=base.fuel)
        self.base = base
        self.name = f'bar1:{base.name}'

    def _value(self, a: Element) -> Element:
        return self.check_owned(a).value

    def app(self, a: Element, b: Element) -> Element:
        base = self.base
        return self.elem(base.app(base.app(base.s, self._value(a)), self._value(b)))

    def constant(self, which: str) -> Element:
        return self.elem(self.base.app(self.base.k, self.base.constant(which)))

    def generic(self, j: int) -> Element:
        return self.elem(self.base.generic(j))

    def eq(self, a: Element, b: Element, fuel: int) -> Verdict:
        return decide_sim1(self.base, self._value(a), self._value(b), fuel)

    def lower(self, t: CLTerm) -> CLTerm:
        '''
        t |-> t x1 pushed through: (t .1 u) x1 = t x1 (u x1), c1 x1 = c.
        An indeterminate y_i only ever occurs as y_i x1, which becomes x_{i+1}.
        '''
        x1 = Ind(1)

        def go(a: Atom) -> CLTerm:
            if isinstance(a, Ind):
                return Ind(a.index + 1)
            if isinstance(a, ElemRef):
                return App(ElemRef(self._value(a.element)), x1)
            if isinstance(a, Gen):
                return App(a, x1)
            return a
        return map_atoms(t, go)

    def poly_eq(self, t: CLTerm, u: CLTerm, fuel: int) -> Verdict:
        return self.base.poly_eq(self.lower(t), self.lower(u), fuel)

    def show(self, a: Element) -> str:
        return self.base.show(self._value(a))


class AStarModel(PreModel):
    '''
    A* = {e a}: a <> b = e (s a b), constants e (k c).
    '''
    def __init__(self, base: PreModel, fuel: int = DEFAULT_FUEL) -> None:
        super().__init__(fuel=base.fuel)
        self.base = base
        self.name = f'astar:{base.name}'
        x1 = Ind(1)
        self.e_idempotent = base.poly_eq(App(E, App(E, x1)), App(E, x1), fuel)
        if self.e_idempotent != Equal():
            logger.warning(f'{base.name}: e (e x) = e x gives {self.e_idempotent}, {self.name} is not closed under e')

    def _value(self, a: Element) -> Element:
        return self.check_owned(a).value

    def coerce(self, a: Element) -> Element:
        return self.elem(self.base.app(self.base.e, self.base.check_owned(a)))

    def app(self, a: Element, b: Element) -> Element:
        base = self.base
        return self.coerce(base.app(base.app(base.s, self._value(a)), self._value(b)))

    def constant(self, which: str) -> Element:
        return self.coerce(self.base.app(self.base.k, self.base.constant(which)))

    def generic(self, j: int) -> Element:
        return self.coerce(self.base.generic(j))

    def eq(self, a: Element, b: Element, fuel: int) -> Verdict:
        return self.base.eq(self._value(a), self._value(b), fuel)

    def lower(self, t: CLTerm) -> CLTerm:
        if isinstance(t, App):
            return App(E, app(S, self.lower(t.fun), self.lower(t.arg)))
        if isinstance(t, (Ind, Gen)):
            return App(E, t)
        if isinstance(t, Prim):
            return ElemRef(self._value(self.constant(t.which)))
        return ElemRef(self._value(t.element))

    def poly_eq(self, t: CLTerm, u: CLTerm, fuel: int) -> Verdict:
        return self.base.poly_eq(self.lower(t), self.lower(u), fuel)

    def show(self, a: Element) -> str:
        return self.base.show(self._value(a))


def poly_model(base: PreModel, n: int) -> PolyModel:
    return PolyModel(base, n)


def bar_a1(base: PreModel) -> BarA1Model:
    return BarA1Model(base)


def a_star(base: PreModel, fuel: int = DEFAULT_FUEL) -> AStarModel:
    return AStarModel(base, fuel)


def eval_poly(base: PreModel, t: CLTerm, assignment: Mapping[int, Element]) -> Element:
    '''
    The homomorphism fixing the base and sending x_i to assignment[i].
    '''
    missing = fv(t) - assignment.keys()
    if len(missing) > 0:
        raise UnassignedIndeterminate(f'no value for x{min(missing)} in {show(t)}')
    closed = subst_many(t, {i: ElemRef(base.check_owned(a)) for i, a in assignment.items()})
    return eval_closed(base, closed)


## roundtrips

def iso_bar_roundtrip(base: PreModel, t: CLTerm, fuel: int = DEFAULT_FUEL) -> tuple[Verdict, Verdict]:
    '''
    g(f(t)) = t in A[x] and f(g(a)) ~1 a for a = f(t), where f(t) = lam* x.t and g(a) = a x.
    '''
    assert fv(t) <= {1}, show(t)
    f_t = lam_star(1, t)
    there = base.poly_eq(App(f_t, Ind(1)), t, fuel)
    return there, iso_bar_element_roundtrip(base, eval_closed(base, f_t), fuel)


def iso_bar_element_roundtrip(base: PreModel, a: Element, fuel: int = DEFAULT_FUEL) -> Verdict:
    '''
    f(g(a)) ~1 a for any element a of the base.
    '''
    back = eval_closed(base, lam_star(1, App(ElemRef(base.check_owned(a)), Ind(1))))
    return decide_sim1(base, back, a, fuel)


def _atoms(base: PreModel, indeterminates: int) -> list[CLTerm]:
    return [K, S, I, E, *available_generics(base, 2), *(x(i) for i in range(1, indeterminates + 1))]


def iso_bar_report(
        base: PreModel,
        fuel: int = DEFAULT_FUEL,
        samples: int = 50,
        seed: int = DEFAULT_SEED,
) -> SuiteReport:
    rng = random.Random(seed)
    x1 = Ind(1)
    eqs: list[Equation] = []
    for n in range(samples):
        t = random_term(rng, _atoms(base, 1), 4)
        eqs.append(Equation(f'gf-{n:03d}', App(lam_star(1, t), x1), t))
        a = random_term(rng, _atoms(base, 0), 4)
        # f(g(a)) ~1 a, decided through a x1
        eqs.append(Equation(f'fg-{n:03d}', App(lam_star(1, App(a, x1)), x1), App(a, x1)))
    return run_equations(base, 'iso-bar', eqs, fuel=fuel, seed=seed, quantifier=GENERIC_INSTANCE)


def retract_xy_to_x(
        base: PreModel,
        fuel: int = DEFAULT_FUEL,
        samples: int = 50,
        seed: int = DEFAULT_SEED,
) -> SuiteReport:
    '''
    A[x,y] -> A[x] -> A[x,y] with f(x) = x t, f(y) = x f, g(x) = [x, y].
    '''
    p = pairing(STAR)
    x1, x2 = Ind(1), Ind(2)

    def f(t: CLTerm) -> CLTerm:
        return subst_many(t, {1: App(x1, p.tru), 2: App(x1, p.fls)})

    def g(t: CLTerm) -> CLTerm:
        return subst_many(t, {1: app(p.pair, x1, x2)})

    rng = random.Random(seed)
    terms: list[CLTerm] = [x1, x2, *available_generics(base, 1)]
    terms.extend(random_term(rng, _atoms(base, 2), 4) for _ in range(samples))
    eqs = [Equation(f'xy-{n:03d}', g(f(t)), t) for n, t in enumerate(terms)]
    return run_equations(base, 'retract-xy', eqs, fuel=fuel, seed=seed, quantifier=GENERIC_INSTANCE)


def clamp(t: CLTerm, n: int) -> CLTerm:
    '''
    x_i |-> x_min(n,i), and x_i |-> i when n = 0.
    '''
    return subst_many(t, {i: Ind(min(n, i)) if n > 0 else I for i in fv(t)})


def retract_fragment_X_to_xn(
        base: PreModel,
        n: int,
        m: int,
        fuel: int = DEFAULT_FUEL,
        samples: int = 50,
        seed: int = DEFAULT_SEED,
) -> SuiteReport:
    '''
    x1..xn embeds into the x1..xm fragment of A[X] and clamping maps it back.
    '''
    assert 0 <= n <= m, (n, m)
    rng = random.Random(seed)
    eqs: list[Equation] = []
    for k in range(samples):
        t = random_term(rng, _atoms(base, n), 4)
        eqs.append(Equation(f'back-{k:03d}', clamp(t, n), t))
        u = random_term(rng, _atoms(base, m), 4)
        eqs.append(Equation(f'idem-{k:03d}', clamp(clamp(u, n), n), clamp(u, n)))
    return run_equations(
        base, 'retract-fragment', eqs, fuel=fuel, seed=seed, quantifier=GENERIC_INSTANCE,
        note=f'X cut down to x1..x{m}',
    )


## model selectors

def resolve_model(selector: str, fuel: int = DEFAULT_FUEL) -> PreModel:
    '''
    free-cl:<n> | lambda-beta | poly:<selector>:<n> | bar1:<selector> | astar:<selector>
    '''
    def count(text: str) -> int:
        try:
            n = int(text)
        except ValueError as e:
            raise UnknownModel(f'{selector!r}: expected a count, got {text!r}') from e
        if n < 0:
            raise UnknownModel(f'{selector!r}: negative count {n}')
        return n

    model: Optional[PreModel] = None
    if selector == 'lambda-beta':
        model = LambdaBetaModel(fuel=fuel)
    elif selector.startswith('free-cl:'):
        model = FreeCLModel(count(selector.removeprefix('free-cl:')), fuel=fuel)
    elif selector.startswith('poly:'):
        inner, _, n = selector.removeprefix('poly:').rpartition(':')
        if inner == '':
            raise UnknownModel(f'{selector!r}: expected poly:<model>:<n>')
        model = PolyModel(resolve_model(inner, fuel), count(n))
    elif selector.startswith('bar1:'):
        model = BarA1Model(resolve_model(selector.removeprefix('bar1:'), fuel))
    elif selector.startswith('astar:'):
        model = AStarModel(resolve_model(selector.removeprefix('astar:'), fuel), fuel)
    if model is None:
        raise UnknownModel(f'{selector!r}: expected free-cl:<n>, lambda-beta, poly:<model>:<n>, bar1:<model> or astar:<model>')
    logger.debug(f'resolved {selector} to {model!r}')
    return model


def test_resolve_model() -> None:
    import pytest
    assert resolve_model('free-cl:2').name == 'free-cl:2'
    assert resolve_model('lambda-beta').name == 'lambda-beta'
    assert resolve_model('poly:poly:free-cl:1:2:3').name == 'poly:poly:free-cl:1:2:3'
    m = resolve_model('bar1:poly:lambda-beta:1')
    assert isinstance(m, BarA1Model) and isinstance(m.base, PolyModel)
    for bad in ['free-cl', 'free-cl:x', 'free-cl:-1', 'poly:free-cl:1', 'bar2:free-cl:1', 'astar:', 'lambda']:
        with pytest.raises(UnknownModel):
            resolve_model(bad)


def test_poly_model() -> None:
    from .common import NotEqual
    from .terms import parse

    free = FreeCLModel(1)
    m = poly_model(free, 1)
    ev = lambda s: eval_closed(m, parse(s))
    assert m.eq(ev('k g1 g2'), ev('g1'), 100) == Equal()
    assert m.generic(1).value == Ind(1)
    assert isinstance(m.eq(ev('e g1'), ev('g1'), 100), NotEqual)
    # g1 of the polynomial model is x1; g2 is the base's g1
    assert m.eq(ev('s k k g2'), m.embed(free.generic(1)), 100) == Equal()

    lb = poly_model(LambdaBetaModel(), 2)
    assert lb.eq(eval_closed(lb, parse('e g1 g2')), eval_closed(lb, parse('g1 g2')), 100) == Equal()

    zero = poly_model(free, 0)
    a, b = free.app(free.e, free.generic(1)), free.generic(1)
    assert zero.eq(zero.embed(a), zero.embed(b), 100) == free.eq(a, b, 100)


def test_poly_of_poly() -> None:
    from .terms import random_term, g

    base = FreeCLModel(2)
    nested = poly_model(poly_model(base, 1), 2)
    flat = poly_model(base, 3)
    rng = random.Random(0)
    atoms = [K, S, I, E, g(1), g(2), g(3), g(4), g(5)]
    agree = 0
    for _ in range(100):
        t = random_term(rng, atoms, 4)
        u = random_term(rng, atoms, 4)
        # nested g1,g2 are its own x1,x2 and g3 is the inner x1; flat numbers them x1,x2,x3 the other way round
        v1 = nested.eq(eval_closed(nested, t), eval_closed(nested, u), 500)
        swap = {1: 2, 2: 3, 3: 1, 4: 4, 5: 5}
        relabel = lambda c: map_atoms(c, lambda a: Gen(swap[a.index]) if isinstance(a, Gen) else a)
        v2 = flat.eq(eval_closed(flat, relabel(t)), eval_closed(flat, relabel(u)), 500)
        if isinstance(v1, Unknown) or isinstance(v2, Unknown):
            continue
        assert type(v1) == type(v2), (show(t), show(u))
        agree += 1
    assert agree > 80


def test_eval_poly() -> None:
    import pytest
    from .terms import parse

    free = FreeCLModel(0)
    assert eval_poly(free, parse('x1 x2'), {1: free.k, 2: free.s}) == free.elem(parse('k s'))
    lb = LambdaBetaModel()
    assert lb.eq(eval_poly(lb, parse('e x1'), {1: lb.k}), lb.k, 100) == Equal()
    with pytest.raises(UnassignedIndeterminate):
        eval_poly(free, parse('x1'), {})


def test_bar_a1() -> None:
    from .common import NotEqual

    free = FreeCLModel(2)
    m = bar_a1(free)
    g1, g2 = m.generic(1), m.generic(2)
    assert m.eq(m.app(m.app(m.k, g1), g2), g1, 100) == Equal()
    ka = m.elem(free.app(free.k, free.generic(1)))
    assert m.eq(m.app(ka, m.elem(free.i)), g1, 100) == Equal()
    assert isinstance(m.eq(g1, g2, 100), NotEqual)


def test_bar_agrees_with_poly() -> None:
    from .terms import random_term

    free = FreeCLModel(2)
    bar = bar_a1(free)
    poly = poly_model(free, 1)
    rng = random.Random(1)
    atoms = [K, S, I, E, Gen(1), Gen(2), x(1)]
    checked = 0
    for _ in range(100):
        t = random_term(rng, atoms, 4)
        u = random_term(rng, atoms, 4)
        a = bar.elem(eval_closed(free, lam_star(1, t)))
        b = bar.elem(eval_closed(free, lam_star(1, u)))
        lift = lambda c: subst_many(c, {1: Gen(1)})
        relabel = lambda c: map_atoms(c, lambda z: Gen(z.index + 1) if isinstance(z, Gen) else z)
        v1 = bar.eq(a, b, 1000)
        v2 = poly.eq(eval_closed(poly, lift(relabel(t))), eval_closed(poly, lift(relabel(u))), 1000)
        if isinstance(v1, Unknown) or isinstance(v2, Unknown):
            continue
        assert type(v1) == type(v2), (show(t), show(u))
        checked += 1
    assert checked > 80


def test_a_star() -> None:
    from .common import NotEqual

    lb = LambdaBetaModel()
    m = a_star(lb)
    assert m.e_idempotent == Equal()
    a = m.generic(1)
    # e (e a) = e a
    assert m.eq(m.coerce(a.value), a, 100) == Equal()

    free = FreeCLModel(1)
    fm = a_star(free)
    assert isinstance(fm.e_idempotent, NotEqual)
    assert fm.generic(1).value == free.app(free.e, free.generic(1))


def test_a_star_agrees_with_bar() -> None:
    from .terms import random_term

    lb = LambdaBetaModel()
    star, bar = a_star(lb), bar_a1(lb)
    rng = random.Random(2)
    atoms = [K, S, I, E, Gen(1), Gen(2)]
    for _ in range(100):
        a = eval_closed(lb, random_term(rng, atoms, 3))
        b = eval_closed(lb, random_term(rng, atoms, 3))
        v1 = star.eq(star.coerce(a), star.coerce(b), 1000)
        v2 = bar.eq(bar.elem(a), bar.elem(b), 1000)
        assert type(v1) == type(v2)


def test_iso_bar_roundtrip() -> None:
    from .common import NotEqual
    from .terms import parse, random_term

    free = FreeCLModel(3)
    assert iso_bar_roundtrip(free, parse('x1 x1')) == (Equal(), Equal())
    assert iso_bar_roundtrip(free, parse('g1')) == (Equal(), Equal())

    rng = random.Random(3)
    atoms = [K, S, I, E, Gen(1), Gen(2), Gen(3), x(1)]
    for _ in range(200):
        t = random_term(rng, atoms, 4)
        there, back = iso_bar_roundtrip(free, t)
        assert there == Equal() or isinstance(there, Unknown), show(t)
        assert back == Equal() or isinstance(back, Unknown), show(t)

    assert iso_bar_element_roundtrip(free, free.generic(1)) == Equal()
    verdicts = [
        iso_bar_element_roundtrip(free, eval_closed(free, random_term(rng, atoms[:-1], 4)))
        for _ in range(200)
    ]
    assert not any(isinstance(v, NotEqual) for v in verdicts)
    assert sum(v == Equal() for v in verdicts) > 100

    report = iso_bar_report(free, samples=100, seed=4)
    assert report.summary.status in ('holds', 'inconclusive'), report.summary
    assert all(e.verdict != 'not-equal' for e in report.equations)


def test_retractions() -> None:
    from .terms import parse

    assert clamp(parse('x1 x3'), 1) == parse('x1 x1')
    assert clamp(parse('g1 x1'), 0) == parse('g1 i')

    free = FreeCLModel(2)
    r = retract_xy_to_x(free, samples=100)
    assert r.summary.status != 'fails', r.summary
    assert [e.verdict for e in r.equations[:3]] == ['equal'] * 3
    assert sum(e.verdict == 'unknown' for e in r.equations) < 3
    for n in range(0, 4):
        for m in range(n, 6):
            r = retract_fragment_X_to_xn(free, n, m, samples=20, seed=n * 10 + m)
            assert r.summary.status != 'fails', (n, m, r.summary)
