'''
Pre-models: applicative structures with distinguished k, s, i, e and a decidable
(up to fuel) equality on elements and on polynomials over them.

Two base models ship here: the free pre-model over n generators, whose elements are
weak normal forms, and the lambda-beta model, whose elements are beta normal forms.
'''
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Union

from .common import (
    logger,
    DEFAULT_FUEL, DEFAULT_SEED,
    ForeignElement, IndeterminatePresent, OutOfGenerators,
    IND_OFFSET,
    Unknown, Verdict,
)
from .lam import LamTerm, Abs, LamApp, FreeVar, PRIM_TO_LAMBDA, beta_normalize, cl_to_lambda, lam_eq, show_lambda
from .report import SuiteReport
from .rewrite import ARITY, weak_normalize, cl_eq
from .terms import CLTerm, App, Prim, Ind, Gen, ElemRef, fold, fv, map_atoms, show, spine, Atom


@dataclass(frozen=True)
class Element:
    # name of the owning model; elements of different models never mix
    origin: str
    value: Any

    def __str__(self) -> str:
        return str(self.value)


class PreModel(ABC):
    name: str
    fuel: int

    def __init__(self, *, fuel: int = DEFAULT_FUEL) -> None:
        self.fuel = fuel

    def __repr__(self) -> str:
        return f'{type(self).__name__}({self.name})'

    def elem(self, value: Any) -> Element:
        return Element(origin=self.name, value=value)

    def check_owned(self, a: Any) -> Element:
        if not isinstance(a, Element) or a.origin != self.name:
            raise ForeignElement(f'{a!r} is not an element of {self.name}')
        return a

    @abstractmethod
    def app(self, a: Element, b: Element) -> Element:
        raise NotImplementedError

    @abstractmethod
    def constant(self, which: str) -> Element:
        raise NotImplementedError

    @property
    def k(self) -> Element:
        return self.constant('k')

    @property
    def s(self) -> Element:
        return self.constant('s')

    @property
    def i(self) -> Element:
        return self.constant('i')

    @property
    def e(self) -> Element:
        return self.constant('e')

    @abstractmethod
    def eq(self, a: Element, b: Element, fuel: int) -> Verdict:
        raise NotImplementedError

    @abstractmethod
    def poly_eq(self, t: CLTerm, u: CLTerm, fuel: int) -> Verdict:
        '''
        Polynomial congruence on terms whose Ind atoms are indeterminates over this model,
        Gen atoms are this model's generics and ElemRef atoms wrap this model's elements.
        '''
        raise NotImplementedError

    @abstractmethod
    def generic(self, j: int) -> Element:
        raise NotImplementedError

    def show(self, a: Element) -> str:
        return str(self.check_owned(a))

    def normal_form(self, t: CLTerm, fuel: int) -> Union[str, Unknown]:
        '''
        Printed normal form of a closed term, or the reason it could not be computed.
        '''
        a = eval_closed(self, t)
        # elements are kept normalized; a raw fallback means app ran out of fuel
        v = self.eq(a, a, fuel)
        if isinstance(v, Unknown):
            return v
        return self.show(a)


def eval_closed(model: PreModel, t: CLTerm) -> Element:
    '''
    Interpret a term without indeterminates as an element.
    '''
    free = fv(t)
    if len(free) > 0:
        raise IndeterminatePresent(f'{show(t)} mentions x{min(free)}')

    def leaf(a: Atom) -> Element:
        if isinstance(a, Prim):
            return model.constant(a.which)
        if isinstance(a, Gen):
            return model.generic(a.index)
        if isinstance(a, ElemRef):
            return model.check_owned(a.element)
        raise AssertionError(a)
    return fold(t, leaf, lambda _, f, a: model.app(f, a))


def available_generics(model: PreModel, upto: int) -> list[Gen]:
    '''
    Gen atoms g1..g<upto> the model can interpret, stopping at the first missing one.
    '''
    res: list[Gen] = []
    for j in range(1, upto + 1):
        try:
            model.generic(j)
        except OutOfGenerators:
            break
        res.append(Gen(j))
    return res


## free pre-model

class FreeCLModel(PreModel):
    '''
    Terms over k, s, i, e and generators g1..gn, modulo weak reduction.
    '''
    def __init__(self, n: int, *, fuel: int = DEFAULT_FUEL) -> None:
        super().__init__(fuel=fuel)
        assert n >= 0, n
        self.n = n
        self.name = f'free-cl:{n}'

    def _term(self, a: Element) -> CLTerm:
        return self.check_owned(a).value

    def app(self, a: Element, b: Element) -> Element:
        t = App(self._term(a), self._term(b))
        head, args = spine(t)
        if not (isinstance(head, Prim) and len(args) >= ARITY[head.which]):
            # nothing fires at the head, and both sides are already normal
            return self.elem(t)
        nf = weak_normalize(t, self.fuel)
        if isinstance(nf, Unknown):
            logger.debug(f'{self.name}: keeping {show(t)} unreduced ({nf})')
            return self.elem(t)
        return self.elem(nf)

    def constant(self, which: str) -> Element:
        return self.elem(Prim(which))

    def generic(self, j: int) -> Element:
        if not 1 <= j <= self.n:
            raise OutOfGenerators(f'{self.name} has generators g1..g{self.n}, asked for g{j}')
        return self.elem(Gen(j))

    def eq(self, a: Element, b: Element, fuel: int) -> Verdict:
        return cl_eq(self._term(a), self._term(b), fuel)

    def _inline(self, t: CLTerm) -> CLTerm:
        def go(a: Atom) -> CLTerm:
            if isinstance(a, ElemRef):
                return self._term(a.element)
            if isinstance(a, Gen) and a.index > self.n:
                raise OutOfGenerators(f'{self.name} has no g{a.index}')
            return a
        return map_atoms(t, go)

    def poly_eq(self, t: CLTerm, u: CLTerm, fuel: int) -> Verdict:
        return cl_eq(self._inline(t), self._inline(u), fuel)


## lambda-beta model

class LambdaBetaModel(PreModel):
    '''
    Closed lambda terms (plus free variables standing for generics) modulo beta.
    k, s, i, e are the usual combinators, e = \\x y. x y.
    '''
    name = 'lambda-beta'

    def _term(self, a: Element) -> LamTerm:
        return self.check_owned(a).value

    def app(self, a: Element, b: Element) -> Element:
        t = LamApp(self._term(a), self._term(b))
        if not isinstance(t.fun, Abs):
            return self.elem(t)
        nf = beta_normalize(t, self.fuel)
        if isinstance(nf, Unknown):
            logger.debug(f'{self.name}: keeping {show_lambda(t)} unreduced ({nf})')
            return self.elem(t)
        return self.elem(nf)

    def constant(self, which: str) -> Element:
        return self.elem(PRIM_TO_LAMBDA[which])

    def generic(self, j: int) -> Element:
        if not 1 <= j < IND_OFFSET:
            raise OutOfGenerators(f'{self.name} generics are v1..v{IND_OFFSET - 1}, asked for {j}')
        return self.elem(FreeVar(j))

    def eq(self, a: Element, b: Element, fuel: int) -> Verdict:
        return lam_eq(self._term(a), self._term(b), fuel)

    def _open(self, t: CLTerm, fuel: int) -> LamTerm:
        '''
        Translate a polynomial, normalizing its indeterminate-free applications bottom up.
        '''
        def leaf(a: Atom) -> tuple[LamTerm, bool]:
            return cl_to_lambda(a, elem_map=self._term), not isinstance(a, Ind)

        def node(_: App, fun: tuple[LamTerm, bool], arg: tuple[LamTerm, bool]) -> tuple[LamTerm, bool]:
            (f, fclosed), (a, aclosed) = fun, arg
            res = LamApp(f, a)
            if not (fclosed and aclosed):
                return res, False
            if not isinstance(f, Abs):
                return res, True
            nf = beta_normalize(res, fuel)
            # unreduced on Unknown, the final comparison reports it
            return (res if isinstance(nf, Unknown) else nf), True
        term, _ = fold(t, leaf, node)
        return term

    def poly_eq(self, t: CLTerm, u: CLTerm, fuel: int) -> Verdict:
        return lam_eq(self._open(t, fuel), self._open(u, fuel), fuel)

    def show(self, a: Element) -> str:
        return show_lambda(self._term(a))


def free_cl_model(n: int, *, fuel: int = DEFAULT_FUEL) -> FreeCLModel:
    return FreeCLModel(n, fuel=fuel)


def lambda_beta_model(*, fuel: int = DEFAULT_FUEL) -> LambdaBetaModel:
    return LambdaBetaModel(fuel=fuel)


def check_premodel_axioms(model: PreModel, fuel: int = DEFAULT_FUEL) -> SuiteReport:
    '''
    The four defining equations of a pre-model, as a suite report. They are read at the
    model's own constants and at its generic elements, falling back to indeterminates
    when the model runs out of generics.
    '''
    from .suites import GENERIC_INSTANCE, premodel_equations, run_equations
    generics = {g.index: ElemRef(model.generic(g.index)) for g in available_generics(model, 3)}

    def inst(a: Atom) -> CLTerm:
        if isinstance(a, Prim):
            return ElemRef(model.constant(a.which))
        if isinstance(a, Ind):
            return generics.get(a.index, a)
        return a
    equations = [
        e._replace(lhs=map_atoms(e.lhs, inst), rhs=map_atoms(e.rhs, inst))
        for e in premodel_equations(model, DEFAULT_SEED)
    ]
    return run_equations(model, 'premodel', equations, fuel=fuel, quantifier=GENERIC_INSTANCE)


def test_free_model() -> None:
    import pytest
    from .common import Equal, NotEqual
    from .terms import parse

    m = FreeCLModel(2)
    g1, g2 = m.generic(1), m.generic(2)
    assert m.app(m.app(m.k, g1), g2) == g1
    assert m.app(m.app(m.e, g1), g2) == m.app(g1, g2)
    assert m.eq(m.app(m.i, g1), g1, 100) == Equal()
    assert isinstance(m.eq(m.app(m.e, g1), g1, 100), NotEqual)
    with pytest.raises(OutOfGenerators):
        m.generic(3)

    # polynomials: e x1 and x1 differ, e g1 x1 and g1 x1 agree
    assert isinstance(m.poly_eq(parse('e x1'), parse('x1'), 100), NotEqual)
    assert m.poly_eq(App(ElemRef(m.app(m.e, g1)), parse('x1')), parse('g1 x1'), 100) == Equal()


def test_foreign_elements() -> None:
    import pytest
    a = FreeCLModel(1)
    b = FreeCLModel(2)
    with pytest.raises(ForeignElement):
        a.app(a.k, b.k)
    with pytest.raises(ForeignElement):
        LambdaBetaModel().eq(a.k, a.k, 10)


def test_eval_closed() -> None:
    import pytest
    from .terms import parse

    m = FreeCLModel(2)
    assert eval_closed(m, parse('s k k g1')) == m.generic(1)
    assert m.show(eval_closed(m, parse('s (k g1) i'))) == 's (k g1) i'
    with pytest.raises(IndeterminatePresent):
        eval_closed(m, parse('k x1'))
    with pytest.raises(OutOfGenerators):
        eval_closed(FreeCLModel(0), parse('g1'))


def test_lambda_beta_model() -> None:
    from .common import Equal
    from .terms import parse

    m = LambdaBetaModel()
    # extensional: e, s (k i) and i all agree, as do k and s (k k) i
    assert m.eq(m.e, eval_closed(m, parse('s (k i)')), 100) == Equal()
    assert m.eq(eval_closed(m, parse('e k')), m.k, 100) == Equal()
    assert m.show(m.k) == r'\x. \y. x'
    assert m.poly_eq(parse('e x1'), parse('s (k x1) i'), 100) == Equal()
    assert m.poly_eq(App(ElemRef(m.generic(3)), parse('x1')), parse('g3 x1'), 100) == Equal()


def test_normal_form() -> None:
    from .terms import parse
    assert FreeCLModel(1).normal_form(parse('s k k g1'), 100) == 'g1'
    assert LambdaBetaModel().normal_form(parse('s k k'), 100) == r'\x. x'
    m = FreeCLModel(0, fuel=50)
    assert isinstance(m.normal_form(parse('s i i (s i i)'), 50), Unknown)


def test_available_generics() -> None:
    assert available_generics(FreeCLModel(0), 2) == []
    assert available_generics(FreeCLModel(1), 2) == [Gen(1)]
    assert available_generics(LambdaBetaModel(), 2) == [Gen(1), Gen(2)]
    assert available_generics(free_cl_model(3), 5) == [Gen(1), Gen(2), Gen(3)]
    assert lambda_beta_model(fuel=5).fuel == 5


def test_generics_are_distinct() -> None:
    from .common import Equal, NotEqual
    for m in (FreeCLModel(3), LambdaBetaModel()):
        gs = [m.generic(j) for j in (1, 2, 3)]
        for n, a in enumerate(gs):
            for k, b in enumerate(gs):
                v = m.eq(a, b, 100)
                assert (v == Equal()) if n == k else isinstance(v, NotEqual), (m, n, k)


def test_premodel_axioms() -> None:
    from .report import EQUAL, FAILS, HOLDS, NOT_EQUAL

    class WrongE(FreeCLModel):
        # e behaves as k
        def constant(self, which: str) -> Element:
            return super().constant('k' if which == 'e' else which)

    for m in (FreeCLModel(3), FreeCLModel(1), LambdaBetaModel()):
        assert check_premodel_axioms(m, 100).summary.status == HOLDS, m

    r = check_premodel_axioms(WrongE(2), 100)
    assert r.summary.status == FAILS
    assert [e.verdict for e in r.equations] == [EQUAL, EQUAL, EQUAL, NOT_EQUAL]
    assert r.equations[3].id == 'e'


def test_deep_terms() -> None:
    from .common import Equal
    from .terms import parse
    text = 'g1 (' * 1200 + 'g1' + ')' * 1200
    m = FreeCLModel(1)
    a = eval_closed(m, parse(text))
    assert m.eq(a, a, 100) == Equal()
    assert m.normal_form(parse(text), 100) == text
    assert LambdaBetaModel().poly_eq(parse(text), parse('i ' + text), 100) == Equal()


def test_lambda_beta_poly_eq_shares_closed_parts() -> None:
    from .abstraction import DAG, eps, lam_multi
    from .common import Equal
    from .terms import app, x
    m = LambdaBetaModel()
    # eps 4 applied to x5, against its dag-abstracted unfolding
    xs = [x(i) for i in range(1, 5)]
    unfolded = lam_multi(DAG, [1, 2, 3, 4], app(x(5), *xs))
    assert m.poly_eq(App(eps(4), x(5)), unfolded, 10_000) == Equal()
