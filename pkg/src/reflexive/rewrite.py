'''
Weak reduction of CL terms: the generating equations of the polynomial congruence,
oriented left to right.

    k t u   -> t
    s t u v -> t v (u v)
    i t     -> t
    e t u   -> t u
    {a} {b} -> {a.b}     (element collapse, needs a model to compute a.b)

The system is orthogonal, so weak normal forms are unique.
'''
from __future__ import annotations

import random
from typing import Any, NamedTuple, Optional, Protocol, Union

from .common import (
    logger,
    Budget, Exhausted,
    DEFAULT_FUEL, DEFAULT_NODE_CAP,
    Unknown, Verdict, compare_normal_forms,
)
from .terms import CLTerm, App, Prim, ElemRef, app, spine


class Applicative(Protocol):
    # the only thing weak reduction needs from a model
    def app(self, a: Any, b: Any) -> Any: ...


ARITY = {
    'k': 2,
    's': 3,
    'i': 1,
    'e': 2,
}

RULE_NAMES = {
    'k': 'K-rule',
    's': 'S-rule',
    'i': 'I-rule',
    'e': 'E-rule',
}
ELEM_COLLAPSE = 'Elem-collapse'

Path = tuple[int, ...]  # 0 goes into the function, 1 into the argument


def _fire(which: str, args: list[CLTerm]) -> CLTerm:
    if which == 'k':
        a, _ = args
        return a
    if which == 's':
        a, b, c = args
        return App(App(a, c), App(b, c))
    if which == 'i':
        (a,) = args
        return a
    a, b = args
    return App(a, b)


def contract(t: CLTerm, model: Optional[Applicative] = None) -> Optional[CLTerm]:
    '''
    Contract t if t itself is a redex.
    '''
    head, args = spine(t)
    if isinstance(head, Prim) and len(args) == ARITY[head.which]:
        return _fire(head.which, args)
    if model is not None and isinstance(t, App) and isinstance(t.fun, ElemRef) and isinstance(t.arg, ElemRef):
        return ElemRef(model.app(t.fun.element, t.arg.element))
    return None


def rule_of(t: CLTerm, model: Optional[Applicative] = None) -> Optional[str]:
    head, args = spine(t)
    if isinstance(head, Prim) and len(args) == ARITY[head.which]:
        return RULE_NAMES[head.which]
    if model is not None and isinstance(t, App) and isinstance(t.fun, ElemRef) and isinstance(t.arg, ElemRef):
        return ELEM_COLLAPSE
    return None


def redex_paths(t: CLTerm, model: Optional[Applicative] = None) -> list[Path]:
    '''
    All redex positions, leftmost-outermost first.
    '''
    res: list[Path] = []
    stack: list[tuple[CLTerm, Path]] = [(t, ())]
    while stack:
        cur, path = stack.pop()
        if rule_of(cur, model) is not None:
            res.append(path)
        if isinstance(cur, App):
            stack.append((cur.arg, path + (1,)))
            stack.append((cur.fun, path + (0,)))
    return res


def contract_at(t: CLTerm, path: Path, model: Optional[Applicative] = None) -> CLTerm:
    if len(path) == 0:
        res = contract(t, model)
        assert res is not None, (t, 'not a redex')
        return res
    assert isinstance(t, App), (t, path)
    if path[0] == 0:
        return App(contract_at(t.fun, path[1:], model), t.arg)
    return App(t.fun, contract_at(t.arg, path[1:], model))


def weak_step(t: CLTerm, model: Optional[Applicative] = None) -> Optional[CLTerm]:
    '''
    Contract the leftmost-outermost redex, None if t is a weak normal form.
    '''
    res = contract(t, model)
    if res is not None:
        return res
    if isinstance(t, App):
        fun = weak_step(t.fun, model)
        if fun is not None:
            return App(fun, t.arg)
        arg = weak_step(t.arg, model)
        if arg is not None:
            return App(t.fun, arg)
    return None


class _Stuck(NamedTuple):
    # a head that can't fire, waiting for its arguments to be normalized left to right
    head: CLTerm
    args: list[CLTerm]
    done: list[CLTerm]


def _weak(t: CLTerm, model: Optional[Applicative], budget: Budget) -> CLTerm:
    stuck: list[_Stuck] = []
    while True:
        head, args = spine(t)
        if isinstance(head, Prim) and len(args) >= ARITY[head.which]:
            n = ARITY[head.which]
            t = app(_fire(head.which, args[:n]), *args[n:])
            budget.spend(t.size)
            continue
        if len(args) > 0:
            stuck.append(_Stuck(head, args, []))
            t = args[0]
            continue

        res = head
        while len(stuck) > 0:
            top = stuck[-1]
            top.done.append(res)
            if len(top.done) == 1 and model is not None and isinstance(top.head, ElemRef) and isinstance(res, ElemRef):
                stuck.pop()
                t = app(ElemRef(model.app(top.head.element, res.element)), *top.args[1:])
                budget.spend(t.size)
                break
            if len(top.done) < len(top.args):
                t = top.args[len(top.done)]
                break
            stuck.pop()
            res = app(top.head, *top.done)
        else:
            return res


def weak_normalize(
        t: CLTerm,
        fuel: int = DEFAULT_FUEL,
        model: Optional[Applicative] = None,
        *,
        node_cap: int = DEFAULT_NODE_CAP,
) -> Union[CLTerm, Unknown]:
    # same contraction order as iterating weak_step, without re-walking the term each time
    budget = Budget(fuel=fuel, node_cap=node_cap)
    try:
        budget.check_size(t.size)
        return _weak(t, model, budget)
    except Exhausted as e:
        logger.debug(f'weak normalization gave up after {budget.steps} steps: {e.unknown}')
        return e.unknown


def random_normalize(
        t: CLTerm,
        rng: random.Random,
        fuel: int = DEFAULT_FUEL,
        model: Optional[Applicative] = None,
) -> Union[CLTerm, Unknown]:
    '''
    Contract a uniformly chosen redex at every step.
    '''
    for _ in range(fuel):
        paths = redex_paths(t, model)
        if len(paths) == 0:
            return t
        t = contract_at(t, rng.choice(paths), model)
    if len(redex_paths(t, model)) == 0:
        return t
    return Unknown('fuel', fuel)


def cl_eq(
        t: CLTerm,
        u: CLTerm,
        fuel: int = DEFAULT_FUEL,
        model: Optional[Applicative] = None,
        *,
        node_cap: int = DEFAULT_NODE_CAP,
) -> Verdict:
    left = weak_normalize(t, fuel, model, node_cap=node_cap)
    if isinstance(left, Unknown):
        return left
    right = weak_normalize(u, fuel, model, node_cap=node_cap)
    return compare_normal_forms(left, right)


def test_weak_step() -> None:
    from .terms import parse
    assert weak_step(parse('s k k g1')) == parse('k g1 (k g1)')
    assert weak_step(parse('e g1 g2')) == parse('g1 g2')
    assert weak_step(parse('g1')) is None
    # outermost first
    assert weak_step(parse('k (i g1) (i g2)')) == parse('i g1')
    # leftmost when nothing is outermost
    assert weak_step(parse('g1 (i g2) (i g3)')) == parse('g1 g2 (i g3)')
    # exact arity: the inner k g1 g2 is the redex
    assert weak_step(parse('k g1 g2 g3')) == parse('g1 g3')


def test_redex_paths() -> None:
    from .terms import parse
    t = parse('g1 (i g2) (k (i g3) g1)')
    assert redex_paths(t) == [(0, 1), (1,), (1, 0, 1)]
    assert contract_at(t, (1, 0, 1)) == parse('g1 (i g2) (k g3 g1)')
    assert redex_paths(parse('s k')) == []


def test_weak_normalize() -> None:
    from .terms import parse
    assert weak_normalize(parse('s k k g1')) == parse('g1')
    assert weak_normalize(parse('s (k g1) i g2')) == parse('g1 g2')
    assert weak_normalize(parse('s i i (s i i)'), 20) == Unknown('fuel', 20)
    # fuel counts contractions exactly
    assert weak_normalize(parse('s k k g1'), 2) == parse('g1')
    assert weak_normalize(parse('s k k g1'), 1) == Unknown('fuel', 1)


def test_weak_normalize_size_cap() -> None:
    from .common import SIZE
    from .terms import parse
    # an oversized input is rejected before any contraction
    assert weak_normalize(parse('g1 g2 g1 g2'), node_cap=3) == Unknown(SIZE, 3)
    assert weak_normalize(parse('g1 g2 g1'), node_cap=3) == parse('g1 g2 g1')


def test_deep_terms() -> None:
    from .common import Equal
    from .terms import I, g
    t: CLTerm = g(1)
    u: CLTerm = g(1)
    for _ in range(1200):
        t = App(g(1), t)
        u = App(g(1), App(I, u))
    assert cl_eq(t, t) == Equal()
    assert cl_eq(u, t) == Equal()
    assert weak_normalize(u) == t


def test_weak_normalize_matches_weak_step() -> None:
    from .terms import random_term, K, S, I, E, g, x
    rng = random.Random(1)
    atoms = [K, S, I, E, g(1), g(2), x(1)]
    for _ in range(200):
        t = random_term(rng, atoms, 5)
        nf = weak_normalize(t, 300)
        cur: Optional[CLTerm] = t
        steps = 0
        last = t
        while cur is not None and steps <= 300:
            last = cur
            cur = weak_step(cur)
            steps += 1
        if isinstance(nf, Unknown):
            continue
        assert cur is None
        assert last == nf


def test_cl_eq() -> None:
    from .common import Equal, NotEqual
    from .terms import parse
    assert cl_eq(parse('e g1'), parse('g1')) == NotEqual(parse('e g1'), parse('g1'))
    assert cl_eq(parse('i g1'), parse('g1')) == Equal()
    assert cl_eq(parse('s k k x1'), parse('i x1')) == Equal()
    assert isinstance(cl_eq(parse('s i i (s i i)'), parse('g1'), 50), Unknown)
    assert isinstance(cl_eq(parse('g1'), parse('s i i (s i i)'), 50), Unknown)


def test_normal_forms_unique() -> None:
    from .terms import random_term, K, S, I, E, g, x
    rng = random.Random(2)
    atoms = [K, S, I, E, g(1), g(2), x(1), x(2)]
    checked = 0
    for _ in range(150):
        t = random_term(rng, atoms, 5)
        a = random_normalize(t, random.Random(rng.random()), 500)
        b = random_normalize(t, random.Random(rng.random()), 500)
        if isinstance(a, Unknown) or isinstance(b, Unknown):
            continue
        assert a == b
        assert a == weak_normalize(t)
        checked += 1
    assert checked > 90


def test_weak_reduction_is_beta_sound() -> None:
    from .common import Equal, NotEqual
    from .lam import cl_to_lambda, lam_eq
    from .terms import random_term, K, S, I, E, g, x
    rng = random.Random(3)
    atoms = [K, S, I, E, g(1), g(2), x(1)]
    equal = 0
    for _ in range(150):
        t = random_term(rng, atoms, 4)
        t2 = weak_step(t)
        if t2 is None:
            continue
        v = lam_eq(cl_to_lambda(t), cl_to_lambda(t2), 2000)
        assert not isinstance(v, NotEqual), (t, t2)
        if v == Equal():
            equal += 1

        nf = weak_normalize(t, 2000)
        if not isinstance(nf, Unknown):
            assert not isinstance(lam_eq(cl_to_lambda(t), cl_to_lambda(nf), 2000), NotEqual)
    assert equal > 30


def test_verdicts_monotone() -> None:
    from .common import NotEqual
    from .terms import random_term, K, S, I, E, g, x
    rng = random.Random(4)
    atoms = [K, S, I, E, g(1), x(1)]
    for _ in range(100):
        t = random_term(rng, atoms, 4)
        u = random_term(rng, atoms, 4)
        v = cl_eq(t, u, 200)
        if isinstance(v, Unknown):
            continue
        assert cl_eq(t, u, 2000) == v
        if isinstance(v, NotEqual):
            assert v.left != v.right


def test_elem_collapse() -> None:
    from .terms import parse, ElemRef

    class Concat:
        def app(self, a: Any, b: Any) -> Any:
            return f'({a}{b})'

    m = Concat()
    t = App(App(ElemRef('a'), ElemRef('b')), parse('i g1'))
    assert weak_step(t) == App(App(ElemRef('a'), ElemRef('b')), parse('g1'))
    assert weak_step(t, m) == App(ElemRef('(ab)'), parse('i g1'))
    assert weak_normalize(t, model=m) == App(ElemRef('(ab)'), parse('g1'))
    # an argument reducing to an element collapses as well
    assert weak_normalize(App(ElemRef('a'), App(parse('i'), ElemRef('c'))), model=m) == ElemRef('(ac)')
    assert rule_of(App(ElemRef('a'), ElemRef('b')), m) == ELEM_COLLAPSE
    assert rule_of(parse('k g1 g2')) == 'K-rule'
