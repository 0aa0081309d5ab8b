'''
Explicit derivation certificates for the polynomial congruence (application is
plain juxtaposition) and for the quotient congruence ~1 (application is a.b = s a b),
their checker, s-expression codec, and the ~1 decision procedure.

Certificates are only checked, never searched for.
'''
from __future__ import annotations

from dataclasses import dataclass
import random
import re
from typing import Callable, Iterator, Literal, Optional, Sequence, Union

from .common import (
    DEFAULT_FUEL,
    IndeterminatePresent, InvalidNode,
    Verdict,
)
from .models import Element, PreModel
from .terms import CLTerm, App, ElemRef, Ind, K, S, I, E, app, fv, parse, show, elements


Kind = Literal['poly', 'sim1']
POLY: Kind = 'poly'
SIM1: Kind = 'sim1'


def dot1(a: CLTerm, b: CLTerm) -> CLTerm:
    '''
    Application of the quotient structure: a .1 b = s a b
    '''
    return app(S, a, b)


def _inj(a: CLTerm, b: CLTerm, model: Optional[PreModel]) -> CLTerm:
    if model is not None and isinstance(a, ElemRef) and isinstance(b, ElemRef):
        return ElemRef(model.app(a.element, b.element))
    return App(a, b)


Shape = Callable[[Sequence[CLTerm], Optional[PreModel]], tuple[CLTerm, CLTerm]]


def _poly_inj(args: Sequence[CLTerm], model: Optional[PreModel]) -> tuple[CLTerm, CLTerm]:
    a, b = args
    if model is None or not isinstance(a, ElemRef) or not isinstance(b, ElemRef):
        raise ValueError('polyInj relates model elements only')
    return App(a, b), _inj(a, b, model)


RULES: dict[Kind, dict[str, tuple[int, Shape]]] = {
    POLY: {
        'polyK'  : (2, lambda a, m: (app(K, a[0], a[1]), a[0])),
        'polyS'  : (3, lambda a, m: (app(S, a[0], a[1], a[2]), app(a[0], a[2], App(a[1], a[2])))),
        'polyI'  : (1, lambda a, m: (App(I, a[0]), a[0])),
        'polyE'  : (2, lambda a, m: (app(E, a[0], a[1]), App(a[0], a[1]))),
        'polyInj': (2, _poly_inj),
    },
    SIM1: {
        'quoK'  : (2, lambda a, m: (dot1(dot1(App(K, K), a[0]), a[1]), a[0])),
        'quoS'  : (3, lambda a, m: (dot1(dot1(dot1(App(K, S), a[0]), a[1]), a[2]), dot1(dot1(a[0], a[2]), dot1(a[1], a[2])))),
        'quoI'  : (1, lambda a, m: (dot1(App(K, I), a[0]), a[0])),
        'quoE'  : (2, lambda a, m: (dot1(dot1(App(K, E), a[0]), a[1]), dot1(a[0], a[1]))),
        'quoInj': (2, lambda a, m: (dot1(App(K, a[0]), App(K, a[1])), App(K, _inj(a[0], a[1], m)))),
        'quoEta': (1, lambda a, m: (dot1(App(K, a[0]), I), a[0])),
    },
}


## derivation trees; every node carries the pair it claims to conclude

@dataclass(frozen=True)
class Base:
    rule: str
    args: tuple[CLTerm, ...]
    lhs: CLTerm
    rhs: CLTerm


@dataclass(frozen=True)
class Refl:
    term: CLTerm
    lhs: CLTerm
    rhs: CLTerm


@dataclass(frozen=True)
class Sym:
    child: Derivation
    lhs: CLTerm
    rhs: CLTerm


@dataclass(frozen=True)
class Trans:
    left: Derivation
    right: Derivation
    lhs: CLTerm
    rhs: CLTerm


@dataclass(frozen=True)
class AppCong:
    fun: Derivation
    arg: Derivation
    lhs: CLTerm
    rhs: CLTerm


Derivation = Union[Base, Refl, Sym, Trans, AppCong]
# same tree shapes, different base rules and application
PolyDerivation = Derivation
Sim1Derivation = Derivation


def _app_for(kind: Kind) -> Callable[[CLTerm, CLTerm], CLTerm]:
    return App if kind == POLY else dot1


## builders, always producing well-formed nodes

def base(kind: Kind, rule: str, *args: CLTerm, model: Optional[PreModel] = None) -> Base:
    arity, shape = RULES[kind][rule]
    assert len(args) == arity, (rule, args)
    lhs, rhs = shape(args, model)
    return Base(rule=rule, args=tuple(args), lhs=lhs, rhs=rhs)


def refl(t: CLTerm) -> Refl:
    return Refl(term=t, lhs=t, rhs=t)


def sym(d: Derivation) -> Sym:
    return Sym(child=d, lhs=d.rhs, rhs=d.lhs)


def trans(d1: Derivation, d2: Derivation) -> Trans:
    assert d1.rhs == d2.lhs, (show(d1.rhs), show(d2.lhs))
    return Trans(left=d1, right=d2, lhs=d1.lhs, rhs=d2.rhs)


def cong(kind: Kind, d1: Derivation, d2: Derivation) -> AppCong:
    ap = _app_for(kind)
    return AppCong(fun=d1, arg=d2, lhs=ap(d1.lhs, d2.lhs), rhs=ap(d1.rhs, d2.rhs))


## checking

def _terms(d: Derivation) -> Iterator[CLTerm]:
    yield d.lhs
    yield d.rhs
    if isinstance(d, Base):
        yield from d.args
    elif isinstance(d, Refl):
        yield d.term


def _check(kind: Kind, d: Derivation, path: tuple[int, ...], model: Optional[PreModel]) -> tuple[CLTerm, CLTerm]:
    if kind == SIM1:
        for t in _terms(d):
            if len(fv(t)) > 0:
                raise IndeterminatePresent(f'{"/".join(map(str, path)) or "root"}: {show(t)}')

    def bad(reason: str) -> InvalidNode:
        return InvalidNode(path, reason)

    if isinstance(d, Base):
        rules = RULES[kind]
        if d.rule not in rules:
            raise bad(f'{d.rule} is not a {kind} rule')
        arity, shape = rules[d.rule]
        if len(d.args) != arity:
            raise bad(f'{d.rule} takes {arity} terms, got {len(d.args)}')
        try:
            expected = shape(d.args, model)
        except ValueError as e:
            raise bad(str(e)) from e
        concl = expected
    elif isinstance(d, Refl):
        concl = (d.term, d.term)
    elif isinstance(d, Sym):
        a, b = _check(kind, d.child, path + (0,), model)
        concl = (b, a)
    elif isinstance(d, Trans):
        a, b = _check(kind, d.left, path + (0,), model)
        b2, c = _check(kind, d.right, path + (1,), model)
        if b != b2:
            raise bad(f'middle terms differ: {show(b)} vs {show(b2)}')
        concl = (a, c)
    elif isinstance(d, AppCong):
        a1, b1 = _check(kind, d.fun, path + (0,), model)
        a2, b2 = _check(kind, d.arg, path + (1,), model)
        ap = _app_for(kind)
        concl = (ap(a1, a2), ap(b1, b2))
    else:
        raise bad(f'unexpected node {d!r}')

    if (d.lhs, d.rhs) != concl:
        raise bad(f'claims ({show(d.lhs)}, {show(d.rhs)}) but the rule gives ({show(concl[0])}, {show(concl[1])})')
    return concl


def check_poly_derivation(d: PolyDerivation, model: Optional[PreModel] = None) -> tuple[CLTerm, CLTerm]:
    return _check(POLY, d, (), model)


def check_sim1_derivation(d: Sim1Derivation, model: Optional[PreModel] = None) -> tuple[CLTerm, CLTerm]:
    return _check(SIM1, d, (), model)


def decide_sim1(model: PreModel, a: Element, b: Element, fuel: int = DEFAULT_FUEL) -> Verdict:
    '''
    a ~1 b iff a x ≈ b x for a fresh indeterminate x.
    '''
    x1 = Ind(1)
    return model.poly_eq(App(ElemRef(a), x1), App(ElemRef(b), x1), fuel)


## s-expressions: (trans (base polyK "x1" "g1") (refl "x1"))

def dump_derivation(d: Derivation) -> str:
    def q(t: CLTerm) -> str:
        assert len(elements(t)) == 0, 'element references have no text form'
        return f'"{show(t)}"'

    if isinstance(d, Base):
        return '(' + ' '.join(['base', d.rule, *map(q, d.args)]) + ')'
    if isinstance(d, Refl):
        return f'(refl {q(d.term)})'
    if isinstance(d, Sym):
        return f'(sym {dump_derivation(d.child)})'
    if isinstance(d, Trans):
        return f'(trans {dump_derivation(d.left)} {dump_derivation(d.right)})'
    return f'(cong {dump_derivation(d.fun)} {dump_derivation(d.arg)})'


_SEXP = re.compile(r'\s*(?:(?P<open>\()|(?P<close>\))|"(?P<term>[^"]*)"|(?P<sym>[A-Za-z]+))')

SExp = Union[str, CLTerm, list]


def _read_sexp(text: str) -> SExp:
    pos = 0
    stack: list[list] = [[]]
    while True:
        m = _SEXP.match(text, pos)
        if m is None:
            if text[pos:].strip() != '':
                raise ValueError(f'bad s-expression at {pos}: {text[pos:pos + 20]!r}')
            break
        pos = m.end()
        if m.group('open') is not None:
            stack.append([])
        elif m.group('close') is not None:
            if len(stack) == 1:
                raise ValueError(f'unbalanced ) at {pos}')
            done = stack.pop()
            stack[-1].append(done)
        elif m.group('term') is not None:
            stack[-1].append(parse(m.group('term')))
        else:
            stack[-1].append(m.group('sym'))
    if len(stack) != 1 or len(stack[0]) != 1:
        raise ValueError('expected exactly one s-expression')
    return stack[0][0]


def load_derivation(text: str, kind: Kind, model: Optional[PreModel] = None) -> Derivation:
    def term(e: SExp) -> CLTerm:
        if isinstance(e, (str, list)):
            raise ValueError(f'expected a quoted term, got {e!r}')
        return e

    def build(e: SExp) -> Derivation:
        if not isinstance(e, list) or len(e) == 0 or not isinstance(e[0], str):
            raise ValueError(f'expected a node, got {e!r}')
        head, *rest = e
        if head == 'base':
            rule, *terms = rest
            if not isinstance(rule, str) or rule not in RULES[kind]:
                raise ValueError(f'unknown {kind} rule {rule!r}')
            arity, _ = RULES[kind][rule]
            if len(terms) != arity:
                raise ValueError(f'{rule} takes {arity} terms, got {len(terms)}')
            return base(kind, rule, *map(term, terms), model=model)
        if head == 'refl':
            (t,) = rest
            return refl(term(t))
        if head == 'sym':
            (c,) = rest
            return sym(build(c))
        if head == 'trans':
            l, r = map(build, rest)
            if l.rhs != r.lhs:
                raise ValueError(f'trans: {show(l.rhs)} does not meet {show(r.lhs)}')
            return trans(l, r)
        if head == 'cong':
            f, a = rest
            return cong(kind, build(f), build(a))
        raise ValueError(f'unknown node {head!r}')
    return build(_read_sexp(text))


## random well-formed derivations

def random_derivation(
        kind: Kind,
        rng: random.Random,
        atoms: Sequence[CLTerm],
        depth: int,
        *,
        model: Optional[PreModel] = None,
) -> Derivation:
    from .terms import random_term

    def term() -> CLTerm:
        return random_term(rng, atoms, 2)

    def go(depth: int) -> Derivation:
        choice = rng.randrange(5) if depth > 0 else rng.randrange(2)
        if choice == 0:
            return refl(term())
        if choice == 1:
            rules = [r for r in RULES[kind] if r != 'polyInj']
            rule = rng.choice(rules)
            arity, _ = RULES[kind][rule]
            return base(kind, rule, *(term() for _ in range(arity)), model=model)
        if choice == 2:
            return sym(go(depth - 1))
        if choice == 3:
            d = go(depth - 1)
            other = rng.choice([sym(d), refl(d.rhs)])
            return trans(d, other)
        return cong(kind, go(depth - 1), go(depth - 1))

    return go(depth)


def random_poly_derivation(rng: random.Random, atoms: Sequence[CLTerm], depth: int) -> PolyDerivation:
    return random_derivation(POLY, rng, atoms, depth)


def random_sim1_derivation(rng: random.Random, atoms: Sequence[CLTerm], depth: int) -> Sim1Derivation:
    return random_derivation(SIM1, rng, atoms, depth)


def test_check_poly() -> None:
    import pytest
    from .terms import parse

    assert check_poly_derivation(base(POLY, 'polyI', parse('g1'))) == (parse('i g1'), parse('g1'))
    d = trans(base(POLY, 'polyK', parse('x1'), parse('g1')), refl(parse('x1')))
    assert check_poly_derivation(d) == (parse('k x1 g1'), parse('x1'))

    child = base(POLY, 'polyI', parse('g1'))
    broken = Sym(child=child, lhs=child.lhs, rhs=child.rhs)
    with pytest.raises(InvalidNode) as e:
        check_poly_derivation(broken)
    assert e.value.path == ()

    # the first bad node is reported, children before parents
    bad_base = Base(rule='polyK', args=(parse('g1'), parse('g2')), lhs=parse('k g1 g2'), rhs=parse('g2'))
    with pytest.raises(InvalidNode) as e:
        check_poly_derivation(cong(POLY, refl(parse('g3')), sym(bad_base)))
    assert e.value.path == (1, 0)

    with pytest.raises(InvalidNode):
        check_poly_derivation(Base(rule='quoEta', args=(parse('g1'),), lhs=parse('s (k g1) i'), rhs=parse('g1')))

    with pytest.raises(InvalidNode):
        check_poly_derivation(Trans(left=refl(parse('g1')), right=refl(parse('g2')), lhs=parse('g1'), rhs=parse('g2')))


def test_check_sim1() -> None:
    import pytest
    from .terms import parse

    assert check_sim1_derivation(base(SIM1, 'quoEta', parse('g1'))) == (parse('s (k g1) i'), parse('g1'))
    assert check_sim1_derivation(base(SIM1, 'quoInj', K, S)) == (parse('s (k k) (k s)'), parse('k (k s)'))
    assert check_sim1_derivation(base(SIM1, 'quoK', parse('g1'), parse('g2'))) == (parse('s (s (k k) g1) g2'), parse('g1'))

    with pytest.raises(IndeterminatePresent):
        check_sim1_derivation(refl(parse('x1')))
    with pytest.raises(IndeterminatePresent):
        check_sim1_derivation(sym(base(SIM1, 'quoI', parse('g1 x2'))))

    d = cong(SIM1, base(SIM1, 'quoI', parse('g1')), refl(parse('g2')))
    assert check_sim1_derivation(d) == (parse('s (s (k i) g1) g2'), parse('s g1 g2'))


def test_inj_rules_use_the_model() -> None:
    import pytest
    from .models import FreeCLModel
    from .terms import parse

    m = FreeCLModel(2)
    k, s = ElemRef(m.k), ElemRef(m.s)
    assert check_poly_derivation(base(POLY, 'polyInj', k, s, model=m), m) == (App(k, s), ElemRef(m.app(m.k, m.s)))
    _, rhs = check_sim1_derivation(base(SIM1, 'quoInj', k, s, model=m), m)
    assert rhs == App(K, ElemRef(m.app(m.k, m.s)))

    with pytest.raises(ValueError):
        base(POLY, 'polyInj', parse('k'), parse('s'))


def test_decide_sim1() -> None:
    from .common import Equal, NotEqual
    from .models import FreeCLModel, eval_closed
    from .terms import parse

    m = FreeCLModel(2)
    ev = lambda s: eval_closed(m, parse(s))
    assert decide_sim1(m, ev('e g1'), ev('g1')) == Equal()
    assert isinstance(decide_sim1(m, ev('k'), ev('s')), NotEqual)
    assert decide_sim1(m, ev('s k k'), ev('i')) == Equal()


def test_decide_sim1_matches_application() -> None:
    from .models import FreeCLModel, eval_closed
    from .rewrite import cl_eq
    from .terms import Gen, random_term, x

    m = FreeCLModel(3)
    rng = random.Random(11)
    atoms = [K, S, I, E, Gen(1), Gen(2), Gen(3)]
    for _ in range(200):
        a, b = (eval_closed(m, random_term(rng, atoms, 3)) for _ in range(2))
        expected = cl_eq(App(a.value, x(1)), App(b.value, x(1)), DEFAULT_FUEL)
        assert decide_sim1(m, a, b, DEFAULT_FUEL) == expected, (a, b)


def test_sexp_roundtrip() -> None:
    import pytest
    from .terms import parse, g

    d = trans(base(POLY, 'polyK', parse('x1'), parse('g1')), refl(parse('x1')))
    text = dump_derivation(d)
    assert text == '(trans (base polyK "x1" "g1") (refl "x1"))'
    assert load_derivation(text, POLY) == d

    rng = random.Random(0)
    atoms = [K, S, I, E, g(1), g(2)]
    for kind in (POLY, SIM1):
        for _ in range(50):
            d = random_derivation(kind, rng, atoms, 4)
            assert load_derivation(dump_derivation(d), kind) == d

    with pytest.raises(ValueError):
        load_derivation('(base quoK "g1" "g2")', POLY)
    with pytest.raises(ValueError):
        load_derivation('(refl "g1"', POLY)
    with pytest.raises(ValueError):
        load_derivation('(base polyK "x1")', POLY)
    with pytest.raises(ValueError):
        load_derivation('(trans (refl "g1") (refl "g2"))', POLY)
    with pytest.raises(ValueError):
        load_derivation('(refl g)', SIM1)


def test_random_derivations_are_sound() -> None:
    from .common import Equal, Unknown
    from .models import FreeCLModel, eval_closed
    from .rewrite import cl_eq
    from .terms import g, x

    rng = random.Random(1)
    m = FreeCLModel(2)
    settled = 0
    for _ in range(200):
        d = random_poly_derivation(rng, [K, S, I, E, g(1), g(2), x(1)], 4)
        lhs, rhs = check_poly_derivation(d)
        v = cl_eq(lhs, rhs)
        assert v == Equal() or isinstance(v, Unknown), (dump_derivation(d), v)
        settled += v == Equal()

        d = random_sim1_derivation(rng, [K, S, I, E, g(1), g(2)], 4)
        lhs, rhs = check_sim1_derivation(d)
        v = decide_sim1(m, eval_closed(m, lhs), eval_closed(m, rhs))
        assert v == Equal() or isinstance(v, Unknown), (dump_derivation(d), v)
    assert settled > 150
