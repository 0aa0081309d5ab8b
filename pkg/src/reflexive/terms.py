'''
Applicative (combinatory) terms: primitives k/s/i/e, indeterminates x<n>,
generators g<n>, references to model elements, and application.

>>> t = parse('s (k i) x1')
>>> t
App(fun=App(fun=Prim(which='s'), arg=App(fun=Prim(which='k'), arg=Prim(which='i'))), arg=Ind(index=1))
>>> str(t)
's (k i) x1'
>>> sorted(fv(parse('x2 (g1 x2) x3')))
[2, 3]
'''
from __future__ import annotations

from dataclasses import dataclass, field
import random
import re
from typing import Any, Callable, ClassVar, Iterator, Mapping, NamedTuple, Optional, Sequence, TypeVar, Union

from .common import TermSyntaxError, unwrap


PRIMS = ('k', 's', 'i', 'e')


@dataclass(frozen=True)
class Prim:
    which: str
    size: ClassVar[int] = 1

    def __post_init__(self) -> None:
        assert self.which in PRIMS, self.which

    def __str__(self) -> str:
        return self.which


@dataclass(frozen=True)
class Ind:
    index: int
    size: ClassVar[int] = 1

    def __post_init__(self) -> None:
        assert self.index >= 1, self.index

    def __str__(self) -> str:
        return f'x{self.index}'


@dataclass(frozen=True)
class Gen:
    index: int
    size: ClassVar[int] = 1

    def __post_init__(self) -> None:
        assert self.index >= 1, self.index

    def __str__(self) -> str:
        return f'g{self.index}'


@dataclass(frozen=True)
class ElemRef:
    # models.Element, kept opaque here
    element: Any
    size: ClassVar[int] = 1

    def __str__(self) -> str:
        # not part of the parseable grammar
        return '{' + str(self.element) + '}'


@dataclass(frozen=True)
class App:
    fun: CLTerm
    arg: CLTerm
    size: int = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, 'size', self.fun.size + self.arg.size)

    def __eq__(self, other: object) -> bool:
        # iterative, terms can nest deeper than the interpreter stack
        if not isinstance(other, App):
            return NotImplemented
        pairs: list[tuple[CLTerm, CLTerm]] = [(self, other)]
        while pairs:
            a, b = pairs.pop()
            if a is b:
                continue
            if isinstance(a, App) and isinstance(b, App):
                if a.size != b.size:
                    return False
                pairs.append((a.arg, b.arg))
                pairs.append((a.fun, b.fun))
            elif isinstance(a, App) or isinstance(b, App) or a != b:
                return False
        return True

    def __hash__(self) -> int:
        return fold(self, hash, lambda _, f, a: hash((f, a)))

    def __str__(self) -> str:
        return show(self)


Atom = Union[Prim, Ind, Gen, ElemRef]
CLTerm = Union[Prim, Ind, Gen, ElemRef, App]
IndSet = frozenset[int]

K = Prim('k')
S = Prim('s')
I = Prim('i')
E = Prim('e')


def x(index: int) -> Ind:
    return Ind(index)


def g(index: int) -> Gen:
    return Gen(index)


def app(head: CLTerm, *args: CLTerm) -> CLTerm:
    res = head
    for a in args:
        res = App(res, a)
    return res


def spine(t: CLTerm) -> tuple[CLTerm, list[CLTerm]]:
    args: list[CLTerm] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


def is_atom(t: CLTerm) -> bool:
    return not isinstance(t, App)


R = TypeVar('R')


def fold(t: CLTerm, leaf: Callable[[Atom], R], node: Callable[[App, R, R], R]) -> R:
    '''
    Bottom-up evaluation with an explicit stack: node(t, folded fun, folded arg) at every App.
    '''
    out: list[R] = []
    todo: list[tuple[CLTerm, bool]] = [(t, False)]
    while todo:
        cur, ready = todo.pop()
        if not isinstance(cur, App):
            out.append(leaf(cur))
        elif ready:
            arg = out.pop()
            fun = out.pop()
            out.append(node(cur, fun, arg))
        else:
            todo.append((cur, True))
            todo.append((cur.arg, False))
            todo.append((cur.fun, False))
    (res,) = out
    return res


## printing

def show(t: CLTerm) -> str:
    def node(cur: App, fun: str, arg: str) -> str:
        return f'{fun} ({arg})' if isinstance(cur.arg, App) else f'{fun} {arg}'
    return fold(t, str, node)


## parsing

_TOKEN = re.compile(r'\s*(?:(?P<open>\()|(?P<close>\))|(?P<name>[^\s()]+))')
_NAME = re.compile(r'(?P<kind>[xg])(?P<index>\d+)|(?P<prim>[ksie])')


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode('utf8'))


def _atom(text: str, name: str, pos: int) -> CLTerm:
    m = _NAME.fullmatch(name)
    if m is None:
        raise TermSyntaxError(f'unknown atom {name!r}', offset=_byte_offset(text, pos))
    prim = m.group('prim')
    if prim is not None:
        return Prim(prim)
    index = int(m.group('index'))
    if index < 1:
        raise TermSyntaxError(f'indices start at 1, got {name!r}', offset=_byte_offset(text, pos))
    return Ind(index) if m.group('kind') == 'x' else Gen(index)


def _tokens(text: str) -> Iterator[tuple[str, str, int]]:
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            # only whitespace left
            break
        kind = unwrap(m.lastgroup)
        yield kind, m.group(kind), m.start(kind)
        pos = m.end()


def parse(text: str) -> CLTerm:
    '''
    Juxtaposition is application and associates to the left.
    '''
    stack: list[list[CLTerm]] = [[]]
    opened: list[int] = []
    for kind, value, pos in _tokens(text):
        if kind == 'open':
            stack.append([])
            opened.append(pos)
        elif kind == 'close':
            if len(stack) == 1:
                raise TermSyntaxError('unbalanced )', offset=_byte_offset(text, pos))
            items = stack.pop()
            opened.pop()
            if len(items) == 0:
                raise TermSyntaxError('empty parentheses', offset=_byte_offset(text, pos))
            stack[-1].append(app(*items))
        else:
            stack[-1].append(_atom(text, value, pos))
    if len(stack) > 1:
        raise TermSyntaxError('unclosed (', offset=_byte_offset(text, opened[-1]))
    items = stack[0]
    if len(items) == 0:
        raise TermSyntaxError('empty term', offset=_byte_offset(text, len(text)))
    return app(*items)


## structural operations

def subterms(t: CLTerm) -> Iterator[CLTerm]:
    stack = [t]
    while stack:
        cur = stack.pop()
        yield cur
        if isinstance(cur, App):
            stack.append(cur.arg)
            stack.append(cur.fun)


def fv(t: CLTerm) -> IndSet:
    return frozenset(s.index for s in subterms(t) if isinstance(s, Ind))


def gens(t: CLTerm) -> frozenset[int]:
    return frozenset(s.index for s in subterms(t) if isinstance(s, Gen))


def elements(t: CLTerm) -> list[Any]:
    return [s.element for s in subterms(t) if isinstance(s, ElemRef)]


def map_atoms(t: CLTerm, f: Callable[[Atom], CLTerm]) -> CLTerm:
    '''
    Homomorphic rebuild: every atom is replaced by f(atom), applications are kept.
    '''
    def node(cur: App, fun: CLTerm, arg: CLTerm) -> CLTerm:
        if fun is cur.fun and arg is cur.arg:
            return cur
        return App(fun, arg)
    return fold(t, f, node)


def subst_many(t: CLTerm, mapping: Mapping[int, CLTerm]) -> CLTerm:
    def go(a: Atom) -> CLTerm:
        if isinstance(a, Ind):
            return mapping.get(a.index, a)
        return a
    return map_atoms(t, go)


def subst(t: CLTerm, i: int, u: CLTerm) -> CLTerm:
    return subst_many(t, {i: u})


def fresh_index(*ts: CLTerm) -> int:
    used = set().union(*(fv(t) for t in ts))
    return max(used, default=0) + 1


## random generation

def random_term(rng: random.Random, atoms: Sequence[CLTerm], depth: int, *, leaf: float = 0.4) -> CLTerm:
    '''
    Random term of depth at most `depth`, leaves drawn uniformly from `atoms`.
    '''
    if depth == 0 or rng.random() < leaf:
        return rng.choice(list(atoms))
    return App(
        random_term(rng, atoms, depth - 1, leaf=leaf),
        random_term(rng, atoms, depth - 1, leaf=leaf),
    )


def depth(t: CLTerm) -> int:
    return fold(t, lambda _: 0, lambda _, f, a: 1 + max(f, a))


class Equation(NamedTuple):
    id: str
    lhs: CLTerm
    rhs: CLTerm
    # checked first; the equation is only tested when the premise holds
    premise: Optional[tuple[CLTerm, CLTerm]] = None


def test_parse() -> None:
    assert parse('k g1 g2') == App(App(K, Gen(1)), Gen(2))
    assert parse('s (k i) x1') == App(App(S, App(K, I)), Ind(1))
    assert parse('((k))') == K
    assert parse('x12') == Ind(12)
    assert parse('  e\tg3\n') == App(E, Gen(3))


def test_parse_errors() -> None:
    import pytest

    with pytest.raises(TermSyntaxError) as e:
        parse('x0')
    assert e.value.offset == 0

    with pytest.raises(TermSyntaxError) as e:
        parse('k skk')
    assert e.value.offset == 2

    for bad in ['', '(', 'k )', '()', 'k (s', 'y1', 'K']:
        with pytest.raises(TermSyntaxError):
            parse(bad)

    # offsets are in bytes
    with pytest.raises(TermSyntaxError) as e:
        parse('k λ')
    assert e.value.offset == 2
    with pytest.raises(TermSyntaxError) as e:
        parse('k\u00a0y1')
    assert e.value.offset == 3


def test_show() -> None:
    assert show(parse('s k k g1')) == 's k k g1'
    assert show(parse('(s k) (k g1)')) == 's k (k g1)'
    assert show(parse('x1 (x2 (x3 x4))')) == 'x1 (x2 (x3 x4))'


def test_deep_terms() -> None:
    # nesting far past the default recursion limit
    n = 5000
    t: CLTerm = g(1)
    for _ in range(n):
        t = App(g(1), t)
    text = 'g1 (' * n + 'g1' + ')' * n
    assert show(t) == text
    assert parse(text) == t
    assert depth(t) == n
    assert map_atoms(t, lambda a: a) is t
    assert subst(t, 1, K) is t
    assert t != App(g(1), App(g(1), g(2)))
    assert hash(t) == hash(parse(text))


def test_fv() -> None:
    assert fv(K) == frozenset()
    assert fv(App(Ind(1), Gen(2))) == {1}
    assert fv(App(Ind(2), Ind(2))) == {2}


def test_subst() -> None:
    assert subst(Ind(1), 1, K) == K
    assert subst(App(Ind(1), Ind(2)), 1, Gen(1)) == App(Gen(1), Ind(2))
    assert subst(S, 1, K) == S


def test_size() -> None:
    assert parse('s k k g1').size == 4
    assert K.size == 1


def test_random_roundtrip() -> None:
    rng = random.Random(0)
    atoms = [K, S, I, E, x(1), x(2), x(3), g(1), g(2)]
    for _ in range(300):
        t = random_term(rng, atoms, 6)
        assert depth(t) <= 6
        assert parse(show(t)) == t
        for i in (1, 2, 3):
            assert subst(t, i, Ind(i)) == t
            u = random_term(rng, atoms, 2)
            expected = (fv(t) - {i}) | (fv(u) if i in fv(t) else frozenset())
            assert fv(subst(t, i, u)) == expected
