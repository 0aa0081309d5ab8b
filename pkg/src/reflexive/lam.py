r'''
Untyped lambda terms in nameless (de Bruijn) form, lazy beta normalization,
and the CL -> lambda translation behind the lambda-beta term model.

Structural equality of the nameless form is alpha-equivalence.

>>> print(show_lambda(parse_lambda('λa b. a')))
\x. \y. x
'''
from __future__ import annotations

from dataclasses import dataclass, field
import re
from typing import Any, Callable, ClassVar, Iterator, NamedTuple, Optional, Union

from .common import (
    logger,
    Budget, Exhausted,
    DEFAULT_FUEL, DEFAULT_NODE_CAP, IND_OFFSET,
    SIZE,
    TermSyntaxError, UnmappedElement, VariableClash,
    Unknown, Verdict, compare_normal_forms,
    unwrap,
)
from .terms import Atom, CLTerm, Prim, Ind, Gen, ElemRef, App, fold


@dataclass(frozen=True)
class BoundVar:
    # distance to the binder, 0 is the innermost one
    index: int
    size: ClassVar[int] = 1

    def __str__(self) -> str:
        return f'#{self.index}'


@dataclass(frozen=True)
class FreeVar:
    index: int
    size: ClassVar[int] = 1

    def __post_init__(self) -> None:
        assert self.index >= 1, self.index

    def __str__(self) -> str:
        return f'v{self.index}'


@dataclass(frozen=True)
class Abs:
    body: LamTerm
    size: int = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, 'size', 1 + self.body.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Abs):
            return NotImplemented
        return _same(self, other)

    def __str__(self) -> str:
        return show_lambda(self)


@dataclass(frozen=True)
class LamApp:
    fun: LamTerm
    arg: LamTerm
    size: int = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, 'size', self.fun.size + self.arg.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LamApp):
            return NotImplemented
        return _same(self, other)

    def __str__(self) -> str:
        return show_lambda(self)


LamTerm = Union[BoundVar, FreeVar, Abs, LamApp]


def _same(t: LamTerm, u: LamTerm) -> bool:
    # structural equality without recursion, normal forms can nest deeply
    pairs = [(t, u)]
    while pairs:
        a, b = pairs.pop()
        if a is b:
            continue
        if type(a) is not type(b) or a.size != b.size:
            return False
        if isinstance(a, Abs):
            assert isinstance(b, Abs)
            pairs.append((a.body, b.body))
        elif isinstance(a, LamApp):
            assert isinstance(b, LamApp)
            pairs.append((a.arg, b.arg))
            pairs.append((a.fun, b.fun))
        elif a != b:
            return False
    return True


def lam_apply(head: LamTerm, args: list[LamTerm]) -> LamTerm:
    for a in args:
        head = LamApp(head, a)
    return head


def lam_spine(t: LamTerm) -> tuple[LamTerm, list[LamTerm]]:
    args: list[LamTerm] = []
    while isinstance(t, LamApp):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


## printing

_NAMES = 'xyzwutrpq'


def _binder(depth: int) -> str:
    return _NAMES[depth] if depth < len(_NAMES) else f'x{depth}'


def show_lambda(t: LamTerm) -> str:
    def go(t: LamTerm, depth: int) -> str:
        if isinstance(t, BoundVar):
            return _binder(depth - 1 - t.index)
        if isinstance(t, FreeVar):
            return f'v{t.index}'
        if isinstance(t, Abs):
            return f'\\{_binder(depth)}. ' + go(t.body, depth + 1)
        head, args = lam_spine(t)
        parts = [f'({go(head, depth)})' if isinstance(head, Abs) else go(head, depth)]
        for a in args:
            s = go(a, depth)
            parts.append(s if isinstance(a, (BoundVar, FreeVar)) else f'({s})')
        return ' '.join(parts)
    return go(t, 0)


## parsing (mostly for tests and for reading back printed normal forms)

_LTOKEN = re.compile(r'\s*(?:(?P<lam>[\\λ])|(?P<dot>\.)|(?P<open>\()|(?P<close>\))|(?P<name>[A-Za-z_][A-Za-z0-9_]*))')
_FREE = re.compile(r'v(\d+)')


def _ltokens(text: str) -> Iterator[tuple[str, str, int]]:
    pos = 0
    while pos < len(text):
        m = _LTOKEN.match(text, pos)
        if m is None:
            bad = len(text) - len(text[pos:].lstrip())
            if bad == len(text):
                # only whitespace left
                break
            raise TermSyntaxError(f'unexpected {text[bad]!r}', offset=len(text[:bad].encode('utf8')))
        kind = unwrap(m.lastgroup)
        yield kind, m.group(kind), m.start(kind)
        pos = m.end()


def parse_lambda(text: str) -> LamTerm:
    tokens = list(_ltokens(text))
    pos = 0

    def offset(i: int) -> int:
        p = tokens[i][2] if i < len(tokens) else len(text)
        return len(text[:p].encode('utf8'))

    def fail(msg: str) -> TermSyntaxError:
        return TermSyntaxError(msg, offset=offset(pos))

    def term(scope: list[str]) -> LamTerm:
        nonlocal pos
        items: list[LamTerm] = []
        while pos < len(tokens):
            kind, value, _ = tokens[pos]
            if kind == 'lam':
                pos += 1
                names: list[str] = []
                while pos < len(tokens) and tokens[pos][0] == 'name':
                    names.append(tokens[pos][1])
                    pos += 1
                if len(names) == 0 or pos >= len(tokens) or tokens[pos][0] != 'dot':
                    raise fail('expected binder names followed by .')
                pos += 1
                body = term(scope + names)
                for _ in names:
                    body = Abs(body)
                items.append(body)
                break  # abstraction body extends as far right as possible
            elif kind == 'open':
                pos += 1
                items.append(term(scope))
                if pos >= len(tokens) or tokens[pos][0] != 'close':
                    raise fail('expected )')
                pos += 1
            elif kind == 'name':
                if value in scope:
                    items.append(BoundVar(scope[::-1].index(value)))
                else:
                    m = _FREE.fullmatch(value)
                    if m is None or int(m.group(1)) < 1:
                        raise fail(f'unbound variable {value!r}')
                    items.append(FreeVar(int(m.group(1))))
                pos += 1
            else:
                break
        if len(items) == 0:
            raise fail('expected a term')
        return lam_apply(items[0], items[1:])

    res = term([])
    if pos != len(tokens):
        raise fail('trailing input')
    return res


## de Bruijn machinery

def shift(t: LamTerm, d: int, cutoff: int = 0) -> LamTerm:
    if isinstance(t, BoundVar):
        return BoundVar(t.index + d) if t.index >= cutoff else t
    if isinstance(t, FreeVar):
        return t
    if isinstance(t, Abs):
        return Abs(shift(t.body, d, cutoff + 1))
    return LamApp(shift(t.fun, d, cutoff), shift(t.arg, d, cutoff))


def _subst_bound(t: LamTerm, j: int, s: LamTerm) -> LamTerm:
    if isinstance(t, BoundVar):
        return s if t.index == j else t
    if isinstance(t, FreeVar):
        return t
    if isinstance(t, Abs):
        return Abs(_subst_bound(t.body, j + 1, shift(s, 1)))
    return LamApp(_subst_bound(t.fun, j, s), _subst_bound(t.arg, j, s))


def beta(body: LamTerm, arg: LamTerm) -> LamTerm:
    '''
    Contract (\\. body) arg.
    '''
    return shift(_subst_bound(body, 0, shift(arg, 1)), -1)


## lazy normalization: arguments become shared suspensions, evaluated at most once

class _Level(NamedTuple):
    # variable introduced while reading back under a binder, counted from the outside
    level: int


class _Env(NamedTuple):
    head: _Thunk
    tail: Optional[_Env]


class _Closure(NamedTuple):
    body: LamTerm
    env: Optional[_Env]


class _Neutral(NamedTuple):
    head: Union[FreeVar, _Level]
    spine: tuple[_Thunk, ...]


_Value = Union[_Closure, _Neutral]


class _Thunk:
    __slots__ = ('term', 'env', 'value')

    def __init__(self, term: Optional[LamTerm], env: Optional[_Env], value: Optional[_Value] = None) -> None:
        self.term = term
        self.env = env
        self.value = value

    def force(self, budget: Budget) -> _Value:
        if self.value is None:
            self.value = _eval(unwrap(self.term), self.env, budget)
            self.term = self.env = None
        return self.value


def _lookup(env: Optional[_Env], index: int) -> _Thunk:
    for _ in range(index):
        env = unwrap(env).tail
    return unwrap(env).head


def _eval(t: LamTerm, env: Optional[_Env], budget: Budget) -> _Value:
    '''
    Weak head evaluation; pending arguments are a stack, innermost on top.
    '''
    args: list[_Thunk] = []
    while True:
        if isinstance(t, LamApp):
            args.append(_Thunk(t.arg, env))
            t = t.fun
            continue
        if isinstance(t, Abs):
            v: _Value = _Closure(t.body, env)
        elif isinstance(t, BoundVar):
            v = _lookup(env, t.index).force(budget)
        else:
            v = _Neutral(t, ())
        if len(args) == 0:
            return v
        if isinstance(v, _Neutral):
            return _Neutral(v.head, v.spine + tuple(reversed(args)))
        env = _Env(args.pop(), v.env)
        t = v.body
        # the growing argument stack stands in for the size of the term being reduced
        budget.spend(t.size + len(args))


class _Rebuild(NamedTuple):
    # None rebuilds an abstraction around one finished body
    head: Optional[LamTerm]
    arity: int


def _quote(v: _Thunk, budget: Budget) -> LamTerm:
    '''
    Read a value back into a normal form, depth first with an explicit stack.
    '''
    out: list[LamTerm] = []
    todo: list[Union[tuple[_Thunk, int], _Rebuild]] = [(v, 0)]
    while todo:
        item = todo.pop()
        if isinstance(item, _Rebuild):
            if item.head is None:
                res: LamTerm = Abs(out.pop())
            else:
                args = out[len(out) - item.arity:]
                del out[len(out) - item.arity:]
                res = lam_apply(item.head, args)
            budget.check_size(res.size)
            out.append(res)
            continue
        thunk, depth = item
        val = thunk.force(budget)
        if isinstance(val, _Closure):
            var = _Thunk(None, None, _Neutral(_Level(depth), ()))
            todo.append(_Rebuild(None, 0))
            todo.append((_Thunk(val.body, _Env(var, val.env)), depth + 1))
        else:
            head = val.head
            todo.append(_Rebuild(BoundVar(depth - 1 - head.level) if isinstance(head, _Level) else head, len(val.spine)))
            todo.extend((a, depth) for a in reversed(val.spine))
    (res,) = out
    return res


def beta_normalize(
        t: LamTerm,
        fuel: int = DEFAULT_FUEL,
        *,
        node_cap: int = DEFAULT_NODE_CAP,
) -> Union[LamTerm, Unknown]:
    '''
    Beta normal form of a closed term (free variables v<n> allowed), found by lazy evaluation
    to weak head normal form and reading back under binders. Arguments are shared, so
    fuel bounds the number of beta contractions actually performed and node_cap bounds
    both the pending argument stack and the normal form.
    '''
    budget = Budget(fuel=fuel, node_cap=node_cap)
    try:
        budget.check_size(t.size)
        return _quote(_Thunk(t, None), budget)
    except Exhausted as e:
        logger.debug(f'beta normalization gave up after {budget.steps} steps: {e.unknown}')
        return e.unknown
    except RecursionError:
        logger.debug(f'beta normalization gave up after {budget.steps} steps: term too deep')
        return Unknown(SIZE, node_cap)


def lam_eq(t: LamTerm, u: LamTerm, fuel: int = DEFAULT_FUEL, *, node_cap: int = DEFAULT_NODE_CAP) -> Verdict:
    left = beta_normalize(t, fuel, node_cap=node_cap)
    if isinstance(left, Unknown):
        return left
    right = beta_normalize(u, fuel, node_cap=node_cap)
    return compare_normal_forms(left, right)


## CL -> lambda

def _bv(i: int) -> BoundVar:
    return BoundVar(i)


LAM_K = Abs(Abs(_bv(1)))
LAM_S = Abs(Abs(Abs(LamApp(LamApp(_bv(2), _bv(0)), LamApp(_bv(1), _bv(0))))))
LAM_I = Abs(_bv(0))
LAM_E = Abs(Abs(LamApp(_bv(1), _bv(0))))

PRIM_TO_LAMBDA: dict[str, LamTerm] = {
    'k': LAM_K,
    's': LAM_S,
    'i': LAM_I,
    'e': LAM_E,
}


def default_ind_map(i: int) -> int:
    return IND_OFFSET + i


def cl_to_lambda(
        t: CLTerm,
        elem_map: Optional[Callable[[Any], LamTerm]] = None,
        ind_map: Callable[[int], int] = default_ind_map,
) -> LamTerm:
    '''
    Homomorphic translation. Gen j becomes v<j>, Ind i becomes v<ind_map(i)>.
    Generics live below IND_OFFSET and indeterminates at or above it, so the two never meet.
    '''
    def leaf(a: Atom) -> LamTerm:
        if isinstance(a, Prim):
            return PRIM_TO_LAMBDA[a.which]
        if isinstance(a, Ind):
            v = ind_map(a.index)
            if v < IND_OFFSET:
                raise VariableClash(f'x{a.index} mapped to v{v}, inside the generics range v1..v{IND_OFFSET - 1}')
            return FreeVar(v)
        if isinstance(a, Gen):
            if a.index >= IND_OFFSET:
                raise VariableClash(f'g{a.index} is outside the generics range v1..v{IND_OFFSET - 1}')
            return FreeVar(a.index)
        if elem_map is None:
            raise UnmappedElement(a.element)
        try:
            return elem_map(a.element)
        except KeyError as e:
            raise UnmappedElement(a.element) from e
    return fold(t, leaf, lambda _, f, a: LamApp(f, a))


def test_show_parse() -> None:
    k = parse_lambda(r'\x y. x')
    assert k == LAM_K
    assert show_lambda(k) == r'\x. \y. x'
    assert parse_lambda('λa. λb. λc. a c (b c)') == LAM_S
    assert show_lambda(LAM_S) == r'\x. \y. \z. x z (y z)'
    t = parse_lambda(r'(\x. x) v1 (v2 v3)')
    assert show_lambda(t) == r'(\x. x) v1 (v2 v3)'
    assert parse_lambda(show_lambda(t)) == t


def test_parse_lambda_errors() -> None:
    import pytest
    for bad in ['', r'\x x', 'y', '(v1', 'v0', r'\. v1', 'v1 )']:
        with pytest.raises(TermSyntaxError):
            parse_lambda(bad)


def test_beta_normalize() -> None:
    v1, v2 = FreeVar(1), FreeVar(2)
    assert beta_normalize(parse_lambda(r'(\x. x) v1')) == v1
    assert beta_normalize(parse_lambda(r'(\x. \y. x y) v1 v2')) == LamApp(v1, v2)

    omega = parse_lambda(r'(\x. x x) (\x. x x)')
    assert beta_normalize(omega, 100) == Unknown('fuel', 100)

    # leftmost-outermost finds the normal form even next to a divergent argument
    assert beta_normalize(LamApp(LamApp(LAM_K, v1), omega)) == v1


def test_beta_normalize_size_cap() -> None:
    # \x. x x x applied to itself grows forever
    w3 = parse_lambda(r'\x. x x x')
    res = beta_normalize(LamApp(w3, w3), fuel=10_000, node_cap=200)
    assert res == Unknown(SIZE, 200)


def test_beta_normalize_rejects_oversized_input() -> None:
    t = parse_lambda(r'(\x. x) (v1 v2 v3)')
    assert beta_normalize(t, node_cap=4) == Unknown(SIZE, 4)
    assert beta_normalize(t, node_cap=5) == parse_lambda('v1 v2 v3')


def test_beta_normalize_matches_substitution() -> None:
    import random
    from .terms import random_term, K, S, I, E, g

    def reference(t: LamTerm, fuel: int) -> Optional[LamTerm]:
        # leftmost-outermost contraction by substitution
        def step(t: LamTerm) -> Optional[LamTerm]:
            if isinstance(t, Abs):
                body = step(t.body)
                return None if body is None else Abs(body)
            head, args = lam_spine(t)
            if isinstance(head, Abs) and len(args) > 0:
                return lam_apply(beta(head.body, args[0]), args[1:])
            for n, a in enumerate(args):
                s = step(a)
                if s is not None:
                    return lam_apply(head, args[:n] + [s] + args[n + 1:])
            return None
        for _ in range(fuel):
            nxt = step(t)
            if nxt is None:
                return t
            t = nxt
        return None

    rng = random.Random(0)
    atoms = [K, S, I, E, g(1), g(2)]
    checked = 0
    for _ in range(300):
        t = cl_to_lambda(random_term(rng, atoms, 5))
        expected = reference(t, 200)
        if expected is None:
            continue
        assert beta_normalize(t, 10_000) == expected
        checked += 1
    assert checked > 100


def test_deep_normal_forms() -> None:
    from .common import Equal
    t: LamTerm = FreeVar(1)
    u: LamTerm = FreeVar(1)
    for _ in range(1200):
        t = LamApp(FreeVar(1), t)
        u = LamApp(FreeVar(1), LamApp(LAM_I, u))
    assert u != t
    assert lam_eq(t, t) == Equal()
    assert lam_eq(u, t) == Equal()

    deep: CLTerm = Gen(1)
    for _ in range(1200):
        deep = App(Gen(1), deep)
    assert cl_to_lambda(deep) == t


def test_beta_idempotent() -> None:
    t = parse_lambda(r'(\x y. y x) v1 (\z. z)')
    nf = beta_normalize(t)
    assert not isinstance(nf, Unknown)
    assert nf == FreeVar(1)
    assert beta_normalize(nf) == nf


def test_lam_eq() -> None:
    from .common import Equal, NotEqual
    assert lam_eq(parse_lambda(r'\x. x'), parse_lambda(r'\y. y')) == Equal()
    assert isinstance(lam_eq(parse_lambda(r'\x y. x'), parse_lambda(r'\x y. y')), NotEqual)
    assert lam_eq(parse_lambda(r'(\x y. x y) (\x y. x)'), parse_lambda(r'\x y. x')) == Equal()


def test_cl_to_lambda() -> None:
    import pytest
    from .terms import parse
    assert cl_to_lambda(parse('k')) == parse_lambda(r'\x y. x')
    assert cl_to_lambda(parse('e')) == parse_lambda(r'\x y. x y')
    assert cl_to_lambda(parse('i x1')) == LamApp(LAM_I, FreeVar(1001))
    assert cl_to_lambda(parse('g3')) == FreeVar(3)
    assert cl_to_lambda(parse('x1'), ind_map=lambda i: i + 5000) == FreeVar(5001)

    # indeterminates may not land on a generic's variable
    with pytest.raises(VariableClash):
        cl_to_lambda(parse('g6 x1'), ind_map=lambda i: i + 5)
    with pytest.raises(VariableClash):
        cl_to_lambda(Gen(IND_OFFSET + 1))

    with pytest.raises(UnmappedElement):
        cl_to_lambda(App(ElemRef('whatever'), Ind(1)))
    assert cl_to_lambda(ElemRef('k'), elem_map={'k': LAM_K}.__getitem__) == LAM_K
    with pytest.raises(UnmappedElement):
        cl_to_lambda(ElemRef('s'), elem_map={'k': LAM_K}.__getitem__)
