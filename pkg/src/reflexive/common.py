from __future__ import annotations

from dataclasses import dataclass
import os
from typing import Any, Optional, TypeVar, Union

from loguru import logger


DEFAULT_FUEL = 10_000
DEFAULT_NODE_CAP = 100_000
DEFAULT_SEED = 0
# indeterminate x_i becomes free variable v_{IND_OFFSET + i} in the lambda model
IND_OFFSET = 1000

FUEL_ENV = 'REFLEX_FUEL'


def default_fuel() -> int:
    raw = os.environ.get(FUEL_ENV)
    if raw is None:
        return DEFAULT_FUEL
    try:
        fuel = int(raw)
    except ValueError:
        fuel = 0
    if fuel < 1:
        logger.warning(f'ignoring {FUEL_ENV}={raw!r}: expected a positive integer')
        return DEFAULT_FUEL
    return fuel


def test_default_fuel(monkeypatch) -> None:
    monkeypatch.delenv(FUEL_ENV, raising=False)
    assert default_fuel() == DEFAULT_FUEL
    monkeypatch.setenv(FUEL_ENV, '42')
    assert default_fuel() == 42
    monkeypatch.setenv(FUEL_ENV, 'lots')
    assert default_fuel() == DEFAULT_FUEL
    monkeypatch.setenv(FUEL_ENV, '0')
    assert default_fuel() == DEFAULT_FUEL


T = TypeVar('T')
def unwrap(x: Optional[T]) -> T:
    assert x is not None
    return x


class ReflexiveError(Exception):
    pass


class TermSyntaxError(ReflexiveError):
    def __init__(self, message: str, *, offset: int) -> None:
        super().__init__(f'{message} (at byte {offset})')
        self.offset = offset


class UnmappedElement(ReflexiveError):
    pass


class DuplicateIndex(ReflexiveError):
    pass


class OutOfGenerators(ReflexiveError):
    pass


class VariableClash(ReflexiveError):
    pass


class IndeterminatePresent(ReflexiveError):
    pass


class ForeignElement(ReflexiveError):
    pass


class UnassignedIndeterminate(ReflexiveError):
    pass


class InvalidNode(ReflexiveError):
    def __init__(self, path: tuple[int, ...], reason: str) -> None:
        where = '/'.join(map(str, path)) or 'root'
        super().__init__(f'{where}: {reason}')
        self.path = path
        self.reason = reason


class UnknownSuite(ReflexiveError):
    pass


class UnknownModel(ReflexiveError):
    pass


## verdicts

@dataclass(frozen=True)
class Equal:
    def __str__(self) -> str:
        return 'EQUAL'


@dataclass(frozen=True)
class NotEqual:
    # normal forms of both sides, always distinct
    left: Any
    right: Any

    def __str__(self) -> str:
        return f'NOT-EQUAL({self.left} | {self.right})'


FUEL = 'fuel'
SIZE = 'size'
PREMISE = 'premise'


@dataclass(frozen=True)
class Unknown:
    reason: str
    cap: int = 0

    def __str__(self) -> str:
        return f'UNKNOWN({self.reason})'


Verdict = Union[Equal, NotEqual, Unknown]


def compare_normal_forms(left: Any, right: Any) -> Verdict:
    if isinstance(left, Unknown):
        return left
    if isinstance(right, Unknown):
        return right
    if left == right:
        return Equal()
    return NotEqual(left=left, right=right)


## step/size budget shared by both normalizers

class Exhausted(Exception):
    def __init__(self, unknown: Unknown) -> None:
        super().__init__(str(unknown))
        self.unknown = unknown


@dataclass
class Budget:
    fuel: int
    node_cap: int
    steps: int = 0

    def __post_init__(self) -> None:
        assert self.fuel >= 1, self.fuel

    def spend(self, size: int) -> None:
        self.steps += 1
        if self.steps > self.fuel:
            raise Exhausted(Unknown(FUEL, self.fuel))
        self.check_size(size)

    def check_size(self, size: int) -> None:
        if size > self.node_cap:
            raise Exhausted(Unknown(SIZE, self.node_cap))


def test_budget() -> None:
    import pytest

    b = Budget(fuel=2, node_cap=10)
    b.spend(5)
    b.spend(5)
    with pytest.raises(Exhausted) as e:
        b.spend(5)
    assert e.value.unknown == Unknown(FUEL, 2)

    b = Budget(fuel=100, node_cap=10)
    with pytest.raises(Exhausted) as e:
        b.spend(11)
    assert e.value.unknown == Unknown(SIZE, 10)

    with pytest.raises(Exhausted):
        Budget(fuel=1, node_cap=10).check_size(11)
    Budget(fuel=1, node_cap=10).check_size(10)


def test_compare_normal_forms() -> None:
    assert compare_normal_forms('a', 'a') == Equal()
    assert compare_normal_forms('a', 'b') == NotEqual('a', 'b')
    assert compare_normal_forms(Unknown(FUEL, 3), 'b') == Unknown(FUEL, 3)
    assert str(Unknown(FUEL, 3)) == 'UNKNOWN(fuel)'
