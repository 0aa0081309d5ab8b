from __future__ import annotations

import json
from typing import Any, Iterable, NamedTuple, Optional, Sequence

from .common import Equal, NotEqual, Unknown, Verdict


EQUAL = 'equal'
NOT_EQUAL = 'not-equal'
UNKNOWN = 'unknown'

HOLDS = 'holds'
FAILS = 'fails'
INCONCLUSIVE = 'inconclusive'
NO_COUNTEREXAMPLE = 'no-counterexample'

# no-counterexample is not a failure, but not a proof either
EXIT_CODES = {
    HOLDS: 0,
    NO_COUNTEREXAMPLE: 0,
    INCONCLUSIVE: 2,
    FAILS: 3,
}


class EquationResult(NamedTuple):
    id: str
    lhs: str
    rhs: str
    verdict: str
    reason: Optional[str] = None
    witnesses: Optional[tuple[str, str]] = None


class Summary(NamedTuple):
    status: str
    ids: tuple[str, ...] = ()


class SuiteReport(NamedTuple):
    model: str
    suite: str
    fuel: int
    seed: int
    quantifier: str
    note: Optional[str]
    equations: tuple[EquationResult, ...]
    summary: Summary

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.summary.status]


def equation_result(id: str, lhs: str, rhs: str, verdict: Verdict) -> EquationResult:
    if isinstance(verdict, Equal):
        return EquationResult(id=id, lhs=lhs, rhs=rhs, verdict=EQUAL)
    if isinstance(verdict, NotEqual):
        return EquationResult(id=id, lhs=lhs, rhs=rhs, verdict=NOT_EQUAL, witnesses=(str(verdict.left), str(verdict.right)))
    assert isinstance(verdict, Unknown), verdict
    return EquationResult(id=id, lhs=lhs, rhs=rhs, verdict=UNKNOWN, reason=verdict.reason)


def summarize(results: Sequence[EquationResult]) -> Summary:
    failed = tuple(r.id for r in results if r.verdict == NOT_EQUAL)
    if len(failed) > 0:
        return Summary(FAILS, failed)
    unknown = tuple(r.id for r in results if r.verdict == UNKNOWN)
    if len(unknown) > 0:
        return Summary(INCONCLUSIVE, unknown)
    return Summary(HOLDS)


def worst(summaries: Iterable[Summary]) -> str:
    statuses = {s.status for s in summaries}
    for status in (FAILS, INCONCLUSIVE):
        if status in statuses:
            return status
    return HOLDS


## json

def report_to_dict(r: SuiteReport) -> dict[str, Any]:
    res: dict[str, Any] = {
        'model': r.model,
        'suite': r.suite,
        'fuel': r.fuel,
        'seed': r.seed,
        'quantifier': r.quantifier,
    }
    if r.note is not None:
        res['note'] = r.note
    eqs = []
    for e in r.equations:
        d: dict[str, Any] = {'id': e.id, 'lhs': e.lhs, 'rhs': e.rhs, 'verdict': e.verdict}
        if e.reason is not None:
            d['reason'] = e.reason
        if e.witnesses is not None:
            d['witnesses'] = list(e.witnesses)
        eqs.append(d)
    res['equations'] = eqs
    res['summary'] = {'status': r.summary.status, 'ids': list(r.summary.ids)}
    return res


def report_from_dict(d: dict[str, Any]) -> SuiteReport:
    eqs = []
    for e in d['equations']:
        w = e.get('witnesses')
        eqs.append(EquationResult(
            id=e['id'],
            lhs=e['lhs'],
            rhs=e['rhs'],
            verdict=e['verdict'],
            reason=e.get('reason'),
            witnesses=None if w is None else (w[0], w[1]),
        ))
    return SuiteReport(
        model=d['model'],
        suite=d['suite'],
        fuel=d['fuel'],
        seed=d['seed'],
        quantifier=d['quantifier'],
        note=d.get('note'),
        equations=tuple(eqs),
        summary=Summary(d['summary']['status'], tuple(d['summary']['ids'])),
    )


def _dumps(o: Any) -> str:
    return json.dumps(o, indent=2, ensure_ascii=False)


def report_to_json(r: SuiteReport) -> str:
    return _dumps(report_to_dict(r))


def reports_to_json(rs: Sequence[SuiteReport]) -> str:
    return _dumps([report_to_dict(r) for r in rs])


def report_from_json(text: str) -> SuiteReport:
    return report_from_dict(json.loads(text))


def reports_from_json(text: str) -> list[SuiteReport]:
    j = json.loads(text)
    if isinstance(j, dict):
        return [report_from_dict(j)]
    return [report_from_dict(d) for d in j]


## text

COLORS = {
    EQUAL: 'green',
    NOT_EQUAL: 'red',
    UNKNOWN: 'yellow',
    HOLDS: 'green',
    NO_COUNTEREXAMPLE: 'green',
    FAILS: 'red',
    INCONCLUSIVE: 'yellow',
}

MAX_WIDTH = 60


def _clip(s: str) -> str:
    return s if len(s) <= MAX_WIDTH else s[:MAX_WIDTH - 1] + '…'


def format_report(r: SuiteReport) -> str:
    import termcolor

    import tabulate
    tabulate.PRESERVE_WHITESPACE = True

    headers = ['ID', 'VERDICT', 'LHS', 'RHS', 'WITNESSES']
    items = []
    for e in r.equations:
        verdict = e.verdict if e.reason is None else f'{e.verdict}({e.reason})'
        witnesses = '' if e.witnesses is None else ' | '.join(map(_clip, e.witnesses))
        items.append([
            e.id,
            termcolor.colored(verdict, COLORS[e.verdict]),
            _clip(e.lhs),
            _clip(e.rhs),
            witnesses,
        ])
    lines = [f'{r.suite} on {r.model} (fuel {r.fuel}, seed {r.seed}, {r.quantifier})']
    if r.note is not None:
        lines.append(f'note: {r.note}')
    lines.append(tabulate.tabulate(items, headers=headers))
    status = termcolor.colored(r.summary.status, COLORS[r.summary.status])
    ids = '' if len(r.summary.ids) == 0 else ': ' + ', '.join(r.summary.ids)
    lines.append(f'summary: {status}{ids}')
    return '\n'.join(lines)


def print_report(r: SuiteReport) -> None:
    print(format_report(r))


def _sample() -> SuiteReport:
    from .terms import parse
    results = (
        equation_result('a', 'i g1', 'g1', Equal()),
        equation_result('b', 'e g1', 'g1', NotEqual(parse('e g1'), parse('g1'))),
        equation_result('c', 's i i (s i i)', 'g1', Unknown('fuel', 10)),
    )
    return SuiteReport(
        model='free-cl:1', suite='demo', fuel=10, seed=0, quantifier='generic-instance',
        note='λ and ε survive', equations=results, summary=summarize(results),
    )


def test_summarize() -> None:
    r = _sample()
    assert r.summary == Summary(FAILS, ('b',))
    assert r.exit_code == 3
    assert r.equations[1].witnesses == ('e g1', 'g1')
    assert r.equations[2].reason == 'fuel'
    assert summarize(r.equations[::2]) == Summary(INCONCLUSIVE, ('c',))
    assert summarize(r.equations[:1]) == Summary(HOLDS)
    assert worst([Summary(HOLDS), Summary(INCONCLUSIVE, ('x',))]) == INCONCLUSIVE
    assert worst([Summary(NO_COUNTEREXAMPLE)]) == HOLDS


def test_json_roundtrip() -> None:
    r = _sample()
    text = report_to_json(r)
    assert report_from_json(text) == r
    assert report_to_json(report_from_json(text)) == text
    assert 'λ and ε' in text
    d = json.loads(text)
    assert 'witnesses' not in d['equations'][0]
    assert d['summary'] == {'status': 'fails', 'ids': ['b']}

    both = reports_to_json([r, r._replace(note=None)])
    back = reports_from_json(both)
    assert back == [r, r._replace(note=None)]
    assert reports_to_json(back) == both


def test_format_report() -> None:
    text = format_report(_sample())
    assert 'demo on free-cl:1' in text
    assert 'e g1 | g1' in text
    assert 'summary:' in text
