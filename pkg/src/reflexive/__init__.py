#!/usr/bin/env python3
from __future__ import annotations

import argparse
from argparse import SUPPRESS
import sys
from typing import Any, NoReturn, Optional, Sequence

from .abstraction import DAG, MODES, Mode, abstractor
from .common import (
    logger,
    default_fuel,
    DEFAULT_NODE_CAP, DEFAULT_SEED,
    SIZE,
    ReflexiveError,
    Equal, NotEqual, Unknown,
)
from .constructions import iso_bar_report, resolve_model, retract_fragment_X_to_xn, retract_xy_to_x
from .derivations import decide_sim1
from .models import eval_closed
from .report import SuiteReport, EXIT_CODES, print_report, report_to_json, reports_to_json, worst
from .suites import ALL, SUITES, run_suites
from .terms import Ind, parse, show


TEXT = 'text'
JSON = 'json'

ISO = 'iso'
XY = 'xy'
FRAGMENT = 'fragment'


class UsageError(ReflexiveError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which collides with 'inconclusive'
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        logger.error(message)
        sys.exit(1)


def setup_logging(*, verbose: bool) -> None:
    logger.remove()
    # resolve sys.stderr per message, so redirected/captured stderr is respected
    logger.add(lambda msg: sys.stderr.write(msg), level='DEBUG' if verbose else 'INFO')


def _print_reports(reports: Sequence[SuiteReport], *, fmt: str, many: bool) -> None:
    if fmt == JSON:
        print(reports_to_json(reports) if many else report_to_json(reports[0]))
    else:
        for r in reports:
            print_report(r)


def cmd_normalize(*, model: str, term: str, fuel: int) -> int:
    m = resolve_model(model, fuel)
    res = m.normal_form(parse(term), fuel)
    if isinstance(res, Unknown):
        logger.debug(f'gave up after {res.cap} ({res.reason})')
        print(res)
        return 2
    print(res)
    return 0


def cmd_abstract(*, mode: Mode, var: str, term: str) -> int:
    v = parse(var)
    if not isinstance(v, Ind):
        raise UsageError(f'--var expects an indeterminate x<n>, got {var!r}')
    print(show(abstractor(mode)(v.index, parse(term))))
    return 0


def cmd_check(*, model: str, suite: str, fuel: int, seed: int, fmt: str) -> int:
    m = resolve_model(model, fuel)
    reports = run_suites(m, suite, fuel=fuel, seed=seed)
    _print_reports(reports, fmt=fmt, many=suite == ALL)
    return EXIT_CODES[worst(r.summary for r in reports)]


def cmd_sim1(*, model: str, a: str, b: str, fuel: int) -> int:
    m = resolve_model(model, fuel)
    v = decide_sim1(m, eval_closed(m, parse(a)), eval_closed(m, parse(b)), fuel)
    print(v)
    if isinstance(v, Equal):
        return 0
    if isinstance(v, NotEqual):
        return 3
    return 2


def cmd_roundtrip(*, model: str, kind: str, samples: int, n: int, m: int, fuel: int, seed: int, fmt: str) -> int:
    base = resolve_model(model, fuel)
    if kind == ISO:
        r = iso_bar_report(base, fuel=fuel, samples=samples, seed=seed)
    elif kind == XY:
        r = retract_xy_to_x(base, fuel=fuel, samples=samples, seed=seed)
    elif kind == FRAGMENT:
        if not 0 <= n <= m:
            raise UsageError(f'--n and --m should satisfy 0 <= n <= m, got n={n} m={m}')
        r = retract_fragment_X_to_xn(base, n, m, fuel=fuel, samples=samples, seed=seed)
    else:
        raise UsageError(f'unknown roundtrip kind {kind!r}')
    _print_reports([r], fmt=fmt, many=False)
    return r.exit_code


def make_parser() -> argparse.ArgumentParser:
    def add_model(p: argparse.ArgumentParser) -> None:
        p.add_argument('--model', required=True, help='free-cl:<n>, lambda-beta, poly:<model>:<n>, bar1:<model> or astar:<model>')

    def add_format(p: argparse.ArgumentParser) -> None:
        p.add_argument('--format', choices=[TEXT, JSON], default=TEXT, dest='fmt', help='Report format')

    p = _Parser(prog='reflexive', description='''
reflexive -- combinatory pre-models, their derived models and the equational laws relating them.

Terms are written with k, s, i, e, generators g<n>, indeterminates x<n> and parentheses,
application associating to the left: s (k g1) i x1
'''.lstrip(),
        formatter_class=lambda prog: argparse.RawTextHelpFormatter(prog, width=100),
    )
    p.epilog = f'''
Exit status: 0 holds/equal, 3 fails/not equal, 2 inconclusive/unknown, 1 usage error.
Default fuel comes from $REFLEX_FUEL when set.

Suites: {', '.join(SUITES)}, {ALL}
'''

    def add_globals(p: argparse.ArgumentParser, **defaults: Any) -> None:
        p.add_argument('--fuel'   , type=int, default=defaults.get('fuel', SUPPRESS), help='Reduction step budget per normalization')
        p.add_argument('--seed'   , type=int, default=defaults.get('seed', SUPPRESS), help='Seed for randomized suites and roundtrips')
        p.add_argument('--verbose', action='store_true', default=defaults.get('verbose', SUPPRESS), help='Debug logging')

    add_globals(p, fuel=default_fuel(), seed=DEFAULT_SEED, verbose=False)
    # same flags after the subcommand; suppressed defaults keep the top-level ones
    shared = argparse.ArgumentParser(add_help=False)
    add_globals(shared)

    sp = p.add_subparsers(dest='mode')
    add_parser = lambda name, help: sp.add_parser(name, help=help, parents=[shared])
    np = add_parser('normalize', help='Print the normal form of a closed term in a model')
    add_model(np)
    np.add_argument('term', type=str)

    ap = add_parser('abstract', help='Bracket-abstract a variable, without normalizing')
    ap.add_argument('--mode', choices=MODES, default=DAG, dest='abstraction', help='star or e-guarded dag abstraction')
    ap.add_argument('--var' , required=True, help='Indeterminate to abstract, x<n>')
    ap.add_argument('term', type=str)

    cp = add_parser('check', help='Check an axiom suite against a model')
    add_model(cp)
    cp.add_argument('--suite', required=True, help=f'Suite name or {ALL}')
    add_format(cp)

    s1p = add_parser('sim1', help='Decide a ~1 b, i.e. a x = b x for an indeterminate x')
    add_model(s1p)
    s1p.add_argument('a', type=str)
    s1p.add_argument('b', type=str)

    rp = add_parser('roundtrip', help='Check the polynomial isomorphism and retraction roundtrips')
    add_model(rp)
    rp.add_argument('--kind'   , choices=[ISO, XY, FRAGMENT], default=ISO)
    rp.add_argument('--samples', type=int, default=50, help='Random terms to try')
    rp.add_argument('--n'      , type=int, default=1, help='Target indeterminates x1..xn (fragment)')
    rp.add_argument('--m'      , type=int, default=2, help='Fragment of X used, x1..xm (fragment)')
    add_format(rp)

    return p


def main(argv: Optional[Sequence[str]] = None) -> None:
    p = make_parser()
    args = p.parse_args(argv)

    setup_logging(verbose=args.verbose)

    fuel: int = args.fuel
    if fuel < 1:
        p.error(f'--fuel should be positive, got {fuel}')
    seed: int = args.seed

    mode: Optional[str] = args.mode
    try:
        if mode == 'normalize':
            code = cmd_normalize(model=args.model, term=args.term, fuel=fuel)
        elif mode == 'abstract':
            code = cmd_abstract(mode=args.abstraction, var=args.var, term=args.term)
        elif mode == 'check':
            code = cmd_check(model=args.model, suite=args.suite, fuel=fuel, seed=seed, fmt=args.fmt)
        elif mode == 'sim1':
            code = cmd_sim1(model=args.model, a=args.a, b=args.b, fuel=fuel)
        elif mode == 'roundtrip':
            code = cmd_roundtrip(
                model=args.model, kind=args.kind, samples=args.samples, n=args.n, m=args.m,
                fuel=fuel, seed=seed, fmt=args.fmt,
            )
        else:
            logger.error(f'Unknown mode: {mode}')
            p.print_usage(sys.stderr)
            sys.exit(1)
    except ReflexiveError as e:
        logger.error(f'{type(e).__name__}: {e}')
        sys.exit(1)
    except RecursionError:
        logger.error('term nests too deeply to process')
        print(Unknown(SIZE, DEFAULT_NODE_CAP))
        sys.exit(2)
    sys.exit(code)


if __name__ == '__main__':
    main()


def _run(capsys, *argv: str) -> tuple[int, str]:
    import pytest
    with pytest.raises(SystemExit) as e:
        main(list(argv))
    return e.value.code, capsys.readouterr().out  # type: ignore[return-value]


def test_normalize(capsys) -> None:
    assert _run(capsys, 'normalize', '--model', 'free-cl:2', 's k k g1') == (0, 'g1\n')
    assert _run(capsys, 'normalize', '--model', 'lambda-beta', 'e i') == (0, '\\x. x\n')
    assert _run(capsys, 'normalize', '--model', 'free-cl:1', 's i i (s i i)', '--fuel', '20') == (2, 'UNKNOWN(fuel)\n')
    # derived models print through their base
    assert _run(capsys, 'normalize', '--model', 'bar1:free-cl:1', 'k g1') == (0, 's (k k) g1\n')


def test_normalize_deep_terms(capsys, monkeypatch) -> None:
    text = 'g1 (' * 1200 + 'g1' + ')' * 1200
    assert _run(capsys, 'normalize', '--model', 'free-cl:1', text) == (0, text + '\n')
    assert _run(capsys, 'normalize', '--model', 'free-cl:1', 'i (' + text + ')') == (0, text + '\n')

    # anything that still runs out of stack is inconclusive, not a crash
    def overflow(*args: Any, **kwargs: Any) -> None:
        raise RecursionError
    monkeypatch.setattr(sys.modules[__name__], 'cmd_normalize', overflow)
    assert _run(capsys, 'normalize', '--model', 'free-cl:1', 'g1') == (2, 'UNKNOWN(size)\n')


def test_abstract(capsys) -> None:
    assert _run(capsys, 'abstract', '--mode', 'dag' , '--var', 'x1', 'g1 x1') == (0, 'e g1\n')
    assert _run(capsys, 'abstract', '--mode', 'star', '--var', 'x1', 'x1')    == (0, 'i\n')
    assert _run(capsys, 'abstract', '--mode', 'dag' , '--var', 'x2', 'x1')    == (0, 'e (k x1)\n')
    assert _run(capsys, 'abstract', '--var', 'g1', 'x1')[0] == 1


def test_check(capsys) -> None:
    import json

    code, out = _run(capsys, 'check', '--model', 'lambda-beta', '--suite', 'strong-reflexivity7')
    assert code == 0
    assert 'summary: ' in out

    code, out = _run(capsys, 'check', '--model', 'free-cl:2', '--suite', 'curry5', '--format', 'json')
    assert code == 3
    j = json.loads(out)
    assert j['suite'] == 'curry5'
    assert j['summary']['status'] == 'fails'
    assert any('witnesses' in e for e in j['equations'])

    code, _ = _run(capsys, 'check', '--model', 'bar1:free-cl:2', '--suite', 'premodel')
    assert code == 0


def test_sim1(capsys) -> None:
    assert _run(capsys, 'sim1', '--model', 'free-cl:1', 'e g1', 'g1') == (0, 'EQUAL\n')
    code, out = _run(capsys, 'sim1', '--model', 'free-cl:1', 'k g1', 'g1')
    assert code == 3
    assert out.startswith('NOT-EQUAL')


def test_roundtrip(capsys) -> None:
    import json
    code, out = _run(capsys, 'roundtrip', '--model', 'lambda-beta', '--kind', 'xy', '--samples', '0', '--format', 'json')
    assert code == 0
    assert [e['id'] for e in json.loads(out)['equations']] == ['xy-000', 'xy-001', 'xy-002']

    assert _run(capsys, 'roundtrip', '--model', 'free-cl:0', '--kind', 'fragment', '--n', '3', '--m', '1')[0] == 1


def test_usage_errors(capsys) -> None:
    assert _run(capsys, 'check', '--model', 'free-cl:1', '--suite', 'nope')[0] == 1
    assert _run(capsys, 'check', '--model', 'klop', '--suite', 'ca')[0] == 1
    assert _run(capsys, 'normalize', '--model', 'free-cl:1', 's (k')[0] == 1
    assert _run(capsys, 'normalize', '--model', 'free-cl:1', 'k x1')[0] == 1
    assert _run(capsys, 'normalize', '--model', 'free-cl:1', 'k g1', '--fuel', '0')[0] == 1
    assert _run(capsys, 'frobnicate')[0] == 1
    assert _run(capsys)[0] == 1
