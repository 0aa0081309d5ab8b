'''
Public surface for using reflexive as a library, e.g.

    from reflexive.api import LambdaBetaModel, a_star, run_suite
    report = run_suite(a_star(LambdaBetaModel()), 'premodel')
'''
from .abstraction import DAG, STAR, eps, lam_dag, lam_multi, lam_star, pairing
from .ccm import ccm_compose, ccm_context, ccm_lam, ccm_pair, ccm_parts, ccm_suite
from .common import (
    ReflexiveError,
    Equal, NotEqual, Unknown, Verdict,
)
from .constructions import (
    a_star, bar_a1, poly_model,
    eval_poly,
    iso_bar_roundtrip, iso_bar_element_roundtrip, iso_bar_report, retract_fragment_X_to_xn, retract_xy_to_x,
    resolve_model,
)
from .derivations import (
    base, cong, refl, sym, trans,
    check_poly_derivation, check_sim1_derivation, decide_sim1,
    dump_derivation, load_derivation,
)
from .models import Element, PreModel, FreeCLModel, LambdaBetaModel, check_premodel_axioms, eval_closed, free_cl_model, lambda_beta_model
from .report import SuiteReport, format_report, report_from_json, report_to_json
from .rewrite import cl_eq, weak_normalize
from .suites import SUITES, run_suite, run_suites
from .terms import CLTerm, App, Equation, K, S, I, E, g, parse, show, x


__all__ = [
    'DAG', 'STAR', 'eps', 'lam_dag', 'lam_multi', 'lam_star', 'pairing',
    'ccm_compose', 'ccm_context', 'ccm_lam', 'ccm_pair', 'ccm_parts', 'ccm_suite',
    'ReflexiveError', 'Equal', 'NotEqual', 'Unknown', 'Verdict',
    'a_star', 'bar_a1', 'poly_model', 'eval_poly',
    'iso_bar_roundtrip', 'iso_bar_element_roundtrip', 'iso_bar_report', 'retract_fragment_X_to_xn', 'retract_xy_to_x',
    'resolve_model',
    'base', 'cong', 'refl', 'sym', 'trans',
    'check_poly_derivation', 'check_sim1_derivation', 'decide_sim1',
    'dump_derivation', 'load_derivation',
    'Element', 'PreModel', 'FreeCLModel', 'LambdaBetaModel', 'check_premodel_axioms', 'eval_closed',
    'free_cl_model', 'lambda_beta_model',
    'SuiteReport', 'format_report', 'report_from_json', 'report_to_json',
    'cl_eq', 'weak_normalize',
    'SUITES', 'run_suite', 'run_suites',
    'CLTerm', 'App', 'Equation', 'K', 'S', 'I', 'E', 'g', 'parse', 'show', 'x',
]


def test_library_usage() -> None:
    m = a_star(LambdaBetaModel())
    assert run_suite(m, 'premodel').summary.status == 'holds'
    assert weak_normalize(parse('s k k g1')) == g(1)
    assert str(lam_dag(1, parse('g1 x1'))) == 'e g1'
    lb = LambdaBetaModel()
    assert iso_bar_element_roundtrip(lb, lb.generic(1)) == Equal()
