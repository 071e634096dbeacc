"""检查套件模块

每个套件是一个函数 (算例, 运行配置) -> 报告列表，只检查算例上存在的对象。
"""

from dataclasses import replace
from typing import Callable, Optional

import numpy as np
from loguru import logger

from .algebra import gram, residual_norm, signature
from .catalog import CatalogEntry
from .config import RunConfig
from .constructions import (ProductChart, check_horizontal_restriction, cone_inverse, parallel_defect,
                            product_structure)
from .errors import DegenerateForm
from .mixed3 import (MetricMixed, check_contact, check_metric_compatibility, check_mixed_axioms,
                     compatible_metric, mixed_frame, sasakian_defect)
from .report import CheckReport
from .smooth import MetricField, SamplePlan, ScalarField, levi_civita, probe_fields, ricci
from .structures import (adapted_frame, average_metric, check_integrable, check_structure, check_triple,
                         check_two_imply_third, compatibility_defect)
from .tangent import (SasakiMetric, check_bracket_identities, check_nijenhuis_closed_forms, connection_map,
                      horizontal_lift, para_hermitian_defect, vertical_lift)


SuiteFn = Callable[[CatalogEntry, RunConfig], list[CheckReport]]


def _renamed(report: CheckReport, identity: str) -> CheckReport:
    return replace(report, identity=identity)


def signature_report(identity: str, g: MetricField, plan: SamplePlan,
                     expected: tuple[int, int]) -> CheckReport:
    """符号差与期望不同的采样点个数"""
    points = g.chart.sample(plan)
    wrong = 0
    observed: Optional[tuple[int, int]] = None
    for x in points:
        try:
            sig = signature(g(x))
        except DegenerateForm:
            sig = None
        observed = observed or sig
        wrong += sig != tuple(expected)
    return CheckReport(identity, 'signature (p, q)', float(wrong), 0.5, len(points),
                       {'expected': list(expected), 'observed': list(observed) if observed else None})


def frame_report(identity: str, frames: list[list[np.ndarray]], metrics: list[np.ndarray],
                 expected: tuple[int, int], tol: float) -> CheckReport:
    """标架的 Gram 矩阵应为对角 ±1，正负个数等于期望的符号差"""
    worst = 0.0
    counts_ok = True
    for frame, g in zip(frames, metrics):
        form = gram(g, frame)
        diagonal = np.diag(form)
        worst = max(worst, residual_norm(form, np.diag(np.sign(diagonal))),
                    residual_norm(np.abs(diagonal), np.ones_like(diagonal)))
        counts_ok &= (int(np.sum(diagonal > 0)), int(np.sum(diagonal < 0))) == tuple(expected)
    residual = worst if counts_ok else max(worst, 1.0)
    return CheckReport(identity, 'Gram matrix of the frame is diagonal +-1', residual, tol, len(frames),
                       {'signature_matches': counts_ok})


def run_axioms(entry: CatalogEntry, config: RunConfig) -> list[CheckReport]:
    plan, tol = config.plan, config.tolerances
    reports = []
    if entry.triple is not None:
        for a, s in enumerate(entry.triple.structures, start=1):
            r = check_structure(s, plan, tolerances=tol)
            reports.append(_renamed(r, f'{r.identity}-J{a}'))
        reports.append(check_triple(entry.triple, plan, tolerances=tol))
        if entry.metric is not None:
            reports.append(compatibility_defect(entry.metric, entry.triple, plan, tolerances=tol))
    if entry.almost_product is not None and entry.tangent is None:
        p, g = entry.almost_product, entry.base_metric
        reports.append(_renamed(check_structure(p, plan, tolerances=tol), 'almost-product-P'))
        points = p.chart.sample(plan)
        reports.append(CheckReport('para-hermitian', 'g(PX, PY) = -g(X, Y)', para_hermitian_defect(p, g, points),
                                   tol.for_field(p.constant and g.constant), len(points)))
    if entry.mixed is not None:
        for a, t in enumerate(entry.mixed.mixed.triples, start=1):
            r = check_contact(t, plan, tolerances=tol)
            reports.append(_renamed(r, f'{r.identity}-{a}'))
        reports.append(check_mixed_axioms(entry.mixed.mixed, plan, tolerances=tol))
        reports.append(check_metric_compatibility(entry.mixed, plan, tolerances=tol))
    return reports


def run_averaging(entry: CatalogEntry, config: RunConfig) -> list[CheckReport]:
    plan, tol = config.plan, config.tolerances
    reports = []
    if entry.seed is not None and entry.triple is not None:
        t = entry.triple
        g = average_metric(entry.seed, t, plan)
        exact = tol.for_field(g.constant)
        reports.append(_renamed(compatibility_defect(g, t, plan, tolerances=tol), 'averaged-compatibility'))
        again = average_metric(g, t, plan)
        points = t.chart.sample(plan)
        reports.append(CheckReport('averaging-idempotent', 'average(g) = g for compatible g',
                                   max(residual_norm(again(x), g(x)) for x in points), exact, len(points)))
        if entry.signature is not None:
            reports.append(signature_report('averaged-signature', g, plan, entry.signature))
            frames = [adapted_frame(g, t, x) for x in points]
            reports.append(frame_report('adapted-frame', frames, [g(x) for x in points], entry.signature,
                                        tol.algebra))
    if entry.mixed_seed is not None and entry.mixed is not None:
        m = entry.mixed.mixed
        g = compatible_metric(m, entry.mixed_seed, plan)
        mm = MetricMixed(m, g)
        exact = tol.for_field(g.constant)
        reports.append(_renamed(check_metric_compatibility(mm, plan, tolerances=tol), 'compatible-metric'))
        again = compatible_metric(m, g, plan)
        points = m.chart.sample(plan)
        reports.append(CheckReport('compatible-idempotent', 'four-step construction fixes a compatible g',
                                   max(residual_norm(again(x), g(x)) for x in points), exact, len(points)))
        worst = 0.0
        for x in points:
            xis = [t.xi(x) for t in m.triples]
            reeb = gram(g(x), xis)
            worst = max(worst, residual_norm(reeb, np.diag([float(t.epsilon) for t in m.triples])))
        reports.append(CheckReport('reeb-orthonormal', 'g(xi_a, xi_b) = eps_a delta_ab', worst, exact,
                                   len(points)))
        if entry.signature is not None:
            reports.append(signature_report('compatible-signature', g, plan, entry.signature))
            frames = [mixed_frame(mm, x) for x in points]
            reports.append(frame_report('mixed-frame', frames, [g(x) for x in points], entry.signature,
                                        tol.algebra))
    return reports


def run_nijenhuis(entry: CatalogEntry, config: RunConfig) -> list[CheckReport]:
    plan, scheme, tol = config.plan, config.scheme, config.tolerances
    reports = []
    if entry.tangent is not None:
        tc = entry.tangent
        X, Y = probe_fields(tc.base)
        reports.extend(check_nijenhuis_closed_forms(tc, entry.almost_product, entry.base_metric, X, Y, plan,
                                                    scheme, tolerances=tol))
        U, V = probe_fields(tc.total)
        parts = [check_integrable(s, U, V, plan, scheme, tolerances=tol) for s in entry.triple.structures]
        details = {f'J{a}': r.residual for a, r in enumerate(parts, start=1)}
        reports.append(CheckReport('lifted-integrable', 'N_a = 0 for the lifted structures',
                                   max(details.values()), tol.integrable, parts[0].samples, details))
        return reports
    if entry.triple is not None:
        X, Y = probe_fields(entry.chart)
        for a, s in enumerate(entry.triple.structures, start=1):
            reports.append(check_integrable(s, X, Y, plan, scheme, tolerances=tol, name=f'nijenhuis-J{a}'))
        reports.append(check_two_imply_third(entry.triple, X, Y, scheme, plan, tolerances=tol))
    if entry.almost_product is not None:
        X, Y = probe_fields(entry.chart)
        reports.append(check_integrable(entry.almost_product, X, Y, plan, scheme, tolerances=tol,
                                        name='nijenhuis-P'))
    return reports


def run_lifts(entry: CatalogEntry, config: RunConfig) -> list[CheckReport]:
    plan, scheme, tol = config.plan, config.scheme, config.tolerances
    reports = []
    if entry.tangent is None:
        return reports
    tc = entry.tangent
    X, Y = probe_fields(tc.base)
    reports.append(check_bracket_identities(tc, X, Y, plan, scheme, tolerances=tol))
    reports.append(SasakiMetric(tc, entry.base_metric).check_blocks(plan, tolerances=tol))
    xh, xv = horizontal_lift(tc, X), vertical_lift(tc, X)
    points = tc.total.sample(plan)
    worst = 0.0
    for p in points:
        worst = max(worst, residual_norm(connection_map(tc, p, xh(p)), np.zeros(tc.m)),
                    residual_norm(connection_map(tc, p, xv(p)), X(p[:tc.m])))
    reports.append(CheckReport('connection-map', 'K(X^h) = 0, K(X^v) = X', worst, tol.algebra, len(points)))
    if entry.signature is not None:
        reports.append(signature_report('sasaki-signature', entry.metric, plan, entry.signature))
    return reports


def run_constructions(entry: CatalogEntry, config: RunConfig) -> list[CheckReport]:
    plan, scheme, tol = config.plan, config.scheme, config.tolerances
    reports = []
    if entry.product is not None:
        pc = entry.product
        variants = {'constant': ScalarField.const(pc.interval, 1.0),
                    'quadratic': ScalarField(pc.interval, lambda r: 1.0 + r[0] ** 2)}
        details = {}
        for name, f in variants.items():
            triple = product_structure(ProductChart(pc.mixed, pc.interval, f))
            details[name] = check_triple(triple, plan, tolerances=tol).residual
        details['entry'] = check_triple(entry.triple, plan, tolerances=tol).residual
        reports.append(CheckReport('product-f-independence', 'J_a algebra does not depend on f',
                                   max(details.values()), tol.algebra, plan.count, details))
    if entry.cone is not None:
        cc = entry.cone
        conn = levi_civita(entry.metric, scheme)
        reports.append(parallel_defect(conn, entry.triple, plan, scheme, tolerances=tol))
        recovered = cone_inverse(cc, entry.triple, scheme, conn)
        base = cc.base.mixed
        points = base.chart.sample(plan)
        details = {'phi': 0.0, 'xi': 0.0, 'eta': 0.0}
        for x in points:
            for orig, back in zip(base.triples, recovered.triples):
                for key, a, b in zip(('phi', 'xi', 'eta'), orig.at(x), back.at(x)):
                    details[key] = max(details[key], residual_norm(a, b))
        reports.append(CheckReport('cone-round-trip', 'xi_a = J_a(d_r), phi_a X = nabla_X xi_a, '
                                   'eta_a = g(xi_a, .)', max(details.values()), tol.nested, len(points), details))
        reports.append(_renamed(check_mixed_axioms(recovered, plan, tol.nested), 'cone-recovered-axioms'))
    if entry.circle_base is not None:
        reports.append(check_horizontal_restriction(entry.circle_base, entry.triple, plan, tolerances=tol))
    return reports


def run_einstein(entry: CatalogEntry, config: RunConfig) -> list[CheckReport]:
    plan, scheme, tol = config.plan, config.scheme, config.tolerances
    reports = []
    if entry.einstein_constant is not None:
        g = entry.metric if entry.metric is not None else entry.mixed.g
        conn = levi_civita(g, scheme)
        points = g.chart.sample(plan)
        lam = entry.einstein_constant
        worst = max(residual_norm(ricci(g, x, scheme, conn), lam * g(x)) for x in points)
        name = 'ricci-flat' if lam == 0 else 'einstein'
        reports.append(CheckReport(name, f'Ric = {lam:g} g', worst, tol.nested, len(points),
                                   {'einstein_constant': lam}))
    if entry.sasakian and entry.mixed is not None:
        reports.append(sasakian_defect(entry.mixed, scheme, plan, tolerances=tol))
    return reports


SUITES: dict[str, SuiteFn] = {
    'axioms': run_axioms,
    'averaging': run_averaging,
    'nijenhuis': run_nijenhuis,
    'lifts': run_lifts,
    'constructions': run_constructions,
    'einstein': run_einstein,
}


def run_suite(name: str, entry: CatalogEntry, config: RunConfig) -> list[CheckReport]:
    logger.debug(f"运行套件 {name}: {entry.id}")
    return SUITES[name](entry, config)
