"""混合 3-结构模块

一个几乎切触结构 (ε=1) 与两个 Lorentz 几乎仿切触结构 (ε=−1)
满足相互关系时构成混合 3-结构。本模块负责公理检查、相容度量的
四步构造、伪正交标架以及 Sasaki 型缺陷的测量。
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from loguru import logger

from .algebra import (check_nondegenerate, is_symmetric, pseudo_orthonormal_frame, pullback,
                      residual_norm, tensor)
from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import (ChartMismatch, DegenerateForm, DegenerateIntermediate, DegenerateMetric,
                     IncompatibleInputs, InvalidConfig)
from .report import CheckReport
from .smooth import (Chart, FDScheme, MetricField, OperatorField, SamplePlan, VectorField,
                     levi_civita, nabla_operator, operator_derivative)
from .structures import EPSILON, EVEN_PERMUTATIONS


@dataclass(frozen=True, eq=False)
class ContactTriple:
    """(φ, ξ, η)；η 以余向量分量存放在 VectorField 中"""

    phi: OperatorField
    xi: VectorField
    eta: VectorField
    epsilon: int

    def __post_init__(self):
        if self.epsilon not in (1, -1):
            raise InvalidConfig(f"ε 只能是 ±1: {self.epsilon}")
        if self.phi.chart != self.xi.chart or self.phi.chart != self.eta.chart:
            raise ChartMismatch("φ、ξ、η 不在同一坐标卡上")

    @property
    def chart(self) -> Chart:
        return self.phi.chart

    @property
    def constant(self) -> bool:
        return self.phi.constant and self.xi.constant and self.eta.constant

    def at(self, point) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.phi(point), self.xi(point), self.eta(point)

    def reoriented(self) -> 'ContactTriple':
        """(φ, −ξ, −η)，仍满足同样的公理"""
        xi, eta = self.xi, self.eta
        return ContactTriple(self.phi,
                             VectorField(self.chart, lambda x: -xi(x), constant=xi.constant),
                             VectorField(self.chart, lambda x: -eta(x), constant=eta.constant),
                             self.epsilon)


@dataclass(frozen=True, eq=False)
class MixedTriple:
    triples: tuple[ContactTriple, ContactTriple, ContactTriple]

    def __post_init__(self):
        signs = tuple(t.epsilon for t in self.triples)
        if signs != EPSILON:
            raise InvalidConfig(f"混合 3-结构的 ε 必须是 {EPSILON}: {signs}")
        if any(t.chart != self.chart for t in self.triples):
            raise ChartMismatch("混合 3-结构的三个结构不在同一坐标卡上")

    @classmethod
    def constant(cls, chart: Chart, phis, xis, etas) -> 'MixedTriple':
        """由常矩阵构造"""
        return cls(tuple(ContactTriple(OperatorField.const(chart, p), VectorField.const(chart, x),
                                       VectorField.const(chart, e), eps)
                         for p, x, e, eps in zip(phis, xis, etas, EPSILON)))

    @property
    def chart(self) -> Chart:
        return self.triples[0].chart

    @property
    def is_constant(self) -> bool:
        return all(t.constant for t in self.triples)

    def reoriented(self) -> 'MixedTriple':
        return MixedTriple(tuple(t.reoriented() for t in self.triples))


@dataclass(frozen=True, eq=False)
class MetricMixed:
    mixed: MixedTriple
    g: MetricField

    def __post_init__(self):
        if self.g.chart != self.mixed.chart:
            raise ChartMismatch("度量与混合 3-结构不在同一坐标卡上")

    @property
    def chart(self) -> Chart:
        return self.mixed.chart

    def reoriented(self) -> 'MetricMixed':
        return MetricMixed(self.mixed.reoriented(), self.g)


def check_contact(t: ContactTriple, plan: SamplePlan, tol: Optional[float] = None,
                  tolerances: Tolerances = DEFAULT_TOLERANCES) -> CheckReport:
    """检查 φ² = −εI + η⊗ξ、η(ξ) = ε，并附带可推出的 φξ = 0、η∘φ = 0

    Args:
        t (ContactTriple): 切触型三元组
        plan (SamplePlan): 采样方案
        tol (Optional[float]): 容差

    Returns:
        CheckReport: 检查报告，details 中为各项残差
    """
    tol = tol if tol is not None else tolerances.for_field(t.constant)
    points = t.chart.sample(plan)
    n = t.chart.dim
    square = pairing = phi_xi = eta_phi = 0.0
    for x in points:
        phi, xi, eta = t.at(x)
        square = max(square, residual_norm(phi @ phi, -t.epsilon * np.eye(n) + tensor(xi, eta)))
        pairing = max(pairing, abs(float(eta @ xi) - t.epsilon))
        phi_xi = max(phi_xi, residual_norm(phi @ xi, np.zeros(n)))
        eta_phi = max(eta_phi, residual_norm(eta @ phi, np.zeros(n)))
    details = {'square': square, 'pairing': pairing, 'phi_xi': phi_xi, 'eta_phi': eta_phi}
    name = 'almost-contact' if t.epsilon == 1 else 'lorentzian-paracontact'
    return CheckReport(name, 'phi^2 = -eps I + eta (x) xi, eta(xi) = eps', max(details.values()), tol,
                       len(points), details)


def mixed_axiom_residuals(m: MixedTriple, point) -> dict[str, float]:
    """一个点上各条混合公理的残差，按公理的先后顺序排列"""
    data = [t.at(point) for t in m.triples]
    residuals = {'mixed-eta-xi': 0.0, 'mixed-phi-xi': 0.0, 'mixed-eta-phi': 0.0, 'mixed-phi-phi': 0.0}
    for a in range(3):
        for b in range(3):
            if a != b:
                residuals['mixed-eta-xi'] = max(residuals['mixed-eta-xi'],
                                                abs(float(data[a][2] @ data[b][1])))
    for a, b, c in EVEN_PERMUTATIONS:
        (pa, xa, ea), (pb, xb, eb), (pc, xc, ec) = data[a], data[b], data[c]
        sign = EPSILON[c]
        residuals['mixed-phi-xi'] = max(residuals['mixed-phi-xi'],
                                        residual_norm(pa @ xb, sign * xc),
                                        residual_norm(-(pb @ xa), sign * xc))
        residuals['mixed-eta-phi'] = max(residuals['mixed-eta-phi'],
                                         residual_norm(ea @ pb, sign * ec),
                                         residual_norm(-(eb @ pa), sign * ec))
        residuals['mixed-phi-phi'] = max(residuals['mixed-phi-phi'],
                                         residual_norm(pa @ pb - tensor(xa, eb), sign * pc),
                                         residual_norm(-(pb @ pa) + tensor(xb, ea), sign * pc))
    return residuals


def check_mixed_axioms(m: MixedTriple, plan: SamplePlan, tol: Optional[float] = None,
                       tolerances: Tolerances = DEFAULT_TOLERANCES) -> CheckReport:
    """对所有偶置换检查混合 3-结构的四条相互关系"""
    tol = tol if tol is not None else tolerances.for_field(m.is_constant)
    points = m.chart.sample(plan)
    details: dict[str, float] = {}
    for x in points:
        for key, value in mixed_axiom_residuals(m, x).items():
            details[key] = max(details.get(key, 0.0), value)
    return CheckReport('mixed-axioms', 'eta_a(xi_b) = 0, phi_a xi_b = eps_c xi_c, '
                       'eta_a phi_b = eps_c eta_c, phi_a phi_b - eta_b (x) xi_a = eps_c phi_c',
                       max(details.values()), tol, len(points), details)


def check_metric_compatibility(mm: MetricMixed, plan: SamplePlan, tol: Optional[float] = None,
                               tolerances: Tolerances = DEFAULT_TOLERANCES) -> CheckReport:
    """g(φX, φY) = εg(X,Y) − η(X)η(Y) 与 g(X, ξ) = η(X)"""
    tol = tol if tol is not None else tolerances.for_field(mm.mixed.is_constant and mm.g.constant)
    points = mm.chart.sample(plan)
    isometry = dual = 0.0
    for x in points:
        g = mm.g(x)
        for t in mm.mixed.triples:
            phi, xi, eta = t.at(x)
            isometry = max(isometry, residual_norm(pullback(g, phi), t.epsilon * g - tensor(eta, eta)))
            dual = max(dual, residual_norm(g @ xi, eta))
    return CheckReport('mixed-metric', 'g(phi_a X, phi_a Y) = eps_a g(X, Y) - eta_a(X) eta_a(Y), '
                       'g(X, xi_a) = eta_a(X)', max(isometry, dual), tol, len(points),
                       {'isometry': isometry, 'dual': dual})


def compatible_form(f: np.ndarray, data) -> list[np.ndarray]:
    """四步构造在一个点上的中间结果 [u, v, h, g]

    Args:
        f (np.ndarray): 种子度量
        data: 三个 (φ, ξ, η)

    Returns:
        list[np.ndarray]: 四个对称形式
    """
    (p1, _, e1), (p2, _, e2), (p3, _, e3) = data
    u = pullback(f, p1 @ p1) + tensor(e1, e1)
    v = pullback(u, p2 @ p2) - tensor(e2, e2)
    h = pullback(v, p3 @ p3) - tensor(e3, e3)
    g = 0.25 * (h + sum(eps * (pullback(h, p) + tensor(e, e)) for eps, (p, _, e) in zip(EPSILON, data)))
    return [u, v, h, g]


def compatible_metric(m: MixedTriple, f: MetricField, plan: Optional[SamplePlan] = None) -> MetricField:
    """由任意半黎曼度量 f 四步构造相容度量

    每一步的中间形式都在采样点上检查非退化性。

    Args:
        m (MixedTriple): 混合 3-结构
        f (MetricField): 种子度量
        plan (Optional[SamplePlan]): 检查非退化性的采样方案

    Returns:
        MetricField: 相容度量
    """
    if f.chart != m.chart:
        raise ChartMismatch(f"种子度量与混合 3-结构不在同一坐标卡上: {f.chart.name} 与 {m.chart.name}")
    points = m.chart.sample(plan or SamplePlan())
    for x in points:
        seed = f(x)
        if not is_symmetric(seed):
            raise IncompatibleInputs(f"种子度量在点 {x} 处不对称")
        forms = compatible_form(seed, [t.at(x) for t in m.triples])
        for step, form in enumerate(forms, start=1):
            try:
                check_nondegenerate(form)
            except DegenerateForm as e:
                raise DegenerateIntermediate(step, f"点 {x} 处: {e}") from e
    logger.debug(f"四步构造在 {len(points)} 个采样点上非退化")
    return MetricField(m.chart, lambda x: compatible_form(f(x), [t.at(x) for t in m.triples])[3],
                       constant=f.constant and m.is_constant)


def mixed_frame(mm: MetricMixed, point) -> list[np.ndarray]:
    """伪正交标架 {(E_i, φ1E_i, φ2E_i, φ3E_i), ξ1, ξ2, ξ3}

    Args:
        mm (MetricMixed): 带相容度量的混合 3-结构
        point: 坐标点

    Returns:
        list[np.ndarray]: 4n+3 个向量，Gram 矩阵为对角 ±1
    """
    g = mm.g(point)
    check_nondegenerate(g, error=DegenerateMetric)
    data = [t.at(point) for t in mm.mixed.triples]
    xis = [xi for _, xi, _ in data]
    frame = pseudo_orthonormal_frame(g, [phi for phi, _, _ in data], start=xis)
    return frame[3:] + frame[:3]


def sasakian_defect(mm: MetricMixed, scheme: FDScheme, plan: SamplePlan, tol: Optional[float] = None,
                    tolerances: Tolerances = DEFAULT_TOLERANCES, pairs: int = 3) -> CheckReport:
    """混合 Sasaki 3-结构的缺陷

    α=1 比较 (∇_Xφ)Y 与 g(X,Y)ξ − η(Y)X；α=2,3 比较 ε_α[g(φX,φY)ξ + η(Y)φ²X]。
    不带 ε_α 的原始残差记在 details 的 literal_alpha2/3 中。

    Args:
        mm (MetricMixed): 带相容度量的混合 3-结构
        scheme (FDScheme): 有限差分方案
        plan (SamplePlan): 采样方案
        tol (Optional[float]): 容差，默认为两层嵌套的容差
        pairs (int): 每个采样点上随机 (X, Y) 的对数

    Returns:
        CheckReport: 检查报告
    """
    tol = tol if tol is not None else tolerances.nested
    conn = levi_civita(mm.g, scheme)
    points = mm.chart.sample(plan)
    rng = np.random.default_rng(plan.seed + 1)
    n = mm.chart.dim
    details = {'alpha1': 0.0, 'alpha2': 0.0, 'alpha3': 0.0, 'literal_alpha2': 0.0, 'literal_alpha3': 0.0}
    for x in points:
        g = mm.g(x)
        derivs = [operator_derivative(conn, t.phi, x, scheme) for t in mm.mixed.triples]
        for _ in range(pairs):
            vx, vy = rng.standard_normal(n), rng.standard_normal(n)
            for a, (t, d) in enumerate(zip(mm.mixed.triples, derivs), start=1):
                phi, xi, eta = t.at(x)
                lhs = nabla_operator(d, vx) @ vy
                if a == 1:
                    rhs = float(vx @ g @ vy) * xi - float(eta @ vy) * vx
                    details['alpha1'] = max(details['alpha1'], residual_norm(lhs, rhs))
                    continue
                para = float((phi @ vx) @ g @ (phi @ vy)) * xi + float(eta @ vy) * (phi @ phi @ vx)
                details[f'alpha{a}'] = max(details[f'alpha{a}'], residual_norm(lhs, t.epsilon * para))
                details[f'literal_alpha{a}'] = max(details[f'literal_alpha{a}'], residual_norm(lhs, para))
    residual = max(details['alpha1'], details['alpha2'], details['alpha3'])
    return CheckReport('mixed-sasakian', '(nabla_X phi_a) Y = g(X, Y) xi_a - eta_a(Y) X',
                       residual, tol, len(points), details)
