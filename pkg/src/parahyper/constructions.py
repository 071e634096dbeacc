"""由混合 3-结构出发的三种构造

- 乘积 M × I 上的仿超复结构
- 锥 C(M) = M × ℝ₊，度量 dr² + r²g
- 平凡圆丛 M × S¹

坐标顺序总是 (底流形坐标, 新坐标)。
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from loguru import logger

from .algebra import block, residual_norm
from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import ApexIncluded, ChartMismatch, InvalidConfig, NonpositiveF
from .mixed3 import ContactTriple, MetricMixed, MixedTriple
from .report import CheckReport
from .smooth import (AffineConnection, Chart, FDScheme, MetricField, OperatorField, SamplePlan,
                     ScalarField, VectorField, jacobian, levi_civita, operator_derivative)
from .structures import EPSILON, ParaHypercomplexTriple, average_metric


@dataclass(frozen=True, eq=False)
class ProductChart:
    """M × I，f 是区间上的正函数"""

    mixed: MixedTriple
    interval: Chart
    f: ScalarField
    total: Chart = field(init=False)

    def __post_init__(self):
        if self.interval.dim != 1 or self.f.chart != self.interval:
            raise ChartMismatch("乘积的第二个因子必须是携带 f 的一维区间")
        probes = np.concatenate([np.linspace(self.interval.lo[0], self.interval.hi[0], 33),
                                 self.interval.sample(SamplePlan())[:, 0]])
        worst = min(float(self.f(np.array([r]))) for r in probes)
        if not worst > 0:
            raise NonpositiveF(f"f 在区间 {self.interval.name} 上取到非正值 {worst:.3e}")
        object.__setattr__(self, 'total', self.mixed.chart.product(self.interval))

    @property
    def base_dim(self) -> int:
        return self.mixed.chart.dim


def product_structure(pc: ProductChart) -> ParaHypercomplexTriple:
    """J_α = [[φ_α, ξ_α/f], [−f η_α, 0]]

    Args:
        pc (ProductChart): 乘积坐标卡

    Returns:
        ParaHypercomplexTriple: M × I 上的三元组
    """
    d = pc.base_dim

    def make(t: ContactTriple) -> OperatorField:
        def value(p):
            phi, xi, eta = t.at(p[:d])
            scale = float(pc.f(p[d:]))
            return block(phi, xi / scale, -scale * eta, 0.0)
        return OperatorField(pc.total, value, constant=t.constant and pc.f.constant)

    return ParaHypercomplexTriple.from_operators(*(make(t) for t in pc.mixed.triples))


def _split_seed(total: Chart, g: MetricField) -> MetricField:
    d = g.chart.dim
    return MetricField(total, lambda p: block(g(p[:d]), np.zeros(d), np.zeros(d), 1.0),
                       constant=g.constant)


def product_seed(pc: ProductChart, g: MetricField) -> MetricField:
    """π*g ⊕ dr²"""
    if g.chart != pc.mixed.chart:
        raise ChartMismatch("度量与乘积的底流形不一致")
    return _split_seed(pc.total, g)


def product_metric(pc: ProductChart, g: MetricField, plan: Optional[SamplePlan] = None) -> MetricField:
    """把 π*g ⊕ dr² 对乘积三元组平均"""
    return average_metric(product_seed(pc, g), product_structure(pc), plan)


@dataclass(frozen=True, eq=False)
class ConeChart:
    """M × [r_lo, r_hi]，顶点必须在差分边带之外"""

    base: MetricMixed
    r_lo: float = 0.5
    r_hi: float = 2.0
    scheme: FDScheme = field(default_factory=FDScheme)
    total: Chart = field(init=False)

    def __post_init__(self):
        if not self.r_lo < self.r_hi:
            raise InvalidConfig(f"锥的 r 区间无效: [{self.r_lo}, {self.r_hi}]")
        if self.r_lo - self.scheme.collar <= 0:
            raise ApexIncluded(f"r 区间 [{self.r_lo}, {self.r_hi}] 的差分边带包含了锥顶点")
        radial = Chart('r', (self.r_lo,), (self.r_hi,))
        object.__setattr__(self, 'total', self.base.chart.product(radial, f"C({self.base.chart.name})"))

    @property
    def base_dim(self) -> int:
        return self.base.chart.dim


def cone_metric(cc: ConeChart) -> MetricField:
    """dr² + r²g"""
    d = cc.base_dim
    g = cc.base.g
    return MetricField(cc.total, lambda p: block(p[d] ** 2 * g(p[:d]), np.zeros(d), np.zeros(d), 1.0))


def cone_structure(cc: ConeChart) -> ParaHypercomplexTriple:
    """J_α X = φ_α X − η_α(X)Φ，J_α Φ = ξ_α，Φ = r∂_r

    公式作用在重新定向的 (φ, −ξ, −η) 上，矩阵为 [[φ, −ξ/r], [r η, 0]]。
    """
    d = cc.base_dim

    def make(t: ContactTriple) -> OperatorField:
        def value(p):
            phi, xi, eta = t.at(p[:d])
            r = p[d]
            return block(phi, -xi / r, r * eta, 0.0)
        return OperatorField(cc.total, value)

    return ParaHypercomplexTriple.from_operators(*(make(t) for t in cc.base.mixed.triples))


def cone_inverse(cc: ConeChart, triple: ParaHypercomplexTriple, scheme: FDScheme,
                 conn: Optional[AffineConnection] = None) -> MixedTriple:
    """由锥上的平行结构在 r = 1 处还原混合 3-结构

    ξ_α = J_α(∂_r)，φ_α X = ∇_X ξ_α，η_α(X) = g(ξ_α, X)，最后再把定向翻转回来。

    Args:
        cc (ConeChart): 锥坐标卡
        triple (ParaHypercomplexTriple): 锥上的三元组
        scheme (FDScheme): 有限差分方案
        conn (Optional[AffineConnection]): 锥度量的 Levi-Civita 联络

    Returns:
        MixedTriple: 底流形上的混合 3-结构
    """
    if triple.chart != cc.total:
        raise ChartMismatch("三元组不在锥坐标卡上")
    if not cc.r_lo <= 1.0 <= cc.r_hi:
        raise InvalidConfig(f"r = 1 不在锥的区间 [{cc.r_lo}, {cc.r_hi}] 内")
    conn = conn or levi_civita(cone_metric(cc), scheme)
    d = cc.base_dim
    chart = cc.base.chart
    radial = np.zeros(d + 1)
    radial[d] = 1.0
    g = cc.base.g

    def recover(s, epsilon) -> ContactTriple:
        euler = VectorField(cc.total, lambda p: s(p) @ radial)

        def lifted(y):
            return np.concatenate([y, [1.0]])

        def xi(y):
            return euler(lifted(y))[:d]

        def phi(y):
            p = lifted(y)
            v = euler(p)
            dv = jacobian(euler, p, scheme)[:, :d]
            gamma = conn(p)[:, :d, :]
            return (dv + np.einsum('kij,j->ki', gamma, v))[:d]

        def eta(y):
            return g(y) @ xi(y)

        # 翻转回 (φ, −ξ, −η)
        return ContactTriple(OperatorField(chart, phi), VectorField(chart, lambda y: -xi(y)),
                             VectorField(chart, lambda y: -eta(y)), epsilon)

    logger.debug(f"在 {chart.name} 上从锥还原混合 3-结构")
    return MixedTriple(tuple(recover(s, eps) for s, eps in zip(triple.structures, EPSILON)))


def parallel_defect(conn: AffineConnection, triple: ParaHypercomplexTriple, plan: SamplePlan,
                    scheme: FDScheme, tol: Optional[float] = None,
                    tolerances: Tolerances = DEFAULT_TOLERANCES) -> CheckReport:
    """max |∇J_α|，平行的三元组即仿超 Kähler"""
    if conn.chart != triple.chart:
        raise ChartMismatch("联络与三元组不在同一坐标卡上")
    tol = tol if tol is not None else tolerances.nested
    points = triple.chart.sample(plan)
    per_alpha = [0.0, 0.0, 0.0]
    for x in points:
        for a, s in enumerate(triple.structures):
            d = operator_derivative(conn, s.op, x, scheme)
            per_alpha[a] = max(per_alpha[a], float(np.max(np.abs(d))))
    return CheckReport('parallel', 'nabla J_a = 0', max(per_alpha), tol, len(points),
                       {f'alpha{a + 1}': v for a, v in enumerate(per_alpha)})


def circle_chart(base: Chart) -> Chart:
    return base.product(Chart('S1', (0.0,), (2 * np.pi,)))


def circle_bundle_structure(mm: MetricMixed) -> ParaHypercomplexTriple:
    """J_α X^h = (φ_α X)^h + η_α(X)Θ，J_α Θ = −ξ_α^h，矩阵为 [[φ, −ξ], [η, 0]]"""
    d = mm.chart.dim
    chart = circle_chart(mm.chart)

    def make(t: ContactTriple) -> OperatorField:
        def value(p):
            phi, xi, eta = t.at(p[:d])
            return block(phi, -xi, eta, 0.0)
        return OperatorField(chart, value, constant=t.constant)

    return ParaHypercomplexTriple.from_operators(*(make(t) for t in mm.mixed.triples))


def circle_seed(mm: MetricMixed) -> MetricField:
    """π*g + dt²"""
    return _split_seed(circle_chart(mm.chart), mm.g)


def circle_bundle_metric(mm: MetricMixed, plan: Optional[SamplePlan] = None) -> MetricField:
    """把 π*g + dt² 对圆丛三元组平均；g 相容时结果就是种子本身"""
    return average_metric(circle_seed(mm), circle_bundle_structure(mm), plan)


def check_horizontal_restriction(mm: MetricMixed, triple: ParaHypercomplexTriple, plan: SamplePlan,
                                 tol: Optional[float] = None,
                                 tolerances: Tolerances = DEFAULT_TOLERANCES) -> CheckReport:
    """圆丛三元组限制在水平向量上，去掉 Θ 分量后等于 φ_α，Θ 分量等于 η_α"""
    tol = tol if tol is not None else tolerances.for_field(mm.mixed.is_constant)
    d = mm.chart.dim
    points = triple.chart.sample(plan)
    phi_part = theta_part = 0.0
    for p in points:
        for s, t in zip(triple.structures, mm.mixed.triples):
            phi, _, eta = t.at(p[:d])
            j = s(p)
            phi_part = max(phi_part, residual_norm(j[:d, :d], phi))
            theta_part = max(theta_part, residual_norm(j[d, :d], eta))
    return CheckReport('circle-horizontal', 'J_a X^h = (phi_a X)^h + eta_a(X) Theta',
                       max(phi_part, theta_part), tol, len(points),
                       {'phi': phi_part, 'theta': theta_part})
