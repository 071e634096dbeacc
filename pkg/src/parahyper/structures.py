"""几乎积/复/仿超复结构模块

负责结构代数的检查、度量相容性、度量平均化、适配标架、
Nijenhuis 张量以及“两个可积推出第三个”的恒等式。

符号约定: ε = (1, −1, −1)，J_α² = −ε_α Id。
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from loguru import logger

from .algebra import (check_nondegenerate, pseudo_orthonormal_frame, pullback,
                      residual_norm)
from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import (ChartMismatch, DegenerateForm, DegenerateMetric, DegenerateResult,
                     IncompatibleInputs, InvalidConfig)
from .report import CheckReport
from .smooth import (Chart, FDScheme, MetricField, OperatorField, SamplePlan, VectorField,
                     apply_operator, combine, jacobian, lie_bracket)


EPSILON = (1, -1, -1)
EVEN_PERMUTATIONS = ((0, 1, 2), (1, 2, 0), (2, 0, 1))


@dataclass(frozen=True, eq=False)
class StructureField:
    """ε=+1 为几乎复结构 (J² = −Id)，ε=−1 为几乎积结构 (P² = Id)"""

    op: OperatorField
    epsilon: int

    def __post_init__(self):
        if self.epsilon not in (1, -1):
            raise InvalidConfig(f"ε 只能是 ±1: {self.epsilon}")

    @property
    def chart(self) -> Chart:
        return self.op.chart

    @property
    def constant(self) -> bool:
        return self.op.constant

    def __call__(self, point) -> np.ndarray:
        return self.op(point)

    def apply(self, vec: VectorField) -> VectorField:
        return apply_operator(self.op, vec)


@dataclass(frozen=True, eq=False)
class ParaHypercomplexTriple:
    """(J1, J2, J3)，J2J1 = −J1J2 = J3"""

    J1: StructureField
    J2: StructureField
    J3: StructureField

    def __post_init__(self):
        signs = tuple(s.epsilon for s in self.structures)
        if signs != EPSILON:
            raise InvalidConfig(f"三元组的 ε 必须是 {EPSILON}: {signs}")
        chart = self.J1.chart
        if any(s.chart != chart for s in self.structures):
            raise ChartMismatch("三元组的三个结构不在同一坐标卡上")

    @classmethod
    def from_operators(cls, op1: OperatorField, op2: OperatorField,
                       op3: OperatorField) -> 'ParaHypercomplexTriple':
        """由三个算子场构造，ε 由构造函数固定"""
        return cls(*(StructureField(op, eps) for op, eps in zip((op1, op2, op3), EPSILON)))

    @classmethod
    def constant(cls, chart: Chart, matrices) -> 'ParaHypercomplexTriple':
        return cls.from_operators(*(OperatorField.const(chart, m) for m in matrices))

    @property
    def structures(self) -> tuple[StructureField, StructureField, StructureField]:
        return (self.J1, self.J2, self.J3)

    @property
    def chart(self) -> Chart:
        return self.J1.chart

    @property
    def is_constant(self) -> bool:
        return all(s.constant for s in self.structures)

    def matrices(self, point) -> list[np.ndarray]:
        return [s(point) for s in self.structures]


def conjugate_triple(t: ParaHypercomplexTriple, a, a_inv) -> ParaHypercomplexTriple:
    """逐点共轭 J ↦ A(x) J A(x)⁻¹，保持结构代数但一般破坏可积性"""
    ops = [OperatorField(t.chart, (lambda s: (lambda x: a(x) @ s(x) @ a_inv(x)))(s))
           for s in t.structures]
    return ParaHypercomplexTriple.from_operators(*ops)


def _tolerance(tol: Optional[float], constant: bool, tolerances: Tolerances) -> float:
    return tol if tol is not None else tolerances.for_field(constant)


def check_structure(s: StructureField, plan: SamplePlan, tol: Optional[float] = None,
                    tolerances: Tolerances = DEFAULT_TOLERANCES) -> CheckReport:
    """检查 s² = −ε Id；对积结构还要求至少一个采样点上 s ≠ ±Id

    Args:
        s (StructureField): 结构
        plan (SamplePlan): 采样方案
        tol (Optional[float]): 容差，默认常系数 1e-12、其余 1e-9

    Returns:
        CheckReport: 检查报告
    """
    tol = _tolerance(tol, s.constant, tolerances)
    points = s.chart.sample(plan)
    n = s.chart.dim
    square = 0.0
    witness = 0.0
    for x in points:
        m = s(x)
        square = max(square, residual_norm(m @ m, -s.epsilon * np.eye(n)))
        witness = max(witness, min(residual_norm(m, np.eye(n)), residual_norm(m, -np.eye(n))))
    residual = square
    details = {'square': square}
    if s.epsilon == -1:
        details['nontrivial_witness'] = witness
        if witness <= tol:
            # P = ±Id 不是几乎积结构
            logger.debug("积结构在所有采样点上都等于 ±Id")
            residual = max(square, 1.0)
    name = 'almost-complex' if s.epsilon == 1 else 'almost-product'
    anchor = 'J^2 = -Id' if s.epsilon == 1 else 'P^2 = Id, P != +-Id'
    return CheckReport(name, anchor, residual, tol, len(points), details)


def check_triple(t: ParaHypercomplexTriple, plan: SamplePlan, tol: Optional[float] = None,
                 tolerances: Tolerances = DEFAULT_TOLERANCES) -> CheckReport:
    """检查 J2J1 = J3 与 J1J2 = −J3"""
    tol = _tolerance(tol, t.is_constant, tolerances)
    points = t.chart.sample(plan)
    left = right = 0.0
    for x in points:
        j1, j2, j3 = t.matrices(x)
        left = max(left, residual_norm(j2 @ j1, j3))
        right = max(right, residual_norm(j1 @ j2, -j3))
    return CheckReport('triple-algebra', 'J2 J1 = -J1 J2 = J3', max(left, right), tol, len(points),
                       {'J2J1-J3': left, 'J1J2+J3': right})


def compatibility_defect(g: MetricField, t: ParaHypercomplexTriple, plan: SamplePlan,
                         tol: Optional[float] = None,
                         tolerances: Tolerances = DEFAULT_TOLERANCES) -> CheckReport:
    """max_α |g(J_α·, J_α·) − ε_α g|"""
    if g.chart.dim != t.chart.dim:
        raise ChartMismatch(f"度量与三元组维度不一致: {g.chart.dim} 与 {t.chart.dim}")
    tol = _tolerance(tol, t.is_constant and g.constant, tolerances)
    points = t.chart.sample(plan)
    per_alpha = [0.0, 0.0, 0.0]
    for x in points:
        metric = g(x)
        check_nondegenerate(metric, error=DegenerateMetric)
        for a, (s, eps) in enumerate(zip(t.structures, EPSILON)):
            per_alpha[a] = max(per_alpha[a], residual_norm(pullback(metric, s(x)), eps * metric))
    details = {f'alpha{a + 1}': v for a, v in enumerate(per_alpha)}
    return CheckReport('metric-compatibility', 'g(J_a X, J_a Y) = eps_a g(X, Y)', max(per_alpha), tol,
                       len(points), details)


def average_form(h: np.ndarray, matrices) -> np.ndarray:
    """逐点平均 ¼[h + Σ ε_α h(J_α·, J_α·)]"""
    return 0.25 * (h + sum(eps * pullback(h, j) for eps, j in zip(EPSILON, matrices)))


def average_metric(h: MetricField, t: ParaHypercomplexTriple,
                   plan: Optional[SamplePlan] = None) -> MetricField:
    """由任意度量 h 平均出仿超厄米度量

    结果在采样点上的非退化性是检查出来的，不是假设的。

    Args:
        h (MetricField): 种子度量
        t (ParaHypercomplexTriple): 仿超复结构
        plan (Optional[SamplePlan]): 检查非退化性的采样方案

    Returns:
        MetricField: 平均后的度量
    """
    if h.chart.dim != t.chart.dim:
        raise ChartMismatch(f"种子度量与三元组维度不一致: {h.chart.dim} 与 {t.chart.dim}")
    g = MetricField(t.chart, lambda x: average_form(h(x), t.matrices(x)),
                    constant=h.constant and t.is_constant)
    for x in t.chart.sample(plan or SamplePlan()):
        try:
            check_nondegenerate(g(x))
        except DegenerateForm as e:
            raise DegenerateResult(f"平均后的形式在点 {x} 处退化: {e}") from e
    return g


def adapted_frame(g: MetricField, t: ParaHypercomplexTriple, point,
                  tol: float = 1e-6) -> list[np.ndarray]:
    """适配标架 {E_i, J1E_i, J2E_i, J3E_i}

    Args:
        g (MetricField): 相容度量
        t (ParaHypercomplexTriple): 仿超复结构
        point: 坐标点
        tol (float): 相容性容差

    Returns:
        list[np.ndarray]: 4m 个向量，Gram 矩阵为对角 ±1
    """
    metric = g(point)
    check_nondegenerate(metric, error=DegenerateMetric)
    mats = t.matrices(point)
    defect = max(residual_norm(pullback(metric, j), eps * metric) for eps, j in zip(EPSILON, mats))
    if defect > tol:
        raise IncompatibleInputs(f"度量与三元组不相容，缺陷 {defect:.3e}")
    if metric.shape[0] % 4:
        raise IncompatibleInputs(f"仿超复流形的维度必须是 4 的倍数: {metric.shape[0]}")
    return pseudo_orthonormal_frame(metric, mats)


# ---------------------------------------------------------------------------
# Nijenhuis 张量
# ---------------------------------------------------------------------------

def nijenhuis(s: StructureField, X: VectorField, Y: VectorField, scheme: FDScheme) -> VectorField:
    """N(X,Y) = [JX,JY] − J[X,JY] − J[JX,Y] − ε[X,Y]，由李括号计算"""
    jx = s.apply(X)
    jy = s.apply(Y)
    outer = lie_bracket(jx, jy, scheme)
    left = lie_bracket(X, jy, scheme)
    right = lie_bracket(jx, Y, scheme)
    plain = lie_bracket(X, Y, scheme)

    def value(x):
        j = s(x)
        return outer(x) - j @ left(x) - j @ right(x) - s.epsilon * plain(x)

    return VectorField(X.chart, value, constant=s.constant and X.constant and Y.constant)


def nijenhuis_components(s: StructureField, point, scheme: FDScheme) -> np.ndarray:
    """坐标公式 N^k_ij = J^l_i ∂_l J^k_j − J^l_j ∂_l J^k_i − J^k_l(∂_i J^l_j − ∂_j J^l_i)

    坐标向量场的括号为零，所以 ε 项不出现。
    """
    j = s(point)
    dj = jacobian(s.op, point, scheme)  # dj[k, j, l] = ∂_l J^k_j
    directional = np.einsum('li,kjl->kij', j, dj)
    curl = np.einsum('kl,lji->kij', j, dj)
    return directional - directional.transpose(0, 2, 1) - (curl - curl.transpose(0, 2, 1))


def check_integrable(s: StructureField, X: VectorField, Y: VectorField, plan: SamplePlan,
                     scheme: FDScheme, tol: Optional[float] = None,
                     tolerances: Tolerances = DEFAULT_TOLERANCES, name: str = 'nijenhuis') -> CheckReport:
    """max |N(X,Y)|，以及与坐标公式的差"""
    tol = tol if tol is not None else tolerances.integrable
    field = nijenhuis(s, X, Y, scheme)
    points = s.chart.sample(plan)
    size = oracle = 0.0
    for x in points:
        value = field(x)
        size = max(size, float(np.max(np.abs(value))))
        expected = np.einsum('kij,i,j->k', nijenhuis_components(s, x, scheme), X(x), Y(x))
        oracle = max(oracle, residual_norm(value, expected))
    return CheckReport(name, 'N(X,Y) = 0', size, tol, len(points), {'coordinate_oracle': oracle})


def check_two_imply_third(t: ParaHypercomplexTriple, X: VectorField, Y: VectorField,
                          scheme: FDScheme, plan: SamplePlan, tol: Optional[float] = None,
                          tolerances: Tolerances = DEFAULT_TOLERANCES) -> CheckReport:
    """对每个偶置换 (α,β,γ) 检查 2N_α(X,Y) 等于八项右端"""
    tol = tol if tol is not None else tolerances.two_imply_third
    points = t.chart.sample(plan)
    s = t.structures
    details = {}
    for alpha, beta, gamma in EVEN_PERMUTATIONS:
        ea, eb, ec = EPSILON[alpha], EPSILON[beta], EPSILON[gamma]
        sb, sc = s[beta], s[gamma]
        jb_x, jb_y = sb.apply(X), sb.apply(Y)
        jc_x, jc_y = sc.apply(X), sc.apply(Y)
        lhs = nijenhuis(s[alpha], X, Y, scheme)
        terms = [
            nijenhuis(sb, jc_x, jc_y, scheme),
            nijenhuis(sc, jb_x, jb_y, scheme),
            apply_operator(sb.op, nijenhuis(sc, jb_x, Y, scheme)),
            apply_operator(sb.op, nijenhuis(sc, X, jb_y, scheme)),
            apply_operator(sc.op, nijenhuis(sb, jc_x, Y, scheme)),
            apply_operator(sc.op, nijenhuis(sb, X, jc_y, scheme)),
            nijenhuis(sb, X, Y, scheme),
            nijenhuis(sc, X, Y, scheme),
        ]
        rhs = combine([1.0, 1.0, -1.0, -1.0, -1.0, -1.0, ea * eb, ea * ec], terms)
        worst = max(residual_norm(2.0 * lhs(x), rhs(x)) for x in points)
        details[f'alpha{alpha + 1}'] = worst
    return CheckReport('two-imply-third', '2N_a = N_b(J_c., J_c.) + ... (even permutations)',
                       max(details.values()), tol, len(points), details)
