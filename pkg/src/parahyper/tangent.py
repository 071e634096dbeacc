"""切丛模块

在诱导坐标 (x, u) 下实现水平/垂直提升、联络映射、Sasaki 度量、
由几乎仿厄米结构 (P, g) 提升出的几乎仿超复结构，以及括号恒等式和
提升结构的 Nijenhuis 闭式的数值验证。

约定: X^h = (X, −Γ(X, u))，X^v = (0, X)，K(a, b) = b + Γ(u, a)。
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from loguru import logger

from .algebra import check_nondegenerate, pullback, residual_norm
from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import ChartMismatch, IncompatibleInputs, InvalidConfig, OutOfDomain
from .report import CheckReport
from .smooth import (AffineConnection, Chart, FDScheme, MetricField, OperatorField, SamplePlan,
                     VectorField, apply_riemann, lie_bracket, levi_civita, nabla_operator,
                     operator_derivative, riemann_tensor)
from .structures import ParaHypercomplexTriple, StructureField, nijenhuis


HORIZONTAL = 'horizontal'
VERTICAL = 'vertical'

# 闭式两端都不小于该值时，比较才能区分出曲率项
WITNESS_FLOOR = 5e-2
SIGN_FLOOR = 1e-6


@dataclass(frozen=True, eq=False)
class TangentChart:
    """切丛上的坐标卡 base × [−r, r]^m"""

    base: Chart
    conn: AffineConnection
    fiber_radius: float = 1.0
    total: Chart = field(init=False)

    def __post_init__(self):
        if self.conn.chart != self.base:
            raise ChartMismatch("联络与底流形不在同一坐标卡上")
        if not self.fiber_radius > 0:
            raise InvalidConfig(f"纤维半径必须为正数: {self.fiber_radius}")
        fiber = Chart.cube('fiber', self.base.dim, -self.fiber_radius, self.fiber_radius)
        object.__setattr__(self, 'total', self.base.product(fiber, f"T{self.base.name}"))

    @classmethod
    def from_metric(cls, g: MetricField, scheme: FDScheme, fiber_radius: float = 1.0) -> 'TangentChart':
        """以 g 的 Levi-Civita 联络建立切丛坐标卡"""
        return cls(g.chart, levi_civita(g, scheme), fiber_radius)

    @property
    def m(self) -> int:
        return self.base.dim

    def split(self, point) -> tuple[np.ndarray, np.ndarray]:
        point = np.asarray(point, float)
        return point[:self.m], point[self.m:]

    def frame_change(self, point) -> np.ndarray:
        """B = [[I, 0], [−A, I]]，A^k_i = Γ^k_ij u^j；把 (水平, 垂直) 分量换成坐标分量"""
        x, u = self.split(point)
        a = np.einsum('kij,j->ki', self.conn(x), u)
        m = self.m
        b = np.eye(2 * m)
        b[m:, :m] = -a
        return b

    def horizontal(self, point, w) -> np.ndarray:
        x, u = self.split(point)
        return np.concatenate([w, -self.conn.contract(x, w, u)])

    def vertical(self, w) -> np.ndarray:
        return np.concatenate([np.zeros(self.m), w])


@dataclass(frozen=True, eq=False)
class Lift:
    """底流形向量场的水平或垂直提升"""

    tangent: TangentChart
    kind: str
    base_field: VectorField

    def __post_init__(self):
        if self.kind not in (HORIZONTAL, VERTICAL):
            raise InvalidConfig(f"未知的提升类型: {self.kind}")
        if self.base_field.chart != self.tangent.base:
            raise ChartMismatch("被提升的场不在底流形坐标卡上")

    def as_field(self) -> VectorField:
        tc, X = self.tangent, self.base_field
        if self.kind == VERTICAL:
            return VectorField(tc.total, lambda p: tc.vertical(X(p[:tc.m])), constant=X.constant)
        return VectorField(tc.total, lambda p: tc.horizontal(p, X(p[:tc.m])),
                           constant=X.constant and tc.conn.flat)


def horizontal_lift(tc: TangentChart, X: VectorField) -> VectorField:
    return Lift(tc, HORIZONTAL, X).as_field()


def vertical_lift(tc: TangentChart, X: VectorField) -> VectorField:
    return Lift(tc, VERTICAL, X).as_field()


def connection_map(tc: TangentChart, point, v) -> np.ndarray:
    """联络映射 K(a, b) = b + Γ(x)(u, a)

    Args:
        tc (TangentChart): 切丛坐标卡
        point: 切丛上的点 (x, u)
        v: 切丛上的切向量 (a, b)

    Returns:
        np.ndarray: 底流形上的向量
    """
    if not tc.total.contains(point):
        raise OutOfDomain(f"点 {point} 不在 {tc.total.name} 内")
    x, u = tc.split(point)
    v = np.asarray(v, float)
    return v[tc.m:] + tc.conn.contract(x, u, v[:tc.m])


@dataclass(frozen=True, eq=False)
class SasakiMetric:
    """G(X, Y) = g(KX, KY) + g(π_*X, π_*Y)"""

    tangent: TangentChart
    g: MetricField

    def __post_init__(self):
        if self.g.chart != self.tangent.base:
            raise ChartMismatch("底度量与切丛坐标卡不一致")

    def matrix(self, point) -> np.ndarray:
        tc = self.tangent
        x, u = tc.split(point)
        m = tc.m
        metric = self.g(x)
        projection = np.hstack([np.eye(m), np.zeros((m, m))])
        k = np.hstack([np.einsum('kij,i->kj', tc.conn(x), u), np.eye(m)])
        return projection.T @ metric @ projection + k.T @ metric @ k

    @property
    def G(self) -> MetricField:
        return MetricField(self.tangent.total, self.matrix,
                           constant=self.g.constant and self.tangent.conn.flat)

    def check_blocks(self, plan: SamplePlan, tol: Optional[float] = None,
                     tolerances: Tolerances = DEFAULT_TOLERANCES) -> CheckReport:
        """在水平/垂直分解下 G = diag(g, g)"""
        tol = tol if tol is not None else tolerances.algebra
        tc = self.tangent
        points = tc.total.sample(plan)
        hh = vv = hv = 0.0
        for p in points:
            b = tc.frame_change(p)
            blocks = pullback(self.matrix(p), b)
            metric = self.g(p[:tc.m])
            hh = max(hh, residual_norm(blocks[:tc.m, :tc.m], metric))
            vv = max(vv, residual_norm(blocks[tc.m:, tc.m:], metric))
            hv = max(hv, float(np.max(np.abs(blocks[:tc.m, tc.m:]))))
        return CheckReport('sasaki-blocks', 'G(X^h, Y^h) = G(X^v, Y^v) = g(X, Y), G(X^h, Y^v) = 0',
                           max(hh, vv, hv), tol, len(points), {'hh': hh, 'vv': vv, 'hv': hv})


def sasaki_metric(tc: TangentChart, g: MetricField) -> MetricField:
    return SasakiMetric(tc, g).G


def para_hermitian_defect(p: StructureField, g: MetricField, points) -> float:
    """g(PX, PY) = −g(X, Y) 的最大残差"""
    worst = 0.0
    for x in points:
        metric = g(x)
        check_nondegenerate(metric)
        worst = max(worst, residual_norm(pullback(metric, p(x)), -metric))
    return worst


def lift_structure(tc: TangentChart, p: StructureField, g: MetricField, plan: Optional[SamplePlan] = None,
                   tol: Optional[float] = None,
                   tolerances: Tolerances = DEFAULT_TOLERANCES) -> ParaHypercomplexTriple:
    """由几乎仿厄米结构 (P, g) 提升出切丛上的 (J1, J2, J3)

    J1X^h = X^v，J1X^v = −X^h；J2X^h = (PX)^v，J2X^v = (PX)^h；
    J3X^h = (PX)^h，J3X^v = −(PX)^v。

    Args:
        tc (TangentChart): 切丛坐标卡
        p (StructureField): 底流形上的几乎积结构
        g (MetricField): 底流形上的度量
        plan (Optional[SamplePlan]): 检查 (P, g) 的采样方案
        tol (Optional[float]): 仿厄米条件的容差

    Returns:
        ParaHypercomplexTriple: 切丛上的三元组
    """
    if p.epsilon != -1:
        raise IncompatibleInputs("只有几乎积结构可以提升")
    if p.chart != tc.base or g.chart != tc.base:
        raise ChartMismatch("P、g 与切丛的底流形不一致")
    tol = tol if tol is not None else tolerances.for_field(p.constant and g.constant)
    defect = para_hermitian_defect(p, g, tc.base.sample(plan or SamplePlan()))
    if defect > tol:
        raise IncompatibleInputs(f"(P, g) 不是几乎仿厄米结构，缺陷 {defect:.3e}")
    m = tc.m
    eye, zero = np.eye(m), np.zeros((m, m))

    def lifted(hat: Callable[[np.ndarray], np.ndarray]):
        def value(point):
            b = tc.frame_change(point)
            b_inv = b.copy()
            b_inv[m:, :m] *= -1
            return b @ hat(p(point[:m])) @ b_inv
        return OperatorField(tc.total, value, constant=p.constant and tc.conn.flat)

    j1 = lifted(lambda _p: np.block([[zero, -eye], [eye, zero]]))
    j2 = lifted(lambda pm: np.block([[zero, pm], [pm, zero]]))
    j3 = lifted(lambda pm: np.block([[pm, zero], [zero, -pm]]))
    logger.debug(f"在 {tc.total.name} 上提升出仿超复结构")
    return ParaHypercomplexTriple.from_operators(j1, j2, j3)


def check_bracket_identities(tc: TangentChart, X: VectorField, Y: VectorField, plan: SamplePlan,
                             scheme: FDScheme, tol: Optional[float] = None,
                             tolerances: Tolerances = DEFAULT_TOLERANCES) -> CheckReport:
    """提升场的四个括号恒等式

    [X^h,Y^h] = [X,Y]^h − (R(X,Y)u)^v，[X^v,Y^v] = 0，
    [X^h,Y^v] = (∇_X Y)^v，[X^v,Y^h] = −(∇_Y X)^v。
    左端在 2m 维坐标卡上直接求括号，右端由底流形的曲率和联络给出。
    """
    tol = tol if tol is not None else tolerances.bracket
    xh, xv = horizontal_lift(tc, X), vertical_lift(tc, X)
    yh, yv = horizontal_lift(tc, Y), vertical_lift(tc, Y)
    hh = lie_bracket(xh, yh, scheme)
    vv = lie_bracket(xv, yv, scheme)
    hv = lie_bracket(xh, yv, scheme)
    vh = lie_bracket(xv, yh, scheme)
    base_bracket = lie_bracket(X, Y, scheme)
    nabla_x_y = tc.conn.covariant_derivative(X, Y, scheme)
    nabla_y_x = tc.conn.covariant_derivative(Y, X, scheme)
    points = tc.total.sample(plan)
    details = {'hh': 0.0, 'vv': 0.0, 'hv': 0.0, 'vh': 0.0}
    for p in points:
        x, u = tc.split(p)
        rm = riemann_tensor(tc.conn, x, scheme)
        curv = apply_riemann(rm, X(x), Y(x), u)
        expected = {
            'hh': tc.horizontal(p, base_bracket(x)) - tc.vertical(curv),
            'vv': np.zeros(2 * tc.m),
            'hv': tc.vertical(nabla_x_y(x)),
            'vh': -tc.vertical(nabla_y_x(x)),
        }
        for key, actual in (('hh', hh), ('vv', vv), ('hv', hv), ('vh', vh)):
            details[key] = max(details[key], residual_norm(actual(p), expected[key]))
    return CheckReport('lift-brackets', '[X^h,Y^h] = [X,Y]^h - (R(X,Y)u)^v, [X^v,Y^v] = 0, '
                       '[X^h,Y^v] = (nabla_X Y)^v', max(details.values()), tol, len(points), details)


# 十二个闭式：(结构序号, X 的提升类型, Y 的提升类型, 锚点)
CLOSED_FORMS = (
    (1, 'h', 'h', 'N_1(X^h, Y^h) = (R(X,Y)u)^v'),
    (1, 'v', 'v', 'N_1(X^v, Y^v) = -(R(X,Y)u)^v'),
    (1, 'h', 'v', 'N_1(X^h, Y^v) = (R(X,Y)u)^h'),
    (1, 'v', 'h', 'N_1(X^v, Y^h) = (R(X,Y)u)^h'),
    (2, 'h', 'h', 'N_2(X^h, Y^h) = (P(nabla_Y P)X - P(nabla_X P)Y)^h - (R(X,Y)u)^v'),
    (2, 'v', 'v', 'N_2(X^v, Y^v) = ((nabla_PX P)Y - (nabla_PY P)X)^h - (R(PX,PY)u)^v'),
    (2, 'h', 'v', 'N_2(X^h, Y^v) = -(P(nabla_X P)Y + (nabla_PY P)X)^v + (P R(X,PY)u)^h'),
    (2, 'v', 'h', 'N_2(X^v, Y^h) = ((nabla_PX P)Y + P(nabla_Y P)X)^v + (P R(PX,Y)u)^h'),
    (3, 'h', 'h', 'N_3(X^h, Y^h) = ((nabla_X P)PY - (nabla_PY P)X + (nabla_PX P)Y + P(nabla_Y P)X)^h '
                  '- (R(X,Y)u + R(PX,PY)u + P R(PX,Y)u + P R(X,PY)u)^v'),
    (3, 'v', 'v', 'N_3(X^v, Y^v) = 0'),
    (3, 'h', 'v', 'N_3(X^h, Y^v) = (-(nabla_PX P)Y + (nabla_X P)PY)^v'),
    (3, 'v', 'h', 'N_3(X^v, Y^h) = ((nabla_PY P)X - (nabla_Y P)PX)^v'),
)


def _closed_form(alpha: int, kx: str, ky: str, tc: TangentChart, point, pm, dp, rm, xb, yb,
                 sign: float) -> np.ndarray:
    """右端在一个点上的值；sign 作用在所有曲率项上"""
    _, u = tc.split(point)

    def h(w):
        return tc.horizontal(point, w)

    v = tc.vertical

    def r(a, b):
        return sign * apply_riemann(rm, a, b, u)

    def nab(w):
        return nabla_operator(dp, w)

    px, py = pm @ xb, pm @ yb
    key = (alpha, kx, ky)
    if key == (1, 'h', 'h'):
        return v(r(xb, yb))
    if key == (1, 'v', 'v'):
        return -v(r(xb, yb))
    if key in ((1, 'h', 'v'), (1, 'v', 'h')):
        return h(r(xb, yb))
    if key == (2, 'h', 'h'):
        return h(pm @ nab(yb) @ xb - pm @ nab(xb) @ yb) - v(r(xb, yb))
    if key == (2, 'v', 'v'):
        return h(nab(px) @ yb - nab(py) @ xb) - v(r(px, py))
    if key == (2, 'h', 'v'):
        return -v(pm @ nab(xb) @ yb + nab(py) @ xb) + h(pm @ r(xb, py))
    if key == (2, 'v', 'h'):
        return v(nab(px) @ yb + pm @ nab(yb) @ xb) + h(pm @ r(px, yb))
    if key == (3, 'h', 'h'):
        return (h(nab(xb) @ py - nab(py) @ xb + nab(px) @ yb + pm @ nab(yb) @ xb)
                - v(r(xb, yb) + r(px, py) + pm @ r(px, yb) + pm @ r(xb, py)))
    if key == (3, 'v', 'v'):
        return np.zeros(2 * tc.m)
    if key == (3, 'h', 'v'):
        return v(-(nab(px) @ yb) + nab(xb) @ py)
    return v(nab(py) @ xb - nab(yb) @ px)


def check_nijenhuis_closed_forms(tc: TangentChart, p: StructureField, g: MetricField, X: VectorField,
                                 Y: VectorField, plan: SamplePlan, scheme: FDScheme,
                                 tol: Optional[float] = None,
                                 tolerances: Tolerances = DEFAULT_TOLERANCES) -> list[CheckReport]:
    """提升结构的十二个 Nijenhuis 闭式

    左端由通用的 nijenhuis 在 2m 维坐标卡上计算，右端由底流形的 R 与 ∇P 给出。
    曲率项的符号只确定一次并用于全部闭式，curvature_sign 为 −1 表示整体取反。
    最后附加一个 closed-form-witness 报告。

    Args:
        tc (TangentChart): 切丛坐标卡
        p (StructureField): 底流形上的几乎积结构
        g (MetricField): 底流形上的度量
        X (VectorField): 底流形上的向量场
        Y (VectorField): 底流形上的向量场
        plan (SamplePlan): 采样方案
        scheme (FDScheme): 有限差分方案
        tol (Optional[float]): 容差

    Returns:
        list[CheckReport]: 每个闭式一个报告，最后是见证报告
    """
    tol = tol if tol is not None else tolerances.nested
    triple = lift_structure(tc, p, g, plan, tolerances=tolerances)
    lifts = {'h': (horizontal_lift(tc, X), horizontal_lift(tc, Y)),
             'v': (vertical_lift(tc, X), vertical_lift(tc, Y))}
    lhs_fields = [nijenhuis(triple.structures[alpha - 1], lifts[kx][0], lifts[ky][1], scheme)
                  for alpha, kx, ky, _ in CLOSED_FORMS]
    points = tc.total.sample(plan)
    stats = [{'residual': 0.0, 'flipped': 0.0, 'lhs_max': 0.0, 'rhs_max': 0.0} for _ in CLOSED_FORMS]
    for point in points:
        x, _ = tc.split(point)
        pm = p(x)
        dp = operator_derivative(tc.conn, p.op, x, scheme)
        rm = riemann_tensor(tc.conn, x, scheme)
        xb, yb = X(x), Y(x)
        for (alpha, kx, ky, _), lhs_field, stat in zip(CLOSED_FORMS, lhs_fields, stats):
            lhs = lhs_field(point)
            rhs = _closed_form(alpha, kx, ky, tc, point, pm, dp, rm, xb, yb, 1.0)
            flipped = _closed_form(alpha, kx, ky, tc, point, pm, dp, rm, xb, yb, -1.0)
            stat['residual'] = max(stat['residual'], residual_norm(lhs, rhs))
            stat['flipped'] = max(stat['flipped'], residual_norm(lhs, flipped))
            stat['lhs_max'] = max(stat['lhs_max'], float(np.max(np.abs(lhs))))
            stat['rhs_max'] = max(stat['rhs_max'], float(np.max(np.abs(rhs))))
    sign = curvature_sign(stats)
    if sign < 0:
        logger.warning("曲率项整体取反后吻合得更好，十二个闭式统一使用相反的符号")
    key = 'residual' if sign > 0 else 'flipped'
    reports = []
    for (alpha, kx, ky, anchor), stat in zip(CLOSED_FORMS, stats):
        reports.append(CheckReport(f'lifted-nijenhuis-{alpha}{kx}{ky}', anchor, stat[key], tol,
                                   len(points), {'lhs_max': stat['lhs_max'], 'rhs_max': stat['rhs_max'],
                                                 'curvature_sign': sign}))
    reports.append(closed_form_witness(stats, tc.conn.flat, len(points), tolerances))
    return reports


def curvature_sign(stats: list[dict]) -> int:
    """由第一个两种符号可区分的闭式确定曲率项的符号，对全部闭式统一使用"""
    for stat in stats:
        if max(stat['lhs_max'], stat['rhs_max']) <= SIGN_FLOOR:
            continue
        if stat['flipped'] < 0.5 * stat['residual']:
            return -1
        if stat['residual'] < 0.5 * stat['flipped']:
            return 1
    return 1


def closed_form_witness(stats: list[dict], flat: bool, samples: int,
                        tolerances: Tolerances = DEFAULT_TOLERANCES) -> CheckReport:
    """闭式比较是否有意义

    平坦底流形上两端都必须为零；弯曲底流形上至少一个闭式两端都不小于 WITNESS_FLOOR，
    残差是差额。
    """
    if flat:
        largest = max(max(s['lhs_max'], s['rhs_max']) for s in stats)
        return CheckReport('closed-form-witness', 'all closed-form sides vanish on a flat base', largest,
                           tolerances.integrable, samples, {'largest_side': largest})
    sides = [min(s['lhs_max'], s['rhs_max']) for s in stats]
    best = int(np.argmax(sides))
    alpha, kx, ky, _ = CLOSED_FORMS[best]
    return CheckReport('closed-form-witness', f'some closed form has both sides >= {WITNESS_FLOOR:g}',
                       max(0.0, WITNESS_FLOOR - sides[best]), 0.0, samples,
                       {'identity': f'{alpha}{kx}{ky}', 'smaller_side': sides[best]})
