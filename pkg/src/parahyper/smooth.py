"""光滑场与有限差分微积分模块

提供坐标卡、标量/向量/算子/度量场、中心差分格式、李括号、
Levi-Civita 联络、曲率与 Ricci 张量。

约定:
    Γ[k, i, j] = Γ^k_ij，满足 ∇_{∂_i} ∂_j = Γ^k_ij ∂_k；
    R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z；
    Rm[a, b, c, d] 为 R(∂_c, ∂_d)∂_b 的第 a 个分量。
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from loguru import logger

from .algebra import check_nondegenerate
from .errors import ChartMismatch, DegenerateForm, DegenerateMetric, InvalidConfig, OutOfDomain

# 嵌套导数的步长与一阶步长之比
NESTED_STEP_RATIO = 10.0


@dataclass(frozen=True)
class Chart:
    """轴对齐盒子上的坐标卡

    场需要在盒子向外扩展差分边带后的区域上可求值。
    """

    name: str
    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi) or not self.lo:
            raise InvalidConfig(f"坐标卡 {self.name} 的边界维度不一致")
        if any(not a < b for a, b in zip(self.lo, self.hi)):
            raise InvalidConfig(f"坐标卡 {self.name} 的每个轴都需要 lo < hi")

    @classmethod
    def box(cls, name: str, center, half_width) -> 'Chart':
        center = np.asarray(center, float)
        half = np.broadcast_to(np.asarray(half_width, float), center.shape)
        return cls(name, tuple(float(v) for v in center - half), tuple(float(v) for v in center + half))

    @classmethod
    def cube(cls, name: str, dim: int, lo: float = -1.0, hi: float = 1.0) -> 'Chart':
        return cls(name, (lo,) * dim, (hi,) * dim)

    @property
    def dim(self) -> int:
        return len(self.lo)

    def contains(self, point, pad: float = 0.0) -> bool:
        point = np.asarray(point, float)
        if point.shape != (self.dim,):
            return False
        slack = pad + 1e-12
        return bool(np.all(point >= np.asarray(self.lo) - slack) and np.all(point <= np.asarray(self.hi) + slack))

    def product(self, other: 'Chart', name: Optional[str] = None) -> 'Chart':
        return Chart(name or f"{self.name}×{other.name}", self.lo + other.lo, self.hi + other.hi)

    def sample(self, plan: 'SamplePlan') -> np.ndarray:
        """在收缩了 margin 的盒子中均匀采样，种子固定"""
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        shrink = plan.margin * (hi - lo)
        rng = np.random.default_rng(plan.seed)
        return rng.uniform(lo + shrink, hi - shrink, size=(plan.count, self.dim))


@dataclass(frozen=True)
class SamplePlan:
    """采样方案"""

    count: int = 20
    seed: int = 0
    margin: float = 0.1

    def __post_init__(self):
        if self.count < 1:
            raise InvalidConfig(f"采样点数至少为 1: {self.count}")
        if not 0 <= self.margin < 0.5:
            raise InvalidConfig(f"margin 必须在 [0, 0.5) 内: {self.margin}")


@dataclass(frozen=True)
class FDScheme:
    """中心差分格式

    step 用于一阶导数，nested_step 用于曲率和 Ricci 中外层的嵌套导数。
    """

    step: float = 1e-4
    order: int = 2
    nested_step: float = 1e-3

    def __post_init__(self):
        if not (self.step > 0 and self.nested_step > 0):
            raise InvalidConfig(f"差分步长必须为正: {self.step}, {self.nested_step}")
        if self.order not in (2, 4):
            raise InvalidConfig(f"差分阶数只能是 2 或 4: {self.order}")

    @classmethod
    def from_step(cls, step: float, order: int = 2) -> 'FDScheme':
        """嵌套步长随 step 等比缩放，步长减半时两层差分一起减半"""
        return cls(step=step, order=order, nested_step=NESTED_STEP_RATIO * step)

    @property
    def collar(self) -> float:
        return 2.0 * max(self.step, self.nested_step)

    def stencil(self) -> tuple[tuple[int, float], ...]:
        if self.order == 2:
            return ((-1, -0.5), (1, 0.5))
        return ((-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0))


# ---------------------------------------------------------------------------
# 场
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Field:
    """坐标 → 数组 的光滑映射

    constant 为真时值与位置无关，导数直接取零（精确路径）。
    """

    chart: Chart
    fn: Callable[[np.ndarray], object]
    constant: bool = False

    def __call__(self, point) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(point, dtype=float)), dtype=float)

    @classmethod
    def const(cls, chart: Chart, value):
        value = np.array(value, dtype=float)
        value.setflags(write=False)
        return cls(chart, lambda _x: value, constant=True)


class ScalarField(Field):
    """标量场"""


class VectorField(Field):
    """向量场；余向量（1-形式）也用它存放分量"""


class OperatorField(Field):
    """(1,1) 型张量场"""


class MetricField(Field):
    """对称 (0,2) 型张量场"""


def _same_chart(*fields: Field) -> Chart:
    chart = fields[0].chart
    for f in fields[1:]:
        if f.chart != chart:
            raise ChartMismatch(f"场位于不同坐标卡: {chart.name} 与 {f.chart.name}")
    return chart


def apply_operator(op: OperatorField, vec: VectorField) -> VectorField:
    """逐点作用 X ↦ A(x)X"""
    chart = _same_chart(op, vec)
    return VectorField(chart, lambda x: op(x) @ vec(x), constant=op.constant and vec.constant)


def combine(coefficients: list[float], vectors: list[VectorField]) -> VectorField:
    """常系数线性组合"""
    chart = _same_chart(*vectors)
    return VectorField(chart, lambda x: sum(c * v(x) for c, v in zip(coefficients, vectors)),
                       constant=all(v.constant for v in vectors))


def probe_fields(chart: Chart) -> tuple[VectorField, VectorField]:
    """两个固定的非常系数多项式向量场，用于张量恒等式的检查"""
    n = chart.dim

    def first(x):
        return np.array([1.0 + 0.3 * x[(k + 1) % n] - 0.2 * x[k] * x[(k + 2) % n] for k in range(n)])

    def second(x):
        return np.array([0.5 * (-1) ** k + 0.4 * x[(k + n - 1) % n] + 0.25 * x[k] ** 2 for k in range(n)])

    return VectorField(chart, first), VectorField(chart, second)


# ---------------------------------------------------------------------------
# 有限差分
# ---------------------------------------------------------------------------

def directional_derivative(f: Field, point, index: int, scheme: FDScheme,
                           nested: bool = False) -> np.ndarray:
    """中心差分近似 ∂_i f(point)

    Args:
        f (Field): 被求导的场
        point: 坐标点
        index (int): 坐标方向
        scheme (FDScheme): 差分格式
        nested (bool): 是否使用嵌套步长

    Returns:
        np.ndarray: 导数值，形状与 f 的值相同
    """
    point = np.asarray(point, dtype=float)
    if not f.chart.contains(point, pad=scheme.collar):
        raise OutOfDomain(f"点 {point} 超出坐标卡 {f.chart.name} 的差分范围")
    if f.constant:
        return np.zeros_like(f(point))
    h = scheme.nested_step if nested else scheme.step
    offset = np.zeros_like(point)
    offset[index] = h
    total = None
    for k, weight in scheme.stencil():
        term = weight * f(point + k * offset)
        total = term if total is None else total + term
    return total / h


def jacobian(f: Field, point, scheme: FDScheme, nested: bool = False) -> np.ndarray:
    """全部偏导数，最后一个轴为求导方向: D[..., i] = ∂_i f"""
    point = np.asarray(point, dtype=float)
    parts = [directional_derivative(f, point, i, scheme, nested) for i in range(f.chart.dim)]
    return np.stack(parts, axis=-1)


def lie_bracket(X: VectorField, Y: VectorField, scheme: FDScheme, nested: bool = False) -> VectorField:
    """李括号 [X,Y]^k = X^i ∂_i Y^k − Y^i ∂_i X^k"""
    chart = _same_chart(X, Y)
    if X.constant and Y.constant:
        return VectorField.const(chart, np.zeros(chart.dim))

    def bracket(x):
        return jacobian(Y, x, scheme, nested) @ X(x) - jacobian(X, x, scheme, nested) @ Y(x)

    return VectorField(chart, bracket)


# ---------------------------------------------------------------------------
# 联络与曲率
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AffineConnection:
    """仿射联络，christoffel(x) 返回 Γ[k, i, j]"""

    chart: Chart
    christoffel: Callable[[np.ndarray], np.ndarray]
    flat: bool = False

    def __call__(self, point) -> np.ndarray:
        return self.christoffel(np.asarray(point, dtype=float))

    def contract(self, point, a, b) -> np.ndarray:
        """Γ(a, b)^k = Γ^k_ij a^i b^j"""
        return np.einsum('kij,i,j->k', self(point), a, b)

    def as_field(self) -> Field:
        return Field(self.chart, self.christoffel, constant=self.flat)

    def covariant_derivative(self, X: VectorField, Y: VectorField, scheme: FDScheme,
                             nested: bool = False) -> VectorField:
        """∇_X Y"""
        chart = _same_chart(X, Y)

        def nabla(x):
            return jacobian(Y, x, scheme, nested) @ X(x) + self.contract(x, X(x), Y(x))

        return VectorField(chart, nabla, constant=self.flat and X.constant and Y.constant)


def flat_connection(chart: Chart) -> AffineConnection:
    zero = np.zeros((chart.dim,) * 3)
    zero.setflags(write=False)
    return AffineConnection(chart, lambda _x: zero, flat=True)


def levi_civita(g: MetricField, scheme: FDScheme, cache_size: int = 8192) -> AffineConnection:
    """由度量的差分导数计算 Levi-Civita 联络

    Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij)，结果按下指标对称化。

    Args:
        g (MetricField): 度量场
        scheme (FDScheme): 差分格式

    Returns:
        AffineConnection: 无挠联络
    """
    if g.constant:
        check_nondegenerate(g(np.asarray(g.chart.lo)), error=DegenerateMetric)
        return flat_connection(g.chart)

    def compute(x: np.ndarray) -> np.ndarray:
        metric = g(x)
        try:
            check_nondegenerate(metric, error=DegenerateMetric)
        except DegenerateForm as e:
            raise DegenerateMetric(f"点 {x} 处度量退化: {e}") from e
        d = jacobian(g, x, scheme)  # d[a, b, c] = ∂_c g_ab
        t = (np.einsum('jli->lij', d) + np.einsum('ilj->lij', d) - np.einsum('ijl->lij', d))
        gamma = 0.5 * np.einsum('kl,lij->kij', np.linalg.inv(metric), t)
        gamma = 0.5 * (gamma + gamma.transpose(0, 2, 1))
        gamma.setflags(write=False)
        return gamma

    @lru_cache(maxsize=cache_size)
    def cached(key: bytes) -> np.ndarray:
        return compute(np.frombuffer(key, dtype=float))

    return AffineConnection(g.chart, lambda x: cached(np.ascontiguousarray(x, dtype=float).tobytes()))


def curvature(conn: AffineConnection, X: VectorField, Y: VectorField, Z: VectorField,
              scheme: FDScheme) -> VectorField:
    """R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z，外层导数用嵌套步长"""
    chart = _same_chart(X, Y, Z)
    if conn.flat:
        return VectorField.const(chart, np.zeros(chart.dim))
    nabla_y_z = conn.covariant_derivative(Y, Z, scheme)
    nabla_x_z = conn.covariant_derivative(X, Z, scheme)
    first = conn.covariant_derivative(X, nabla_y_z, scheme, nested=True)
    second = conn.covariant_derivative(Y, nabla_x_z, scheme, nested=True)
    third = conn.covariant_derivative(lie_bracket(X, Y, scheme), Z, scheme)
    return VectorField(chart, lambda x: first(x) - second(x) - third(x))


def riemann_tensor(conn: AffineConnection, point, scheme: FDScheme) -> np.ndarray:
    """坐标曲率张量 Rm[a,b,c,d]，R(∂_c,∂_d)∂_b = Rm[a,b,c,d] ∂_a"""
    gamma = conn(point)
    if conn.flat:
        return np.zeros((conn.chart.dim,) * 4)
    dgamma = jacobian(conn.as_field(), point, scheme, nested=True)  # dΓ[k,i,j,c] = ∂_c Γ^k_ij
    return (np.einsum('adbc->abcd', dgamma) - np.einsum('acbd->abcd', dgamma)
            + np.einsum('ace,edb->abcd', gamma, gamma) - np.einsum('ade,ecb->abcd', gamma, gamma))


def apply_riemann(rm: np.ndarray, x, y, z) -> np.ndarray:
    """逐点 R(x,y)z"""
    return np.einsum('abcd,b,c,d->a', rm, z, x, y)


def ricci(g: MetricField, point, scheme: FDScheme,
          conn: Optional[AffineConnection] = None) -> np.ndarray:
    """Ricci 张量 Ric_bd = R^a_bad

    Args:
        g (MetricField): 度量场
        point: 坐标点
        scheme (FDScheme): 差分格式
        conn (Optional[AffineConnection]): 可复用的 Levi-Civita 联络

    Returns:
        np.ndarray: 对称矩阵
    """
    conn = conn or levi_civita(g, scheme)
    rm = riemann_tensor(conn, point, scheme)
    ric = np.einsum('abad->bd', rm)
    logger.debug(f"Ricci 张量的非对称部分: {np.max(np.abs(ric - ric.T)):.3e}")
    return ric


def operator_derivative(conn: AffineConnection, op: OperatorField, point,
                        scheme: FDScheme) -> np.ndarray:
    """(1,1) 型张量的协变导数 D[i,k,j] = (∇_i A)^k_j

    (∇_X A)Y = einsum('ikj,i,j->k', D, X, Y)。
    """
    gamma = conn(point)
    a = op(point)
    da = jacobian(op, point, scheme)  # da[k, j, i] = ∂_i A^k_j
    return (np.einsum('kji->ikj', da) + np.einsum('kil,lj->ikj', gamma, a)
            - np.einsum('lij,kl->ikj', gamma, a))


def nabla_operator(d: np.ndarray, x) -> np.ndarray:
    """由 operator_derivative 的结果取出矩阵 ∇_x A"""
    return np.einsum('ikj,i->kj', d, x)
