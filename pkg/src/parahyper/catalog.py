"""算例目录模块

内置算例与用户算例文件。每个算例携带坐标卡、场以及对各项检查的期望结论，
目录加载后不再修改，可以被并发的检查共享。
"""

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, NamedTuple, Optional, Union

import numpy as np
from loguru import logger

from .algebra import as_square, is_symmetric, pullback, residual_norm
from .config import DEFAULT_TOLERANCES, Tolerances
from .constructions import (ConeChart, ProductChart, circle_bundle_metric, circle_bundle_structure,
                            circle_chart, circle_seed, cone_metric, cone_structure, product_metric,
                            product_seed, product_structure)
from .errors import IncompatibleInputs, OutOfDomain, ParseError, ValidationFailed
from .mixed3 import (ContactTriple, MetricMixed, MixedTriple, check_contact, compatible_metric,
                     mixed_axiom_residuals)
from .report import FAIL, PASS
from .smooth import (Chart, FDScheme, MetricField, OperatorField, SamplePlan, ScalarField,
                     VectorField)
from .structures import EPSILON, ParaHypercomplexTriple, StructureField, conjugate_triple
from .tangent import TangentChart, lift_structure, sasaki_metric


CASE_HEADER = 'parahyper-case v1'


class Expectation(NamedTuple):
    verdict: str = PASS
    tolerance: Optional[float] = None


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    """一个算例

    没有用到的字段为 None；suites 列出对这个算例有意义的检查套件。
    """

    id: str
    annotation: str
    chart: Chart
    suites: tuple[str, ...]
    triple: Optional[ParaHypercomplexTriple] = None
    metric: Optional[MetricField] = None
    seed: Optional[MetricField] = None
    signature: Optional[tuple[int, int]] = None
    almost_product: Optional[StructureField] = None
    base_metric: Optional[MetricField] = None
    tangent: Optional[TangentChart] = None
    mixed: Optional[MetricMixed] = None
    mixed_seed: Optional[MetricField] = None
    product: Optional[ProductChart] = None
    cone: Optional[ConeChart] = None
    circle_base: Optional[MetricMixed] = None
    einstein_constant: Optional[float] = None
    sasakian: bool = False
    expected: Mapping[str, Expectation] = field(default_factory=dict)
    heavy: bool = False

    @property
    def dim(self) -> int:
        return self.chart.dim

    def expectation(self, identity: str) -> Expectation:
        return self.expected.get(identity, Expectation())


# ---------------------------------------------------------------------------
# 常系数结构
# ---------------------------------------------------------------------------

R3_PHI = (
    [[0, 0, 1], [0, 0, 0], [-1, 0, 0]],
    [[0, 0, 0], [0, 0, 1], [0, 1, 0]],
    [[0, -1, 0], [-1, 0, 0], [0, 0, 0]],
)
R3_XI = ([0, 1, 0], [1, 0, 0], [0, 0, 1])
R3_ETA = ([0, 1, 0], [-1, 0, 0], [0, 0, -1])


def paraquaternionic_matrices(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """ℝ^{4n} 上的标准仿四元数结构 (J1, J2, J3)

    J1(x) = (−x2, x1, −x4, x3, ...)，J2(x) = (−x_{4n−1}, x_{4n}, ..., −x1, x2)，
    J3(x) = (x_{4n}, ..., x1)。
    """
    size = 4 * n
    j1, j2, j3 = np.zeros((size, size)), np.zeros((size, size)), np.zeros((size, size))
    for k in range(1, 2 * n + 1):
        j1[2 * k - 2, 2 * k - 1] = -1.0
        j1[2 * k - 1, 2 * k - 2] = 1.0
        j2[2 * k - 2, size - 2 * k] = -1.0
        j2[2 * k - 1, size - 2 * k + 1] = 1.0
    for i in range(size):
        j3[i, size - 1 - i] = 1.0
    return j1, j2, j3


def split_metric(n: int) -> np.ndarray:
    """使 J1 保距、J2 与 J3 反保距的平坦度量 diag(+1 ×2n, −1 ×2n)"""
    g = np.diag([1.0] * (2 * n) + [-1.0] * (2 * n))
    for eps, j in zip(EPSILON, paraquaternionic_matrices(n)):
        if residual_norm(pullback(g, j), eps * g) > 0:
            raise IncompatibleInputs(f"分裂度量与 ℝ^{4 * n} 上的仿四元数结构不相容")
    return g


def block_mixed_matrices(n: int):
    """ℝ^{4n+3} 上的分块混合 3-结构 φ' = diag(φ, J)，ξ' = (ξ, 0)，η' = (η, 0)"""
    if n == 0:
        return ([np.array(p, float) for p in R3_PHI], [np.array(x, float) for x in R3_XI],
                [np.array(e, float) for e in R3_ETA])
    phis, xis, etas = [], [], []
    for p, x, e, j in zip(R3_PHI, R3_XI, R3_ETA, paraquaternionic_matrices(n)):
        phi = np.zeros((4 * n + 3, 4 * n + 3))
        phi[:3, :3] = p
        phi[3:, 3:] = j
        phis.append(phi)
        xis.append(np.concatenate([x, np.zeros(4 * n)]))
        etas.append(np.concatenate([e, np.zeros(4 * n)]))
    return phis, xis, etas


def mixed_seed_matrix(dim: int) -> np.ndarray:
    """单位阵，并在后 4n 个坐标的偶数位置各加 1"""
    seed = np.eye(dim)
    n = max(0, (dim - 3) // 4)
    for k in range(n):
        seed[3 + 2 * k, 3 + 2 * k] += 1.0
    return seed


def _mixed_suites(with_sasakian: bool) -> tuple[str, ...]:
    return ('axioms', 'averaging', 'einstein') if with_sasakian else ('axioms', 'averaging')


def mixed_entry(entry_id: str, annotation: str, chart: Chart, phis, xis, etas,
                seed: Optional[np.ndarray] = None, metric: Optional[np.ndarray] = None,
                sasakian: bool = True, expected: Optional[Mapping[str, Expectation]] = None) -> CatalogEntry:
    """由常矩阵建立混合 3-结构算例；未给出度量时用四步构造"""
    mixed = MixedTriple.constant(chart, phis, xis, etas)
    dim = chart.dim
    seed_field = MetricField.const(chart, seed if seed is not None else mixed_seed_matrix(dim))
    g = (MetricField.const(chart, metric) if metric is not None
         else compatible_metric(mixed, seed_field))
    n = (dim - 3) // 4
    return CatalogEntry(entry_id, annotation, chart, _mixed_suites(sasakian), mixed=MetricMixed(mixed, g),
                        mixed_seed=seed_field, signature=(2 * n + 1, 2 * n + 2), sasakian=sasakian,
                        expected=dict(expected or {}))


# ---------------------------------------------------------------------------
# 伪球面
# ---------------------------------------------------------------------------

def pseudosphere(n: int, half_width: float = 0.3) -> MetricMixed:
    """S^{4n+3}_{2n+1} ⊂ ℝ^{4n+4}_{2n+2} 上诱导的混合 Sasaki 3-结构

    在图坐标卡 x0 = √(1 − Σ s_j y_j²) 上计算，ξ_α = −J_α N，
    J_α X = φ_α X + η_α(X) N。

    Args:
        n (int): 维数参数
        half_width (float): 坐标卡的半宽

    Returns:
        MetricMixed: 带诱导度量的混合 3-结构
    """
    ambient = 4 * n + 4
    signs = np.diag(split_metric(n + 1))
    mats = paraquaternionic_matrices(n + 1)
    rest = signs[1:]
    center = 0.1 * np.array([(-1.0) ** j for j in range(ambient - 1)])
    chart = Chart.box(f"S{ambient - 1}_{2 * n + 1}", center, half_width)
    s_matrix = np.diag(signs)

    def embed(y):
        radicand = (1.0 - float(rest @ (y * y))) / signs[0]
        if radicand <= 0:
            raise OutOfDomain(f"点 {y} 不在伪球面的图坐标卡内")
        return np.concatenate([[math.sqrt(radicand)], y])

    def tangent_map(y):
        x = embed(y)
        e = np.vstack([-(rest * y) / (signs[0] * x[0]), np.eye(ambient - 1)])
        return x, e

    def metric(y):
        _, e = tangent_map(y)
        return e.T @ s_matrix @ e

    def triple(j):
        def phi(y):
            x, e = tangent_map(y)
            projection = np.eye(ambient) - np.outer(x, x) @ s_matrix
            return (projection @ j @ e)[1:]

        def xi(y):
            return (-(j @ embed(y)))[1:]

        def eta(y):
            x, e = tangent_map(y)
            return x @ s_matrix @ j @ e

        return phi, xi, eta

    triples = []
    for j, eps in zip(mats, EPSILON):
        phi, xi, eta = triple(j)
        triples.append(ContactTriple(OperatorField(chart, phi), VectorField(chart, xi),
                                     VectorField(chart, eta), eps))
    logger.debug(f"构造伪球面 {chart.name}")
    return MetricMixed(MixedTriple(tuple(triples)), MetricField(chart, metric))


def sphere_entry(n: int, heavy: bool) -> CatalogEntry:
    mm = pseudosphere(n)
    dim = 4 * n + 3
    return CatalogEntry(f"s{dim}-{2 * n + 1}-sphere",
                        f"mixed Sasakian 3-structure on the pseudosphere S^{dim}_{2 * n + 1}",
                        mm.chart, ('axioms', 'averaging', 'einstein'), mixed=mm, mixed_seed=mm.g,
                        signature=(2 * n + 1, 2 * n + 2), einstein_constant=float(4 * n + 2),
                        sasakian=True, heavy=heavy)


# ---------------------------------------------------------------------------
# 几乎仿厄米底流形与切丛
# ---------------------------------------------------------------------------

PARA_P = np.kron(np.eye(2), np.array([[0.0, 1.0], [1.0, 0.0]]))
PARA_G = np.diag([1.0, -1.0, 1.0, -1.0])


def conformal_factor(x) -> float:
    return 0.3 * math.sin(x[0]) + 0.2 * x[1] * x[2] + 0.1 * x[3] ** 2


def para_hermitian_entry(entry_id: str, annotation: str, chart: Chart, g: MetricField) -> CatalogEntry:
    p = StructureField(OperatorField.const(chart, PARA_P), -1)
    return CatalogEntry(entry_id, annotation, chart, ('axioms', 'nijenhuis'), almost_product=p,
                        base_metric=g, signature=(2, 2))


def tangent_entry(base: CatalogEntry, scheme: FDScheme, integrable: bool) -> CatalogEntry:
    """底流形 (P, g) 的切丛算例"""
    tc = TangentChart.from_metric(base.base_metric, scheme)
    triple = lift_structure(tc, base.almost_product, base.base_metric)
    expected = {} if integrable else {'lifted-integrable': Expectation(FAIL)}
    return CatalogEntry(f"tm-{base.id}", f"lifted para-hyperhermitian structure on the tangent bundle of {base.id}",
                        tc.total, ('axioms', 'nijenhuis', 'lifts'), triple=triple,
                        metric=sasaki_metric(tc, base.base_metric), signature=(4, 4),
                        almost_product=base.almost_product, base_metric=base.base_metric, tangent=tc,
                        expected=expected)


# ---------------------------------------------------------------------------
# 仿超复结构
# ---------------------------------------------------------------------------

def r4_entry() -> CatalogEntry:
    chart = Chart.cube('R4', 4)
    triple = ParaHypercomplexTriple.constant(chart, paraquaternionic_matrices(1))
    seed = np.eye(4)
    seed[0, 0] = 2.0
    return CatalogEntry('r4-phc', 'canonical para-hypercomplex structure on R^4', chart,
                        ('axioms', 'averaging', 'nijenhuis'), triple=triple,
                        metric=MetricField.const(chart, split_metric(1)), seed=MetricField.const(chart, seed),
                        signature=(2, 2))


def conjugated_entry(base: CatalogEntry) -> CatalogEntry:
    """A(x) J A(x)⁻¹，A = I + x0 E，E = ½ e0 e2ᵀ；J2 仍可积，J1 与 J3 不可积"""
    chart = base.chart
    e = np.zeros((4, 4))
    e[0, 2] = 0.5

    def a(x):
        return np.eye(4) + x[0] * e

    def a_inv(x):
        return np.eye(4) - x[0] * e

    triple = conjugate_triple(base.triple, a, a_inv)
    metric = MetricField(chart, lambda x: pullback(base.metric(x), a_inv(x)))
    seed = MetricField(chart, lambda x: pullback(base.seed(x), a_inv(x)))
    return CatalogEntry('conjugated-triple', 'pointwise conjugated non-integrable triple on R^4', chart,
                        ('axioms', 'averaging', 'nijenhuis'), triple=triple, metric=metric, seed=seed,
                        signature=(2, 2),
                        expected={'nijenhuis-J1': Expectation(FAIL), 'nijenhuis-J3': Expectation(FAIL)})


# ---------------------------------------------------------------------------
# 构造出的算例
# ---------------------------------------------------------------------------

PRODUCT_FACTORS = (1.0, 2.0)


def product_entry(base: CatalogEntry, f_value: float) -> CatalogEntry:
    """M × I，f 取常数 f_value；只对常系数底流形检查可积性"""
    interval = Chart('I', (0.5,), (1.5,))
    pc = ProductChart(base.mixed.mixed, interval, ScalarField.const(interval, f_value))
    suites = ('axioms', 'averaging', 'nijenhuis', 'constructions') if base.mixed.mixed.is_constant \
        else ('axioms', 'averaging', 'constructions')
    return CatalogEntry(f"product-{base.id}-f{f_value:g}",
                        f"para-hypercomplex structure on {base.id} x I, f = {f_value:g}", pc.total, suites,
                        triple=product_structure(pc), metric=product_metric(pc, base.mixed.g), seed=product_seed(pc, base.mixed.g),
                        signature=(pc.total.dim // 2,) * 2, product=pc)


def circle_entry(base: CatalogEntry, integrability: bool) -> CatalogEntry:
    mm = base.mixed
    suites = ('axioms', 'averaging', 'nijenhuis', 'constructions') if integrability \
        else ('axioms', 'averaging', 'constructions')
    chart = circle_chart(mm.chart)
    return CatalogEntry(f"circle-{base.id}", f"para-hypercomplex structure on {base.id} x S^1", chart,
                        suites, triple=circle_bundle_structure(mm), metric=circle_bundle_metric(mm),
                        seed=circle_seed(mm), signature=(chart.dim // 2,) * 2, circle_base=mm)


def cone_entry(base: CatalogEntry, scheme: FDScheme) -> CatalogEntry:
    cc = ConeChart(base.mixed, scheme=scheme)
    return CatalogEntry(f"cone-{base.id}", f"para-hyper-Kahler cone over {base.id}", cc.total,
                        ('axioms', 'nijenhuis', 'constructions', 'einstein'), triple=cone_structure(cc),
                        metric=cone_metric(cc), signature=(cc.total.dim // 2,) * 2, cone=cc,
                        einstein_constant=0.0)


def load_builtin(scheme: Optional[FDScheme] = None) -> list[CatalogEntry]:
    """加载全部内置算例（包括需要 --heavy 的算例）

    Args:
        scheme (Optional[FDScheme]): 切丛联络与锥边带使用的差分方案

    Returns:
        list[CatalogEntry]: 按固定顺序排列的算例
    """
    scheme = scheme or FDScheme()
    r3 = mixed_entry('r3-mixed', 'explicit mixed 3-structure on R^3', Chart.cube('R3', 3),
                     *block_mixed_matrices(0), expected={'mixed-sasakian': Expectation(FAIL)})
    r7 = mixed_entry('r7-mixed', 'block mixed 3-structure on R^7', Chart.cube('R7', 7),
                     *block_mixed_matrices(1), expected={'mixed-sasakian': Expectation(FAIL)})
    r11 = mixed_entry('r11-mixed', 'block mixed 3-structure on R^11', Chart.cube('R11', 11),
                      *block_mixed_matrices(2), expected={'mixed-sasakian': Expectation(FAIL)})
    r4 = r4_entry()
    flat_chart = Chart.cube('R4', 4)
    flat = para_hermitian_entry('flat-parakahler', 'flat para-Kahler structure on R^4', flat_chart,
                                MetricField.const(flat_chart, PARA_G))
    conformal_chart = Chart.cube('R4c', 4, -0.6, 0.6)
    conformal = para_hermitian_entry(
        'conformal-ph', 'conformally flat para-hermitian structure on R^4', conformal_chart,
        MetricField(conformal_chart, lambda x: math.exp(2.0 * conformal_factor(x)) * PARA_G))
    s3 = sphere_entry(0, heavy=False)
    s7 = sphere_entry(1, heavy=True)
    entries = [
        r3, r7, r11, r4, flat, conformal, conjugated_entry(r4), s3, s7,
        tangent_entry(flat, scheme, integrable=True),
        tangent_entry(conformal, scheme, integrable=False),
        *(product_entry(base, f) for base in (r3, r7, s3) for f in PRODUCT_FACTORS),
        circle_entry(r3, integrability=True),
        circle_entry(r7, integrability=True),
        cone_entry(s3, scheme),
        circle_entry(s3, integrability=False),
    ]
    ids = [e.id for e in entries]
    if len(ids) != len(set(ids)):
        raise IncompatibleInputs(f"算例编号重复: {ids}")
    logger.debug(f"加载了 {len(entries)} 个内置算例")
    return entries


# ---------------------------------------------------------------------------
# 用户算例文件
# ---------------------------------------------------------------------------

_KEY_LINE = re.compile(r'^(?P<key>[A-Za-z][A-Za-z0-9_]*)\s*:\s*(?P<value>.*)$')
_SHAPE = re.compile(r'^(?P<rows>\d+)\s*x\s*(?P<cols>\d+)$')
_FIELD_KEYS = tuple(f'{name}{a}' for a in (1, 2, 3) for name in ('phi', 'xi', 'eta')) + ('metric',)


def _strip(line: str) -> str:
    return line.split('#', 1)[0].rstrip()


def _numbers(text: str, line_no: int, offset: int, expected: int) -> list[float]:
    values = []
    for match in re.finditer(r'\S+', text):
        try:
            values.append(float(match.group()))
        except ValueError:
            raise ParseError(f"无法解析的数字 '{match.group()}'", line_no, offset + match.start() + 1)
    if len(values) != expected:
        raise ParseError(f"期望 {expected} 个数字，得到 {len(values)} 个", line_no, offset + 1)
    return values


def parse_case(text: str) -> dict:
    """解析 parahyper-case v1 格式的文本

    Args:
        text (str): 文件内容

    Returns:
        dict: id、dim 以及各个矩阵/向量
    """
    lines = [(i + 1, raw, _strip(raw)) for i, raw in enumerate(text.splitlines())]
    content = [(n, raw, s) for n, raw, s in lines if s.strip()]
    if not content:
        raise ParseError("算例文件为空", 1, 1)
    first_no, first_raw, first = content[0]
    if first.strip() != CASE_HEADER:
        raise ParseError(f"首行应为 '{CASE_HEADER}'", first_no, len(first_raw) - len(first_raw.lstrip()) + 1)
    data: dict = {}
    pos = 1
    while pos < len(content):
        line_no, raw, stripped = content[pos]
        indent = len(raw) - len(raw.lstrip())
        match = _KEY_LINE.match(stripped.strip())
        if not match:
            raise ParseError(f"期望 'key: value'，得到 '{stripped.strip()}'", line_no, indent + 1)
        key, value = match.group('key'), match.group('value').strip()
        value_col = indent + match.start('value') + 1
        if key in data:
            raise ParseError(f"键 '{key}' 重复出现", line_no, indent + 1)
        pos += 1
        if key == 'id':
            if not re.fullmatch(r'[A-Za-z0-9][A-Za-z0-9._-]*', value):
                raise ParseError(f"无效的算例编号 '{value}'", line_no, value_col)
            data[key] = value
            continue
        if key == 'dim':
            if not value.isdigit() or int(value) < 1:
                raise ParseError(f"维数必须是正整数: '{value}'", line_no, value_col)
            data[key] = int(value)
            continue
        if key not in _FIELD_KEYS:
            raise ParseError(f"未知的键 '{key}'", line_no, indent + 1)
        if 'dim' not in data:
            raise ParseError("dim 必须出现在矩阵和向量之前", line_no, indent + 1)
        dim = data['dim']
        square = key.startswith('phi') or key == 'metric'
        shape = _SHAPE.match(value)
        if square:
            if not shape or int(shape.group('rows')) != dim or int(shape.group('cols')) != dim:
                raise ParseError(f"'{key}' 的形状应为 {dim}x{dim}", line_no, value_col)
            rows = dim
        else:
            if value != str(dim):
                raise ParseError(f"'{key}' 的长度应为 {dim}", line_no, value_col)
            rows = 1
        if pos + rows > len(content):
            raise ParseError(f"'{key}' 缺少数据行", line_no, indent + 1)
        values = []
        for row_no, row_raw, row in content[pos:pos + rows]:
            values.append(_numbers(row, row_no, 0, dim))
        pos += rows
        data[key] = np.array(values) if square else np.array(values[0])
    last_no = lines[-1][0] if lines else 1
    missing = [k for k in ('id', 'dim') + _FIELD_KEYS[:-1] if k not in data]
    if missing:
        raise ParseError(f"缺少键: {', '.join(missing)}", last_no, 1)
    return data


def validate_case(data: dict, tolerances: Tolerances = DEFAULT_TOLERANCES) -> MixedTriple:
    """依次检查三个切触型结构、混合公理和（可选的）度量相容性"""
    dim = data['dim']
    chart = Chart.cube(data['id'], dim)
    phis = [data[f'phi{a}'] for a in (1, 2, 3)]
    xis = [data[f'xi{a}'] for a in (1, 2, 3)]
    etas = [data[f'eta{a}'] for a in (1, 2, 3)]
    mixed = MixedTriple.constant(chart, phis, xis, etas)
    tol = tolerances.algebra
    plan = SamplePlan(count=1)
    for a, t in enumerate(mixed.triples, start=1):
        report = check_contact(t, plan, tol)
        if report.residual > tol:
            raise ValidationFailed(f"{report.identity}-{a}", report.residual)
    for axiom, residual in mixed_axiom_residuals(mixed, np.zeros(dim)).items():
        if residual > tol:
            raise ValidationFailed(axiom, residual)
    if 'metric' in data:
        g = as_square(data['metric'])
        if not is_symmetric(g):
            raise ValidationFailed('metric-symmetry', residual_norm(g, g.T))
        worst = 0.0
        for phi, xi, eta, eps in zip(phis, xis, etas, EPSILON):
            worst = max(worst, residual_norm(pullback(g, phi), eps * g - np.outer(eta, eta)),
                        residual_norm(g @ xi, eta))
        if worst > tol:
            raise ValidationFailed('mixed-metric', worst)
    return mixed


def load_user(path: Union[str, Path], tolerances: Tolerances = DEFAULT_TOLERANCES) -> CatalogEntry:
    """读取并校验用户算例文件

    Args:
        path (Union[str, Path]): 文件路径
        tolerances (Tolerances): 校验使用的容差

    Returns:
        CatalogEntry: 校验通过的算例
    """
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise ParseError(f"无法读取文件 {path}: {e}", 1, 1) from e
    data = parse_case(text)
    validate_case(data, tolerances)
    chart = Chart.cube(data['id'], data['dim'])
    entry = mixed_entry(data['id'], f"user case from {path.name}", chart,
                        [data[f'phi{a}'] for a in (1, 2, 3)], [data[f'xi{a}'] for a in (1, 2, 3)],
                        [data[f'eta{a}'] for a in (1, 2, 3)], metric=data.get('metric'), sasakian=False)
    logger.info(f"算例文件 {path} 校验通过: {entry.id}")
    return entry
