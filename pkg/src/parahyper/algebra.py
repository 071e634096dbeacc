"""逐点线性代数模块

负责矩阵、对称双线性形式、符号差以及残差范数的计算。
所有函数都是纯函数，可以并发调用。
"""

from itertools import combinations
from typing import Iterable, Sequence

import numpy as np
from loguru import logger

from .errors import DegenerateForm, DimensionMismatch


DEGENERACY_THRESHOLD = 1e-10
SYMMETRY_TOLERANCE = 1e-9


def as_vector(entries) -> np.ndarray:
    """转换为一维实向量

    Args:
        entries: 任意可转换为数组的对象

    Returns:
        np.ndarray: 一维向量
    """
    vec = np.asarray(entries, dtype=float)
    if vec.ndim != 1 or vec.size == 0:
        raise DimensionMismatch(f"期望非空一维向量，得到形状 {vec.shape}")
    return vec


def as_square(entries) -> np.ndarray:
    """转换为方阵

    Args:
        entries: 任意可转换为数组的对象

    Returns:
        np.ndarray: n×n 矩阵
    """
    mat = np.asarray(entries, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionMismatch(f"期望方阵，得到形状 {mat.shape}")
    return mat


def symmetrize(b: np.ndarray) -> np.ndarray:
    return 0.5 * (b + b.T)


def is_symmetric(b: np.ndarray, tol: float = SYMMETRY_TOLERANCE) -> bool:
    b = as_square(b)
    scale = max(1.0, float(np.max(np.abs(b))))
    return float(np.max(np.abs(b - b.T))) <= tol * scale


def eigenvalues(b: np.ndarray) -> np.ndarray:
    """对称化后的特征值（升序）"""
    return np.linalg.eigvalsh(symmetrize(as_square(b)))


def check_nondegenerate(b: np.ndarray, threshold: float = DEGENERACY_THRESHOLD,
                        error: type[DegenerateForm] = DegenerateForm) -> np.ndarray:
    """检查双线性形式非退化，返回其特征值

    阈值相对于最大特征值的绝对值。

    Args:
        b (np.ndarray): 双线性形式
        threshold (float): 相对退化阈值
        error (type[DegenerateForm]): 退化时抛出的异常类型

    Returns:
        np.ndarray: 特征值
    """
    ev = eigenvalues(b)
    scale = float(np.max(np.abs(ev))) if ev.size else 0.0
    smallest = float(np.min(np.abs(ev))) if ev.size else 0.0
    if scale == 0.0 or smallest < threshold * scale:
        raise error(f"双线性形式退化: 最小特征值 {smallest:.3e}，最大 {scale:.3e}")
    return ev


def signature(b: np.ndarray, threshold: float = DEGENERACY_THRESHOLD) -> tuple[int, int]:
    """计算对称双线性形式的符号差 (p, q)

    Args:
        b (np.ndarray): 对称双线性形式
        threshold (float): 相对退化阈值

    Returns:
        tuple[int, int]: 正、负特征方向的个数
    """
    ev = check_nondegenerate(b, threshold)
    return int(np.sum(ev > 0)), int(np.sum(ev < 0))


def pullback(b: np.ndarray, a: np.ndarray) -> np.ndarray:
    """拉回 b(a·, a·)，矩阵形式为 aᵀ b a"""
    b = as_square(b)
    a = as_square(a)
    if a.shape != b.shape:
        raise DimensionMismatch(f"拉回的维度不一致: {b.shape} 与 {a.shape}")
    return a.T @ b @ a


def residual_norm(a, b) -> float:
    """逐项最大绝对差（ℓ∞ 范数）"""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatch(f"残差的形状不一致: {a.shape} 与 {b.shape}")
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b)))


def tensor(xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """η⊗ξ 作为自同态 X ↦ η(X)ξ 的矩阵"""
    return np.outer(xi, eta)


def block(top_left, top_right, bottom_left, bottom_right) -> np.ndarray:
    """拼接 (n+1)×(n+1) 分块矩阵，右上为列向量、左下为行向量"""
    top = np.hstack([np.asarray(top_left, float), np.reshape(top_right, (-1, 1))])
    bottom = np.hstack([np.reshape(bottom_left, (1, -1)), np.reshape(bottom_right, (1, 1))])
    return np.vstack([top, bottom])


def _project_out(b: np.ndarray, v: np.ndarray, frame: Sequence[np.ndarray]) -> np.ndarray:
    for e in frame:
        v = v - (v @ b @ e) / (e @ b @ e) * e
    return v


def _next_unit_vector(b: np.ndarray, frame: Sequence[np.ndarray], threshold: float) -> np.ndarray:
    n = b.shape[0]
    residues = [_project_out(b, np.eye(n)[i], frame) for i in range(n)]
    candidates = list(residues)
    # 纯零向量的剩余空间里需要组合两个向量才能得到非零长度
    for u, w in combinations(residues, 2):
        candidates.extend([u + w, u - w])
    norms = [float(v @ b @ v) for v in candidates]
    scale = max(1.0, float(np.max(np.abs(b))))
    positive = [i for i, q in enumerate(norms) if q > threshold * scale]
    if positive:
        best = max(positive, key=lambda i: norms[i])
    else:
        best = max(range(len(candidates)), key=lambda i: abs(norms[i]))
        if abs(norms[best]) <= threshold * scale:
            raise DegenerateForm("剩余子空间中找不到非零长度向量")
    v = _project_out(b, candidates[best], frame)
    return v / np.sqrt(abs(float(v @ b @ v)))


def pseudo_orthonormal_frame(b: np.ndarray, generators: Iterable[np.ndarray],
                             start: Sequence[np.ndarray] = (),
                             threshold: float = 1e-8) -> list[np.ndarray]:
    """以 {E, A₁E, A₂E, ...} 成组扩充的伪正交标架

    每次在已有标架的 b-正交补中选一个 |b(E,E)|=1 的向量 E（优先选正的），
    再把生成元作用在 E 上加入标架。生成元须保持 b（或反保持）且彼此满足
    四元数型关系，这样每组向量才互相正交。

    Args:
        b (np.ndarray): 非退化对称形式
        generators (Iterable[np.ndarray]): 作用在 E 上的算子
        start (Sequence[np.ndarray]): 已经正交归一的初始向量
        threshold (float): 判定零长度的相对阈值

    Returns:
        list[np.ndarray]: 标架向量
    """
    b = symmetrize(as_square(b))
    ops = [as_square(op) for op in generators]
    frame = [np.asarray(v, float) for v in start]
    n = b.shape[0]
    while len(frame) < n:
        e = _next_unit_vector(b, frame, threshold)
        group = [e] + [op @ e for op in ops]
        if len(frame) + len(group) > n:
            raise DimensionMismatch(f"维度 {n} 不能被标架分组整除")
        frame.extend(group)
    logger.debug(f"构造伪正交标架完成，维度 {n}")
    return frame


def gram(b: np.ndarray, frame: Sequence[np.ndarray]) -> np.ndarray:
    basis = np.column_stack(frame)
    return basis.T @ b @ basis
