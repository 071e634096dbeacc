"""工具函数模块

提供日志配置、报告的文本渲染和输出文件写入。
"""

import os
import sys
from typing import Optional

from loguru import logger

from .report import FAIL, PASS, SKIP, CheckReport


def setup_logger(verbose: bool = False, log_dir: Optional[str] = None) -> None:
    """设置日志配置

    日志写到 stderr，标准输出留给报告。

    Args:
        verbose (bool): 是否启用详细输出
        log_dir (Optional[str]): 额外写入日志文件的目录
    """
    # 移除默认的stderr处理器，避免重复输出
    logger.remove()

    level = "DEBUG" if verbose else "INFO"
    logger.add(sys.stderr, colorize=True, level=level)

    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
        logger.add(os.path.join(log_dir, 'parahyper_{time}.log'), level="DEBUG")


def format_residual(value: Optional[float]) -> str:
    """格式化残差显示

    Args:
        value (Optional[float]): 残差，None 表示没有数值

    Returns:
        str: 科学计数法字符串
    """
    if value is None:
        return '-'
    return f"{value:.2e}"


def _marker(report: CheckReport) -> str:
    if report.verdict == SKIP:
        return 'SKIP'
    text = 'ok' if report.verdict == PASS else 'FAIL'
    if report.verdict == FAIL and report.as_expected:
        text = 'xfail'
    elif not report.as_expected:
        text = f"{text}!"
    return text


def render_text(reports: list[CheckReport], elapsed: float) -> str:
    """把报告渲染为按算例分组的文本

    Args:
        reports (list[CheckReport]): 排好序的报告
        elapsed (float): 总用时（秒）

    Returns:
        str: 文本报告
    """
    lines = []
    current = None
    for r in reports:
        if r.entry != current:
            current = r.entry
            lines.append("")
            lines.append(f"[{current}]")
        lines.append(f"  {_marker(r):6} {r.suite:14} {r.identity:34} "
                     f"{format_residual(r.residual):>9} / {r.tolerance:.0e}  ({r.wall_time:.2f}s)")
    unexpected = [r for r in reports if not r.as_expected]
    passed = sum(r.verdict == PASS for r in reports)
    failed = sum(r.verdict == FAIL for r in reports)
    lines.append("")
    lines.append("=" * 60)
    lines.append(f"检查总数:       {len(reports):,}")
    lines.append(f"通过:           {passed:,}")
    lines.append(f"未通过:         {failed:,}")
    lines.append(f"与期望不符:     {len(unexpected):,}")
    lines.append(f"总用时:         {elapsed:.2f} 秒")
    lines.append("=" * 60)
    return "\n".join(lines) + "\n"


def ensure_output_directory(output_path: str) -> bool:
    """确保输出目录存在

    Args:
        output_path (str): 输出文件路径

    Returns:
        bool: 是否成功创建或目录已存在
    """
    try:
        output_dir = os.path.dirname(output_path)
        if output_dir:
            os.makedirs(output_dir, exist_ok=True)
        return True
    except OSError as e:
        logger.error(f"创建输出目录失败: {e}")
        return False


def write_output(text: str, output_path: Optional[str]) -> bool:
    """写到文件，未给出路径时写到标准输出"""
    if not output_path:
        sys.stdout.write(text)
        return True
    if not ensure_output_directory(output_path):
        return False
    try:
        with open(output_path, 'w', encoding='utf-8') as f:
            f.write(text)
    except OSError as e:
        logger.error(f"写入报告失败: {output_path}: {e}")
        return False
    logger.info(f"报告已写入: {output_path}")
    return True
