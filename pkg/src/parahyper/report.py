"""检查报告模块

定义所有检查共享的 CheckReport 值类型。
"""

import math
from dataclasses import dataclass, field, replace
from typing import Any, Mapping, Optional


PASS = 'pass'
FAIL = 'fail'
SKIP = 'skip'


@dataclass(frozen=True)
class CheckReport:
    """一次恒等式检查的结果

    verdict 只由残差和容差决定：residual <= tolerance 时为 pass。
    expected 记录算例期望的结论，run 的退出码比较的是两者是否一致。
    """

    identity: str
    anchor: str
    residual: Optional[float]
    tolerance: float
    samples: int
    details: Mapping[str, Any] = field(default_factory=dict)
    entry: str = ''
    suite: str = ''
    expected: str = PASS
    skipped: bool = False
    wall_time: float = 0.0

    @property
    def verdict(self) -> str:
        if self.skipped:
            return SKIP
        if self.residual is None or not math.isfinite(self.residual):
            return FAIL
        return PASS if self.residual <= self.tolerance else FAIL

    @property
    def as_expected(self) -> bool:
        """结论是否符合算例期望（跳过的检查总是符合）"""
        return self.skipped or self.verdict == self.expected

    @property
    def sort_key(self) -> tuple[str, str, str]:
        return (self.entry, self.suite, self.identity)

    def with_context(self, entry: str, suite: str, expected: Optional[str] = None,
                     tolerance: Optional[float] = None) -> 'CheckReport':
        """填入算例、套件以及可能的期望和容差覆盖"""
        changes: dict[str, Any] = {'entry': entry, 'suite': suite}
        if expected is not None:
            changes['expected'] = expected
        if tolerance is not None:
            changes['tolerance'] = tolerance
        return replace(self, **changes)

    def to_dict(self, timings: bool = False) -> dict[str, Any]:
        """转换为键顺序固定的字典，用于 JSON 输出"""
        data: dict[str, Any] = {
            'entry': self.entry,
            'suite': self.suite,
            'identity': self.identity,
            'anchor': self.anchor,
            'residual': _finite_or_none(self.residual),
            'tolerance': self.tolerance,
            'verdict': self.verdict,
            'expected': self.expected,
            'samples': self.samples,
            'details': {key: _jsonable(self.details[key]) for key in sorted(self.details)},
        }
        if timings:
            data['wall_time'] = round(self.wall_time, 6)
        return data


def skipped(identity: str, reason: str) -> CheckReport:
    """构造一个跳过的报告"""
    return CheckReport(identity=identity, anchor=reason, residual=None,
                       tolerance=0.0, samples=0, skipped=True)


def _finite_or_none(value: Optional[float]) -> Optional[float]:
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


def _jsonable(value: Any) -> Any:
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        return _finite_or_none(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    try:
        return _finite_or_none(float(value))
    except (TypeError, ValueError):
        return str(value)
