"""配置管理模块

负责管理检查套件表、容差预算、运行配置以及算例过滤规则。
"""

import os
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Dict, Optional

from loguru import logger
from pathspec import PathSpec

from .errors import InvalidConfig
from .smooth import FDScheme, SamplePlan


SEED_ENV_VAR = 'PARAHYPER_SEED'
REPORT_VERSION = 1


@dataclass(frozen=True)
class Tolerances:
    """各类恒等式的容差预算

    每嵌套一层有限差分大约损失两到三位有效数字。
    """

    exact: float = 1e-12
    algebra: float = 1e-9
    first: float = 1e-6
    connection: float = 1e-4
    bracket: float = 1e-3
    nested: float = 5e-3
    two_imply_third: float = 1e-5
    integrable: float = 1e-5

    @classmethod
    def names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def with_overrides(self, overrides: Dict[str, float]) -> 'Tolerances':
        """返回应用了覆盖值的新容差表

        Args:
            overrides (Dict[str, float]): 名称到容差的映射

        Returns:
            Tolerances: 新的容差表
        """
        unknown = sorted(set(overrides) - set(self.names()))
        if unknown:
            raise InvalidConfig(f"未知的容差名称: {', '.join(unknown)}，可用: {', '.join(self.names())}")
        for name, value in overrides.items():
            if not value > 0:
                raise InvalidConfig(f"容差 {name} 必须为正数: {value}")
        return replace(self, **overrides)

    def for_field(self, constant: bool) -> float:
        """常系数场走精确路径，其余走代数容差"""
        return self.exact if constant else self.algebra


DEFAULT_TOLERANCES = Tolerances()


@dataclass(frozen=True)
class RunConfig:
    """一次批量验证的配置"""

    cases: tuple[str, ...] = ('*',)
    suites: tuple[str, ...] = ()
    scheme: FDScheme = field(default_factory=FDScheme)
    plan: SamplePlan = field(default_factory=SamplePlan)
    tolerances: Tolerances = DEFAULT_TOLERANCES
    jobs: int = 1
    output_format: str = 'text'
    output_path: Optional[str] = None
    heavy: bool = False
    timings: bool = False

    @property
    def explicit_suites(self) -> bool:
        return bool(self.suites)

    def selected_suites(self) -> tuple[str, ...]:
        return self.suites or tuple(ConfigManager.SUITE_CONFIGS)

    def echo(self) -> dict[str, Any]:
        """配置回显，键顺序固定；不包含并行度，保证不同 jobs 的输出一致"""
        return {
            'cases': list(self.cases),
            'suites': list(self.selected_suites()),
            'fd': {'step': self.scheme.step, 'order': self.scheme.order,
                   'nested_step': self.scheme.nested_step},
            'samples': {'count': self.plan.count, 'seed': self.plan.seed,
                        'margin': self.plan.margin},
            'tolerances': asdict(self.tolerances),
            'heavy': self.heavy,
        }


class ConfigManager:
    """配置管理类

    负责管理检查套件表、种子解析和算例过滤规则。
    """

    # 检查套件
    SUITE_CONFIGS = {
        'axioms': {
            'name': '公理',
            'description': '结构的代数恒等式、混合 3-结构公理与度量相容性',
        },
        'averaging': {
            'name': '平均化',
            'description': '度量平均化、四步相容度量构造、符号差与伪正交标架',
        },
        'nijenhuis': {
            'name': 'Nijenhuis',
            'description': 'Nijenhuis 张量、两个可积推出第三个，以及切丛上的十二个闭式',
        },
        'lifts': {
            'name': '提升',
            'description': '切丛的水平/垂直提升、联络映射、Sasaki 度量与括号恒等式',
        },
        'constructions': {
            'name': '构造',
            'description': '乘积 M×I、锥 C(M) 与圆丛 M×S¹ 上的结构',
        },
        'einstein': {
            'name': 'Einstein',
            'description': 'Ricci 张量与 Einstein 常数（锥上为 Ricci 平坦），以及混合 Sasaki 缺陷',
        },
    }

    def get_suite_names(self) -> list:
        """获取所有套件名称

        Returns:
            list: 套件名称列表
        """
        return list(self.SUITE_CONFIGS.keys())

    def is_valid_suite(self, suite_name: str) -> bool:
        """检查套件名称是否有效

        Args:
            suite_name (str): 套件名称

        Returns:
            bool: 是否为有效的套件
        """
        return suite_name in self.SUITE_CONFIGS

    def validate_suites(self, suites: list[str]) -> tuple[str, ...]:
        """校验并去重套件列表，保持给定顺序"""
        unknown = [s for s in suites if not self.is_valid_suite(s)]
        if unknown:
            raise InvalidConfig(
                f"未知的套件: {', '.join(unknown)}，可用: {', '.join(self.get_suite_names())}"
            )
        return tuple(dict.fromkeys(suites))

    def resolve_seed(self, seed: Optional[int]) -> int:
        """命令行种子优先，其次是环境变量，最后为 0

        Args:
            seed (Optional[int]): 命令行给出的种子

        Returns:
            int: 实际使用的种子
        """
        if seed is not None:
            return seed
        raw = os.environ.get(SEED_ENV_VAR)
        if raw is None or raw.strip() == '':
            return 0
        try:
            value = int(raw)
        except ValueError as e:
            raise InvalidConfig(f"环境变量 {SEED_ENV_VAR} 不是整数: {raw}") from e
        logger.debug(f"使用环境变量中的种子: {value}")
        return value

    def parse_tolerance_overrides(self, items: list[str]) -> Dict[str, float]:
        """解析 NAME=X 形式的容差覆盖

        Args:
            items (list[str]): 命令行给出的覆盖项

        Returns:
            Dict[str, float]: 名称到容差的映射
        """
        overrides: Dict[str, float] = {}
        for item in items:
            name, sep, value = item.partition('=')
            if not sep or not name:
                raise InvalidConfig(f"容差覆盖格式应为 NAME=X: {item}")
            try:
                overrides[name.strip()] = float(value)
            except ValueError as e:
                raise InvalidConfig(f"容差值不是数字: {item}") from e
        return overrides

    def build_case_filter(self, patterns: list[str]) -> PathSpec:
        """把算例通配符编译为路径匹配规则（gitwildmatch 语法）

        Args:
            patterns (list[str]): 通配符列表

        Returns:
            PathSpec: 匹配规则对象
        """
        return PathSpec.from_lines('gitwildmatch', patterns or ['*'])

    def list_suites(self) -> None:
        """列出所有可用的检查套件"""
        print("\n可用的检查套件:")
        print("=" * 50)
        for key, config in self.SUITE_CONFIGS.items():
            print(f"  {key:14} - {config['name']}")
            print(f"                 {config['description']}")
            print()
