"""命令行接口模块

负责处理命令行参数解析和运行配置的组装。
"""

import argparse

from .catalog import CatalogEntry
from .config import DEFAULT_TOLERANCES, ConfigManager, RunConfig
from .errors import InvalidConfig
from .smooth import NESTED_STEP_RATIO, FDScheme, SamplePlan


class CommandLineInterface:
    """命令行接口类

    负责处理命令行参数解析和用户交互。
    """

    def __init__(self):
        """初始化命令行接口"""
        self.config_manager = ConfigManager()
        self.parser = self._create_parser()

    def _create_parser(self) -> argparse.ArgumentParser:
        """创建命令行参数解析器

        Returns:
            argparse.ArgumentParser: 参数解析器
        """
        parser = argparse.ArgumentParser(
            prog='parahyper',
            description='仿超厄米结构与混合 3-结构的数值验证工具',
            formatter_class=argparse.RawDescriptionHelpFormatter,
            epilog="""示例用法:
%(prog)s verify --case r3-mixed --suite axioms
%(prog)s verify --case 'tm-*' --suite nijenhuis --jobs 4 --format json --out report.json
%(prog)s verify --heavy --tol nested=1e-2
%(prog)s list
%(prog)s load my-case.txt
%(prog)s --list-suites
            """
        )

        parser.add_argument(
            '--list-suites', '-l',
            action='store_true',
            help='列出所有可用的检查套件'
        )
        parser.add_argument(
            '--verbose', '-v',
            action='store_true',
            help='显示详细输出'
        )
        parser.add_argument(
            '--log-dir',
            help='同时把日志写入该目录'
        )

        commands = parser.add_subparsers(dest='command')

        verify = commands.add_parser('verify', help='运行检查')
        verify.add_argument('--case', action='append', default=None, metavar='GLOB',
                            help='算例编号通配符，可重复 (默认: 全部)')
        verify.add_argument('--suite', action='append', default=None, metavar='NAME',
                            help='检查套件，可重复 (默认: 全部)')
        verify.add_argument('--fd-step', type=float, default=None, metavar='X',
                            help=f'有限差分步长，曲率与 Ricci 的嵌套步长取其 {NESTED_STEP_RATIO:g} 倍 '
                                 f'(默认: {FDScheme().step})')
        verify.add_argument('--fd-order', type=int, choices=[2, 4], default=None,
                            help='有限差分精度阶数 (默认: 2)')
        verify.add_argument('--samples', type=int, default=None, metavar='N',
                            help=f'每项检查的采样点数 (默认: {SamplePlan().count})')
        verify.add_argument('--seed', type=int, default=None, metavar='S',
                            help='采样种子 (默认: 环境变量 PARAHYPER_SEED，否则为 0)')
        verify.add_argument('--tol', action='append', default=[], metavar='NAME=X',
                            help=f'覆盖容差，可用名称: {", ".join(DEFAULT_TOLERANCES.names())}')
        verify.add_argument('--jobs', '-j', type=int, default=1, metavar='N',
                            help='并行任务数 (默认: 1)')
        verify.add_argument('--format', choices=['text', 'json'], default='text',
                            help='输出格式 (默认: text)')
        verify.add_argument('--out', '-o', default=None, metavar='PATH',
                            help='输出文件 (默认: 标准输出)')
        verify.add_argument('--heavy', action='store_true',
                            help='包含耗时的高维算例')
        verify.add_argument('--timings', action='store_true',
                            help='在 JSON 报告中包含用时')

        commands.add_parser('list', help='列出全部内置算例')

        load = commands.add_parser('load', help='校验用户算例文件')
        load.add_argument('path', help='parahyper-case v1 格式的文件')

        return parser

    def parse_arguments(self, args=None) -> argparse.Namespace:
        """解析命令行参数

        Args:
            args: 命令行参数列表，None表示使用sys.argv

        Returns:
            argparse.Namespace: 解析后的参数
        """
        return self.parser.parse_args(args)

    def validate_arguments(self, args: argparse.Namespace) -> tuple[bool, str]:
        """验证命令行参数

        Args:
            args (argparse.Namespace): 解析后的参数

        Returns:
            tuple[bool, str]: (是否有效, 错误信息)
        """
        if args.list_suites:
            return True, ""
        if not args.command:
            return False, "错误: 请指定子命令 verify、list 或 load\n使用 --help 查看帮助信息"
        if args.command == 'verify':
            if args.jobs < 1:
                return False, f"错误: --jobs 必须至少为 1: {args.jobs}"
            if args.samples is not None and args.samples < 1:
                return False, f"错误: --samples 必须至少为 1: {args.samples}"
            for suite in args.suite or []:
                if not self.config_manager.is_valid_suite(suite):
                    return False, f"错误: 未知的检查套件 '{suite}'"
        return True, ""

    def build_run_config(self, args: argparse.Namespace) -> RunConfig:
        """由 verify 子命令的参数组装运行配置

        Args:
            args (argparse.Namespace): 解析后的参数

        Returns:
            RunConfig: 运行配置
        """
        defaults = FDScheme()
        step = args.fd_step if args.fd_step is not None else defaults.step
        scheme = FDScheme.from_step(step, args.fd_order or defaults.order)
        plan = SamplePlan(count=args.samples if args.samples is not None else SamplePlan().count,
                          seed=self.config_manager.resolve_seed(args.seed))
        overrides = self.config_manager.parse_tolerance_overrides(args.tol)
        tolerances = DEFAULT_TOLERANCES.with_overrides(overrides)
        suites = self.config_manager.validate_suites(args.suite or [])
        if args.jobs < 1:
            raise InvalidConfig(f"--jobs 必须至少为 1: {args.jobs}")
        return RunConfig(cases=tuple(args.case or ['*']), suites=suites, scheme=scheme, plan=plan,
                         tolerances=tolerances, jobs=args.jobs, output_format=args.format,
                         output_path=args.out, heavy=args.heavy, timings=args.timings)

    def list_cases(self, entries: list[CatalogEntry]) -> None:
        """列出算例编号、维数与所体现的构造"""
        print("\n内置算例:")
        print("=" * 50)
        for entry in entries:
            flag = '  [heavy]' if entry.heavy else ''
            print(f"  {entry.id:22} dim {entry.dim:<3} {entry.annotation}{flag}")
            print(f"  {'':22}         套件: {', '.join(entry.suites)}")
        print()

    def show_help(self) -> None:
        """显示帮助信息"""
        self.parser.print_help()

    def list_suites(self) -> None:
        """列出所有可用的检查套件"""
        self.config_manager.list_suites()
