"""parahyper 主入口

在坐标卡上数值验证仿超厄米结构、混合 3-结构及其构造。
"""

from typing import Optional

from loguru import logger

from .catalog import load_builtin, load_user
from .cli import CommandLineInterface
from .errors import ParahyperError
from .runner import VerificationRunner
from .utils import render_text, setup_logger, write_output


def main(argv: Optional[list[str]] = None) -> int:
    """主函数

    Args:
        argv (Optional[list[str]]): 命令行参数，None 表示使用 sys.argv

    Returns:
        int: 退出码；0 表示全部符合期望，1 表示存在不符，2 表示配置或输入错误
    """
    # 创建CLI实例并解析参数
    cli = CommandLineInterface()
    args = cli.parse_arguments(argv)

    # 设置日志
    setup_logger(args.verbose, args.log_dir)

    # 如果只是列出检查套件
    if args.list_suites:
        cli.list_suites()
        return 0

    ok, message = cli.validate_arguments(args)
    if not ok:
        logger.error(message)
        return 2

    try:
        if args.command == 'list':
            cli.list_cases(load_builtin())
            return 0

        if args.command == 'load':
            entry = load_user(args.path)
            print(f"{entry.id}: dim {entry.dim}，公理检查通过")
            return 0

        config = cli.build_run_config(args)
        result = VerificationRunner(config).run()
    except ParahyperError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return 2

    if config.output_format == 'json':
        text = result.to_json()
    else:
        text = render_text(list(result.reports), result.elapsed)
    if not write_output(text, config.output_path):
        return 2

    logger.info(f"共 {len(result.reports)} 项检查，{len(result.unexpected)} 项与期望不符，"
                f"用时 {result.elapsed:.2f} 秒")
    return result.exit_code


if __name__ == '__main__':
    raise SystemExit(main())
