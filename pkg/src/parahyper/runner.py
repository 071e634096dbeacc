"""批量验证模块

选择算例与套件，在线程池中执行 (算例, 套件) 任务，并按 (算例, 套件, 恒等式)
排序汇总报告。输出只依赖配置和种子，与并行度无关。
"""

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from loguru import logger

from .catalog import CatalogEntry, load_builtin
from .config import REPORT_VERSION, ConfigManager, RunConfig
from .errors import CaseNotFound
from .report import FAIL, CheckReport, skipped
from .suites import run_suite


@dataclass(frozen=True)
class RunResult:
    """一次批量验证的结果"""

    config: RunConfig
    reports: tuple[CheckReport, ...]
    elapsed: float = 0.0

    @property
    def exit_code(self) -> int:
        """所有结论都符合期望时为 0，否则为 1"""
        return 0 if all(r.as_expected for r in self.reports) else 1

    @property
    def unexpected(self) -> list[CheckReport]:
        return [r for r in self.reports if not r.as_expected]

    def to_dict(self) -> dict:
        return {
            'version': REPORT_VERSION,
            'seed': self.config.plan.seed,
            'config': self.config.echo(),
            'reports': [r.to_dict(self.config.timings) for r in self.reports],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + '\n'


class VerificationRunner:
    """批量验证器

    负责算例选择、任务调度与报告汇总。
    """

    def __init__(self, config: RunConfig, entries: Optional[Sequence[CatalogEntry]] = None):
        """初始化验证器

        Args:
            config (RunConfig): 运行配置
            entries (Optional[Sequence[CatalogEntry]]): 候选算例，默认为全部内置算例
        """
        self.config = config
        self.config_manager = ConfigManager()
        self.entries = list(entries) if entries is not None else load_builtin(config.scheme)

    def select_entries(self) -> list[CatalogEntry]:
        """按通配符选择算例；任何一个通配符没有匹配时抛出 CaseNotFound"""
        ids = [e.id for e in self.entries]
        for pattern in self.config.cases:
            spec = self.config_manager.build_case_filter([pattern])
            if not any(spec.match_file(i) for i in ids):
                raise CaseNotFound(pattern, ids)
        spec = self.config_manager.build_case_filter(list(self.config.cases))
        selected = []
        for entry in self.entries:
            if not spec.match_file(entry.id):
                continue
            if entry.heavy and not self.config.heavy:
                logger.info(f"跳过耗时算例 {entry.id}（使用 --heavy 启用）")
                continue
            selected.append(entry)
        return selected

    def _plan_jobs(self, entries: list[CatalogEntry]) -> tuple[list[tuple[CatalogEntry, str]], list[CheckReport]]:
        jobs, skips = [], []
        for entry in entries:
            for suite in self.config.selected_suites():
                if suite in entry.suites:
                    jobs.append((entry, suite))
                elif self.config.explicit_suites:
                    skips.append(skipped('not-applicable', f'suite {suite} does not apply')
                                 .with_context(entry.id, suite))
        return jobs, skips

    def _run_job(self, job: tuple[CatalogEntry, str]) -> list[CheckReport]:
        entry, suite = job
        start = time.perf_counter()
        try:
            reports = run_suite(suite, entry, self.config)
        except Exception as e:
            logger.error(f"{entry.id}/{suite} 执行失败: {type(e).__name__}: {e}")
            reports = [CheckReport('error', 'the check raised an exception', None, 0.0, 0,
                                   {'error': type(e).__name__, 'message': str(e)})]
        elapsed = time.perf_counter() - start
        result = []
        for r in reports:
            expectation = entry.expectation(r.identity)
            result.append(replace(r.with_context(entry.id, suite, expectation.verdict, expectation.tolerance),
                                  wall_time=elapsed))
        logger.debug(f"{entry.id}/{suite}: {len(result)} 个报告，用时 {elapsed:.2f} 秒")
        return result

    def run(self) -> RunResult:
        """执行选中的全部任务

        Returns:
            RunResult: 排序后的报告集合
        """
        start = time.perf_counter()
        entries = self.select_entries()
        jobs, reports = self._plan_jobs(entries)
        logger.info(f"选中 {len(entries)} 个算例，共 {len(jobs)} 个任务，并行度 {self.config.jobs}")
        if self.config.jobs > 1:
            with ThreadPoolExecutor(max_workers=self.config.jobs) as pool:
                for batch in pool.map(self._run_job, jobs):
                    reports.extend(batch)
        else:
            for job in jobs:
                reports.extend(self._run_job(job))
        reports.sort(key=lambda r: r.sort_key)
        for r in reports:
            if not r.as_expected:
                logger.warning(f"{r.entry}/{r.identity} 结论与期望不符: {r.verdict}（期望 {r.expected}）")
        failed = sum(r.verdict == FAIL for r in reports)
        logger.debug(f"共 {len(reports)} 个报告，其中 {failed} 个未通过")
        return RunResult(self.config, tuple(reports), time.perf_counter() - start)
