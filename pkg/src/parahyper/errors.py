"""异常定义模块

所有检查和构造操作抛出的异常都继承自 ParahyperError。
"""


class ParahyperError(Exception):
    """parahyper 的根异常"""


class DimensionMismatch(ParahyperError):
    """矩阵或向量维度不一致"""


class DegenerateForm(ParahyperError):
    """双线性形式退化（存在过小的特征值）"""


class DegenerateMetric(DegenerateForm):
    """度量在采样点上退化"""


class DegenerateResult(DegenerateForm):
    """平均化得到的形式退化"""


class DegenerateIntermediate(DegenerateForm):
    """相容度量四步构造中某一步的中间形式退化"""

    def __init__(self, step: int, message: str = ""):
        self.step = step
        super().__init__(message or f"第 {step} 步的中间形式退化")


class OutOfDomain(ParahyperError):
    """求值点（含差分边带）超出坐标卡范围"""


class ChartMismatch(ParahyperError):
    """场不在同一个坐标卡上"""


class IncompatibleInputs(ParahyperError):
    """输入结构与度量不相容"""


class NonpositiveF(ParahyperError):
    """乘积构造中的函数 f 不是正的"""


class ApexIncluded(ParahyperError):
    """锥的 r 区间包含了顶点"""


class InvalidConfig(ParahyperError):
    """运行配置无效"""


class CaseNotFound(ParahyperError):
    """找不到指定的算例"""

    def __init__(self, pattern: str, available: list[str]):
        self.pattern = pattern
        self.available = list(available)
        super().__init__(
            f"没有匹配 '{pattern}' 的算例，可用算例: {', '.join(self.available)}"
        )


class ParseError(ParahyperError):
    """用户算例文件解析失败"""

    def __init__(self, message: str, line: int, column: int = 1):
        self.line = line
        self.column = column
        super().__init__(f"第 {line} 行第 {column} 列: {message}")


class ValidationFailed(ParahyperError):
    """用户算例未通过公理检查"""

    def __init__(self, axiom: str, residual: float):
        self.axiom = axiom
        self.residual = residual
        super().__init__(f"公理 {axiom} 不成立，残差 {residual:.3e}")
