"""parahyper

仿超厄米结构、混合 3-结构与切丛提升的数值验证工具。
"""

__version__ = "0.1.0"
