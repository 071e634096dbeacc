"""主入口模块

支持通过 python -m parahyper 方式运行程序。
"""

import sys

from .main import main

if __name__ == '__main__':
    sys.exit(main())
