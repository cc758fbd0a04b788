"""
让 `python -m pgtnet` 一条命令拉起 CLI
"""

import sys

from pgtnet.app import main

if __name__ == "__main__":
    sys.exit(main())
