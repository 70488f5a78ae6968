"""
epiwit - exact witnesses for epimorphic subgroups
Main CLI interface
"""

import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
