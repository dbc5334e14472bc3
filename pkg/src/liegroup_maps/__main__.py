"""Run the command-line interface via ``python -m liegroup_maps``."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
