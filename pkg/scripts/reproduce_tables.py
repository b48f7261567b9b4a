"""Print the six-load table recomputation and the solver comparison."""

import sys

from phasebal.cli import main

if __name__ == "__main__":
    sys.exit(main(["reproduce-tables", *sys.argv[1:]]))
