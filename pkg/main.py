# main.py
import sys

from growthlab.cli import run

if __name__ == "__main__":
    # same entry as `python -m growthlab`
    sys.exit(run())
