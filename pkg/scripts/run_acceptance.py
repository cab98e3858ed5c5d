"""Run the acceptance suite and print one line per criterion.

    python scripts/run_acceptance.py [-k EXPR]
"""
import pathlib
import sys

import pytest

HERE = pathlib.Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    sys.exit(pytest.main([str(HERE / "tests" / "test_acceptance.py"), "-q", "-p", "no:cacheprovider",
                          *sys.argv[1:]]))
