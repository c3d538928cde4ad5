"""Run the acceptance suite and print one PASS/FAIL line per criterion."""

import pathlib
import sys

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[1]

if __name__ == "__main__":
    sys.path.insert(0, str(ROOT))
    code = pytest.main([str(ROOT / "tests" / "test_acceptance.py"), "-q", "--rootdir", str(ROOT)])
    sys.exit(code)
