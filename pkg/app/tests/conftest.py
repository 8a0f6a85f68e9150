import os
import sys
from pathlib import Path

import pytest

# Add project root to path
project_root = Path(__file__).parent.parent.parent
sys.path.insert(0, str(project_root))


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: rank-3 sweeps and property tests (run with QSYS_SLOW=1)")


def pytest_collection_modifyitems(config, items):
    if os.environ.get("QSYS_SLOW") == "1":
        return
    skip_slow = pytest.mark.skip(reason="slow; set QSYS_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)
