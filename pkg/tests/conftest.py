import json
import time

import pytest

from horoaf import cli
from horoaf.sphere_grid import build_grid

ACCEPTANCE = []


@pytest.fixture(scope="session")
def grid_factory():
    cache = {}

    def get(n, resolution):
        if (n, resolution) not in cache:
            cache[n, resolution] = build_grid(n, resolution)
        return cache[n, resolution]

    return get


@pytest.fixture(scope="session")
def certificate_run(tmp_path_factory):
    """One CLI counterexample search, shared by the search, cli and acceptance tests."""
    path = tmp_path_factory.mktemp("search") / "cert.json"
    start = time.perf_counter()
    code = cli.main(["search", "--budget", "400", "--resolution", "96", "--output", str(path)])
    elapsed = time.perf_counter() - start
    return {"code": code, "path": path, "elapsed": elapsed, "data": json.loads(path.read_text()) if code == 0 else None}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid, ok, text in sorted(ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {cid:>2}: {text}")
