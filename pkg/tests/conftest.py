from pathlib import Path

import pytest

from photonpair.pipeline import load_scenario, run_pipeline

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = ROOT / "scenarios"
SCENARIO_NAMES = ("kdp_agvm", "bbo_sgvm", "bbo_nogvm", "bbo_type1")

_CACHE = {}


def scenario_result(name):
    """Full pipeline run for a shipped scenario, computed once per session."""
    if name not in _CACHE:
        _CACHE[name] = run_pipeline(load_scenario(SCENARIOS / f"{name}.txt"))
    return _CACHE[name]


@pytest.fixture(scope="session")
def results():
    return scenario_result


@pytest.fixture(params=SCENARIO_NAMES)
def any_result(request):
    return scenario_result(request.param)


def default_scan():
    """The default length x bandwidth scan around the no-GVM BBO scenario, run once."""
    if "scan" not in _CACHE:
        from photonpair import design

        base = load_scenario(SCENARIOS / "bbo_nogvm.txt")
        _CACHE["scan"] = design.scan(base, design.DEFAULT_SCAN_LENGTHS,
                                     design.DEFAULT_SCAN_BANDWIDTHS, threads=4)
    return _CACHE["scan"]


ACCEPTANCE_LINES = []


def record_criterion(label, checks):
    """Store one PASS/FAIL line for ``label``; ``checks`` is a list of (text, ok) pairs."""
    ok = all(flag for _, flag in checks)
    detail = "; ".join(f"{text} [{'ok' if flag else 'FAIL'}]" for text, flag in checks)
    line = f"{label}: {'PASS' if ok else 'FAIL'} | {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
