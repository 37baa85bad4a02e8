from __future__ import annotations

import time
from contextlib import contextmanager

import pytest

from fusionlim.fusion import fusion_of_group
from fusionlim.grouptheory import alternating, dihedral, klein_four, symmetric


D8_GENS = [(1, 2, 3, 0), (2, 1, 0, 3)]
V4_GENS = [(1, 0, 3, 2), (2, 3, 0, 1)]


@pytest.fixture(scope="session")
def a4_fusion():
    """``F_{V4}(A4)``."""
    A4 = alternating(4)
    return fusion_of_group(A4.subgroup(V4_GENS), A4, 2, name="F_V4(A4)")


@pytest.fixture(scope="session")
def s4_fusion():
    """``F_{D8}(S4)``."""
    S4 = symmetric(4)
    return fusion_of_group(S4.subgroup(D8_GENS), S4, 2, name="F_D8(S4)")


@pytest.fixture(scope="session")
def small_p_groups():
    """``F_S(S)`` for ``S`` in C2, V4, D8."""
    out = {}
    C2 = symmetric(2)
    out["C2"] = fusion_of_group(C2.whole, C2, 2, name="F(C2)")
    V4 = klein_four()
    out["V4"] = fusion_of_group(V4.whole, V4, 2, name="F(V4)")
    D8 = dihedral(8)
    out["D8"] = fusion_of_group(D8.whole, D8, 2, name="F(D8)")
    return out


@pytest.fixture(scope="session")
def amalgams():
    """Corpus amalgam fusion systems keyed by name, built on first use."""
    from fusionlim.theorem_a import build_amalgam_fusion, load_corpus

    specs = {s.name: s for s in load_corpus()}
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = build_amalgam_fusion(specs[name])
        return cache[name]

    return get


ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


@pytest.fixture
def criterion(request):
    """Context manager that records one PASS/FAIL line per acceptance criterion."""
    lines = request.config.stash[ACCEPTANCE]

    @contextmanager
    def record(k: int, title: str):
        t0 = time.perf_counter()
        try:
            yield
        except BaseException as exc:
            msg = str(exc).splitlines()[0][:160] if str(exc) else ""
            lines.append((k, f"FAIL criterion {k}: {title} ({type(exc).__name__}: {msg})"))
            print(lines[-1][1])
            raise
        lines.append((k, f"PASS criterion {k}: {title} [{time.perf_counter() - t0:.1f}s]"))
        print(lines[-1][1])

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
