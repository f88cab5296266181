"""The eleven acceptance criteria, one test each.  Each test prints a single
PASS/FAIL line (also when output capture is on), and
``python3 tests/test_acceptance.py`` prints the same eleven lines."""

import time

import pytest

import criteria as C

TITLES = {
    1: "mixed-complex identities (quantum plane, weight <= 4)",
    2: "concentration in the eigenvalue-1 block",
    3: "Koszulity through weight 6",
    4: "duality dimensions and pd iso",
    5: "HKR dimensions of HH(k[x,y])",
    6: "BV axioms on HH(A^!), P = 5",
    7: "BV axioms on HH(A), transported bracket",
    8: "main theorem: Delta and cup agree",
    9: "comparison maps p1, p2, q2 and homotopy h",
    10: "dual calculus identities",
    11: "determinism and F_1009",
}
BUDGET = {1: 10, 2: 30, 3: 5, 4: 30, 5: 5, 6: 60, 7: 120, 8: 300, 9: 120, 10: 30, 11: 300}

_reports = {}


def _line(k, ok, dt, extra=""):
    return "criterion %2d %-4s %6.2fs  %s%s" % (k, "PASS" if ok else "FAIL", dt, TITLES[k], extra)


def _report(k):
    if k not in _reports:
        t0 = time.perf_counter()
        _reports[k] = (C.BY_NUMBER[k](), time.perf_counter() - t0)
    return _reports[k]


def dimension_tables(k, rep):
    """The field-independent part of a criterion 1-5 report."""
    if k == 2:
        return {side: (rep[side]["1"], sorted(rep[side].values()))
                for side in ("A", "coalgebra")}
    return rep


def criterion_11():
    ok = True
    notes = []
    for k in range(1, 6):
        q, fp = C.BY_NUMBER[k](), C.BY_NUMBER[k](C.F1009)
        same = fp["passed"] and dimension_tables(k, q) == dimension_tables(k, fp)
        if not same:
            notes.append("F_1009 differs at %d" % k)
        ok &= same
    for k in range(1, 11):
        first = C.serialize(_report(k)[0])
        again = C.serialize(C.BY_NUMBER[k]())
        if first != again:
            notes.append("rerun differs at %d" % k)
            ok = False
    return {"passed": ok, "notes": notes}


def _run(k, capsys=None):
    t0 = time.perf_counter()
    if k == 11:
        rep = criterion_11()
        dt = time.perf_counter() - t0
    else:
        rep, dt = _report(k)
    ok = rep["passed"] and dt < BUDGET[k]
    line = _line(k, ok, dt, "" if dt < BUDGET[k] else " (over budget)")
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    else:
        print(line)
    return ok, rep


@pytest.mark.parametrize("k", range(1, 12), ids=lambda k: "criterion_%02d" % k)
def test_criterion(k, capsys):
    ok, rep = _run(k, capsys)
    assert ok, C.serialize(rep)[:2000]


if __name__ == "__main__":
    results = [_run(k)[0] for k in range(1, 12)]
    raise SystemExit(0 if all(results) else 1)
