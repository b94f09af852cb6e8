"""Acceptance criteria P1-P7, one summary line each.

The grid is p in {2, 3, 5}, the built-in coefficient list plus 20 seeded
random functors, m and n in [-4, 4] with half-integer n at p = 2.
"""
import json
import time
from fractions import Fraction
from pathlib import Path

import pytest

from cpslice.builtins import builtin, builtin_list, generic, random_mackey
from cpslice.chart import chart_for, simplify_symbols, verify_convergence
from cpslice.linalg import FgAbGroup, IntMatrix
from cpslice.mackey import (
    ALL_SES,
    CpMackey,
    coconstant,
    constant,
    derived,
    exact_sequence,
    mackey_iso_search,
    mackey_levelwise_iso,
    ses_norm,
    signatures_equal,
    twist,
    unit_inverse,
)
from cpslice.qz import stable_is_zero, stable_piece, truncated
from cpslice.spheres import (
    VirtualRep,
    closed_form_homology,
    crosscheck,
    homology_of_sphere,
    parse_rep,
)
from cpslice.tower import (
    collapses,
    is_single_slice,
    negative_ladder,
    positive_ladder,
    slice_parameters,
    slice_tower,
)

PRIMES = (2, 3, 5)
SEEDS = range(20)
GOLDEN = sorted((Path(__file__).parent / "golden").glob("chart_*.json"))


def coefficients(p):
    return builtin_list(p) + [random_mackey(p, s) for s in SEEDS]


def grid_ns(p):
    return [Fraction(k, 2) for k in range(-8, 9)] if p == 2 else [Fraction(n) for n in range(-4, 5)]


@pytest.fixture(scope="module")
def grid():
    """Walk the grid once, collecting failures for P1, P3 and P6."""
    fails = {"P1": [], "P3": [], "P6": []}
    cells = 0
    start = time.perf_counter()
    for p in PRIMES:
        for M in coefficients(p):
            for build in ALL_SES:
                if not build(M).is_exact():
                    fails["P6"].append(f"{M.name} p={p}: {build.__name__}")
            if not exact_sequence(ses_norm(M)):
                fails["P6"].append(f"{M.name} p={p}: norm sequence")
            for m in range(-4, 5):
                for n in grid_ns(p):
                    cells += 1
                    V = VirtualRep.simple(p, m, n)
                    where = f"{M.name} p={p} V={V}"
                    try:
                        cc = crosscheck(V, M)
                    except Exception as exc:
                        fails["P1"].append(f"{where}: {exc!r}")
                    else:
                        fails["P1"] += [f"{where} degree {d}" for d, _, _ in cc.mismatches]
                    try:
                        chart = chart_for(V, M)
                        conv = verify_convergence(chart)
                    except Exception as exc:
                        fails["P3"].append(f"{where}: {exc!r}")
                        continue
                    fails["P3"] += [f"{where}: {f}" for f in conv.failures]
                    for d in chart.differentials:
                        if not exact_sequence(d.witness):
                            fails["P6"].append(f"{where}: d{d.r} witness")
                    for e in chart.extensions:
                        if not exact_sequence(e.witness):
                            fails["P6"].append(f"{where}: extension witness")
    return cells, time.perf_counter() - start, fails


def summarize(fails):
    return "; first: " + fails[0] if fails else ""


def test_p1_homology_crosscheck(grid, acceptance):
    cells, secs, fails = grid
    ok = not fails["P1"]
    acceptance("P1", ok, f"homology cross-check {cells - len(fails['P1'])}/{cells} cells "
                         f"({secs:.0f}s for P1+P3+P6){summarize(fails['P1'])}")
    assert ok, fails["P1"][:10]


def test_p3_convergence(grid, acceptance):
    cells, _, fails = grid
    ok = not fails["P3"]
    acceptance("P3", ok, f"convergence {cells - len(fails['P3'])}/{cells} cells"
                         f"{summarize(fails['P3'])}")
    assert ok, fails["P3"][:10]


def test_p6_exactness(grid, acceptance):
    _, _, fails = grid
    ok = not fails["P6"]
    acceptance("P6", ok, f"every SES and witness exact, {len(fails['P6'])} failures"
                         f"{summarize(fails['P6'])}")
    assert ok, fails["P6"][:10]


def _is_hat(M, orders):
    G = FgAbGroup.from_orders(orders)
    return M.underlying.is_zero() and M.fixed.canonical_form() == G.canonical_form()


def test_p2_named_values(acceptance):
    fails = []
    Z = FgAbGroup.free(1)
    for p in PRIMES:
        cZ = constant(p, Z)
        if not derived(cZ, "ker_N_hat").mackey.is_zero():
            fails.append(f"Z p={p}: ker N")
        if not _is_hat(derived(cZ, "coker_N_hat").mackey, [p]):
            fails.append(f"Z p={p}: coker N")
        if mackey_iso_search(derived(cZ, "im_N").mackey, coconstant(p, Z)).status != "found":
            fails.append(f"Z p={p}: im N")
        for n in (1, 2, 3):
            cyc = FgAbGroup.from_orders([p ** n])
            expected = CpMackey(p, FgAbGroup.from_orders([p ** (n - 1)]), cyc, IntMatrix([[p]]),
                                IntMatrix([[1]]), IntMatrix([[1]]))
            D = derived(constant(p, cyc), "im_N").mackey
            if mackey_iso_search(D, expected).status != "found":
                fails.append(f"Z/{p}^{n}: im N")
            if not _is_hat(derived(constant(p, cyc), "ker_N_hat").mackey, [p]):
                fails.append(f"Z/{p}^{n}: ker N")
        qz = {key: stable_piece(p, key) for key in ("ker_N_hat", "coker_N_hat", "im_N")}
        if qz != {"ker_N_hat": {"fixed": f"Z/{p}", "underlying": "0"},
                  "coker_N_hat": {"fixed": "0", "underlying": "0"},
                  "im_N": {"fixed": "Q/Z", "underlying": "Q/Z"}}:
            fails.append(f"Q/Z p={p}: {qz}")
        table = simplify_symbols(builtin("Z", p))
        hat_p = {"fixed": f"Z/{p}", "underlying": "0"}
        expected = ("•", "•_", "▲") if p == 2 else ("•", "▲")
        if any(table.get(s) != hat_p for s in expected):
            fails.append(f"Z table p={p}: {table}")
        if set(table) & {"∘", "∘̄", "•̄", "∘_", "▽"}:
            fails.append(f"Z table p={p} has extra symbols")
        # suspending by lambda trades orbits for fixed points
        for s in SEEDS:
            M = random_mackey(p, s)
            F, O = derived(M, "F").mackey, derived(M, "O").mackey
            up = homology_of_sphere(VirtualRep.simple(p, 0, 1), O)
            down = homology_of_sphere(VirtualRep.simple(p, 0, -1), F)
            want_up = {} if F.is_zero() else {2: F}
            want_down = {} if O.is_zero() else {-2: O}
            for got, want in ((up, want_up), (down, want_down)):
                if set(got) != set(want) or not all(signatures_equal(got[d], want[d])
                                                    for d in got):
                    fails.append(f"lambda p={p} seed={s}")
    acceptance("P2", not fails, f"derived tables and lambda trade, {len(fails)} failures"
                                f"{summarize(fails)}")
    assert not fails, fails


def test_p4_tower_facts(acceptance):
    fails = []
    Z2 = builtin("Z", 2)
    V6 = VirtualRep.simple(2, 6)
    if slice_parameters(V6) != (6, 3) or 6 not in positive_ladder(Z2) \
            or not is_single_slice(V6, Z2).single:
        fails.append("Sigma^6 HZ is not a 6-slice")
    for N in (5, 6, 7):
        zero = lambda key, N=N: stable_is_zero(2, key, star=True, N=N)
        M = truncated(2, N, star=True)
        if -6 not in negative_ladder(M, zero) \
                or not is_single_slice(VirtualRep.simple(2, -6), M, zero).single:
            fails.append(f"Sigma^-6 HQ/Z* at N={N}")
    for p in PRIMES:
        Z, QZ = builtin("Z", p), builtin("Q/Zstar", p)
        zero = lambda key, p=p: stable_is_zero(p, key, star=True)
        for m in range(-8, 9):
            for n in range(-4, 5):
                V = VirtualRep.simple(p, m, n)
                k = slice_parameters(V)[1]
                if collapses(V, Z) != (0 <= k <= 3):
                    fails.append(f"Z collapse p={p} m={m} n={n}")
                if collapses(V, QZ, zero) != (-3 <= k <= 0):
                    fails.append(f"Q/Z* collapse p={p} m={m} n={n}")
        for m in range(-4, 5):
            for name in ("hat(Z/p)", "hat(Z)"):
                T = slice_tower(VirtualRep.simple(p, m), builtin(name, p))
                live = [s for s in T.slices if not s.coefficient.is_zero()]
                if len(live) != 1 or live[0].t != p * m:
                    fails.append(f"{name} p={p} m={m}")
    acceptance("P4", not fails, f"tower facts, {len(fails)} failures{summarize(fails)}")
    assert not fails, fails


def _combinatorial(chart):
    live = [c for c in chart.classes if not c.is_zero]
    x0 = min(c.x for c in live)

    def key(i):
        c = chart.cls(i)
        return [c.symbol, c.x - x0]

    return {
        "classes": sorted([c.symbol, c.x - x0] for c in live),
        "differentials": sorted([key(d.source), key(d.target)] for d in chart.differentials),
        "extensions": sorted([key(i) for i in e.members] for e in chart.extensions),
    }


def test_p5_golden_charts(acceptance):
    fails = []
    for path in GOLDEN:
        g = json.loads(path.read_text())
        chart = chart_for(parse_rep(g["rep"], g["p"]), generic(g["p"]))
        got = _combinatorial(chart)
        if any(got[f] != g[f] for f in ("classes", "differentials", "extensions")):
            fails.append(path.stem)
        elif not verify_convergence(chart).ok:
            fails.append(path.stem + " (convergence)")
    ok = bool(GOLDEN) and not fails
    acceptance("P5", ok, f"golden charts {len(GOLDEN) - len(fails)}/{len(GOLDEN)}"
                         f"{summarize(fails)}")
    assert ok, fails


def test_p7_twist_coherence(acceptance):
    p = 5
    fails = []
    checked = 0
    for M in coefficients(p):
        for a in (2, 3, 4):
            back = twist(twist(M, a), unit_inverse(p, a))
            if not mackey_levelwise_iso(back, M):
                fails.append(f"{M.name}: twist round trip a={a}")
        for m in range(-4, 5):
            for n in range(-4, 5):
                for cls in (1, 2):
                    text = f"{m}{n:+d}lambda({cls})" if n else str(m)
                    V = parse_rep(text, p)
                    b = unit_inverse(p, V.twist_class())
                    reduced = homology_of_sphere(V, M)
                    direct = closed_form_homology(V, M)
                    plain = closed_form_homology(VirtualRep.simple(p, m, n), M)
                    later = {d: twist(H, b) for d, H in plain.items()}
                    checked += 1
                    if set(reduced) != set(direct) or set(direct) != set(later):
                        fails.append(f"{M.name} V={text}: degrees")
                        continue
                    for d in direct:
                        if not (signatures_equal(reduced[d], direct[d])
                                and mackey_levelwise_iso(direct[d], later[d])):
                            fails.append(f"{M.name} V={text} degree {d}")
    acceptance("P7", not fails, f"twist coherence at p=5, {checked} cells, "
                                f"{len(fails)} failures{summarize(fails)}")
    assert not fails, fails
