"""Slice and coslice towers of ``Sigma^V HM``.

Towers are data: a list of stages, each with the slice it contributes.  For
``r = (p-1)m - 2n > 0`` the tower has ``k = ceil(r/p)`` fibers (suspended
hat functors) followed by a terminal ``(m+2n)``-slice; for ``r < 0`` it has
``-k`` cofibers with ``k = -ceil(-r/p)``; for ``r = 0`` the whole spectrum
is a single slice.

A twisted ``V`` is handled by replacing ``M`` with ``A^{a^{-1}} box M``
and ``V`` with ``m + n lambda``.

>>> from cpslice.builtins import builtin
>>> from cpslice.spheres import VirtualRep
>>> slice_parameters(VirtualRep.simple(2, 6), builtin("Z", 2))
(6, 3)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .mackey import SYMBOLS, CpMackey, derived, describe_mackey, twist, unit_inverse
from .spheres import VirtualRep

ZeroTest = Callable[[str], bool]


@dataclass
class SliceDescriptor:
    """``Sigma^{d + lam lambda} H C`` viewed as a ``t``-slice.

    ``key`` names ``C`` as a derived functor of the tower's coefficient.
    """

    t: int
    d: int
    lam: Fraction
    key: str
    coefficient: CpMackey
    role: str  # "fiber", "cofiber" or "terminal"

    @property
    def symbol(self) -> str:
        return SYMBOLS[self.key]

    @property
    def is_hat(self) -> bool:
        return self.lam == 0 and self.key.endswith("_hat")

    def to_json(self) -> dict:
        lam = self.lam
        return {"t": self.t, "suspension": {"d": self.d,
                                            "lambda": int(lam) if lam.denominator == 1 else str(lam)},
                "coefficient": describe_mackey(self.coefficient), "symbol": self.symbol,
                "key": self.key, "role": self.role}


@dataclass
class SliceTower:
    direction: str  # "slice", "coslice" or "single"
    V: VirtualRep
    coefficient: CpMackey  # after untwisting
    r: int
    k: int
    lo: int
    hi: int
    slices: list = field(default_factory=list)  # hats in tower order, then the terminal

    @property
    def hats(self) -> list:
        return [s for s in self.slices if s.role != "terminal"]

    @property
    def terminal(self) -> SliceDescriptor:
        return next(s for s in self.slices if s.role == "terminal")

    def to_json(self) -> dict:
        return {"direction": self.direction, "V": str(self.V), "p": self.V.p, "r": self.r,
                "k": self.k, "range": [self.lo, self.hi],
                "stages": [s.to_json() for s in self.slices]}


def slice_parameters(V: VirtualRep, M: CpMackey | None = None) -> tuple[int, int]:
    """``r = (p-1)m - 2n`` and the tower length ``k``."""
    p = V.p
    r = (p - 1) * V.m - V.two_n
    if r > 0:
        k = math.ceil(Fraction(r, p))
    elif r < 0:
        k = -math.ceil(Fraction(-r, p))
    else:
        k = 0
    return r, k


def untwisted(V: VirtualRep, M: CpMackey) -> tuple[VirtualRep, CpMackey]:
    """``(m + n lambda, A^{a^{-1}} box M)`` with the same suspension spectrum."""
    a = V.twist_class()
    return VirtualRep.simple(V.p, V.m, V.n), twist(M, unit_inverse(V.p, a))


def _terminal(V: VirtualRep, M: CpMackey, key: str, i: int) -> SliceDescriptor:
    d, lam = V.m - 2 * i, V.n + i
    coeff = M if key == "M" else derived(M, key).mackey
    return SliceDescriptor(V.dim, d, lam, key, coeff, "terminal")


def _hat(M: CpMackey, key: str, d: int, role: str) -> SliceDescriptor:
    return SliceDescriptor(M.p * d, d, Fraction(0), key, derived(M, key).mackey, role)


def slice_tower(V: VirtualRep, M: CpMackey, form: str | None = None) -> SliceTower:
    """The canonical tower: slice tower if ``r > 0``, coslice tower if ``r < 0``.

    ``form`` chooses how the terminal ``F``/``O`` stage is written: by
    default ``F`` for ``r > 0`` and ``O`` for ``r < 0``; the other choice
    rewrites it with ``Sigma^lambda HO = Sigma^2 HF``.
    """
    W, Mt = untwisted(V, M)
    p, m = W.p, W.m
    r, k = slice_parameters(W)
    if r == 0:
        T = SliceTower("single", V, Mt, r, k, W.dim, W.dim)
        T.slices.append(_terminal(W, Mt, "M", 0))
        return T
    if r > 0:
        T = SliceTower("slice", V, Mt, r, k, W.dim, p * m)
        keys = ["ker_R_hat", "coker_R_hat"] + [
            "ker_N_hat" if j % 2 == 0 else "coker_N_hat" for j in range(2, k)]
        for j in range(k):
            T.slices.append(_hat(Mt, keys[j], m - j, "fiber"))
        if k == 1:
            term = _terminal(W, Mt, "im_R", 0)
        elif k % 2 == 0:
            term = _terminal(W, Mt, "F", (k - 2) // 2)
        else:
            term = _terminal(W, Mt, "im_N", (k - 1) // 2)
        if form == "O" and term.key == "F":
            term = SliceDescriptor(term.t, term.d - 2, term.lam + 1, "O",
                                   derived(Mt, "O").mackey, "terminal")
    else:
        T = SliceTower("coslice", V, Mt, r, k, p * m, W.dim)
        keys = ["coker_tr_hat", "ker_tr_hat"] + [
            "coker_N_hat" if i % 2 == 0 else "ker_N_hat" for i in range(-2, k, -1)]
        for idx in range(-k):
            i = -idx
            T.slices.append(_hat(Mt, keys[idx], m - i, "cofiber"))
        if k == -1:
            term = _terminal(W, Mt, "im_tr", 0)
        elif k % 2 == 0:
            term = _terminal(W, Mt, "O", (k + 2) // 2)
        else:
            term = _terminal(W, Mt, "im_N", (k + 1) // 2)
        if form == "F" and term.key == "O":
            term = SliceDescriptor(term.t, term.d + 2, term.lam - 1, "F",
                                   derived(Mt, "F").mackey, "terminal")
    T.slices.append(term)
    return T


def coslice_tower(V: VirtualRep, M: CpMackey) -> SliceTower:
    """Coslice form: for ``r < 0`` this is :func:`slice_tower`; otherwise the same slices.

    In the slice case the coslice tower has the same slices taken in the
    opposite order (its stages are the fibers of the maps out of
    ``Sigma^V HM``), so it is returned with the slice list reversed.
    """
    T = slice_tower(V, M)
    if T.direction != "slice":
        return T
    term = T.slices[-1]
    return SliceTower("coslice", T.V, T.coefficient, T.r, T.k, T.lo, T.hi,
                      [term] + list(reversed(T.slices[:-1])))


# ---------------------------------------------------------------------------
# predicates


def _zero_test(M: CpMackey, zero: ZeroTest | None) -> ZeroTest:
    if zero is not None:
        return zero
    return lambda key: derived(M, key).mackey.is_zero()


def slice_predicates(M: CpMackey, zero: ZeroTest | None = None) -> dict[str, bool]:
    """Vanishing flags driving the slice corollaries.

    ``zero`` overrides how a derived functor is tested for vanishing (the
    Q/Z model passes its stable test here).
    """
    z = _zero_test(M, zero)
    return {
        "res_injective": z("ker_R_hat"),
        "coker_R_zero": z("coker_R_hat"),
        "ker_N_zero": z("ker_N_hat"),
        "coker_N_zero": z("coker_N_hat"),
        "tr_surjective": z("coker_tr_hat"),
        "ker_tr_zero": z("ker_tr_hat"),
    }


def positive_ladder(M: CpMackey, zero: ZeroTest | None = None) -> set | str:
    """Values ``n >= 0`` for which the slice criteria certify ``Sigma^n HM``.

    Returns ``"all"`` when all four cumulative conditions hold.
    """
    f = slice_predicates(M, zero)
    p = M.p
    out = {0}
    if not f["res_injective"]:
        return out
    out |= {1} | ({2} if p == 2 else set())
    if not f["coker_R_zero"]:
        return out
    out |= {2} | ({3, 4} if p == 2 else {3} if p == 3 else set())
    if not f["ker_N_zero"]:
        return out
    out |= {3} | ({5, 6} if p == 2 else {4} if p == 3 else set())
    if not f["coker_N_zero"]:
        return out
    return "all"


def negative_ladder(M: CpMackey, zero: ZeroTest | None = None) -> set | str:
    """Values ``n <= 0`` certified by the mirror ladder."""
    f = slice_predicates(M, zero)
    p = M.p
    out = {0}
    if not f["tr_surjective"]:
        return out
    out |= {-1} | ({-2} if p == 2 else set())
    if not f["ker_tr_zero"]:
        return out
    out |= {-2} | ({-3, -4} if p == 2 else {-3} if p == 3 else set())
    if not f["coker_N_zero"]:
        return out
    out |= {-3} | ({-5, -6} if p == 2 else {-4} if p == 3 else set())
    if not f["ker_N_zero"]:
        return out
    return "all"


@dataclass
class SliceCertificate:
    single: bool
    reason: str


def is_single_slice(V: VirtualRep, M: CpMackey, zero: ZeroTest | None = None) -> SliceCertificate:
    """Is ``Sigma^V HM`` a single ``(m+2n)``-slice?

    Decided by the tower: it is exactly when every fiber (or cofiber)
    coefficient vanishes.  The reason names the first applicable result.
    """
    T = slice_tower(V, M)
    z = _zero_test(T.coefficient, zero)
    r = T.r
    p = V.p
    flags = slice_predicates(T.coefficient, zero)
    if r == 0:
        return SliceCertificate(True, "r = 0")
    if T.coefficient.underlying.is_zero() and V.two_n == 0:
        return SliceCertificate(True, "hat functor: Sigma^m of a hat functor is a pm-slice")
    if 0 < r <= p and flags["res_injective"]:
        return SliceCertificate(True, "r in [0,p] and res injective")
    if -p <= r < 0 and flags["tr_surjective"]:
        return SliceCertificate(True, "r in [-p,0] and tr surjective")
    nonzero = [s for s in T.hats if not z(s.key)]
    if nonzero:
        s = nonzero[0]
        return SliceCertificate(False, f"nonzero {s.role} {s.symbol} in degree {s.d}")
    return SliceCertificate(True, "all fibers vanish")


def collapses(V: VirtualRep, M: CpMackey, zero: ZeroTest | None = None) -> bool:
    return is_single_slice(V, M, zero).single


# ---------------------------------------------------------------------------
# consistency


@dataclass
class TowerReport:
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _certify_at(d: int, lam: Fraction, key: str, C: CpMackey, p: int) -> str | None:
    r = (p - 1) * d - int(2 * lam)
    if r == 0:
        return "r = 0"
    res_inj = key in ("im_R", "im_N", "F") or (key == "M" and derived(C, "ker_R_hat").mackey.is_zero())
    tr_surj = key in ("im_tr", "im_N", "O") or (key == "M" and derived(C, "coker_tr_hat").mackey.is_zero())
    if 0 < r <= p and res_inj:
        return "r in [0,p] and res injective"
    if -p <= r < 0 and tr_surj:
        return "r in [-p,0] and tr surjective"
    return None


def _certify_terminal(s: SliceDescriptor, p: int) -> str | None:
    """Which criterion makes the terminal stage a ``t``-slice (None if none applies)."""
    forms = [(s.d, s.lam, s.key)]
    # Sigma^lambda HO = Sigma^2 HF lets F and O stages trade places
    if s.key == "F":
        forms.append((s.d - 2, s.lam + 1, "O"))
    elif s.key == "O":
        forms.append((s.d + 2, s.lam - 1, "F"))
    for d, lam, key in forms:
        why = _certify_at(d, lam, key, s.coefficient, p)
        if why is not None:
            return why
    return None


def tower_consistency_check(T: SliceTower) -> TowerReport:
    """Dimensions, ordering, range and per-stage slice certificates."""
    rep = TowerReport()
    p = T.V.p
    W = T.V
    if T.direction == "single":
        if len(T.slices) != 1 or T.slices[0].t != W.dim:
            rep.failures.append("single-slice tower malformed")
        return rep
    hats = T.hats
    expected = abs(T.k)
    if len(hats) != expected:
        rep.failures.append(f"expected {expected} hat stages, found {len(hats)}")
    for s in hats:
        if s.t != p * s.d:
            rep.failures.append(f"{s.symbol} at degree {s.d} has t = {s.t} != p d")
    dims = [s.t for s in T.slices]
    if T.direction == "slice" and any(a <= b for a, b in zip(dims, dims[1:])):
        rep.failures.append(f"slice dimensions not strictly decreasing: {dims}")
    if T.direction == "coslice" and any(a >= b for a, b in zip(dims, dims[1:])):
        rep.failures.append(f"coslice dimensions not strictly increasing: {dims}")
    expected = (W.dim, p * W.m) if T.r > 0 else (p * W.m, W.dim)
    if (T.lo, T.hi) != expected:
        rep.failures.append("range differs from " + ("[m+2n, pm]" if T.r > 0 else "[pm, m+2n]"))
    if dims and (min(dims), max(dims)) != (T.lo, T.hi):
        rep.failures.append("tower does not span its range")
    term = T.terminal
    if term.t != W.dim:
        rep.failures.append("terminal stage is not an (m+2n)-slice")
    if _certify_terminal(term, p) is None:
        rep.failures.append(f"terminal stage {term.symbol} has no slice certificate")
    return rep
