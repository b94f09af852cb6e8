"""Slice spectral sequence charts for ``Sigma^V HM``.

The E_2 page is read off the slice tower: a hat slice ``Sigma^d H C^`` gives
one class at ``(x, s) = (d, (p-1)d)`` and the terminal ``(m+2n)``-slice
gives one class per nonzero homotopy degree ``x`` at ``s = m + 2n - x``.

Every class carries a :class:`~cpslice.mackey.Piece` of the (untwisted)
coefficient, so differentials and extensions are honest Mackey maps induced
by maps of the ambient levels.  Differentials run from the terminal slice
to the fibers (slice case) or from the cofibers to the terminal slice
(coslice case); the page is whatever the filtration jump is.  Extensions
are found by searching a small catalogue of ambient maps and are kept only
once the resulting sequence is checked exact.

:func:`verify_convergence` is the oracle: ``E_infty`` plus extensions must
reassemble the chain-complex homology of ``S^V`` in every degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .linalg import IllDefinedError
from .mackey import (
    SYMBOLS,
    CpMackey,
    MackeyHom,
    Piece,
    derived,
    describe_mackey,
    exact_sequence,
    piece_cokernel,
    piece_hom,
    piece_kernel,
    signatures_equal,
    unit_inverse,
)
from .spheres import (
    VirtualRep,
    closed_form_piece,
    homology_of_sphere,
    suspension_homotopy,
)
from .tower import SliceTower, slice_tower

#: derived functor of a stage coefficient -> the same functor expressed on M
COLLAPSE = {
    "coker_tr_hat": {"M": "coker_tr_hat", "F": "coker_N_hat", "O": None, "im_N": None,
                     "im_R": "triangle_up", "im_tr": None},
    "ker_tr_hat": {"M": "ker_tr_hat", "F": "ker_N_hat", "O": None, "im_N": "ker_N_hat",
                   "im_R": "ker_N_hat", "im_tr": "ker_tr_hat"},
    "ker_R_hat": {"M": "ker_R_hat", "F": None, "O": "ker_N_hat", "im_N": None, "im_R": None,
                  "im_tr": "triangle_down"},
    "coker_R_hat": {"M": "coker_R_hat", "F": None, "O": "coker_N_hat", "im_N": "coker_N_hat",
                    "im_R": "coker_R_hat", "im_tr": "coker_N_hat"},
    "ker_tr_minus": {"M": "ker_tr_minus", "F": "ker_N_minus", "O": "O_minus",
                     "im_N": "ker_N_minus", "im_R": "ker_N_minus", "im_tr": "ker_tr_minus"},
    "coker_R_minus": {"M": "coker_R_minus", "F": "F_minus", "O": "coker_N_minus",
                      "im_N": "coker_N_minus", "im_R": "coker_R_minus", "im_tr": "coker_N_minus"},
}
_STAGE_KEYS = ("M", "F", "O", "im_N", "im_R", "im_tr")
for _k in ("ker_N_hat", "coker_N_hat", "ker_N_minus", "coker_N_minus", "F", "O"):
    COLLAPSE[_k] = {c: _k for c in _STAGE_KEYS}
COLLAPSE["M"] = {c: c for c in _STAGE_KEYS}


def collapse(key: str, stage_key: str) -> str | None:
    """``key`` applied to the stage coefficient, as a derived functor of M."""
    return COLLAPSE[key][stage_key]


# ---------------------------------------------------------------------------
# data


@dataclass
class ChartClass:
    id: int
    x: int
    s: int
    t: int
    key: str
    piece: Piece
    origin: str  # "fiber", "cofiber" or "terminal"
    unit: int = 1  # twist applied to M, shown on the unit symbol

    @property
    def symbol(self) -> str:
        if self.key == "M":
            return f"𝒜^{self.unit}□M"
        return SYMBOLS[self.key]

    @property
    def mackey(self) -> CpMackey:
        return self.piece.mackey

    @property
    def is_zero(self) -> bool:
        return self.piece.mackey.is_zero()


@dataclass
class ChartDifferential:
    r: int
    source: int
    target: int
    map: MackeyHom
    kernel: Piece
    cokernel: Piece
    witness: list  # maps of 0 -> ker -> source -> target -> coker -> 0


@dataclass
class ChartExtension:
    members: list  # class ids, subobject (higher filtration) first
    middle: Piece
    witness: list  # [inject, surject]


@dataclass
class Chart:
    p: int
    V: VirtualRep
    M: CpMackey
    coefficient: CpMackey
    tower: SliceTower
    classes: list = field(default_factory=list)
    differentials: list = field(default_factory=list)
    extensions: list = field(default_factory=list)
    e_infty: dict = field(default_factory=dict)  # class id -> Piece
    notes: list = field(default_factory=list)
    decorated: bool = False

    @property
    def case(self) -> tuple:
        """``(n, k)``: the lambda multiplicity and the tower length."""
        return (self.V.n, self.tower.k)

    def cls(self, i: int) -> ChartClass:
        return self.classes[i]

    def by_degree(self) -> dict:
        out = {}
        for c in self.classes:
            out.setdefault(c.x, []).append(c)
        return out


# ---------------------------------------------------------------------------
# E_2


def e2_page(V: VirtualRep, M: CpMackey) -> Chart:
    T = slice_tower(V, M)
    Mt = T.coefficient
    p = V.p
    chart = Chart(p, V, M, Mt, T)
    unit = unit_inverse(p, V.twist_class())
    for s in T.hats:
        chart.classes.append(ChartClass(len(chart.classes), s.d, (p - 1) * s.d, s.t, s.key,
                                        derived(Mt, s.key), s.role))
    term = T.terminal
    two_n = int(2 * term.lam)
    lo, hi = min(0, two_n), max(0, two_n)
    computed = suspension_homotopy(term.d, term.lam, term.coefficient)
    for j in range(lo, hi + 1):
        x = term.d + j
        ck = closed_form_piece(term.coefficient, two_n, j)
        key = None if ck is None else collapse(ck, term.key)
        H = computed.get(x)
        if key is None:
            if H is not None:
                chart.notes.append(f"terminal homotopy in degree {x} missing from the table")
            continue
        piece = derived(Mt, key)
        if H is None:
            H_zero = True
        else:
            H_zero = False
            if not signatures_equal(H, piece.mackey):
                chart.notes.append(f"terminal class {SYMBOLS.get(key, key)} in degree {x} "
                                   f"disagrees with the homotopy of its slice")
        if piece.mackey.is_zero() != H_zero:
            chart.notes.append(f"terminal class in degree {x}: vanishing disagrees")
        chart.classes.append(ChartClass(len(chart.classes), x, term.t - x, term.t, key,
                                        piece, "terminal", unit))
    return chart


# ---------------------------------------------------------------------------
# differentials and extensions

_FIXED_CATALOGUE = {
    ("A", "A"): ("canonical",),
    ("A", "B"): ("canonical",),
    ("B", "A"): ("canonical",),
    ("B", "B"): ("canonical", "1-t", "N", "1+t"),
}
_UNDER_CATALOGUE = ("canonical", "1-t", "N", "1+t")


def _candidate_homs(P: Piece, Q: Piece):
    fixed = _FIXED_CATALOGUE[(P.fixed_amb, Q.fixed_amb)]
    under = _UNDER_CATALOGUE if (P.under_sq is not None and Q.under_sq is not None) \
        else ("canonical",)
    for fk, uk in product(fixed, under):
        try:
            yield piece_hom(P, Q, fk, uk)
        except IllDefinedError:
            continue


def _find_extension(sub: Piece, mid: Piece, quot: Piece) -> list | None:
    injs = [h for h in _candidate_homs(sub, mid)
            if h.on_fixed.is_injective() and h.on_underlying.is_injective()]
    if not injs:
        return None
    for g in _candidate_homs(mid, quot):
        if not (g.on_fixed.is_surjective() and g.on_underlying.is_surjective()):
            continue
        for f in injs:
            if exact_sequence([f, g]):
                return [f, g]
    return None


def abutment_piece(chart: Chart, x: int) -> Piece | None:
    """Closed-form homology in degree ``x`` as a piece of the coefficient."""
    W = chart.tower.V
    key = closed_form_piece(chart.coefficient, W.two_n, x - W.m)
    if key is None:
        return None
    return derived(chart.coefficient, key)


def decorate(chart: Chart) -> Chart:
    """Attach differentials, E_infty and extensions (in place; returns the chart)."""
    if chart.decorated:
        return chart
    T = chart.tower
    hats = {c.x: c for c in chart.classes if c.origin != "terminal"}
    terms = {c.x: c for c in chart.classes if c.origin == "terminal"}
    pairs = []
    if T.direction == "slice":
        pairs = [(terms[x], hats[x - 1]) for x in sorted(terms) if x - 1 in hats]
    elif T.direction == "coslice":
        pairs = [(hats[x], terms[x - 1]) for x in sorted(hats) if x - 1 in terms]
    for src, tgt in pairs:
        if src.is_zero or tgt.is_zero:
            continue
        h = piece_hom(src.piece, tgt.piece)
        if h.is_zero():
            continue
        r = tgt.s - src.s
        if r < 2:
            chart.notes.append(f"nonzero map {src.symbol}->{tgt.symbol} on page {r} < 2")
            continue
        K = piece_kernel(src.piece, tgt.piece, key="ker(d)")
        C = piece_cokernel(src.piece, tgt.piece, key="coker(d)")
        wit = [piece_hom(K, src.piece), h, piece_hom(tgt.piece, C)]
        chart.differentials.append(ChartDifferential(r, src.id, tgt.id, h, K, C, wit))
    e_infty(chart)
    for x, survivors in sorted(_survivors(chart).items()):
        if len(survivors) < 2:
            continue
        if len(survivors) > 2:
            chart.notes.append(f"unexpected: {len(survivors)} surviving classes in degree {x}")
            continue
        sub, quot = sorted(survivors, key=lambda c: -c.s)
        mid = abutment_piece(chart, x)
        if mid is None:
            chart.notes.append(f"survivors in degree {x} but no homology")
            continue
        wit = _find_extension(chart.e_infty[sub.id], mid, chart.e_infty[quot.id])
        if wit is None:
            chart.notes.append(f"no extension witness found in degree {x}")
            continue
        chart.extensions.append(ChartExtension([sub.id, quot.id], mid, wit))
    chart.decorated = True
    return chart


def e_infty(chart: Chart) -> Chart:
    """Record the E_infty piece of each class (kernel/cokernel of its differential)."""
    out = {c.id: c.piece for c in chart.classes}
    for d in chart.differentials:
        out[d.source] = d.kernel
        out[d.target] = d.cokernel
    chart.e_infty = out
    return chart


def _survivors(chart: Chart) -> dict:
    out = {}
    for c in chart.classes:
        if not chart.e_infty[c.id].mackey.is_zero():
            out.setdefault(c.x, []).append(c)
    return out


def chart_for(V: VirtualRep, M: CpMackey) -> Chart:
    return decorate(e2_page(V, M))


# ---------------------------------------------------------------------------
# verification


@dataclass
class ConvergenceReport:
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_convergence(chart: Chart) -> ConvergenceReport:
    """Check E_infty plus extensions against chain-complex homology."""
    rep = ConvergenceReport()
    if not chart.decorated:
        decorate(chart)
    # three or more survivors in one degree would need an iterated extension,
    # which decorate never declares, so those degrees fail here too
    rep.failures += list(chart.notes)
    H = homology_of_sphere(chart.V, chart.M)
    for d in chart.differentials:
        a, b = chart.cls(d.source), chart.cls(d.target)
        if b.x != a.x - 1 or b.s - a.s != d.r or d.r < 2:
            rep.failures.append(f"differential {a.symbol}->{b.symbol} breaks the grading law")
        if not exact_sequence(d.witness):
            rep.failures.append(f"differential {a.symbol}->{b.symbol}: witness not exact")
    ext_by_degree = {chart.cls(e.members[0]).x: e for e in chart.extensions}
    surv = _survivors(chart)
    for x in sorted(set(surv) | set(H)):
        got = surv.get(x, [])
        target = H.get(x)
        if not got:
            if target is not None:
                rep.failures.append(f"degree {x}: homology {target.describe()} but no survivors")
            continue
        if target is None:
            rep.failures.append(f"degree {x}: survivors but zero homology")
            continue
        if len(got) == 1:
            if not signatures_equal(chart.e_infty[got[0].id].mackey, target):
                rep.failures.append(f"degree {x}: E_infty {got[0].symbol} "
                                    f"{chart.e_infty[got[0].id].mackey.describe()} "
                                    f"!= homology {target.describe()}")
            continue
        ext = ext_by_degree.get(x)
        if ext is None:
            continue  # already reported through the notes
        if not exact_sequence(ext.witness):
            rep.failures.append(f"degree {x}: extension witness not exact")
        if not signatures_equal(ext.middle.mackey, target):
            rep.failures.append(f"degree {x}: extension middle != homology")
        ids = sorted((c.id for c in got), key=lambda i: -chart.cls(i).s)
        if ids != ext.members:
            rep.failures.append(f"degree {x}: extension members do not match survivors")
    return rep


def simplify_symbols(M: CpMackey, keys=None) -> dict:
    """Symbol -> canonical description for ``M``; zero symbols are omitted."""
    from .mackey import ALL_KEYS, UNSIGNED_KEYS
    if keys is None:
        keys = ALL_KEYS if M.p == 2 else UNSIGNED_KEYS
    out = {}
    for k in keys:
        if k == "M":
            continue
        D = derived(M, k).mackey
        if not D.is_zero():
            out[SYMBOLS[k]] = describe_mackey(D)
    return out
