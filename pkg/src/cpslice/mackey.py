"""C_p-Mackey functors.

A Mackey functor is stored as its two levels, ``fixed = M(C_p/C_p)`` and
``underlying = M(C_p/e)``, with restriction ``res``, transfer ``tr`` and the
Weyl generator ``weyl``.  All functors built here are kept in a simplified
(diagonal) presentation.

Derived functors are represented as :class:`Piece` objects: each level is a
subquotient of either the fixed or the underlying level of the parent
functor.  That is what lets the chart code build maps between them by just
naming the ambient map (identity, ``res``, ``tr``, ``1-t``, ``N``).

>>> Z = constant(2, FgAbGroup.free(1))
>>> validate(Z).ok
True
>>> derived(Z, "coker_N_hat").mackey.fixed.canonical_form()
(0, (2,))
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

from .linalg import (
    FgAbGroup,
    GroupHom,
    IllDefinedError,
    IntMatrix,
    Subquotient,
    ambient_reduce,
    block_diagonal,
    cokernel,
    describe_group,
    exact_at,
    image,
    induced_hom,
    kernel,
    kernel_basis,
    kronecker,
    simplify,
    _relation_kernel,
)


class MackeyAxiomError(ValueError):
    """Structure maps violate one of the Mackey axioms."""


class SignedFunctorError(ValueError):
    """Signed (p = 2 only) functors requested at an odd prime."""


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, int(p ** 0.5) + 1))


# ---------------------------------------------------------------------------
# the functor itself


class CpMackey:
    """A C_p-Mackey functor with validated structure maps."""

    __slots__ = ("p", "fixed", "underlying", "res", "tr", "weyl", "_cache", "name")

    def __init__(self, p: int, fixed: FgAbGroup, underlying: FgAbGroup, res: IntMatrix,
                 tr: IntMatrix, weyl: IntMatrix, *, check: bool = True, name: str | None = None):
        if not _is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        self.p = p
        self.fixed = fixed
        self.underlying = underlying
        self.res = GroupHom(fixed, underlying, res, check=check)
        self.tr = GroupHom(underlying, fixed, tr, check=check)
        self.weyl = GroupHom(underlying, underlying, weyl, check=check)
        self._cache = {}
        self.name = name
        if check:
            report = validate(self)
            if not report.ok:
                raise MackeyAxiomError("; ".join(report.failures))

    # convenient matrices on the underlying level
    def norm(self) -> GroupHom:
        if "N" not in self._cache:
            out = GroupHom.identity(self.underlying)
            power = GroupHom.identity(self.underlying)
            for _ in range(self.p - 1):
                power = self.weyl @ power
                out = out + power
            self._cache["N"] = out
        return self._cache["N"]

    def one_minus_t(self) -> GroupHom:
        return GroupHom.identity(self.underlying) - self.weyl

    def is_zero(self) -> bool:
        return self.fixed.is_zero() and self.underlying.is_zero()

    def levels(self) -> tuple:
        return (self.fixed.canonical_form(), self.underlying.canonical_form())

    def signature(self) -> tuple:
        """Isomorphism invariant finer than the pair of levels.

        Besides both levels it records kernels and cokernels of ``res``,
        ``tr``, ``1-t`` and ``N``.
        """
        if "sig" not in self._cache:
            out = [self.p, self.fixed.canonical_form(), self.underlying.canonical_form()]
            for f in (self.res, self.tr, self.one_minus_t(), self.norm()):
                out.append(kernel(f)[0].canonical_form())
                out.append(cokernel(f)[0].canonical_form())
            self._cache["sig"] = tuple(out)
        return self._cache["sig"]

    def describe(self) -> str:
        return (f"[{describe_group(self.fixed)} | {describe_group(self.underlying)}; "
                f"res={self.res.matrix.tolist()} tr={self.tr.matrix.tolist()} "
                f"t={self.weyl.matrix.tolist()}]")

    def __repr__(self) -> str:
        label = f"{self.name} " if self.name else ""
        return f"CpMackey(p={self.p}, {label}{self.describe()})"


@dataclass
class ValidationReport:
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __str__(self) -> str:
        return "valid" if self.ok else "invalid: " + "; ".join(self.failures)


def validate(M: CpMackey) -> ValidationReport:
    """Check well-definedness of the maps and the four Mackey axioms.

    Axiom 0 is ``t^p = 1``, axiom 1 ``(1-t) res = 0``, axiom 2
    ``tr (t-1) = 0`` and axiom 3 ``res tr = N``.
    """
    rep = ValidationReport()
    for name, f in (("res", M.res), ("tr", M.tr), ("weyl", M.weyl)):
        if not f.is_well_defined():
            rep.failures.append(f"{name} is not well defined on the given presentation")
    if rep.failures:
        return rep
    if not M.weyl.power(M.p).equals(GroupHom.identity(M.underlying)):
        rep.failures.append("axiom 0: weyl^p != identity")
    if not (M.one_minus_t() @ M.res).is_zero():
        rep.failures.append("axiom 1: (1-t) res != 0")
    if not (M.tr @ M.one_minus_t()).is_zero():
        rep.failures.append("axiom 2: tr (t-1) != 0")
    if not (M.res @ M.tr).equals(M.norm()):
        rep.failures.append("axiom 3: res tr != N")
    return rep


def build(p: int, fixed: FgAbGroup, underlying: FgAbGroup, res: IntMatrix, tr: IntMatrix,
          weyl: IntMatrix, *, check: bool = True, name: str | None = None) -> CpMackey:
    """Construct and simplify both levels to diagonal presentations."""
    sa, sb = simplify(fixed), simplify(underlying)
    return CpMackey(p, sa.new, sb.new,
                    sb.to_new @ res @ sa.from_new,
                    sa.to_new @ tr @ sb.from_new,
                    sb.to_new @ weyl @ sb.from_new, check=check, name=name)


def zero_mackey(p: int) -> CpMackey:
    Z0 = FgAbGroup.zero()
    return CpMackey(p, Z0, Z0, IntMatrix.zeros(0, 0), IntMatrix.zeros(0, 0), IntMatrix.zeros(0, 0))


# ---------------------------------------------------------------------------
# morphisms and sequences


class MackeyHom:
    """A pair of level maps commuting with ``res``, ``tr`` and ``weyl``."""

    __slots__ = ("source", "target", "on_fixed", "on_underlying")

    def __init__(self, source: CpMackey, target: CpMackey, on_fixed: GroupHom,
                 on_underlying: GroupHom, check: bool = True):
        self.source = source
        self.target = target
        self.on_fixed = on_fixed
        self.on_underlying = on_underlying
        if check:
            bad = self.failures()
            if bad:
                raise IllDefinedError("not a Mackey map: " + ", ".join(bad))

    @classmethod
    def from_matrices(cls, source, target, fixed_mat, under_mat, check=True) -> "MackeyHom":
        return cls(source, target, GroupHom(source.fixed, target.fixed, fixed_mat, check=check),
                   GroupHom(source.underlying, target.underlying, under_mat, check=check), check)

    @classmethod
    def identity(cls, M: CpMackey) -> "MackeyHom":
        return cls(M, M, GroupHom.identity(M.fixed), GroupHom.identity(M.underlying), False)

    @classmethod
    def zero(cls, M: CpMackey, N: CpMackey) -> "MackeyHom":
        return cls(M, N, GroupHom.zero(M.fixed, N.fixed), GroupHom.zero(M.underlying, N.underlying),
                   False)

    def failures(self) -> list[str]:
        s, t, f, g = self.source, self.target, self.on_fixed, self.on_underlying
        out = []
        if not (g @ s.res).equals(t.res @ f):
            out.append("res square")
        if not (f @ s.tr).equals(t.tr @ g):
            out.append("tr square")
        if not (g @ s.weyl).equals(t.weyl @ g):
            out.append("weyl square")
        return out

    def __matmul__(self, other: "MackeyHom") -> "MackeyHom":
        return MackeyHom(other.source, self.target, self.on_fixed @ other.on_fixed,
                         self.on_underlying @ other.on_underlying, check=False)

    def is_zero(self) -> bool:
        return self.on_fixed.is_zero() and self.on_underlying.is_zero()

    def is_isomorphism(self) -> bool:
        return self.on_fixed.is_isomorphism() and self.on_underlying.is_isomorphism()


def exact_pair(f: MackeyHom, g: MackeyHom) -> bool:
    """Levelwise exactness of ``X -f-> Y -g-> Z`` at ``Y``."""
    return exact_at(f.on_fixed, g.on_fixed) and exact_at(f.on_underlying, g.on_underlying)


def exact_sequence(maps: Sequence[MackeyHom]) -> bool:
    """Exactness of ``0 -> X_0 -> ... -> X_k -> 0`` given the inner maps."""
    if not maps:
        return True
    first, last = maps[0], maps[-1]
    if not (first.on_fixed.is_injective() and first.on_underlying.is_injective()):
        return False
    if not (last.on_fixed.is_surjective() and last.on_underlying.is_surjective()):
        return False
    return all(exact_pair(a, b) for a, b in zip(maps, maps[1:]))


@dataclass
class MackeySES:
    left: CpMackey
    middle: CpMackey
    right: CpMackey
    inject: MackeyHom
    surject: MackeyHom

    def is_exact(self) -> bool:
        return exact_sequence([self.inject, self.surject])


# ---------------------------------------------------------------------------
# modules, hats, fixed and orbit functors


@dataclass(frozen=True)
class CpModule:
    p: int
    group: FgAbGroup
    action: IntMatrix

    def __post_init__(self):
        g = GroupHom(self.group, self.group, self.action)
        if not g.power(self.p).equals(GroupHom.identity(self.group)):
            raise ValueError("action^p is not the identity")


def regular_module(p: int) -> CpModule:
    """``Z[C_p]`` with ``t`` cyclically shifting the basis."""
    t = IntMatrix([[1 if i == (j + 1) % p else 0 for j in range(p)] for i in range(p)])
    return CpModule(p, FgAbGroup.free(p), t)


def trivial_module(p: int, G: FgAbGroup) -> CpModule:
    return CpModule(p, G, IntMatrix.identity(G.ngens))


def _norm_matrix(p: int, t: IntMatrix) -> IntMatrix:
    n = t.rows
    out = IntMatrix.identity(n)
    power = IntMatrix.identity(n)
    for _ in range(p - 1):
        power = t @ power
        out = out + power
    return out


def from_subquotients(p: int, fixed: Subquotient, under: Subquotient | None,
                      res_amb: IntMatrix | None, tr_amb: IntMatrix | None,
                      weyl_amb: IntMatrix | None, name: str | None = None) -> CpMackey:
    """Mackey functor whose levels are subquotients, maps induced from ambients."""
    A = fixed.group
    if under is None:
        Z0 = FgAbGroup.zero()
        return CpMackey(p, A, Z0, IntMatrix.zeros(0, A.ngens), IntMatrix.zeros(A.ngens, 0),
                        IntMatrix.zeros(0, 0), check=False, name=name)
    B = under.group
    R = induced_hom(res_amb, fixed, under)
    T = induced_hom(tr_amb, under, fixed)
    W = induced_hom(weyl_amb, under, under)
    return CpMackey(p, A, B, R.matrix, T.matrix, W.matrix, check=False, name=name)


def hat(p: int, A: FgAbGroup) -> CpMackey:
    """``A`` in the fixed level, zero underlying level."""
    s = simplify(A).new
    Z0 = FgAbGroup.zero()
    return CpMackey(p, s, Z0, IntMatrix.zeros(0, s.ngens), IntMatrix.zeros(s.ngens, 0),
                    IntMatrix.zeros(0, 0), name=f"hat({describe_group(s)})")


def _full(G: FgAbGroup) -> Subquotient:
    return Subquotient.whole(G)


def fixed_mackey(mod: CpModule) -> CpMackey:
    B, t = mod.group, mod.action
    one = IntMatrix.identity(B.ngens)
    fix = Subquotient(B, _relation_kernel(one - t, B), IntMatrix.zeros(B.ngens, 0))
    return from_subquotients(mod.p, fix, _full(B), one, _norm_matrix(mod.p, t), t, name="F")


def orbit_mackey(mod: CpModule) -> CpMackey:
    B, t = mod.group, mod.action
    one = IntMatrix.identity(B.ngens)
    orb = Subquotient(B, one, one - t)
    return from_subquotients(mod.p, orb, _full(B), _norm_matrix(mod.p, t), one, t, name="O")


def norm_map(mod: CpModule) -> MackeyHom:
    """``[x] -> N x`` from the orbit functor to the fixed point functor."""
    B, t = mod.group, mod.action
    one = IntMatrix.identity(B.ngens)
    O, F = orbit_mackey(mod), fixed_mackey(mod)
    orb = Subquotient(B, one, one - t)
    fix = Subquotient(B, _relation_kernel(one - t, B), IntMatrix.zeros(B.ngens, 0))
    f = induced_hom(_norm_matrix(mod.p, t), orb, fix)
    return MackeyHom(O, F, f, GroupHom.identity(F.underlying))


def constant(p: int, G: FgAbGroup) -> CpMackey:
    """Constant functor: ``res = 1``, ``tr = p``."""
    return fixed_mackey(trivial_module(p, G))


def coconstant(p: int, G: FgAbGroup) -> CpMackey:
    """Coconstant functor: ``res = p``, ``tr = 1``."""
    return orbit_mackey(trivial_module(p, G))


# ---------------------------------------------------------------------------
# Burnside functors


def normalize_unit(p: int, a: int) -> int:
    """Representative of ``a`` in ``(Z/p)^x / {+-1}`` taken from ``1..(p-1)//2``.

    At ``p = 2`` the quotient is trivial and the representative is 1.
    """
    a %= p
    if a == 0:
        raise ValueError(f"{a} is not a unit mod {p}")
    if p == 2:
        return 1
    return min(a, p - a)


def unit_inverse(p: int, a: int) -> int:
    return normalize_unit(p, pow(a, -1, p))


def burnside_twisted(p: int, a: int = 1) -> CpMackey:
    a = normalize_unit(p, a)
    return CpMackey(p, FgAbGroup.free(2), FgAbGroup.free(1), IntMatrix([[a, p]]),
                    IntMatrix([[0], [1]]), IntMatrix([[1]]),
                    name="A" if a == 1 else f"A^{a}")


def burnside(p: int) -> CpMackey:
    return burnside_twisted(p, 1)


# ---------------------------------------------------------------------------
# derived functors


#: ascii key -> display symbol
SYMBOLS = {
    "M": "M",
    "im_R": "R",
    "im_tr": "T",
    "F": "F",
    "O": "𝒪",
    "im_N": "I",
    "ker_N_hat": "∘",
    "coker_N_hat": "•",
    "ker_R_hat": "∘̄",
    "coker_R_hat": "•̄",
    "ker_tr_hat": "∘_",
    "coker_tr_hat": "•_",
    "triangle_up": "▲",
    "triangle_down": "▽",
    "ker_tr_minus": "M⁻",
    "ker_N_minus": "F⁻",
    "O_minus": "𝒪⁻",
    "coker_R_minus": "M₋",
    "F_minus": "F₋",
    "coker_N_minus": "𝒪₋",
}

HAT_KEYS = ("ker_N_hat", "coker_N_hat", "ker_R_hat", "coker_R_hat", "ker_tr_hat",
            "coker_tr_hat", "triangle_up", "triangle_down")
SIGNED_KEYS = ("ker_tr_minus", "ker_N_minus", "O_minus", "coker_R_minus", "F_minus",
               "coker_N_minus")
UNSIGNED_KEYS = ("M", "im_R", "im_tr", "F", "O", "im_N") + HAT_KEYS
ALL_KEYS = UNSIGNED_KEYS + SIGNED_KEYS


@dataclass
class Piece:
    """A functor built from ``parent`` with levels as subquotients of its levels.

    ``fixed_amb`` says whether the fixed level lives in the parent's fixed
    level ("A") or underlying level ("B").  The underlying level, when
    present, is always a subquotient of the parent's underlying level,
    with the Weyl action multiplied by ``sign``.
    """

    key: str
    parent: CpMackey
    mackey: CpMackey
    fixed_amb: str
    fixed_sq: Subquotient
    under_sq: Subquotient | None
    sign: int = 1
    res_amb: IntMatrix | None = None
    tr_amb: IntMatrix | None = None

    @property
    def symbol(self) -> str:
        return SYMBOLS.get(self.key, self.key)


class _Ambient:
    """Matrices of the parent functor used to define and connect pieces."""

    def __init__(self, M: CpMackey):
        self.M = M
        self.A, self.B = M.fixed, M.underlying
        nb = self.B.ngens
        self.I_A = IntMatrix.identity(self.A.ngens)
        self.I_B = IntMatrix.identity(nb)
        self.R = M.res.matrix
        self.tr = M.tr.matrix
        self.t = M.weyl.matrix
        self.N = M.norm().matrix
        self.one_t = self.I_B - self.t
        self.zero_B = IntMatrix.zeros(nb, 0)
        self.zero_A = IntMatrix.zeros(self.A.ngens, 0)

    def kerB(self, f: IntMatrix, target: FgAbGroup) -> IntMatrix:
        return _relation_kernel(f, target)


def _ambients(M: CpMackey) -> _Ambient:
    if "amb" not in M._cache:
        M._cache["amb"] = _Ambient(M)
    return M._cache["amb"]


def derived(M: CpMackey, key: str) -> Piece:
    """One derived functor of ``M`` (cached)."""
    cache = M._cache.setdefault("pieces", {})
    if key not in cache:
        cache[key] = _make_piece(M, key)
    return cache[key]


def derived_functors(M: CpMackey, signed: bool | None = None) -> dict[str, Piece]:
    """All derived functors of ``M``; the signed ones only at ``p = 2``."""
    if signed is None:
        signed = M.p == 2
    if signed and M.p != 2:
        raise SignedFunctorError("signed functors exist only at p = 2")
    keys = ALL_KEYS if signed else UNSIGNED_KEYS
    return {k: derived(M, k) for k in keys}


def _make_piece(M: CpMackey, key: str) -> Piece:
    if key in SIGNED_KEYS and M.p != 2:
        raise SignedFunctorError(f"{key} is only defined at p = 2")
    a = _ambients(M)
    A, B = a.A, a.B
    sqA = lambda num, den=None: Subquotient(A, num, a.zero_A if den is None else den)
    sqB = lambda num, den=None: Subquotient(B, num, a.zero_B if den is None else den)
    fullB = Subquotient.whole(B)
    kerN = a.kerB(a.N, B)
    ker1t = a.kerB(a.one_t, B)
    kertr = a.kerB(a.tr, A)

    # key: (fixed ambient, fixed subquotient, underlying?, res amb, tr amb, sign)
    if key == "M":
        spec = ("A", Subquotient.whole(A), True, a.R, a.tr, 1)
    elif key == "im_R":
        spec = ("B", sqB(a.R), True, a.I_B, a.N, 1)
    elif key == "im_tr":
        spec = ("A", sqA(a.tr), True, a.R, a.tr, 1)
    elif key == "F":
        spec = ("B", sqB(ker1t), True, a.I_B, a.N, 1)
    elif key == "O":
        spec = ("B", sqB(a.I_B, a.one_t), True, a.N, a.I_B, 1)
    elif key == "im_N":
        spec = ("B", sqB(a.N), True, a.I_B, a.N, 1)
    elif key == "ker_N_hat":
        spec = ("B", sqB(kerN, a.one_t), False, None, None, 1)
    elif key == "coker_N_hat":
        spec = ("B", sqB(ker1t, a.N), False, None, None, 1)
    elif key == "ker_R_hat":
        spec = ("A", sqA(a.kerB(a.R, B)), False, None, None, 1)
    elif key == "coker_R_hat":
        spec = ("B", sqB(ker1t, a.R), False, None, None, 1)
    elif key == "ker_tr_hat":
        spec = ("B", sqB(kertr, a.one_t), False, None, None, 1)
    elif key == "coker_tr_hat":
        spec = ("A", sqA(a.I_A, a.tr), False, None, None, 1)
    elif key == "triangle_up":
        spec = ("B", sqB(a.R, a.N), False, None, None, 1)
    elif key == "triangle_down":
        spec = ("B", sqB(kerN, kertr), False, None, None, 1)
    elif key == "ker_tr_minus":
        spec = ("B", sqB(kertr), True, a.I_B, a.one_t, -1)
    elif key == "ker_N_minus":
        spec = ("B", sqB(kerN), True, a.I_B, a.one_t, -1)
    elif key == "O_minus":
        spec = ("B", sqB(a.one_t), True, a.I_B, a.one_t, -1)
    elif key == "coker_R_minus":
        spec = ("B", sqB(a.I_B, a.R), True, a.one_t, a.I_B, -1)
    elif key == "F_minus":
        spec = ("B", sqB(a.I_B, ker1t), True, a.one_t, a.I_B, -1)
    elif key == "coker_N_minus":
        spec = ("B", sqB(a.I_B, a.N), True, a.one_t, a.I_B, -1)
    else:
        raise KeyError(f"unknown derived functor {key!r}")
    amb, fsq, has_under, res_amb, tr_amb, sign = spec
    usq = fullB if has_under else None
    weyl = a.t.scale(sign) if has_under else None
    if key == "M":
        mk = M
    else:
        mk = from_subquotients(M.p, fsq, usq, res_amb, tr_amb, weyl, name=SYMBOLS[key])
    return Piece(key, M, mk, amb, fsq, usq, sign, res_amb, tr_amb)


def ambient_map(M: CpMackey, src: str, dst: str, kind: str = "canonical") -> IntMatrix:
    """Named map between the parent's levels ("A" or "B").

    ``canonical`` means identity, ``res`` (A to B) or ``tr`` (B to A).
    Other kinds on B to B: ``1-t``, ``N``, ``t``.
    """
    a = _ambients(M)
    if src == "A" and dst == "A":
        return a.I_A
    if src == "A" and dst == "B":
        return a.R
    if src == "B" and dst == "A":
        return a.tr
    return {"canonical": a.I_B, "1-t": a.one_t, "N": a.N, "t": a.t,
            "1+t": a.I_B + a.t}[kind]


def piece_hom(P: Piece, Q: Piece, fixed_kind: str = "canonical",
              under_kind: str = "canonical", check: bool = True) -> MackeyHom:
    """Mackey map between two pieces of the same parent induced by ambient maps.

    Raises :class:`IllDefinedError` if the ambient maps do not descend or
    the result does not commute with the structure maps.
    """
    if P.parent is not Q.parent:
        raise ValueError("pieces of different functors")
    M = P.parent
    f = induced_hom(ambient_map(M, P.fixed_amb, Q.fixed_amb, fixed_kind), P.fixed_sq, Q.fixed_sq)
    if P.under_sq is None or Q.under_sq is None:
        g = GroupHom.zero(P.mackey.underlying, Q.mackey.underlying)
    else:
        g = induced_hom(ambient_map(M, "B", "B", under_kind), P.under_sq, Q.under_sq)
    return MackeyHom(P.mackey, Q.mackey, f, g, check=check)


# ---------------------------------------------------------------------------
# short exact sequences


def _ses(M, left_key, mid_key, right_key) -> MackeySES:
    L, C, Rt = derived(M, left_key), derived(M, mid_key), derived(M, right_key)
    return MackeySES(L.mackey, C.mackey, Rt.mackey, piece_hom(L, C), piece_hom(C, Rt))


def ses_ker_R(M: CpMackey) -> MackeySES:
    """``0 -> ker(R)^ -> M -> im(R) -> 0``."""
    return _ses(M, "ker_R_hat", "M", "im_R")


def ses_im_R_to_F(M: CpMackey) -> MackeySES:
    """``0 -> im(R) -> F(M) -> coker(R)^ -> 0``."""
    return _ses(M, "im_R", "F", "coker_R_hat")


def ses_im_tr(M: CpMackey) -> MackeySES:
    """``0 -> im(tr) -> M -> coker(tr)^ -> 0``."""
    return _ses(M, "im_tr", "M", "coker_tr_hat")


def ses_ker_tr_to_O(M: CpMackey) -> MackeySES:
    """``0 -> ker(tr)^ -> O(M) -> im(tr) -> 0``."""
    return _ses(M, "ker_tr_hat", "O", "im_tr")


def ses_norm(M: CpMackey) -> list[MackeyHom]:
    """``0 -> ker(N)^ -> O(M) -> F(M) -> coker(N)^ -> 0`` as a list of maps."""
    K, O, F, C = (derived(M, k) for k in ("ker_N_hat", "O", "F", "coker_N_hat"))
    return [piece_hom(K, O), piece_hom(O, F, "N"), piece_hom(F, C)]


ALL_SES = (ses_ker_R, ses_im_R_to_F, ses_im_tr, ses_ker_tr_to_O)


# ---------------------------------------------------------------------------
# box product and twisting


def _tensor_group(G: FgAbGroup, H: FgAbGroup) -> IntMatrix:
    return kronecker(G.relations, IntMatrix.identity(H.ngens)).hstack(
        kronecker(IntMatrix.identity(G.ngens), H.relations))


def box_product(M: CpMackey, N: CpMackey) -> CpMackey:
    """Box product, fixed level presented by generators and Frobenius relations.

    Fixed generators are ``a (x) b`` for fixed-level generators and ``[u]``
    for underlying tensors ``u``; relations identify ``[u]`` with ``[tu]``,
    ``tr(x) (x) b`` with ``[x (x) res b]`` and ``a (x) tr(y)`` with
    ``[res a (x) y]``.
    """
    if M.p != N.p:
        raise ValueError("box product of functors at different primes")
    p = M.p
    gA, hA = M.fixed.ngens, N.fixed.ngens
    gB, hB = M.underlying.ngens, N.underlying.ngens
    nF, nU = gA * hA, gB * hB
    U = FgAbGroup(nU, _tensor_group(M.underlying, N.underlying))
    t = kronecker(M.weyl.matrix, N.weyl.matrix)
    one = IntMatrix.identity(nU)
    cols = []
    rel_F = _tensor_group(M.fixed, N.fixed)
    cols.append(rel_F.vstack(IntMatrix.zeros(nU, rel_F.cols)))
    cols.append(IntMatrix.zeros(nF, U.relations.cols).vstack(U.relations))
    cols.append(IntMatrix.zeros(nF, nU).vstack(one - t))
    # tr(x) (x) b ~ [x (x) res b] for x in B_M, b in A_N
    left = kronecker(M.tr.matrix, IntMatrix.identity(hA))
    right = kronecker(IntMatrix.identity(gB), N.res.matrix)
    cols.append((-left).vstack(right))
    # a (x) tr(y) ~ [res a (x) y] for a in A_M, y in B_N
    left = kronecker(IntMatrix.identity(gA), N.tr.matrix)
    right = kronecker(M.res.matrix, IntMatrix.identity(hB))
    cols.append((-left).vstack(right))
    rel = cols[0].hstack(*cols[1:])
    fixed = FgAbGroup(nF + nU, rel)
    norm = _norm_matrix(p, t)
    res = kronecker(M.res.matrix, N.res.matrix).hstack(norm)
    tr = IntMatrix.zeros(nF, nU).vstack(one)
    return build(p, fixed, U, res, tr, t)


def twist(M: CpMackey, a: int) -> CpMackey:
    """``A^a box M``."""
    a = normalize_unit(M.p, a)
    if a == 1:
        return M
    key = ("twist", a)
    if key not in M._cache:
        M._cache[key] = box_product(burnside_twisted(M.p, a), M)
    return M._cache[key]


# ---------------------------------------------------------------------------
# isomorphism tests


def mackey_levelwise_iso(M: CpMackey, N: CpMackey) -> bool:
    return M.p == N.p and M.levels() == N.levels()


def signatures_equal(M: CpMackey, N: CpMackey) -> bool:
    return M.p == N.p and M.signature() == N.signature()


@dataclass
class IsoSearchResult:
    status: str  # "found", "absent" or "unknown"
    hom: MackeyHom | None = None


def _automorphism_candidates(G: FgAbGroup, H: FgAbGroup, bound: int):
    """Candidate matrices G -> H; finite and complete when free rank <= 1."""
    og, oh = G.orders, H.orders
    entries = []
    for i in range(H.ngens):
        for j in range(G.ngens):
            o_t, o_s = oh[i], og[j]
            if o_t:
                entries.append(range(o_t))
            elif o_s:
                entries.append((0,))  # torsion cannot map into a free summand
            else:
                entries.append(range(-bound, bound + 1))
    for vals in product(*entries):
        yield IntMatrix([vals[i * G.ngens:(i + 1) * G.ngens] for i in range(H.ngens)],
                        H.ngens, G.ngens)


def mackey_iso_search(M: CpMackey, N: CpMackey, budget: int = 20000) -> IsoSearchResult:
    """Bounded search for a structure-preserving isomorphism ``M -> N``.

    Definitive ("absent") when the signatures differ or the search space is
    finite and exhausted; otherwise "unknown" when the budget runs out.
    """
    if not signatures_equal(M, N):
        return IsoSearchResult("absent")
    frees = [G.canonical_form()[0] for G in (M.fixed, M.underlying)]
    complete = max(frees) <= 1
    bound = 1 if complete else 2
    tried = 0
    for g in _automorphism_candidates(M.underlying, N.underlying, bound):
        gh = GroupHom(M.underlying, N.underlying, g, check=False)
        if not gh.is_well_defined() or not (gh @ M.weyl).equals(N.weyl @ gh):
            tried += 1
            if tried > budget:
                return IsoSearchResult("unknown")
            continue
        if not gh.is_isomorphism():
            continue
        for f in _automorphism_candidates(M.fixed, N.fixed, bound):
            tried += 1
            if tried > budget:
                return IsoSearchResult("unknown")
            fh = GroupHom(M.fixed, N.fixed, f, check=False)
            if not fh.is_well_defined():
                continue
            h = MackeyHom(M, N, fh, gh, check=False)
            if not h.failures() and h.is_isomorphism():
                return IsoSearchResult("found", h)
    return IsoSearchResult("absent" if complete else "unknown")


# ---------------------------------------------------------------------------
# serialization


def _group_to_json(G: FgAbGroup) -> dict:
    return {"generators": G.ngens, "relations": [list(c) for c in G.relations.columns()]}


def _group_from_json(obj, where: str) -> FgAbGroup:
    if not isinstance(obj, dict) or "generators" not in obj:
        raise ValueError(f"{where}: expected an object with 'generators'")
    n = obj["generators"]
    if not isinstance(n, int) or n < 0:
        raise ValueError(f"{where}.generators: expected a non-negative integer")
    rels = obj.get("relations", [])
    for i, r in enumerate(rels):
        if not isinstance(r, list) or len(r) != n or not all(isinstance(x, int) for x in r):
            raise ValueError(f"{where}.relations[{i}]: expected {n} integers")
    return FgAbGroup(n, IntMatrix.from_columns(rels, n))


def _matrix_from_json(obj, rows: int, cols: int, where: str) -> IntMatrix:
    if rows == 0 or cols == 0:
        if obj not in ([], [[]] * rows) and not (isinstance(obj, list) and len(obj) == rows
                                                and all(r == [] for r in obj)):
            raise ValueError(f"{where}: expected a {rows}x{cols} matrix")
        return IntMatrix.zeros(rows, cols)
    if not isinstance(obj, list) or len(obj) != rows or any(
            not isinstance(r, list) or len(r) != cols or not all(isinstance(x, int) for x in r)
            for r in obj):
        raise ValueError(f"{where}: expected a {rows}x{cols} integer matrix")
    return IntMatrix(obj, rows, cols)


def mackey_to_dict(M: CpMackey) -> dict:
    return {"p": M.p, "fixed": _group_to_json(M.fixed), "underlying": _group_to_json(M.underlying),
            "res": M.res.matrix.tolist(), "tr": M.tr.matrix.tolist(),
            "weyl": M.weyl.matrix.tolist()}


def mackey_from_dict(obj: dict) -> CpMackey:
    if not isinstance(obj, dict):
        raise ValueError("expected a JSON object")
    for key in ("p", "fixed", "underlying", "res", "tr", "weyl"):
        if key not in obj:
            raise ValueError(f"missing field {key!r}")
    p = obj["p"]
    if not isinstance(p, int) or not _is_prime(p):
        raise ValueError("p: expected a prime")
    A = _group_from_json(obj["fixed"], "fixed")
    B = _group_from_json(obj["underlying"], "underlying")
    res = _matrix_from_json(obj["res"], B.ngens, A.ngens, "res")
    tr = _matrix_from_json(obj["tr"], A.ngens, B.ngens, "tr")
    weyl = _matrix_from_json(obj["weyl"], B.ngens, B.ngens, "weyl")
    for name, mat, s, t in (("res", res, A, B), ("tr", tr, B, A), ("weyl", weyl, B, B)):
        if not GroupHom(s, t, mat, check=False).is_well_defined():
            raise MackeyAxiomError(f"{name}: not well defined on the given presentation")
    M = CpMackey(p, A, B, res, tr, weyl, check=False)
    report = validate(M)
    if not report.ok:
        raise MackeyAxiomError("; ".join(report.failures))
    return M


def serialize_mackey(M: CpMackey) -> str:
    return json.dumps(mackey_to_dict(M), sort_keys=True)


def parse_mackey(text: str) -> CpMackey:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return mackey_from_dict(obj)


def describe_mackey(M: CpMackey) -> dict:
    """Canonical, presentation-independent summary used in JSON outputs."""
    return {"fixed": describe_group(M.fixed), "underlying": describe_group(M.underlying)}


def direct_sum(*summands: CpMackey) -> CpMackey:
    if not summands:
        raise ValueError("empty direct sum")
    p = summands[0].p
    if any(M.p != p for M in summands):
        raise ValueError("direct sum of functors at different primes")

    def dsum(groups):
        n = sum(G.ngens for G in groups)
        return FgAbGroup(n, block_diagonal([G.relations for G in groups]))

    return build(p, dsum([M.fixed for M in summands]), dsum([M.underlying for M in summands]),
                 block_diagonal([M.res.matrix for M in summands]),
                 block_diagonal([M.tr.matrix for M in summands]),
                 block_diagonal([M.weyl.matrix for M in summands]))


def piece_map(phi: MackeyHom, P: Piece, Q: Piece) -> MackeyHom:
    """Map ``D(M) -> D(M')`` induced by ``phi: M -> M'`` on pieces of the same kind."""
    if P.key != Q.key or P.parent is not phi.source or Q.parent is not phi.target:
        raise ValueError("pieces do not match the map")
    amb = phi.on_fixed.matrix if P.fixed_amb == "A" else phi.on_underlying.matrix
    f = induced_hom(amb, P.fixed_sq, Q.fixed_sq)
    if P.under_sq is None:
        g = GroupHom.zero(P.mackey.underlying, Q.mackey.underlying)
    else:
        g = induced_hom(phi.on_underlying.matrix, P.under_sq, Q.under_sq)
    return MackeyHom(P.mackey, Q.mackey, f, g, check=False)


def _preimage(f: IntMatrix, src: Subquotient, dst: Subquotient) -> IntMatrix:
    """Generators of ``{x in num(src) : f x in den(dst)}`` in ambient coordinates."""
    big = (f @ src.num).hstack(dst.den, dst.ambient.relations)
    K = kernel_basis(big)
    return src.num @ K.submatrix(list(range(src.num.cols)), None)


def _sub_piece(P: Piece, key: str, fsq: Subquotient, usq: Subquotient | None) -> Piece:
    M = P.parent
    weyl = ambient_map(M, "B", "B", "t").scale(P.sign) if usq is not None else None
    mk = from_subquotients(M.p, fsq, usq, P.res_amb, P.tr_amb, weyl, name=key)
    return Piece(key, M, mk, P.fixed_amb, fsq, usq, P.sign, P.res_amb, P.tr_amb)


def piece_kernel(P: Piece, Q: Piece, fixed_kind: str = "canonical",
                 under_kind: str = "canonical", key: str | None = None) -> Piece:
    """Kernel of :func:`piece_hom` as a piece with the same ambients as ``P``."""
    M = P.parent
    f = ambient_map(M, P.fixed_amb, Q.fixed_amb, fixed_kind)
    fsq = Subquotient(P.fixed_sq.ambient, _preimage(f, P.fixed_sq, Q.fixed_sq), P.fixed_sq.den)
    usq = P.under_sq
    if usq is not None and Q.under_sq is not None:
        g = ambient_map(M, "B", "B", under_kind)
        usq = Subquotient(usq.ambient, _preimage(g, usq, Q.under_sq), usq.den)
    return _sub_piece(P, key or f"ker({P.key}->{Q.key})", fsq, usq)


def piece_cokernel(P: Piece, Q: Piece, fixed_kind: str = "canonical",
                   under_kind: str = "canonical", key: str | None = None) -> Piece:
    """Cokernel of :func:`piece_hom` as a piece with the same ambients as ``Q``."""
    M = P.parent
    f = ambient_map(M, P.fixed_amb, Q.fixed_amb, fixed_kind)
    fsq = Subquotient(Q.fixed_sq.ambient, Q.fixed_sq.num,
                      Q.fixed_sq.den.hstack(f @ P.fixed_sq.num))
    usq = Q.under_sq
    if usq is not None and P.under_sq is not None:
        g = ambient_map(M, "B", "B", under_kind)
        usq = Subquotient(usq.ambient, usq.num, usq.den.hstack(g @ P.under_sq.num))
    return _sub_piece(Q, key or f"coker({P.key}->{Q.key})", fsq, usq)
