"""Homology of representation spheres with Mackey functor coefficients.

A virtual representation ``V = m + sum n_i lambda(i) (+ s sigma at p = 2)``
reduces to ``m + n lambda`` together with a twist class ``a``.  Homology is
computed two ways:

* from an explicit cellular chain complex of Mackey functors (one fixed
  cell in dimension ``m`` and free cells above it, or the cochain dual for
  negative ``n``), taking homology levelwise and inducing the structure
  maps, then twisting by ``a^{-1}``;
* from the closed-form table in terms of derived functors.

:func:`crosscheck` compares the two.

>>> from cpslice.builtins import builtin
>>> H = homology_of_sphere(parse_rep("2λ", 3), builtin("Z", 3))
>>> [(d, describe_mackey(M)["fixed"]) for d, M in sorted(H.items())]
[(0, 'Z/3'), (2, 'Z/3'), (4, 'Z')]
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .linalg import (
    FgAbGroup,
    GroupChainComplex,
    GroupHom,
    IntMatrix,
    Subquotient,
    block_diagonal,
    homology_at,
)
from .mackey import (
    CpMackey,
    MackeyHom,
    derived,
    describe_mackey,
    from_subquotients,
    normalize_unit,
    signatures_equal,
    twist,
    unit_inverse,
)


# ---------------------------------------------------------------------------
# representations


@dataclass(frozen=True)
class VirtualRep:
    """``m + sum_i n_i lambda(i) + sigma_count sigma`` (sigma only at p = 2)."""

    p: int
    m: int
    lambda_mult: tuple = ()  # sorted (i, n_i) pairs with n_i != 0
    sigma: int = 0

    def __post_init__(self):
        if self.sigma and self.p != 2:
            raise ValueError("sigma summands exist only at p = 2")
        hi = max(1, (self.p - 1) // 2)
        clean = {}
        for i, n in dict(self.lambda_mult).items():
            if not 1 <= i <= hi:
                raise ValueError(f"lambda({i}) is not defined at p = {self.p}; use 1..{hi}")
            if n:
                clean[i] = clean.get(i, 0) + n
        object.__setattr__(self, "lambda_mult", tuple(sorted((i, n) for i, n in clean.items() if n)))

    @classmethod
    def simple(cls, p: int, m: int, n: int | Fraction = 0) -> "VirtualRep":
        """``m + n lambda``; at ``p = 2`` a half-integer ``n`` uses one sigma."""
        two_n = Fraction(n) * 2
        if two_n.denominator != 1:
            raise ValueError("n must be an integer or a half-integer")
        two_n = int(two_n)
        if two_n % 2:
            if p != 2:
                raise ValueError("half-integer n needs p = 2")
            return cls(p, m, (), two_n)
        return cls(p, m, ((1, two_n // 2),) if two_n else ())

    @property
    def two_n(self) -> int:
        return 2 * sum(n for _, n in self.lambda_mult) + self.sigma

    @property
    def n(self) -> Fraction:
        return Fraction(self.two_n, 2)

    @property
    def dim(self) -> int:
        return self.m + self.two_n

    def twist_class(self) -> int:
        a = 1
        for i, k in self.lambda_mult:
            a = a * pow(i, k, self.p) % self.p
        return normalize_unit(self.p, a)

    def __str__(self) -> str:
        parts = [str(self.m)] if self.m or not (self.lambda_mult or self.sigma) else []
        for i, k in self.lambda_mult:
            parts.append(f"λ({i})^{k}")
        if self.sigma:
            parts.append(f"σ^{self.sigma}")
        return "+".join(parts).replace("+-", "-")


def reduce(V: VirtualRep) -> tuple[int, Fraction, int]:
    """``(m, n, a)`` with ``a`` the twist class in ``(Z/p)^x/{+-1}``."""
    return V.m, V.n, V.twist_class()


_TERM = re.compile(
    r"\s*([+-])?\s*(?:(?P<coef>\d+)\s*\*?\s*(?=[λLσs]|lambda|sigma))?(?:"
    r"(?P<int>\d+)"
    r"|(?P<lam>λ|lambda|L)(?:\((?P<idx>\d+)\))?(?:\^(?P<lexp>[+-]?\d+))?"
    r"|(?P<sig>σ|sigma|s)(?:\^(?P<sexp>[+-]?\d+))?"
    r")\s*")


def parse_rep(text: str, p: int) -> VirtualRep:
    """Parse literals such as ``3+λ(1)^1+2λ(2)`` or ``-2+σ^3``.

    ``lambda``/``L`` and ``sigma``/``s`` are accepted as ASCII spellings; a
    bare ``λ`` means ``λ(1)^1``.
    """
    pos, m, lam, sig = 0, 0, {}, 0
    text = text.strip()
    if not text:
        raise ValueError("empty representation literal")
    first = True
    while pos < len(text):
        mt = _TERM.match(text, pos)
        if not mt or mt.end() == pos or (not first and not mt.group(1)):
            raise ValueError(f"cannot parse representation at position {pos}: {text[pos:]!r}")
        sign = -1 if mt.group(1) == "-" else 1
        if mt.group("coef") is not None:
            sign *= int(mt.group("coef"))
        if mt.group("int") is not None:
            m += sign * int(mt.group("int"))
        elif mt.group("lam"):
            i = int(mt.group("idx") or 1)
            k = int(mt.group("lexp") or 1)
            lam[i] = lam.get(i, 0) + sign * k
        else:
            sig += sign * int(mt.group("sexp") or 1)
        pos = mt.end()
        first = False
    return VirtualRep(p, m, tuple(lam.items()), sig)


# ---------------------------------------------------------------------------
# chain complexes of Mackey functors


@dataclass
class MackeyChainComplex:
    """Terms by position with differentials ``d[k]: C_k -> C_{k-1}``."""

    terms: dict
    differentials: dict

    def level(self, which: str) -> GroupChainComplex:
        groups = {k: getattr(T, which) for k, T in self.terms.items()}
        attr = "on_fixed" if which == "fixed" else "on_underlying"
        ds = {k: getattr(d, attr) for k, d in self.differentials.items()}
        return GroupChainComplex(groups, ds)

    def check(self) -> None:
        self.level("fixed").check()
        self.level("underlying").check()

    def homology(self, k: int) -> CpMackey:
        T = self.terms[k]
        fsq = homology_at(self.level("fixed"), k)
        usq = homology_at(self.level("underlying"), k)
        return from_subquotients(T.p, fsq, usq, T.res.matrix, T.tr.matrix, T.weyl.matrix)


def _power(t: IntMatrix, k: int) -> IntMatrix:
    out = IntMatrix.identity(t.rows)
    for _ in range(k):
        out = t @ out
    return out


class _Induced:
    """The functor of a free cell: fixed ``B``, underlying ``B^p``.

    ``res`` is the diagonal, ``tr`` the sum of components and the Weyl
    generator shifts components cyclically.
    """

    def __init__(self, M: CpMackey):
        p, B = M.p, M.underlying
        b = B.ngens
        self.M = M
        self.Bp = FgAbGroup(p * b, block_diagonal([B.relations] * p))
        I = IntMatrix.identity(b)
        self.delta = I.vstack(*([I] * (p - 1)))
        self.nabla = I.hstack(*([I] * (p - 1)))
        # (sh y)_i = y_{i-1}
        self.sh = IntMatrix([[1 if (r // b) == ((c // b) + 1) % p and r % b == c % b else 0
                              for c in range(p * b)] for r in range(p * b)])
        self.functor = CpMackey(p, B, self.Bp, self.delta, self.nabla, self.sh, check=False)
        t = M.weyl.matrix
        self.tinv = _power(t, p - 1)
        tpows = [_power(t, i) for i in range(p)]
        # nabla'(y) = sum t^i y_i
        self.nabla_prime = tpows[0].hstack(*tpows[1:])
        # delta'(x) = (t^{-i} x)_i
        self.delta_prime = tpows[0].vstack(*[tpows[(p - i) % p] for i in range(1, p)])
        tinv_sh = block_diagonal([self.tinv] * p) @ self.sh
        self.one_minus = IntMatrix.identity(p * b) - tinv_sh
        acc = IntMatrix.identity(p * b)
        power = IntMatrix.identity(p * b)
        for _ in range(p - 1):
            power = tinv_sh @ power
            acc = acc + power
        self.norm_like = acc
        self.fixed_one_minus = IntMatrix.identity(b) - self.tinv
        self.fixed_norm = M.norm().matrix


def _induced(M: CpMackey) -> _Induced:
    if "induced" not in M._cache:
        M._cache["induced"] = _Induced(M)
    return M._cache["induced"]


def _hom(src: CpMackey, dst: CpMackey, f: IntMatrix, g: IntMatrix) -> MackeyHom:
    return MackeyHom(src, dst, GroupHom(src.fixed, dst.fixed, f, check=False),
                     GroupHom(src.underlying, dst.underlying, g, check=False), check=False)


def _two_n_of(n) -> int:
    two_n = Fraction(n) * 2
    if two_n.denominator != 1:
        raise ValueError("n must be an integer or a half-integer")
    return int(two_n)


def cellular_complex(p: int, m: int, n, M: CpMackey) -> MackeyChainComplex:
    """Chain complex of ``S^{m + n lambda}`` for ``n > 0``, positions ``m..m+2n``."""
    two_n = _two_n_of(n)
    if two_n <= 0:
        raise ValueError("cellular_complex needs n > 0; use dual_complex")
    if p != M.p:
        raise ValueError("prime mismatch")
    if two_n % 2 and p != 2:
        raise ValueError("half-integer n needs p = 2")
    ind = _induced(M)
    I = ind.functor
    terms = {m: M}
    diffs = {}
    for j in range(1, two_n + 1):
        terms[m + j] = I
        if j == 1:
            diffs[m + 1] = _hom(I, M, M.tr.matrix, ind.nabla_prime)
        elif j % 2 == 0:
            diffs[m + j] = _hom(I, I, ind.fixed_one_minus, ind.one_minus)
        else:
            diffs[m + j] = _hom(I, I, ind.fixed_norm, ind.norm_like)
    return MackeyChainComplex(terms, diffs)


def dual_complex(p: int, m: int, n, M: CpMackey) -> MackeyChainComplex:
    """Cochain complex ``Hom(C_*, M)`` for ``S^{m + n lambda}`` with ``n < 0``.

    Positions run from ``m`` down to ``m + 2n``; the first differential is
    ``res`` on the fixed level and ``x -> (t^{-i} x)_i`` underneath.
    """
    two_n = _two_n_of(n)
    if two_n >= 0:
        raise ValueError("dual_complex needs n < 0; use cellular_complex")
    if p != M.p:
        raise ValueError("prime mismatch")
    if two_n % 2 and p != 2:
        raise ValueError("half-integer n needs p = 2")
    ind = _induced(M)
    I = ind.functor
    terms = {m: M}
    diffs = {}
    for j in range(1, -two_n + 1):
        terms[m - j] = I
        if j == 1:
            diffs[m] = _hom(M, I, M.res.matrix, ind.delta_prime)
        elif j % 2 == 0:
            diffs[m - j + 1] = _hom(I, I, ind.fixed_one_minus, ind.one_minus)
        else:
            diffs[m - j + 1] = _hom(I, I, ind.fixed_norm, ind.norm_like)
    return MackeyChainComplex(terms, diffs)


# ---------------------------------------------------------------------------
# homology


GradedMackey = dict  # degree -> CpMackey, zero entries omitted


def _untwisted_offsets(M: CpMackey, two_n: int) -> dict:
    """Chain-path homology of ``S^{n lambda}``, keyed by degree (cached on M)."""
    cache = M._cache.setdefault("sphere", {})
    if two_n not in cache:
        if two_n == 0:
            out = {} if M.is_zero() else {0: M}
        else:
            C = (cellular_complex if two_n > 0 else dual_complex)(M.p, 0, Fraction(two_n, 2), M)
            out = {}
            for k in C.terms:
                H = C.homology(k)
                if not H.is_zero():
                    out[k] = H
        cache[two_n] = out
    return cache[two_n]


def homology_of_sphere(V: VirtualRep, M: CpMackey) -> GradedMackey:
    """Chain-path homology ``H_*(S^V; M)``, twisted by ``a^{-1}`` when needed."""
    if V.p != M.p:
        raise ValueError("prime mismatch")
    base = _untwisted_offsets(M, V.two_n)
    b = unit_inverse(V.p, V.twist_class())
    return {V.m + k: twist(H, b) for k, H in base.items()}


def closed_form_piece(M: CpMackey, two_n: int, j: int):
    """The derived-functor key for offset ``j`` (None when zero by the table)."""
    if two_n == 0:
        return "M" if j == 0 else None
    if two_n > 0:
        if not 0 <= j <= two_n:
            return None
        if j == 0:
            return "coker_tr_hat"
        if j == 1:
            return "ker_tr_minus" if two_n == 1 else "ker_tr_hat"
        if j % 2:
            return "ker_N_minus" if j == two_n else "ker_N_hat"
        return "F" if j == two_n else "coker_N_hat"
    if not two_n <= j <= 0:
        return None
    if j == 0:
        return "ker_R_hat"
    if j == -1:
        return "coker_R_minus" if two_n == -1 else "coker_R_hat"
    if j % 2:
        return "coker_N_minus" if j == two_n else "coker_N_hat"
    return "O" if j == two_n else "ker_N_hat"


def closed_form_homology(V: VirtualRep, M: CpMackey) -> GradedMackey:
    """Homology assembled from derived functors of ``M``.

    For ``n = 0`` the answer is ``A^{a^{-1}} box M``; otherwise every
    entry is a derived functor, and those do not see the twist.
    """
    if V.p != M.p:
        raise ValueError("prime mismatch")
    two_n = V.two_n
    out = {}
    lo, hi = min(0, two_n), max(0, two_n)
    for j in range(lo, hi + 1):
        key = closed_form_piece(M, two_n, j)
        if key is None:
            continue
        if key == "M":
            H = twist(M, unit_inverse(V.p, V.twist_class()))
        else:
            H = derived(M, key).mackey
        if not H.is_zero():
            out[V.m + j] = H
    return out


@dataclass
class CrosscheckReport:
    V: VirtualRep
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def crosscheck(V: VirtualRep, M: CpMackey, strict: bool = True) -> CrosscheckReport:
    """Compare chain-path and closed-form homology degree by degree.

    Levelwise canonical forms are always compared; with ``strict`` the
    finer :meth:`CpMackey.signature` must agree as well.
    """
    rep = CrosscheckReport(V)
    a, b = homology_of_sphere(V, M), closed_form_homology(V, M)
    for d in sorted(set(a) | set(b)):
        x, y = a.get(d), b.get(d)
        if x is None or y is None:
            present = x if x is not None else y
            rep.mismatches.append((d, "only one path is nonzero", present.describe()))
            continue
        if x.levels() != y.levels() or (strict and not signatures_equal(x, y)):
            rep.mismatches.append((d, x.describe(), y.describe()))
    return rep


def suspension_homotopy(d: int, n_lambda, coeff: CpMackey) -> GradedMackey:
    """Homotopy of ``Sigma^{d + n lambda} H coeff``."""
    return homology_of_sphere(VirtualRep.simple(coeff.p, d, n_lambda), coeff)


def graded_to_json(G: Mapping[int, CpMackey]) -> dict:
    return {str(d): describe_mackey(M) for d, M in sorted(G.items())}
