"""Named coefficient functors and a seeded random generator.

Built-in names (``p`` is supplied separately):

``Z``, ``Zstar``, ``Z/p^n`` (e.g. ``Z/p^2``), ``Z/p^nstar``, ``Q/Z``,
``Q/Zstar``, ``burnside``, ``burnside^a``, ``F_p``, ``F(Z[Cp])``,
``O(Z[Cp])``, ``hat(Z/p)``, ``hat(Z)``, ``generic`` and
``random:<seed>``.

``Q/Z`` is modelled by its truncation ``Z/p^N`` (see :mod:`cpslice.qz`
for the stable comparison); the default ``N`` comes from the environment
variable ``CPSLICE_QZ_TRUNCATION`` and is 6 when unset.
"""

from __future__ import annotations

import os
import random
import re

from .linalg import FgAbGroup, IntMatrix, _relation_kernel, block_diagonal, smith_normal_form
from .mackey import (
    _is_prime,
    CpMackey,
    build,
    burnside,
    burnside_twisted,
    coconstant,
    constant,
    direct_sum,
    fixed_mackey,
    hat,
    orbit_mackey,
    regular_module,
)

DEFAULT_TRUNCATION = 6
TRUNCATION_ENV = "CPSLICE_QZ_TRUNCATION"

BUILTIN_NAMES = ("Z", "Zstar", "Z/p^n", "Z/p^nstar", "Q/Z", "Q/Zstar", "burnside",
                 "burnside^a", "F_p", "F(Z[Cp])", "O(Z[Cp])", "hat(Z/p)", "hat(Z)",
                 "generic", "random:<seed>")


class UnknownBuiltinError(KeyError):
    def __str__(self):
        return f"unknown coefficient {self.args[0]!r}; built-ins are: {', '.join(BUILTIN_NAMES)}"


def default_truncation() -> int:
    raw = os.environ.get(TRUNCATION_ENV)
    if raw is None:
        return DEFAULT_TRUNCATION
    n = int(raw)
    if n < 2:
        raise ValueError(f"{TRUNCATION_ENV} must be at least 2")
    return n


def cyclic(order: int) -> FgAbGroup:
    return FgAbGroup.from_orders([order])


def generic(p: int) -> CpMackey:
    """A direct sum on which every derived functor is nonzero.

    ``Z`` contributes the cokernel symbols, ``Z*`` the cokernel of ``res``,
    ``Z/p`` the kernel of ``N`` and of ``tr``, ``(Z/p)*`` the quotient
    ``ker N / ker tr`` and the Burnside functor the kernel of ``res``.
    """
    Z = FgAbGroup.free(1)
    M = direct_sum(constant(p, Z), coconstant(p, Z), constant(p, cyclic(p)),
                   coconstant(p, cyclic(p)), burnside(p))
    M.name = "generic"
    return M


def builtin(name: str, p: int, truncation: int | None = None) -> CpMackey:
    N = default_truncation() if truncation is None else truncation
    Z = FgAbGroup.free(1)
    if name == "Z":
        M = constant(p, Z)
    elif name == "Zstar":
        M = coconstant(p, Z)
    elif name == "Q/Z":
        M = constant(p, cyclic(p ** N))
    elif name == "Q/Zstar":
        M = coconstant(p, cyclic(p ** N))
    elif name == "burnside":
        M = burnside(p)
    elif name == "F_p":
        M = constant(p, cyclic(p))
    elif name == "F(Z[Cp])":
        M = fixed_mackey(regular_module(p))
    elif name == "O(Z[Cp])":
        M = orbit_mackey(regular_module(p))
    elif name == "hat(Z/p)":
        M = hat(p, cyclic(p))
    elif name == "hat(Z)":
        M = hat(p, Z)
    elif name == "generic":
        M = generic(p)
    elif (m := re.fullmatch(r"burnside\^(-?\d+)", name)):
        M = burnside_twisted(p, int(m.group(1)))
    elif (m := re.fullmatch(r"Z/p\^(\d+)(star)?", name)):
        n = int(m.group(1))
        if n < 1:
            raise UnknownBuiltinError(name)
        M = (coconstant if m.group(2) else constant)(p, cyclic(p ** n))
    elif (m := re.fullmatch(r"random:(\d+)", name)):
        M = random_mackey(p, int(m.group(1)))
    else:
        raise UnknownBuiltinError(name)
    M.name = name
    return M


def builtin_list(p: int, truncation: int | None = None) -> list[CpMackey]:
    """The fixed coefficient list used by the acceptance grid."""
    names = ["Z", "Zstar", "Z/p^1", "Z/p^2", "Z/p^3", "Q/Z", "burnside", "F(Z[Cp])",
             "O(Z[Cp])", "hat(Z/p)"]
    return [builtin(n, p, truncation) for n in names]


# ---------------------------------------------------------------------------
# random functors


def _unimodular(rng: random.Random, n: int) -> IntMatrix:
    rows = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(2 * n):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j:
            continue
        c = rng.choice((-1, 1))
        rows[i] = [a + c * b for a, b in zip(rows[i], rows[j])]
    return IntMatrix(rows, n, n)


def _companion_cyclotomic(p: int) -> IntMatrix:
    # multiplication by zeta on Z[zeta_p] in the basis 1, zeta, ..., zeta^{p-2}
    n = p - 1
    rows = [[0] * n for _ in range(n)]
    for i in range(1, n):
        rows[i][i - 1] = 1
    for i in range(n):
        rows[i][n - 1] = -1
    return IntMatrix(rows, n, n)


def _unit_of_order_p(p: int, q: int) -> int | None:
    for u in range(2, q):
        if pow(u, p, q) == 1:
            return u
    return None


def _random_block(rng: random.Random, p: int):
    """A small C_p-module as (orders, action matrix)."""
    kinds = ["Z", "Z", "Z/p", "Z/p2", "Z/q"]
    if p == 2:
        kinds += ["sign", "sign", "regular", "sign_tors"]
    elif p == 3:
        kinds += ["regular", "cyclotomic", "unit"]
    else:
        kinds += ["unit"]
    kind = rng.choice(kinds)
    if kind == "Z":
        return [0], IntMatrix([[1]])
    if kind == "Z/p":
        return [p], IntMatrix([[1]])
    if kind == "Z/p2":
        return [p * p], IntMatrix([[1]])
    if kind == "Z/q":
        return [rng.choice([q for q in (2, 3, 4, 5, 9) if q != p] or [2])], IntMatrix([[1]])
    if kind == "sign":
        return [0], IntMatrix([[-1]])
    if kind == "sign_tors":
        return [rng.choice((4, 3, 8))], IntMatrix([[-1]])
    if kind == "regular":
        t = regular_module(p).action
        return [0] * p, t
    if kind == "cyclotomic":
        return [0] * (p - 1), _companion_cyclotomic(p)
    # kind == "unit": Z/q with t multiplication by a unit of order p
    q = next(q for q in range(p + 1, 10 ** 6, p) if _is_prime(q))
    u = _unit_of_order_p(p, q)
    return [q], IntMatrix([[u]])


def random_mackey(p: int, seed: int, max_gens: int = 3) -> CpMackey:
    """Seeded random valid Mackey functor with at most ``max_gens`` generators per level.

    The underlying level is a random module ``B``.  The fixed level is
    ``(B_{C_p} + K) / S`` with ``tr(w) = (w, 0)``, ``res(w, k) = N w + j(k)``
    for a random ``j: K -> B^{C_p}`` and ``S`` a random subgroup of
    ``ker res``.  The axioms then hold by construction; candidates with too
    many generators are rejected and redrawn from the same stream.
    """
    rng = random.Random(f"cpslice:{p}:{seed}")
    for _ in range(1000):
        M = _random_attempt(rng, p)
        if M is not None and M.fixed.ngens <= max_gens and M.underlying.ngens <= max_gens \
                and not M.is_zero():
            M.name = f"random:{seed}"
            return M
    raise RuntimeError("random generator failed to produce a small functor")


def _random_attempt(rng: random.Random, p: int) -> CpMackey | None:
    orders, blocks = [], []
    for _ in range(rng.choice((1, 1, 2))):
        o, t = _random_block(rng, p)
        orders += o
        blocks.append(t)
    t = block_diagonal(blocks)
    nb = len(orders)
    B0 = FgAbGroup.from_orders(orders)
    # hide the block structure behind a change of basis
    P = _unimodular(rng, nb)
    Pinv = _inverse_unimodular(P)
    B = FgAbGroup(nb, P @ B0.relations)
    t = P @ t @ Pinv
    one = IntMatrix.identity(nb)
    Nm = one
    power = one
    for _ in range(p - 1):
        power = t @ power
        Nm = Nm + power
    # K: extra fixed-level generators with a random map into B^{C_p}
    korders = [rng.choice((0, p, p, p * p, 2, 3)) for _ in range(rng.choice((0, 0, 1, 1, 2)))]
    nk = len(korders)
    fixB = _relation_kernel(one - t, B)
    jcols = []
    for o in korders:
        col = [0] * nb
        for c in fixB.columns():
            coeff = rng.randint(-2, 2)
            col = [a + coeff * b for a, b in zip(col, c)]
        if o:
            # make j well defined on Z/o
            if not B.contains([o * x for x in col]):
                col = [0] * nb
        jcols.append(col)
    J = IntMatrix.from_columns(jcols, nb)
    # fixed level before quotienting by S: B/(1-t)B + K
    na = nb + nk
    korel = IntMatrix.from_columns([[o if i == k else 0 for i in range(nk)]
                                    for k, o in enumerate(korders) if o], nk)
    rel = block_diagonal([B.relations.hstack(one - t), korel])
    res = Nm.hstack(J)
    # S: random elements of ker res
    kerR = _relation_kernel(res, B)
    scols = []
    for c in kerR.columns():
        if rng.random() < 0.5:
            mult = rng.choice((1, 1, p, 2))
            scols.append([mult * x for x in c])
    if scols:
        rel = rel.hstack(IntMatrix.from_columns(scols, na))
    A = FgAbGroup(na, rel)
    tr = one.vstack(IntMatrix.zeros(nk, nb))
    try:
        return build(p, A, B, res, tr, t)
    except ValueError:
        return None


def _inverse_unimodular(P: IntMatrix) -> IntMatrix:
    s = smith_normal_form(P)
    # P = Uinv D V^{-1} with D = I, so P^{-1} = Vt U
    return s.Vt @ s.U
