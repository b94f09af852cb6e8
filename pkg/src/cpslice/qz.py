"""Stable values for Q/Z coefficients.

``Q/Z`` (its p-primary part, which is all that matters here) is the
colimit of ``Z/p^N`` along multiplication by ``p``.  A derived functor ``D``
commutes with that colimit, and for the functors we use the colimit is
already visible in the image of ``D(M_N) -> D(M_{N+1})``: summands that keep
growing with ``N`` become copies of ``Q/Z``, the rest are finite and stable.

Evaluating ``D`` on a single truncation is not enough.  For instance
``coker(N)`` of the constant functor ``Z/p^N`` is ``Z/p`` for every ``N``
while its colimit vanishes, because the transition maps are zero on it.

>>> stable_piece(2, "coker_N_hat", star=False)
{'fixed': '0', 'underlying': '0'}
>>> stable_piece(2, "ker_N_hat", star=False)
{'fixed': 'Z/2', 'underlying': '0'}
"""

from __future__ import annotations

from .linalg import FgAbGroup, GroupHom, IntMatrix, describe_group, image
from .mackey import CpMackey, MackeyHom, coconstant, constant, derived, piece_map


def truncated(p: int, N: int, star: bool = False) -> CpMackey:
    G = FgAbGroup.from_orders([p ** N])
    return (coconstant if star else constant)(p, G)


def transition(M: CpMackey, M1: CpMackey) -> MackeyHom:
    """Multiplication by ``p`` from the ``Z/p^N`` model to the ``Z/p^{N+1}`` one.

    Both models are built by the same construction, so generators correspond
    and the map is ``p`` times the identity matrix on each level.
    """
    p = M.p
    f = GroupHom(M.fixed, M1.fixed, IntMatrix.identity(M.fixed.ngens).scale(p))
    g = GroupHom(M.underlying, M1.underlying, IntMatrix.identity(M.underlying.ngens).scale(p))
    return MackeyHom(M, M1, f, g)


def _stable_level(img_n: FgAbGroup, img_n1: FgAbGroup, p: int) -> str:
    a = sorted(img_n.canonical_form()[1])
    b = sorted(img_n1.canonical_form()[1])
    if img_n.canonical_form()[0] or img_n1.canonical_form()[0]:
        raise ValueError("free summand in a torsion colimit")
    # growing summands are matched greedily against stable ones
    finite, divisible = [], 0
    rest = list(b)
    for x in a:
        if x in rest:
            rest.remove(x)
            finite.append(x)
        elif x * p in rest:
            rest.remove(x * p)
            divisible += 1
        else:
            raise ValueError("images are not stabilizing; raise the truncation")
    if rest:
        raise ValueError("images are not stabilizing; raise the truncation")
    parts = [f"Z/{x}" for x in finite] + ["Q/Z"] * divisible
    return " + ".join(parts) if parts else "0"


def stable_piece(p: int, key: str, star: bool = False, N: int = 6) -> dict:
    """Colimit description of a derived functor of ``Q/Z`` (or ``Q/Z*``)."""
    models = [truncated(p, N + i, star) for i in range(3)]
    maps = [transition(models[i], models[i + 1]) for i in range(2)]
    images = []
    for i, phi in enumerate(maps):
        h = piece_map(phi, derived(models[i], key), derived(models[i + 1], key))
        images.append((image(h.on_fixed)[0], image(h.on_underlying)[0]))
    return {"fixed": _stable_level(images[0][0], images[1][0], p),
            "underlying": _stable_level(images[0][1], images[1][1], p)}


def stable_is_zero(p: int, key: str, star: bool = False, N: int = 6) -> bool:
    v = stable_piece(p, key, star, N)
    return v["fixed"] == "0" and v["underlying"] == "0"
