"""Named generators of the homological slice pages and their tridegrees."""

from __future__ import annotations

from typing import Iterable, Sequence

from .f2core import Generator, PolyRing, TriDegree


def zeta_degree(i: int, power: int = 1) -> TriDegree:
    return TriDegree(power * (2 ** i - 1), 0, power * (1 - 2 ** i))


def x_degree(n: int) -> TriDegree:
    if n == 0:
        return RHO_DEGREE
    return TriDegree(2 ** n - 2, -1, 2 - 2 ** n)


def v_degree(i: int) -> TriDegree:
    return TriDegree(2 * (2 ** i - 1), 2 ** i - 1, 0)


RHO_DEGREE = TriDegree(-1, -1, 1)


def zeta(i: int, power: int = 1) -> Generator:
    return Generator(f"zeta{i}", zeta_degree(i, power), power)


def x(n: int) -> Generator:
    return Generator(f"x{n}", x_degree(n))


def v(i: int) -> Generator:
    return Generator(f"v{i}", v_degree(i))


RHO = Generator("rho", RHO_DEGREE)


def zeta_range(first: int, phi_bound: int) -> list[int]:
    """Indices i >= first whose zeta_i can occur below an order-weight bound."""
    out = []
    i = first
    while 2 * (2 ** i - 1) <= phi_bound:
        out.append(i)
        i += 1
    return out


def page_ring(zeta_powers: Sequence[tuple[int, int]], xs: Iterable[int], vs: Iterable[int],
              phi_bound: int, tail_from: int | None = None, rho: bool = True) -> PolyRing:
    """Ring F_2[zeta_i^{p_i}, ..., zeta_j (j >= tail_from)][rho, x_n, v_i].

    Generator order (most significant first): v's descending, x's
    descending, rho, zetas ascending.  ``phi_bound`` truncates the
    infinite zeta tail to the generators that can matter.
    """
    gens: list[Generator] = [v(i) for i in sorted(set(vs), reverse=True)]
    gens += [x(n) for n in sorted(set(xs), reverse=True)]
    if rho:
        gens.append(RHO)
    zetas = [zeta(i, p) for i, p in zeta_powers]
    if tail_from is not None:
        zetas += [zeta(i) for i in zeta_range(tail_from, phi_bound)]
    gens += zetas
    return PolyRing(gens)


def cotensor_zetas(m: int) -> list[tuple[int, int]]:
    """(i, 2^{m+2-i}) for i <= m+1: the power-generators of A_* box_{A(m)_*} F_2."""
    return [(i, 2 ** (m + 2 - i)) for i in range(1, m + 2)]
