"""The mod 2 dual Steenrod algebra.

Elements are GF(2) polynomials in the Milnor generators xi1, xi2, ... held
in the packed representation of :mod:`hsslice.f2core`.  The conjugates
zeta_n = c(xi_n) live in a parallel ring and are compared by expanding
into the xi basis.  Tensors are frozensets of (left, right) monomial pairs.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import Iterable

from .f2core import (EchelonBasis, Generator, PolyRing, TriDegree, _toggle, add,
                     reduced_echelon)

MAX_INDEX = 8

XI = PolyRing([Generator(f"xi{i}", TriDegree(2 ** i - 1, 0, 0)) for i in range(1, MAX_INDEX + 1)])
ZETA = PolyRing([Generator(f"zeta{i}", TriDegree(2 ** i - 1, 0, 0)) for i in range(1, MAX_INDEX + 1)])

ONE = frozenset({0})
Tensor = frozenset


def xi(n: int, k: int = 1) -> frozenset:
    """xi_n^k as a polynomial (xi_0 = 1)."""
    return ONE if n == 0 else frozenset({XI.gen(f"xi{n}", k)})


def degree(m: int) -> int:
    return XI.degree(m).stem


# ---------------------------------------------------------------------------
# tensors


def tensor_mul(a: Iterable[tuple[int, int]], b: Iterable[tuple[int, int]]) -> Tensor:
    out: set = set()
    b = tuple(b)
    for l1, r1 in a:
        for l2, r2 in b:
            _toggle(out, (l1 + l2, r1 + r2))
    return frozenset(out)


def tensor_square(a: Iterable[tuple[int, int]]) -> Tensor:
    return frozenset((2 * l, 2 * r) for l, r in a)


def tensor_power(a: Tensor, k: int) -> Tensor:
    result: Tensor = frozenset({(0, 0)})
    base = a
    while k:
        if k & 1:
            result = tensor_mul(result, base)
        k >>= 1
        if k:
            base = tensor_square(base)
    return result


def tensor_str(t: Iterable[tuple[int, int]], left: PolyRing = XI, right: PolyRing = XI) -> str:
    terms = sorted(t, reverse=True)
    if not terms:
        return "0"
    return " + ".join(f"{left.mono_str(a)} (x) {right.mono_str(b)}" for a, b in terms)


# ---------------------------------------------------------------------------
# coproduct and antipode


@lru_cache(maxsize=None)
def _coproduct_gen(n: int) -> Tensor:
    out: set = set()
    for i in range(n + 1):
        left = 0 if n - i == 0 else XI.gen(f"xi{n - i}", 2 ** i)
        right = 0 if i == 0 else XI.gen(f"xi{i}")
        _toggle(out, (left, right))
    return frozenset(out)


@lru_cache(maxsize=200_000)
def coproduct_monomial(m: int) -> Tensor:
    acc: Tensor = frozenset({(0, 0)})
    for i, e in enumerate(XI.exps(m), start=1):
        if e:
            acc = tensor_mul(acc, tensor_power(_coproduct_gen(i), e))
    return acc


def coproduct(p: Iterable[int]) -> Tensor:
    """Milnor coproduct, Delta(xi_n) = sum_i xi_{n-i}^{2^i} (x) xi_i."""
    out: set = set()
    for m in p:
        out.symmetric_difference_update(coproduct_monomial(m))
    return frozenset(out)


def counit(p: Iterable[int]) -> int:
    return 1 if 0 in set(p) else 0


@lru_cache(maxsize=None)
def conjugate_poly(n: int) -> frozenset:
    """p_n with c(xi_n) = p_n(xi_1..xi_n), from sum_i xi_{n-i}^{2^i} c(xi_i) = 0."""
    if n == 0:
        return ONE
    acc: frozenset = frozenset()
    for i in range(n):
        acc = add(acc, XI.mul(xi(n - i, 2 ** i), conjugate_poly(i)))
    return acc


def _zeta_images() -> dict[str, frozenset]:
    return {f"zeta{i}": conjugate_poly(i) for i in range(1, MAX_INDEX + 1)}


ZETA_TO_XI = ZETA.hom(_zeta_images(), XI)


def zeta_poly(p: Iterable[int]) -> frozenset:
    """Expand a polynomial in the zeta ring into the xi basis."""
    return ZETA_TO_XI(p)


def zeta(n: int, k: int = 1) -> frozenset:
    return XI.power(conjugate_poly(n), k)


def conjugate(p: Iterable[int]) -> frozenset:
    """Hopf conjugation on an xi polynomial."""
    images = {f"xi{i}": conjugate_poly(i) for i in range(1, MAX_INDEX + 1)}
    return XI.hom(images, XI)(p)


# ---------------------------------------------------------------------------
# quotient Hopf algebras A(m)_*


def in_quotient(m: int, level: int) -> bool:
    """Is the xi monomial m nonzero in A(level)_* ?"""
    for i, e in enumerate(XI.exps(m), start=1):
        if not e:
            continue
        if i > level + 1 or e >= 2 ** (level + 2 - i):
            return False
    return True


def project(p: Iterable[int], level: int) -> frozenset:
    """pi_level: A_* -> A(level)_*."""
    return frozenset(m for m in p if in_quotient(m, level))


def quotient_basis(level: int, d: int) -> list[int]:
    return [m for m in XI.monomials(TriDegree(d, 0, 0)) if in_quotient(m, level)]


# ---------------------------------------------------------------------------
# cotensor subalgebras A_* box_{A(m)_*} F_2


def cotensor_generators(m: int, max_degree: int) -> list[tuple[int, int]]:
    """(index i, power) of zeta_i^power generating the cotensor algebra."""
    out = []
    i = 1
    while 2 ** i - 1 <= max_degree:
        power = 2 ** (m + 2 - i) if i <= m + 1 else 1
        out.append((i, power))
        i += 1
    return out


def cotensor_ring(m: int, max_degree: int = 2 ** MAX_INDEX - 1) -> PolyRing:
    gens = [Generator(f"zeta{i}", TriDegree(k * (2 ** i - 1), 0, 0), power=k)
            for i, k in cotensor_generators(m, max_degree)]
    return PolyRing(gens)


@lru_cache(maxsize=None)
def _cotensor_ring_cached(m: int) -> PolyRing:
    return cotensor_ring(m)


def cotensor_basis(m: int, d: int) -> list[int]:
    """Degree-d monomial basis of F_2[zeta_1^{2^{m+1}}, ..., zeta_{m+1}^2, zeta_{m+2}, ...].

    Returned as monomials of the ZETA ring (natural exponents).  m = -1
    gives all zeta monomials.
    """
    if d < 0:
        return []
    if m < 0:
        return ZETA.monomials(TriDegree(d, 0, 0))
    ring = _cotensor_ring_cached(m)
    out = []
    for mono in ring.monomials(TriDegree(d, 0, 0)):
        out.append(ZETA.mono(**ring.natural(mono)))
    return sorted(out, reverse=True)


def cotensor_dim(m: int, d: int) -> int:
    return len(cotensor_basis(m, d))


def _vector(p: Iterable[int], index: dict[int, int]) -> int:
    v = 0
    for mono in p:
        v ^= 1 << index[mono]
    return v


def cotensor_kernel(m: int, d: int) -> list[frozenset]:
    """Intrinsic cotensor basis: {a : (1 (x) pi_m) Delta(a) = a (x) 1} in degree d.

    With the Milnor coproduct the conjugates zeta_i sit on the left of
    Delta, so the fixed condition is imposed on the right-hand factor.
    """
    mons = XI.monomials(TriDegree(d, 0, 0))
    keys: dict = {}
    cols = []
    for mono in mons:
        t = {(l, r) for l, r in coproduct_monomial(mono) if in_quotient(r, m)}
        _toggle(t, (mono, 0))
        v = 0
        for key in t:
            if key not in keys:
                keys[key] = len(keys)
            v ^= 1 << keys[key]
        cols.append(v)
    # kernel of the column map
    e = EchelonBasis(track=True)
    kernel = []
    for j, c in enumerate(cols):
        v, combo = e.reduce(c, 1 << j)
        if v:
            h = v.bit_length() - 1
            e.pivots[h] = v
            e.combos[h] = combo
        else:
            kernel.append(combo)
    out = []
    for k in reduced_echelon(kernel):
        out.append(frozenset(mons[j] for j in range(len(mons)) if (k >> j) & 1))
    return out


def same_span(a: Iterable[Iterable[int]], b: Iterable[Iterable[int]]) -> bool:
    a = [frozenset(p) for p in a]
    b = [frozenset(p) for p in b]
    index: dict[int, int] = {}
    for p in a + b:
        for mono in p:
            index.setdefault(mono, len(index))
    va = reduced_echelon(_vector(p, index) for p in a)
    vb = reduced_echelon(_vector(p, index) for p in b)
    return va == vb


# ---------------------------------------------------------------------------
# cap products with Sq^i


def cap(p: Iterable[int], i: int) -> frozenset:
    """(1 (x) <-, Sq^i>) Delta(p): keep terms whose right factor is exactly xi_1^i."""
    target = XI.gen("xi1", i) if i else 0
    out: set = set()
    for mono in p:
        for l, r in coproduct_monomial(mono):
            if r == target:
                _toggle(out, l)
    return frozenset(out)


def cap_kernel_matches(m: int, d: int) -> bool:
    """ker(- cap Sq^{2^m}) on cotensor_basis(m-1) in degree d equals cotensor_basis(m)."""
    source = [zeta_poly({mono}) for mono in cotensor_basis(m - 1, d)]
    images = [cap(p, 2 ** m) for p in source]
    index: dict[int, int] = {}
    for p in images:
        for mono in p:
            index.setdefault(mono, len(index))
    e = EchelonBasis(track=True)
    kernel = []
    for j, p in enumerate(images):
        v, combo = e.reduce(_vector(p, index), 1 << j)
        if v:
            h = v.bit_length() - 1
            e.pivots[h] = v
            e.combos[h] = combo
        else:
            kernel.append(combo)
    kernel_polys = [add(*(source[j] for j in range(len(source)) if (k >> j) & 1)) for k in kernel]
    expected = [zeta_poly({mono}) for mono in cotensor_basis(m, d)]
    return same_span(kernel_polys, expected)


# ---------------------------------------------------------------------------
# structural checks


def coassociativity_holds(p: Iterable[int]) -> bool:
    """(Delta (x) 1) Delta p == (1 (x) Delta) Delta p."""
    left: set = set()
    right: set = set()
    for a, b in coproduct(p):
        for a1, a2 in coproduct_monomial(a):
            _toggle(left, (a1, a2, b))
        for b1, b2 in coproduct_monomial(b):
            _toggle(right, (a, b1, b2))
    return left == right


def antipode_identity_holds(n: int) -> bool:
    """sum_{i=0}^n xi_{n-i}^{2^i} p_i == delta_{n,0}."""
    acc: frozenset = frozenset()
    for i in range(n + 1):
        acc = add(acc, XI.mul(xi(n - i, 2 ** i), conjugate_poly(i)))
    return acc == (ONE if n == 0 else frozenset())


def congruence_holds(k: int) -> bool:
    """zeta_k == xi_1^{2^k-1} modulo (xi_2, xi_3, ...)."""
    low = frozenset(m for m in conjugate_poly(k) if XI.exps(m)[1:] == (0,) * (MAX_INDEX - 1))
    return low == xi(1, 2 ** k - 1)


def xi_zeta_congruence_holds(k: int) -> bool:
    """xi_k == zeta_1^{2^k-1} modulo (zeta_2, zeta_3, ...).

    xi_k is rewritten in the zeta monomial basis by inverting the change of
    basis, and its pure zeta_1 part is compared with zeta_1^{2^k-1}.
    """
    d = 2 ** k - 1
    zmons = ZETA.monomials(TriDegree(d, 0, 0))
    index: dict[int, int] = {}
    images = [zeta_poly({m}) for m in zmons]
    for p in images:
        for mono in p:
            index.setdefault(mono, len(index))
    e = EchelonBasis(track=True)
    for j, p in enumerate(images):
        e.add(_vector(p, index), 1 << j)
    target = xi(k)
    v, combo = e.reduce(_vector(target, index))
    if v:
        return False
    # combo expresses xi_k in zeta monomials; c(xi_k) = zeta_k so conjugate
    expr = {zmons[j] for j in range(len(zmons)) if (combo >> j) & 1}
    pure = {m for m in expr if ZETA.exps(m)[1:] == (0,) * (MAX_INDEX - 1)}
    return pure == {ZETA.gen("zeta1", d)}


def verify_freeness(i: int, max_degree: int) -> dict:
    """cot(i-1) == cot(i) (x) E(zeta_1^{2^i}, ..., zeta_{i+1}) degreewise."""
    ext = [(j, 2 ** (i + 1 - j)) for j in range(1, i + 2)]
    ext_degrees = [k * (2 ** j - 1) for j, k in ext]
    failures = []
    decomposition = {}
    for d in range(max_degree + 1):
        lhs = cotensor_basis(i - 1, d)
        rhs = 0
        for bits in product((0, 1), repeat=len(ext)):
            e = sum(b * deg for b, deg in zip(bits, ext_degrees))
            rhs += cotensor_dim(i, d - e)
        if rhs != len(lhs):
            failures.append(d)
        # explicit decomposition of each monomial
        rows = []
        for mono in lhs:
            nat = ZETA.natural(mono)
            free = dict(nat)
            ext_part = {}
            for j, k in ext:
                name = f"zeta{j}"
                e = nat.get(name, 0)
                if (e // k) % 2:
                    ext_part[name] = k
                    free[name] = e - k
            free = {n: v for n, v in free.items() if v}
            rows.append((ZETA.mono_str(mono), ZETA.mono_str(ZETA.mono(**free)),
                         ZETA.mono_str(ZETA.mono(**ext_part))))
        decomposition[d] = rows
    return {"level": i, "max_degree": max_degree, "failures": failures,
            "ok": not failures, "decomposition": decomposition}
