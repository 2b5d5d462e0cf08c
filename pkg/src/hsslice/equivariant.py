"""The RO(C_2)-graded homological slice spectral sequence for k_R.

Degrees are triples (a, b, s): the class lives in RO degree a + b*sigma and
slice filtration s.  Forgetting to the motivic grading sends (a, b, s) to
(stem a + b, weight b, filtration s).

The E_2 page is P + NC[v1] where

    P  = cot(0)[a_sigma, x1, v1],  cot(0) = F_2[zeta_1^2, zeta_2, zeta_3, ...]
    NC = cot(0){E(i, j), x1*E(i, j) : i >= 1, j >= 0},  E(i, j) = e_{(2i+1)sigma}/a_sigma^j

is a square-zero extension.  P acts on NC through

    a_sigma * E(i, j) = E(i, j-1)           (0 when j = 0)
    x1 * (x1*E(i, j)) = E(i-1, j)           (0 when i = 1)

The additional term zeta_1^2 E(i, j-2) sometimes written into the second
rule is left out: with it d_3 stops being a derivation once j >= 3 (see
:func:`relation_defect`), and the page is no longer a DGA.

Basis elements are plain tuples:

    ("P", z, alpha, beta, gamma)         z * a^alpha * x1^beta * v1^gamma
    ("N", z, gamma, eps, i, j)           z * v1^gamma * x1^eps * E(i, j)

with z a tuple of natural zeta exponents.  Elements are frozensets of keys.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from . import hsss
from .dga import _run
from .f2core import ContractError, EchelonBasis, TriDegree


@dataclass(frozen=True, order=True)
class RODegree:
    a: int
    b: int
    s: int

    def __add__(self, other: "RODegree") -> "RODegree":
        return RODegree(self.a + other.a, self.b + other.b, self.s + other.s)

    def __sub__(self, other: "RODegree") -> "RODegree":
        return RODegree(self.a - other.a, self.b - other.b, self.s - other.s)

    @property
    def underlying(self) -> int:
        return self.a + self.b

    def motivic(self) -> TriDegree:
        return TriDegree(self.a + self.b, self.b, self.s)

    def as_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "s": self.s}

    def __str__(self) -> str:
        return f"({self.a}{self.b:+d}s, {self.s})"


def d_shift(r: int) -> RODegree:
    return RODegree(-1, 0, r)


A_SIGMA = RODegree(0, -1, 1)
X1 = RODegree(1, -1, 0)
V1 = RODegree(1, 1, 0)
X2 = RODegree(3, -1, -2)


def e_degree(i: int, j: int, eps: int = 0) -> RODegree:
    """Degree of x1^eps * e_{(2i+1)sigma}/a_sigma^j."""
    return RODegree(-(2 * i + 1) + eps, 2 * i + j + 1 - eps, -j)


def z_degree(m: int) -> RODegree:
    return RODegree(1, m + 2, -3 - m)


# ---------------------------------------------------------------------------
# zeta monomials of the cotensor algebras

NZ = 6
ZETA_DEG = tuple(2 ** k - 1 for k in range(1, NZ + 1))
UNIT = (0,) * NZ


def _step(i: int, level: int) -> int:
    return 2 ** (level + 2 - i) if i <= level + 1 else 1


@lru_cache(maxsize=None)
def zeta_monomials(n: int, level: int = 0) -> tuple[tuple[int, ...], ...]:
    """Monomials of cot(level) of degree n, as natural exponent tuples."""
    if n < 0:
        return ()
    if n >= 2 ** (NZ + 1) - 1:
        raise ContractError(f"zeta degree {n} beyond the supported range")
    out = []

    def rec(k: int, rem: int, acc: tuple) -> None:
        if k == NZ:
            if rem == 0:
                out.append(acc)
            return
        step = _step(k + 1, level)
        d = ZETA_DEG[k] * step
        e = 0
        while e * d <= rem:
            rec(k + 1, rem - e * d, acc + (e * step,))
            e += 1

    rec(0, n, ())
    return tuple(sorted(out, reverse=True))


def zdeg(z: tuple) -> int:
    return sum(e * d for e, d in zip(z, ZETA_DEG))


def zadd(u: tuple, v: tuple) -> tuple:
    return tuple(p + q for p, q in zip(u, v))


def zeta_str(z: tuple) -> str:
    parts = []
    for k, e in enumerate(z):
        if e:
            parts.append(f"zeta{k + 1}" + (f"^{e}" if e > 1 else ""))
    return "*".join(parts)


def zeta_from(**powers: int) -> tuple:
    z = [0] * NZ
    for name, e in powers.items():
        z[int(name.removeprefix("zeta")) - 1] = e
    return tuple(z)


# ---------------------------------------------------------------------------
# keys, degrees and products


def p_key(z=UNIT, alpha=0, beta=0, gamma=0) -> tuple:
    return ("P", z, alpha, beta, gamma)


def n_key(i: int, j: int, eps: int = 0, z=UNIT, gamma=0) -> tuple:
    return ("N", z, gamma, eps, i, j)


def key_degree(k: tuple) -> RODegree:
    if k[0] == "P":
        _, z, al, be, ga = k
        n = zdeg(z)
        return RODegree(n + be + ga, -al - be + ga, -n + al)
    _, z, ga, eps, i, j = k
    n = zdeg(z)
    return RODegree(n + ga + eps - (2 * i + 1), ga - eps + 2 * i + j + 1, -n - j)


def key_str(k: tuple) -> str:
    parts = [zeta_str(k[1])] if any(k[1]) else []
    if k[0] == "P":
        _, _, al, be, ga = k
        for name, e in (("a", al), ("x1", be), ("v1", ga)):
            if e:
                parts.append(name + (f"^{e}" if e > 1 else ""))
        return "*".join(parts) or "1"
    _, _, ga, eps, i, j = k
    if ga:
        parts.append("v1" + (f"^{ga}" if ga > 1 else ""))
    if eps:
        parts.append("x1")
    parts.append(f"e{2 * i + 1}" + (f"/a^{j}" if j else ""))
    return "*".join(parts)


def elem_str(e: Iterable[tuple]) -> str:
    keys = sorted(e, key=_sort_key, reverse=True)
    return " + ".join(key_str(k) for k in keys) or "0"


def _sort_key(k: tuple):
    return (k[0],) + tuple(k[1]) + tuple(k[2:])


def _toggle(acc: set, k) -> None:
    if k in acc:
        acc.remove(k)
    else:
        acc.add(k)


def act_x1(terms: dict, times: int) -> dict:
    """Apply x1^times to a set of (t, eps, i, j); t counts zeta_1^2 factors."""
    for _ in range(times):
        nxt: set = set()
        for (t, eps, i, j) in terms:
            if eps == 0:
                _toggle(nxt, (t, 1, i, j))
            else:
                if i >= 2:
                    _toggle(nxt, (t, 0, i - 1, j))
        terms = nxt
        if not terms:
            break
    return terms


@lru_cache(maxsize=None)
def _act(alpha: int, beta: int, eps: int, i: int, j: int) -> frozenset:
    if j < alpha:
        return frozenset()
    return frozenset(act_x1({(0, eps, i, j - alpha)}, beta))


def mul_keys(p: tuple, q: tuple) -> frozenset:
    if p[0] == "N":
        p, q = q, p
    if p[0] == "N":
        return frozenset()          # NC * NC = 0
    _, z, al, be, ga = p
    if q[0] == "P":
        _, z2, al2, be2, ga2 = q
        return frozenset({("P", zadd(z, z2), al + al2, be + be2, ga + ga2)})
    _, z2, ga2, eps, i, j = q
    zz = zadd(z, z2)
    out = set()
    for (t, e, ii, jj) in _act(al, be, eps, i, j):
        zt = zz if not t else (zz[0] + 2 * t,) + zz[1:]
        _toggle(out, ("N", zt, ga + ga2, e, ii, jj))
    return frozenset(out)


def mul(u: Iterable[tuple], v: Iterable[tuple]) -> frozenset:
    acc: set = set()
    for p in u:
        for q in v:
            for k in mul_keys(p, q):
                _toggle(acc, k)
    return frozenset(acc)


def add(*elems: Iterable[tuple]) -> frozenset:
    acc: set = set()
    for e in elems:
        for k in e:
            _toggle(acc, k)
    return frozenset(acc)


def power(u: frozenset, n: int) -> frozenset:
    out = frozenset({p_key()})
    for _ in range(n):
        out = mul(out, u)
    return out


def elem(*keys: tuple) -> frozenset:
    return add(*[[k] for k in keys])


def elem_degree(e: Iterable[tuple]) -> RODegree | None:
    degs = {key_degree(k) for k in e}
    if len(degs) > 1:
        raise ContractError(f"inhomogeneous element {elem_str(e)}")
    return next(iter(degs), None)


# ---------------------------------------------------------------------------
# E_2: basis per slice and d_3


@lru_cache(maxsize=None)
def e2_basis(d: RODegree) -> tuple[tuple, ...]:
    """Basis of the E_2 page of k_R in RO degree d (finite for every d)."""
    a, b, s = d.a, d.b, d.s
    if (a + b + s) % 2 or a + b + s < 0:
        return ()
    ga = (a + b + s) // 2
    out = []
    for be in range(0, a - ga + 1):
        n = a - ga - be
        al = ga - b - be
        if al < 0:
            continue
        for z in zeta_monomials(n):
            out.append(("P", z, al, be, ga))
    for eps in (0, 1):
        t = b - ga + eps - 1          # 2i + j
        for i in range(1, t // 2 + 1):
            j = t - 2 * i
            n = -s - j
            for z in zeta_monomials(n):
                out.append(("N", z, ga, eps, i, j))
    for k in out:
        if key_degree(k) != d:
            raise ContractError(f"basis enumeration put {key_str(k)} in {d}")
    return tuple(sorted(out, key=_sort_key, reverse=True))


@lru_cache(maxsize=None)
def d3_key(k: tuple) -> frozenset:
    """d_3 with d(zeta_1^2) = a v1, d(zeta_2) = x1 v1, all else a cycle."""
    z = k[1]
    bare = (k[0], UNIT) + k[2:]
    acc: set = set()
    if (z[0] // 2) % 2:
        zc = (z[0] - 2,) + z[1:]
        for t in mul_keys(("P", zc, 1, 0, 1), bare):
            _toggle(acc, t)
    if z[1] % 2:
        zc = (z[0], z[1] - 1) + z[2:]
        for t in mul_keys(("P", zc, 0, 1, 1), bare):
            _toggle(acc, t)
    return frozenset(acc)


def d3(e: Iterable[tuple]) -> frozenset:
    acc: set = set()
    for k in e:
        for t in d3_key(k):
            _toggle(acc, t)
    return frozenset(acc)


D3 = d_shift(3)
D5 = d_shift(5)


@lru_cache(maxsize=None)
def _index(d: RODegree) -> dict:
    return {k: n for n, k in enumerate(e2_basis(d))}


def vec(e: Iterable[tuple], d: RODegree) -> int:
    idx = _index(d)
    v = 0
    for k in e:
        n = idx.get(k)
        if n is None:
            raise ContractError(f"{key_str(k)} is not in degree {d}")
        v ^= 1 << n
    return v


def unvec(v: int, d: RODegree) -> frozenset:
    basis = e2_basis(d)
    return frozenset(basis[n] for n in range(v.bit_length()) if v >> n & 1)


@dataclass
class SliceHomology:
    degree: RODegree
    dim_e2: int
    cycles: list          # bit vectors spanning ker d_3
    boundaries: EchelonBasis

    @property
    def dim(self) -> int:
        return len(self.cycles) - len(self.boundaries)


@lru_cache(maxsize=None)
def e4_slice(d: RODegree) -> SliceHomology:
    basis = e2_basis(d)
    tgt = d + D3
    ech = EchelonBasis(track=True)
    cycles = []
    for n, k in enumerate(basis):
        v, combo = ech.reduce(vec(d3_key(k), tgt), 1 << n)
        if v:
            h = v.bit_length() - 1
            ech.pivots[h] = v
            ech.combos[h] = combo
        else:
            cycles.append(combo)
    bnd = EchelonBasis()
    src = d - D3
    for k in e2_basis(src):
        bnd.add(vec(d3_key(k), d))
    return SliceHomology(d, len(basis), cycles, bnd)


def is_cycle(e: frozenset) -> bool:
    return not d3(e)


def is_boundary(e: frozenset) -> bool:
    d = elem_degree(e)
    return d is None or e4_slice(d).boundaries.contains(vec(e, d))


# ---------------------------------------------------------------------------
# named E_4 generators


def x2_elem() -> frozenset:
    return elem(p_key(zeta_from(zeta1=2), beta=1), p_key(zeta_from(zeta2=1), alpha=1))


def y_elem(n: int) -> frozenset:
    """y_n = e_{n sigma} zeta_1^2 with e_{2i sigma} = x1 e_{(2i+1) sigma}."""
    if n < 2:
        raise ContractError("y_n needs n >= 2")
    return elem(n_key(n // 2, 0, 1 - n % 2, zeta_from(zeta1=2)))


def w_elem() -> frozenset:
    return elem(n_key(1, 0, 1, zeta_from(zeta1=2, zeta2=1)))


def z_printed(m: int) -> frozenset:
    return elem(n_key(1, m, 1, zeta_from(zeta2=1)))


@lru_cache(maxsize=None)
def z_elem(m: int) -> tuple[frozenset | None, frozenset]:
    """(cycle lifting z_m, correction added to the printed formula).

    The cycle is None when no element of the form printed + (other basis
    elements of the same degree) is a d_3-cycle.
    """
    printed = z_printed(m)
    d = z_degree(m)
    target = vec(d3(printed), d + D3)
    if not target:
        return printed, frozenset()
    ech = EchelonBasis(track=True)
    for n, k in enumerate(e2_basis(d)):
        if k in printed:
            continue
        ech.add(vec(d3_key(k), d + D3), 1 << n)
    v, combo = ech.reduce(target)
    if v:
        return None, frozenset()
    corr = unvec(combo, d)
    return add(printed, corr), corr


def generator_report(max_index: int = 8) -> dict:
    """d_3-cycle status of x2, y_n, w and of z_m both as printed and corrected."""
    out = {"x2": is_cycle(x2_elem()), "w": is_cycle(w_elem()), "y": {}, "z_printed": {},
           "z_corrected": {}}
    for n in range(2, max_index + 1):
        out["y"][n] = is_cycle(y_elem(n))
    for m in range(max_index + 1):
        out["z_printed"][m] = is_cycle(z_printed(m))
        z, corr = z_elem(m)
        out["z_corrected"][m] = {"cycle": z is not None and is_cycle(z),
                                 "element": elem_str(z) if z is not None else "",
                                 "correction": elem_str(corr) if corr else ""}
    out["ok"] = out["x2"] and out["w"] and all(out["y"].values())
    return out


# ---------------------------------------------------------------------------
# spanning sets of the generated subalgebras


def multipliers(d: RODegree, level: int = 1) -> list[frozenset]:
    """Monomials cot(level)-coefficient * a^alpha x1^beta x2^delta v1^gamma in degree d."""
    a, b, s = d.a, d.b, d.s
    if (a + b + s) % 2 or a + b + s < 0:
        return []
    ga = (a + b + s) // 2
    out = []
    x2 = x2_elem()
    for de in range(0, (a - ga) // 3 + 1):
        x2p = power(x2, de) if de else None
        for be in range(0, a - ga - 3 * de + 1):
            n = a - ga - be - 3 * de
            al = ga - b - be - de
            if al < 0:
                continue
            for z in zeta_monomials(n, level):
                base = frozenset({("P", z, al, be, ga)})
                out.append(mul(base, x2p) if de else base)
    return out


def _nc_generators(d: RODegree, extra: int, with_w: bool) -> list[frozenset]:
    """NC-type generators that can reach degree d after multiplication."""
    basis = [k for k in e2_basis(d) if k[0] == "N"]
    if not basis:
        return []
    imax = max(k[4] for k in basis) + extra
    jmax = max(k[5] for k in basis) + extra
    gens = []
    for i in range(1, imax + 1):
        for j in range(0, jmax + 1):
            gens.append(elem(n_key(i, j, 0)))
            gens.append(elem(n_key(i, j, 1)))
    for n in range(2, 2 * imax + 2):
        gens.append(y_elem(n))
    for m in range(0, jmax + 1):
        z = z_elem(m)[0]
        if z is not None:
            gens.append(z)
    if with_w:
        gens.append(w_elem())
    return gens


def span_vectors(d: RODegree, extra: int, with_w: bool) -> list[int]:
    vs = [vec(p, d) for p in multipliers(d)]
    for g in _nc_generators(d, extra, with_w):
        gd = elem_degree(g)
        for p in multipliers(d - gd):
            prod = mul(p, g)
            if prod:
                vs.append(vec(prod, d))
    return vs


def ideal_vectors(d: RODegree, with_v1sq: bool) -> list[int]:
    """Span of the ideal (a v1, x1 v1[, v1^2]) of E_2 in degree d."""
    gens = [elem(p_key(alpha=1, gamma=1)), elem(p_key(beta=1, gamma=1))]
    if with_v1sq:
        gens.append(elem(p_key(gamma=2)))
    out = []
    for g in gens:
        for k in e2_basis(d - elem_degree(g)):
            prod = mul(g, [k])
            if prod:
                out.append(vec(prod, d))
    return out


def _rank(*groups: Iterable[int]) -> int:
    e = EchelonBasis()
    for g in groups:
        for v in g:
            e.add(v)
    return len(e)


SATURATION_STEP = 3


@dataclass
class SliceCheck:
    degree: RODegree
    dim_e2: int
    dim_e4: int
    dim_e6: int
    gen_e4_dim: int        # dim of the span of E_4 generators in E_2/(a v1, x1 v1)
    gen_e6_dim: int        # dim of the span of E_6 generators in E_2/(a v1, x1 v1, v1^2)
    w_v1_classes: int = 0  # classes w*c*v1^g, g >= 1: nonzero on E_4, zero in E_2/I
    failures: list = field(default_factory=list)

    def as_dict(self) -> dict:
        out = self.degree.as_dict()
        out.update({"E2": self.dim_e2, "E4": self.dim_e4, "E6": self.dim_e6,
                    "E4_generated": self.gen_e4_dim, "E6_generated": self.gen_e6_dim,
                    "w_v1_classes": self.w_v1_classes,
                    "failures": list(self.failures)})
        return out


def w_part(d: RODegree, min_v: int = 0) -> list[tuple]:
    """(c, g) with c in cot(1) and w*c*v1^g in degree d, g >= min_v."""
    out = []
    for g in range(min_v, max(d.b - 2, -1) + 1):
        k = d.a - 3 - g
        if d.b != 2 + g or d.s != -5 - k:
            continue
        out += [(z, g) for z in zeta_monomials(k, 1)]
    return out


def _w_vectors(d: RODegree, min_v: int = 0) -> list[int]:
    w = w_elem()
    return [vec(mul(w, [p_key(z, gamma=g)]), d) for z, g in w_part(d, min_v)]


def _d5_rank_from(d: RODegree) -> int:
    cs = w_part(d)
    if not cs:
        return 0
    tgt = d + D5
    h = e4_slice(tgt)
    imgs = [vec([p_key(z, gamma=g + 2)], tgt) for z, g in cs]
    b = list(h.boundaries.pivots.values())
    return _rank(b, imgs) - len(b)


def _d5_rank_into(d: RODegree) -> int:
    return _d5_rank_from(d - D5)


def check_slice(d: RODegree, extra: int = 4) -> SliceCheck:
    """Compare E_4 and E_6 in degree d with their generator descriptions.

    E_4 = Z/B for d_3.  The E_4 generators must be cycles whose products
    span Z/B, every boundary must lie in the ideal I = (a v1, x1 v1), and
    the kernel of Z/B -> E_2/I must be exactly the span of the classes
    w*c*v1^g with g >= 1.  d_5 is w*c*v1^g -> c*v1^(g+2) on the w-part and
    zero on the subalgebra A generated by everything but w; E_4 must be
    A + (w-part) as a direct sum.  E_6 is then compared with the image of
    A in E_2/(a v1, x1 v1, v1^2).
    """
    h = e4_slice(d)
    fails = []
    z = h.cycles
    b = list(h.boundaries.pivots.values())
    s4 = span_vectors(d, extra, True)
    sa = span_vectors(d, extra, False)
    if (_rank(s4) != _rank(s4, span_vectors(d, extra + SATURATION_STEP, True))
            or _rank(sa) != _rank(sa, span_vectors(d, extra + SATURATION_STEP, False))):
        fails.append("generator span not saturated")
    zr = _rank(z)
    if _rank(z, s4) != zr:
        fails.append("a listed E4 generator product is not a d3-cycle")
    if _rank(s4, b) != zr:
        fails.append("E4 generators do not span the homology")
    ideal = ideal_vectors(d, False)
    ir = _rank(ideal)
    if _rank(ideal, b) != ir:
        fails.append("a d3-boundary lies outside (a v1, x1 v1)")
    wv = _w_vectors(d)
    wplus = _w_vectors(d, 1)
    extra_kernel = _rank(b, wplus) - len(b)
    if _rank(ideal, wplus) != ir:
        fails.append("a class w*c*v1^g lies outside (a v1, x1 v1)")
    zi = zr + ir - _rank(z, ideal)
    if zi - len(b) != extra_kernel:
        fails.append("kernel of E4 -> E2/(a v1, x1 v1) is not the w*v1 part")
    gen4 = _rank(s4, ideal) - ir
    if gen4 != h.dim - extra_kernel:
        fails.append(f"E4 dim {h.dim} != generated {gen4} + {extra_kernel}")
    ra = _rank(b, sa) - len(b)
    rw = _rank(b, wv) - len(b)
    if ra + rw != h.dim or _rank(b, sa, wv) - len(b) != h.dim:
        fails.append("E4 is not A + w-part")
    e6 = h.dim - _d5_rank_from(d) - _d5_rank_into(d)
    ideal6 = ideal_vectors(d, True)
    i6 = _rank(ideal6)
    gen6 = _rank(sa, ideal6) - i6
    if gen6 != e6:
        fails.append(f"E6 dim {e6} != generated {gen6}")
    return SliceCheck(d, h.dim_e2, h.dim, e6, gen4, gen6, extra_kernel, fails)


def relation_defect(i_max: int = 4, j_max: int = 6) -> list[dict]:
    """Where x1*(x1*E(i,j)) = zeta_1^2 E(i,j-2) + E(i-1,j) breaks d_3.

    The left side is a product of d_3-cycles.  The right side has
    d_3 = v1 E(i, j-3) whenever j >= 3.
    """
    out = []
    for i in range(1, i_max + 1):
        for j in range(2, j_max + 1):
            rhs = {n_key(i, j - 2, 0, zeta_from(zeta1=2))}
            if i >= 2:
                rhs.add(n_key(i - 1, j))
            dr = d3(frozenset(rhs))
            if dr:
                out.append({"i": i, "j": j, "d3_rhs": elem_str(dr)})
    return out


# ---------------------------------------------------------------------------
# boxes and runs


@dataclass(frozen=True)
class ROBox:
    a_lo: int = -4
    a_hi: int = 8
    b_lo: int = -6
    b_hi: int = 6

    def contains(self, d: RODegree) -> bool:
        return self.a_lo <= d.a <= self.a_hi and self.b_lo <= d.b <= self.b_hi

    def degrees(self) -> list[RODegree]:
        """Every (a, b, s) in the box with nonzero E_2."""
        out = []
        for a in range(self.a_lo, self.a_hi + 1):
            for b in range(self.b_lo, self.b_hi + 1):
                top = max(a, b, 0) + 2
                for ga in range(0, top + 1):
                    d = RODegree(a, b, 2 * ga - a - b)
                    if e2_basis(d):
                        out.append(d)
        return out

    def as_dict(self) -> dict:
        return {"a": [self.a_lo, self.a_hi], "b": [self.b_lo, self.b_hi]}


DEFAULT_RO_BOX = ROBox()


@dataclass
class EquivariantPage:
    name: str
    dims: dict            # RODegree -> dim

    def as_dict(self) -> dict:
        rows = [dict(d.as_dict(), dim=n) for d, n in sorted(self.dims.items()) if n]
        return {"page": self.name, "classes": sum(self.dims.values()), "degrees": rows}


def build_e2_kR(box: ROBox = DEFAULT_RO_BOX) -> EquivariantPage:
    return EquivariantPage("E2", {d: len(e2_basis(d)) for d in box.degrees()})


@dataclass
class EquivariantRun:
    box: ROBox
    pages: list
    slices: list
    generators: dict
    relations: dict
    forced: dict
    z_gaps: dict
    v1: dict
    motivic: dict

    @property
    def failures(self) -> list[str]:
        out = [f"{c.degree}: {f}" for c in self.slices for f in c.failures]
        if not self.generators["ok"]:
            out.append("an E4 generator (after correction) is not a cycle")
        out += [f"relation {k} fails" for k, v in self.relations.items() if not v]
        if not self.forced["unique_w"]:
            out.append("forced d5 search did not find w as the unique candidate")
        out += [f"z_{m} degree gap nonempty" for m, r in self.z_gaps.items() if not r["ok"]]
        if not self.v1["ok"]:
            out.append("v1 / v1^2 status on E6 wrong")
        out += [f"motivic mismatch at {x}" for x in self.motivic["mismatches"]]
        return out

    @property
    def ok(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {
            "box": self.box.as_dict(),
            "ok": self.ok,
            "failures": self.failures,
            "pages": [p.as_dict() for p in self.pages],
            "generators": self.generators,
            "relations": self.relations,
            "forced_d5": self.forced,
            "z_degree_gap": {str(m): r for m, r in sorted(self.z_gaps.items())},
            "v1": self.v1,
            "motivic_comparison": self.motivic,
            "printed_relation_defect": relation_defect(),
        }


def relation_report() -> dict:
    """Products with w that vanish already on E_2."""
    w = w_elem()
    a = elem(p_key(alpha=1))
    x1 = elem(p_key(beta=1))
    out = {
        "w^2": not mul(w, w),
        "a*w": not mul(a, w),
        "x1*w": not mul(x1, w),
        "x2*w": not mul(x2_elem(), w),
    }
    out["w*z_m"] = all(not mul(w, z_printed(m)) for m in range(6))
    out["w*y_n"] = all(not mul(w, y_elem(n)) for n in range(2, 10))
    out["x1*e_(2i+1) = e_(2i)"] = all(
        key_degree(n_key(i, 0, 1)) == RODegree(-2 * i, 2 * i, 0) for i in range(1, 6))
    out["x1^2 e_(2i+1) = e_(2i-1)"] = all(
        mul(elem(p_key(beta=2)), elem(n_key(i, 0))) == elem(n_key(i - 1, 0)) for i in range(2, 6))
    out["a*e_k = 0"] = all(not mul(a, elem(n_key(i, 0, e))) for i in range(1, 6) for e in (0, 1))
    out["a v1, x1 v1 boundaries"] = (is_boundary(elem(p_key(alpha=1, gamma=1)))
                                     and is_boundary(elem(p_key(beta=1, gamma=1))))
    return out


def forced_d5_search(target: RODegree = RODegree(2, 2, 0), r_max: int = 15) -> dict:
    """Every nonzero E_4 degree that a d_r (r >= 4) into ``target`` could start from."""
    rows = []
    if e4_slice(target).dim:
        for r in range(4, r_max + 1):
            src = target - d_shift(r)
            h = e4_slice(src)
            if not h.dim:
                continue
            b = list(h.boundaries.pivots.values())
            names = []
            if src == elem_degree(w_elem()) and _rank(b, [vec(w_elem(), src)]) > len(b):
                names.append("w")
            rows.append({"r": r, "source": src.as_dict(), "candidates": h.dim, "named": names})
    unique_w = (len(rows) == 1 and rows[0]["r"] == 5 and rows[0]["candidates"] == 1
                and rows[0]["named"] == ["w"])
    return {"target": target.as_dict(), "target_nonzero_on_E4": bool(e4_slice(target).dim),
            "candidates": rows, "unique_w": unique_w}


def z_m_degree_gap(m: int, r_lo: int = 4, r_hi: int = 12, box: ROBox | None = None) -> dict:
    """E_4 classes in the target degree of d_r(z_m) for r_lo <= r <= r_hi."""
    rows = []
    outside = []
    for r in range(r_lo, r_hi + 1):
        t = z_degree(m) + d_shift(r)
        if box is not None and not box.contains(t):
            outside.append(r)
            continue
        h = e4_slice(t)
        nc = [key_str(k) for k in e2_basis(t) if k[0] == "N"]
        rows.append({"r": r, "target": t.as_dict(), "e2_nc_basis": nc, "e4_dim": h.dim})
    nonempty = [row["r"] for row in rows if row["e4_dim"]]
    return {"m": m, "rows": rows, "nonempty": nonempty, "outside_box": outside,
            "vacuous": not rows, "ok": not nonempty}


def v1_report() -> dict:
    v1 = RODegree(1, 1, 0)
    v1sq = RODegree(2, 2, 0)
    alive = (not is_boundary(elem(p_key(gamma=1)))) and _d5_rank_into(v1) == 0
    sq_e4 = not is_boundary(elem(p_key(gamma=2)))
    sq_killed = _d5_rank_into(v1sq) == 1
    return {"v1_nonzero_E6": alive, "v1^2_nonzero_E4": sq_e4, "v1^2_killed_by_d5": sq_killed,
            "ok": alive and sq_e4 and sq_killed}


def motivic_comparison(box: ROBox, e6: dict) -> dict:
    """E_6 in degrees with b <= 0 against the motivic E_infinity of BPGL<1>."""
    degs = [d for d in box.degrees() if d.b <= 0]
    phi = max((2 * d.underlying - 3 * d.b for d in degs), default=0) + 4
    pres = hsss.e4_presentation(1, phi)
    checked = 0
    mismatches = []
    for a in range(box.a_lo, box.a_hi + 1):
        for b in range(box.b_lo, min(box.b_hi, 0) + 1):
            stem = a + b
            if stem < 0 and not any(d.a == a and d.b == b for d in degs):
                continue
            fs = set(pres.ring.filtrations(stem, b)) if stem >= -64 else set()
            fs |= {d.s for d in degs if d.a == a and d.b == b}
            for s in sorted(fs):
                d = RODegree(a, b, s)
                mine = e6.get(d, 0)
                theirs = len(pres.basis(TriDegree(stem, b, s)))
                checked += 1
                if mine != theirs:
                    mismatches.append(dict(d.as_dict(), E6=mine, motivic=theirs))
    return {"degrees_checked": checked, "mismatches": mismatches, "ok": not mismatches}


def run_equivariant_kR(box: ROBox = DEFAULT_RO_BOX, threads: int = 1,
                       z_max: int = 4) -> EquivariantRun:
    for anchor in (elem_degree(w_elem()), RODegree(2, 2, 0)):
        if not box.contains(anchor):
            raise ContractError(f"box must contain {anchor}")
    degs = box.degrees()
    checks = _run(check_slice, degs, threads)
    e2 = {c.degree: c.dim_e2 for c in checks}
    e4 = {c.degree: c.dim_e4 for c in checks}
    e6 = {c.degree: c.dim_e6 for c in checks}
    pages = [EquivariantPage("E2", e2), EquivariantPage("E4", e4), EquivariantPage("E6", e6)]
    return EquivariantRun(
        box=box,
        pages=pages,
        slices=checks,
        generators=generator_report(),
        relations=relation_report(),
        forced=forced_d5_search(),
        z_gaps={m: z_m_degree_gap(m, box=box) for m in range(z_max + 1)},
        v1=v1_report(),
        motivic=motivic_comparison(box, e6),
    )


def z_correction_table(max_m: int = 8) -> list[dict]:
    out = []
    for m in range(max_m + 1):
        z, corr = z_elem(m)
        out.append({"m": m, "printed_is_cycle": is_cycle(z_printed(m)),
                    "correctable": z is not None,
                    "correction": elem_str(corr) if corr else ""})
    return out


__all__: Sequence[str] = [
    "RODegree", "ROBox", "EquivariantPage", "EquivariantRun", "SliceCheck",
    "build_e2_kR", "run_equivariant_kR", "z_m_degree_gap", "forced_d5_search",
    "e2_basis", "e4_slice", "d3", "mul", "w_elem", "x2_elem", "y_elem", "z_elem", "z_printed",
]
