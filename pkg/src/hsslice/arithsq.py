"""The weight-zero arithmetic square for i_*HF_2 (x) BPGL.

The rho-local corner is A_*, the complete corner is F_2[z, chi_i] with
|z| = -1 and |chi_i| = 2(2^i - 1), and the map between them is

    phi(xi_i) = chi_i z^{2^i - 1} + chi_{i-1} z^{-1}     (chi_0 = 1).

The Mayer-Vietoris boundary keeps the terms of phi(p) with negative z
exponent, and H_j Gamma(BPGL) is F_2 in degree 0 plus the cokernel of the
boundary in degree j + 1.  Elements of the Laurent ring are frozensets of
exponent tuples (z, chi_1, ..., chi_n).
"""

from __future__ import annotations

import re

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

from . import gens as G
from . import hsss
from . import steenrod as S
from .f2core import EchelonBasis, PolyRing, TriDegree, _toggle, add

XI = S.XI


# ---------------------------------------------------------------------------
# the Laurent chi ring


def chi_count(max_degree: int) -> int:
    """Number of chi generators needed for xi monomials up to max_degree."""
    n = 1
    while 2 ** (n + 1) - 1 <= max_degree:
        n += 1
    return n


def chi_degree(i: int) -> int:
    return 2 * (2 ** i - 1)


def laurent_degree(t: tuple) -> int:
    return sum(e * chi_degree(i) for i, e in enumerate(t[1:], start=1)) - t[0]


def laurent_mul(a: Iterable[tuple], b: Iterable[tuple]) -> frozenset:
    out: set = set()
    b = tuple(b)
    for x in a:
        for y in b:
            _toggle(out, tuple(i + j for i, j in zip(x, y)))
    return frozenset(out)


def laurent_square(a: Iterable[tuple]) -> frozenset:
    return frozenset(tuple(2 * e for e in t) for t in a)


def laurent_str(p: Iterable[tuple]) -> str:
    terms = []
    for t in sorted(p, key=lambda t: (t[0], t[1:])):
        parts = [f"chi{i}" + (f"^{e}" if e != 1 else "") for i, e in enumerate(t[1:], start=1) if e]
        if t[0]:
            parts.append("z" + (f"^{t[0]}" if t[0] != 1 else ""))
        terms.append("*".join(parts) or "1")
    return " + ".join(terms) or "0"


@lru_cache(maxsize=None)
def phi_generator(i: int, n: int) -> frozenset:
    """phi(xi_i) with n chi variables."""
    a = [0] * (n + 1)
    a[0] = 2 ** i - 1
    a[i] += 1
    b = [0] * (n + 1)
    b[0] = -1
    if i > 1:
        b[i - 1] += 1
    return frozenset({tuple(a), tuple(b)})


@lru_cache(maxsize=None)
def _phi_power(i: int, e: int, n: int) -> frozenset:
    out = frozenset({(0,) * (n + 1)})
    base = phi_generator(i, n)
    while e:
        if e & 1:
            out = laurent_mul(out, base)
        e >>= 1
        if e:
            base = laurent_square(base)
    return out


def phi_monomial(m: int, n: int | None = None) -> frozenset:
    n = n or chi_count(S.degree(m))
    out = frozenset({(0,) * (n + 1)})
    for i, e in enumerate(XI.exps(m), start=1):
        if e:
            out = laurent_mul(out, _phi_power(i, e, n))
    return out


def phi(p: Iterable[int], n: int | None = None) -> frozenset:
    p = frozenset(p)
    n = n or chi_count(max([S.degree(m) for m in p] or [1]))
    out: set = set()
    for m in p:
        out.symmetric_difference_update(phi_monomial(m, n))
    return frozenset(out)


def boundary(p: Iterable[int], n: int | None = None) -> frozenset:
    """phi(p) with every term of nonnegative z exponent deleted."""
    return frozenset(t for t in phi(p, n) if t[0] < 0)


# ---------------------------------------------------------------------------
# homology of Gamma(BPGL)


def chi_monomial_count(d: int, n: int) -> int:
    """Monomials in chi_1..chi_n of degree d."""
    if d < 0 or d % 2:
        return 0
    parts = [chi_degree(i) for i in range(1, n + 1)]
    ways = [1] + [0] * d
    for p in parts:
        for k in range(p, d + 1):
            ways[k] += ways[k - p]
    return ways[d]


def negative_truncation_dim(d: int, n: int) -> int:
    """dim of the span of z^{-k} m(chi), k >= 1, in degree d."""
    return sum(chi_monomial_count(d - k, n) for k in range(1, d + 1))


@dataclass
class BoundaryDegree:
    degree: int
    source_dim: int
    target_dim: int
    rank: int
    kernel: list = field(default_factory=list)

    @property
    def injective(self) -> bool:
        return self.rank == self.source_dim


@lru_cache(maxsize=None)
def boundary_degree(d: int) -> BoundaryDegree:
    n = chi_count(d)
    monos = XI.monomials(TriDegree(d, 0, 0))
    index: dict = {}
    ech = EchelonBasis(track=True)
    kernel = []
    for j, m in enumerate(monos):
        v = 0
        for t in boundary({m}, n):
            v ^= 1 << index.setdefault(t, len(index))
        v, combo = ech.reduce(v, 1 << j)
        if v:
            h = v.bit_length() - 1
            ech.pivots[h] = v
            ech.combos[h] = combo
        else:
            kernel.append(frozenset(monos[k] for k in range(len(monos)) if (combo >> k) & 1))
    return BoundaryDegree(d, len(monos), negative_truncation_dim(d, n), len(ech.pivots), kernel)


def homology_gamma_bpgl(j: int) -> int:
    """dim H_j Gamma(BPGL) = [j = 0] + dim coker(boundary) in degree j + 1."""
    b = boundary_degree(j + 1)
    return (1 if j == 0 else 0) + b.target_dim - b.rank


def homology_table(max_j: int = 20) -> dict[int, int]:
    return {j: homology_gamma_bpgl(j) for j in range(max_j + 1)}


def boundary_injectivity(max_degree: int = 40) -> dict:
    bad = []
    for d in range(1, max_degree + 1):
        b = boundary_degree(d)
        if not b.injective:
            bad.append({"degree": d, "kernel": [XI.poly_str(p) for p in b.kernel[:3]]})
    return {"max_degree": max_degree, "injective": not bad, "failures": bad}


def leading_term_injectivity(max_degree: int = 30) -> dict:
    """Every nonzero p in A_j (0 < j <= bound) has a term of phi(p) with negative z exponent.

    A counterexample is exactly a nonzero kernel vector of the boundary, so
    this is decided by linear algebra; the witness is the lowest z term of a
    basis monomial, recorded for the report.
    """
    rows = []
    counterexamples = []
    for d in range(1, max_degree + 1):
        b = boundary_degree(d)
        counterexamples += [XI.poly_str(p) for p in b.kernel]
        rows.append({"degree": d, "dimension": b.source_dim, "rank": b.rank})
    return {"max_degree": max_degree, "holds": not counterexamples,
            "counterexamples": counterexamples, "rows": rows}


def lowest_z_term(p: Iterable[int]) -> frozenset:
    f = phi(p)
    if not f:
        return f
    low = min(t[0] for t in f)
    return frozenset(t for t in f if t[0] == low)


# ---------------------------------------------------------------------------
# edge image


def cotensor_generator_list(m: int, max_stem: int = 48) -> list[tuple[int, int]]:
    return [(i, p) for i, p in S.cotensor_generators(m, max_stem) if p * (2 ** i - 1) <= max_stem]


def edge_lift_witness(m: int, i: int) -> dict:
    """Localize the cotensor generator zeta_i^{p}; its y exponents must be multiples of 2^{m+1}."""
    power = 2 ** (m + 2 - i) if i <= m + 1 else 1
    source = PolyRing([G.zeta(i, power)])
    target = hsss.localized_ring(1, 2 * (2 ** i - 1) * power + 8)
    image = hsss.localization_map(source, target).of_monomial(source.gen(f"zeta{i}", power))
    # y = y2^{1/2}: a y2 exponent e is y^{2e}
    y_exps = sorted({2 * target.exponent(t, "y2") for t in image})
    step = 2 ** (m + 1)
    text = re.sub(r"y2(\^(\d+))?", lambda mt: f"y^{2 * int(mt.group(2) or 1)}", target.poly_str(image))
    return {"m": m, "i": i, "power": power, "image": text,
            "y_exponents": y_exps, "member": all(e % step == 0 for e in y_exps)}


def edge_lift_report(m: int, max_stem: int = 48) -> dict:
    rows = [edge_lift_witness(m, i) for i, _ in cotensor_generator_list(m, max_stem)]
    return {"m": m, "rows": rows, "all_members": all(r["member"] for r in rows)}


# ---------------------------------------------------------------------------
# motivic bookkeeping


MOTIVIC_VARS = ("rho", "tau", "tau0")


class MotivicLaurent:
    """GF(2) Laurent polynomials in rho, tau, tau0, tbar_1..tbar_n, xi_1..xi_n."""

    def __init__(self, n: int):
        self.n = n
        self.names = list(MOTIVIC_VARS) + [f"tbar{i}" for i in range(1, n + 1)] + \
                     [f"xi{i}" for i in range(1, n + 1)]
        self.index = {v: k for k, v in enumerate(self.names)}

    def bidegree_of(self, name: str) -> tuple[int, int]:
        if name == "rho":
            return (-1, -1)
        if name == "tau":
            return (0, -1)
        if name == "tau0":
            return (1, 0)
        i = int(name[4:]) if name.startswith("tbar") else int(name[2:])
        if name.startswith("tbar"):
            return (2 * (2 ** i - 1), 2 ** i - 1)
        return (2 ** i - 1, 0)

    def mono(self, **exps: int) -> tuple:
        v = [0] * len(self.names)
        for k, e in exps.items():
            v[self.index[k]] += e
        return tuple(v)

    def var(self, name: str, e: int = 1) -> frozenset:
        if name in ("tbar0", "xi0"):
            return frozenset({self.mono()})
        return frozenset({self.mono(**{name: e})})

    def bidegree(self, t: tuple) -> tuple[int, int]:
        s = w = 0
        for name, e in zip(self.names, t):
            a, b = self.bidegree_of(name)
            s += e * a
            w += e * b
        return (s, w)

    def homogeneous(self, p: Iterable[tuple]) -> bool:
        return len({self.bidegree(t) for t in p}) <= 1

    def mul(self, a, b) -> frozenset:
        return laurent_mul(a, b)

    def weight0_to_chi(self, p: Iterable[tuple], n: int) -> frozenset:
        """chi_i := tau^{2^i-1} tbar_i, z := rho/tau on weight-0 terms without xi or tau0."""
        out: set = set()
        for t in p:
            d = dict(zip(self.names, t))
            if any(d[f"xi{i}"] for i in range(1, self.n + 1)) or d["tau0"]:
                raise ValueError("only rho, tau and tbar may occur")
            if self.bidegree(t)[1] != 0:
                raise ValueError("term of nonzero weight")
            chi = [d[f"tbar{i}"] for i in range(1, n + 1)]
            _toggle(out, (d["rho"],) + tuple(chi))
        return frozenset(out)


def motivic_consistency(n: int = 5) -> dict:
    """Homogeneity of the recursion and of the presentation relations, and the derivation of phi."""
    R = MotivicLaurent(n)
    v = R.var
    rows = []
    for i in range(1, n + 1):
        # rho^{2^i} tbar_i = xi_{i-1}^2 (tau0 rho + tau) + xi_i rho + tbar_{i-1} tau^{2^{i-1}}
        eta = add(R.mul(v("tau0"), v("rho")), v("tau"))
        xi_prev_sq = v(f"xi{i - 1}", 2) if i > 1 else v("xi0")
        lhs = R.mul(v("rho", 2 ** i), v(f"tbar{i}"))
        rhs = add(R.mul(xi_prev_sq, eta), R.mul(v(f"xi{i}"), v("rho")),
                  R.mul(v(f"tbar{i - 1}") if i > 1 else v("tbar0"), v("tau", 2 ** (i - 1))))
        recursion_ok = R.homogeneous(lhs | rhs)
        tbar_prev = v(f"tbar{i - 1}") if i > 1 else v("tbar0")
        rho_inv = v("rho", -1)
        # xi_i from the recursion, then the top map xi_i -> xi_i + xi_{i-1}^2 eta/rho
        xi_i = R.mul(add(lhs, R.mul(xi_prev_sq, eta), R.mul(tbar_prev, v("tau", 2 ** (i - 1)))), rho_inv)
        image = add(xi_i, R.mul(R.mul(xi_prev_sq, eta), rho_inv))
        corrected = add(R.mul(v("rho", 2 ** i - 1), v(f"tbar{i}")),
                        R.mul(R.mul(tbar_prev, v("tau", 2 ** (i - 1))), rho_inv))
        printed = add(R.mul(v("rho", 2 ** i - 1), v(f"tbar{i}")),
                      R.mul(R.mul(tbar_prev, v("tau", 2 ** i - 1)), rho_inv))
        specialized = R.weight0_to_chi(image, n)
        rows.append({
            "i": i,
            "recursion_homogeneous": recursion_ok,
            "derived_equals_corrected": image == corrected,
            "corrected_homogeneous": R.homogeneous(corrected),
            "printed_homogeneous": R.homogeneous(printed),
            "specializes_to_phi": specialized == phi_generator(i, n),
        })
    rel_rows = []
    for j in range(0, n):
        # c(tau_j)^2 = c(tau_{j+1}) rho + c(tbar_{j+1}) tau
        tau_j = (2 * (2 ** j - 1) + 1, 2 ** j - 1)
        tau_j1 = (2 * (2 ** (j + 1) - 1) + 1, 2 ** (j + 1) - 1)
        tbar_j1 = (2 * (2 ** (j + 1) - 1), 2 ** (j + 1) - 1)
        lhs = (2 * tau_j[0], 2 * tau_j[1])
        a = (tau_j1[0] - 1, tau_j1[1] - 1)
        b = (tbar_j1[0], tbar_j1[1] - 1)
        c = (tbar_j1[0], tbar_j1[1] - 1)   # rho tau0 tbar_{j+1}
        rel_rows.append({"j": j, "presentation_relation_homogeneous": lhs == a == b,
                         "dual_steenrod_relation_homogeneous": lhs == a == b == c})
    return {"rows": rows, "relations": rel_rows,
            "ok": all(r["recursion_homogeneous"] and r["derived_equals_corrected"]
                      and r["corrected_homogeneous"] and r["specializes_to_phi"] for r in rows)
            and all(r["presentation_relation_homogeneous"] and r["dual_steenrod_relation_homogeneous"]
                    for r in rel_rows),
            "printed_exponent_inhomogeneous_for": [r["i"] for r in rows if not r["printed_homogeneous"]]}


# ---------------------------------------------------------------------------
# comparison with the spectral sequence


def crosscheck_vs_hsss(max_stem: int = 20) -> dict:
    """H_j Gamma(BPGL) against the weight-0 E_infinity of the m = infinity spectral sequence.

    Conditional: the spectral sequence side assumes no differentials beyond
    the ones that exist for each finite height.
    """
    square = homology_table(max_stem)
    ss = hsss.infinity_weight0_dims(max_stem)
    rows = [{"j": j, "arithmetic_square": square[j], "spectral_sequence": ss.get(j, 0)}
            for j in range(max_stem + 1)]
    return {"conditional": True, "rows": rows, "agree": all(r["arithmetic_square"] == r["spectral_sequence"]
                                                            for r in rows)}
