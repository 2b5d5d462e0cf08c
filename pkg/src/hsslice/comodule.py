"""Finite comodules over A(m)_* and A_*, cotensor products and duals.

Coactions are left coactions psi: M -> A_* (x) M stored as sets of
(xi monomial, basis index) pairs.  Classes of the spectral sequence pages
get their coaction from the multiplicative extension of

    psi(zeta_n) = sum_i zeta_i (x) zeta_{n-i}^{2^i},
    psi(x_n) = sum_i xi_i^{2^{n-i}} (x) x_{n-i}   (x_0 = rho),

with rho and the v's primitive.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from . import hsss
from . import steenrod as S
from .f2core import (AlgebraPresentation, ContractError, EchelonBasis, PolyRing, TriDegree,
                     _toggle)

XI = S.XI


def _level_ok(mono: int, level: int | None) -> bool:
    return level is None or S.in_quotient(mono, level)


# ---------------------------------------------------------------------------
# coaction on page classes


@lru_cache(maxsize=None)
def _gen_coaction(ring: PolyRing, i: int) -> frozenset:
    g = ring.gens[i]
    name = g.name
    if name == "rho" or name.startswith("v"):
        return frozenset({(0, ring.units[i])})
    if name.startswith("x"):
        n = int(name[1:])
        out: set = set()
        for j in range(n + 1):
            left = 0 if j == 0 else XI.gen(f"xi{j}", 2 ** (n - j))
            k = n - j
            right = ring.gen("rho") if k == 0 else ring.gen(f"x{k}")
            _toggle(out, (left, right))
        return frozenset(out)
    if name.startswith("zeta"):
        n = int(name[4:])
        base: set = set()
        for j in range(n + 1):
            for lm in S.zeta(j, 1) if j else S.ONE:
                right = 0 if j == n else ring.gen(f"zeta{n - j}", 2 ** j)
                _toggle(base, (lm, right))
        return S.tensor_power(frozenset(base), g.power)
    raise ContractError(f"no coaction for generator {name}")


def coaction_of_class(p: Iterable[int], ring: PolyRing, level: int | None = None) -> frozenset:
    """psi(p) as a set of (xi monomial, ring monomial) pairs, optionally reduced to A(level)_*."""
    out: set = set()
    for m in p:
        acc = frozenset({(0, 0)})
        for i, e in enumerate(ring.exps(m)):
            if e:
                acc = S.tensor_mul(acc, S.tensor_power(_gen_coaction(ring, i), e))
        out.symmetric_difference_update(acc)
    if level is not None:
        out = {t for t in out if S.in_quotient(t[0], level)}
    return frozenset(out)


def tensor_str(t: Iterable[tuple[int, int]], ring: PolyRing) -> str:
    return S.tensor_str(t, XI, ring)


# ---------------------------------------------------------------------------
# comodules


@dataclass
class ComoduleF2:
    """A finite graded comodule with basis ``names`` in degrees ``degrees``."""

    names: list
    degrees: list
    coaction: list                 # coaction[j] = frozenset of (xi monomial, basis index)
    level: int | None = None       # A(level)_*, or None for A_*
    products: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def psi(self, j: int) -> frozenset:
        return self.coaction[j]

    # -- laws ---------------------------------------------------------------
    def counit_failures(self) -> list[str]:
        out = []
        for j, terms in enumerate(self.coaction):
            units = {y for a, y in terms if a == 0}
            if units != {j}:
                out.append(f"counit fails on {self.names[j]}")
        return out

    def degree_failures(self) -> list[str]:
        out = []
        for j, terms in enumerate(self.coaction):
            for a, y in terms:
                if S.degree(a) + self.degrees[y] != self.degrees[j]:
                    out.append(f"psi({self.names[j]}) is not homogeneous")
                    break
        return out

    def coassociativity_failures(self) -> list[str]:
        out = []
        for j, terms in enumerate(self.coaction):
            lhs: set = set()
            rhs: set = set()
            for a, y in terms:
                for l, r in S.coproduct_monomial(a):
                    if _level_ok(l, self.level) and _level_ok(r, self.level):
                        _toggle(lhs, (l, r, y))
                for b, z in self.coaction[y]:
                    _toggle(rhs, (a, b, z))
            if lhs != rhs:
                out.append(f"coassociativity fails on {self.names[j]}")
        return out

    def law_failures(self) -> list[str]:
        return self.counit_failures() + self.degree_failures() + self.coassociativity_failures()

    # -- serialization ------------------------------------------------------
    def as_dict(self) -> dict:
        return {
            "level": self.level,
            "basis": [{"name": n, "degree": d} for n, d in zip(self.names, self.degrees)],
            "coaction": {self.names[j]: [[XI.mono_str(a), self.names[y]]
                                         for a, y in sorted(terms, key=lambda t: (-S.degree(t[0]), t))]
                         for j, terms in enumerate(self.coaction)},
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: Mapping) -> "ComoduleF2":
        names = [b["name"] for b in data["basis"]]
        degrees = [b["degree"] for b in data["basis"]]
        idx = {n: j for j, n in enumerate(names)}
        coaction = []
        for n in names:
            terms: set = set()
            for a, y in data["coaction"].get(n, []):
                _toggle(terms, (XI.parse_monomial(a), idx[y]))
            coaction.append(frozenset(terms))
        return cls(names, degrees, coaction, data.get("level"))

    @classmethod
    def from_json(cls, text: str) -> "ComoduleF2":
        return cls.from_dict(json.loads(text))


def trivial_comodule(level: int | None = None) -> ComoduleF2:
    return ComoduleF2(["1"], [0], [frozenset({(0, 0)})], level)


def quotient_hopf_comodule(level: int, max_degree: int) -> ComoduleF2:
    """A(level)_* as a left comodule over itself (its top degree must be <= max_degree)."""
    monos = [m for d in range(max_degree + 1) for m in S.quotient_basis(level, d)]
    idx = {m: j for j, m in enumerate(monos)}
    coaction = []
    for m in monos:
        terms = frozenset((l, idx[r]) for l, r in S.coproduct_monomial(m)
                          if S.in_quotient(l, level) and S.in_quotient(r, level))
        coaction.append(terms)
    return ComoduleF2([XI.mono_str(m) for m in monos], [S.degree(m) for m in monos], coaction, level)


# ---------------------------------------------------------------------------
# the comodules M_m


def extract_weight0_comodule(m: int, run=None, max_stem: int | None = None) -> ComoduleF2:
    """M_m: zeta-free weight-0 classes of E_infinity with the reduced coaction.

    With ``run`` given, the weight-0 dims of the run must equal the
    convolution of the cotensor dims with the dims of M_m.
    """
    pres = hsss.m_presentation(m)
    ring = pres.ring
    basis = hsss.m_basis(m, max_stem)
    monos = [x for d in sorted(basis, key=lambda t: (t.stem, t.filtration)) for x in basis[d]]
    idx = {x: j for j, x in enumerate(monos)}
    coaction = []
    for x in monos:
        terms: set = set()
        for a, y in coaction_of_class({x}, ring, level=m):
            for z in pres.normal_form({y}):
                _toggle(terms, (a, idx[z]))
        coaction.append(frozenset(terms))
    names = [ring.mono_str(x) for x in monos]
    degrees = [ring.degree(x).stem for x in monos]
    products = {}
    for i, a in enumerate(monos):
        for b in monos[i:]:
            p = pres.normal_form({a + b})
            if p and a and b:
                products[(names[i], ring.mono_str(b))] = [ring.mono_str(z) for z in sorted(p)]
    M = ComoduleF2(names, degrees, coaction, m, products)
    if run is not None:
        check = convolution_check(m, run.weight0_dims(), M, run.box.max_stem)
        if not check["ok"]:
            raise ContractError(f"convolution identity fails at stem {check['first_failure']}")
    return M


def convolution_check(m: int, weight0: Mapping[int, int], M: ComoduleF2, max_stem: int) -> dict:
    mdims: dict[int, int] = {}
    for d in M.degrees:
        mdims[d] = mdims.get(d, 0) + 1
    conv = hsss.convolve(hsss.cotensor_dims(m, max_stem), mdims, max_stem)
    bad = [s for s in range(max_stem + 1) if conv.get(s, 0) != weight0.get(s, 0)]
    return {"ok": not bad, "first_failure": bad[0] if bad else None, "convolution": conv}


def augmentation(M: ComoduleF2) -> ComoduleF2:
    """M-bar: drop the unit (a trivial summand)."""
    keep = [j for j, d in enumerate(M.degrees) if d > 0]
    idx = {j: k for k, j in enumerate(keep)}
    coaction = [frozenset((a, idx[y]) for a, y in M.coaction[j] if y in idx) for j in keep]
    return ComoduleF2([M.names[j] for j in keep], [M.degrees[j] for j in keep], coaction, M.level)


# ---------------------------------------------------------------------------
# cotensor products


def cotensor_with(M: ComoduleF2, level: int, max_degree: int) -> dict[int, list[frozenset]]:
    """Degreewise basis of A_* box_{A(level)_*} M inside A_* (x) M.

    x is in the cotensor product when (1 (x) pi) Delta (x) 1 and 1 (x) psi
    agree on it.  Basis vectors are sets of (xi monomial, basis index) pairs.
    """
    out = {}
    for d in range(max_degree + 1):
        source = []
        for y, dy in enumerate(M.degrees):
            if dy <= d:
                source += [(a, y) for a in XI.monomials(TriDegree(d - dy, 0, 0))]
        index: dict = {}
        cols = []
        for a, y in source:
            terms: set = set()
            for l, r in S.coproduct_monomial(a):
                if S.in_quotient(r, level):
                    _toggle(terms, (l, r, y))
            for b, z in M.coaction[y]:
                if S.in_quotient(b, level):
                    _toggle(terms, (a, b, z))
            v = 0
            for t in terms:
                v ^= 1 << index.setdefault(t, len(index))
            cols.append(v)
        ech = EchelonBasis(track=True)
        kernel = []
        for j, c in enumerate(cols):
            v, combo = ech.reduce(c, 1 << j)
            if v:
                h = v.bit_length() - 1
                ech.pivots[h] = v
                ech.combos[h] = combo
            else:
                kernel.append(frozenset(source[k] for k in range(len(source)) if (combo >> k) & 1))
        out[d] = kernel
    return out


def cotensor_dims_with(M: ComoduleF2, level: int, max_degree: int) -> dict[int, int]:
    return {d: len(b) for d, b in cotensor_with(M, level, max_degree).items()}


# ---------------------------------------------------------------------------
# dualization


@dataclass
class SteenrodModule:
    """Finite module with Sq^i given by matrices on a graded basis."""

    names: list
    degrees: list
    action: dict                   # (i, j) -> frozenset of basis indices of Sq^i(e_j)
    max_sq: int = 7

    def sq(self, i: int, vec: Iterable[int]) -> frozenset:
        if i == 0:
            return frozenset(vec)
        if i > self.max_sq:
            raise ContractError(f"Sq^{i} is not determined by this module")
        out: set = set()
        for j in vec:
            out.symmetric_difference_update(self.action.get((i, j), frozenset()))
        return frozenset(out)

    def apply(self, word: Sequence[int], vec: Iterable[int]) -> frozenset:
        """Apply Sq^{w_1} Sq^{w_2} ... (rightmost first)."""
        v = frozenset(vec)
        for i in reversed(word):
            v = self.sq(i, v)
        return v

    def adem_failures(self) -> list[str]:
        """Adem relations Sq^a Sq^b (0 < a < 2b) with a + b <= max_sq on every basis element."""
        out = []
        for a in range(1, self.max_sq + 1):
            for b in range(1, self.max_sq + 1 - a):
                if a >= 2 * b:
                    continue
                for j in range(len(self.names)):
                    lhs = self.apply((a, b), {j})
                    rhs: set = set()
                    for c in range(a // 2 + 1):
                        if _binom2(b - 1 - c, a - 2 * c):
                            rhs.symmetric_difference_update(self.apply((a + b - c, c), {j}))
                    if lhs != frozenset(rhs):
                        out.append(f"Sq^{a}Sq^{b} on {self.names[j]}")
        return out

    def as_dict(self) -> dict:
        return {"basis": [{"name": n, "degree": d} for n, d in zip(self.names, self.degrees)],
                "action": {f"Sq{i}({self.names[j]})": sorted(self.names[k] for k in v)
                           for (i, j), v in sorted(self.action.items()) if v}}


def _binom2(n: int, k: int) -> int:
    if k < 0 or n < 0 or k > n:
        return 0
    return 1 if (n & k) == k else 0


def dualize(M: ComoduleF2, shift: int = 0) -> SteenrodModule:
    """(Sq^i f)(x) = sum <Sq^i, a> f(x') over psi(x) = sum a (x) x'.

    The dual of basis element x is named ``x*`` and sits in degree |x| + shift.
    """
    action: dict = {}
    for x, terms in enumerate(M.coaction):
        for a, y in terms:
            exps = XI.exps(a)
            if a and all(e == 0 for e in exps[1:]):
                i = exps[0]
                key = (i, y)
                action[key] = action.get(key, frozenset()) ^ frozenset({x})
    top = 2 ** (M.level + 1) - 1 if M.level is not None else max(M.degrees, default=0)
    return SteenrodModule([n + "*" for n in M.names], [d + shift for d in M.degrees],
                          {k: v for k, v in action.items() if v}, top)


def xi1_matrices(M: ComoduleF2) -> dict[int, set]:
    """Coefficients of xi_1^i (x) y in psi(x), as sets of (x, y)."""
    out: dict[int, set] = {}
    for x, terms in enumerate(M.coaction):
        for a, y in terms:
            exps = XI.exps(a)
            if a and all(e == 0 for e in exps[1:]):
                out.setdefault(exps[0], set()).add((x, y))
    return out


def double_dual_matches(M: ComoduleF2) -> bool:
    """Transposing the Sq action of the dual recovers the xi_1-part of psi."""
    N = dualize(M)
    back: dict[int, set] = {}
    for (i, y), xs in N.action.items():
        for x in xs:
            back.setdefault(i, set()).add((x, y))
    return back == xi1_matrices(M) and sorted(N.degrees) == sorted(M.degrees)


# ---------------------------------------------------------------------------
# the module N


N_DIMENSIONS = [3, 5, 6, 7, 9, 10, 11, 12, 13]
N_NONZERO = [(2,), (3,), (4,), (4, 2), (5, 2), (6, 2), (6, 3), (7, 3)]
N_ZERO = [(6,)]
N_EQUAL = [((6, 2), (8,))]


def n_module_check(M2: ComoduleF2 | None = None) -> dict:
    """Compare the shifted dual of M-bar_2 with the module N."""
    M2 = M2 or extract_weight0_comodule(2)
    Mbar = augmentation(M2)
    N = dualize(Mbar, shift=-1)
    g = [j for j, d in enumerate(N.degrees) if d == 3]
    out: dict = {"dimensions": sorted(N.degrees), "dimensions_ok": sorted(N.degrees) == N_DIMENSIONS,
                 "generator": N.names[g[0]] if len(g) == 1 else None, "rows": []}
    if len(g) != 1:
        out["ok"] = False
        return out
    gen = {g[0]}
    for word in N_NONZERO:
        v = N.apply(word, gen)
        out["rows"].append({"operation": _word(word), "expected": "nonzero",
                            "value": sorted(N.names[k] for k in v), "ok": bool(v)})
    for word in N_ZERO:
        v = N.apply(word, gen)
        out["rows"].append({"operation": _word(word), "expected": "zero",
                            "value": sorted(N.names[k] for k in v), "ok": not v})
    for lhs, rhs in N_EQUAL:
        a = N.apply(lhs, gen)
        try:
            b = N.apply(rhs, gen)
            note = ""
        except ContractError as exc:
            # Sq^8 is outside A(2); its value on the unreduced coaction
            b = _unreduced_sq(M2, rhs[0], Mbar, g[0])
            note = f"{exc}; value taken from the A_* coaction"
        out["rows"].append({"operation": f"{_word(lhs)} = {_word(rhs)}", "expected": "equal",
                            "value": [sorted(N.names[k] for k in a), sorted(N.names[k] for k in b)],
                            "ok": a == b, "note": note})
    out["adem_failures"] = N.adem_failures()
    out["ok"] = out["dimensions_ok"] and all(r["ok"] for r in out["rows"]) and not out["adem_failures"]
    return out


def _unreduced_sq(M2: ComoduleF2, i: int, Mbar: ComoduleF2, j: int) -> frozenset:
    """Sq^i on the dual of Mbar[j] using the unreduced A_* coaction of the classes."""
    pres = hsss.m_presentation(2)
    ring = pres.ring
    idx = {n: k for k, n in enumerate(Mbar.names)}
    target = Mbar.names[j]
    out: set = set()
    for k, name in enumerate(Mbar.names):
        x = ring.parse_monomial(name)
        for a, y in coaction_of_class({x}, ring):
            exps = XI.exps(a)
            if exps[0] == i and all(e == 0 for e in exps[1:]):
                for z in pres.normal_form({y}):
                    if ring.mono_str(z) == target:
                        _toggle(out, idx[name])
    return frozenset(out)


def _word(word: Sequence[int]) -> str:
    return "".join(f"Sq{i}" for i in word)
