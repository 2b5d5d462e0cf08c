"""Graded polynomial algebras over GF(2).

Monomials are packed into Python ints, one 16-bit field per generator with
generator 0 in the most significant field.  Integer comparison of two
monomials is therefore lexicographic comparison of exponent vectors, and
multiplication is integer addition.  Polynomials are frozensets of packed
monomials (presence means coefficient 1).
"""

from __future__ import annotations

import heapq
import re
import threading
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Sequence

FIELD_BITS = 16
_GUARD = 1 << (FIELD_BITS - 1)
MAX_EXPONENT = _GUARD - 1
_FIELD_MASK = (1 << FIELD_BITS) - 1

Poly = frozenset
ZERO: frozenset = frozenset()


class TruncationError(ValueError):
    """A degree fell outside the truncation box."""


class ContractError(ValueError):
    """An input violated a precondition (e.g. inhomogeneous polynomial)."""


@dataclass(frozen=True, order=True)
class TriDegree:
    stem: int
    weight: int
    filtration: int

    def __add__(self, other: "TriDegree") -> "TriDegree":
        return TriDegree(self.stem + other.stem, self.weight + other.weight,
                         self.filtration + other.filtration)

    def __sub__(self, other: "TriDegree") -> "TriDegree":
        return TriDegree(self.stem - other.stem, self.weight - other.weight,
                         self.filtration - other.filtration)

    def __mul__(self, k: int) -> "TriDegree":
        return TriDegree(self.stem * k, self.weight * k, self.filtration * k)

    __rmul__ = __mul__

    @staticmethod
    def page_shift(r: int) -> "TriDegree":
        """Tridegree of a d_r differential."""
        return TriDegree(-1, 0, r)

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.stem, self.weight, self.filtration)


ORIGIN = TriDegree(0, 0, 0)


@dataclass(frozen=True)
class Generator:
    """A polynomial generator.

    ``power`` lets a generator stand for a fixed power of a named class, so
    a page generator for zeta1^4 is ``Generator("zeta1", deg, power=4)``;
    ``degree`` is the tridegree of that power.
    """

    name: str
    degree: TriDegree
    power: int = 1


def default_order_weight(d: TriDegree) -> int:
    """Positive linear functional used to grade Buchberger and enumeration.

    2*stem - 3*weight is positive on every generator appearing in the
    homological slice pages (zeta_i, rho, x_n, v_i).
    """
    return 2 * d.stem - 3 * d.weight


_TOKEN = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*)(?:\^(\d+))?$")


class PolyRing:
    """Free commutative GF(2) algebra on named, tridegree-graded generators."""

    def __init__(self, generators: Sequence[Generator],
                 order_weight: Callable[[TriDegree], int] = default_order_weight):
        names = [g.name for g in generators]
        if len(set(names)) != len(names):
            raise ContractError(f"duplicate generator names in {names}")
        self.gens: tuple[Generator, ...] = tuple(generators)
        self.index = {g.name: i for i, g in enumerate(self.gens)}
        n = len(self.gens)
        self.n = n
        self._shift = [FIELD_BITS * (n - 1 - i) for i in range(n)]
        self.units = [1 << s for s in self._shift]
        self.guard = sum(_GUARD << s for s in self._shift)
        self.order_weight = order_weight
        self.gen_phi = [order_weight(g.degree) for g in self.gens]
        self._deg_cache: dict[int, TriDegree] = {}
        self._enum_cache: dict = {}

    # -- monomials --------------------------------------------------------
    def exps(self, m: int) -> tuple[int, ...]:
        return tuple((m >> s) & _FIELD_MASK for s in self._shift)

    def from_exps(self, exps: Sequence[int]) -> int:
        m = 0
        for e, s in zip(exps, self._shift):
            if e < 0 or e > MAX_EXPONENT:
                raise ContractError(f"exponent {e} out of range")
            m |= e << s
        return m

    def _raw(self, name: str, k: int) -> int:
        i = self.index.get(name)
        if i is None:
            raise ContractError(f"unknown generator {name!r}")
        p = self.gens[i].power
        if k % p:
            raise ContractError(f"{name}^{k} is not a power of the generator {name}^{p}")
        return (k // p) * self.units[i]

    def mono(self, **powers: int) -> int:
        """Monomial from natural exponents, e.g. mono(zeta1=8, rho=2)."""
        return sum(self._raw(name, k) for name, k in powers.items())

    def gen(self, name: str, k: int = 1) -> int:
        """The monomial name^k (natural exponent)."""
        return self._raw(name, k)

    def has(self, name: str, k: int = 1) -> bool:
        i = self.index.get(name)
        return i is not None and k % self.gens[i].power == 0

    def exponent(self, m: int, name: str) -> int:
        """Natural exponent of ``name`` in m."""
        i = self.index[name]
        return ((m >> self._shift[i]) & _FIELD_MASK) * self.gens[i].power

    def natural(self, m: int) -> dict[str, int]:
        return {g.name: e * g.power for e, g in zip(self.exps(m), self.gens) if e}

    def divides(self, d: int, m: int) -> bool:
        g = self.guard
        return ((m | g) - d) & g == g

    def lcm(self, a: int, b: int) -> int:
        return self.from_exps([max(x, y) for x, y in zip(self.exps(a), self.exps(b))])

    def coprime(self, a: int, b: int) -> bool:
        return all(x == 0 or y == 0 for x, y in zip(self.exps(a), self.exps(b)))

    def degree(self, m: int) -> TriDegree:
        d = self._deg_cache.get(m)
        if d is None:
            s = w = f = 0
            for e, g in zip(self.exps(m), self.gens):
                if e:
                    s += e * g.degree.stem
                    w += e * g.degree.weight
                    f += e * g.degree.filtration
            d = TriDegree(s, w, f)
            if len(self._deg_cache) < 2_000_000:
                self._deg_cache[m] = d
        return d

    def phi(self, m: int) -> int:
        return sum(e * p for e, p in zip(self.exps(m), self.gen_phi))

    def support(self, m: int) -> list[str]:
        return [g.name for e, g in zip(self.exps(m), self.gens) if e]

    # -- formatting -------------------------------------------------------
    def mono_str(self, m: int) -> str:
        parts = []
        for e, g in zip(self.exps(m), self.gens):
            k = e * g.power
            if k == 1:
                parts.append(g.name)
            elif k > 1:
                parts.append(f"{g.name}^{k}")
        return "*".join(parts) if parts else "1"

    def poly_str(self, p: Iterable[int]) -> str:
        terms = sorted(p, reverse=True)
        return " + ".join(self.mono_str(m) for m in terms) if terms else "0"

    def parse_monomial(self, text: str) -> int:
        text = text.strip()
        if text == "1":
            return 0
        m = 0
        for factor in text.split("*"):
            match = _TOKEN.match(factor.strip())
            if not match or match.group(1) not in self.index:
                raise ContractError(f"unknown factor {factor!r} in {text!r}")
            m += self._raw(match.group(1), int(match.group(2) or 1))
        return m

    def parse(self, text: str) -> frozenset:
        text = text.strip()
        if text == "0" or not text:
            return ZERO
        out: set[int] = set()
        for term in text.split("+"):
            _toggle(out, self.parse_monomial(term))
        return frozenset(out)

    # -- arithmetic -------------------------------------------------------
    def mul(self, p: Iterable[int], q: Iterable[int]) -> frozenset:
        out: set[int] = set()
        q = tuple(q)
        for a in p:
            for b in q:
                c = a + b
                if c in out:
                    out.remove(c)
                else:
                    out.add(c)
        return frozenset(out)

    def power(self, p: frozenset, k: int) -> frozenset:
        result: frozenset = frozenset({0})
        base = p
        while k:
            if k & 1:
                result = self.mul(result, base)
            k >>= 1
            if k:
                base = self.square(base)
        return result

    def square(self, p: Iterable[int]) -> frozenset:
        return frozenset(2 * m for m in p)

    def is_homogeneous(self, p: Iterable[int]) -> bool:
        degs = {self.degree(m) for m in p}
        return len(degs) <= 1

    def poly_degree(self, p: Iterable[int]) -> TriDegree:
        degs = {self.degree(m) for m in p}
        if len(degs) != 1:
            raise ContractError("polynomial is zero or not homogeneous")
        return degs.pop()

    # -- slice enumeration -----------------------------------------------
    def monomials(self, d: TriDegree, among: Sequence[int] | None = None) -> list[int]:
        """All monomials of tridegree d, optionally restricted to a generator subset."""
        among = tuple(range(self.n)) if among is None else tuple(among)
        key = (among, d.stem, d.weight)
        table = self._enum_cache.get(key)
        if table is None:
            table = {}
            for m, f in self._enum(among, 0, d.stem, d.weight):
                table.setdefault(f, []).append(m)
            for f in table:
                table[f].sort(reverse=True)
            self._enum_cache[key] = table
        return list(table.get(d.filtration, ()))

    def filtrations(self, stem: int, weight: int, among: Sequence[int] | None = None) -> list[int]:
        among = tuple(range(self.n)) if among is None else tuple(among)
        self.monomials(TriDegree(stem, weight, 0), among)
        return sorted(self._enum_cache[(among, stem, weight)])

    def _enum(self, among: tuple[int, ...], pos: int, s: int, w: int) -> list[tuple[int, int]]:
        key = ("dp", among, pos, s, w)
        hit = self._enum_cache.get(key)
        if hit is not None:
            return hit
        phi_left = self.order_weight(TriDegree(s, w, 0))
        if pos == len(among):
            out = [(0, 0)] if s == 0 and w == 0 else []
        elif phi_left < 0:
            out = []
        else:
            i = among[pos]
            g = self.gens[i].degree
            if self.gen_phi[i] <= 0:
                raise ContractError(f"generator {self.gens[i].name} has non-positive order weight")
            out = []
            for e in range(phi_left // self.gen_phi[i] + 1):
                rest = self._enum(among, pos + 1, s - e * g.stem, w - e * g.weight)
                if rest:
                    base = e * self.units[i]
                    fe = e * g.filtration
                    out.extend((base + m, fe + f) for m, f in rest)
        self._enum_cache[key] = out
        return out

    # -- homomorphisms ----------------------------------------------------
    def hom(self, images: Mapping[str, frozenset], target: "PolyRing") -> "RingMap":
        return RingMap(self, target, images)


def _toggle(s: set, m: int) -> None:
    if m in s:
        s.remove(m)
    else:
        s.add(m)


def add(*polys: Iterable[int]) -> frozenset:
    out: set[int] = set()
    for p in polys:
        out.symmetric_difference_update(p)
    return frozenset(out)


class RingMap:
    """Algebra homomorphism between PolyRings given on generators."""

    def __init__(self, source: PolyRing, target: PolyRing, images: Mapping[str, Iterable[int]]):
        self.source = source
        self.target = target
        self.images = []
        for g in source.gens:
            if g.name in images:
                self.images.append(frozenset(images[g.name]))
            elif target.has(g.name, g.power):
                self.images.append(frozenset({target.gen(g.name, g.power)}))
            else:
                raise ContractError(f"no image for generator {g.name}")
        self._powers: dict[tuple[int, int], frozenset] = {}
        self._mono: dict[int, frozenset] = {}

    def _pow(self, i: int, e: int) -> frozenset:
        key = (i, e)
        hit = self._powers.get(key)
        if hit is None:
            hit = self.target.power(self.images[i], e)
            self._powers[key] = hit
        return hit

    def of_monomial(self, m: int) -> frozenset:
        hit = self._mono.get(m)
        if hit is not None:
            return hit
        acc: frozenset = frozenset({0})
        for i, e in enumerate(self.source.exps(m)):
            if e:
                acc = self.target.mul(acc, self._pow(i, e))
                if not acc:
                    break
        if len(self._mono) < 500_000:
            self._mono[m] = acc
        return acc

    def __call__(self, p: Iterable[int]) -> frozenset:
        out: set[int] = set()
        for m in p:
            out.symmetric_difference_update(self.of_monomial(m))
        return frozenset(out)


# ---------------------------------------------------------------------------
# Truncation boxes


@dataclass(frozen=True)
class TriDegreeBox:
    """Stems 0..max_stem, weights w_lo..w_hi, filtrations inside [f_lo, f_hi]."""

    max_stem: int
    w_lo: int = 0
    w_hi: int = 0
    min_stem: int = 0
    f_lo: int | None = None
    f_hi: int | None = None

    def contains(self, d: TriDegree) -> bool:
        if not (self.min_stem <= d.stem <= self.max_stem and self.w_lo <= d.weight <= self.w_hi):
            return False
        if self.f_lo is not None and d.filtration < self.f_lo:
            return False
        if self.f_hi is not None and d.filtration > self.f_hi:
            return False
        return True

    def slices(self) -> Iterator[tuple[int, int]]:
        for w in range(self.w_hi, self.w_lo - 1, -1):
            for s in range(self.min_stem, self.max_stem + 1):
                yield s, w

    def with_margin(self, margin: int = 1) -> "TriDegreeBox":
        return TriDegreeBox(self.max_stem + margin, self.w_lo, self.w_hi, self.min_stem,
                            self.f_lo, None if self.f_hi is None else self.f_hi + margin)

    def phi_bound(self, order_weight: Callable[[TriDegree], int] = default_order_weight) -> int:
        corners = [order_weight(TriDegree(s, w, 0))
                   for s in (self.min_stem, self.max_stem) for w in (self.w_lo, self.w_hi)]
        return max(corners)


# ---------------------------------------------------------------------------
# Presentations and truncated Groebner bases


class AlgebraPresentation:
    """Quotient of a PolyRing by homogeneous relations.

    Leading monomials are taken in lexicographic order on the packed
    exponent vector (generator declaration order), which restricted to a
    homogeneous component is the graded order asked for.  The Groebner
    basis is computed degree by degree in the order weight and truncated
    at a bound that grows on demand.
    """

    def __init__(self, ring: PolyRing, relations: Iterable[Iterable[int]] = (), name: str = ""):
        self.ring = ring
        self.name = name
        rels = []
        for r in relations:
            r = frozenset(r)
            if not r:
                continue
            if not ring.is_homogeneous(r):
                raise ContractError(f"relation {ring.poly_str(r)} is not homogeneous")
            rels.append(r)
        self.relations: tuple[frozenset, ...] = tuple(rels)
        self._gb: list[tuple[int, frozenset]] = []
        self._bound = -1
        self._pending: list = []
        self._nf_cache: dict[int, frozenset] = {}
        self._basis_cache: dict = {}
        self._seq = 0
        self._lock = threading.RLock()
        for r in self.relations:
            self._push(ring.phi(max(r)), ("rel", r))
        self.relation_generators = {n for r in self.relations for m in r for n in ring.support(m)}

    @classmethod
    def from_strings(cls, ring: PolyRing, relations: Iterable[str], name: str = "") -> "AlgebraPresentation":
        return cls(ring, [ring.parse(r) for r in relations], name)

    # -- Groebner ---------------------------------------------------------
    def _push(self, phi: int, item) -> None:
        self._seq += 1
        heapq.heappush(self._pending, (phi, self._seq, item))

    def ensure(self, bound: int) -> None:
        if bound <= self._bound:
            return
        with self._lock:
            self._ensure(bound)

    def _ensure(self, bound: int) -> None:
        if bound <= self._bound:
            return
        ring = self.ring
        while self._pending and self._pending[0][0] <= bound:
            phi, _, item = heapq.heappop(self._pending)
            if item[0] == "rel":
                p = item[1]
            else:
                i, j = item[1], item[2]
                (la, pa), (lb, pb) = self._gb[i], self._gb[j]
                l = ring.lcm(la, lb)
                p = add((m + l - la for m in pa), (m + l - lb for m in pb))
            p = self._reduce(p)
            if not p:
                continue
            lt = max(p)
            k = len(self._gb)
            tail = p - {lt}
            # cached normal forms and bases stay valid: a new basis element
            # has order weight above everything already reduced
            self._gb.append((lt, frozenset(tail)))
            for i, (lo, _) in enumerate(self._gb[:k]):
                if ring.coprime(lo, lt):
                    continue
                self._push(ring.phi(ring.lcm(lo, lt)), ("pair", i, k))
        self._bound = bound

    @property
    def groebner_basis(self) -> list[frozenset]:
        return [frozenset({lt}) | tail for lt, tail in self._gb]

    def leading_terms(self) -> list[int]:
        return [lt for lt, _ in self._gb]

    def _find_divisor(self, m: int):
        ring = self.ring
        g = ring.guard
        for lt, tail in self._gb:
            if ((m | g) - lt) & g == g:
                return lt, tail
        return None

    def _reduce(self, p: Iterable[int]) -> frozenset:
        live: set[int] = set(p)
        heap = [-m for m in live]
        heapq.heapify(heap)
        out: set[int] = set()
        cache = self._nf_cache
        while heap:
            m = -heapq.heappop(heap)
            if m not in live:
                continue
            live.remove(m)
            hit = cache.get(m)
            if hit is not None:
                out.symmetric_difference_update(hit)
                continue
            div = self._find_divisor(m)
            if div is None:
                _toggle(out, m)
                continue
            lt, tail = div
            q = m - lt
            for t in tail:
                c = q + t
                if c in live:
                    live.remove(c)
                else:
                    live.add(c)
                    heapq.heappush(heap, -c)
        return frozenset(out)

    def normal_form(self, p: Iterable[int], box: TriDegreeBox | None = None) -> frozenset:
        p = frozenset(p)
        if not p:
            return ZERO
        ring = self.ring
        if not ring.is_homogeneous(p):
            raise ContractError("normal_form expects a homogeneous polynomial")
        d = ring.degree(next(iter(p)))
        if box is not None and not box.contains(d):
            raise TruncationError(f"tridegree {d} outside box")
        self.ensure(ring.phi(max(p)))
        return self._reduce(p)

    def nf_monomial(self, m: int) -> frozenset:
        hit = self._nf_cache.get(m)
        if hit is None:
            self.ensure(self.ring.phi(m))
            hit = self._reduce((m,))
            if len(self._nf_cache) < 3_000_000:
                self._nf_cache[m] = hit
        return hit

    def nf_unchecked(self, p: Iterable[int]) -> frozenset:
        """Normal form for callers that already guarantee homogeneity."""
        out: set[int] = set()
        for m in p:
            out.symmetric_difference_update(self.nf_monomial(m))
        return frozenset(out)

    # -- bases ------------------------------------------------------------
    def basis(self, d: TriDegree, among: Sequence[int] | None = None) -> list[int]:
        """Standard monomials of tridegree d (descending)."""
        key = (d, None if among is None else tuple(among))
        hit = self._basis_cache.get(key)
        if hit is not None:
            return hit
        ring = self.ring
        self.ensure(ring.order_weight(d))
        lts = [lt for lt, _ in self._gb]
        g = ring.guard
        out = []
        for m in ring.monomials(d, among):
            for lt in lts:
                if ((m | g) - lt) & g == g:
                    break
            else:
                out.append(m)
        self._basis_cache[key] = out
        return out

    def graded_dim(self, d: TriDegree, box: TriDegreeBox | None = None) -> int:
        if box is not None and not box.contains(d):
            raise TruncationError(f"tridegree {d} outside box")
        return len(self.basis(d))


def normal_form(p: Iterable[int], pres: AlgebraPresentation, box: TriDegreeBox | None = None) -> frozenset:
    return pres.normal_form(p, box)


def graded_dim(pres: AlgebraPresentation, d: TriDegree, box: TriDegreeBox | None = None) -> int:
    return pres.graded_dim(d, box)


def quotient_dim_by_linear_algebra(pres: AlgebraPresentation, d: TriDegree) -> int:
    """dim of R/I in degree d as (#monomials) - rank(relation multiples).

    Independent of the Groebner machinery; used as a cross-check.
    """
    ring = pres.ring
    mons = ring.monomials(d)
    index = {m: i for i, m in enumerate(mons)}
    vectors = []
    for r in pres.relations:
        rd = ring.degree(next(iter(r)))
        diff = d - rd
        for q in ring.monomials(diff):
            v = 0
            for m in r:
                v ^= 1 << index[q + m]
            vectors.append(v)
    return len(mons) - rank_of(vectors)


# ---------------------------------------------------------------------------
# GF(2) linear algebra on int bitsets


class EchelonBasis:
    """Incremental row-echelon basis keyed by the highest set bit."""

    __slots__ = ("pivots", "combos", "track")

    def __init__(self, track: bool = False):
        self.pivots: dict[int, int] = {}
        self.combos: dict[int, int] = {}
        self.track = track

    def reduce(self, v: int, combo: int = 0) -> tuple[int, int]:
        piv = self.pivots
        while v:
            h = v.bit_length() - 1
            p = piv.get(h)
            if p is None:
                break
            v ^= p
            if self.track:
                combo ^= self.combos[h]
        return v, combo

    def reduce_fully(self, v: int) -> int:
        out = 0
        piv = self.pivots
        while v:
            h = v.bit_length() - 1
            p = piv.get(h)
            if p is None:
                out |= 1 << h
                v ^= 1 << h
            else:
                v ^= p
        return out

    def add(self, v: int, combo: int = 0) -> bool:
        v, combo = self.reduce(v, combo)
        if not v:
            return False
        h = v.bit_length() - 1
        self.pivots[h] = v
        if self.track:
            self.combos[h] = combo
        return True

    def contains(self, v: int) -> bool:
        return self.reduce(v)[0] == 0

    def __len__(self) -> int:
        return len(self.pivots)


def rank_of(vectors: Iterable[int]) -> int:
    e = EchelonBasis()
    for v in vectors:
        e.add(v)
    return len(e)


@dataclass(frozen=True)
class BitMatrixF2:
    """Dense GF(2) matrix stored by columns; column j is a bitmask over rows."""

    nrows: int
    columns: tuple[int, ...]
    row_labels: tuple = ()
    col_labels: tuple = ()

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "BitMatrixF2":
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        cols = []
        for j in range(ncols):
            c = 0
            for i in range(nrows):
                if rows[i][j] & 1:
                    c |= 1 << i
            cols.append(c)
        return cls(nrows, tuple(cols))

    @classmethod
    def identity(cls, n: int) -> "BitMatrixF2":
        return cls(n, tuple(1 << i for i in range(n)))

    @classmethod
    def zero(cls, nrows: int, ncols: int) -> "BitMatrixF2":
        return cls(nrows, (0,) * ncols)

    @property
    def ncols(self) -> int:
        return len(self.columns)

    def rows(self) -> list[list[int]]:
        return [[(c >> i) & 1 for c in self.columns] for i in range(self.nrows)]

    def apply(self, v: int) -> int:
        out = 0
        j = 0
        while v:
            if v & 1:
                out ^= self.columns[j]
            v >>= 1
            j += 1
        return out

    def transpose(self) -> "BitMatrixF2":
        rows = []
        for i in range(self.nrows):
            r = 0
            for j, c in enumerate(self.columns):
                if (c >> i) & 1:
                    r |= 1 << j
            rows.append(r)
        return BitMatrixF2(self.ncols, tuple(rows), self.col_labels, self.row_labels)

    def rank(self) -> int:
        return rank_of(self.columns)

    def kernel_basis(self) -> list[int]:
        e = EchelonBasis(track=True)
        kernel = []
        for j, c in enumerate(self.columns):
            v, combo = e.reduce(c, 1 << j)
            if v:
                e.pivots[v.bit_length() - 1] = v
                e.combos[v.bit_length() - 1] = combo
            else:
                kernel.append(combo)
        return _reduced_echelon(kernel)

    def image_basis(self) -> list[int]:
        return _reduced_echelon(self.columns)


def _reduced_echelon(vectors: Iterable[int]) -> list[int]:
    """Canonical reduced echelon basis of the span, sorted by pivot (descending)."""
    e = EchelonBasis()
    for v in vectors:
        e.add(v)
    pivots = sorted(e.pivots, reverse=True)
    rows = {h: e.pivots[h] for h in pivots}
    for h in pivots:
        for h2 in pivots:
            if h2 != h and (rows[h2] >> h) & 1:
                rows[h2] ^= rows[h]
    return [rows[h] for h in pivots]


def kernel_basis(m: BitMatrixF2) -> list[int]:
    return m.kernel_basis()


def image_basis(m: BitMatrixF2) -> list[int]:
    return m.image_basis()


def reduced_echelon(vectors: Iterable[int]) -> list[int]:
    return _reduced_echelon(vectors)
