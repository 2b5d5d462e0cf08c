"""Presented differential graded algebras over GF(2) and their homology.

A :class:`PresentedDGA` is a quotient ring R/I with a derivation given on
generators.  Homology is computed one tridegree at a time.  Generators
that carry no differential, occur in no relation and in no differential
value ("inert" generators) split off as a polynomial tensor factor, so the
homology of the whole algebra is the homology of the remaining core
tensored with a polynomial ring.  Only core slices are ever row-reduced.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .f2core import (AlgebraPresentation, ContractError, EchelonBasis, PolyRing, RingMap,
                     TriDegree, TriDegreeBox, _toggle)

Core = tuple  # tuple of generator indices


class VerificationError(RuntimeError):
    """A claimed page presentation failed verification."""

    def __init__(self, message: str, report: "VerificationReport | None" = None):
        super().__init__(message)
        self.report = report


@dataclass
class SliceMatrix:
    source: list[int]
    target_index: dict[int, int]
    columns: list[int]
    rank: int


class PresentedDGA:
    """R/I with a derivation of tridegree (-1, 0, r).

    ``grading`` names a generator whose exponent is an extra grading
    preserved by the relations; the differential raises it by
    ``grading_shift``.
    """

    def __init__(self, pres: AlgebraPresentation, r: int, delta: Mapping[str, object],
                 name: str = "", grading: str | None = None, grading_shift: int = 0):
        self.pres = pres
        self.ring: PolyRing = pres.ring
        self.r = r
        self.shift = TriDegree.page_shift(r)
        self.name = name or pres.name
        self.grading = grading
        self.grading_shift = grading_shift
        ring = self.ring
        self.images: list[frozenset] = [frozenset()] * ring.n
        for gname, value in delta.items():
            if gname not in ring.index:
                raise ContractError(f"differential on unknown generator {gname}")
            val = ring.parse(value) if isinstance(value, str) else frozenset(value)
            i = ring.index[gname]
            if val:
                deg = ring.poly_degree(val)
                if deg != ring.gens[i].degree + self.shift:
                    raise ContractError(f"d({gname}) has tridegree {deg}, expected "
                                        f"{ring.gens[i].degree + self.shift}")
                if grading is not None:
                    g0 = ring.exponent(ring.units[i], grading)
                    if any(ring.exponent(mm, grading) != g0 + grading_shift for mm in val):
                        raise ContractError(f"d({gname}) does not shift {grading} by {grading_shift}")
            self.images[i] = val
        used = set(pres.relation_generators)
        for i, val in enumerate(self.images):
            if val:
                used.add(ring.gens[i].name)
                for mm in val:
                    used.update(ring.support(mm))
        if grading is not None:
            used.add(grading)
        self.default_core: Core = tuple(i for i, g in enumerate(ring.gens) if g.name in used)
        self.inert: Core = tuple(i for i in range(ring.n) if i not in self.default_core)
        self._d_cache: dict[int, frozenset] = {}
        self._matrices: dict = {}
        self._boundaries: dict = {}

    # -- differential -----------------------------------------------------
    def leibniz_raw(self, m: int) -> frozenset:
        """Leibniz expansion of d(m) in the polynomial ring (no reduction)."""
        ring = self.ring
        out: set[int] = set()
        for i, e in enumerate(ring.exps(m)):
            if e & 1 and self.images[i]:
                rest = m - ring.units[i]
                for t in self.images[i]:
                    _toggle(out, rest + t)
        return frozenset(out)

    def d_monomial(self, m: int) -> frozenset:
        hit = self._d_cache.get(m)
        if hit is None:
            hit = self.pres.nf_unchecked(self.leibniz_raw(m))
            if len(self._d_cache) < 2_000_000:
                self._d_cache[m] = hit
        return hit

    def d(self, p: Iterable[int]) -> frozenset:
        out: set[int] = set()
        for m in p:
            out.symmetric_difference_update(self.d_monomial(m))
        return frozenset(out)

    def nf(self, p: Iterable[int]) -> frozenset:
        return self.pres.normal_form(p)

    def grade(self, m: int) -> int:
        return self.ring.exponent(m, self.grading) if self.grading else 0

    def well_definedness_failures(self) -> list[str]:
        """d(relation) in I and d(d(g)) = 0 for every generator."""
        ring = self.ring
        failures = []
        for rel in self.pres.relations:
            raw: set[int] = set()
            for m in rel:
                raw.symmetric_difference_update(self.leibniz_raw(m))
            if raw and self.pres.normal_form(raw):
                failures.append(f"d({ring.poly_str(rel)}) is not in the relation ideal")
            if self.grading is not None:
                if len({self.grade(m) for m in rel}) > 1:
                    failures.append(f"relation {ring.poly_str(rel)} is not {self.grading}-homogeneous")
        for i, g in enumerate(ring.gens):
            if self.images[i] and self.d(self.images[i]):
                failures.append(f"d(d({g.name}^{g.power})) != 0")
        return failures

    # -- core slices ------------------------------------------------------
    def core_basis(self, d: TriDegree, grade: int | None = None, core: Core | None = None) -> list[int]:
        core = self.default_core if core is None else core
        basis = self.pres.basis(d, among=core)
        if grade is not None and self.grading is not None:
            basis = [m for m in basis if self.grade(m) == grade]
        return basis

    def matrix(self, d: TriDegree, grade: int | None = None, core: Core | None = None) -> SliceMatrix:
        """Matrix of d_r out of the core slice (d, grade)."""
        core = self.default_core if core is None else core
        key = (core, d, grade)
        hit = self._matrices.get(key)
        if hit is not None:
            return hit
        source = self.core_basis(d, grade, core)
        tgrade = None if grade is None else grade + self.grading_shift
        target = self.core_basis(d + self.shift, tgrade, core)
        index = {m: j for j, m in enumerate(target)}
        cols = []
        ech = EchelonBasis()
        for m in source:
            v = 0
            for t in self.d_monomial(m):
                v ^= 1 << index[t]
            cols.append(v)
            ech.add(v)
        hit = SliceMatrix(source, index, cols, len(ech))
        self._matrices[key] = hit
        return hit

    def boundaries(self, d: TriDegree, grade: int | None = None, core: Core | None = None) -> EchelonBasis:
        core = self.default_core if core is None else core
        key = (core, d, grade)
        hit = self._boundaries.get(key)
        if hit is None:
            sgrade = None if grade is None else grade - self.grading_shift
            mat = self.matrix(d - self.shift, sgrade, core)
            hit = EchelonBasis()
            for c in mat.columns:
                hit.add(c)
            self._boundaries[key] = hit
        return hit

    def core_homology_dim(self, d: TriDegree, grade: int | None = None, core: Core | None = None) -> int:
        out = self.matrix(d, grade, core)
        sgrade = None if grade is None else grade - self.grading_shift
        inc = self.matrix(d - self.shift, sgrade, core)
        return len(out.source) - out.rank - inc.rank

    def core_homology_reps(self, d: TriDegree, grade: int | None = None,
                           core: Core | None = None) -> list[frozenset]:
        """Cycle representatives of a basis of core homology in slice (d, grade)."""
        mat = self.matrix(d, grade, core)
        bnd = self.boundaries(d, grade, core)
        ech = EchelonBasis(track=True)
        kernel = []
        for j, c in enumerate(mat.columns):
            v, combo = ech.reduce(c, 1 << j)
            if v:
                h = v.bit_length() - 1
                ech.pivots[h] = v
                ech.combos[h] = combo
            else:
                kernel.append(combo)
        # kernel vectors are in source coordinates, and the source basis of
        # slice d is the target basis of the incoming matrix
        src = mat.source
        index = {m: j for j, m in enumerate(src)}
        quotient = EchelonBasis()
        for c in bnd.pivots.values():
            quotient.add(c)
        reps = []
        for k in sorted(kernel, key=lambda k: (k.bit_length(), k), reverse=True):
            vec = 0
            for j in range(len(src)):
                if (k >> j) & 1:
                    vec ^= 1 << index[src[j]]
            if quotient.add(vec):
                reps.append(frozenset(src[j] for j in range(len(src)) if (k >> j) & 1))
        return reps

    # -- inert factor -----------------------------------------------------
    def inert_monomials(self, phi_bound: int, inert: Core | None = None) -> list[tuple[TriDegree, int]]:
        """Monomials in the inert generators with order weight <= phi_bound."""
        inert = self.inert if inert is None else inert
        ring = self.ring
        key = ("inert", inert, phi_bound)
        hit = self._matrices.get(key)
        if hit is not None:
            return hit
        out: list[tuple[TriDegree, int]] = []

        def rec(pos: int, m: int, phi: int):
            if pos == len(inert):
                out.append((ring.degree(m), m))
                return
            i = inert[pos]
            step = ring.gen_phi[i]
            e = 0
            while phi + e * step <= phi_bound:
                rec(pos + 1, m + e * ring.units[i], phi + e * step)
                e += 1

        rec(0, 0, 0)
        self._matrices[key] = out
        return out

    def homology_dim(self, d: TriDegree, grade: int | None = None) -> int:
        phi = self.ring.order_weight(d)
        if phi < 0:
            return 0
        total = 0
        for deg, _ in self.inert_monomials(phi):
            total += self.core_homology_dim(d - deg, grade)
        return total

    def chain_dim(self, d: TriDegree, grade: int | None = None) -> int:
        phi = self.ring.order_weight(d)
        if phi < 0:
            return 0
        return sum(len(self.core_basis(d - deg, grade)) for deg, _ in self.inert_monomials(phi))

    def homology_reps(self, d: TriDegree, grade: int | None = None) -> list[frozenset]:
        phi = self.ring.order_weight(d)
        if phi < 0:
            return []
        reps = []
        for deg, mu in self.inert_monomials(phi):
            for rep in self.core_homology_reps(d - deg, grade):
                reps.append(frozenset(m + mu for m in rep))
        return reps

    def filtrations(self, stem: int, weight: int) -> list[int]:
        """Filtrations at (stem, weight) where the chain complex can be nonzero."""
        return self.ring.filtrations(stem, weight)

    def grades(self, d: TriDegree, core: Core | None = None) -> list[int]:
        if self.grading is None:
            return [None]
        return sorted({self.grade(m) for m in self.core_basis(d, None, core)})


# ---------------------------------------------------------------------------
# Presentation verification


@dataclass
class VerificationReport:
    name: str
    ok: bool = True
    cycle_failures: list[str] = field(default_factory=list)
    relation_failures: list[str] = field(default_factory=list)
    dimension_failures: list[dict] = field(default_factory=list)
    surjectivity_failures: list[dict] = field(default_factory=list)
    slices_checked: int = 0
    classes_checked: int = 0

    def summary(self) -> str:
        state = "ok" if self.ok else "FAILED"
        return (f"{self.name}: {state} ({self.slices_checked} core slices, "
                f"{self.classes_checked} classes)")

    def as_dict(self) -> dict:
        return {"name": self.name, "ok": self.ok, "cycle_failures": self.cycle_failures,
                "relation_failures": self.relation_failures,
                "dimension_failures": self.dimension_failures,
                "surjectivity_failures": self.surjectivity_failures,
                "slices_checked": self.slices_checked, "classes_checked": self.classes_checked}


def _vector(p: Iterable[int], index: Mapping[int, int]) -> int:
    v = 0
    for m in p:
        v ^= 1 << index[m]
    return v


def box_slices(box: TriDegreeBox) -> Iterator[tuple[int, int]]:
    for w in range(box.w_hi, box.w_lo - 1, -1):
        for s in range(box.min_stem, box.max_stem + 1):
            yield s, w


def verify_next_presentation(prev: PresentedDGA, candidate: AlgebraPresentation,
                             images: Mapping[str, object], box: TriDegreeBox,
                             name: str = "", strict: bool = True,
                             threads: int = 1) -> VerificationReport:
    """Check that ``candidate`` presents H(prev) inside ``box``.

    (a) generator images are cycles, (b) relation images are boundaries,
    (c) graded dimensions agree, and the induced map hits every homology
    class.  Together these make the induced map an isomorphism in every
    tridegree of the box.
    """
    ring = prev.ring
    cring = candidate.ring
    parsed = {k: (ring.parse(v) if isinstance(v, str) else frozenset(v)) for k, v in images.items()}
    fmap = RingMap(cring, ring, parsed)
    report = VerificationReport(name or f"{candidate.name} vs H({prev.name})")

    for i, g in enumerate(cring.gens):
        img = fmap.images[i]
        if img and ring.poly_degree(img) != g.degree:
            report.cycle_failures.append(f"image of {g.name}^{g.power} has the wrong tridegree")
            continue
        if prev.grading is not None and img:
            gi = cring.exponent(cring.units[i], prev.grading) if prev.grading in cring.index else 0
            if any(prev.grade(m) != gi for m in img):
                report.cycle_failures.append(f"image of {g.name}^{g.power} breaks the {prev.grading} grading")
        if prev.d(img):
            report.cycle_failures.append(f"{g.name}^{g.power} does not map to a cycle")

    # inert splitting shared by both sides
    crel = candidate.relation_generators
    shared = []
    for i in prev.inert:
        g = ring.gens[i]
        j = cring.index.get(g.name)
        if j is None or cring.gens[j].power != g.power or g.name in crel:
            continue
        if fmap.images[j] != frozenset({ring.units[i]}):
            continue
        shared.append((i, j))
    inert_prev = tuple(i for i, _ in shared)
    prev_core = tuple(i for i in range(ring.n) if i not in inert_prev)
    inert_cand = tuple(j for _, j in shared)
    cand_core = tuple(j for j in range(cring.n) if j not in inert_cand)
    for j in cand_core:
        for m in fmap.images[j]:
            if any(ring.exps(m)[i] for i in inert_prev):
                raise ContractError(f"{cring.gens[j].name} maps outside the core")

    for rel in candidate.relations:
        img = ring_nf(prev, fmap(rel))
        if not img:
            continue
        d = ring.poly_degree(img)
        grade = prev.grade(next(iter(img))) if prev.grading else None
        index = {m: k for k, m in enumerate(prev.core_basis(d, grade, prev_core))}
        bnd = prev.boundaries(d, grade, prev_core)
        if not bnd.contains(_vector(img, index)):
            report.relation_failures.append(f"{cring.poly_str(rel)} is not a boundary")

    # core slices reached from the box
    needed: set[tuple[int, int]] = set()
    for s, w in box_slices(box):
        phi = ring.order_weight(TriDegree(s, w, 0))
        if phi < 0:
            continue
        for deg, _ in prev.inert_monomials(phi, inert_prev):
            needed.add((s - deg.stem, w - deg.weight))
    tasks = sorted(needed)

    def check(task):
        s, w = task
        if ring.order_weight(TriDegree(s, w, 0)) < 0:
            return [], [], 0, 0
        dims_bad, surj_bad = [], []
        nslices = nclasses = 0
        fs = set(ring.filtrations(s, w, prev_core)) | set(cring.filtrations(s, w, cand_core))
        for f in sorted(fs):
            d = TriDegree(s, w, f)
            grades = set(prev.grades(d, prev_core))
            if prev.grading is not None:
                grades |= {cring.exponent(m, prev.grading) if prev.grading in cring.index else 0
                           for m in candidate.basis(d, cand_core)}
            for grade in sorted(grades, key=lambda g: -1 if g is None else g):
                cbasis = candidate.basis(d, cand_core)
                if grade is not None:
                    gname = prev.grading
                    cbasis = [m for m in cbasis
                              if (cring.exponent(m, gname) if gname in cring.index else 0) == grade]
                hdim = prev.core_homology_dim(d, grade, prev_core)
                nslices += 1
                nclasses += hdim
                if hdim != len(cbasis):
                    dims_bad.append({"tridegree": d.as_tuple(), "grade": grade,
                                     "homology": hdim, "candidate": len(cbasis)})
                    continue
                if not hdim:
                    continue
                index = {m: k for k, m in enumerate(prev.core_basis(d, grade, prev_core))}
                bnd = prev.boundaries(d, grade, prev_core)
                ech = EchelonBasis()
                for c in bnd.pivots.values():
                    ech.add(c)
                before = len(ech)
                for m in cbasis:
                    ech.add(_vector(ring_nf(prev, fmap.of_monomial(m)), index))
                if len(ech) - before != hdim:
                    surj_bad.append({"tridegree": d.as_tuple(), "grade": grade,
                                     "rank": len(ech) - before, "homology": hdim})
        return dims_bad, surj_bad, nslices, nclasses

    for dims_bad, surj_bad, ns, nc in _run(check, tasks, threads):
        report.dimension_failures.extend(dims_bad)
        report.surjectivity_failures.extend(surj_bad)
        report.slices_checked += ns
        report.classes_checked += nc

    report.ok = not (report.cycle_failures or report.relation_failures
                     or report.dimension_failures or report.surjectivity_failures)
    if strict and not report.ok:
        raise VerificationError(report.summary() + "; first failure: " + _first_failure(report), report)
    return report


def _first_failure(report: VerificationReport) -> str:
    for bucket in (report.cycle_failures, report.relation_failures,
                   report.dimension_failures, report.surjectivity_failures):
        if bucket:
            return str(bucket[0])
    return ""


def ring_nf(dga: PresentedDGA, p: Iterable[int]) -> frozenset:
    return dga.pres.nf_unchecked(p)


def _run(fn, tasks: Sequence, threads: int):
    """Map fn over tasks, optionally on a thread pool; results keep task order."""
    if threads <= 1 or len(tasks) < 2:
        return [fn(t) for t in tasks]
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks))
