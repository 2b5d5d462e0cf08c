"""The rho-Bockstein spectral sequence of a quotient page.

Filtering a page Q by powers of rho gives a spectral sequence whose E_0 is
the associated graded algebra: every relation is replaced by its part of
lowest rho exponent and the differential by its rho-preserving part.  The
page-k differential delta_k raises the rho exponent by k.

The delta schedule and the page presentations are inputs.  Each page is
checked against the homology of its predecessor with
:func:`hsslice.dga.verify_next_presentation`, using the rho exponent as an
extra grading, and the last page is compared with the homology of Q itself.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import gens as G
from . import hsss
from .dga import PresentedDGA, VerificationReport, verify_next_presentation
from .f2core import (AlgebraPresentation, ContractError, EchelonBasis, PolyRing, RingMap,
                     TriDegree, TriDegreeBox)

RHO = "rho"


def rho_exp(ring: PolyRing, m: int) -> int:
    return ring.exponent(m, RHO)


def leading_form(ring: PolyRing, p) -> frozenset:
    """Part of p of lowest rho exponent."""
    p = frozenset(p)
    if not p:
        return p
    low = min(rho_exp(ring, m) for m in p)
    return frozenset(m for m in p if rho_exp(ring, m) == low)


def rho_components(ring: PolyRing, p) -> dict[int, frozenset]:
    out: dict[int, set] = {}
    for m in p:
        out.setdefault(rho_exp(ring, m), set()).add(m)
    return {k: frozenset(v) for k, v in sorted(out.items())}


@dataclass
class RhoFilteredDGA:
    """A page together with its rho-adic filtration."""

    dga: PresentedDGA

    @property
    def ring(self) -> PolyRing:
        return self.dga.ring

    def associated_graded(self) -> AlgebraPresentation:
        ring = self.ring
        rels = [leading_form(ring, r) for r in self.dga.pres.relations]
        return AlgebraPresentation(ring, rels, f"gr {self.dga.name}")

    def filtration(self, m: int) -> int:
        return rho_exp(self.ring, m)

    def finite_in(self, box: TriDegreeBox) -> bool:
        """Only finitely many rho powers occur in each slice of the box."""
        return all(self.dga.chain_dim(d) < float("inf") for d in hsss.box_tridegrees(self.ring, box))


@dataclass(frozen=True)
class PageSpec:
    """A claimed Bockstein page: generators, relations, delta_k, projections."""

    k: int
    zetas: tuple
    tail_from: int
    xs: tuple
    relations: tuple
    delta: tuple = ()             # (generator name, value) pairs
    images: tuple = ()            # projections of new generators to the previous page

    def ring(self, vs: Sequence[int], phi_bound: int) -> PolyRing:
        return G.page_ring(list(self.zetas), self.xs, vs, max(phi_bound, 2), tail_from=self.tail_from)


@dataclass
class BocksteinPage:
    k: int
    presentation: AlgebraPresentation
    delta: dict
    dga: PresentedDGA | None = None
    verification: VerificationReport | None = None
    seconds: float = 0.0

    def as_dict(self) -> dict:
        ring = self.presentation.ring
        return {
            "page": self.k,
            "generators": [g.name if g.power == 1 else f"{g.name}^{g.power}" for g in ring.gens],
            "relations": [ring.poly_str(r) for r in self.presentation.relations],
            "delta": {g: ring.poly_str(ring.parse(v)) for g, v in self.delta.items()},
            "verification": None if self.verification is None else self.verification.as_dict(),
        }


@dataclass
class BocksteinRun:
    name: str
    box: TriDegreeBox
    pages: list = field(default_factory=list)
    e0_matches_print: bool = True
    delta_mismatches: list = field(default_factory=list)
    collapse: dict = field(default_factory=dict)
    route: dict = field(default_factory=dict)

    @property
    def final(self) -> BocksteinPage:
        return self.pages[-1]

    @property
    def ok(self) -> bool:
        return (self.e0_matches_print and not self.delta_mismatches
                and all(p.verification is None or p.verification.ok for p in self.pages)
                and self.collapse.get("ok", True) and self.route.get("ok", True))

    def as_dict(self) -> dict:
        return {"name": self.name, "box": [self.box.max_stem, self.box.w_lo, self.box.w_hi],
                "ok": self.ok, "e0_matches_print": self.e0_matches_print,
                "delta_mismatches": self.delta_mismatches, "collapse": self.collapse,
                "route": {k: v for k, v in self.route.items() if k != "dims"},
                "pages": [p.as_dict() for p in self.pages]}


# ---------------------------------------------------------------------------
# schedules


M2_SCHEDULE = (
    PageSpec(0, ((1, 4), (2, 2)), 3, (1, 2),
             ("x2^2 + x1^2*zeta1^4",),
             delta=(("zeta3", "x1^3*v2"),)),
    PageSpec(1, ((1, 4), (2, 2), (3, 2)), 4, (1, 2),
             ("x2^2 + x1^2*zeta1^4", "x1^3*v2"),
             delta=(("zeta2", "rho*x1^2*v2"),)),
    PageSpec(3, ((1, 4), (2, 4), (3, 2)), 4, (1, 2, 3),
             ("x3^2 + x2^2*zeta1^8 + x1^2*zeta2^4", "x2^2 + x1^2*zeta1^4", "x1^3*v2",
              "rho*x1^2*v2", "x1^2*x3*v2 + x2^3*v2"),
             delta=(("zeta1", "rho^3*v2"),),
             images=(("x3", "x1*zeta2^2 + x2*zeta1^4"),)),
    PageSpec(4, ((1, 8), (2, 4), (3, 2)), 4, (1, 2, 3),
             ("x3^2 + x2^2*zeta1^8 + x1^2*zeta2^4", "x2^4 + x1^4*zeta1^8", "x1^3*v2",
              "rho*x1^2*v2", "rho^3*v2", "x1^2*x3*v2 + x2^3*v2",
              "x2^2*x3*v2 + zeta1^8*x1^2*x2*v2", "x2^2*rho*v2", "x1*x2^2*v2")),
)

_M3_BASE = ("x2^4 + zeta1^8*x1^4", "x3^2 + zeta1^8*x2^2 + zeta2^4*x1^2")
_M3_X4 = "x4^2 + x1^2*zeta3^4 + x2^2*zeta2^8 + x3^2*zeta1^16"
_M3_E3_EXTRA = ("x1^7*v3", "x2^7*v3 + x1^6*x4*v3 + x1^4*x2*x3^2*v3 + x1^2*x2^4*x3*v3", "rho*x1^6*v3")
_M3_E7_EXTRA = ("rho^3*x1^4*v3", "x1^5*x3^2*v3 + x1*x2^6*v3", "rho*x1^4*x3^2*v3 + rho*x2^6*v3",
                "x1^4*x3^2*x4*v3 + x2^6*x4*v3 + x2^4*x3^3*v3 + x1^4*x2^2*x3*zeta1^16*v3"
                " + x1^6*x2*zeta2^8*v3")


def _m3_e8_relations() -> tuple:
    """Lowest-rho parts of the corrected E_16 relations (the page is rho-graded)."""
    ring = hsss.ker_d15_presentation(200).ring
    rels = hsss.KER_D15_RELATIONS + [value for _, value in hsss.D15_PRODUCTS]
    return tuple(ring.poly_str(leading_form(ring, ring.parse(r))) for r in rels)


def m3_schedule() -> tuple:
    return (
        PageSpec(0, ((1, 8), (2, 4), (3, 2)), 4, (1, 2, 3), _M3_BASE,
                 delta=(("zeta4", "x1^7*v3"),)),
        PageSpec(1, ((1, 8), (2, 4), (3, 2), (4, 2)), 5, (1, 2, 3), _M3_BASE + ("x1^7*v3",),
                 delta=(("zeta3", "rho*x1^6*v3"),)),
        PageSpec(3, ((1, 8), (2, 4), (3, 4), (4, 2)), 5, (1, 2, 3, 4),
                 _M3_BASE + (_M3_X4,) + _M3_E3_EXTRA,
                 delta=(("zeta2", "rho^3*x1^4*v3"),),
                 images=(("x4", "x1*zeta3^2 + x2*zeta2^4 + x3*zeta1^8"),)),
        PageSpec(7, ((1, 8), (2, 8), (3, 4), (4, 2)), 5, (1, 2, 3, 4),
                 ("x2^4 + zeta1^8*x1^4", "x3^4 + zeta1^16*x2^4 + zeta2^8*x1^4", _M3_X4)
                 + _M3_E3_EXTRA + _M3_E7_EXTRA,
                 delta=(("zeta1", "rho^7*v3"),)),
        PageSpec(8, ((1, 16), (2, 8), (3, 4), (4, 2)), 5, (1, 2, 3, 4), _m3_e8_relations()),
    )


SCHEDULES = {2: lambda: M2_SCHEDULE, 3: m3_schedule}
LIFTS = {2: {"x3": hsss.X3_IN_Q2}, 3: {"x4": hsss.X4_IN_Q3}}
DEFAULT_BOXES = {2: TriDegreeBox(40, -8, 0), 3: TriDegreeBox(52, -6, 0)}


# ---------------------------------------------------------------------------
# the run


def _to_ring(src: PolyRing, dst: PolyRing, p) -> frozenset:
    """Move a polynomial between rings that share generator names."""
    return dst.parse(src.poly_str(p)) if p else frozenset()


def _delta_mismatch(target: PresentedDGA, page: AlgebraPresentation, gname: str, value: frozenset,
                    k: int) -> str | None:
    """delta_k(g) must be the first nonzero rho-component of d(g), modulo the page relations."""
    tring, pring = target.ring, page.ring
    g = pring.gens[pring.index[gname]]
    src = tring.gen(g.name, g.power)
    g0 = rho_exp(tring, src)
    for e, comp in rho_components(tring, target.leibniz_raw(src)).items():
        nf = page.normal_form(_to_ring(tring, pring, comp))
        if e - g0 < k:
            if nf:
                return f"d({g.name}^{g.power}) has a surviving rho^{e - g0} component"
        elif e - g0 == k:
            if nf != page.normal_form(value):
                return f"delta_{k}({g.name}^{g.power}) disagrees with d"
            return None
        else:
            break
    return None if not value else f"delta_{k}({g.name}^{g.power}) has no matching component of d"


def bockstein_run(target: PresentedDGA, schedule: Sequence[PageSpec], box: TriDegreeBox,
                  vs: Sequence[int], lifts: Mapping[str, str] | None = None,
                  threads: int = 1, strict: bool = True, name: str = "") -> BocksteinRun:
    """Verify a rho-Bockstein schedule converging to H(target) inside box."""
    run = BocksteinRun(name or f"rho-Bockstein for {target.name}", box)
    phi = hsss._phi(box)
    filtered = RhoFilteredDGA(target)
    gr = filtered.associated_graded()

    # E_0 is gr(target); compare with the claimed relations
    spec0 = schedule[0]
    ring0 = spec0.ring(vs, phi)
    if [g.name for g in ring0.gens] != [g.name for g in target.ring.gens]:
        raise ContractError("the E_0 page must have the generators of the target")
    claimed0 = AlgebraPresentation.from_strings(target.ring, spec0.relations, "E0")
    run.e0_matches_print = (all(not gr.normal_form(r) for r in claimed0.relations)
                            and all(not claimed0.normal_form(r) for r in gr.relations))
    pres = AlgebraPresentation(target.ring, gr.relations, "E0")

    for idx, spec in enumerate(schedule):
        if idx:
            ring = spec.ring(vs, phi)
            pres = AlgebraPresentation.from_strings(ring, spec.relations, f"E{spec.k}")
        page = BocksteinPage(spec.k, pres, dict(spec.delta))
        run.pages.append(page)
        if idx + 1 == len(schedule):
            break
        for gname, value in spec.delta:
            bad = _delta_mismatch(target, pres, gname, pres.ring.parse(value), spec.k)
            if bad:
                run.delta_mismatches.append(bad)
        page.dga = PresentedDGA(pres, target.r, dict(spec.delta), f"E{spec.k}",
                                grading=RHO, grading_shift=spec.k)
        failures = page.dga.well_definedness_failures()
        if failures:
            raise ContractError(f"E{spec.k}: {failures[0]}")
        nxt = schedule[idx + 1]
        nring = nxt.ring(vs, phi)
        npres = AlgebraPresentation.from_strings(nring, nxt.relations, f"E{nxt.k}")
        t = time.perf_counter()
        page.verification = verify_next_presentation(
            page.dga, npres, dict(nxt.images), box, name=f"E{nxt.k} = H(E{spec.k}, delta_{spec.k})",
            strict=strict, threads=threads)
        page.seconds = time.perf_counter() - t
    projections = {g: v for spec in schedule for g, v in spec.images}
    run.collapse = collapse_check(target, run.final.presentation, lifts or {}, projections)
    return run


def collapse_check(target: PresentedDGA, final: AlgebraPresentation, lifts: Mapping[str, str],
                   projections: Mapping[str, str] | None = None) -> dict:
    """Every generator of the last page lifts to a cycle of the target with the right leading form.

    A generator introduced as a projection (such as x3 = x1*zeta2^2 + x2*zeta1^4)
    must be the lowest rho part of its lift.
    """
    projections = projections or {}
    tring, fring = target.ring, final.ring
    gr = RhoFilteredDGA(target).associated_graded()
    rows = []
    for g in fring.gens:
        mono = fring.gen(g.name, g.power)
        if g.name in lifts:
            lift = tring.parse(lifts[g.name])
        else:
            lift = frozenset({tring.gen(g.name, g.power)})
        cycle = not target.d(lift)
        lead = gr.normal_form(leading_form(tring, lift))
        if g.name in projections:
            image = tring.parse(projections[g.name])
        elif g.name in lifts:
            image = None
        else:
            image = _to_ring(fring, tring, frozenset({mono}))
        matches = bool(lead) if image is None else lead == gr.normal_form(image)
        rows.append({"generator": g.name if g.power == 1 else f"{g.name}^{g.power}",
                     "lift": tring.poly_str(lift), "cycle": cycle, "leading_form_ok": matches})
    return {"ok": all(r["cycle"] and r["leading_form_ok"] for r in rows), "generators": rows}


def route_agreement(run: BocksteinRun, target: PresentedDGA, threads: int = 1) -> dict:
    """Total dims of the last page against H(target), tridegree by tridegree."""
    final = run.final.presentation
    tds = hsss.box_tridegrees(target.ring, run.box)
    mismatches = []
    dims = {}
    for d in tds:
        a = len(final.basis(d))
        b = target.homology_dim(d)
        if a or b:
            dims[d] = b
        if a != b:
            mismatches.append({"tridegree": d.as_tuple(), "bockstein": a, "direct": b})
    out = {"ok": not mismatches, "tridegrees": len(tds), "classes": sum(dims.values()),
           "mismatches": mismatches, "dims": dims}
    run.route = out
    return out


def run_bockstein(m: int, box: TriDegreeBox | None = None, threads: int = 1,
                  strict: bool = True, route: bool = True) -> BocksteinRun:
    """The rho-Bockstein route for m = 2 (target E_7<2>/(v1)) or m = 3 (E_15<3>/(v1, v2))."""
    if m not in SCHEDULES:
        raise ContractError("the rho-Bockstein route is available for m = 2, 3")
    box = box or DEFAULT_BOXES[m]
    phi = hsss._phi(box)
    target = hsss.build_q(m, phi, grading=f"v{m}")
    run = bockstein_run(target, SCHEDULES[m](), box, vs=(m,), lifts=LIFTS[m], threads=threads,
                        strict=strict, name=f"rho-Bockstein <{m}>")
    if route:
        route_agreement(run, target, threads)
    return run


# ---------------------------------------------------------------------------
# annihilators


@dataclass
class AnnihilatorReport:
    page: str
    element: str
    ideal: list
    ok: bool = True
    degrees_checked: int = 0
    witnesses: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"page": self.page, "element": self.element, "ideal": self.ideal, "ok": self.ok,
                "degrees_checked": self.degrees_checked, "witnesses": self.witnesses[:10]}


def annihilator_check(page: AlgebraPresentation, element: str, ideal: Sequence[str],
                      box: TriDegreeBox) -> AnnihilatorReport:
    """Compare {q : q*element = 0} with the claimed ideal in every tridegree of box."""
    ring = page.ring
    e = page.normal_form(ring.parse(element))
    gens = [ring.parse(g) for g in ideal]
    report = AnnihilatorReport(page.name, element, list(ideal))
    if not e:
        report.ok = False
        report.witnesses.append("the element is zero on this page")
        return report
    edeg = ring.poly_degree(e)
    for d in hsss.box_tridegrees(ring, box):
        basis = page.basis(d)
        if not basis:
            continue
        report.degrees_checked += 1
        index = {m: j for j, m in enumerate(basis)}
        tindex = {m: j for j, m in enumerate(page.basis(d + edeg))}
        # kernel of multiplication by e
        ech = EchelonBasis(track=True)
        kernel = EchelonBasis()
        for j, m in enumerate(basis):
            v = 0
            for t in page.nf_unchecked(ring.mul((m,), e)):
                v ^= 1 << tindex[t]
            v, combo = ech.reduce(v, 1 << j)
            if v:
                h = v.bit_length() - 1
                ech.pivots[h] = v
                ech.combos[h] = combo
            else:
                kernel.add(combo)
        # the claimed ideal in degree d
        ideal_span = EchelonBasis()
        for g in gens:
            gdeg = ring.poly_degree(g)
            for m in page.basis(d - gdeg):
                v = 0
                for t in page.nf_unchecked(ring.mul((m,), g)):
                    v ^= 1 << index[t]
                ideal_span.add(v)
        joint = EchelonBasis()
        for v in kernel.pivots.values():
            joint.add(v)
        outside = sum(joint.add(v) for v in ideal_span.pivots.values())
        if outside or len(kernel) != len(ideal_span):
            report.ok = False
            report.witnesses.append({"tridegree": d.as_tuple(), "annihilator": len(kernel),
                                     "ideal": len(ideal_span), "ideal_not_in_annihilator": outside})
    return report


def _page_presentation(m: int, k: int, phi_bound: int) -> AlgebraPresentation:
    for spec in SCHEDULES[m]():
        if spec.k == k:
            ring = spec.ring((m,), phi_bound)
            if k == 0:
                return RhoFilteredDGA(hsss.build_q(m, phi_bound)).associated_graded()
            return AlgebraPresentation.from_strings(ring, spec.relations, f"E{k}<{m}>")
    raise ContractError(f"no page E{k} in the <{m}> schedule")


# (m, page, element, ideal generators)
ANNIHILATOR_CLAIMS = [
    (2, 1, "rho*x1^2*v2", ["x1"]),
    (2, 3, "rho^3*v2", ["x1^2"]),
    (3, 3, "rho^3*x1^4*v3", ["x1^2"]),
    (3, 7, "rho^7*v3", ["x1^4"]),
]

# delta_0 values with trivial annihilator on E_0
TRIVIAL_ANNIHILATORS = [(2, 0, "x1^3*v2"), (3, 0, "x1^7*v3")]


def annihilator_claims(max_stem: int = 40, w_lo: int = -8, w_hi: int = 0,
                       heights: Sequence[int] = (2, 3)) -> list[AnnihilatorReport]:
    box = TriDegreeBox(max_stem, w_lo, w_hi)
    out = []
    for m, k, element, ideal in ANNIHILATOR_CLAIMS:
        if m not in heights:
            continue
        pres = _page_presentation(m, k, box.phi_bound() + 60)
        out.append(annihilator_check(pres, element, ideal, box))
    return out


def trivial_annihilators(max_stem: int = 40, w_lo: int = -8, w_hi: int = 0) -> list[AnnihilatorReport]:
    box = TriDegreeBox(max_stem, w_lo, w_hi)
    return [annihilator_check(_page_presentation(m, k, box.phi_bound() + 60), element, [], box)
            for m, k, element in TRIVIAL_ANNIHILATORS]
