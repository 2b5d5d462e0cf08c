"""Verification suites run by ``hsslice verify`` and by the acceptance tests.

Each check returns a dict with an ``ok`` flag plus deterministic details
(no timings), so a suite report is byte-stable across thread counts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from . import arithsq, bockstein, comodule, equivariant, hsss, steenrod
from .f2core import TriDegree


@dataclass
class Context:
    """Memo shared by the checks of one suite run."""

    threads: int = 1
    cache: dict = field(default_factory=dict)

    def get(self, key: str, make: Callable):
        if key not in self.cache:
            self.cache[key] = make()
        return self.cache[key]

    def run(self, m: int) -> hsss.SpectralSequenceRun:
        return self.get(f"run{m}", lambda: hsss.run_hsss(m, threads=self.threads))

    def bockstein(self, m: int) -> bockstein.BocksteinRun:
        return self.get(f"bockstein{m}", lambda: bockstein.run_bockstein(m, threads=self.threads))

    def equivariant(self) -> equivariant.EquivariantRun:
        return self.get("kR", lambda: equivariant.run_equivariant_kR(threads=self.threads))


@dataclass
class Check:
    key: str
    label: str
    fn: Callable[[Context], dict]


# ---------------------------------------------------------------------------
# steenrod


def hopf_identities(ctx: Context) -> dict:
    XI = steenrod.XI
    coassoc = [n for n in range(1, 9) if not steenrod.coassociativity_holds(steenrod.xi(n))]
    mixed = [XI.mono_str(m) for d in range(1, 16) for m in XI.monomials(TriDegree(d, 0, 0))
             if not steenrod.coassociativity_holds({m})]
    antipode = [n for n in range(1, 9) if not steenrod.antipode_identity_holds(n)]
    c2 = steenrod.conjugate_poly(2) == XI.parse("xi2 + xi1^3")
    c3 = steenrod.conjugate_poly(3) == XI.parse("xi3 + xi1*xi2^2 + xi1^4*xi2 + xi1^7")
    return {"ok": not coassoc and not mixed and not antipode and c2 and c3,
            "coassociativity_failures": coassoc, "monomial_coassociativity_failures": mixed,
            "antipode_failures": antipode, "conjugate_2": XI.poly_str(steenrod.conjugate_poly(2)),
            "conjugate_3": XI.poly_str(steenrod.conjugate_poly(3)),
            "conjugate_2_ok": c2, "conjugate_3_ok": c3}


def cap_kernels(ctx: Context) -> dict:
    bad = [[m, d] for m in (1, 2, 3) for d in range(49) if not steenrod.cap_kernel_matches(m, d)]
    return {"ok": not bad, "heights": [1, 2, 3], "max_degree": 48, "failures": bad}


def generator_differentials(ctx: Context) -> dict:
    return hsss.generator_differentials_check(3)


# ---------------------------------------------------------------------------
# runs by height


def run_pages(m: int) -> Callable[[Context], dict]:
    def check(ctx: Context) -> dict:
        run = ctx.run(m)
        return {"ok": run.ok, "einf_page": run.einf_page, "classes": sum(run.einf.values()),
                "box": [run.box.max_stem, run.box.w_lo, run.box.w_hi],
                "pages": [p.verification.as_dict() if p.verification else {"name": p.name}
                          for p in run.pages]}
    return check


def collapse(m: int) -> Callable[[Context], dict]:
    """No pair of nonzero E_inf tridegrees in the box is joined by a later odd d_r."""
    def check(ctx: Context) -> dict:
        run = ctx.run(m)
        cands = run.potential_differentials
        return {"ok": not cands, "einf_page": run.einf_page, "candidates": cands,
                "pages": sorted({c["page"] for c in cands})}
    return check


def weight0_cotensor(ctx: Context) -> dict:
    run = ctx.run(1)
    got = run.weight0_dims()
    want = hsss.cotensor_dims(1, 32)
    bad = [s for s in range(33) if got.get(s, 0) != want[s]]
    return {"ok": not bad, "max_stem": 32, "mismatched_stems": bad,
            "dims": [got.get(s, 0) for s in range(33)]}


def edge_row(m: int) -> Callable[[Context], dict]:
    def check(ctx: Context) -> dict:
        run = ctx.run(m)
        bad = []
        for s in range(run.box.max_stem + 1):
            want = [frozenset({x}) for x in steenrod.cotensor_basis(m, s)]
            if not steenrod.same_span(run.edge_row(s), want):
                bad.append(s)
        lifts = arithsq.edge_lift_report(m)
        return {"ok": not bad and lifts["all_members"], "row_mismatches": bad,
                "max_stem": run.box.max_stem, "lift_witnesses": lifts["rows"]}
    return check


def localized(m: int) -> Callable[[Context], dict]:
    def check(ctx: Context) -> dict:
        run = hsss.localized_run(m, threads=ctx.threads)
        pages = run.extras["pages"]
        expected = [2 ** (k + 1) - 1 for k in range(1, m + 1)]
        return {"ok": run.ok and pages == expected and run.extras["abutment_matches"],
                "differential_pages": pages, "expected_pages": expected,
                "abutment_matches": run.extras["abutment_matches"]}
    return check


def tmf03_decomposition(ctx: Context) -> dict:
    run = ctx.run(2)
    M = ctx.get("M2", lambda: comodule.extract_weight0_comodule(2))
    c = comodule.convolution_check(2, run.weight0_dims(), M, run.box.max_stem)
    return {"ok": c["ok"], "first_failure": c["first_failure"], "max_stem": run.box.max_stem}


def m2_list(ctx: Context) -> dict:
    dims = hsss.m_dims_by_stem(2)
    stems = sorted(s for s, n in dims.items() for _ in range(n))
    prods = hsss.m_products(2)
    want = [0, 4, 6, 7, 8, 10, 11, 12, 13, 14]
    return {"ok": stems == want and not prods["nonzero"], "stems": stems, "expected": want,
            "basis": [hsss.m_presentation(2).ring.mono_str(x) for d, b in
                      sorted(hsss.m_basis(2).items(), key=lambda t: t[0].as_tuple()) for x in b],
            "pairs_tested": prods["pairs"], "nonzero_products": prods["nonzero"]}


def leibniz(m: int) -> Callable[[Context], dict]:
    def check(ctx: Context) -> dict:
        r = hsss.leibniz_products_check(m)
        r["ok"] = r["all_match"] and r["square_differential_zero"]
        return r
    return check


def bockstein_route(m: int) -> Callable[[Context], dict]:
    def check(ctx: Context) -> dict:
        run = ctx.bockstein(m)
        d = run.as_dict()
        d["ok"] = run.ok
        return d
    return check


def annihilators(m: int) -> Callable[[Context], dict]:
    def check(ctx: Context) -> dict:
        claims = bockstein.annihilator_claims(40, heights=(m,))
        trivial = [r for r in bockstein.trivial_annihilators(40) if f"v{m}" in r.element]
        return {"ok": all(r.ok for r in claims + trivial), "max_stem": 40,
                "claims": [r.as_dict() for r in claims], "trivial": [r.as_dict() for r in trivial]}
    return check


def dual_module(ctx: Context) -> dict:
    M = ctx.get("M2", lambda: comodule.extract_weight0_comodule(2))
    return comodule.n_module_check(M)


def m3_dimension(ctx: Context) -> dict:
    dims = hsss.m_dims_by_stem(3)
    total = sum(dims.values())
    return {"ok": total == 165, "dimension": total, "expected": 165,
            "by_stem": {str(s): n for s, n in sorted(dims.items())}}


def d23_target(ctx: Context) -> dict:
    r = hsss.d23_check()
    r["ok"] = r["empty"] and r["source_is_cycle"]
    return r


# ---------------------------------------------------------------------------
# arithmetic square


def boundary_check(ctx: Context) -> dict:
    r = arithsq.boundary_injectivity(40)
    r["ok"] = r["injective"]
    return r


def low_homology(ctx: Context) -> dict:
    t = arithsq.homology_table(2)
    return {"ok": t == {0: 1, 1: 0, 2: 0}, "H": {str(j): n for j, n in t.items()}}


def leading_terms(ctx: Context) -> dict:
    r = arithsq.leading_term_injectivity(30)
    return {"ok": r["holds"], "max_degree": 30, "counterexamples": r["counterexamples"]}


def square_vs_ss(ctx: Context) -> dict:
    r = arithsq.crosscheck_vs_hsss(20)
    r["ok"] = r["agree"]
    return r


def motivic_bookkeeping(ctx: Context) -> dict:
    return arithsq.motivic_consistency()


# ---------------------------------------------------------------------------
# equivariant


def kr_forced(ctx: Context) -> dict:
    f = ctx.equivariant().forced
    return dict(f, ok=f["unique_w"])


def kr_e6(ctx: Context) -> dict:
    run = ctx.equivariant()
    bad = [c.as_dict() for c in run.slices if c.failures]
    rel = run.relations
    return {"ok": not bad and all(rel.values()) and run.generators["ok"],
            "box": run.box.as_dict(), "degrees": len(run.slices),
            "E6_classes": sum(c.dim_e6 for c in run.slices), "failing_degrees": bad,
            "relations": rel, "generators": run.generators}


def kr_z_gaps(ctx: Context) -> dict:
    gaps = ctx.equivariant().z_gaps
    return {"ok": all(r["ok"] for r in gaps.values()), "z": {str(m): r for m, r in sorted(gaps.items())}}


def kr_v1(ctx: Context) -> dict:
    return ctx.equivariant().v1


def kr_motivic(ctx: Context) -> dict:
    m = ctx.equivariant().motivic
    return dict(m, ok=not m["mismatches"])


# ---------------------------------------------------------------------------
# catalog


SUITES: dict[str, list[Check]] = {
    "steenrod": [
        Check("hopf", "Hopf identities of the dual Steenrod algebra through xi_8", hopf_identities),
        Check("cap-kernel", "kernel of capping with Sq^(2^m) is the next cotensor algebra", cap_kernels),
        Check("generator-d", "closed formula reproduces the nine generator differentials",
              generator_differentials),
    ],
    "m1": [
        Check("pages", "height 1: E4 presentation verified", run_pages(1)),
        Check("collapse", "height 1: no later differential is possible in the box", collapse(1)),
        Check("weight0", "height 1: weight-0 E_inf has the dimensions of H_*ko", weight0_cotensor),
        Check("edge", "height 1: edge row and lift witnesses", edge_row(1)),
        Check("localized", "height 1: rho-inverted page pattern and abutment", localized(1)),
    ],
    "m2": [
        Check("pages", "height 2: E8 presentation verified", run_pages(2)),
        Check("collapse", "height 2: no later differential is possible in the box", collapse(2)),
        Check("tmf03", "H_*tmf0(3) decomposition of the weight-0 E_inf", tmf03_decomposition),
        Check("M2", "M_2 has ten classes and a square-zero augmentation ideal", m2_list),
        Check("leibniz", "height 2: d7 product list", leibniz(2)),
        Check("bockstein", "height 2: rho-Bockstein route agrees with direct homology",
              bockstein_route(2)),
        Check("annihilators", "height 2: annihilator ideals on Bockstein pages", annihilators(2)),
        Check("dual", "shifted dual of the reduced M_2 as a module over A(2)", dual_module),
        Check("edge", "height 2: edge row and lift witnesses", edge_row(2)),
        Check("localized", "height 2: rho-inverted page pattern and abutment", localized(2)),
    ],
    "m3": [
        Check("pages", "height 3: E16 presentation verified", run_pages(3)),
        Check("collapse", "height 3: no later differential is possible in the box", collapse(3)),
        Check("M3", "M_3 has dimension 165", m3_dimension),
        Check("d23", "d23 candidate target is empty on E16", d23_target),
        Check("leibniz", "height 3: d15 product list", leibniz(3)),
        Check("bockstein", "height 3: rho-Bockstein route agrees with direct homology",
              bockstein_route(3)),
        Check("annihilators", "height 3: annihilator ideals on Bockstein pages", annihilators(3)),
        Check("edge", "height 3: edge row and lift witnesses", edge_row(3)),
        Check("localized", "height 3: rho-inverted page pattern and abutment", localized(3)),
    ],
    "arithsq": [
        Check("boundary", "boundary map injective in positive degrees up to 40", boundary_check),
        Check("low", "H_0 = F_2 and H_1 = H_2 = 0", low_homology),
        Check("leading", "leading-term injectivity through degree 30", leading_terms),
        Check("crosscheck", "square homology against truncated height-infinity E_inf (conditional)",
              square_vs_ss),
        Check("motivic", "weight bookkeeping of the conjugate recursion", motivic_bookkeeping),
    ],
    "equivariant": [
        Check("d5", "d5(w) = v1^2 is the only differential that can kill v1^2", kr_forced),
        Check("E6", "E6 = E_inf agrees with the generators-and-relations description", kr_e6),
        Check("z-gap", "no class can receive a differential from z_m, m <= 4", kr_z_gaps),
        Check("v1", "v1 survives and v1^2 dies", kr_v1),
        Check("motivic", "E6 agrees with the motivic height-1 E_inf for b <= 0", kr_motivic),
    ],
}


def catalog() -> list[dict]:
    return [{"suite": name, "checks": [{"key": c.key, "label": c.label} for c in checks]}
            for name, checks in SUITES.items()]


def run_suite(name: str, threads: int = 1, only: list[str] | None = None,
              progress: Callable[[dict], None] | None = None) -> dict:
    if name not in SUITES:
        raise KeyError(name)
    ctx = Context(threads)
    results = []
    for c in SUITES[name]:
        if only and c.key not in only:
            continue
        details = c.fn(ctx)
        row = {"key": c.key, "label": c.label, "ok": bool(details.get("ok")), "details": details}
        results.append(row)
        if progress:
            progress(row)
    return {"suite": name, "ok": all(r["ok"] for r in results), "checks": results}
