"""JSON/TSV emitters and page dumps shared by the CLI and the tests."""

from __future__ import annotations

import dataclasses
import io
import json
from typing import Any, Iterable

from . import hsss
from .dga import PresentedDGA
from .f2core import AlgebraPresentation, EchelonBasis, TriDegree, TriDegreeBox


def jsonable(obj: Any) -> Any:
    """Plain JSON data with a stable layout (sets sorted, tridegrees as lists)."""
    if isinstance(obj, TriDegree):
        return list(obj.as_tuple())
    if hasattr(obj, "as_dict") and callable(obj.as_dict):
        return jsonable(obj.as_dict())
    if isinstance(obj, dict):
        return {_key(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted((jsonable(x) for x in obj), key=lambda x: json.dumps(x, sort_keys=True))
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return jsonable(dataclasses.asdict(obj))
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    return str(obj)


def _key(k: Any) -> str:
    if isinstance(k, TriDegree):
        return ",".join(map(str, k.as_tuple()))
    if isinstance(k, tuple):
        return ",".join(map(str, k))
    return str(k)


def dumps(obj: Any) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def tsv(header: Iterable[str], rows: Iterable[Iterable[Any]]) -> str:
    out = io.StringIO()
    out.write("\t".join(header) + "\n")
    for r in rows:
        out.write("\t".join("" if x is None else str(x) for x in r) + "\n")
    return out.getvalue()


# ---------------------------------------------------------------------------
# page dumps for the motivic spectral sequence


def dga_page(dga: PresentedDGA, box: TriDegreeBox, name: str) -> dict:
    """Chain dims of a page and the rank of its differential out of each tridegree."""
    rows = []
    for d in hsss.box_tridegrees(dga.ring, box):
        n = dga.chain_dim(d)
        if not n:
            continue
        phi = dga.ring.order_weight(d)
        rank = sum(dga.matrix(d - deg).rank for deg, _ in dga.inert_monomials(phi))
        rows.append({"stem": d.stem, "weight": d.weight, "filtration": d.filtration,
                     "dim": n, "d_rank": rank})
    return {"page": name, "r": dga.r, "classes": rows}


def structure_lines(pres: AlgebraPresentation, degrees: Iterable[TriDegree], m: int) -> list[dict]:
    """Nonzero multiplication by rho^{2^i-1} v_i (i <= m) between the given tridegrees."""
    ring = pres.ring
    present = set(degrees)
    out = []
    for i in range(1, m + 1):
        name = f"v{i}"
        if name not in ring.index:
            continue
        label = (f"rho^{2 ** i - 1}*" if i > 1 else "rho*") + name
        elem = ring.parse(label)
        shift = ring.poly_degree(elem)
        for d in sorted(present, key=lambda t: t.as_tuple()):
            t = d + shift
            if t not in present:
                continue
            tindex = {x: j for j, x in enumerate(pres.basis(t))}
            ech = EchelonBasis()
            for x in pres.basis(d):
                v = 0
                for y in pres.normal_form(ring.mul((x,), elem)):
                    v ^= 1 << tindex[y]
                ech.add(v)
            if len(ech):
                out.append({"element": label, "page": "E2",
                            "source": d.as_tuple(), "target": t.as_tuple(), "rank": len(ech)})
    return out


def hsss_dump(run: hsss.SpectralSequenceRun, basis_limit: int = 4000) -> dict:
    """Pages, verification reports and E_inf of a run; no timings."""
    pages = [dga_page(dga, run.box, name) for name, dga in run.extras.get("dgas", [])]
    einf_rows = []
    total = sum(run.einf.values())
    for d in sorted(run.einf, key=lambda t: t.as_tuple()):
        row = {"stem": d.stem, "weight": d.weight, "filtration": d.filtration, "dim": run.einf[d]}
        if total <= basis_limit:
            row["basis"] = run.einf_basis(d)
        einf_rows.append(row)
    pages.append({"page": f"E{run.einf_page}", "r": None, "classes": einf_rows, "einf": True})
    lines = []
    dgas = dict(run.extras.get("dgas", []))
    if "E2" in dgas:
        first = pages[0]["classes"]
        lines = structure_lines(dgas["E2"].pres, (TriDegree(c["stem"], c["weight"], c["filtration"])
                                                  for c in first if c["weight"] == 0), run.m)
    return {
        "pipeline": "hsss",
        "m": run.m,
        "box": {"max_stem": run.box.max_stem, "weight": [run.box.w_lo, run.box.w_hi]},
        "ok": run.ok,
        "verification": [p.verification.as_dict() if p.verification else {"name": p.name, "ok": None}
                         for p in run.pages],
        "pages": pages,
        "structure_lines": lines,
        "potential_differentials": run.potential_differentials,
    }


def page_rows(dump: dict) -> list[list]:
    rows = []
    for page in dump.get("pages", []):
        for c in page.get("classes", page.get("degrees", [])):
            if "stem" in c:
                rows.append([page["page"], c["stem"], c["weight"], c["filtration"], c["dim"],
                             c.get("d_rank", "")])
            else:
                rows.append([page["page"], c["a"] + c["b"], c["b"], c["s"], c["dim"], ""])
    return rows


PAGE_HEADER = ("page", "stem", "weight", "filtration", "dim", "d_rank")
