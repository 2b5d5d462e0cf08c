"""Command-line driver: ``hsslice compute | verify | chart | export``.

Exit codes: 0 pass, 1 verification failure, 2 usage error, 3 internal
invariant breach.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from . import arithsq, bockstein, equivariant, hsss, report, suites, svgchart
from .dga import VerificationError
from .f2core import ContractError, TriDegreeBox

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
PIPELINES = ("hsss", "bockstein", "arithsq", "equivariant")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Every CLI flag; a config file sets any of them as ``key = value``."""

    command: str | None = None
    m: int | None = None
    max_stem: int | None = None
    max_degree: int | None = None
    weight: str | None = None
    pipeline: str | None = None
    suite: str | None = None
    only: str | None = None
    format: str | None = None
    out: str | None = None
    input: str | None = None
    page: str | None = None
    threads: int | None = None
    vanishing_lines: bool | None = None
    structure_lines: bool | None = None

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is not None:
                lines.append(f"{f.name.replace('_', '-')} = {str(v).lower() if isinstance(v, bool) else v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        types = {f.name: f.type for f in fields(cls)}
        values: dict = {}
        for n, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"config line {n}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in types:
                raise UsageError(f"config line {n}: unknown key {key!r}")
            values[key] = _convert(types[key], value, key)
        return cls(**values)

    def merged(self, other: "RunConfig") -> "RunConfig":
        """self overridden by every non-None field of other."""
        out = RunConfig(**{f.name: getattr(self, f.name) for f in fields(self)})
        for f in fields(other):
            v = getattr(other, f.name)
            if v is not None:
                setattr(out, f.name, v)
        return out


def _convert(tp: str, value: str, key: str):
    if "bool" in tp:
        low = value.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise UsageError(f"{key}: expected a boolean, got {value!r}")
    if "int" in tp:
        try:
            return int(value)
        except ValueError:
            raise UsageError(f"{key}: expected an integer, got {value!r}") from None
    return value


def weight_window(text: str | None, m: int) -> tuple[int, int]:
    """``W`` is the single weight W, ``LO:HI`` a window, ``box`` the height's standard window.

    The default is weight 0.
    """
    if text is None:
        return 0, 0
    if text == "box":
        box = hsss.default_box(m)
        return box.w_lo, box.w_hi
    try:
        if ":" in text:
            lo, hi = (int(s) for s in text.split(":", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise UsageError(f"bad weight {text!r}; use W or LO:HI") from None
    if lo > hi or hi > 0:
        raise UsageError("weights must satisfy LO <= HI <= 0")
    return lo, hi


# ---------------------------------------------------------------------------
# commands


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader went away (e.g. piped into head); silence the shutdown flush
            sys.stdout = open(os.devnull, "w")


def _format(cfg: RunConfig, allowed: tuple[str, ...], default: str) -> str:
    fmt = cfg.format
    if fmt is None and cfg.out:
        suffix = Path(cfg.out).suffix.lstrip(".")
        fmt = suffix if suffix in allowed else None
    fmt = fmt or default
    if fmt not in allowed:
        raise UsageError(f"format {fmt!r} not available here; choose from {', '.join(allowed)}")
    return fmt


def compute_dump(cfg: RunConfig) -> dict:
    pipeline = cfg.pipeline or "hsss"
    threads = cfg.threads or 1
    if pipeline == "arithsq":
        top = cfg.max_degree if cfg.max_degree is not None else 20
        inj = arithsq.boundary_injectivity(max(top, 1))
        table = arithsq.homology_table(top)
        return {"pipeline": "arithsq", "max_degree": top, "ok": inj["injective"],
                "homology": [{"j": j, "dim": n} for j, n in sorted(table.items())],
                "boundary_injective": inj["injective"]}
    if pipeline == "equivariant":
        run = equivariant.run_equivariant_kR(threads=threads)
        return dict(run.as_dict(), pipeline="equivariant", m=1)
    m = cfg.m if cfg.m is not None else 1
    if m not in (1, 2, 3):
        raise UsageError("--m must be 1, 2 or 3")
    w_lo, w_hi = weight_window(cfg.weight, m)
    max_stem = cfg.max_stem if cfg.max_stem is not None else hsss.default_box(m).max_stem
    if max_stem < 0:
        raise UsageError("--max-stem must be nonnegative")
    box = TriDegreeBox(max_stem, w_lo, w_hi)
    if pipeline == "bockstein":
        if m == 1:
            raise UsageError("the rho-Bockstein route exists for m = 2, 3")
        run = bockstein.run_bockstein(m, box, threads=threads)
        return dict(run.as_dict(), pipeline="bockstein", m=m)
    if pipeline != "hsss":
        raise UsageError(f"unknown pipeline {pipeline!r}")
    return report.hsss_dump(hsss.run_hsss(m, box, threads=threads, keep_pages=True))


def _dump_text(dump: dict, fmt: str, cfg: RunConfig) -> str:
    if fmt == "json":
        return report.dumps(dump)
    if fmt == "tsv":
        if dump.get("pipeline") == "arithsq":
            return report.tsv(("j", "dim"), ([r["j"], r["dim"]] for r in dump["homology"]))
        return report.tsv(report.PAGE_HEADER, report.page_rows(dump))
    return svgchart.render(report.jsonable(dump), _chart_spec(cfg))


def _chart_spec(cfg: RunConfig) -> svgchart.ChartSpec:
    try:
        w = int(cfg.weight) if cfg.weight is not None else 0
    except ValueError:
        raise UsageError("chart --weight takes a single integer") from None
    return svgchart.ChartSpec(page=cfg.page, weight=w, vanishing_lines=bool(cfg.vanishing_lines),
                              structure_lines=bool(cfg.structure_lines))


def cmd_compute(cfg: RunConfig) -> int:
    fmt = _format(cfg, ("json", "tsv"), "json")
    dump = compute_dump(cfg)
    _emit(_dump_text(dump, fmt, cfg), cfg.out)
    return EXIT_OK if dump.get("ok", True) else EXIT_FAIL


def cmd_verify(cfg: RunConfig, listing: bool) -> int:
    if listing:
        for entry in suites.catalog():
            print(entry["suite"])
            for c in entry["checks"]:
                print(f"  {c['key']:<14}{c['label']}")
        return EXIT_OK
    if not cfg.suite:
        raise UsageError("verify needs a suite name (see verify --list)")
    if cfg.suite not in suites.SUITES:
        raise UsageError(f"unknown suite {cfg.suite!r}; available: {', '.join(suites.SUITES)}")
    only = [s.strip() for s in cfg.only.split(",")] if cfg.only else None
    fmt = _format(cfg, ("json", "tsv"), "json") if cfg.out or cfg.format else None
    status = sys.stderr if (fmt and not cfg.out) else sys.stdout

    def show(row: dict) -> None:
        print(f"{'PASS' if row['ok'] else 'FAIL'}  {cfg.suite}/{row['key']}: {row['label']}",
              file=status, flush=True)

    result = suites.run_suite(cfg.suite, threads=cfg.threads or 1, only=only, progress=show)
    passed = sum(r["ok"] for r in result["checks"])
    print(f"{cfg.suite}: {passed}/{len(result['checks'])} checks passed", file=status)
    if fmt == "json":
        _emit(report.dumps(result), cfg.out)
    elif fmt == "tsv":
        _emit(report.tsv(("suite", "check", "ok", "label"),
                         ([cfg.suite, r["key"], int(r["ok"]), r["label"]] for r in result["checks"])),
              cfg.out)
    return EXIT_OK if result["ok"] else EXIT_FAIL


def _load_dump(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise UsageError(f"no such page dump: {path}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not JSON: {exc}") from None


def cmd_chart(cfg: RunConfig) -> int:
    if cfg.input:
        dump = _load_dump(cfg.input)
    else:
        dump = report.jsonable(compute_dump(cfg))
    try:
        svg = svgchart.render(dump, _chart_spec(cfg))
    except svgchart.ChartError as exc:
        raise UsageError(str(exc)) from None
    _emit(svg, cfg.out)
    return EXIT_OK


def cmd_export(cfg: RunConfig) -> int:
    fmt = _format(cfg, ("json", "tsv", "svg"), "json")
    dump = _load_dump(cfg.input) if cfg.input else report.jsonable(compute_dump(cfg))
    try:
        _emit(_dump_text(dump, fmt, cfg), cfg.out)
    except svgchart.ChartError as exc:
        raise UsageError(str(exc)) from None
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hsslice", description="GF(2) slice spectral sequence engine")
    sub = p.add_subparsers(dest="command")

    def common(sp, formats):
        sp.add_argument("--config", help="flat key = value file; command-line flags override it")
        sp.add_argument("--threads", type=int, help="worker threads (output does not depend on it)")
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--format", choices=formats)

    def run_flags(sp):
        sp.add_argument("--m", type=int, help="height m in {1, 2, 3}")
        sp.add_argument("--max-stem", type=int)
        sp.add_argument("--weight", help="weight W, window LO:HI or 'box' (default 0; charts take a single weight)")
        sp.add_argument("--pipeline", choices=PIPELINES)
        sp.add_argument("--arithsq", dest="pipeline", action="store_const", const="arithsq",
                        help="shorthand for --pipeline arithsq")
        sp.add_argument("--equivariant", dest="pipeline", action="store_const", const="equivariant",
                        help="shorthand for --pipeline equivariant")
        sp.add_argument("--max-degree", type=int, help="degree bound for the arithsq pipeline")

    c = sub.add_parser("compute", help="run a pipeline and write its pages")
    common(c, ("json", "tsv"))
    run_flags(c)

    v = sub.add_parser("verify", help="run an acceptance suite")
    common(v, ("json", "tsv"))
    v.add_argument("suite_pos", nargs="?", metavar="SUITE")
    v.add_argument("--suite")
    v.add_argument("--only", help="comma-separated check keys")
    v.add_argument("--list", action="store_true", help="list suites and checks")

    ch = sub.add_parser("chart", help="render a page as SVG")
    common(ch, ("svg",))
    run_flags(ch)
    ch.add_argument("--input", help="page dump written by compute")
    ch.add_argument("--page", help="page name, default the last page")
    ch.add_argument("--vanishing-lines", action="store_const", const=True)
    ch.add_argument("--structure-lines", action="store_const", const=True)

    e = sub.add_parser("export", help="convert a page dump to json, tsv or svg")
    common(e, ("json", "tsv", "svg"))
    run_flags(e)
    e.add_argument("--input", help="page dump written by compute")
    e.add_argument("--page")
    e.add_argument("--vanishing-lines", action="store_const", const=True)
    e.add_argument("--structure-lines", action="store_const", const=True)
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    names = {f.name for f in fields(RunConfig)}
    values = {k: v for k, v in vars(ns).items() if k in names}
    if getattr(ns, "suite_pos", None):
        values["suite"] = values.get("suite") or ns.suite_pos
    cli = RunConfig(**values)
    base = RunConfig()
    if getattr(ns, "config", None):
        try:
            base = RunConfig.from_text(Path(ns.config).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise UsageError(f"no such config file: {ns.config}") from None
    return base.merged(cli)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not ns.command:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        cfg = config_from_args(ns)
        if cfg.threads is not None and cfg.threads < 1:
            raise UsageError("--threads must be at least 1")
        if ns.command == "compute":
            return cmd_compute(cfg)
        if ns.command == "verify":
            return cmd_verify(cfg, ns.list)
        if ns.command == "chart":
            return cmd_chart(cfg)
        return cmd_export(cfg)
    except UsageError as exc:
        print(f"hsslice: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ContractError, VerificationError) as exc:
        print(f"hsslice: internal invariant breach: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
