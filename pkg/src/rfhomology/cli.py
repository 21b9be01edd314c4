"""Command-line front end emitting homology tables and verification reports
as markdown or JSON.

Subcommands: rfh-w0, rfh-full, gysin, transfer, orderability, cp2-demo,
selftest.  Exit codes: 0 ok, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import selftest as selftest_mod
from .basemodel import model_from_spec
from .chaincplx import verify_exactness
from .errors import EngineError
from .exactlin import IntMatrix
from .rfh import (GroupValue, action, boundary_full, enumerate_generators,
                  full_rfh, gysin, orderability_report, rfh_index,
                  rfh_w0_table, transfer_maps, winding)


@dataclass
class RunConfig:
    command: str
    model: str = "cp:2"
    m: int = 1
    tau: Fraction = Fraction(1)
    degrees: tuple[int, int] = (-8, 8)
    window: Optional[tuple[Fraction, Fraction]] = None
    coeff: str = "z"
    fmt: str = "md"
    truncation: int = 8


def _parse_rational(text: str) -> Fraction:
    return Fraction(text.strip())


def _parse_range(text: str) -> tuple[int, int]:
    lo, hi = text.split("..")
    lo, hi = int(lo), int(hi)
    if lo > hi:
        raise ValueError(f"empty range {text!r}")
    return lo, hi


def _parse_window(text: str) -> tuple[Fraction, Fraction]:
    a, b = text.split("..")
    return Fraction(a), Fraction(b)


def _preprocess(argv: list[str]) -> list[str]:
    """Glue option values that begin with a minus sign (like ``-6..6``)
    onto their flag so argparse does not mistake them for options."""
    out: list[str] = []
    it = iter(argv)
    value_flags = {"--degrees", "--window", "--tau", "--m", "--truncation"}
    for tok in it:
        if tok in value_flags:
            try:
                nxt = next(it)
            except StopIteration:
                out.append(tok)
                break
            out.append(f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rfh",
        description="Exact Rabinowitz Floer homology of negative line bundles")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, degrees_default="-8..8"):
        p.add_argument("--model", default="cp:2",
                       help="cp:<n> | surface:<g> | point | file:<path>")
        p.add_argument("--m", type=int, default=1, help="bundle degree m >= 1")
        p.add_argument("--tau", default="1", help="radius as p/q or integer")
        p.add_argument("--degrees", default=degrees_default, help="lo..hi")
        p.add_argument("--window", default=None, help="action window a..b")
        p.add_argument("--coeff", default="z", help="z | fp:<prime>")
        p.add_argument("--format", dest="fmt", default="md", choices=("md", "json"))
        p.add_argument("--truncation", type=int, default=8,
                       help="sphere-class truncation for injectivity checks")

    for name in ("rfh-w0", "rfh-full", "gysin", "transfer", "orderability",
                 "cp2-demo", "selftest"):
        common(sub.add_parser(name))
    return parser


def config_from_args(args) -> RunConfig:
    cfg = RunConfig(command=args.command)
    cfg.model = args.model
    cfg.m = args.m
    cfg.tau = _parse_rational(args.tau)
    if cfg.tau <= 0:
        raise ValueError(f"tau = {cfg.tau} must be positive")
    if cfg.m < 1:
        raise ValueError(f"m = {cfg.m} must be >= 1")
    cfg.degrees = _parse_range(args.degrees)
    cfg.window = _parse_window(args.window) if args.window else None
    cfg.coeff = args.coeff.lower()
    cfg.fmt = args.fmt
    cfg.truncation = args.truncation
    return cfg


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def render_group(group_json, coeff: str = "z") -> str:
    if group_json == "0":
        return "0"
    if "free" in group_json:
        free, torsion = group_json["free"], group_json["torsion"]
        if coeff.startswith("fp:"):
            return "0" if free == 0 else ("F" if free == 1 else f"F^{free}")
        parts = []
        if free == 1:
            parts.append("Z")
        elif free > 1:
            parts.append(f"Z^{free}")
        parts.extend(f"Z_{t}" for t in torsion)
        return " + ".join(parts) if parts else "0"
    if "Qm" in group_json:
        return f"Q_{group_json['Qm']}"
    if "QmTilde" in group_json:
        return f"Q~_{group_json['QmTilde']}"
    return "relations(see json)"


def _md_table(headers: list[str], rows: list[list[str]]) -> str:
    out = ["| " + " | ".join(headers) + " |",
           "|" + "|".join("---" for _ in headers) + "|"]
    out.extend("| " + " | ".join(str(c) for c in row) + " |" for row in rows)
    return "\n".join(out)


def emit(payload: dict, cfg: RunConfig, md_text: str) -> None:
    if cfg.fmt == "json":
        print(json.dumps(payload, sort_keys=True, separators=(",", ":")))
    else:
        print(md_text)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_rfh_w0(cfg: RunConfig) -> int:
    model = model_from_spec(cfg.model)
    lo, hi = cfg.degrees
    table = rfh_w0_table(model, cfg.m, cfg.tau, cfg.degrees)
    payload = {
        "command": "rfh-w0", "model": model.name, "m": cfg.m,
        "degrees": [lo, hi],
        "table": [{"degree": d, "group": GroupValue.of(table[d]).to_json()}
                  for d in range(lo, hi + 1)],
    }
    rows = [[d, render_group(GroupValue.of(table[d]).to_json())]
            for d in range(lo, hi + 1)]
    md = (f"RFH^w0({model.name}, m={cfg.m}) on degrees {lo}..{hi}\n\n"
          + _md_table(["degree", "group"], rows))
    emit(payload, cfg, md)
    return 0


def cmd_rfh_full(cfg: RunConfig) -> int:
    model = model_from_spec(cfg.model)
    lo, hi = cfg.degrees
    result = full_rfh(model, cfg.m, cfg.tau, cfg.degrees, cfg.coeff)
    payload = {"command": "rfh-full", **result.to_json(),
               "degrees": [lo, hi]}
    rows = [[d, render_group(result.table[d].to_json(), result.coeff)]
            for d in range(lo, hi + 1)]
    md = (f"RFH({model.name}, m={cfg.m}, tau={cfg.tau}, coeff={result.coeff}) "
          f"regime={result.regime.value}\n\n"
          + _md_table(["degree", "group"], rows))
    emit(payload, cfg, md)
    return 0


def cmd_gysin(cfg: RunConfig) -> int:
    model = model_from_spec(cfg.model)
    les = gysin(model, cfg.m, cfg.degrees, cfg.tau)
    report = verify_exactness(les)
    payload = {
        "command": "gysin", "model": model.name, "m": cfg.m,
        "degrees": list(cfg.degrees),
        "nodes": [{"label": n.label,
                   "group": GroupValue.of(n.presentation).to_json()}
                  for n in les.nodes],
        "exact": bool(report.ok),
        "failures": report.failures(),
    }
    rows = [[n.label, render_group(GroupValue.of(n.presentation).to_json()),
             ("ok" if (n.label, True) in report.nodes else
              ("FAIL" if (n.label, False) in report.nodes else "-"))]
            for n in les.nodes]
    md = (f"Floer Gysin sequence for {model.name}, m={cfg.m}: "
          f"{'all interior nodes exact' if report.ok else 'EXACTNESS FAILURE'}\n\n"
          + _md_table(["node", "group", "exact"], rows))
    emit(payload, cfg, md)
    return 0 if report.ok else 1


def cmd_transfer(cfg: RunConfig) -> int:
    model = model_from_spec(cfg.model)
    lo, hi = cfg.degrees
    T, P = transfer_maps(model, cfg.tau, cfg.degrees, cfg.m)
    ok = True
    for d in range(lo, hi + 1):
        n = T.source.rank(d)
        want = IntMatrix.identity(n).scale(cfg.m)
        if (P.at(d) @ T.at(d)).entries != want.entries:
            ok = False
        if (T.at(d) @ P.at(d)).entries != want.entries:
            ok = False
    payload = {"command": "transfer", "model": model.name, "m": cfg.m,
               "degrees": [lo, hi], "identity": f"P.T = T.P = {cfg.m}.id",
               "pass": ok}
    md = f"transfer/projection on {model.name}: P.T = T.P = {cfg.m}.id: " + \
        ("PASS" if ok else "FAIL")
    emit(payload, cfg, md)
    return 0 if ok else 1


def cmd_orderability(cfg: RunConfig) -> int:
    model = model_from_spec(cfg.model)
    rep = orderability_report(model, cfg.m, cfg.tau)
    payload = {"command": "orderability", "model": model.name, "m": cfg.m, **rep}
    verdict = rep["orderable"]
    md = (f"{model.name}, m={cfg.m}: RFH^w0 "
          + ("nonzero" if rep["rfh_w0_nonzero"] else "= 0")
          + f"; orderability: {verdict}; translated points: {rep['translated_points']}")
    emit(payload, cfg, md)
    return 0


def cmd_cp2_demo(cfg: RunConfig) -> int:
    model = model_from_spec("cp:2")
    m = cfg.m
    k_bound = min(cfg.truncation, 2)
    gens = enumerate_generators(model, m, cfg.tau, k_bound=k_bound, l_bound=3,
                                window=cfg.window)
    gen_rows = []
    bdy_rows = []
    for g in gens:
        gen_rows.append([str(g), rfh_index(g, model, m), winding(g, model, m),
                         str(action(g, model, m, cfg.tau))])
        if not g.hat:
            terms = boundary_full(g, model, m)
            text = " + ".join(f"{c}*{t}" if c != 1 else str(t)
                              for t, c in sorted(terms.items(), key=lambda x: str(x[0])))
            bdy_rows.append([str(g), text if text else "0"])
    payload = {
        "command": "cp2-demo", "m": m, "tau": str(cfg.tau),
        "generators": [{"generator": r[0], "index": r[1], "winding": r[2],
                        "action": r[3]} for r in gen_rows],
        "boundary": [{"generator": r[0], "image": r[1]} for r in bdy_rows],
    }
    md = (f"generators of the full complex for cp:2, m={m}, tau={cfg.tau} "
          f"(|k| <= {k_bound}, |l| <= 3)\n\n"
          + _md_table(["generator", "index", "winding", "action"], gen_rows)
          + "\n\nboundary images of the minima\n\n"
          + _md_table(["generator", "d(generator)"], bdy_rows))
    emit(payload, cfg, md)
    return 0


def cmd_selftest(cfg: RunConfig) -> int:
    results = selftest_mod.run_all()
    ok = all(r["pass"] for r in results)
    payload = {"command": "selftest", "criteria": results, "pass": ok}
    lines = [f"criterion {r['id']:>2} [{'PASS' if r['pass'] else 'FAIL'}] "
             f"{r['name']}" + ("" if r["pass"] else f" -- {r['detail']}")
             for r in results]
    md = "\n".join(lines) + ("\n\nall criteria passed" if ok
                             else "\n\nFAILURES present")
    emit(payload, cfg, md)
    return 0 if ok else 1


COMMANDS = {
    "rfh-w0": cmd_rfh_w0,
    "rfh-full": cmd_rfh_full,
    "gysin": cmd_gysin,
    "transfer": cmd_transfer,
    "orderability": cmd_orderability,
    "cp2-demo": cmd_cp2_demo,
    "selftest": cmd_selftest,
}


def main(argv: Optional[list[str]] = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    try:
        args = parser.parse_args(_preprocess(list(argv)))
        cfg = config_from_args(args)
    except SystemExit as exc:
        return 2 if exc.code else 0
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return COMMANDS[cfg.command](cfg)
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
