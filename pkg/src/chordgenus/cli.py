"""``chordgenus`` command-line entry point.

Every output starts with a metadata header: in JSON a top-level
``"metadata"`` object, in CSV a single ``# {...}`` comment line holding the
same object.  :func:`read_output` parses both back.

The timestamp is taken from ``--timestamp``, else ``SOURCE_DATE_EPOCH``,
else the clock; fixing either of the first two makes runs byte-identical.

Exit codes: 0 success, 1 computational error (the exception name is
printed), 2 usage error, 3 ``verify`` found a mismatch.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from fractions import Fraction
from typing import Any, Sequence

from . import __version__
from .asymptotics import DEFAULT_H, DEFAULT_ORDER, clt_params, genus_distribution
from .diagrams import MODES, enumerate_diagrams
from .errors import ChordGenusError
from .gamma import VARIANTS, GammaConfig, canonical_gf, h_gamma, q_gamma_bivariate, q_gamma_uni
from .recursions import bicellular_q, harer_zagier, irreducible_1bb, two_bb_shadow_polys
from .series import BivariateSeries, Polynomial, TruncatedSeries

EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_MISMATCH = 3

TABLE_KINDS = ("c", "q", "i1", "i2A", "i2B")


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    options: dict
    output_format: str
    output_path: str | None
    seed: int
    thread_count: int
    timestamp: str


def _timestamp(explicit: str | None) -> str:
    if explicit:
        return explicit
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    secs = int(epoch) if epoch else int(time.time())
    return datetime.fromtimestamp(secs, timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _metadata(cfg: RunConfig) -> dict:
    return {
        "tool": "chordgenus",
        "version": __version__,
        "subcommand": cfg.subcommand,
        "config": cfg.options,
        "seed": cfg.seed,
        "thread_count": cfg.thread_count,
        "timestamp": cfg.timestamp,
    }


def _frac(x) -> Any:
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# rendering


def render(cfg: RunConfig, data: Any, rows: list[list] | None = None, header: list[str] | None = None) -> str:
    meta = _metadata(cfg)
    if cfg.output_format == "csv":
        if rows is None:
            raise ValueError(f"{cfg.subcommand} has no CSV form")
        buf = io.StringIO()
        buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()
    return json.dumps({"metadata": meta, "data": data}, sort_keys=True, indent=2) + "\n"


def read_output(text: str) -> dict:
    """Inverse of :func:`render`: ``{"metadata", "data"}`` or ``{"metadata", "header", "rows"}``."""
    if text.startswith("# "):
        first, _, rest = text.partition("\n")
        reader = csv.reader(io.StringIO(rest))
        table = list(reader)
        return {"metadata": json.loads(first[2:]), "header": table[0], "rows": table[1:]}
    return json.loads(text)


# ---------------------------------------------------------------------------
# subcommands


def factored(p: Polynomial) -> str:
    """``y^a (y+1)^b (rest)`` with the rest expanded."""
    coeffs = list(p.coeffs)
    if not coeffs:
        return "0"
    a = 0
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
        a += 1
    b = 0
    while len(coeffs) > 1 and sum(c * (-1) ** k for k, c in enumerate(coeffs)) == 0:
        # synthetic division by y + 1
        q, carry = [], Fraction(0)
        for c in reversed(coeffs):
            carry = c - carry
            q.append(carry)
        coeffs = list(reversed(q))[1:]
        b += 1
    rest = " + ".join(
        str(_frac(c)) + ("" if k == 0 else "*y" if k == 1 else f"*y^{k}") for k, c in enumerate(coeffs) if c
    )
    parts = []
    if a:
        parts.append("y" if a == 1 else f"y^{a}")
    if b:
        parts.append("(y+1)" if b == 1 else f"(y+1)^{b}")
    if rest != "1" or not parts:
        parts.append(f"({rest})" if parts else rest)
    return "*".join(parts)


def cmd_enumerate(args, cfg: RunConfig) -> tuple:
    rows = []
    irreducible = {"any": None, "yes": True, "no": False}[args.irreducible]
    for m in range(args.min_arcs, args.max_arcs + 1):
        counts = enumerate_diagrams(args.mode, m, genus=args.genus, irreducible=irreducible, ab_class=args.ab_class)
        for (g, cls), c in sorted(counts.items()):
            rows.append([args.mode, g, m, cls, c])
    data = [dict(zip(("mode", "genus", "arcs", "class", "count"), r)) for r in rows]
    return data, rows, ["mode", "genus", "arcs", "class", "count"]


def cmd_tables(args, cfg: RunConfig) -> tuple:
    g = args.max_genus
    if args.kind == "c":
        table = harer_zagier(g, args.max_order or 2 * g + 10)
    elif args.kind == "q":
        table = bicellular_q(g, args.max_order or 2 * g + 10)
    elif args.kind == "i1":
        table = irreducible_1bb(g)
    else:
        a, b = two_bb_shadow_polys(g)
        table = a if args.kind == "i2A" else b
    data = table.to_json()
    rows = []
    for genus, entry in sorted(table.entries.items()):
        for n, c in enumerate(entry.coeffs):
            rows.append([genus, n, _frac(c)])
    if args.kind in ("i1", "i2A", "i2B"):
        data["factored"] = {str(k): factored(e) for k, e in sorted(table.entries.items())}
    return data, rows, ["g", "n", "coefficient"]


def _series_for(args) -> TruncatedSeries | BivariateSeries:
    gcfg = GammaConfig(args.gamma, args.tau, args.order, bivariate=args.bivariate)
    if args.kind == "H":
        return h_gamma(gcfg)
    if args.kind == "Q":
        if args.bivariate:
            return q_gamma_bivariate(gcfg)
        return q_gamma_uni(gcfg, args.variant)
    return canonical_gf(gcfg, z_order=args.order)


def cmd_series(args, cfg: RunConfig) -> tuple:
    s = _series_for(args)
    rows = []
    if isinstance(s, BivariateSeries):
        for n in range(s.order + 1):
            for g in range(s.t_cap + 1):
                c = s.coefficient(n, g)
                if c:
                    rows.append([n, g, _frac(c)])
    else:
        rows = [[n, "", _frac(c)] for n, c in enumerate(s.coeffs) if c]
    data = {"series": args.kind, "order": s.order, "coefficients": [dict(zip(("n", "g", "coefficient"), r)) for r in rows]}
    return data, rows, ["n", "g", "coefficient"]


def cmd_verify(args, cfg: RunConfig) -> tuple:
    from .verify import run_checks

    results = run_checks(args.max_arcs, args.max_genus, args.check or None)
    data = {"ok": all(r.ok for r in results), "checks": [r.to_json() for r in results]}
    rows = [[r.name, r.cells, "ok" if r.ok else "FAIL", json.dumps(r.first_failure, sort_keys=True) if r.first_failure else ""] for r in results]
    return data, rows, ["check", "cells", "status", "first_failure"]


def cmd_clt(args, cfg: RunConfig) -> tuple:
    report = clt_params(GammaConfig(args.gamma, args.tau), h=args.h, order=args.order, workers=cfg.thread_count)
    data = report.to_json()
    return data, [[k, v] for k, v in sorted(data.items())], ["field", "value"]


def cmd_distribution(args, cfg: RunConfig) -> tuple:
    dist = genus_distribution(args.n, GammaConfig(args.gamma, args.tau))
    rows = [[g, repr(p)] for g, p in enumerate(dist.probabilities)]
    return dist.to_json(), rows, ["g", "probability"]


COMMANDS = {
    "enumerate": cmd_enumerate,
    "tables": cmd_tables,
    "series": cmd_series,
    "verify": cmd_verify,
    "clt": cmd_clt,
    "distribution": cmd_distribution,
}

DEFAULT_FORMAT = {"enumerate": "csv", "distribution": "csv"}


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default=None, dest="output_format")
    common.add_argument("--output", "-o", default=None, help="write here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=_positive, default=1, dest="thread_count")
    common.add_argument("--timestamp", default=None, help="fixed metadata timestamp")

    p = argparse.ArgumentParser(prog="chordgenus", description="Genus-filtered enumeration of one- and two-backbone diagrams.")
    p.add_argument("--version", action="version", version=f"chordgenus {__version__}")
    sub = p.add_subparsers(dest="subcommand", required=True)

    e = sub.add_parser("enumerate", parents=[common], help="brute-force census")
    e.add_argument("--mode", choices=MODES, required=True)
    e.add_argument("--min-arcs", type=_nonneg, default=1)
    e.add_argument("--max-arcs", type=_nonneg, required=True)
    e.add_argument("--genus", type=_nonneg, default=None)
    e.add_argument("--irreducible", choices=("any", "yes", "no"), default="any")
    e.add_argument("--class", choices=("A", "B"), default=None, dest="ab_class")

    t = sub.add_parser("tables", parents=[common], help="recursion tables")
    t.add_argument("--kind", choices=TABLE_KINDS, required=True)
    t.add_argument("--max-genus", type=_nonneg, required=True)
    t.add_argument("--max-order", type=_nonneg, default=None)

    s = sub.add_parser("series", parents=[common], help="gamma generating functions")
    s.add_argument("--kind", choices=("H", "Q", "Q_tau"), default="Q")
    s.add_argument("--gamma", type=_nonneg, required=True)
    s.add_argument("--tau", type=_positive, default=1)
    s.add_argument("--order", type=_nonneg, default=20)
    s.add_argument("--bivariate", action="store_true")
    s.add_argument("--variant", choices=VARIANTS, default="corrected")

    v = sub.add_parser("verify", parents=[common], help="recursions against brute force")
    v.add_argument("--max-arcs", type=_positive, default=5)
    v.add_argument("--max-genus", type=_nonneg, default=2)
    v.add_argument("--check", action="append", default=[])

    c = sub.add_parser("clt", parents=[common], help="CLT parameters of the genus")
    c.add_argument("--gamma", type=_nonneg, required=True)
    c.add_argument("--tau", type=_positive, required=True)
    c.add_argument("--order", type=_positive, default=DEFAULT_ORDER)
    c.add_argument("--h", type=float, default=DEFAULT_H)

    d = sub.add_parser("distribution", parents=[common], help="exact finite-n genus distribution")
    d.add_argument("--n", type=_positive, required=True)
    d.add_argument("--gamma", type=_nonneg, default=0)
    d.add_argument("--tau", type=_positive, default=1)
    return p


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else 0
    skip = {"subcommand", "output_format", "output", "seed", "thread_count", "timestamp"}
    options = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    cfg = RunConfig(
        subcommand=args.subcommand,
        options=options,
        output_format=args.output_format or DEFAULT_FORMAT.get(args.subcommand, "json"),
        output_path=args.output,
        seed=args.seed,
        thread_count=args.thread_count,
        timestamp=_timestamp(args.timestamp),
    )
    try:
        data, rows, header = COMMANDS[args.subcommand](args, cfg)
        text = render(cfg, data, rows, header)
    except (ChordGenusError, ValueError, ArithmeticError) as err:
        print(f"error: {type(err).__name__}: {err}", file=stderr)
        return EXIT_ERROR
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    if args.subcommand == "verify" and not data["ok"]:
        bad = next(c for c in data["checks"] if not c["ok"])
        f = bad["first_failure"]
        print(f"verify: {bad['name']} failed at (g={f['g']}, n={f['n']})", file=stderr)
        return EXIT_MISMATCH
    return 0


def main() -> None:
    sys.exit(run())
