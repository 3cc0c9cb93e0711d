"""Command-line front end: ``berklab <subcommand> [flags]``.

Every run prints (or writes to ``--out``) a JSON document embedding the
tool version and the full resolved configuration.  Failures print an error
document and exit nonzero.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path

from . import __version__
from .berkovich import FiniteTree, TreeMeasure, TypeIIPoint, format_point, parse_point, unit_tree
from .dynamics import RationalMap, iterate, load_map_spec, pgr_search, reduce, resultant_valuation
from .errors import BerklabError, ConfigError
from .measures import decimal6, divisor_poly, equidist_experiment, retract_divisor
from .poly import count_roots_in_disk
from .potential import apriori_sequence, green, log_max_one, rootsnormalized_potential, tree_laplacian

COMMANDS = ("reduce", "pgr", "green", "apriori", "equidist", "roots", "laplacian-check")


@dataclass
class ExperimentConfig:
    f: str | None = None
    g: str | None = None
    depth: int = 2
    nmin: int = 1
    nmax: int = 8
    samples: list = field(default_factory=list)
    pgr_depth: int = 3
    pgr_denom: int = 2
    tolerance: str = "1/1000"
    reference: str = "pullback"
    base_point: str = "1"
    ref_n: int = 10
    out: str | None = None
    format: str = "json"

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.depth < 0 or self.nmin < 0 or self.nmax < self.nmin - 1:
            raise ConfigError("need depth >= 0 and 0 <= nmin <= nmax + 1")
        if self.pgr_depth < 0 or self.pgr_denom < 1:
            raise ConfigError("need pgr_depth >= 0 and pgr_denom >= 1")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"unknown format {self.format!r}")
        if self.reference not in ("pullback", "green", "gauss"):
            raise ConfigError(f"unknown reference {self.reference!r}")
        try:
            if Fraction(self.tolerance) <= 0:
                raise ValueError
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"tolerance must be a positive rational, got {self.tolerance!r}") from None


def _load_map(path: str | None, what: str) -> RationalMap:
    if path is None:
        raise ConfigError(f"--{what} is required for this subcommand")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {what} map spec: {exc}") from exc
    return load_map_spec(text)


def _g_or_identity(cfg: ExperimentConfig, f: RationalMap) -> RationalMap:
    if cfg.g is None:
        return RationalMap.identity(f.field)
    g = _load_map(cfg.g, "g")
    if g.field != f.field:
        raise ConfigError("f and g are over different fields")
    return g


def _samples(cfg: ExperimentConfig, tree: FiniteTree) -> list[TypeIIPoint]:
    if cfg.samples:
        return [parse_point(tree.field, s) for s in cfg.samples]
    return tree.sorted_vertices()


def _measure_json(mu: TreeMeasure) -> list:
    return [{"point": format_point(pt), "mass": str(m)} for pt, m in mu.items()]


# --------------------------------------------------------------------------
# subcommands


def cmd_reduce(cfg):
    f = _load_map(cfg.f, "f")
    report = reduce(f).to_json()
    report["resultant_valuation"] = str(resultant_valuation(f))
    report["good_reduction"] = report["reduced_degree"] == report["degree"]
    return report


def cmd_pgr(cfg):
    f = _load_map(cfg.f, "f")
    return pgr_search(f, cfg.pgr_depth, cfg.pgr_denom).to_json()


def cmd_green(cfg):
    f = _load_map(cfg.f, "f")
    tree = unit_tree(f.field, cfg.depth)
    out = []
    for S in _samples(cfg, tree):
        approx = green(f, S, Fraction(cfg.tolerance))
        out.append({"point": format_point(S), **approx.to_json()})
    return out


def cmd_apriori(cfg):
    f = _load_map(cfg.f, "f")
    g = _g_or_identity(cfg, f)
    tree = unit_tree(f.field, cfg.depth)
    seq = apriori_sequence(f, g, _samples(cfg, tree), cfg.nmax, n_min=max(cfg.nmin, 1))
    return [{"n": n, "s_n": str(s), "s_n_decimal": decimal6(s)} for n, s in seq]


def cmd_equidist(cfg):
    f = _load_map(cfg.f, "f")
    g = _g_or_identity(cfg, f)
    tree = unit_tree(f.field, cfg.depth)
    report = equidist_experiment(
        f, g, tree, range(max(cfg.nmin, 1), cfg.nmax + 1),
        reference=cfg.reference, pgr_depth=cfg.pgr_depth, pgr_denom=cfg.pgr_denom,
        base_point=f.field.parse(cfg.base_point), ref_n=cfg.ref_n,
    )
    return report.to_json()


def cmd_roots(cfg):
    f = _load_map(cfg.f, "f")
    g = _g_or_identity(cfg, f)
    tree = unit_tree(f.field, cfg.depth)
    rows = []
    for n in range(max(cfg.nmin, 1), cfg.nmax + 1):
        D = divisor_poly(f, g, n)
        rows.append({
            "n": n,
            "degree": D.degree,
            "at_infinity": D.at_infinity,
            "disk_counts": [
                {"disk": format_point(S), "roots": count_roots_in_disk(D.direct, S.center, S.m)}
                for S in tree.sorted_vertices()
            ],
            "retracted": _measure_json(retract_divisor(D, tree)),
        })
    return rows


def standard_tree(field_) -> FiniteTree:
    """{D(0; -1), Gauss, D(0; 1)}."""
    return FiniteTree.from_points([TypeIIPoint(field_, field_.zero, m) for m in (-1, 0, 1)])


def cmd_laplacian_check(cfg):
    f = _load_map(cfg.f, "f")
    g = _g_or_identity(cfg, f)
    K = f.field
    small = standard_tree(K)
    gauss = TypeIIPoint.gauss(K)
    lap = tree_laplacian(log_max_one, small)
    expected = TreeMeasure.dirac(small, gauss) - TreeMeasure.dirac(small, small.root)
    checks = [{"identity": "log_max", "n": None, "holds": lap == expected, "laplacian": _measure_json(lap)}]
    tree = unit_tree(K, cfg.depth)
    anchor = tree.retract(gauss)
    for n in range(max(cfg.nmin, 1), cfg.nmax + 1):
        lhs = tree_laplacian(rootsnormalized_potential(iterate(f, n), g), tree, extra_points=[anchor])
        D = divisor_poly(f, g, n)
        rhs = retract_divisor(D, tree) - TreeMeasure.dirac(tree, gauss, D.degree)
        checks.append({"identity": "roots_normalized", "n": n, "holds": lhs == rhs, "laplacian": _measure_json(lhs)})
    return {"all_hold": all(c["holds"] for c in checks), "checks": checks}


HANDLERS = {
    "reduce": cmd_reduce,
    "pgr": cmd_pgr,
    "green": cmd_green,
    "apriori": cmd_apriori,
    "equidist": cmd_equidist,
    "roots": cmd_roots,
    "laplacian-check": cmd_laplacian_check,
}


# --------------------------------------------------------------------------
# output


def _csv_rows(command: str, result) -> tuple[list[str], list[list]]:
    if command == "equidist":
        v = result["pgr"]
        header = ["n", "degree", "tv", "tv_decimal", "verdict", "pgr_max_depth", "pgr_radius_denominator"]
        rows = [[r["n"], r["degree"], r["tv"], r["tv_decimal"], v["verdict"], v["max_depth"], v["radius_denominator"]]
                for r in result["rows"]]
        return header, rows
    if command == "apriori":
        return ["n", "s_n", "s_n_decimal"], [[r["n"], r["s_n"], r["s_n_decimal"]] for r in result]
    if command == "green":
        header = ["point", "value", "n_used", "bound", "series_checked"]
        return header, [[r[h] for h in header] for r in result]
    raise ConfigError(f"csv output is not available for {command}")


def render(command: str, cfg: ExperimentConfig, result) -> str:
    if cfg.format == "csv":
        header, rows = _csv_rows(command, result)
        buf = io.StringIO()
        buf.write(f"# berklab {__version__} {command} config={json.dumps(cfg.to_dict(), sort_keys=True)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue()
    doc = {"tool": "berklab", "version": __version__, "command": command, "config": cfg.to_dict(), "result": result}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="berklab", description="Exact dynamics on the Berkovich line.")
    parser.add_argument("--version", action="version", version=f"berklab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON file with ExperimentConfig fields; flags override it")
        p.add_argument("--f")
        p.add_argument("--g")
        p.add_argument("--depth", type=int)
        p.add_argument("--nmin", type=int)
        p.add_argument("--nmax", type=int)
        p.add_argument("--sample", action="append", dest="samples", help="type-II point, e.g. 'D(1; 2)'")
        p.add_argument("--pgr-depth", type=int)
        p.add_argument("--pgr-denom", type=int)
        p.add_argument("--tolerance")
        p.add_argument("--reference", choices=("pullback", "green", "gauss"))
        p.add_argument("--base-point")
        p.add_argument("--ref-n", type=int)
        p.add_argument("--out")
        p.add_argument("--format", choices=("json", "csv"))
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    data: dict = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot load config: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    for key in (f.name for f in fields(ExperimentConfig)):
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    return ExperimentConfig.from_dict(data)


def _error_doc(exc: Exception) -> str:
    code = exc.code if isinstance(exc, BerklabError) else type(exc).__name__
    return json.dumps({"tool": "berklab", "version": __version__,
                       "error": {"code": code, "message": str(exc)}}, sort_keys=True) + "\n"


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        text = render(args.command, cfg, HANDLERS[args.command](cfg))
    except (BerklabError, ValueError, ZeroDivisionError) as exc:
        sys.stdout.write(_error_doc(exc))
        return 2 if isinstance(exc, ConfigError) else 1
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
