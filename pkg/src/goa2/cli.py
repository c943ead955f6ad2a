"""``goa2`` command line: list, certify, verify and table1.

Exit codes: 0 verified, 1 falsified (or certification failure), 2 usage or
unknown / not-constructed space, 3 indeterminate.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .algebra import CertificationError, ContractError
from .catalog import (
    NotConstructedError,
    UnknownSpaceError,
    build_space,
    build_wallach,
    descriptor,
    expected_dims,
    list_catalog,
    table1_rows,
)
from .expr import PhiSyntaxError
from .norm import PhiDomainError
from .solver import TAU_FEAS, TAU_INFEAS
from .verify import MODES, CampaignConfig, CampaignReport, run_campaign

SCHEMA_VERSION = "1"
EXIT_VERIFIED, EXIT_FALSIFIED, EXIT_USAGE, EXIT_INDETERMINATE = 0, 1, 2, 3
VERDICT_EXIT = {
    "go-verified": EXIT_VERIFIED,
    "go-falsified": EXIT_FALSIFIED,
    "indeterminate": EXIT_INDETERMINATE,
}
TABLE1_COLUMNS = ("key", "g", "k", "h", "params", "verdict", "median residual")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class ReportFile:
    command: dict
    kind: str  # "certification" | "campaign" | "table1"
    payload: dict
    created: str = field(default_factory=_now)
    finished: str = ""
    schema_version: str = SCHEMA_VERSION

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ReportFile":
        data = json.loads(text)
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {data.get('schema_version')!r}")
        return cls(**data)

    def campaign(self) -> CampaignReport:
        return CampaignReport.from_dict(self.payload)

    def write(self, path) -> None:
        Path(path).write_text(self.to_json())


# -- commands ------------------------------------------------------------------


def catalog_table() -> str:
    lines = [f"{'key':<9} {'g':<10} {'k':<17} {'h':<18} {'params':<10} status"]
    for d in list_catalog():
        lines.append(
            f"{d.key:<9} {d.g_name:<10} {d.k_name:<17} {d.h_name:<18} "
            f"{d.params_label():<10} {d.status}"
        )
    return "\n".join(lines)


def certify_space(key: str, params: dict | None = None) -> tuple[dict, int]:
    """Run the invariant suites of a registry entry; returns (payload, exit code)."""
    desc = descriptor(key)
    payload: dict = {"key": key, "kind": desc.kind}
    try:
        if desc.kind == "wallach":
            space = build_wallach(key)
            invariants = space.residuals()
            invariants.update({f"g:{k}": v for k, v in space.algebra.residuals().items()})
            payload["dims"] = {"g": space.algebra.dim, "h": space.h.dim}
            payload["dims"].update({f"m{i + 1}": p.dim for i, p in enumerate(space.m_parts)})
        else:
            resolved = desc.resolve(**(params or {}))
            space = build_space(desc, **resolved)
            invariants = {f"g:{k}": v for k, v in space.algebra.residuals().items()}
            invariants.update(space.residuals())
            dg, dk, dh = expected_dims(desc, resolved)
            payload["params"] = resolved
            payload["dims"] = {
                "g": space.algebra.dim,
                "k": space.h.dim + space.m1.dim,
                "h": space.h.dim,
                "m_F": space.m1.dim,
                "m_B": space.m2.dim,
            }
            payload["expected_dims"] = {"g": dg, "k": dk, "h": dh}
    except CertificationError as err:
        payload.update(passed=False, failed=err.invariant, residual=_finite(err.residual))
        return payload, EXIT_FALSIFIED
    payload["fingerprint"] = space.algebra.fingerprint()
    payload["invariants"] = {k: float(v) for k, v in invariants.items()}
    payload["passed"] = all(v < 1e-10 for v in invariants.values())
    return payload, EXIT_VERIFIED if payload["passed"] else EXIT_FALSIFIED


def _finite(x: float):
    return x if x == x else None


def table1_markdown(results: dict[str, CampaignReport | None]) -> str:
    """Deterministic summary; rows without a report are marked as skipped."""
    lines = ["| " + " | ".join(TABLE1_COLUMNS) + " |", "|" + "---|" * len(TABLE1_COLUMNS)]
    for d in table1_rows():
        rep = results.get(d.key)
        if d.status != "constructed" or rep is None:
            verdict, median = "skipped (not constructed)", "-"
        else:
            verdict, median = rep.verdict, f"{rep.residuals['median']:.3e}"
        row = (d.key, d.g_name, d.k_name, d.h_name, d.params_label(), verdict, median)
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines) + "\n"


def run_table1(samples: int, seed: int, jobs: int = 1, tol_feas=TAU_FEAS, tol_infeas=TAU_INFEAS):
    """Condition-I campaigns on every constructed row; returns (markdown, reports, exit code)."""
    results: dict[str, CampaignReport | None] = {}
    for d in table1_rows():
        if d.status != "constructed":
            results[d.key] = None
            continue
        cfg = CampaignConfig(
            d.key, "condition-i", samples, seed, tol_feas=tol_feas, tol_infeas=tol_infeas, jobs=jobs
        )
        results[d.key] = run_campaign(cfg)
    verdicts = [r.verdict for r in results.values() if r is not None]
    if "go-falsified" in verdicts:
        code = EXIT_FALSIFIED
    elif "indeterminate" in verdicts:
        code = EXIT_INDETERMINATE
    else:
        code = EXIT_VERIFIED
    return table1_markdown(results), results, code


def _summary(rep: CampaignReport) -> str:
    c, r = rep.counts, rep.residuals
    return (
        f"{rep.space_key} [{rep.mode}] {rep.verdict}: "
        f"{c['feasible']} feasible, {c['infeasible']} infeasible, {c['indeterminate']} indeterminate; "
        f"residual min {r['min']:.3e} median {r['median']:.3e} max {r['max']:.3e} "
        f"({rep.wall_time:.2f} s)"
    )


# -- argparse wiring -----------------------------------------------------------


def _default_seed() -> int:
    return int(os.environ.get("GOA2_SEED", "0"))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="goa2", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="registry keys and status")

    c = sub.add_parser("certify", help="run the algebra and decomposition invariant suites")
    c.add_argument("key")
    c.add_argument("--n", type=int)
    c.add_argument("--r", type=int)
    c.add_argument("--out")

    v = sub.add_parser("verify", help="run a sampling campaign on one space")
    v.add_argument("key")
    v.add_argument("--mode", choices=MODES, default="condition-i")
    v.add_argument("--samples", type=int, default=500)
    v.add_argument("--seed", type=int, default=None, help="default: $GOA2_SEED or 0")
    v.add_argument("--phi", nargs="+", default=[])
    v.add_argument("--theta", nargs="+", type=float, default=[])
    v.add_argument("--tol-feas", type=float, default=TAU_FEAS)
    v.add_argument("--tol-infeas", type=float, default=TAU_INFEAS)
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--split", type=int, default=3, choices=(1, 2, 3), help="Wallach summand")
    v.add_argument("--n", type=int)
    v.add_argument("--r", type=int)
    v.add_argument("--out")

    t = sub.add_parser("table1", help="Condition-I campaigns over every constructed row")
    t.add_argument("--samples", type=int, default=500)
    t.add_argument("--seed", type=int, default=None)
    t.add_argument("--jobs", type=int, default=1)
    t.add_argument("--out", help="directory for table1.md and per-row reports")
    return p


def _params(ns) -> dict:
    return {k: getattr(ns, k) for k in ("n", "r") if getattr(ns, k, None) is not None}


def _cmd_list(ns, argv) -> int:
    print(catalog_table())
    return EXIT_VERIFIED


def _cmd_certify(ns, argv) -> int:
    report = ReportFile({"name": "certify", "argv": argv}, "certification", {})
    payload, code = certify_space(ns.key, _params(ns))
    report.payload, report.finished = payload, _now()
    status = "passed" if payload["passed"] else f"FAILED ({payload.get('failed', 'residual')})"
    print(f"{ns.key}: certification {status}; dims {payload.get('dims', {})}")
    if ns.out:
        report.write(ns.out)
    return code


def _cmd_verify(ns, argv) -> int:
    seed = _default_seed() if ns.seed is None else ns.seed
    cfg = CampaignConfig(
        ns.key,
        ns.mode,
        ns.samples,
        seed,
        phi_list=tuple(ns.phi),
        theta_list=tuple(ns.theta),
        tol_feas=ns.tol_feas,
        tol_infeas=ns.tol_infeas,
        jobs=ns.jobs,
        params=tuple(sorted(_params(ns).items())),
        split=ns.split,
    )
    report = ReportFile({"name": "verify", "argv": argv}, "campaign", {})
    rep = run_campaign(cfg)
    report.payload, report.finished = rep.to_dict(), _now()
    print(_summary(rep))
    if ns.out:
        report.write(ns.out)
    return VERDICT_EXIT[rep.verdict]


def _cmd_table1(ns, argv) -> int:
    seed = _default_seed() if ns.seed is None else ns.seed
    markdown, results, code = run_table1(ns.samples, seed, ns.jobs)
    sys.stdout.write(markdown)
    if ns.out:
        out = Path(ns.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "table1.md").write_text(markdown)
        for key, rep in results.items():
            if rep is not None:
                rf = ReportFile({"name": "table1", "argv": argv}, "campaign", rep.to_dict())
                rf.finished = _now()
                rf.write(out / f"{key}.json")
    return code


_HANDLERS = {"list": _cmd_list, "certify": _cmd_certify, "verify": _cmd_verify, "table1": _cmd_table1}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_VERIFIED
    try:
        return _HANDLERS[ns.command](ns, argv)
    except UnknownSpaceError as err:
        print(f"error: unknown space {err.args[0]!r}", file=sys.stderr)
    except NotConstructedError as err:
        print(f"error: {err} (not-constructed)", file=sys.stderr)
    except (ContractError, PhiSyntaxError, PhiDomainError) as err:
        print(f"error: {err}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
