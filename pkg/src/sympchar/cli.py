"""Command-line verification harness.

    sympchar verify --m 2 --f 1 --checks all --mode exhaustive
    sympchar verify --m 2 --f 3 --checks theorem --mode sampled --count 1000 --seed 42

Exit status: 0 when every applicable check passes, 1 on a failed check,
2 on a usage or configuration error.
"""

import argparse
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
import logging
import os
import sys
import time

from . import permchar, srg
from .errors import BoundExceededError
from .gf import MAX_DEGREE, field as gf_field, field_axioms
from .grp import DEFAULT_ENUM_BOUND, sp_order
from .permchar import DEFAULT_PRODUCT_BOUND
from .report import Record, VerificationReport

log = logging.getLogger("sympchar")

CHECKS = (
    "fields", "srg", "degrees", "rank3", "eq1", "orbits",
    "eq2", "eq3", "eq4", "theorem", "corollary",
)
# checks whose statement assumes m >= 2 (for m = 1, v^perp = <v>)
NEEDS_M2 = {"srg", "degrees", "eq1", "eq2", "eq3", "eq4", "orbits"}

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    cases: list
    checks: list = field(default_factory=lambda: list(CHECKS))
    mode: str = "exhaustive"
    count: int = 1000
    seed: object = None
    max_enum: int = DEFAULT_ENUM_BOUND
    max_product: int = DEFAULT_PRODUCT_BOUND
    format: str = "table"

    def validate(self):
        if not self.cases:
            raise ConfigError("no cases given; pass at least one --m/--f pair")
        for m, f in self.cases:
            if m < 1 or not 1 <= f <= MAX_DEGREE:
                raise ConfigError(f"invalid case m={m}, f={f}: need m >= 1 and 1 <= f <= {MAX_DEGREE}")
        unknown = set(self.checks) - set(CHECKS)
        if unknown:
            raise ConfigError(f"unknown checks: {', '.join(sorted(unknown))}")
        if self.mode not in ("exhaustive", "sampled"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.mode == "sampled" and self.seed is None:
            raise ConfigError("sampled mode requires --seed")
        if self.count < 1:
            raise ConfigError("--count must be positive")
        if self.seed is not None and not 0 <= self.seed < 1 << 64:
            raise ConfigError("--seed must be a 64-bit unsigned integer")

    def to_json(self):
        d = asdict(self)
        d["cases"] = [list(c) for c in self.cases]
        return d


def _fields_record(m, ctx):
    t0 = time.perf_counter()
    got = field_axioms(ctx)
    want = {k: True for k in got}
    ms = int((time.perf_counter() - t0) * 1000)
    return Record(
        "fields", (m, ctx.q), got, want,
        "field axioms; |{a + a^2}| = q/2 = |ker Tr|", got == want, ms,
        f"modulus {ctx.modulus:#x}",
    )


def _skipped(check_id, m, q, reason):
    return Record(check_id, (m, q), None, None, "", None, 0, reason)


def run_case(m, f, config):
    """Run the selected checks for one (m, f) pair, in dependency order."""
    ctx = gf_field(f)
    q = ctx.q
    records = []
    mode, seed = config.mode, config.seed
    if mode == "exhaustive" and sp_order(m, q) > config.max_enum and {"theorem", "corollary"} & set(config.checks):
        seed = seed if seed is not None else 0
        log.warning(
            "|Sp_%d(%d)| = %d exceeds --max-enum %d; theorem/corollary fall back to %d sampled elements (seed %d)",
            2 * m, q, sp_order(m, q), config.max_enum, config.count, seed,
        )
        mode = "sampled"
    chi = None
    for check in CHECKS:
        if check not in config.checks:
            continue
        if m == 1 and check in NEEDS_M2:
            records.append(_skipped(check, m, q, "not applicable for m = 1: v^perp = <v> and the perp graph is edgeless"))
            continue
        try:
            if check == "fields":
                rec = _fields_record(m, ctx)
            elif check == "srg":
                rec = srg.srg_record(m, ctx)
                chi = tuple(rec.computed["chi_degrees"])
            elif check == "degrees":
                rec = permchar.verify_degree_identities(m, ctx, chi)
            elif check == "rank3":
                rec = srg.rank3_record(m, ctx)
            elif check == "eq1":
                rec = permchar.verify_stabilizer_orbits(m, ctx)
            elif check == "orbits":
                rec = permchar.verify_orbit_structure(m, ctx, config.max_enum)
            elif check == "eq2":
                rec = permchar.verify_form_self_products(m, ctx, config.max_product)
            elif check == "eq3":
                rec = permchar.verify_form_cross_product(m, ctx, config.max_product)
            elif check == "eq4":
                rec = permchar.verify_vector_form_products(m, ctx, config.max_product)
            elif check == "theorem":
                rec = permchar.verify_theorem(m, ctx, mode, seed, config.count, config.max_enum)
            else:
                rec = permchar.verify_corollary(m, ctx, mode, seed, config.count, config.max_enum)
        except BoundExceededError as exc:
            rec = Record(check, (m, q), None, None, "", False, 0, f"bound exceeded: {exc}")
        records.append(rec)
    return records


def _workers(n_cases):
    cap = os.environ.get("SYMPCHAR_THREADS")
    limit = int(cap) if cap else (os.cpu_count() or 1)
    return max(1, min(limit, n_cases))


def run(config):
    """Execute every case; returns (report, exit code)."""
    config.validate()
    report = VerificationReport(config=config.to_json())
    workers = _workers(len(config.cases))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = pool.map(run_case, *zip(*config.cases), [config] * len(config.cases))
            for recs in results:
                report.records.extend(recs)
    else:
        for m, f in config.cases:
            report.records.extend(run_case(m, f, config))
    report = report.sorted()
    return report, EXIT_OK if report.ok else EXIT_FAIL


def format_table(report):
    def show(x):
        if isinstance(x, dict):
            return ", ".join(f"{k}={show(v)}" for k, v in x.items())
        if isinstance(x, (list, tuple)):
            return "(" + ",".join(str(v) for v in x) + ")"
        return str(x)

    lines = []
    for r in report.records:
        status = {True: "PASS", False: "FAIL", None: "SKIP"}[r.passed]
        m, q = r.case
        lines.append(f"{status}  m={m} q={q:<3} {r.check_id:<10} {r.elapsed_ms:>7} ms  {show(r.computed)}")
        if r.passed is False:
            lines.append(f"      expected: {show(r.expected)}")
        if r.note and r.passed is not True:
            lines.append(f"      {r.note}")
    s = report.summary()
    lines.append(f"{s['passed']} passed, {s['failed']} failed, {s['skipped']} skipped, {s['total']} total")
    return "\n".join(lines)


def build_parser():
    parser = argparse.ArgumentParser(prog="sympchar", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run verification checks")
    v.add_argument("--m", type=int, action="append", default=[], help="half-dimension (repeatable)")
    v.add_argument("--f", type=int, action="append", default=[], help="q = 2^f (repeatable, paired with --m)")
    v.add_argument("--checks", default="all", help=f"comma list from {','.join(CHECKS)} or 'all'")
    v.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    v.add_argument("--count", type=int, default=1000, help="elements to sample")
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--format", choices=("table", "json"), default="table")
    v.add_argument("--max-enum", type=int, default=DEFAULT_ENUM_BOUND)
    v.add_argument("--max-product", type=int, default=DEFAULT_PRODUCT_BOUND)
    v.add_argument("--out", default=None, help="also write the JSON report here")
    v.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if len(args.m) != len(args.f):
        parser.error("--m and --f must be given the same number of times")
    checks = list(CHECKS) if args.checks == "all" else [c.strip() for c in args.checks.split(",") if c.strip()]
    config = RunConfig(
        cases=list(zip(args.m, args.f)),
        checks=checks,
        mode=args.mode,
        count=args.count,
        seed=args.seed,
        max_enum=args.max_enum,
        max_product=args.max_product,
        format=args.format,
    )
    try:
        report, code = run(config)
    except ConfigError as exc:
        parser.error(str(exc))
    text = report.dumps() if args.format == "json" else format_table(report)
    print(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(report.dumps() + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
