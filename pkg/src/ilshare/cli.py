"""Command-line front end: ``ilshare {shares,count,verify,classify,asymptotics}``.

Exit codes: 0 success, 1 verification mismatch, 2 usage or input error,
3 numeric diagnostic failure.
"""
from __future__ import annotations

import argparse
import datetime
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from ilshare import analytic, kernels
from ilshare.classify import CLASS_PREDICATES, LABEL_BITS, Classifier, oracle_counts
from ilshare.counting import (ClassSystem, CountingError, CountTable, Total, count_system,
                              table_to_csv)
from ilshare.formula import (DEFAULT_GUARD, Alphabet, FormulaSyntaxError, GuardExceeded,
                             Preset, parse, render)
from ilshare.presets import LABELS, preset_system

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

SHARES_SCHEMA_ID = "ilshare.shares/1"
COUNTS_SCHEMA_ID = "ilshare.counts/1"
VERIFY_SCHEMA_ID = "ilshare.verify/1"
CLASSIFY_SCHEMA_ID = "ilshare.classify/1"
ASYMPTOTICS_SCHEMA_ID = "ilshare.asymptotics/1"

DATA_DIR = Path(__file__).parent / "data"
GOLDEN_PATH = DATA_DIR / "golden_counts.json"

SAMPLE_POINTS = (10, 50, 100, 200, 500, 1000, 2000, 5000, 10000)
# below this horizon the asymptotics check is informational only
INFORMATIONAL_BELOW = 200


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    preset: Optional[Preset] = None
    pqs: Optional[tuple[int, int, int]] = None
    horizon: int = 0
    oracle_bound: int = DEFAULT_GUARD
    precision: int = analytic.DEFAULT_PRECISION
    fmt: str = "table"
    output: Optional[str] = None
    digits: int = 30
    timestamp: bool = True

    def __post_init__(self):
        if self.precision < 64:
            raise UsageError(f"precision must be at least 64 bits, got {self.precision}")
        if self.horizon < 0:
            raise UsageError(f"horizon must be nonnegative, got {self.horizon}")
        if self.digits < 1:
            raise UsageError("digits must be positive")

    @property
    def alphabet(self) -> Alphabet:
        if self.preset is not None:
            return Alphabet.preset(self.preset)
        if self.pqs is not None:
            return Alphabet.from_signature(*self.pqs)
        return Alphabet.preset(Preset.MINIMAL)

    def alphabet_doc(self) -> dict:
        a = self.alphabet
        return {"name": self.preset.value if self.preset else "pqs",
                "signature": list(a.signature)}

    def require_preset(self, command: str) -> Preset:
        if self.pqs is not None:
            raise UsageError(f"{command} needs a preset alphabet; --pqs is for F-only commands")
        return self.preset or Preset.MINIMAL


def _parse_pqs(text: str) -> tuple[int, int, int]:
    try:
        p, q, s = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected p,q,s as three integers, got {text!r}")
    if p < 0 or q < 1 or s < 1:
        raise argparse.ArgumentTypeError(f"need p >= 0, q >= 1, s >= 1; got {text!r}")
    return p, q, s


def _fmt(mp, x, digits: int) -> str:
    return mp.nstr(x, digits, strip_zeros=False)


def _stamp(doc: dict, config: RunConfig) -> dict:
    if config.timestamp:
        doc["generated_at"] = datetime.datetime.now(datetime.timezone.utc).isoformat(
            timespec="seconds")
    return doc


def _dump(doc) -> str:
    return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"


def _emit(text: str, config: RunConfig) -> None:
    if config.output:
        Path(config.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _table(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(str(cell)) for cell in col) for col in zip(header, *rows)]
    lines = ["  ".join(str(c).ljust(w) for c, w in zip(row, widths)).rstrip()
             for row in [header, *rows]]
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# shares


def shares_report(preset: Preset, config: RunConfig) -> dict:
    """Closed-form shares of every class over ``preset``, as a JSON-ready dict."""
    system = preset_system(preset)
    res = analytic.run_pipeline(system, config.precision)
    ctx = res.context
    mp = ctx.mp
    d = config.digits
    c_f = analytic.total_constant(ctx)

    table = None
    if config.horizon:
        if config.horizon < 50:
            raise UsageError("convergence diagnostics need --horizon >= 50 (or 0 to skip)")
        table = count_system(system, config.horizon)

    names = [n for n in LABELS if n in system.classes]
    names += [n for n in system.classes if n not in LABELS]
    classes = []
    for name in names:
        value = res[name]
        entry = {
            "name": name,
            "label": name in LABELS,
            "rule": system.rules.get(name, ""),
            "shape": value.provenance,
            "lambda": _fmt(mp, value.lam, d),
            "mu": _fmt(mp, value.mu, d),
            "asymptotic_constant": _fmt(mp, value.mu * c_f, d),
            "diagnostics": None,
        }
        if table is not None:
            diag = analytic.diagnose_convergence(table, res, name, strict=True)
            entry["diagnostics"] = {
                "share_deviation": {str(n): mp.nstr(v, 6) for n, v in diag.deviations.items()},
                "lambda_gap": mp.nstr(diag.lambda_gap, 6),
                "tail_bound": mp.nstr(diag.tail_bound, 6),
                "lambda_within_tail_bound": diag.lambda_ok,
                "non_increasing": diag.non_increasing,
            }
        classes.append(entry)
    return {
        "alphabet": {"name": preset.value, "signature": list(system.alphabet.signature)},
        "precision": config.precision,
        "digits": d,
        "r": _fmt(mp, ctx.r, d),
        "lambda_F": _fmt(mp, ctx.lambda_F, d),
        "c_F": _fmt(mp, c_f, d),
        "horizon": config.horizon,
        "classes": classes,
    }


def _render_shares(report: dict) -> str:
    a = report["alphabet"]
    out = [f"alphabet {a['name']} (p,q,s)={tuple(a['signature'])}  r={report['r']}\n"]
    rows = [[c["name"], c["rule"], c["lambda"], c["mu"]] for c in report["classes"]]
    out.append(_table(["class", "rule", "lambda", "mu"], rows))
    if report["horizon"]:
        N = report["horizon"]
        keys = [str(N // 4), str(N // 2), str(N)]
        rows = []
        for c in report["classes"]:
            dg = c["diagnostics"]
            rows.append([c["name"], *(dg["share_deviation"][k] for k in keys),
                         dg["lambda_gap"], "yes" if dg["lambda_within_tail_bound"] else "NO"])
        out.append(f"\nconvergence at horizon {N} (tail bound {report['classes'][0]['diagnostics']['tail_bound']})\n")
        out.append(_table(["class", *(f"|dev| n={k}" for k in keys), "lambda gap", "in bound"],
                          rows))
    return "".join(out)


def cmd_shares(config: RunConfig, presets: list[Preset]) -> int:
    reports = [shares_report(p, config) for p in presets]
    if config.fmt == "json":
        _emit(_dump(_stamp({"schema": SHARES_SCHEMA_ID, "alphabets": reports}, config)), config)
    elif config.fmt == "table":
        _emit("\n".join(_render_shares(r) for r in reports), config)
    else:
        raise UsageError("shares supports --format table or json")
    return EXIT_OK


# --------------------------------------------------------------------------
# count


def _count_table(config: RunConfig, classes: Optional[list[str]]) -> tuple[CountTable, list[str]]:
    if config.pqs is not None:
        names = classes or ["F"]
        bad = [n for n in names if n != "F"]
        if bad:
            raise UsageError(f"classes {bad} need a preset alphabet; --pqs only supports F")
        system = ClassSystem(config.alphabet, {"F": Total()}, {})
    else:
        system = preset_system(config.preset or Preset.MINIMAL)
        names = classes or list(LABELS)
        bad = [n for n in names if n not in system.classes]
        if bad:
            raise UsageError(f"unknown classes {bad}; known: {', '.join(system.classes)}")
    return count_system(system, config.horizon), names


def cmd_count(config: RunConfig, classes: Optional[list[str]]) -> int:
    table, names = _count_table(config, classes)
    if config.fmt == "csv":
        _emit(table_to_csv(table, names), config)
    elif config.fmt == "json":
        doc = {"schema": COUNTS_SCHEMA_ID, "alphabet": config.alphabet_doc(),
               "horizon": table.horizon,
               "counts": {n: [str(x) for x in table[n]] for n in names}}
        _emit(_dump(_stamp(doc, config)), config)
    else:
        rows = [[str(n), *(str(table[c][n]) for c in names)] for n in range(table.horizon + 1)]
        _emit(_table(["n", *names], rows), config)
    return EXIT_OK


# --------------------------------------------------------------------------
# verify


def load_golden(path: Union[str, Path] = GOLDEN_PATH) -> dict:
    path = Path(path)
    if not path.exists():
        return {"schema": "ilshare.golden/1", "alphabets": {}}
    return json.loads(path.read_text(encoding="utf-8"))


def seed_golden(preset: Preset, counts: dict[str, list[int]], path: Union[str, Path]) -> None:
    doc = load_golden(path)
    doc["alphabets"][preset.value] = {
        "upto": len(next(iter(counts.values()))) - 1,
        "counts": {name: counts[name] for name in sorted(counts)},
    }
    doc["alphabets"] = {k: doc["alphabets"][k] for k in sorted(doc["alphabets"])}
    # one line per class keeps the committed file diffable
    lines = ["{", f'  "schema": {json.dumps(doc["schema"])},', '  "alphabets": {']
    for i, (name, entry) in enumerate(doc["alphabets"].items()):
        lines.append(f'    {json.dumps(name)}: {{"upto": {entry["upto"]}, "counts": {{')
        rows = [f"      {json.dumps(c, ensure_ascii=False)}: {json.dumps(v)}"
                for c, v in entry["counts"].items()]
        lines.append(",\n".join(rows))
        lines.append("    }}" + ("," if i < len(doc["alphabets"]) - 1 else ""))
    lines += ["  }", "}"]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_verify(config: RunConfig, seed: Optional[str] = None) -> int:
    preset = config.require_preset("verify")
    system = preset_system(preset)
    names = [n for n in system.classes if n in CLASS_PREDICATES]
    expected = oracle_counts(system.alphabet, config.horizon, names, config.oracle_bound)
    got = count_system(system, config.horizon)

    verdicts = []
    first_bad = None
    for name in names:
        for n in range(config.horizon + 1):
            ok = expected[name][n] == got[name][n]
            verdicts.append((name, n, expected[name][n], got[name][n], ok))
            if not ok and first_bad is None:
                first_bad = verdicts[-1]

    if seed is not None and first_bad is None:
        seed_golden(preset, expected, seed)

    if config.fmt == "json":
        doc = {"schema": VERIFY_SCHEMA_ID, "alphabet": config.alphabet_doc(),
               "upto": config.horizon, "passed": first_bad is None,
               "verdicts": [{"class": c, "n": n, "expected": str(e), "got": str(g), "ok": ok}
                            for c, n, e, g, ok in verdicts]}
        _emit(_dump(_stamp(doc, config)), config)
    else:
        lines = [f"{'ok  ' if ok else 'FAIL'} {c} n={n} oracle={e} dp={g}"
                 for c, n, e, g, ok in verdicts]
        passed = sum(v[-1] for v in verdicts)
        lines.append(f"{passed}/{len(verdicts)} (class, n) pairs match over {preset.value} "
                     f"up to complexity {config.horizon}")
        _emit("\n".join(lines) + "\n", config)

    if first_bad is not None:
        c, n, e, g, _ = first_bad
        print(f"mismatch: class {c} n={n} expected {e} got {g}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


# --------------------------------------------------------------------------
# classify


def cmd_classify(config: RunConfig, text: str) -> int:
    alphabet = Alphabet.preset(config.require_preset("classify"))
    try:
        f = parse(text, alphabet)
    except FormulaSyntaxError as exc:
        raise UsageError(f"cannot parse {text!r}: {exc}")
    profile = Classifier(alphabet).profile(f)
    letters = [label.letter for label in LABEL_BITS]
    if config.fmt == "json":
        doc = {"schema": CLASSIFY_SCHEMA_ID, "alphabet": config.alphabet_doc(),
               "formula": render(f, alphabet),
               "memberships": {k: profile[k] for k in letters},
               "patterns": sorted(profile.patterns)}
        _emit(_dump(doc), config)
    else:
        lines = [f"formula {render(f, alphabet)}"]
        lines += [f"{k} {'true' if profile[k] else 'false'}" for k in letters]
        lines.append("patterns " + (" ".join(sorted(profile.patterns)) or "-"))
        _emit("\n".join(lines) + "\n", config)
    return EXIT_OK


# --------------------------------------------------------------------------
# asymptotics


def asymptotics_report(config: RunConfig) -> dict:
    N = config.horizon
    if N < 2:
        raise UsageError("asymptotics needs --horizon >= 2")
    a = config.alphabet
    ctx = analytic.AnalyticContext.for_alphabet(a, config.precision)
    mp = ctx.mp
    f = count_system(ClassSystem(a, {"F": Total()}, {}), N).total
    c_f = analytic.total_constant(ctx)
    points = sorted({n for n in SAMPLE_POINTS if n <= N} | {N})

    samples = {}
    for n in points:
        ratio = mp.mpf(f[n - 1]) / f[n]
        scaled = mp.mpf(f[n]) * mp.mpf(n) ** mp.mpf(1.5) * ctx.r ** n
        samples[n] = (ratio, abs(ratio - ctx.r) / ctx.r, scaled, abs(scaled - c_f) / c_f)

    informational = N < INFORMATIONAL_BELOW
    passed = True
    if not informational:
        ref = samples[INFORMATIONAL_BELOW]
        last = samples[N]
        passed = last[1] < ref[1] and last[3] <= ref[3]
    d = config.digits
    return {
        "alphabet": config.alphabet_doc(),
        "horizon": N,
        "r": _fmt(mp, ctx.r, d),
        "c_F": _fmt(mp, c_f, d),
        "informational": informational,
        "passed": passed,
        "samples": [
            {"n": n, "ratio": _fmt(mp, ratio, d), "ratio_deviation": mp.nstr(rd, 6),
             "scaled": _fmt(mp, sc, d), "scaled_deviation": mp.nstr(sd, 6)}
            for n, (ratio, rd, sc, sd) in samples.items()
        ],
    }


def cmd_asymptotics(config: RunConfig) -> int:
    report = asymptotics_report(config)
    if config.fmt == "json":
        _emit(_dump(_stamp({"schema": ASYMPTOTICS_SCHEMA_ID, **report}, config)), config)
    else:
        head = (f"r={report['r']}  c_F={report['c_F']}\n"
                "ratio = f(n-1)/f(n) vs r; scaled = f(n) n^1.5 r^n vs c_F; deviations relative\n")
        rows = [[str(s["n"]), s["ratio"][:14], s["ratio_deviation"], s["scaled"][:14],
                 s["scaled_deviation"]] for s in report["samples"]]
        tail = ""
        if report["informational"]:
            tail = f"horizon below {INFORMATIONAL_BELOW}: deviations are informational only\n"
        elif not report["passed"]:
            tail = f"deviation at n={report['horizon']} did not shrink relative to n={INFORMATIONAL_BELOW}\n"
        _emit(head + _table(["n", "ratio", "ratio dev", "scaled", "scaled dev"], rows) + tail,
              config)
    if not report["passed"]:
        print("divergence: asymptotic deviations did not decrease", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


# --------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ilshare",
        description="Exact counts and asymptotic shares of closed IL formula classes.")
    parser.add_argument("--kernel", choices=sorted(kernels.BACKENDS),
                        help=f"convolution backend (default {kernels.BACKEND})")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats, default_fmt, pqs=False, timestamp=True):
        presets = [x.value for x in Preset]
        if pqs:
            group = p.add_mutually_exclusive_group()
            group.add_argument("--alphabet", choices=presets, help="preset alphabet")
            group.add_argument("--pqs", type=_parse_pqs, metavar="P,Q,S",
                               help="inline alphabet signature (F-only commands)")
        else:
            p.add_argument("--alphabet", choices=presets, default="minimal")
        p.add_argument("--format", dest="fmt", choices=formats, default=default_fmt)
        p.add_argument("--output", "-o", help="write to this file instead of stdout")
        if timestamp:
            p.add_argument("--no-timestamp", action="store_true",
                           help="omit the generated_at field from JSON output")

    p = sub.add_parser("shares", help="closed-form lambda and mu for every class")
    p.add_argument("--alphabet", choices=[x.value for x in Preset] + ["all"], default="minimal")
    p.add_argument("--horizon", type=int, default=0,
                   help="count up to this complexity and add convergence diagnostics (0: skip)")
    p.add_argument("--precision", type=int, default=analytic.DEFAULT_PRECISION)
    p.add_argument("--digits", type=int, default=30, help="significant digits in the output")
    p.add_argument("--format", dest="fmt", choices=["table", "json"], default="table")
    p.add_argument("--output", "-o")
    p.add_argument("--no-timestamp", action="store_true")

    p = sub.add_parser("count", help="exact counts w_0..w_N")
    common(p, ["csv", "json", "table"], "csv", pqs=True)
    p.add_argument("--upto", type=int, required=True)
    p.add_argument("--classes", help="comma-separated class names (default: the nine labels)")

    p = sub.add_parser("verify", help="compare the counts against brute-force enumeration")
    common(p, ["table", "json"], "table")
    p.add_argument("--upto", type=int, default=6)
    p.add_argument("--limit", type=int, default=DEFAULT_GUARD,
                   help="refuse to enumerate more than this many formulas")
    p.add_argument("--seed-tables", nargs="?", const=str(GOLDEN_PATH), metavar="PATH",
                   help="store the oracle counts in the golden file (default: shipped data)")

    p = sub.add_parser("classify", help="class memberships of one formula")
    common(p, ["table", "json"], "table", timestamp=False)
    p.add_argument("formula")

    p = sub.add_parser("asymptotics", help="ratio and n^(3/2) scaling of the total counts")
    common(p, ["table", "json"], "table", pqs=True)
    p.add_argument("--horizon", type=int, default=2000)
    p.add_argument("--precision", type=int, default=analytic.DEFAULT_PRECISION)
    p.add_argument("--digits", type=int, default=30)
    return parser


def _config(args) -> RunConfig:
    alphabet = getattr(args, "alphabet", None)
    pqs = getattr(args, "pqs", None)
    horizon = getattr(args, "horizon", None)
    if horizon is None:
        horizon = getattr(args, "upto", 0)
    return RunConfig(
        preset=Preset(alphabet) if alphabet and alphabet != "all" else None,
        pqs=pqs,
        horizon=horizon,
        oracle_bound=getattr(args, "limit", DEFAULT_GUARD),
        precision=getattr(args, "precision", analytic.DEFAULT_PRECISION),
        fmt=args.fmt,
        output=args.output,
        digits=getattr(args, "digits", 30),
        timestamp=not getattr(args, "no_timestamp", False),
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.kernel:
        kernels.use(args.kernel)
    try:
        config = _config(args)
        if args.command == "shares":
            presets = list(Preset) if args.alphabet == "all" else [Preset(args.alphabet)]
            return cmd_shares(config, presets)
        if args.command == "count":
            classes = [c.strip() for c in args.classes.split(",")] if args.classes else None
            return cmd_count(config, classes)
        if args.command == "verify":
            return cmd_verify(config, args.seed_tables)
        if args.command == "classify":
            return cmd_classify(config, args.formula)
        return cmd_asymptotics(config)
    except (UsageError, GuardExceeded, CountingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except analytic.CombinatorError as exc:
        print(f"combinator precondition failed: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except analytic.DivergenceError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
