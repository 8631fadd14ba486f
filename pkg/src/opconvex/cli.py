"""Command-line front end: ``opconvex verify | counterexample | check``.

Exit codes
  verify          0 clean, 1 a theorem check failed, 2 bad config, 3 IO error
  counterexample  0 iff the second eigenvalue is negative and S # T matches
  check           0 Pass/Marginal, 1 Fail, 2 unparsable input, 3 IO error
"""
import argparse
import json
import sys

import numpy as np

from . import __version__
from .core import LOEWNER_TOL, make_hermitian
from .errors import InvalidConfigError, OpConvexError, ParseError
from .funcalc import SQRT, parse
from .posmaps import TracialFunctional, parse_map, unitalize
from .verifier import checks as ck
from .verifier.campaign import CampaignConfig, run_campaign
from .outcomes import Verdict, worst_of

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3
REFERENCE_ATOL = 1e-4


# ---------------------------------------------------------------------------
# matrix files
# ---------------------------------------------------------------------------

def parse_matrix_text(text, source="<matrix>"):
    """First line ``d``, then d rows of d complex tokens such as ``1.5-2j``."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ParseError(f"{source}: empty matrix file")
    try:
        d = int(lines[0])
    except ValueError:
        raise ParseError(f"{source}: first line must be the dimension, got {lines[0]!r}") from None
    if d < 1:
        raise ParseError(f"{source}: dimension must be positive")
    rows = lines[1:]
    if len(rows) != d:
        raise ParseError(f"{source}: expected {d} rows, found {len(rows)}")
    M = np.empty((d, d), dtype=np.complex128)
    for i, row in enumerate(rows):
        tokens = row.split()
        if len(tokens) != d:
            raise ParseError(f"{source}: row {i + 1} has {len(tokens)} entries, expected {d}")
        for j, tok in enumerate(tokens):
            try:
                M[i, j] = complex(tok.replace("i", "j"))
            except ValueError:
                raise ParseError(f"{source}: bad entry {tok!r} at ({i + 1}, {j + 1})") from None
    if not np.all(np.isfinite(M)):
        raise ParseError(f"{source}: non-finite entry")
    return make_hermitian(M).entries


def read_matrix(path):
    with open(path, encoding="utf-8") as fh:
        return parse_matrix_text(fh.read(), path)


def format_matrix(M, digits=8):
    M = np.asarray(M)
    if np.allclose(M.imag, 0.0):
        M = M.real
    rows = ("  ".join(f"{x:>{digits + 6}.{digits}f}" for x in row) for row in M)
    return "\n".join("  " + r for r in rows)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _str_list(text):
    return [t.strip() for t in text.split(",") if t.strip()]


def _globals():
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="master seed (default 1)")
    g.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="Loewner tolerance (default 1e-9)")
    g.add_argument("--out", default=argparse.SUPPRESS, help="write JSON output to this path")
    g.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="print JSON to stdout")
    return g


CHECK_IDS = (
    "main_convexity", "proof_chain", "harmonic_subadditivity", "f_mean_inequality",
    "mean_subadditivity", "mean_ordering", "geometric_block", "geometric_path", "monotonicity",
    "jensen", "kadison", "trace_switch", "lieb_convexity", "separate_convexity", "joint_convexity",
)


def build_parser():
    common = _globals()
    parser = argparse.ArgumentParser(prog="opconvex", parents=[common],
                                     description="Numerical verifier for operator convexity inequalities.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run a randomized campaign")
    v.add_argument("--config", help="JSON config file; flags override its fields")
    v.add_argument("--dims", type=_int_list)
    v.add_argument("--trials", type=int, dest="trials_per_check")
    v.add_argument("--checks", type=_str_list)
    v.add_argument("--f-families", type=_str_list)
    v.add_argument("--g-families", type=_str_list)
    v.add_argument("--maps", type=_str_list, dest="map_families")
    v.add_argument("--harsh", action="store_true", default=None, dest="harsh_mode")
    v.add_argument("--no-controls", action="store_false", default=None, dest="controls")
    v.add_argument("--control-trials", type=int)
    v.add_argument("--workers", type=int)

    sub.add_parser("counterexample", parents=[common], help="reproduce the 2x2 counterexample")

    c = sub.add_parser("check", parents=[common], help="evaluate one check on matrices from files")
    c.add_argument("check_id", help="one of: " + ", ".join(CHECK_IDS))
    c.add_argument("--x", help="first matrix file")
    c.add_argument("--y", help="second matrix file")
    c.add_argument("--x2", help="second point for two-point checks")
    c.add_argument("--y2", help="second point, second variable")
    c.add_argument("--fixed-point", help="matrix held fixed in separate_convexity")
    c.add_argument("--fixed", choices=("x", "y"), default="x")
    c.add_argument("--anchor", help="anchor matrix for unitalizing the map (default I)")
    c.add_argument("--k", help="matrix K for lieb_convexity (default I)")
    c.add_argument("--f", default="resolvent:1.0", help="OMDPos function (default resolvent:1.0)")
    c.add_argument("--g", help="OM function (default log; power:0.5 for geometric_path)")
    c.add_argument("--h", default="log", help="function for trace_switch")
    c.add_argument("--f1", default="resolvent:1.0")
    c.add_argument("--f2", default="resolvent:1.0")
    c.add_argument("--map", default="identity", help="positive map descriptor (default identity)")
    c.add_argument("--psi", default="identity", help="second map descriptor")
    c.add_argument("--mean", default="harmonic", choices=("arithmetic", "harmonic", "geometric"))
    c.add_argument("--trace-coeff", type=float, default=1.0, help="tau = c * Tr")
    c.add_argument("--no-class-gate", action="store_true", help="skip the OM / OMDPos hypothesis gate")
    return parser


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _write(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
        fh.write("\n")


def _campaign_config(args):
    data = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InvalidConfigError(f"{args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise InvalidConfigError(f"{args.config}: config must be a JSON object")
    overrides = {
        "seed": getattr(args, "seed", None),
        "tolerance": getattr(args, "tol", None),
        "output": getattr(args, "out", None),
    }
    for name in ("dims", "trials_per_check", "checks", "f_families", "g_families", "map_families",
                 "harsh_mode", "controls", "control_trials", "workers"):
        overrides[name] = getattr(args, name)
    data.update({k: v for k, v in overrides.items() if v is not None})
    return CampaignConfig.from_dict(data)


def cmd_verify(args, out=sys.stdout, err=sys.stderr):
    try:
        cfg = _campaign_config(args)
    except InvalidConfigError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_IO
    report = run_campaign(cfg)
    text = report.to_json()
    path = cfg.output or "opconvex_report.json"
    try:
        _write(path, text)
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=err)
        return EXIT_IO
    if getattr(args, "json", False):
        print(text, file=out)
    else:
        print(f"{'check':<34}{'total':>8}{'pass':>8}{'marg':>7}{'fail':>6}  worst norm. margin", file=out)
        body = report.body()
        for name, s in body["checks"].items():
            print(f"{name:<34}{s['total']:>8}{s['passed']:>8}{s['marginal']:>7}{s['failed']:>6}"
                  f"  {s['worst_normalized_margin']:.3e}", file=out)
        for name, s in body["negative_controls"]["checks"].items():
            found = "detected" if s["failed"] else "NOT DETECTED"
            print(f"control {name:<26}{s['total']:>8}{'':>8}{'':>7}{s['failed']:>6}  {found}", file=out)
        print(f"theorem failures: {report.theorem_failures}; report: {path}", file=out)
    if cfg.controls and not all(report.controls_detected.values()):
        print("warning: a negative control produced no Fail", file=err)
    return EXIT_FAIL if report.theorem_failures else EXIT_OK


def counterexample_result():
    cx = ck.reproduce_counterexample()
    matches = bool(np.allclose(np.real(cx.S_geo_T), ck.REFERENCE_S_GEO_T, rtol=0.0, atol=REFERENCE_ATOL))
    data = cx.to_dict()
    data["matches_reference"] = matches
    data["negative"] = bool(cx.eigenvalues[1] < 0.0)
    return data


def cmd_counterexample(args, out=sys.stdout, err=sys.stderr):
    data = counterexample_result()
    text = json.dumps(data, indent=2)
    if getattr(args, "out", None):
        try:
            _write(args.out, text)
        except OSError as exc:
            print(f"error: {exc}", file=err)
            return EXIT_IO
    if getattr(args, "json", False):
        print(text, file=out)
    else:
        blocks = (("S", data["S"]), ("T", data["T"]), ("S # T", data["S_geo_T"]),
                  ("(sqrt S + sqrt T)/2 - sqrt(S # T)", data["difference"]))
        for title, M in blocks:
            print(f"{title}:", file=out)
            print(format_matrix(M), file=out)
        lam1, lam2 = data["eigenvalues"]
        print(f"eigenvalues: lambda1 = {lam1:.10f}, lambda2 = {lam2:.10f}", file=out)
        print(f"S # T matches reference (atol {REFERENCE_ATOL:g}): {data['matches_reference']}", file=out)
        print(f"midpoint inequality along the geometric path fails: {data['negative']}", file=out)
    return EXIT_OK if data["negative"] and data["matches_reference"] else EXIT_FAIL


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise ParseError(f"check {args.check_id} needs --{' --'.join(m.replace('_', '-') for m in missing)}")
    return [read_matrix(getattr(args, n)) for n in names]


def run_check(args):
    cid = args.check_id.removeprefix("check_")
    tol = getattr(args, "tol", LOEWNER_TOL)
    seed = getattr(args, "seed", 0)
    if cid not in CHECK_IDS:
        raise ParseError(f"unknown check {args.check_id!r}; expected one of {', '.join(CHECK_IDS)}")

    def fmap(dim, text=None):
        return parse_map(text or args.map, dim)

    if cid in ("main_convexity", "proof_chain"):
        X, Y = _need(args, "x", "y")
        g, f, phi = parse(args.g or "log"), parse(args.f), fmap(X.shape[0])
        if cid == "main_convexity":
            return ck.check_main_convexity(g, f, phi, X, Y, tol, seed, grid=False,
                                           enforce_classes=not args.no_class_gate)
        return worst_of("proof_chain", ck.check_proof_chain(g, f, phi, X, Y, tol, seed), seed)
    if cid == "harmonic_subadditivity":
        X, Y = _need(args, "x", "y")
        return ck.check_harmonic_subadditivity(fmap(X.shape[0]), X, Y, tol, seed)
    if cid == "f_mean_inequality":
        X, Y = _need(args, "x", "y")
        return ck.check_f_mean_inequality(parse(args.f), X, Y, tol, seed)
    if cid == "mean_subadditivity":
        X, Y = _need(args, "x", "y")
        return ck.check_mean_subadditivity(args.mean, fmap(X.shape[0]), X, Y, tol, seed)
    if cid == "mean_ordering":
        X, Y = _need(args, "x", "y")
        return ck.check_mean_ordering(X, Y, tol, seed)
    if cid == "geometric_block":
        X, Y = _need(args, "x", "y")
        return ck.check_geometric_block_outcome(X, Y, tol, seed)
    if cid == "geometric_path":
        X, Y = _need(args, "x", "y")
        g = parse(args.g) if args.g else SQRT
        return ck.check_geometric_path(g, X, Y, tol, seed)
    if cid == "monotonicity":
        X, Y = _need(args, "x", "y")
        return ck.check_monotone(parse(args.f), X, Y - X, tol, seed)
    if cid in ("jensen", "kadison"):
        (X,) = _need(args, "x")
        d = X.shape[0]
        anchor = read_matrix(args.anchor) if args.anchor else np.eye(d)
        phi_u = unitalize(fmap(d), anchor)
        if cid == "jensen":
            return ck.check_jensen(phi_u, X, tol=tol, seed=seed)
        return ck.check_kadison(phi_u, X, tol, seed)
    if cid == "trace_switch":
        X, Y = _need(args, "x", "y")
        return ck.check_trace_switch(X, Y, parse(args.h), seed=seed)
    if cid == "lieb_convexity":
        X, Y = _need(args, "x", "y")
        phi = fmap(X.shape[0])
        K = read_matrix(args.k) if args.k else np.eye(phi.out_dim)
        X2 = read_matrix(args.x2) if args.x2 else None
        return ck.check_lieb_convexity(parse(args.f1), parse(args.f2), phi, TracialFunctional(args.trace_coeff),
                                       K, X, Y, X2, tol, seed)
    if cid == "separate_convexity":
        P, A, B = _need(args, "fixed_point", "x", "x2")
        phi_dim, psi_dim = (P.shape[0], A.shape[0]) if args.fixed == "x" else (A.shape[0], P.shape[0])
        return ck.check_separate_convexity_two_var(parse(args.f1), parse(args.f2), parse(args.g or "log"),
                                                   fmap(phi_dim), fmap(psi_dim, args.psi),
                                                   args.fixed, P, A, B, tol, seed)
    X1, Y1, X2, Y2 = _need(args, "x", "y", "x2", "y2")
    return ck.check_joint_convexity(parse(args.f1), parse(args.f2), fmap(X1.shape[0]),
                                    fmap(Y1.shape[0], args.psi), TracialFunctional(args.trace_coeff),
                                    (X1, Y1), (X2, Y2), tol, seed)


def cmd_check(args, out=sys.stdout, err=sys.stderr):
    try:
        outcome = run_check(args)
    except OSError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_IO
    except (OpConvexError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_CONFIG
    text = json.dumps(outcome.to_dict(), indent=2, allow_nan=False)
    if getattr(args, "out", None):
        try:
            _write(args.out, text)
        except OSError as exc:
            print(f"error: {exc}", file=err)
            return EXIT_IO
    print(text, file=out)
    return EXIT_FAIL if outcome.verdict is Verdict.FAIL else EXIT_OK


COMMANDS = {"verify": cmd_verify, "counterexample": cmd_counterexample, "check": cmd_check}


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    return COMMANDS[args.command](args, out, err)


if __name__ == "__main__":
    sys.exit(main())
