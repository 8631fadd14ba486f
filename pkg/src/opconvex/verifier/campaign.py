"""Seeded randomized campaigns over the check catalog.

A campaign expands into tasks (a task key plus a trial index). Each trial
draws its instance from its own generator, seeded from
``(master_seed, crc32(task_key), trial_index)``, so results do not depend on
execution order or on how trials are spread across worker processes.
"""
import json
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .. import __version__, _kernels
from .. import funcalc as fc
from ..core import LOEWNER_TOL, random_hermitian_array, random_matrix, random_pd_array
from ..errors import InvalidConfigError, OpConvexError
from ..means import MEAN_NAMES
from ..outcomes import CheckOutcome, CheckSummary, Verdict
from ..posmaps import CongruenceSum, Identity, Pinching, State, TracialFunctional, unitalize
from . import checks as ck

SCHEMA_VERSION = "1"

ALL_CHECKS = (
    "main_inequality",
    "harmonic_subadditivity",
    "f_mean_inequality",
    "mean_subadditivity",
    "mean_ordering",
    "geometric_block",
    "monotonicity",
    "jensen",
    "kadison",
    "separate_convexity",
    "trace_switch",
    "lieb_convexity",
    "joint_convexity",
)
CONTROL_CHECKS = ("control_power3", "control_geometric_path")

F_FAMILIES = ("resolvent", "power", "dec_mixture")
G_FAMILIES = ("log", "power", "neg_inverse", "neg_resolvent", "mono_mixture")
MAP_FAMILIES = ("identity", "state", "congruence_sum", "pinching")

DEFAULT_COND = 1e4  # spectra in [1e-2, 1e2]
HARSH_COND = 1e12  # spectra in [1e-6, 1e6]
HARSH_TOL = 1e-6
LIEB_COND = 1e2


@dataclass(frozen=True)
class CampaignConfig:
    seed: int = 1
    dims: tuple = (2, 3, 4, 6)
    trials_per_check: int = 100
    tolerance: float = LOEWNER_TOL
    checks: tuple = ALL_CHECKS
    f_families: tuple = F_FAMILIES
    g_families: tuple = G_FAMILIES
    map_families: tuple = MAP_FAMILIES
    harsh_mode: bool = False
    controls: bool = True
    control_trials: int = 500
    workers: int = 1
    output: str = None

    def __post_init__(self):
        for name in ("dims", "checks", "f_families", "g_families", "map_families"):
            value = getattr(self, name)
            if isinstance(value, str) or not hasattr(value, "__iter__"):
                raise InvalidConfigError(f"{name} must be a list")
            object.__setattr__(self, name, tuple(value))
        self.validate()

    def validate(self):
        def bad(msg):
            raise InvalidConfigError(msg)

        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            bad("seed must be a nonnegative integer")
        if not self.dims or any(not isinstance(d, int) or not 1 <= d <= 16 for d in self.dims):
            bad("dims must be a nonempty list of integers in [1, 16]")
        if not isinstance(self.trials_per_check, int) or self.trials_per_check < 1:
            bad("trials_per_check must be >= 1")
        if not isinstance(self.control_trials, int) or self.control_trials < 1:
            bad("control_trials must be >= 1")
        if not isinstance(self.workers, int) or self.workers < 1:
            bad("workers must be >= 1")
        if not (isinstance(self.tolerance, (int, float)) and self.tolerance > 0):
            bad("tolerance must be positive")
        for name, known in (("checks", ALL_CHECKS), ("f_families", F_FAMILIES),
                            ("g_families", G_FAMILIES), ("map_families", MAP_FAMILIES)):
            unknown = set(getattr(self, name)) - set(known)
            if unknown:
                bad(f"unknown {name}: {sorted(unknown)}")
        if not self.f_families or not self.g_families or not self.map_families:
            bad("catalog filters must leave at least one family each")

    @property
    def effective_tolerance(self):
        return max(self.tolerance, HARSH_TOL) if self.harsh_mode else self.tolerance

    @property
    def cond_max(self):
        return HARSH_COND if self.harsh_mode else DEFAULT_COND

    def to_dict(self):
        out = asdict(self)
        for key, value in out.items():
            if isinstance(value, tuple):
                out[key] = list(value)
        return out

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise InvalidConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise InvalidConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, text):
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InvalidConfigError(f"config is not valid JSON: {exc}") from exc

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def instance_seed(master_seed, task_key, trial):
    ss = np.random.SeedSequence([master_seed, zlib.crc32(task_key.encode()), trial])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


# ---------------------------------------------------------------------------
# instance generators
# ---------------------------------------------------------------------------

def _loguniform(rng, lo, hi):
    return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))


def _pole(rng):
    return 0.0 if rng.random() < 0.1 else _loguniform(rng, 1e-2, 1e1)


def draw_f(family, rng):
    if family == "resolvent":
        return fc.resolvent(_pole(rng))
    if family == "power":
        return fc.power(-float(rng.uniform(0.05, 1.0)))
    terms = [(float(rng.uniform(0.1, 2.0)), _pole(rng)) for _ in range(int(rng.integers(1, 4)))]
    gamma = 0.0 if rng.random() < 0.2 else float(rng.uniform(0.0, 1.0))
    return fc.decreasing_mixture(gamma, terms)


def draw_g(family, rng):
    if family == "log":
        return fc.log()
    if family == "power":
        return fc.power(float(rng.uniform(0.0, 1.0)))
    if family == "neg_inverse":
        return fc.neg_inverse()
    if family == "neg_resolvent":
        return fc.neg_resolvent(_pole(rng))
    terms = [(float(rng.uniform(0.1, 2.0)), _pole(rng)) for _ in range(int(rng.integers(0, 4)))]
    return fc.monotone_mixture(float(rng.normal()), float(rng.uniform(0.0, 1.0)), terms)


def _composition(d, rng):
    cuts = sorted(int(c) for c in rng.choice(np.arange(1, d), size=int(rng.integers(0, d)), replace=False)) if d > 1 else []
    edges = [0] + cuts + [d]
    return [b - a for a, b in zip(edges, edges[1:])]


def draw_map(family, d, rng, out_dim=None):
    """A strictly positive map on M_d from the named family."""
    seed = int(rng.integers(2 ** 31))
    if family == "identity":
        return Identity(d)
    if family == "state":
        return State.random(d, seed)
    if family == "pinching":
        return Pinching(_composition(d, rng))
    out = out_dim if out_dim is not None else int(rng.integers(1, d + 2))
    k = max(int(rng.integers(1, 4)), -(-out // d))
    phi = CongruenceSum.random(d, k, seed, out_dim=out)
    while not phi.is_strict:
        k += 1
        phi = CongruenceSum.random(d, k, seed, out_dim=out)
    return phi


def _map_into(k, n, rng):
    """A strictly positive map M_n -> M_k."""
    seed = int(rng.integers(2 ** 31))
    if k == 1:
        return State.random(n, seed)
    if k == n and rng.random() < 0.3:
        return Identity(n)
    k_ops = max(int(rng.integers(1, 4)), -(-k // n))
    phi = CongruenceSum.random(n, k_ops, seed, out_dim=k)
    while not phi.is_strict:
        k_ops += 1
        phi = CongruenceSum.random(n, k_ops, seed, out_dim=k)
    return phi


# ---------------------------------------------------------------------------
# trial runners: (config, key, trial, rng, seed) -> (outcomes, invariants)
# ---------------------------------------------------------------------------

def _dim(cfg, trial):
    return cfg.dims[trial % len(cfg.dims)]


def _pd(cfg, d, rng):
    return random_pd_array(d, cfg.cond_max, rng)


def _selfcheck(cfg):
    return not cfg.harsh_mode


def run_main_inequality(cfg, key, trial, rng, seed):
    _, f_fam, g_fam, m_fam = key.split("/")
    d = _dim(cfg, trial)
    f, g = draw_f(f_fam, rng), draw_g(g_fam, rng)
    phi = draw_map(m_fam, d, rng)
    X, Y = _pd(cfg, d, rng), _pd(cfg, d, rng)
    tol = cfg.effective_tolerance
    terms = ck.main_terms(g, f, phi, X, Y, selfcheck=_selfcheck(cfg))
    main = ck.check_main_convexity(g, f, phi, X, Y, tol, seed, terms=terms)
    chain = ck.check_proof_chain(g, f, phi, X, Y, tol, seed, terms=terms)
    all_pass = all(o.verdict is Verdict.PASS for o in chain)
    eq3 = chain[2].details
    invariants = {
        "chain_all_pass": int(all_pass),
        "chain_implies_main_violations": int(all_pass and main.verdict is Verdict.FAIL),
        "chain_implies_main_strict_violations": int(all_pass and main.verdict is not Verdict.PASS),
        "mean_ordering_violations": int(eq3["mean_ordering_margin"] < -tol * eq3["mean_ordering_scale"]),
    }
    return [("main_convexity", main)] + [(o.check_id, o) for o in chain], invariants


def run_harmonic_subadditivity(cfg, key, trial, rng, seed):
    d = _dim(cfg, trial)
    phi = draw_map(cfg.map_families[trial % len(cfg.map_families)], d, rng)
    o = ck.check_harmonic_subadditivity(phi, _pd(cfg, d, rng), _pd(cfg, d, rng),
                                        cfg.effective_tolerance, seed, _selfcheck(cfg))
    return [(key, o)], {}


def run_f_mean_inequality(cfg, key, trial, rng, seed):
    d = _dim(cfg, trial)
    f = draw_f(cfg.f_families[trial % len(cfg.f_families)], rng)
    o = ck.check_f_mean_inequality(f, _pd(cfg, d, rng), _pd(cfg, d, rng),
                                   cfg.effective_tolerance, seed, _selfcheck(cfg))
    return [(key, o)], {}


def run_mean_subadditivity(cfg, key, trial, rng, seed):
    d = _dim(cfg, trial)
    sigma = MEAN_NAMES[trial % len(MEAN_NAMES)]
    phi = draw_map(cfg.map_families[(trial // len(MEAN_NAMES)) % len(cfg.map_families)], d, rng)
    o = ck.check_mean_subadditivity(sigma, phi, _pd(cfg, d, rng), _pd(cfg, d, rng),
                                    cfg.effective_tolerance, seed, _selfcheck(cfg))
    return [(f"{key}[{sigma}]", o)], {}


def run_mean_ordering(cfg, key, trial, rng, seed):
    d = _dim(cfg, trial)
    o = ck.check_mean_ordering(_pd(cfg, d, rng), _pd(cfg, d, rng), cfg.effective_tolerance, seed,
                               _selfcheck(cfg))
    return [(key, o)], {}


def run_geometric_block(cfg, key, trial, rng, seed):
    d = _dim(cfg, trial)
    o = ck.check_geometric_block_outcome(_pd(cfg, d, rng), _pd(cfg, d, rng), cfg.effective_tolerance, seed)
    broke = o.details.get("perturbed_relation") != "GreaterEqual"
    return [(key, o)], {"maximality_probe_not_broken": int(not broke)}


def run_monotonicity(cfg, key, trial, rng, seed):
    d = _dim(cfg, trial)
    if trial % 2:
        f = draw_g(cfg.g_families[(trial // 2) % len(cfg.g_families)], rng)
    else:
        f = draw_f(cfg.f_families[(trial // 2) % len(cfg.f_families)], rng)
    X = _pd(cfg, d, rng)
    P = fc._psd_increment(d, rng)
    return [(key, ck.check_monotone(f, X, P, cfg.effective_tolerance, seed))], {}


def _unital(cfg, d, trial, rng):
    phi = draw_map(cfg.map_families[trial % len(cfg.map_families)], d, rng)
    return unitalize(phi, _pd(cfg, d, rng))


def run_jensen(cfg, key, trial, rng, seed):
    d = _dim(cfg, trial)
    phi_u = _unital(cfg, d, trial, rng)
    X = random_pd_array(d, 100.0, rng)  # spectrum in [0.1, 10]
    return [(key, ck.check_jensen(phi_u, X, tol=cfg.effective_tolerance, seed=seed))], {}


def run_kadison(cfg, key, trial, rng, seed):
    d = _dim(cfg, trial)
    phi_u = _unital(cfg, d, trial, rng)
    b = random_hermitian_array(d, _loguniform(rng, 0.1, 10.0), rng)
    return [(key, ck.check_kadison(phi_u, b, cfg.effective_tolerance, seed))], {}


def run_separate_convexity(cfg, key, trial, rng, seed):
    d = _dim(cfg, trial)
    n = cfg.dims[int(rng.integers(len(cfg.dims)))]
    f1 = draw_f(cfg.f_families[trial % len(cfg.f_families)], rng)
    f2 = draw_f(cfg.f_families[int(rng.integers(len(cfg.f_families)))], rng)
    g = draw_g(cfg.g_families[trial % len(cfg.g_families)], rng)
    phi = draw_map(cfg.map_families[trial % len(cfg.map_families)], d, rng)
    psi = _map_into(phi.out_dim, n, rng)
    fixed = "x" if trial % 2 == 0 else "y"
    if fixed == "x":
        P, a, b = _pd(cfg, d, rng), _pd(cfg, n, rng), _pd(cfg, n, rng)
    else:
        P, a, b = _pd(cfg, n, rng), _pd(cfg, d, rng), _pd(cfg, d, rng)
    o = ck.check_separate_convexity_two_var(f1, f2, g, phi, psi, fixed, P, a, b,
                                            cfg.effective_tolerance, seed)
    return [(key, o)], {}


TRACE_SWITCH_FUNCTIONS = (fc.log(), fc.power(0.5), fc.power(1.0))


def run_trace_switch(cfg, key, trial, rng, seed):
    d = _dim(cfg, trial)
    h = TRACE_SWITCH_FUNCTIONS[trial % len(TRACE_SWITCH_FUNCTIONS)]
    o = ck.check_trace_switch(_pd(cfg, d, rng), _pd(cfg, d, rng), h, seed=seed)
    return [(key, o)], {}


def derivative_point(d, lam, rng):
    """Base point X and direction Y for finite-difference comparisons.

    A central second difference loses about eps * cond / step^2, so X keeps a
    moderate spectrum and Y is drawn in the metric of (lam + X), which keeps
    R Y R comparable to R for R = (lam + X)^-1.
    """
    X = random_pd_array(d, LIEB_COND, rng)
    w, V = np.linalg.eigh(X)
    root = (V * np.sqrt(w + lam)) @ V.conj().T
    H = random_hermitian_array(d, 1.0, rng)
    H *= float(rng.uniform(0.5, 1.0)) / max(np.max(np.abs(np.linalg.eigvalsh(H))), 1e-12)
    Y = root @ H @ root
    return X, 0.5 * (Y + Y.conj().T)


def derivative_instance(master, trial, dims=(2, 3, 4, 5, 6)):
    """Seeded (lam, X, Y) for the resolvent derivative oracles."""
    rng = np.random.default_rng(instance_seed(master, "resolvent_derivatives", trial))
    d = int(dims[trial % len(dims)])
    lam = _pole(rng)
    X, Y = derivative_point(d, lam, rng)
    return lam, X, Y


def run_lieb_convexity(cfg, key, trial, rng, seed):
    d = _dim(cfg, trial)
    lam, mu = _pole(rng), _pole(rng)
    f1, f2 = fc.resolvent(lam), fc.resolvent(mu)
    phi = draw_map(cfg.map_families[trial % len(cfg.map_families)], d, rng)
    tau = TracialFunctional(float(rng.uniform(0.1, 2.0)))
    K = random_matrix(phi.out_dim, phi.out_dim, rng, min_singular=0.1)
    X, Y = derivative_point(d, min(lam, mu), rng)
    X2 = _pd(cfg, d, rng)
    o = ck.check_lieb_convexity(f1, f2, phi, tau, K, X, Y, X2, cfg.effective_tolerance, seed)
    return [(key, o)], {"lieb_fd_relative_error_max": o.details["fd_relative_error"]}


def run_joint_convexity(cfg, key, trial, rng, seed):
    m = _dim(cfg, trial)
    n = cfg.dims[int(rng.integers(len(cfg.dims)))]
    f1 = draw_f(cfg.f_families[trial % len(cfg.f_families)], rng)
    f2 = draw_f(cfg.f_families[int(rng.integers(len(cfg.f_families)))], rng)
    phi = draw_map(cfg.map_families[trial % len(cfg.map_families)], m, rng)
    psi = _map_into(phi.out_dim, n, rng)
    tau = TracialFunctional(float(rng.uniform(0.1, 2.0)))
    first = (_pd(cfg, m, rng), _pd(cfg, n, rng))
    second = (_pd(cfg, m, rng), _pd(cfg, n, rng))
    o = ck.check_joint_convexity(f1, f2, phi, psi, tau, first, second, cfg.effective_tolerance, seed)
    return [(key, o)], {"joint_margin_gap_relative_max": o.details["margin_gap"] / max(o.scale, 1e-300)}


CONTROL_G = fc.power(3.0, fc.FunctionClass.NONE)
CONTROL_F = fc.resolvent(0.0)


def run_control_power3(cfg, key, trial, rng, seed):
    X, Y = _pd(cfg, 2, rng), _pd(cfg, 2, rng)
    o = ck.check_main_convexity(CONTROL_G, CONTROL_F, Identity(2), X, Y, cfg.effective_tolerance, seed,
                                enforce_classes=False)
    return [(key, o)], {}


def run_control_geometric_path(cfg, key, trial, rng, seed):
    if trial == 0:
        S, T = ck.REFERENCE_S, ck.REFERENCE_T
    else:
        S, T = _pd(cfg, 2, rng), _pd(cfg, 2, rng)
    o = ck.check_geometric_path(fc.SQRT, S, T, cfg.effective_tolerance, seed)
    return [(key, o)], {}


RUNNERS = {
    "main_inequality": run_main_inequality,
    "harmonic_subadditivity": run_harmonic_subadditivity,
    "f_mean_inequality": run_f_mean_inequality,
    "mean_subadditivity": run_mean_subadditivity,
    "mean_ordering": run_mean_ordering,
    "geometric_block": run_geometric_block,
    "monotonicity": run_monotonicity,
    "jensen": run_jensen,
    "kadison": run_kadison,
    "separate_convexity": run_separate_convexity,
    "trace_switch": run_trace_switch,
    "lieb_convexity": run_lieb_convexity,
    "joint_convexity": run_joint_convexity,
    "control_power3": run_control_power3,
    "control_geometric_path": run_control_geometric_path,
}


def task_keys(cfg):
    """(task_key, trial count) pairs in canonical order."""
    out = []
    for check in cfg.checks:
        if check == "main_inequality":
            for f in cfg.f_families:
                for g in cfg.g_families:
                    for m in cfg.map_families:
                        out.append((f"main_inequality/{f}/{g}/{m}", cfg.trials_per_check))
        else:
            out.append((check, cfg.trials_per_check))
    if cfg.controls:
        out.extend((c, cfg.control_trials) for c in CONTROL_CHECKS)
    return out


def run_trial(cfg, key, trial):
    seed = instance_seed(cfg.seed, key, trial)
    rng = np.random.default_rng(seed)
    runner = RUNNERS[key.split("/")[0]]
    try:
        return runner(cfg, key, trial, rng, seed)
    except (OpConvexError, np.linalg.LinAlgError) as exc:
        check_id = key.split("/")[0] if not key.startswith("main_inequality") else "main_convexity"
        failed = CheckOutcome(check_id, seed, Verdict.FAIL, 0.0, 0.0, cfg.effective_tolerance,
                              "Incomparable", {"error": f"{type(exc).__name__}: {exc}"})
        return [(check_id, failed)], {"errors": 1}


def _run_chunk(args):
    cfg_dict, key, start, stop = args
    cfg = CampaignConfig.from_dict(cfg_dict)
    t0 = time.perf_counter()
    results = [run_trial(cfg, key, trial) for trial in range(start, stop)]
    return key, start, results, time.perf_counter() - t0


def _chunks(cfg, chunk_size):
    for key, n in task_keys(cfg):
        for start in range(0, n, chunk_size):
            yield cfg.to_dict(), key, start, min(n, start + chunk_size)


# ---------------------------------------------------------------------------
# aggregation and report
# ---------------------------------------------------------------------------

_MAX_INVARIANTS = {"lieb_fd_relative_error_max", "joint_margin_gap_relative_max"}


@dataclass
class CampaignReport:
    config: CampaignConfig
    checks: dict = field(default_factory=dict)
    by_combination: dict = field(default_factory=dict)
    controls: dict = field(default_factory=dict)
    invariants: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)

    @property
    def theorem_failures(self):
        return sum(s.failed for s in self.checks.values())

    @property
    def controls_detected(self):
        return {k: s.failed > 0 for k, s in self.controls.items()}

    def body(self):
        """Everything except timing and the output path; identical across runs of one config."""
        config = self.config.to_dict()
        config.pop("output", None)
        return {
            "schema_version": SCHEMA_VERSION,
            "library_version": __version__,
            "backend": _kernels.active.name,
            "config": config,
            "effective_tolerance": self.config.effective_tolerance,
            "checks": {k: s.to_dict() for k, s in sorted(self.checks.items())},
            "by_combination": {
                combo: {k: s.to_dict() for k, s in sorted(sums.items())}
                for combo, sums in sorted(self.by_combination.items())
            },
            "invariants": dict(sorted(self.invariants.items())),
            "negative_controls": {
                "checks": {k: s.to_dict() for k, s in sorted(self.controls.items())},
                "detected": dict(sorted(self.controls_detected.items())),
                "all_detected": bool(self.controls) and all(self.controls_detected.values()),
            },
            "theorem_failures": self.theorem_failures,
        }

    def to_dict(self):
        out = self.body()
        out["timing"] = self.timing
        return out

    @classmethod
    def from_dict(cls, data):
        if data.get("schema_version") != SCHEMA_VERSION:
            raise InvalidConfigError(f"unsupported report schema {data.get('schema_version')!r}")

        def sums(block):
            return {k: CheckSummary.from_dict(v) for k, v in block.items()}

        return cls(
            config=CampaignConfig.from_dict(data["config"]),
            checks=sums(data["checks"]),
            by_combination={c: sums(b) for c, b in data["by_combination"].items()},
            controls=sums(data["negative_controls"]["checks"]),
            invariants=dict(data["invariants"]),
            timing=dict(data.get("timing", {})),
        )

    def to_json(self, include_timing=True):
        data = self.to_dict() if include_timing else self.body()
        return json.dumps(data, sort_keys=True, indent=2, allow_nan=False)


def _accumulate(report, key, results):
    for outcomes, invariants in results:
        for check_id, outcome in outcomes:
            if key in CONTROL_CHECKS:
                target = report.controls
            else:
                target = report.checks
            target.setdefault(check_id, CheckSummary(check_id)).add(outcome)
            if key.startswith("main_inequality/"):
                combo = "|".join(key.split("/")[1:])
                sums = report.by_combination.setdefault(combo, {})
                sums.setdefault(check_id, CheckSummary(check_id)).add(outcome)
        for name, value in invariants.items():
            if name in _MAX_INVARIANTS:
                report.invariants[name] = max(report.invariants.get(name, 0.0), float(value))
            else:
                report.invariants[name] = report.invariants.get(name, 0) + int(value)


def run_campaign(config, chunk_size=50):
    if not isinstance(config, CampaignConfig):
        config = CampaignConfig.from_dict(config)
    t0 = time.perf_counter()
    report = CampaignReport(config)
    per_key = {}
    chunks = list(_chunks(config, chunk_size))
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            done = list(pool.map(_run_chunk, chunks))
    else:
        done = [_run_chunk(c) for c in chunks]
    # aggregate in canonical (task, trial) order regardless of completion order
    done.sort(key=lambda item: ([k for k, _ in task_keys(config)].index(item[0]), item[1]))
    for key, _start, results, elapsed in done:
        _accumulate(report, key, results)
        bucket = key.split("/")[0]
        per_key[bucket] = per_key.get(bucket, 0.0) + elapsed
    for name in ("chain_all_pass", "chain_implies_main_violations", "chain_implies_main_strict_violations",
                 "mean_ordering_violations", "errors"):
        if name in report.invariants or name == "errors" or "main_inequality" in config.checks:
            report.invariants.setdefault(name, 0)
    report.timing = {
        "wall_time_s": time.perf_counter() - t0,
        "per_check_s": dict(sorted(per_key.items())),
    }
    return report
