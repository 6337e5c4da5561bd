"""Command line front end: sample, kernel, gap, verify, gibbs-test.

Every run resolves its configuration from built-in defaults, then an optional
JSON config file (keys mirror the flag names), then explicit flags, and
writes a manifest echoing the resolved configuration next to its outputs.
Exit code 0 on success, 1 on validation errors, 2 when accuracy warnings
occur under --strict.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from scipy import stats as sstats

from . import __version__
from .errors import AccuracyWarning, DomainError
from .fredholm import IntervalSet, count_distribution, gap_probability
from .gibbs import sample_bridge, apply_bridge, window_from_lines
from .kernels import (
    BESSEL_LIMIT,
    FINITE_GAUGED,
    FINITE_RAW,
    KernelSpec,
    kernel_matrix,
    kernel_value,
)
from .paths import SPACE_LIKE, TIME_LIKE
from .persist import (
    fmt,
    prepare_out_dir,
    read_manifest,
    read_sample_csv,
    worker_count,
    write_manifest,
    write_sample_csv,
    write_table_csv,
)
from .quadrature import FLAG_OK
from .simulate import GENERATOR_NAME, FieldGrid, RngStream, batch_eigenvalues, sample_field
from .verify import compare, empirical_rho1, quantile_edges

EXIT_OK, EXIT_VALIDATION, EXIT_ACCURACY = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_VALIDATION)


def _parse_int_list(text) -> tuple:
    if isinstance(text, (list, tuple)):
        return tuple(int(v) for v in text)
    return tuple(int(v) for v in str(text).split(",") if v != "")


def _parse_float_list(text) -> tuple:
    if isinstance(text, (list, tuple)):
        return tuple(float(v) for v in text)
    return tuple(float(v) for v in str(text).split(",") if v != "")


def _parse_points(text) -> list:
    """Path points from a string like "(0,0) (1,0.5)"."""
    if isinstance(text, (list, tuple)) and text and isinstance(text[0], (list, tuple)):
        return [(int(a), float(t)) for a, t in text]
    pts = []
    for chunk in str(text).replace("(", " ").replace(")", " ").split():
        a, t = chunk.split(",")
        pts.append((int(a), float(t)))
    if not pts:
        raise DomainError("no path points given")
    return pts


def _parse_grid(text):
    lo, hi, n = str(text).split(":")
    return np.linspace(float(lo), float(hi), int(n))


_ORDERINGS = {"time": TIME_LIKE, "time_like": TIME_LIKE, "space": SPACE_LIKE, "space_like": SPACE_LIKE}


# ---------------------------------------------------------------------------
# Configuration resolution
# ---------------------------------------------------------------------------

DEFAULTS = {
    "sample": {
        "n": 4, "alphas": "0", "times": "1.0", "replicas": 100, "seed": 0,
        "stream_base": 0, "workers": None, "out_dir": None, "force": False, "strict": False,
    },
    "kernel": {
        "bessel": False, "finite": None, "gauged": None, "ordering": "time",
        "points": "(0,0)", "grid": "0:10:32", "out_dir": None, "force": False, "strict": False,
    },
    "gap": {
        "alpha": 0, "t": 0.0, "interval": [[0.0, 4.0]], "order": 100, "n_max": 8,
        "gauged": None, "ordering": "time", "out_dir": None, "force": False, "strict": False,
    },
    "verify": {
        "sample_dir": None, "bins": 16, "out_dir": None, "force": False, "strict": False,
    },
    "gibbs-test": {
        "n": 100, "alpha_window": [0, 2], "k": 1, "replicas": 1000, "seed": 0,
        "t": 0.0, "max_attempts": 1000000, "out_dir": None, "force": False, "strict": False,
    },
}


def _resolve(sub: str, ns: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS[sub])
    given = vars(ns)
    config_path = given.pop("config", None)
    if config_path:
        file_cfg = read_manifest(config_path)
        unknown = set(file_cfg) - set(cfg)
        if unknown:
            raise DomainError(f"config keys {sorted(unknown)} do not mirror any flag")
        cfg.update(file_cfg)
    cfg.update({k: v for k, v in given.items() if v is not None and k in cfg})
    for k in ("force", "strict"):
        cfg[k] = bool(given.get(k) or cfg.get(k))
    if cfg.get("out_dir") is None:
        raise DomainError("--out-dir is required")
    return cfg


def _manifest_payload(sub: str, cfg: dict) -> dict:
    safe = {k: (list(v) if isinstance(v, tuple) else v) for k, v in cfg.items()}
    return {
        "subcommand": sub,
        "config": safe,
        "generator": GENERATOR_NAME,
        "library_version": __version__,
    }


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_sample(cfg: dict) -> dict:
    grid = FieldGrid(int(cfg["n"]), _parse_int_list(cfg["alphas"]), _parse_float_list(cfg["times"]))
    out = prepare_out_dir(cfg["out_dir"], cfg["force"])
    replicas = int(cfg["replicas"])
    seed, base = int(cfg["seed"]), int(cfg["stream_base"])
    workers = worker_count(cfg["workers"])

    def one(r: int):
        return r, sample_field(grid, RngStream(seed, base + r))

    names = []
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for r, s in pool.map(one, range(replicas)):
                name = f"sample_{r:06d}.csv"
                write_sample_csv(out / name, s)
                names.append(name)
    else:
        for r in range(replicas):
            _, s = one(r)
            name = f"sample_{r:06d}.csv"
            write_sample_csv(out / name, s)
            names.append(name)
    payload = _manifest_payload("sample", cfg)
    payload.update({
        "n": grid.N, "alphas": list(grid.alphas), "times": list(grid.times),
        "replicas": replicas, "seed": seed, "stream_base": base, "files": sorted(names),
    })
    write_manifest(out / "manifest.json", payload)
    return {"accuracy_ok": True}


def _kernel_spec_from_cfg(cfg: dict) -> KernelSpec:
    ordering = _ORDERINGS[str(cfg["ordering"]).lower()]
    points = _parse_points(cfg["points"])
    chosen = [k for k in ("bessel", "finite", "gauged") if cfg.get(k)]
    if len(chosen) != 1:
        raise DomainError("choose exactly one of --bessel, --finite N, --gauged N")
    if chosen[0] == "bessel":
        return KernelSpec(BESSEL_LIMIT, ordering, points)
    kind = FINITE_RAW if chosen[0] == "finite" else FINITE_GAUGED
    return KernelSpec(kind, ordering, points, N=int(cfg[chosen[0]]))


def cmd_kernel(cfg: dict) -> dict:
    spec = _kernel_spec_from_cfg(cfg)
    xs = _parse_grid(cfg["grid"])
    out = prepare_out_dir(cfg["out_dir"], cfg["force"])
    rows = []
    ok = True
    for i in range(len(spec.path)):
        for j in range(len(spec.path)):
            M, flag = kernel_matrix(spec, i, xs, j, xs)
            ok &= flag == FLAG_OK
            for a, x in enumerate(xs):
                for b, y in enumerate(xs):
                    rows.append([i, float(x), j, float(y), float(M[a, b]), flag])
    write_table_csv(out / "kernel.csv", ["i", "x", "j", "y", "value", "flag"], rows)
    payload = _manifest_payload("kernel", cfg)
    payload["rows"] = len(rows)
    write_manifest(out / "manifest.json", payload)
    return {"accuracy_ok": ok}


def cmd_gap(cfg: dict) -> dict:
    ordering = _ORDERINGS[str(cfg["ordering"]).lower()]
    point = (int(cfg["alpha"]), float(cfg["t"]))
    if cfg.get("gauged"):
        spec = KernelSpec(FINITE_GAUGED, ordering, [point], N=int(cfg["gauged"]))
    else:
        spec = KernelSpec(BESSEL_LIMIT, ordering, [point])
    intervals = IntervalSet(tuple((0, float(lo), float(hi)) for lo, hi in cfg["interval"]))
    order = int(cfg["order"])
    out = prepare_out_dir(cfg["out_dir"], cfg["force"])
    gap = gap_probability(spec, intervals, order)
    gap2 = gap_probability(spec, intervals, 2 * order)
    dist = count_distribution(spec, [intervals], int(cfg["n_max"]), order)
    payload = _manifest_payload("gap", cfg)
    payload.update({
        "gap": gap,
        "counts": [float(p) for p in dist.probs],
        "expected_count": dist.expected_counts[0],
        "order": order,
        "refinement_delta": abs(gap - gap2),
        "accuracy_flag": dist.flag,
    })
    write_manifest(out / "gap.json", payload)
    write_manifest(out / "manifest.json", _manifest_payload("gap", cfg))
    return {"accuracy_ok": dist.flag == FLAG_OK}


def cmd_verify(cfg: dict) -> dict:
    if not cfg.get("sample_dir"):
        raise DomainError("--sample-dir is required")
    sdir = Path(cfg["sample_dir"])
    man = read_manifest(sdir / "manifest.json")
    N = int(man["n"])
    files = man["files"]
    samples = [read_sample_csv(sdir / f) for f in files]
    out = prepare_out_dir(cfg["out_dir"], cfg["force"])
    bins = int(cfg["bins"])
    slot_reports = []
    rows = []
    for alpha in man["alphas"]:
        for t_abs in man["times"]:
            key = (int(alpha), float(t_abs))
            vals = [s[key] for s in samples]
            pooled = np.concatenate(vals)
            edges = quantile_edges(pooled, bins, lo=0.0)
            est = empirical_rho1(vals, edges)
            t_scaled = 4.0 * N * (float(t_abs) - 1.0)
            spec = KernelSpec(FINITE_RAW, TIME_LIKE, [(int(alpha), t_scaled)], N=N)
            # raw kernels need x > 0; nudge the measure-zero endpoint at 0
            rep = compare(est, lambda x: kernel_value(spec, 0, max(x, 1e-9), 0, max(x, 1e-9)).value)
            for b in range(len(edges) - 1):
                rows.append([
                    int(alpha), float(t_abs), float(edges[b]), float(edges[b + 1]),
                    float(est.estimate[b]), float(est.std_error[b]),
                    float(rep.z_scores[b]) if np.isfinite(rep.z_scores[b]) else 0.0,
                ])
            slot_reports.append({
                "alpha": int(alpha), "t": float(t_abs),
                "max_abs_z": rep.max_abs_z,
                "fraction_within_3": rep.fraction_within_3,
                "excluded_bins": rep.excluded_bins,
                "passed": rep.passed,
            })
    write_table_csv(out / "bins.csv", ["alpha", "t", "lo", "hi", "estimate", "std_error", "z"], rows)
    payload = _manifest_payload("verify", cfg)
    payload.update({"slots": slot_reports, "passed": all(s["passed"] for s in slot_reports)})
    write_manifest(out / "report.json", payload)
    write_manifest(out / "manifest.json", _manifest_payload("verify", cfg))
    return {"accuracy_ok": True}


def cmd_gibbs_test(cfg: dict) -> dict:
    N = int(cfg["n"])
    a, b = (int(v) for v in cfg["alpha_window"])
    k = int(cfg["k"])
    replicas = int(cfg["replicas"])
    seed = int(cfg["seed"])
    t_scaled = float(cfg["t"])
    t_abs = 1.0 + t_scaled / (4.0 * N)
    out = prepare_out_dir(cfg["out_dir"], cfg["force"])
    spectra = batch_eigenvalues(N, tuple(range(a, b + 1)), (t_abs,), seed, replicas)
    interior = list(range(a + 1, b))
    before = {g: [] for g in interior}
    after = {g: [] for g in interior}
    attempts_total = 0
    for r in range(replicas):
        lines = {g: 4.0 * N * spectra[(g, t_abs)][r] for g in range(a, b + 1)}
        window = window_from_lines(lines, a, b, k)
        bridge = sample_bridge(window, RngStream(seed, 10_000_000 + r), max_attempts=int(cfg["max_attempts"]))
        attempts_total += max(bridge.attempts, 1)
        resampled = apply_bridge(lines, bridge)
        for g in interior:
            before[g].append(lines[g][0])
            after[g].append(resampled[g][0])
    ks = []
    for g in interior:
        res = sstats.ks_2samp(np.array(before[g]), np.array(after[g]))
        ks.append({"column": g, "statistic": float(res.statistic), "pvalue": float(res.pvalue)})
    payload = _manifest_payload("gibbs-test", cfg)
    payload.update({
        "n": N, "alpha_window": [a, b], "k": k, "replicas": replicas, "t": t_scaled,
        "acceptance_rate": replicas / attempts_total if attempts_total else 1.0,
        "mean_attempts": attempts_total / replicas if replicas else 0.0,
        "ks": ks,
        "passed": all(e["pvalue"] > 0.01 for e in ks),
    })
    write_manifest(out / "gibbs.json", payload)
    write_manifest(out / "manifest.json", _manifest_payload("gibbs-test", cfg))
    return {"accuracy_ok": True}


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    p = _Parser(prog="besselfield", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    subs = p.add_subparsers(dest="subcommand", required=True)

    def common(sp):
        sp.add_argument("--config", default=None, help="JSON config file; flags override it")
        sp.add_argument("--out-dir", dest="out_dir", default=None)
        sp.add_argument("--force", action="store_const", const=True, default=None,
                        help="allow writing into a non-empty output directory")
        sp.add_argument("--strict", action="store_const", const=True, default=None,
                        help="treat accuracy warnings as failures (exit 2)")

    sp = subs.add_parser("sample", help="draw coupled field realisations")
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--alphas", default=None, help="comma-separated indices, e.g. 0,1,2")
    sp.add_argument("--times", default=None, help="comma-separated absolute times")
    sp.add_argument("--replicas", type=int, default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--stream-base", dest="stream_base", type=int, default=None)
    sp.add_argument("--workers", type=int, default=None)
    common(sp)

    sp = subs.add_parser("kernel", help="tabulate a correlation kernel on a grid")
    sp.add_argument("--bessel", action="store_const", const=True, default=None)
    sp.add_argument("--finite", type=int, default=None, metavar="N")
    sp.add_argument("--gauged", type=int, default=None, metavar="N")
    sp.add_argument("--ordering", default=None, choices=sorted(_ORDERINGS))
    sp.add_argument("--points", default=None, help='path points, e.g. "(0,0) (1,0)"')
    sp.add_argument("--grid", default=None, help="lo:hi:n")
    common(sp)

    sp = subs.add_parser("gap", help="gap probability and count distribution")
    sp.add_argument("--alpha", type=int, default=None)
    sp.add_argument("--t", type=float, default=None)
    sp.add_argument("--interval", nargs=2, type=float, action="append", default=None,
                    metavar=("LO", "HI"))
    sp.add_argument("--order", type=int, default=None)
    sp.add_argument("--n-max", dest="n_max", type=int, default=None)
    sp.add_argument("--gauged", type=int, default=None, metavar="N",
                    help="use the finite-N gauged kernel instead of the limit")
    sp.add_argument("--ordering", default=None, choices=sorted(_ORDERINGS))
    common(sp)

    sp = subs.add_parser("verify", help="compare sampled spectra against kernel predictions")
    sp.add_argument("--sample-dir", dest="sample_dir", default=None)
    sp.add_argument("--bins", type=int, default=None)
    common(sp)

    sp = subs.add_parser("gibbs-test", help="resampling invariance diagnostics")
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--alpha-window", dest="alpha_window", nargs=2, type=int, default=None,
                    metavar=("A", "B"))
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--replicas", type=int, default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--t", type=float, default=None)
    sp.add_argument("--max-attempts", dest="max_attempts", type=int, default=None)
    common(sp)
    return p


_RUNNERS = {
    "sample": cmd_sample,
    "kernel": cmd_kernel,
    "gap": cmd_gap,
    "verify": cmd_verify,
    "gibbs-test": cmd_gibbs_test,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    sub = ns.subcommand
    try:
        cfg = _resolve(sub, ns)
    except (DomainError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", AccuracyWarning)
            result = _RUNNERS[sub](cfg)
        degraded = (not result.get("accuracy_ok", True)) or any(
            issubclass(w.category, AccuracyWarning) for w in caught
        )
        if degraded:
            sys.stderr.write("warning: quadrature accuracy degraded\n")
            if cfg.get("strict"):
                return EXIT_ACCURACY
        return EXIT_OK
    except (DomainError, ValueError, KeyError, FileNotFoundError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION


def main():
    raise SystemExit(run())


if __name__ == "__main__":
    main()
