"""Command-line front end: certificates and simulations from JSON configs.

Commands
--------
- ``ifp-syncnet ifp <tf.json>`` — passivity deficit of a transfer function.
- ``ifp-syncnet certify <net.json> [--reference]`` — weak-coupling verdict.
- ``ifp-syncnet simulate <net.json> [--plot] [--dt X] [--t-final X] [--tol X]
  [--force]`` — run a network, write CSV + metrics JSON (+ SVG).
- ``ifp-syncnet scenario <scn.json> [--plot] [--sweep]`` — prebuilt
  experiments; ``--sweep`` treats the file as a JSON list and runs its
  entries concurrently with deterministic output names.

Exit codes: 0 success/pass, 1 input error, 2 not certifiable, 3 certificate
fail, 4 divergence. Artifacts land in --output-dir, else $IFPSYNC_OUTPUT_DIR,
else the working directory; existing files are never overwritten without
--force. CSV output is UTF-8 with LF line endings and shortest round-trip
float formatting, so identical runs produce identical bytes.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from .certify import (
    CaccGainSet,
    check_platoon_gains,
    check_weak_coupling,
    check_weak_coupling_pinned,
    diffusive_power_identity,
    dissipation_margin,
)
from .errors import IfpSyncError, MuTauViolation, NotCertifiable
from .graphnet import build_digraph
from .netsim import (
    AgentModel,
    DelayedIntegrator,
    LtiSiso,
    Plain,
    Reference,
    SimConfig,
    SimResult,
    Vehicle3rd,
    simulate,
)
from .passivity import RationalTF, ifp_index, ifp_shift_identity_check, prl_conditions
from .scenarios import run_scenario, scenario_from_dict

__all__ = ["main", "write_csv", "write_svg", "metrics_json_dict", "load_network"]

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_CERTIFIABLE = 2
EXIT_CERT_FAIL = 3
EXIT_DIVERGED = 4


# ---------------------------------------------------------------------------
# JSON -> objects
# ---------------------------------------------------------------------------

def time_fn_from_dict(d) -> Callable[[float], float]:
    """Deserialize a time function: a bare number is a constant; otherwise a
    dict with kind 'constant' {value}, 'ramp' {offset, slope}, or 'sin'
    {amplitude, omega, phase}."""
    if isinstance(d, (int, float)):
        return lambda t, c=float(d): c
    kind = d["kind"]
    if kind == "constant":
        return lambda t, c=float(d["value"]): c
    if kind == "ramp":
        off = float(d.get("offset", 0.0))
        slope = float(d.get("slope", 0.0))
        return lambda t, a=off, b=slope: a + b * t
    if kind == "sin":
        amp = float(d.get("amplitude", 1.0))
        omega = float(d["omega"])
        phase = float(d.get("phase", 0.0))
        return lambda t, a=amp, w=omega, p=phase: a * math.sin(w * t + p)
    raise IfpSyncError(f"unknown time-function kind {kind!r}")


def agent_from_dict(d: dict) -> AgentModel:
    """Deserialize one agent: type 'lti' {num, den}, 'delayed_integrator'
    {delay, dim}, or 'vehicle' {tau, mu}. Polynomial coefficients ascending."""
    kind = d.get("type", "lti")
    if kind == "lti":
        return LtiSiso.from_coeffs(d["num"], d["den"])
    if kind == "delayed_integrator":
        return DelayedIntegrator(delay=float(d.get("delay", 0.0)), dim=int(d.get("dim", 1)))
    if kind == "vehicle":
        return Vehicle3rd(tau=float(d["tau"]), mu=float(d["mu"]))
    raise IfpSyncError(f"unknown agent type {kind!r}")


def load_network(d: dict):
    """(agents, protocol, SimConfig) from a network JSON dictionary.

    Top-level keys: adjacency (row i = arcs into agent i), agents (typed
    list, each optionally carrying x0), protocol ({'type': 'plain'} or
    {'type': 'reference', b, u_bar, y_bar}), sim (dt, t_final,
    record_stride, tol, blowup), initial_histories (per-agent time function
    giving the pre-start input of delayed agents).
    """
    g = build_digraph(d["adjacency"])
    agents = [agent_from_dict(a) for a in d["agents"]]
    if g.n != len(agents):
        raise IfpSyncError(f"adjacency is {g.n}x{g.n} but {len(agents)} agents given")

    proto_d = d.get("protocol", {"type": "plain"})
    pkind = proto_d.get("type", "plain")
    if pkind == "plain":
        protocol = Plain(g)
    elif pkind == "reference":
        b = np.asarray(proto_d.get("b", np.zeros(g.n)), dtype=float)
        y_bar = time_fn_from_dict(proto_d["y_bar"]) if "y_bar" in proto_d else None
        u_bar = None
        if "u_bar" in proto_d:
            u_bar = tuple(
                time_fn_from_dict(x) if x is not None else None for x in proto_d["u_bar"]
            )
        protocol = Reference(g, b=b, u_bar=u_bar, y_bar=y_bar)
    else:
        raise IfpSyncError(f"unknown protocol type {pkind!r}")

    sim_d = d.get("sim", {})
    x0 = None
    if any("x0" in a for a in d["agents"]):
        x0 = [
            list(map(float, a["x0"])) if "x0" in a else [0.0] * agents[i].state_dim
            for i, a in enumerate(d["agents"])
        ]
    hist = None
    if "initial_histories" in d and d["initial_histories"] is not None:
        hist = tuple(
            time_fn_from_dict(h) if h is not None else None for h in d["initial_histories"]
        )
    config = SimConfig(
        dt=float(sim_d.get("dt", 1e-3)),
        t_final=float(sim_d.get("t_final", 100.0)),
        initial_states=x0,
        initial_histories=hist,
        record_stride=int(sim_d.get("record_stride", 1)),
        tol=float(sim_d.get("tol", 1e-3)),
        blowup=float(sim_d.get("blowup", 1e12)),
    )
    return agents, protocol, config


# ---------------------------------------------------------------------------
# artifacts
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def _columns(prefix: str, n: int, m: int) -> list[str]:
    if m == 1:
        return [f"{prefix}_{i}" for i in range(1, n + 1)]
    return [f"{prefix}_{i}_{d}" for i in range(1, n + 1) for d in range(1, m + 1)]


def write_csv(path: Path, result: SimResult) -> None:
    """Trajectory CSV: header t,y_1,...,y_N,u_1,...,u_N (vector outputs
    flattened agent-major with a per-dimension suffix), one row per recorded
    sample, floats in shortest round-trip form, LF endings."""
    n_rec, n, m = result.y.shape
    header = ["t"] + _columns("y", n, m) + _columns("u", n, m)
    lines = [",".join(header)]
    for r in range(n_rec):
        vals = [result.times[r], *result.y[r].ravel(), *result.u[r].ravel()]
        lines.append(",".join(_fmt(v) for v in vals))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def metrics_json_dict(result: SimResult) -> dict:
    out = result.metrics.to_json_dict()
    out["diverged"] = bool(result.diverged)
    out["t_diverged"] = None if result.t_diverged is None else float(result.t_diverged)
    out["n_samples"] = int(result.times.shape[0])
    return out


def _write_json(path: Path, payload) -> None:
    path.write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n"
    )


_PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
)


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    return [lo + (hi - lo) * k / (count - 1) for k in range(count)]


def write_svg(path: Path, result: SimResult) -> None:
    """Trajectory plot: one polyline per output channel on labeled linear
    axes, fixed 800x500 viewport, no external dependencies. Long runs are
    thinned to ~2000 points per polyline (endpoints kept)."""
    width, height = 800, 500
    ml, mr, mt, mb = 64, 16, 16, 48
    n_rec, n, m = result.y.shape
    t = np.asarray(result.times, dtype=float)
    ys = result.y.reshape(n_rec, n * m)

    stride = max(1, -(-n_rec // 2000))
    idx = np.arange(0, n_rec, stride)
    if idx[-1] != n_rec - 1:
        idx = np.append(idx, n_rec - 1)
    t = t[idx]
    ys = ys[idx]

    t_lo, t_hi = float(t[0]), float(t[-1])
    if t_hi <= t_lo:
        t_hi = t_lo + 1.0
    y_lo, y_hi = float(ys.min()), float(ys.max())
    if not (math.isfinite(y_lo) and math.isfinite(y_hi)):
        finite = ys[np.isfinite(ys)]
        y_lo = float(finite.min()) if finite.size else -1.0
        y_hi = float(finite.max()) if finite.size else 1.0
    if y_hi <= y_lo:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    def sx(v: float) -> float:
        return ml + (v - t_lo) / (t_hi - t_lo) * (width - ml - mr)

    def sy(v: float) -> float:
        return height - mb - (v - y_lo) / (y_hi - y_lo) * (height - mt - mb)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{ml}" y1="{height - mb}" x2="{width - mr}" y2="{height - mb}" '
        'stroke="black" stroke-width="1"/>',
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{height - mb}" '
        'stroke="black" stroke-width="1"/>',
    ]
    for tv in _ticks(t_lo, t_hi):
        x = sx(tv)
        parts.append(
            f'<line x1="{x:.2f}" y1="{height - mb}" x2="{x:.2f}" y2="{height - mb + 5}" '
            'stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x:.2f}" y="{height - mb + 18}" font-size="11" '
            f'text-anchor="middle" font-family="sans-serif">{tv:.4g}</text>'
        )
    for yv in _ticks(y_lo, y_hi):
        y = sy(yv)
        parts.append(
            f'<line x1="{ml - 5}" y1="{y:.2f}" x2="{ml}" y2="{y:.2f}" '
            'stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{ml - 8}" y="{y + 4:.2f}" font-size="11" '
            f'text-anchor="end" font-family="sans-serif">{yv:.4g}</text>'
        )
    parts.append(
        f'<text x="{(ml + width - mr) / 2:.1f}" y="{height - 10}" font-size="13" '
        'text-anchor="middle" font-family="sans-serif">time [s]</text>'
    )
    parts.append(
        f'<text x="16" y="{(mt + height - mb) / 2:.1f}" font-size="13" '
        'text-anchor="middle" font-family="sans-serif" '
        f'transform="rotate(-90 16 {(mt + height - mb) / 2:.1f})">output</text>'
    )
    for c in range(ys.shape[1]):
        col = ys[:, c]
        pts = " ".join(
            f"{sx(tv):.2f},{sy(v):.2f}"
            for tv, v in zip(t, col)
            if math.isfinite(v)
        )
        color = _PALETTE[c % len(_PALETTE)]
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{pts}"/>'
        )
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n", encoding="utf-8", newline="\n")


def _output_dir(args) -> Path:
    if getattr(args, "output_dir", None):
        d = Path(args.output_dir)
    elif os.environ.get("IFPSYNC_OUTPUT_DIR"):
        d = Path(os.environ["IFPSYNC_OUTPUT_DIR"])
    else:
        d = Path.cwd()
    d.mkdir(parents=True, exist_ok=True)
    return d


def _guard_overwrite(paths: Sequence[Path], force: bool) -> Optional[str]:
    if force:
        return None
    clash = [str(p) for p in paths if p.exists()]
    if clash:
        return "refusing to overwrite existing files (pass --force): " + ", ".join(clash)
    return None


def _sim_artifacts(
    result: SimResult, out_dir: Path, stem: str, plot: bool, force: bool
) -> tuple[Optional[str], dict]:
    csv_path = out_dir / f"{stem}.csv"
    met_path = out_dir / f"{stem}.metrics.json"
    targets = [csv_path, met_path]
    svg_path = out_dir / f"{stem}.svg"
    if plot:
        targets.append(svg_path)
    err = _guard_overwrite(targets, force)
    if err:
        return err, {}
    write_csv(csv_path, result)
    _write_json(met_path, metrics_json_dict(result))
    artifacts = {"csv": str(csv_path), "metrics": str(met_path)}
    if plot:
        write_svg(svg_path, result)
        artifacts["svg"] = str(svg_path)
    return None, artifacts


def _apply_overrides(config: SimConfig, args) -> SimConfig:
    over = {}
    if getattr(args, "dt", None) is not None:
        over["dt"] = args.dt
    if getattr(args, "t_final", None) is not None:
        over["t_final"] = args.t_final
    if getattr(args, "tol", None) is not None:
        over["tol"] = args.tol
    return replace(config, **over) if over else config


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_ifp(args) -> int:
    d = json.loads(Path(args.input).read_text(encoding="utf-8"))
    tf = RationalTF.from_coeffs(d["num"], d["den"])
    try:
        cert = ifp_index(tf)
    except NotCertifiable as e:
        print(json.dumps({"certifiable": False, "reason": str(e)}, indent=2, sort_keys=True))
        return EXIT_NOT_CERTIFIABLE
    report = cert.to_json_dict()
    report["certifiable"] = True
    report["conditions"] = prl_conditions(tf, cert.alpha).to_json_dict()
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


def _alphas_from_json(d: dict) -> list[float]:
    if "alpha" in d:
        return [float(a) for a in d["alpha"]]
    if "agents" in d:
        return [agent_from_dict(a).ifp_index() for a in d["agents"]]
    raise IfpSyncError("certify JSON needs either an 'alpha' array or an 'agents' list")


def cmd_certify(args) -> int:
    d = json.loads(Path(args.input).read_text(encoding="utf-8"))
    g = build_digraph(d["adjacency"])
    alphas = _alphas_from_json(d)
    if args.reference:
        b = np.asarray(d.get("b", np.zeros(g.n)), dtype=float)
        verdict = check_weak_coupling_pinned(g, alphas, b)
    else:
        verdict = check_weak_coupling(g, alphas)
    report = {"weak_coupling": verdict.to_json_dict(), "alpha": alphas}
    passes = verdict.passes
    if "gains" in d:
        gains = CaccGainSet.build(**d["gains"])
        gv = check_platoon_gains(gains)
        report["gains"] = gv.to_json_dict()
        passes = passes and gv.passes
    report["passes"] = passes
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK if passes else EXIT_CERT_FAIL


def cmd_simulate(args) -> int:
    in_path = Path(args.input)
    d = json.loads(in_path.read_text(encoding="utf-8"))
    agents, protocol, config = load_network(d)
    config = _apply_overrides(config, args)
    result = simulate(agents, protocol, config)
    err, artifacts = _sim_artifacts(
        result, _output_dir(args), in_path.stem, args.plot, args.force
    )
    if err:
        print(err, file=sys.stderr)
        return EXIT_INPUT
    summary = {"artifacts": artifacts, "metrics": metrics_json_dict(result)}
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_DIVERGED if result.diverged else EXIT_OK


def _run_one_scenario(d: dict, args, stem: str) -> tuple[int, dict]:
    kind, spec, config = scenario_from_dict(d)
    config = _apply_overrides(config, args)
    run = run_scenario(kind, spec, config)
    result = run.sim
    out_dir = _output_dir(args)
    err, artifacts = _sim_artifacts(result, out_dir, stem, args.plot, args.force)
    if err:
        print(err, file=sys.stderr)
        return EXIT_INPUT, {}
    report = run.to_json_dict()
    report["metrics"] = metrics_json_dict(result)
    rep_path = out_dir / f"{stem}.report.json"
    guard = _guard_overwrite([rep_path], args.force)
    if guard:
        print(guard, file=sys.stderr)
        return EXIT_INPUT, {}
    _write_json(rep_path, report)
    artifacts["report"] = str(rep_path)
    report["artifacts"] = artifacts
    return (EXIT_DIVERGED if result.diverged else EXIT_OK), report


def _sweep_worker(payload) -> tuple[int, int, dict]:
    index, d, ns_dict = payload
    args = argparse.Namespace(**ns_dict)
    code, report = _run_one_scenario(d, args, ns_dict["_stem"] + f"_{index:03d}")
    return index, code, report


def cmd_scenario(args) -> int:
    in_path = Path(args.input)
    data = json.loads(in_path.read_text(encoding="utf-8"))
    if args.sweep:
        if not isinstance(data, list):
            raise IfpSyncError("--sweep expects the input file to hold a JSON list of scenarios")
        ns = {
            "output_dir": args.output_dir,
            "plot": args.plot,
            "force": args.force,
            "dt": args.dt,
            "t_final": args.t_final,
            "tol": args.tol,
            "_stem": in_path.stem,
        }
        payloads = [(i, d, ns) for i, d in enumerate(data)]
        results: list[Optional[tuple[int, dict]]] = [None] * len(payloads)
        if payloads:
            workers = min(len(payloads), os.cpu_count() or 1)
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for index, code, report in pool.map(_sweep_worker, payloads):
                    results[index] = (code, report)
        reports = [r[1] for r in results if r is not None]
        codes = [r[0] for r in results if r is not None]
        print(json.dumps(reports, indent=2, sort_keys=True))
        return max(codes, default=EXIT_OK)
    if isinstance(data, list):
        raise IfpSyncError("input holds a scenario list; pass --sweep to run it")
    code, report = _run_one_scenario(data, args, in_path.stem)
    if report:
        print(json.dumps(report, indent=2, sort_keys=True))
    return code


def cmd_selftest(args) -> int:
    """Randomized identity checks (hidden command): the Perron-weighted power
    identity, the feedback-shift passivity identity, and non-negativity of
    the dissipation margin on certified random networks."""
    rng = np.random.default_rng(args.seed)
    failures = []

    worst_power = 0.0
    for _ in range(args.trials):
        n = int(rng.integers(2, 7))
        a = np.where(rng.random((n, n)) < 0.5, rng.uniform(0.1, 2.0, (n, n)), 0.0)
        np.fill_diagonal(a, 0.0)
        for i in range(n):  # ring backbone keeps the digraph strongly connected
            a[i, (i - 1) % n] = rng.uniform(0.5, 1.5)
        g = build_digraph(a)
        y = rng.normal(size=(n, int(rng.integers(1, 4))))
        worst_power = max(worst_power, abs(diffusive_power_identity(g, y)))
    ok = worst_power < 1e-9
    print(f"selftest power_identity {'PASS' if ok else 'FAIL'} (worst residual {worst_power:.3e})")
    if not ok:
        failures.append("power_identity")

    worst_shift = 0.0
    for _ in range(args.trials):
        alpha = float(rng.uniform(0.01, 2.0))
        b = float(rng.uniform(0.05, 0.95)) / (2.0 * alpha)
        y = rng.normal(size=int(rng.integers(1, 4)))
        u = rng.normal(size=y.shape)
        worst_shift = max(worst_shift, abs(ifp_shift_identity_check(alpha, b, y, u)))
    ok = worst_shift < 1e-9
    print(f"selftest shift_identity {'PASS' if ok else 'FAIL'} (worst residual {worst_shift:.3e})")
    if not ok:
        failures.append("shift_identity")

    worst_margin = math.inf
    for _ in range(args.trials):
        n = int(rng.integers(2, 6))
        a = np.zeros((n, n))
        for i in range(n):
            a[i, (i - 1) % n] = rng.uniform(0.3, 1.0)
            if rng.random() < 0.4:
                a[i, (i + 1) % n] = rng.uniform(0.1, 0.5) if n > 2 else a[i, (i + 1) % n]
        np.fill_diagonal(a, 0.0)
        g = build_digraph(a)
        deg = np.asarray(a.sum(axis=1))
        alphas = rng.uniform(0.1, 0.9, n) * 0.5 / np.maximum(deg, 1e-12)
        y = rng.normal(size=(n, 1))
        worst_margin = min(worst_margin, dissipation_margin(g, alphas, y))
    ok = worst_margin > -1e-12
    print(f"selftest dissipation_margin {'PASS' if ok else 'FAIL'} (worst margin {worst_margin:.3e})")
    if not ok:
        failures.append("dissipation_margin")

    return EXIT_OK if not failures else EXIT_CERT_FAIL


# ---------------------------------------------------------------------------
# parser / main
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on bad usage; the exit-code contract
    reserves 2 for 'not certifiable', so usage errors exit 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output-dir", default=None,
                   help="artifact directory (default: $IFPSYNC_OUTPUT_DIR or the cwd)")
    p.add_argument("--force", action="store_true", help="overwrite existing artifacts")
    p.add_argument("--plot", action="store_true", help="also write an SVG trajectory plot")
    p.add_argument("--dt", type=float, default=None, help="override integration step")
    p.add_argument("--t-final", dest="t_final", type=float, default=None,
                   help="override simulation horizon")
    p.add_argument("--tol", type=float, default=None,
                   help="override the synchronization tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ifp-syncnet",
                     description="Synchronization certificates and simulations "
                                 "for networks of input-feedforward-passive agents.")
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="{ifp,certify,simulate,scenario}")

    p = sub.add_parser("ifp", help="passivity deficit of a transfer function JSON")
    p.add_argument("input", help="JSON file with ascending 'num' and 'den' coefficient arrays")
    p.set_defaults(func=cmd_ifp)

    p = sub.add_parser("certify", help="weak-coupling certificate for a network JSON")
    p.add_argument("input", help="JSON with adjacency and alpha array (or agents list)")
    p.add_argument("--reference", action="store_true",
                   help="use the pinned (reference-tracking) certificate with the b vector")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("simulate", help="integrate a network JSON and write CSV/JSON/SVG")
    p.add_argument("input", help="network JSON file")
    _add_output_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("scenario", help="run a prebuilt scenario JSON (or a --sweep list)")
    p.add_argument("input", help="scenario JSON file")
    p.add_argument("--sweep", action="store_true",
                   help="treat the input as a JSON list and run entries concurrently")
    _add_output_flags(p)
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("selftest")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=25)
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NotCertifiable, MuTauViolation) as e:
        print(f"not certifiable: {e}", file=sys.stderr)
        return EXIT_NOT_CERTIFIABLE
    except (IfpSyncError, OSError, KeyError, TypeError, ValueError,
            json.JSONDecodeError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
