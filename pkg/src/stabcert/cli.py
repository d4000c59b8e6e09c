"""Command-line front door: certifications, scans, studies, and
machine-readable reports.

Exit codes are a contract: 0 means certified / pass, 2 means refuted or
failed by mathematics, 1 means an operational error (I/O, dimensions,
bad flags, precision).  Every report embeds the matrices it talks about
(generator, candidate, witnesses) so ``recheck`` can re-validate the
verdict from the report alone, and all flags are echoed with their
defaults so a report fully determines its own reproduction.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import time

import numpy as np

from . import __version__
from .lyapunov import (
    DEFAULT_MEMBERSHIP_TOL,
    LyapunovCandidate,
    certificate,
    construct_q0,
    membership_margin,
    refute_stability,
    solve_algebraic,
)
from .models import (
    MatrixFormatError,
    ModelSpec,
    SplitMix64,
    build_model,
    load_matrix,
    matrix_from_json_dict,
    matrix_to_json_dict,
    random_hermitian,
    random_matrix,
    save_matrix,
)
from .numkernel import KernelPrecisionError, SingularMatrixError, spectral_norm
from .perturb import RadiusExceededError, max_alpha, verify_perturbation
from .resolvent import (
    export_scan_csv,
    resolvent_norm,
    verify_bound_left_strip,
    verify_bound_right,
)
from .semigroup import (
    UnstableGeneratorError,
    default_time_grid,
    envelope_witness_search,
    lower_envelope,
    spectral_bound,
)
from .space import NormModel, RieszMap, dual_map_norm, op_norm

__all__ = ["main", "entrypoint"]

_WITNESS_REAL_TOL = 1e-10
_WITNESS_RESIDUAL_TOL = 1e-6
_RECHECK_REL_TOL = 1e-9


class _CliUsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems are operational errors (exit 1)
        raise _CliUsageError(message)


def _add_common(p: _Parser) -> None:
    p.add_argument("--family", choices=["heat", "upwind", "jordan", "random-stable"])
    p.add_argument("--file", help="matrix JSON file with the generator")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--margin", type=float, default=0.5, help="random-stable decay margin")
    p.add_argument("--length", type=float, default=1.0, help="heat family domain length")
    p.add_argument("--speed", type=float, default=1.0, help="upwind family wave speed")
    p.add_argument("--h", type=float, default=1.0, help="upwind family cell size")
    p.add_argument("--lambda", dest="lam", default="-1", help="jordan family eigenvalue")
    p.add_argument("--norm-file", help="matrix JSON file with the SPD norm weight W")
    p.add_argument("--tol", type=float, default=DEFAULT_MEMBERSHIP_TOL)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--out", help="report filename (default derived from the input)")
    p.add_argument("--threads", type=int, default=1)


def build_parser() -> _Parser:
    parser = _Parser(prog="stabcert", description=__doc__)
    parser.add_argument("--version", action="version", version=f"stabcert {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="full pipeline: refute or certify with envelope")
    _add_common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("refute", help="search for a nonnegative-real-part eigenpair")
    _add_common(p)
    p.set_defaults(func=cmd_refute)

    p = sub.add_parser("q0", help="quadrature member, compared against the algebraic solve")
    _add_common(p)
    p.add_argument("--riesz", help="matrix JSON file with the SPD map P (default: W)")
    p.add_argument("--tmax", type=float, help="quadrature horizon (default: certified)")
    p.add_argument("--panels", type=int, help="quadrature panels (default: stiffness-based)")
    p.set_defaults(func=cmd_q0)

    p = sub.add_parser("resolvent", help="verify right half-plane and left-strip bounds")
    _add_common(p)
    p.add_argument("--delta0", default="auto", help="strip offset (number or 'auto')")
    p.add_argument("--omega-max", type=float, help="imaginary-axis extent (default 10|A|)")
    p.add_argument("--n-axis", type=int, default=129)
    p.add_argument("--n-interior", type=int, default=16)
    p.add_argument("--n-grid", type=int, default=24, help="strip points per axis")
    p.set_defaults(func=cmd_resolvent)

    p = sub.add_parser("perturb", help="verify the bounded-perturbation guarantee")
    _add_common(p)
    p.add_argument("--b-file", help="matrix JSON file with the perturbation B")
    p.add_argument("--random-trials", type=int, help="seeded trials at the radius")
    p.add_argument("--alpha", type=float, help="guarantee parameter (> 1)")
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("leftinv", help="envelope fit, strong positivity, and the witness")
    _add_common(p)
    p.add_argument("--t-grid", help="start,stop,count for a log-spaced sample grid")
    p.set_defaults(func=cmd_leftinv)

    p = sub.add_parser("gen", help="write a family matrix as matrix JSON")
    _add_common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("recheck", help="re-validate reports from their embedded data")
    p.add_argument("reports", nargs="+")
    p.set_defaults(func=cmd_recheck)
    return parser


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise _CliUsageError(f"cannot parse complex number {text!r}") from exc


def _spec_from_args(args) -> ModelSpec:
    if args.file and args.family:
        raise _CliUsageError("--family and --file are mutually exclusive")
    if args.file:
        return ModelSpec(family="file", params={"path": args.file})
    if not args.family:
        raise _CliUsageError("one of --family or --file is required")
    if args.family == "heat":
        params = {"length": args.length}
    elif args.family == "upwind":
        params = {"speed": args.speed, "h": args.h}
    elif args.family == "jordan":
        params = {"lambda": _parse_complex(args.lam)}
    else:
        params = {"margin": args.margin}
    return ModelSpec(family=args.family, n=args.n, params=params, seed=args.seed)


def _tag(spec: ModelSpec) -> str:
    if spec.family == "file":
        stem = os.path.splitext(os.path.basename(spec.params["path"]))[0]
        return f"file-{stem}"
    tag = f"{spec.family}-n{spec.n}"
    if spec.family == "random-stable":
        tag += f"-s{spec.seed}"
    return tag


def _input_block(spec: ModelSpec) -> dict:
    if spec.family == "file":
        return {"kind": "file", "path": spec.params["path"]}
    params = {
        k: ([v.real, v.imag] if isinstance(v, complex) else float(v))
        for k, v in spec.params.items()
    }
    return {"kind": "family", "family": spec.family, "n": spec.n,
            "params": params, "seed": spec.seed}


def _norm_model(args, n: int):
    if args.norm_file:
        w = load_matrix(args.norm_file)
        nm = NormModel.from_weight(w)
        descriptor = {"kind": "file", "path": args.norm_file, "w": matrix_to_json_dict(nm.w)}
    else:
        nm = NormModel.identity(n)
        descriptor = {"kind": "identity", "n": n}
    if nm.n != n:
        raise ValueError(f"norm weight is {nm.n}x{nm.n} but the generator is {n}x{n}")
    return nm, descriptor


def _config_echo(args, extra: dict | None = None) -> dict:
    config = {
        "tol": args.tol,
        "threads": args.threads,
        "out_dir": args.out_dir,
        "norm_file": args.norm_file,
    }
    if extra:
        config.update(extra)
    return config


def _candidate_block(cand: LyapunovCandidate) -> dict:
    return {
        "q": matrix_to_json_dict(cand.q),
        "margin": float(cand.margin),
        "q_norm": float(cand.q_norm),
        "theta": float(cand.theta),
        "member": bool(cand.is_member),
        "tol": float(cand.tol),
    }


def _witness_block(witness, a: np.ndarray) -> dict:
    lam = witness.eigenvalue
    v = witness.vector
    residual = float(np.linalg.norm(a @ v - lam * v))
    return {
        "eigenvalue": [float(lam.real), float(lam.imag)],
        "vector": matrix_to_json_dict(v),
        "residual": residual,
    }


def _atomic_write_text(path: str, payload: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _finish(report: dict, args, default_name: str, started: float, code: int) -> int:
    report["timings"] = {"total_s": time.perf_counter() - started}
    os.makedirs(args.out_dir, exist_ok=True)
    name = args.out if getattr(args, "out", None) else default_name
    path = os.path.join(args.out_dir, name)
    _atomic_write_text(path, json.dumps(report, indent=2) + "\n")
    print(f"{report['verdict']}: report written to {path}")
    return code


def _base_report(command: str, spec: ModelSpec, descriptor: dict, config: dict,
                 a: np.ndarray) -> dict:
    return {
        "tool": {"name": "stabcert", "version": __version__},
        "command": command,
        "input": _input_block(spec),
        "norm_model": descriptor,
        "config": config,
        "generator": matrix_to_json_dict(a),
    }


def cmd_certify(args) -> int:
    started = time.perf_counter()
    spec = _spec_from_args(args)
    a = build_model(spec)
    nm, descriptor = _norm_model(args, a.shape[0])
    report = _base_report("certify", spec, descriptor, _config_echo(args), a)

    witness = refute_stability(a)
    if witness is not None:
        report["verdict"] = "refuted"
        report["witness"] = _witness_block(witness, a)
        return _finish(report, args, f"certify-{_tag(spec)}.json", started, 2)

    q = solve_algebraic(a, nm.w)
    cand = membership_margin(q, a, nm, tol=args.tol)
    if not cand.is_member:
        report["verdict"] = "inconclusive"
        report["candidate"] = _candidate_block(cand)
        return _finish(report, args, f"certify-{_tag(spec)}.json", started, 1)
    cert = certificate(cand, a, nm)
    report["certificate"] = {
        **_candidate_block(cand),
        "epsilon": float(cert.epsilon),
        "M": float(cert.overshoot),
        "grid_pass": bool(cert.grid_pass),
        "worst_ratio": float(cert.worst_ratio),
        "grid": {"points": len(cert.t_grid), "t_max": float(cert.t_grid[-1])},
    }
    if not cert.grid_pass:
        report["verdict"] = "inconclusive"
        return _finish(report, args, f"certify-{_tag(spec)}.json", started, 1)
    report["verdict"] = "certified"
    print(f"epsilon={cert.epsilon:.6e} M={cert.overshoot:.6e} "
          f"|Q|={cand.q_norm:.6e} theta={cand.theta:.6e}")
    return _finish(report, args, f"certify-{_tag(spec)}.json", started, 0)


def cmd_refute(args) -> int:
    started = time.perf_counter()
    spec = _spec_from_args(args)
    a = build_model(spec)
    nm, descriptor = _norm_model(args, a.shape[0])
    report = _base_report("refute", spec, descriptor, _config_echo(args), a)
    witness = refute_stability(a)
    if witness is not None:
        report["verdict"] = "refuted"
        report["witness"] = _witness_block(witness, a)
        return _finish(report, args, f"refute-{_tag(spec)}.json", started, 2)
    report["verdict"] = "not_refuted"
    report["spectral_bound"] = float(spectral_bound(a))
    return _finish(report, args, f"refute-{_tag(spec)}.json", started, 0)


def cmd_q0(args) -> int:
    started = time.perf_counter()
    spec = _spec_from_args(args)
    a = build_model(spec)
    nm, descriptor = _norm_model(args, a.shape[0])
    config = _config_echo(args, {"riesz": args.riesz, "tmax": args.tmax,
                                 "panels": args.panels})
    report = _base_report("q0", spec, descriptor, config, a)

    witness = refute_stability(a)
    if witness is not None:
        report["verdict"] = "refuted"
        report["witness"] = _witness_block(witness, a)
        return _finish(report, args, f"q0-{_tag(spec)}.json", started, 2)

    if args.riesz:
        riesz = RieszMap.from_matrix(load_matrix(args.riesz), nm)
    else:
        riesz = RieszMap.from_matrix(nm.w, nm)
    cand = construct_q0(a, riesz, nm, t_max=args.tmax, panels=args.panels, tol=args.tol)
    report["q0"] = _candidate_block(cand)
    report["q0"]["theta_riesz"] = float(riesz.theta)
    if not args.riesz:
        q_alg = solve_algebraic(a, nm.w)
        gap = float(
            np.linalg.norm(cand.q - q_alg, "fro") / np.linalg.norm(q_alg, "fro")
        )
        report["q0"]["algebraic_gap"] = gap
        print(f"relative Frobenius gap against the algebraic solve: {gap:.3e}")
    report["verdict"] = "pass" if cand.is_member else "inconclusive"
    return _finish(report, args, f"q0-{_tag(spec)}.json", started,
                   0 if cand.is_member else 1)


def cmd_resolvent(args) -> int:
    started = time.perf_counter()
    spec = _spec_from_args(args)
    a = build_model(spec)
    nm, descriptor = _norm_model(args, a.shape[0])

    q = solve_algebraic(a, nm.w)
    cand = membership_margin(q, a, nm, tol=args.tol)
    if args.delta0 == "auto":
        delta0 = 0.5 * min(abs(spectral_bound(a)), 1.0 / (2.0 * cand.q_norm))
    else:
        delta0 = float(args.delta0)
    config = _config_echo(args, {
        "delta0": delta0, "omega_max": args.omega_max,
        "n_axis": args.n_axis, "n_interior": args.n_interior, "n_grid": args.n_grid,
    })
    report = _base_report("resolvent", spec, descriptor, config, a)
    report["candidate"] = _candidate_block(cand)

    right = verify_bound_right(a, nm, [cand], omega_max=args.omega_max,
                               n_axis=args.n_axis, n_interior=args.n_interior,
                               threads=args.threads)
    strip = verify_bound_left_strip(a, nm, cand, delta0, n_grid=args.n_grid,
                                    threads=args.threads)
    os.makedirs(args.out_dir, exist_ok=True)
    tag = _tag(spec)
    right_csv = f"resolvent-{tag}-right.csv"
    strip_csv = f"resolvent-{tag}-strip.csv"
    export_scan_csv(right, os.path.join(args.out_dir, right_csv))
    export_scan_csv(strip, os.path.join(args.out_dir, strip_csv))

    def scan_block(scan, csv_name):
        return {
            "kind": scan.kind,
            "bound": float(scan.bound),
            "worst_ratio": float(scan.worst_ratio),
            "pass": bool(scan.passed),
            "argmax": [float(scan.argmax.real), float(scan.argmax.imag)],
            "points": len(scan.grid),
            "tol": float(scan.tol),
            "csv": csv_name,
        }

    report["scans"] = {
        "right": scan_block(right, right_csv),
        "strip": {**scan_block(strip, strip_csv), "delta0": float(delta0)},
    }
    ok = right.passed and strip.passed
    report["verdict"] = "pass" if ok else "fail"
    print(f"right worst_ratio={right.worst_ratio:.9f} "
          f"strip worst_ratio={strip.worst_ratio:.9f}")
    return _finish(report, args, f"resolvent-{tag}.json", started, 0 if ok else 2)


def cmd_perturb(args) -> int:
    started = time.perf_counter()
    spec = _spec_from_args(args)
    a = build_model(spec)
    nm, descriptor = _norm_model(args, a.shape[0])
    if args.b_file and args.random_trials:
        raise _CliUsageError("--b-file and --random-trials are mutually exclusive")
    if not args.b_file and not args.random_trials:
        raise _CliUsageError("one of --b-file or --random-trials is required")
    if args.alpha is not None and not args.alpha > 1.0:
        raise ValueError(f"alpha must exceed 1, got {args.alpha}")

    q = solve_algebraic(a, nm.w)
    cand = membership_margin(q, a, nm, tol=args.tol)
    config = _config_echo(args, {"alpha": args.alpha, "b_file": args.b_file,
                                 "random_trials": args.random_trials})
    report = _base_report("perturb", spec, descriptor, config, a)
    report["candidate"] = _candidate_block(cand)

    if args.b_file:
        b = load_matrix(args.b_file)
        if args.alpha is not None:
            alpha = args.alpha
        else:
            best = max_alpha(a, b, cand, nm)
            alpha = best.alpha
            report["max_alpha"] = {"alpha": float(best.alpha), "decay": float(best.decay)}
        try:
            rep = verify_perturbation(a, b, cand, alpha, nm)
        except RadiusExceededError as exc:
            report["verdict"] = "rejected"
            report["perturbation"] = {
                "alpha": float(alpha),
                "b": matrix_to_json_dict(b),
                "excess": float(exc.excess),
                "detail": str(exc),
            }
            return _finish(report, args, f"perturb-{_tag(spec)}.json", started, 2)
        ok = rep.margin_after <= args.tol and rep.rescaled_member
        report["perturbation"] = {
            "alpha": float(alpha),
            "b": matrix_to_json_dict(b),
            "radius": float(rep.radius),
            "b_norm": float(rep.b_norm),
            "margin_after": float(rep.margin_after),
            "rescaled_member": bool(rep.rescaled_member),
            "rescaled_margin": float(rep.rescaled_margin),
        }
        report["verdict"] = "pass" if ok else "fail"
        return _finish(report, args, f"perturb-{_tag(spec)}.json", started, 0 if ok else 2)

    alpha = args.alpha if args.alpha is not None else 2.0
    trials = args.random_trials
    rng = SplitMix64(args.seed)
    n = a.shape[0]
    passes = 0
    worst = None
    for i in range(trials):
        raw = random_hermitian(n, rng) if i % 2 == 0 else random_matrix(n, rng)
        radius = 1.0 / (2.0 * alpha * cand.q_norm)
        b = raw * (radius / op_norm(raw, nm))
        rep = verify_perturbation(a, b, cand, alpha, nm)
        ok = rep.margin_after <= args.tol and rep.rescaled_member
        passes += ok
        if worst is None or rep.margin_after > worst[1].margin_after:
            worst = (i, rep, b)
    index, rep, b = worst
    report["perturbation"] = {
        "alpha": float(alpha),
        "trials": trials,
        "passes": passes,
        "radius": float(rep.radius),
        "worst_trial": index,
        "worst_margin_after": float(rep.margin_after),
        "worst_b": matrix_to_json_dict(b),
        "worst_rescaled_member": bool(rep.rescaled_member),
    }
    report["verdict"] = "pass" if passes == trials else "fail"
    print(f"perturbation trials passed: {passes}/{trials}")
    return _finish(report, args, f"perturb-{_tag(spec)}.json", started,
                   0 if passes == trials else 2)


def cmd_leftinv(args) -> int:
    started = time.perf_counter()
    spec = _spec_from_args(args)
    a = build_model(spec)
    nm, descriptor = _norm_model(args, a.shape[0])
    if args.t_grid:
        try:
            start, stop, count = args.t_grid.split(",")
            t_grid = np.logspace(math.log10(float(start)), math.log10(float(stop)),
                                 int(count))
        except ValueError as exc:
            raise _CliUsageError(f"--t-grid expects start,stop,count: {exc}") from exc
    else:
        t_grid = default_time_grid(a)
    config = _config_echo(args, {"t_grid": args.t_grid})
    report = _base_report("leftinv", spec, descriptor, config, a)

    witness = refute_stability(a)
    if witness is not None:
        report["verdict"] = "refuted"
        report["witness"] = _witness_block(witness, a)
        return _finish(report, args, f"leftinv-{_tag(spec)}.json", started, 2)

    q = solve_algebraic(a, nm.w)
    cand = membership_margin(q, a, nm, tol=args.tol)
    fit = lower_envelope(a, nm, t_grid)
    bound = fit.c ** 2 / (2.0 * fit.alpha) if fit.alpha > 0.0 else 0.0
    ok = cand.theta >= bound - 1e-8
    rate = dual_map_norm(nm.w, nm) / (2.0 * cand.theta)
    t0 = envelope_witness_search(a, nm, rate, t_grid)
    report["candidate"] = _candidate_block(cand)
    report["envelope"] = {
        "c": float(fit.c),
        "alpha": float(fit.alpha),
        "samples": [[float(t), float(m)] for t, m in fit.grid],
    }
    report["strong_positivity"] = {
        "theta": float(cand.theta),
        "envelope_bound": float(bound),
        "inequality_ok": bool(ok),
        "witness_rate": float(rate),
        "witness": None if t0 is None else {"t0": float(t0[0]), "m0": float(t0[1])},
    }
    report["verdict"] = "pass" if ok and t0 is not None else "fail"
    print(f"c={fit.c:.6e} alpha={fit.alpha:.6e} theta={cand.theta:.6e} "
          f"c^2/(2 alpha)={bound:.6e}")
    return _finish(report, args, f"leftinv-{_tag(spec)}.json", started,
                   0 if report["verdict"] == "pass" else 2)


def cmd_gen(args) -> int:
    spec = _spec_from_args(args)
    a = build_model(spec)
    os.makedirs(args.out_dir, exist_ok=True)
    name = args.out if args.out else f"{_tag(spec)}.json"
    path = os.path.join(args.out_dir, name)
    save_matrix(path, a)
    print(f"matrix written to {path}")
    return 0


def _recheck_one(path: str) -> list:
    """Re-validate one report from its embedded data; returns problems."""
    problems = []
    with open(path, "r", encoding="utf-8") as fh:
        report = json.load(fh)
    command = report.get("command")
    a = matrix_from_json_dict(report["generator"])
    norm = report.get("norm_model", {})
    if norm.get("kind") == "file":
        nm = NormModel.from_weight(matrix_from_json_dict(norm["w"]))
    else:
        nm = NormModel.identity(a.shape[0])
    tol = float(report.get("config", {}).get("tol", DEFAULT_MEMBERSHIP_TOL))
    verdict = report.get("verdict")

    def close(x, y, what):
        if abs(x - y) > _RECHECK_REL_TOL * max(abs(x), abs(y), 1.0):
            problems.append(f"{what}: recomputed {x!r} vs reported {y!r}")

    def check_witness(block):
        lam = complex(block["eigenvalue"][0], block["eigenvalue"][1])
        v = matrix_from_json_dict(block["vector"]).reshape(-1)
        if lam.real < -_WITNESS_REAL_TOL:
            problems.append(f"witness real part {lam.real!r} below -1e-10")
        residual = np.linalg.norm(a @ v - lam * v)
        scale = _WITNESS_RESIDUAL_TOL * (1.0 + spectral_norm(a)) * np.linalg.norm(v)
        if residual > scale:
            problems.append(f"witness residual {residual!r} exceeds {scale!r}")

    def check_candidate(block, what):
        try:
            cand = membership_margin(matrix_from_json_dict(block["q"]), a, nm, tol=tol)
        except ValueError as exc:
            problems.append(f"{what}: embedded candidate invalid ({exc})")
            return None
        close(cand.margin, block["margin"], f"{what} margin")
        close(cand.q_norm, block["q_norm"], f"{what} |Q|")
        close(cand.theta, block["theta"], f"{what} theta")
        if block.get("member") and not cand.margin <= tol:
            problems.append(f"{what}: reported member but margin {cand.margin!r} > {tol!r}")
        return cand

    if verdict in ("refuted",):
        check_witness(report["witness"])
    elif command == "certify" and verdict == "certified":
        cand = check_candidate(report["certificate"], "certificate")
        if cand is not None:
            close(1.0 / (2.0 * cand.q_norm), report["certificate"]["epsilon"], "epsilon")
            close(math.sqrt(cand.q_norm / cand.theta), report["certificate"]["M"], "M")
    elif command == "refute" and verdict == "not_refuted":
        if refute_stability(a) is not None:
            problems.append("report says not_refuted but a witness exists")
    elif command == "q0":
        check_candidate(report["q0"], "q0")
    elif command == "resolvent":
        cand = check_candidate(report["candidate"], "candidate")
        if cand is None:
            return problems
        right = report["scans"]["right"]
        lam = complex(right["argmax"][0], right["argmax"][1])
        ratio = resolvent_norm(a, lam, nm) / right["bound"]
        if ratio > right["worst_ratio"] * (1.0 + _RECHECK_REL_TOL) + _RECHECK_REL_TOL:
            problems.append(f"right scan: argmax ratio {ratio!r} above reported worst")
        if right["pass"] and ratio > 1.0 + right["tol"]:
            problems.append("right scan: reported pass but argmax ratio breaks the bound")
        strip = report["scans"]["strip"]
        lam = complex(strip["argmax"][0], strip["argmax"][1])
        pointwise = 2.0 * cand.q_norm / (1.0 + 2.0 * cand.q_norm * lam.real)
        ratio = resolvent_norm(a, lam, nm) / pointwise
        if strip["pass"] and ratio > 1.0 + strip["tol"]:
            problems.append("strip scan: reported pass but argmax ratio breaks the bound")
    elif command == "perturb" and verdict in ("pass", "fail"):
        cand = check_candidate(report["candidate"], "candidate")
        if cand is None:
            return problems
        block = report["perturbation"]
        b_doc = block.get("b") or block.get("worst_b")
        b = matrix_from_json_dict(b_doc)
        rep = verify_perturbation(a, b, cand, block["alpha"], nm)
        reported = block.get("margin_after", block.get("worst_margin_after"))
        close(rep.margin_after, reported, "perturbed margin")
        if verdict == "pass" and not rep.margin_after <= tol:
            problems.append(f"perturbed margin {rep.margin_after!r} exceeds {tol!r}")
        if verdict == "pass" and not rep.rescaled_member:
            problems.append("rescaled candidate is not a member on recheck")
    elif command == "leftinv" and verdict in ("pass", "fail"):
        cand = check_candidate(report["candidate"], "candidate")
        env = report["envelope"]
        c, alpha = env["c"], env["alpha"]
        for t, m in env["samples"]:
            if m < c * math.exp(-alpha * t) * (1.0 - 1e-12):
                problems.append(f"envelope violated at t={t!r}: m={m!r}")
                break
        sp = report["strong_positivity"]
        if cand is not None and alpha > 0.0 and verdict == "pass":
            if cand.theta < c * c / (2.0 * alpha) - 1e-8:
                problems.append("strong positivity inequality fails on recheck")
        if sp.get("witness"):
            t0, m0 = sp["witness"]["t0"], sp["witness"]["m0"]
            if m0 < math.exp(-sp["witness_rate"] * t0) * (1.0 - 1e-6) * (1.0 - 1e-12):
                problems.append("left-invertibility witness fails its inequality")
    return problems


def cmd_recheck(args) -> int:
    failures = 0
    broken = 0
    for path in args.reports:
        try:
            problems = _recheck_one(path)
        except (KeyError, TypeError, ValueError, json.JSONDecodeError, OSError) as exc:
            broken += 1
            print(f"{path}: not a readable report ({exc})")
            continue
        if problems:
            failures += 1
            print(f"{path}: FAIL")
            for problem in problems:
                print(f"  - {problem}")
        else:
            print(f"{path}: ok")
    if failures:
        return 2
    return 1 if broken else 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _CliUsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (MatrixFormatError, SingularMatrixError, KernelPrecisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except UnstableGeneratorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())
