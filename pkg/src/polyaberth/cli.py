"""Command-line front end: file I/O, solving, certificates, benchmarking.

Problem files are JSON: {"n": ..., "k": ..., "coefficients": [[[ [re, im],
... ] ...] ...]} with coefficient index 0 holding the constant term, plus an
optional "structure" tag.  Results are written as JSON (default) or CSV.
Exit codes: 0 full convergence, 2 when some component hit the iteration cap,
1 on input errors.
"""

from __future__ import annotations

import argparse
import json
import math
import statistics
import sys
import time
from dataclasses import asdict

import numpy as np

from .bounds import SingularLeadingError, cluster_analysis, henrici_disks, smith_disks
from .eai import EigenEstimate, SolverConfig, Status, solve
from .matpoly import MatrixPolynomial
from .oracle import det_poly, match_spectra, scalar_roots
from .starting import rouche_annulus
from .structured import (
    StructureKind,
    StructureSpec,
    hamiltonian_to_even_odd,
    solve_structured,
    verify_structure,
)

__all__ = ["main", "cmd_solve", "cmd_bench", "load_problem", "ProblemFormatError"]


class ProblemFormatError(ValueError):
    """Malformed problem file, with a field-level diagnostic."""


_STRUCTURE_TAGS = {
    "none": lambda: None,
    "palindromic": lambda: StructureSpec.palindromic(transpose=False),
    "t-palindromic": lambda: StructureSpec.palindromic(transpose=True),
    "antipalindromic": lambda: StructureSpec.palindromic(transpose=False, anti=True),
    "anti-t-palindromic": lambda: StructureSpec.palindromic(transpose=True, anti=True),
    "even": StructureSpec.even,
    "odd": StructureSpec.odd,
    "skew": StructureSpec.skew,
    "hamiltonian": lambda: "hamiltonian",  # resolved after the J mapping
}


def _reject_constant(token: str):
    raise ProblemFormatError(f"non-finite number {token!r} is not allowed")


def _parse_structure_field(obj) -> StructureSpec | str | None:
    if obj is None:
        return None
    if isinstance(obj, str):
        tag = obj.lower()
        if tag not in _STRUCTURE_TAGS:
            raise ProblemFormatError(f"unknown structure tag {obj!r}")
        return _STRUCTURE_TAGS[tag]()
    if isinstance(obj, dict) and "mobius" in obj:
        vals = obj["mobius"]
        if not isinstance(vals, list) or len(vals) != 6:
            raise ProblemFormatError(
                "structure.mobius must be [a_re, a_im, b_re, b_im, c_re, c_im]"
            )
        a, b, c = (complex(vals[0], vals[1]), complex(vals[2], vals[3]), complex(vals[4], vals[5]))
        exc = []
        for entry in obj.get("exceptional", []):
            if not isinstance(entry, list) or len(entry) != 3:
                raise ProblemFormatError("exceptional entries must be [re, im, multiplicity]")
            exc.append((complex(entry[0], entry[1]), int(entry[2])))
        return StructureSpec.mobius(a, b, c, exceptional=tuple(exc))
    raise ProblemFormatError("structure must be a tag string or {'mobius': [...]}")


def load_problem(path: str) -> tuple[MatrixPolynomial, StructureSpec | str | None]:
    """Parse a problem file; raises ProblemFormatError with a diagnostic."""
    try:
        with open(path) as fh:
            doc = json.load(fh, parse_constant=_reject_constant)
    except OSError as e:
        raise ProblemFormatError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ProblemFormatError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from e
    if not isinstance(doc, dict):
        raise ProblemFormatError("top level must be a JSON object")
    for key in ("n", "k", "coefficients"):
        if key not in doc:
            raise ProblemFormatError(f"missing field {key!r}")
    n, k = doc["n"], doc["k"]
    if not (isinstance(n, int) and n >= 1):
        raise ProblemFormatError("field 'n' must be a positive integer")
    if not (isinstance(k, int) and k >= 0):
        raise ProblemFormatError("field 'k' must be a nonnegative integer")
    try:
        raw = np.asarray(doc["coefficients"], dtype=np.float64)
    except (ValueError, TypeError) as e:
        raise ProblemFormatError(f"field 'coefficients': {e}") from e
    if raw.shape != (k + 1, n, n, 2):
        raise ProblemFormatError(
            f"field 'coefficients': expected shape {(k + 1, n, n, 2)}, got {raw.shape}"
        )
    if not np.isfinite(raw).all():
        raise ProblemFormatError("field 'coefficients': non-finite entry")
    coeffs = raw[..., 0] + 1j * raw[..., 1]
    structure = _parse_structure_field(doc.get("structure"))
    return MatrixPolynomial(coeffs), structure


def _c2f(value: complex | None) -> tuple[float, float]:
    return (float(value.real), float(value.imag))


def _config_json(config: SolverConfig) -> dict:
    d = asdict(config)
    spec = d.pop("structure")
    if spec is not None:
        a, b, c = spec["f_coeffs"]
        spec["f_coeffs"] = [a.real, a.imag, b.real, b.imag, c.real, c.imag]
        spec["kind"] = str(spec["kind"])
        spec["exceptional"] = [
            [v.real, v.imag, m] for v, m in spec["exceptional"]
        ]
    d["structure"] = spec
    return d


def _estimate_json(e: EigenEstimate) -> dict:
    re, im = _c2f(e.value)
    out = {
        "re": re,
        "im": im,
        "status": str(e.status),
        "iterations": e.iterations,
        "rcond": e.rcond,
        "last_correction": e.last_correction,
    }
    return out


def _finite(x: float) -> float:
    # JSON has no infinities; saturate the handful of log-domain fields
    if math.isnan(x):
        return x  # filtered out before writing
    return max(min(x, 1e308), -1e308)


def _sanitize(obj):
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items() if not _is_nan(v)}
    if isinstance(obj, list):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, float):
        return _finite(obj)
    return obj


def _is_nan(v) -> bool:
    return isinstance(v, float) and math.isnan(v)


def _spread_coincident(values: list[complex]) -> list[complex]:
    """Separate exactly repeated approximations before disk computation."""
    seen: dict[complex, int] = {}
    out = []
    nonzero = [abs(v) for v in values if v != 0]
    scale = min(nonzero) if nonzero else 1.0
    for v in values:
        c = seen.get(v, 0)
        seen[v] = c + 1
        if c == 0:
            out.append(v)
        else:
            rho = 1e-30 * scale * c
            out.append(v + rho * complex(math.cos(0.9 * c), math.sin(0.9 * c)))
    return out


def cmd_solve(args) -> int:
    try:
        P, file_structure = load_problem(args.input)
    except ProblemFormatError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1

    structure: StructureSpec | str | None
    if args.structure is not None:
        tag = args.structure.lower()
        if tag not in _STRUCTURE_TAGS:
            print(f"error: unknown structure tag {args.structure!r}", file=sys.stderr)
            return 1
        structure = _STRUCTURE_TAGS[tag]()
    else:
        structure = file_structure

    if structure == "hamiltonian":
        try:
            P = hamiltonian_to_even_odd(P)
        except ValueError as e:
            print(f"error: {e}", file=sys.stderr)
            return 1
        structure = _infer_even_odd(P)
        if structure is None:
            print("error: mapped polynomial is neither even nor odd", file=sys.stderr)
            return 1

    config = SolverConfig(
        variant="jacobi" if args.variant == "jacobi" else "gauss_seidel",
        tau1=args.tau1,
        tau2=args.tau2,
        backward_tol=args.backward_tol,
        max_vector_iters=args.max_iters,
        rank_tol=args.rank_tol,
        mobius_fallback=args.mobius_fallback,
        threads=args.threads,
        seed=args.seed,
        structure=structure if isinstance(structure, StructureSpec) else None,
    )

    try:
        if isinstance(structure, StructureSpec):
            paired = solve_structured(P, structure, config)
            estimates = paired.all_estimates()
            totals = (paired.total_scalar_iterations, paired.vector_iterations)
        else:
            result = solve(P, config)
            estimates = result.estimates
            totals = (result.total_scalar_iterations, result.vector_iterations)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1

    finite = [e for e in estimates if not e.is_infinite]
    doc: dict = {
        "eigenvalues": [_estimate_json(e) for e in finite],
        "at_infinity_count": len(estimates) - len(finite),
        "total_scalar_iterations": totals[0],
        "vector_iterations": totals[1],
        "config": _config_json(config),
    }

    if args.disks:
        values = _spread_coincident([e.value for e in finite])
        try:
            disks = smith_disks(P, values)
            report = cluster_analysis(disks)
            doc["disk_kind"] = "smith"
            for entry, d in zip(doc["eigenvalues"], disks):
                entry["inclusion_log_radius"] = _finite(d.log_radius)
                entry["cluster_id"] = d.cluster_id
        except SingularLeadingError:
            disks = henrici_disks(P, values)
            doc["disk_kind"] = "henrici"
            for entry, d in zip(doc["eigenvalues"], disks):
                entry["inclusion_log_radius"] = _finite(d.log_radius)

    if args.annulus:
        ann = rouche_annulus(P, samples=32)
        doc["annulus"] = {
            "r_lower": ann.r_lower,
            "r_upper": _finite(ann.r_upper),
            "certified": ann.certified,
        }

    if args.oracle_check:
        q = det_poly(P)
        ref: list[complex | None] = list(scalar_roots(q))
        ref += [None] * (P.n * P.k - q.degree)
        got = [e.value for e in estimates]
        report = match_spectra(got, ref)
        doc["oracle_max_rel_err"] = report.max_rel_err
        doc["oracle_avg_rel_err"] = report.avg_rel_err

    text = _render(doc, args.format)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    hit_cap = any(e.status is Status.MAX_ITERS for e in estimates)
    return 2 if hit_cap else 0


def _infer_even_odd(P: MatrixPolynomial) -> StructureSpec | None:
    for spec in (StructureSpec.even(), StructureSpec.odd()):
        try:
            verify_structure(P, spec)
            return spec
        except ValueError:
            continue
    return None


def _render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_sanitize(doc), indent=2, allow_nan=False) + "\n"
    lines = ["re,im,status,iterations,rcond,last_correction,inclusion_log_radius,cluster_id"]
    for e in doc["eigenvalues"]:
        lines.append(
            ",".join(
                [
                    repr(e["re"]),
                    repr(e["im"]),
                    e["status"],
                    str(e["iterations"]),
                    repr(e["rcond"]),
                    repr(e["last_correction"]),
                    repr(e["inclusion_log_radius"]) if "inclusion_log_radius" in e else "",
                    str(e["cluster_id"]) if "cluster_id" in e else "",
                ]
            )
        )
    return "\n".join(lines) + "\n"


def cmd_bench(args) -> int:
    ks = [int(v) for v in args.k_list.split(",") if v]
    if not ks:
        print("error: empty --k-list", file=sys.stderr)
        return 1
    rows = []
    for k in ks:
        rng = np.random.default_rng([args.seed, args.n, k])
        coeffs = rng.standard_normal((k + 1, args.n, args.n)) + 1j * rng.standard_normal(
            (k + 1, args.n, args.n)
        )
        P = MatrixPolynomial(coeffs)
        config = SolverConfig(seed=args.seed)
        times = []
        iters = 0
        for _ in range(args.trials):
            t0 = time.perf_counter()
            result = solve(P, config)
            times.append(time.perf_counter() - t0)
            iters = result.total_scalar_iterations
        rows.append((k, statistics.median(times), iters))
    lines = ["k,median_seconds,total_scalar_iterations"]
    for k, sec, it in rows:
        lines.append(f"{k},{repr(sec)},{it}")
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if len(rows) >= 2:
        logs_k = np.log([r[0] for r in rows])
        logs_t = np.log([max(r[1], 1e-9) for r in rows])
        slope = float(np.polyfit(logs_k, logs_t, 1)[0])
        print(f"fitted_exponent={slope:.3f}", file=sys.stderr)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="polyaberth",
        description="Polynomial eigenvalue solver (Ehrlich-Aberth iteration)",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sv = sub.add_parser("solve", help="solve a polynomial eigenvalue problem file")
    sv.add_argument("input", help="problem file (JSON)")
    sv.add_argument("--variant", choices=["jacobi", "gs"], default="gs")
    sv.add_argument("--tau1", type=float, default=None, help="reciprocal-condition stop")
    sv.add_argument("--tau2", type=float, default=None, help="relative-correction stop")
    sv.add_argument("--backward-tol", type=float, default=None)
    sv.add_argument("--max-iters", type=int, default=400)
    sv.add_argument("--structure", default=None, help="override the declared structure tag")
    sv.add_argument("--disks", action="store_true", help="attach inclusion disks")
    sv.add_argument("--annulus", action="store_true", help="attach the spectral annulus")
    sv.add_argument("--oracle-check", action="store_true")
    sv.add_argument("--mobius-fallback", action="store_true")
    sv.add_argument("--rank-tol", type=float, default=None)
    sv.add_argument("--threads", type=int, default=1)
    sv.add_argument("--seed", type=int, default=0)
    sv.add_argument("--output", default=None)
    sv.add_argument("--format", choices=["json", "csv"], default="json")
    sv.set_defaults(func=cmd_solve)

    bn = sub.add_parser("bench", help="time random dense problems over a degree sweep")
    bn.add_argument("--n", type=int, default=2)
    bn.add_argument("--k-list", default="100,200,400")
    bn.add_argument("--trials", type=int, default=3)
    bn.add_argument("--seed", type=int, default=0)
    bn.add_argument("--output", default=None)
    bn.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
