"""Command-line front end.

Map documents come in as JSON (coefficient pairs ascending by power);
reports leave as canonically serialized JSON: sorted keys, floats with 17
significant digits, newline-terminated, byte-stable for identical inputs.
Exit status 0 = success, 2 = domain error, 3 = numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .errors import DomainError, MultspecError, ParseError, ShapeError, Superattracting
from .forms import DOUBLE, EXTENDED, HomForm2
from .lattes import WeierstrassParams, family_sample, j_invariant, lattes_mult2
from .maps import RationalMap, make_map
from .probes import SampleConfig, collision_probe, isospectral_check
from .spectra import (
    SUPER_TOL,
    UNITY_TOL,
    ORBIT_TOL,
    sigma_coords,
    spectra_distance,
    spectrum_layer,
    tau_vector,
)

_STATUS_OK = 0
_STATUS_DOMAIN = 2
_STATUS_NUMERIC = 3


# ---------------------------------------------------------------------------
# canonical report serialization


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError("reports must not contain non-finite numbers")
    if x == 0.0:
        x = 0.0  # normalize -0.0
    return f"{x:.17g}"


def _canon(obj) -> str:
    if isinstance(obj, dict):
        items = []
        for key in sorted(obj):
            if not isinstance(key, str):
                raise TypeError("report keys must be strings")
            items.append(f"{json.dumps(key)}:{_canon(obj[key])}")
        return "{" + ",".join(items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_canon(v) for v in obj) + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__} into a report")


def emit_report(report: dict) -> bytes:
    """Canonical bytes for a report: sorted keys, 17-digit floats, newline end."""
    return (_canon(report) + "\n").encode("utf-8")


def _pair(z) -> list:
    return [float(complex(z).real), float(complex(z).imag)]


def _pairs(values) -> list:
    return [_pair(v) for v in values]


# ---------------------------------------------------------------------------
# map documents


def parse_map_document(text) -> RationalMap:
    """Validated rational map from JSON bytes or str."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("map document must be a JSON object")
    try:
        degree = doc["degree"]
        numerator = doc["numerator"]
        denominator = doc["denominator"]
    except KeyError as exc:
        raise ParseError(f"missing field {exc}") from None
    if not isinstance(degree, int) or isinstance(degree, bool) or degree < 2:
        raise ParseError("degree must be an integer >= 2")
    forms = []
    for name, entries in (("numerator", numerator), ("denominator", denominator)):
        if not isinstance(entries, list) or len(entries) != degree + 1:
            raise ShapeError(f"{name} must list degree+1 = {degree + 1} coefficients")
        coeffs = []
        for pair in entries:
            if (
                not isinstance(pair, (list, tuple))
                or len(pair) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pair)
            ):
                raise ParseError(f"{name} entries must be [re, im] number pairs")
            coeffs.append(complex(pair[0], pair[1]))
        forms.append(HomForm2.from_coeffs(coeffs))
    return make_map(forms[0], forms[1])


def map_document(f: RationalMap, label=None) -> dict:
    doc = {
        "degree": f.degree,
        "numerator": _pairs(f.numerator.coeffs),
        "denominator": _pairs(f.denominator.coeffs),
    }
    if label is not None:
        doc["label"] = label
    return doc


def serialize_map(f: RationalMap, label=None) -> bytes:
    return emit_report(map_document(f, label))


def _load_map(path: str) -> RationalMap:
    try:
        with open(path, "rb") as handle:
            return parse_map_document(handle.read())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None


# ---------------------------------------------------------------------------
# subcommands


def _precision_tier() -> str:
    tier = os.environ.get("MULTSPEC_PRECISION", DOUBLE)
    if tier not in (DOUBLE, EXTENDED):
        raise ParseError(f"MULTSPEC_PRECISION must be 'double' or 'extended', got {tier!r}")
    return tier


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multspec",
        description="Multiplier-spectrum invariants of rational maps",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="multiplier multiset or sigma coordinates at one period")
    sp.add_argument("--map", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--sigma", action="store_true")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--orbit-tol", type=float, default=ORBIT_TOL)
    sp.add_argument("--out")

    tp = sub.add_parser("tau", help="reciprocal-spectrum fingerprint over a period window")
    tp.add_argument("--map", required=True)
    tp.add_argument("--from", dest="n_from", type=int, required=True)
    tp.add_argument("--to", dest="n_to", type=int, required=True)
    tp.add_argument("--seed", type=int, default=0)
    tp.add_argument("--super-tol", type=float, default=SUPER_TOL)
    tp.add_argument("--orbit-tol", type=float, default=ORBIT_TOL)
    tp.add_argument("--out")

    cp = sub.add_parser("compare", help="fingerprint distance between two maps")
    cp.add_argument("--map-a", required=True)
    cp.add_argument("--map-b", required=True)
    cp.add_argument("--from", dest="n_from", type=int, required=True)
    cp.add_argument("--to", dest="n_to", type=int, required=True)
    cp.add_argument("--seed", type=int, default=0)
    cp.add_argument("--super-tol", type=float, default=SUPER_TOL)
    cp.add_argument("--threshold", type=float, default=1e-8)
    cp.add_argument("--out")

    lp = sub.add_parser("lattes", help="doubling maps on elliptic curves; family isospectrality")
    lp.add_argument("--g2")
    lp.add_argument("--g3")
    lp.add_argument("--family", type=int)
    lp.add_argument("--seed", type=int, default=0)
    lp.add_argument("--nmax", type=int, default=2)
    lp.add_argument("--tol", type=float, default=1e-6)
    lp.add_argument("--out")

    pp = sub.add_parser("probe", help="pairwise collision probe over random maps")
    pp.add_argument("--degree", type=int, required=True)
    pp.add_argument("--from", dest="n_from", type=int, required=True)
    pp.add_argument("--to", dest="n_to", type=int, required=True)
    pp.add_argument("--trials", type=int, required=True)
    pp.add_argument("--seed", type=int, required=True)
    pp.add_argument("--threshold", type=float, default=1e-10)
    pp.add_argument("--super-tol", type=float, default=SUPER_TOL)
    pp.add_argument("--workers", type=int, default=0)
    pp.add_argument("--out")

    return parser


def _parse_complex(text: str, flag: str) -> complex:
    try:
        re_s, im_s = text.split(",")
        return complex(float(re_s), float(im_s))
    except (ValueError, AttributeError):
        raise ParseError(f"{flag} expects RE,IM, got {text!r}") from None


def _cmd_spectrum(args, tier):
    f = _load_map(args.map)
    layer = spectrum_layer(f, args.n, seed=args.seed, orbit_tol=args.orbit_tol, precision=tier)
    if args.sigma:
        results = {"n": args.n, "sigma": _pairs(sigma_coords(layer).values)}
    else:
        results = {"n": args.n, "multipliers": _pairs(layer.multipliers)}
    config = {
        "n": args.n,
        "seed": args.seed,
        "tolerances": {"orbit": args.orbit_tol, "unity": UNITY_TOL},
        "precision": tier,
    }
    return config, results


def _cmd_tau(args, tier):
    f = _load_map(args.map)
    config = {
        "window": [args.n_from, args.n_to],
        "seed": args.seed,
        "tolerances": {"superattracting": args.super_tol, "orbit": args.orbit_tol},
        "precision": tier,
    }
    tv = tau_vector(
        f,
        args.n_from,
        args.n_to,
        super_tol=args.super_tol,
        seed=args.seed,
        orbit_tol=args.orbit_tol,
        precision=tier,
    )
    results = {
        "window": [args.n_from, args.n_to],
        "blocks": [_pairs(seg.values) for seg in tv.segments],
    }
    return config, results


def _cmd_compare(args, tier):
    fa = _load_map(args.map_a)
    fb = _load_map(args.map_b)
    config = {
        "window": [args.n_from, args.n_to],
        "seed": args.seed,
        "tolerances": {"superattracting": args.super_tol, "threshold": args.threshold},
        "precision": tier,
    }
    ta = tau_vector(fa, args.n_from, args.n_to, super_tol=args.super_tol, seed=args.seed, precision=tier)
    tb = tau_vector(fb, args.n_from, args.n_to, super_tol=args.super_tol, seed=args.seed, precision=tier)
    dist = spectra_distance(ta, tb)
    results = {
        "distance": dist,
        "threshold": args.threshold,
        "verdict": "indistinguishable" if dist < args.threshold else "distinct",
    }
    return config, results


def _cmd_lattes(args, tier):
    config = {
        "seed": args.seed,
        "nmax": args.nmax,
        "tolerances": {"isospectral": args.tol},
        "precision": tier,
    }
    if args.family is not None:
        params = family_sample(args.family, args.seed)
        maps = [lattes_mult2(p) for p in params]
        verdict = isospectral_check(maps, args.nmax, args.tol)
        results = {
            "members": [
                {"g2": _pair(p.g2), "g3": _pair(p.g3), "j": _pair(j_invariant(p))}
                for p in params
            ],
            "isospectral": verdict,
            "nmax": args.nmax,
            "tolerance": args.tol,
        }
        return config, results
    if args.g2 is None or args.g3 is None:
        raise ParseError("lattes needs either --family K or both --g2 and --g3")
    p = WeierstrassParams(_parse_complex(args.g2, "--g2"), _parse_complex(args.g3, "--g3"))
    f = lattes_mult2(p)
    results = {
        "g2": _pair(p.g2),
        "g3": _pair(p.g3),
        "j": _pair(j_invariant(p)),
        "map": map_document(f),
    }
    return config, results


def _cmd_probe(args, tier):
    cfg = SampleConfig(
        degree=args.degree,
        window=(args.n_from, args.n_to),
        trials=args.trials,
        seed=args.seed,
        super_tol=args.super_tol,
        distance_threshold=args.threshold,
        precision=tier,
    )
    report = collision_probe(cfg, workers=args.workers)
    config = {
        "degree": args.degree,
        "window": [args.n_from, args.n_to],
        "trials": args.trials,
        "seed": args.seed,
        "tolerances": {"superattracting": args.super_tol, "distance_threshold": args.threshold},
        "precision": tier,
    }
    return config, report.to_dict()


_HANDLERS = {
    "spectrum": _cmd_spectrum,
    "tau": _cmd_tau,
    "compare": _cmd_compare,
    "lattes": _cmd_lattes,
    "probe": _cmd_probe,
}


def run_command(argv):
    """Dispatch one CLI invocation; returns (exit_status, report dict)."""
    argv = list(argv)
    parser = _build_parser()
    args = parser.parse_args(argv)
    report = {"command": args.command, "argv": argv, "version": __version__}
    try:
        tier = _precision_tier()
        try:
            config, results = _HANDLERS[args.command](args, tier)
        except ValueError as exc:
            raise ParseError(str(exc)) from None
        report["config"] = config
        report["results"] = results
        return _STATUS_OK, report
    except MultspecError as exc:
        error = {"kind": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, Superattracting):
            error["period"] = exc.period
        report["error"] = error
        status = _STATUS_DOMAIN if isinstance(exc, DomainError) else _STATUS_NUMERIC
        return status, report


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    status, report = run_command(argv)
    payload = emit_report(report)
    out_path = None
    # --out is shared by every subcommand; argparse already validated it.
    if "--out" in argv:
        out_path = argv[argv.index("--out") + 1]
    if out_path:
        with open(out_path, "wb") as handle:
            handle.write(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()
    if "error" in report:
        print(f"{report['error']['kind']}: {report['error']['message']}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
