"""Command-line interface: evaluate, verify, integrate, and study the maps.

Subcommands
-----------
``eval``
    Evaluate one named map at one input and print the resulting matrix.
``verify``
    Run randomized identity suites against independent oracles and print a
    per-identity max-residual table.
``integrate``
    Run a trajectory (or beam reconstruction) and print uniformly sampled
    poses with invariant-drift columns.
``convergence``
    Run a step-size refinement study and print observed orders.

Exit codes: 0 success, 1 verification failure, 2 bad input or chart-domain
violation, 3 integration breakdown (a partial trajectory is still written).

Output is CSV by default (comma separated, ``.`` decimal point, LF line
endings, ``#``-prefixed comment lines) with a JSON mirror behind
``--format json``.  Payloads are byte-identical for identical seeds and
flags; timestamps appear only in ``#`` comment lines and never in JSON.

Environment: ``LIEGROUP_MAPS_SEED`` overrides ``--seed``;
``LIEGROUP_MAPS_FAULT_INJECT`` perturbs one operation inside the
verification dispatch table (a self-test of the harness — the library
itself is untouched).
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import os
import sys

import numpy as np

from .core import Ad6, ChartDomainError, ad6, hat3, hat6
from .integrate import (
    IntegrationError,
    beam_reconstruct,
    convergence_study,
    final_pose_deviation,
    helix_strain,
    integrate,
    make_problem,
    varying_strain,
)
from .oracle import (
    SeriesConfig,
    fd_directional,
    resolvent_cay,
    series_dexp,
    series_dexp_inv,
    series_exp,
)
from .se3 import (
    _screw_lemma_routes,
    adjoint_cay,
    adjoint_cay_A_forms,
    adjoint_vs_se3_cay_mismatch,
    se3_cay,
    se3_dcay,
    se3_dcay_inv,
    se3_ddcay,
    se3_ddcay_inv,
    se3_ddexp,
    se3_ddexp_inv,
    se3_dexp,
    se3_dexp_adform,
    se3_dexp_inv,
    se3_dexp_inv_adform,
    se3_exp,
    se3_log,
)
from .so3 import (
    _rotation_lemma_routes,
    so3_cay,
    so3_dcay,
    so3_dcay_inv,
    so3_ddcay,
    so3_ddcay_inv,
    so3_ddexp,
    so3_ddexp_inv,
    so3_dexp,
    so3_dexp_inv,
    so3_exp,
    so3_log,
)

EXIT_OK = 0
EXIT_VERIFY_FAILURE = 1
EXIT_BAD_INPUT = 2
EXIT_INTEGRATION_FAILURE = 3

_SEED_ENV = "LIEGROUP_MAPS_SEED"
_FAULT_ENV = "LIEGROUP_MAPS_FAULT_INJECT"

_EYE3 = np.eye(3)
_EYE6 = np.eye(6)
_ADJOINT_SERIES = SeriesConfig(max_terms=60)


class CliError(Exception):
    """Bad command-line input; carries the process exit code."""

    def __init__(self, message: str, code: int = EXIT_BAD_INPUT):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# Formatting helpers
# ---------------------------------------------------------------------------


def _fmt(value: float) -> str:
    # shortest representation that round-trips exactly
    return repr(float(value))


def _fmt_vec(vec) -> str:
    return ",".join(_fmt(v) for v in np.asarray(vec, dtype=float))


def _parse_vector(text: str, flag: str, dim: int) -> np.ndarray:
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError:
        raise CliError(f"{flag} expects comma-separated numbers, got {text!r}")
    if len(parts) != dim:
        raise CliError(f"{flag} expects {dim} components, got {len(parts)}")
    return np.array(parts)


def _timestamp_comment() -> str:
    stamp = datetime.datetime.now(datetime.timezone.utc)
    return "# generated: " + stamp.strftime("%Y-%m-%dT%H:%M:%SZ")


def _csv_text(comments: list[str], header: list[str],
              rows: list[list[str]], trailing: list[str] = ()) -> str:
    lines = list(comments)
    lines.append(",".join(header))
    lines.extend(",".join(row) for row in rows)
    lines.extend(trailing)
    return "\n".join(lines) + "\n"


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _quote(cell: str) -> str:
    """Quote a CSV cell that may contain commas (pure numbers, no escapes)."""
    return f'"{cell}"' if cell else ""


def _write_output(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def _cell(value) -> str:
    """CSV cell: blank for None, full-precision number otherwise."""
    return "" if value is None else _fmt(value)


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------

_NOTE_ROT_VALUE = "input is a rotation vector; output is a 3x3 rotation matrix"
_NOTE_ROT_DIFF = ("right-trivialized differential on the rotation group; "
                  "maps rotation-vector rates to angular velocities")
_NOTE_SCREW_VALUE = ("screw input is (angular, linear); output is a 4x4 "
                     "homogeneous pose")
_NOTE_SCREW_DIFF = ("right-trivialized differential on the rigid-motion "
                    "group; screw blocks are (angular, linear)")
_NOTE_CAY = ("unhalved Cayley convention: the differential at zero is 2*I "
             "and its inverse at zero is I/2")
_NOTE_DIR = "directional derivative along --y"
_NOTE_AD_CAY = ("6x6 frame transport of the Cayley pose; equals the "
                "resolvent of the 6x6 screw adjoint")


def _join_notes(*notes: str) -> str:
    return "; ".join(notes)


_EVAL_TABLE = {
    "exp_so3": (so3_exp, 3, False, _NOTE_ROT_VALUE),
    "dexp_so3": (so3_dexp, 3, False, _NOTE_ROT_DIFF),
    "dexpinv_so3": (so3_dexp_inv, 3, False, _NOTE_ROT_DIFF),
    "ddexp_so3": (so3_ddexp, 3, True, _join_notes(_NOTE_ROT_DIFF, _NOTE_DIR)),
    "ddexpinv_so3": (so3_ddexp_inv, 3, True,
                     _join_notes(_NOTE_ROT_DIFF, _NOTE_DIR)),
    "cay_so3": (so3_cay, 3, False, _join_notes(_NOTE_ROT_VALUE, _NOTE_CAY)),
    "dcay_so3": (so3_dcay, 3, False, _join_notes(_NOTE_ROT_DIFF, _NOTE_CAY)),
    "dcayinv_so3": (so3_dcay_inv, 3, False,
                    _join_notes(_NOTE_ROT_DIFF, _NOTE_CAY)),
    "ddcay_so3": (so3_ddcay, 3, True,
                  _join_notes(_NOTE_ROT_DIFF, _NOTE_CAY, _NOTE_DIR)),
    "ddcayinv_so3": (so3_ddcay_inv, 3, True,
                     _join_notes(_NOTE_ROT_DIFF, _NOTE_CAY, _NOTE_DIR)),
    "exp_se3": (se3_exp, 6, False, _NOTE_SCREW_VALUE),
    "dexp_se3": (se3_dexp, 6, False, _NOTE_SCREW_DIFF),
    "dexpinv_se3": (se3_dexp_inv, 6, False, _NOTE_SCREW_DIFF),
    "ddexp_se3": (se3_ddexp, 6, True, _join_notes(_NOTE_SCREW_DIFF, _NOTE_DIR)),
    "ddexpinv_se3": (se3_ddexp_inv, 6, True,
                     _join_notes(_NOTE_SCREW_DIFF, _NOTE_DIR)),
    "cay_se3": (se3_cay, 6, False, _join_notes(_NOTE_SCREW_VALUE, _NOTE_CAY)),
    "dcay_se3": (se3_dcay, 6, False, _join_notes(_NOTE_SCREW_DIFF, _NOTE_CAY)),
    "dcayinv_se3": (se3_dcay_inv, 6, False,
                    _join_notes(_NOTE_SCREW_DIFF, _NOTE_CAY)),
    "ddcay_se3": (se3_ddcay, 6, True,
                  _join_notes(_NOTE_SCREW_DIFF, _NOTE_CAY, _NOTE_DIR)),
    "ddcayinv_se3": (se3_ddcay_inv, 6, True,
                     _join_notes(_NOTE_SCREW_DIFF, _NOTE_CAY, _NOTE_DIR)),
    "ad_cay": (adjoint_cay, 6, False, _NOTE_AD_CAY),
}


def cmd_eval(args) -> int:
    func, dim, needs_direction, note = _EVAL_TABLE[args.map]
    x = _parse_vector(args.x, "--x", dim)
    if needs_direction:
        if args.y is None:
            raise CliError(f"map {args.map!r} needs a direction: pass --y")
        y = _parse_vector(args.y, "--y", dim)
        matrix = func(x, y)
    else:
        if args.y is not None:
            raise CliError(f"map {args.map!r} takes a single input; drop --y")
        y = None
        matrix = func(x)

    matrix = np.asarray(matrix, dtype=float)
    size = matrix.shape[0]
    if args.format == "json":
        payload = {
            "map": args.map,
            "input": {"x": [float(v) for v in x]},
            "output": [[float(v) for v in row] for row in matrix],
            "convention_notes": note,
        }
        if y is not None:
            payload["input"]["y"] = [float(v) for v in y]
        text = _json_text(payload)
    else:
        comments = [f"# liegroup-maps eval {args.map} --x {_fmt_vec(x)}"
                    + (f" --y {_fmt_vec(y)}" if y is not None else ""),
                    f"# {note}",
                    _timestamp_comment()]
        header = [f"m{i + 1}{j + 1}" for i in range(size) for j in range(size)]
        rows = [[_fmt(v) for v in matrix.ravel()]]
        text = _csv_text(comments, header, rows)
    _write_output(text, args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify: samplers
# ---------------------------------------------------------------------------


def _max_abs(a) -> float:
    return float(np.max(np.abs(a)))


def _rand_unit(rng) -> np.ndarray:
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def _rand_rotvec(rng, max_angle: float) -> np.ndarray:
    return rng.uniform(0.0, max_angle) * _rand_unit(rng)


def _rand_screw(rng, max_angle: float, lin_scale: float = 1.0) -> np.ndarray:
    return np.concatenate([_rand_rotvec(rng, max_angle),
                           lin_scale * rng.standard_normal(3)])


def _rand_capped_screw(rng) -> np.ndarray:
    # keep the 6x6 adjoint inside the inverse-series norm cap of the oracle
    s = _rand_screw(rng, 0.35)
    lin = s[3:]
    s[3:] = 0.7 * lin / np.linalg.norm(lin)
    return s


def _rand_direction(rng, dim: int) -> np.ndarray:
    return rng.standard_normal(dim)


# ---------------------------------------------------------------------------
# verify: checks.  Each check draws one sample and returns
# (residual, x, y-or-None); the runner tracks the max over --n samples.
# ---------------------------------------------------------------------------


def _check_rotation_exp_series(ops, rng):
    x = _rand_rotvec(rng, math.pi)
    return _max_abs(ops["so3_exp"](x) - series_exp(hat3(x))), x, None


def _check_rotation_log_roundtrip(ops, rng):
    x = _rand_rotvec(rng, math.pi - 1e-3)
    return _max_abs(ops["so3_log"](ops["so3_exp"](x)) - x), x, None


def _check_rotation_dexp_series(ops, rng):
    x = _rand_rotvec(rng, math.pi)
    return _max_abs(ops["so3_dexp"](x) - series_dexp(hat3(x))), x, None


def _check_rotation_dexp_pair(ops, rng):
    x = _rand_rotvec(rng, 2.0 * math.pi - 0.1)
    res = ops["so3_dexp"](x) @ ops["so3_dexp_inv"](x) - _EYE3
    return _max_abs(res), x, None


def _check_rotation_dexp_inv_bernoulli(ops, rng):
    x = _rand_rotvec(rng, 1.0)
    return _max_abs(ops["so3_dexp_inv"](x) - series_dexp_inv(hat3(x))), x, None


def _check_rotation_ddexp_fd(ops, rng):
    x = _rand_rotvec(rng, 2.5)
    u = _rand_direction(rng, 3)
    res = ops["so3_ddexp"](x, u) - fd_directional(ops["so3_dexp"], x, u)
    return _max_abs(res), x, u


def _check_rotation_ddexp_inv_fd(ops, rng):
    x = _rand_rotvec(rng, 2.5)
    u = _rand_direction(rng, 3)
    res = ops["so3_ddexp_inv"](x, u) - fd_directional(ops["so3_dexp_inv"], x, u)
    return _max_abs(res), x, u


def _check_rotation_product_rule(ops, rng):
    x = _rand_rotvec(rng, 2.5)
    u = _rand_direction(rng, 3)
    res = (ops["so3_ddexp"](x, u) @ ops["so3_dexp_inv"](x)
           + ops["so3_dexp"](x) @ ops["so3_ddexp_inv"](x, u))
    return _max_abs(res), x, u


def _check_screw_exp_series(ops, rng):
    s = _rand_screw(rng, math.pi)
    return _max_abs(ops["se3_exp"](s) - series_exp(hat6(s))), s, None


def _check_screw_log_roundtrip(ops, rng):
    s = _rand_screw(rng, math.pi - 1e-3)
    return _max_abs(ops["se3_log"](ops["se3_exp"](s)) - s), s, None


def _check_screw_dexp_series(ops, rng):
    s = _rand_screw(rng, math.pi)
    return _max_abs(ops["se3_dexp"](s) - series_dexp(ad6(s))), s, None


def _check_screw_dexp_inv_bernoulli(ops, rng):
    s = _rand_capped_screw(rng)
    return _max_abs(ops["se3_dexp_inv"](s) - series_dexp_inv(ad6(s))), s, None


def _check_screw_dexp_adform(ops, rng):
    s = _rand_screw(rng, 2.0 * math.pi - 0.1)
    return _max_abs(ops["se3_dexp"](s) - ops["se3_dexp_adform"](s)), s, None


def _check_screw_dexp_inv_adform(ops, rng):
    s = _rand_screw(rng, 2.0 * math.pi - 0.1)
    res = ops["se3_dexp_inv"](s) - ops["se3_dexp_inv_adform"](s)
    return _max_abs(res), s, None


def _check_screw_dexp_pair(ops, rng):
    s = _rand_screw(rng, 2.0 * math.pi - 0.1)
    res = ops["se3_dexp"](s) @ ops["se3_dexp_inv"](s) - _EYE6
    return _max_abs(res), s, None


def _check_screw_adjoint_series(ops, rng):
    s = _rand_screw(rng, math.pi)
    res = Ad6(ops["se3_exp"](s)) - series_exp(ad6(s), _ADJOINT_SERIES)
    return _max_abs(res), s, None


def _check_cay_rotation_resolvent(ops, rng):
    x = _rand_rotvec(rng, 3.5)
    return _max_abs(ops["so3_cay"](x) - resolvent_cay(hat3(x))), x, None


def _check_cay_screw_resolvent(ops, rng):
    s = _rand_screw(rng, 3.5)
    return _max_abs(ops["se3_cay"](s) - resolvent_cay(hat6(s))), s, None


def _check_cay_adjoint_resolvent(ops, rng):
    s = _rand_screw(rng, 3.5)
    return _max_abs(ops["adjoint_cay"](s) - resolvent_cay(ad6(s))), s, None


def _check_cay_adjoint_forms(ops, rng):
    s = _rand_screw(rng, 3.5)
    forms = list(adjoint_cay_A_forms(s).values())
    worst = max(_max_abs(a - b)
                for i, a in enumerate(forms) for b in forms[i + 1:])
    return worst, s, None


def _check_cay_exp_bridge(ops, rng):
    angle = rng.uniform(1e-3, math.pi - 0.1)
    axis = _rand_unit(rng)
    res = ops["so3_cay"](math.tan(0.5 * angle) * axis) - ops["so3_exp"](angle * axis)
    return _max_abs(res), angle * axis, None


def _check_cay_dcay_pair(ops, rng):
    s = _rand_screw(rng, 3.0)
    res = ops["se3_dcay"](s) @ ops["se3_dcay_inv"](s) - _EYE6
    return _max_abs(res), s, None


def _check_cay_ddcay_fd(ops, rng):
    s = _rand_screw(rng, 2.5)
    u = _rand_direction(rng, 6)
    res = ops["se3_ddcay"](s, u) - fd_directional(ops["se3_dcay"], s, u)
    return _max_abs(res), s, u


def _check_cay_ddcay_inv_fd(ops, rng):
    s = _rand_screw(rng, 2.5)
    u = _rand_direction(rng, 6)
    res = ops["se3_ddcay_inv"](s, u) - fd_directional(ops["se3_dcay_inv"], s, u)
    return _max_abs(res), s, u


def _check_cay_mismatch(ops, rng):
    s = _rand_screw(rng, 3.0)
    m = adjoint_vs_se3_cay_mismatch(s)
    res = (m.group_route - m.adjoint_route) - m.predicted_gap
    return _max_abs(res), s, None


def _check_deriv_screw_ddexp_fd(ops, rng):
    s = _rand_screw(rng, 2.5)
    u = _rand_direction(rng, 6)
    res = ops["se3_ddexp"](s, u) - fd_directional(ops["se3_dexp"], s, u)
    return _max_abs(res), s, u


def _check_deriv_screw_ddexp_inv_fd(ops, rng):
    s = _rand_screw(rng, 2.5)
    u = _rand_direction(rng, 6)
    res = ops["se3_ddexp_inv"](s, u) - fd_directional(ops["se3_dexp_inv"], s, u)
    return _max_abs(res), s, u


def _check_deriv_exp_product_rule(ops, rng):
    s = _rand_screw(rng, 2.5)
    u = _rand_direction(rng, 6)
    res = (ops["se3_ddexp"](s, u) @ ops["se3_dexp_inv"](s)
           + ops["se3_dexp"](s) @ ops["se3_ddexp_inv"](s, u))
    return _max_abs(res), s, u


def _check_deriv_cay_product_rule(ops, rng):
    s = _rand_screw(rng, 2.5)
    u = _rand_direction(rng, 6)
    res = (ops["se3_ddcay"](s, u) @ ops["se3_dcay_inv"](s)
           + ops["se3_dcay"](s) @ ops["se3_ddcay_inv"](s, u))
    return _max_abs(res), s, u


def _lemma_rotation_check(route: str):
    def check(ops, rng):
        x = _rand_rotvec(rng, 2.0 * math.pi - 0.2)
        routes = _rotation_lemma_routes(x)
        return _max_abs(routes[route] - routes["exp"]), x, None

    return check


def _lemma_screw_check(route: str):
    def check(ops, rng):
        s = _rand_screw(rng, 2.0 * math.pi - 0.2)
        routes = _screw_lemma_routes(s)
        return _max_abs(routes[route] - routes["Ad_of_exp"]), s, None

    return check


_LEMMA_ROUTES = ("dexpinv_neg_then_dexp", "dexp_then_dexpinv_neg",
                 "identity_plus_hat_dexp", "identity_plus_dexp_hat")
_LEMMA_SCREW_ROUTES = ("dexpinv_neg_then_dexp", "dexp_then_dexpinv_neg",
                       "identity_plus_ad_dexp", "identity_plus_dexp_ad")

# (suite, check name, tolerance, check function); order fixes the per-check
# random stream, so any suite subset sees the same draws for a given seed.
_CHECKS = [
    ("so3", "rotation_exp_matches_series", 1e-12, _check_rotation_exp_series),
    ("so3", "rotation_log_inverts_exp", 1e-9, _check_rotation_log_roundtrip),
    ("so3", "rotation_dexp_matches_series", 1e-11, _check_rotation_dexp_series),
    ("so3", "rotation_dexp_inverse_pair", 1e-11, _check_rotation_dexp_pair),
    ("so3", "rotation_dexp_inv_matches_bernoulli", 1e-10,
     _check_rotation_dexp_inv_bernoulli),
    ("so3", "rotation_ddexp_matches_fd", 1e-6, _check_rotation_ddexp_fd),
    ("so3", "rotation_ddexp_inv_matches_fd", 1e-6,
     _check_rotation_ddexp_inv_fd),
    ("so3", "rotation_derivative_product_rule", 1e-9,
     _check_rotation_product_rule),
    ("se3", "screw_exp_matches_series", 1e-12, _check_screw_exp_series),
    ("se3", "screw_log_inverts_exp", 1e-8, _check_screw_log_roundtrip),
    ("se3", "screw_dexp_matches_series", 1e-11, _check_screw_dexp_series),
    ("se3", "screw_dexp_inv_matches_bernoulli", 1e-10,
     _check_screw_dexp_inv_bernoulli),
    ("se3", "screw_dexp_block_equals_adform", 1e-10, _check_screw_dexp_adform),
    ("se3", "screw_dexp_inv_block_equals_adform", 1e-10,
     _check_screw_dexp_inv_adform),
    ("se3", "screw_dexp_inverse_pair", 1e-10, _check_screw_dexp_pair),
    ("se3", "screw_adjoint_of_exp_matches_series", 1e-11,
     _check_screw_adjoint_series),
    ("cayley", "cay_rotation_matches_resolvent", 1e-12,
     _check_cay_rotation_resolvent),
    ("cayley", "cay_screw_matches_resolvent", 1e-12,
     _check_cay_screw_resolvent),
    ("cayley", "cay_adjoint_matches_resolvent", 1e-12,
     _check_cay_adjoint_resolvent),
    ("cayley", "cay_adjoint_forms_agree", 1e-12, _check_cay_adjoint_forms),
    ("cayley", "cay_exp_bridge", 1e-11, _check_cay_exp_bridge),
    ("cayley", "cay_dcay_inverse_pair", 1e-12, _check_cay_dcay_pair),
    ("cayley", "cay_ddcay_matches_fd", 1e-6, _check_cay_ddcay_fd),
    ("cayley", "cay_ddcay_inv_matches_fd", 1e-6, _check_cay_ddcay_inv_fd),
    ("cayley", "cay_translation_mismatch_closed_form", 1e-12,
     _check_cay_mismatch),
    ("derivatives", "deriv_screw_ddexp_matches_fd", 1e-6,
     _check_deriv_screw_ddexp_fd),
    ("derivatives", "deriv_screw_ddexp_inv_matches_fd", 1e-6,
     _check_deriv_screw_ddexp_inv_fd),
    ("derivatives", "deriv_screw_ddcay_matches_fd", 1e-6, _check_cay_ddcay_fd),
    ("derivatives", "deriv_screw_ddcay_inv_matches_fd", 1e-6,
     _check_cay_ddcay_inv_fd),
    ("derivatives", "deriv_exp_product_rule", 1e-9,
     _check_deriv_exp_product_rule),
    ("derivatives", "deriv_cay_product_rule", 1e-9,
     _check_deriv_cay_product_rule),
]
_CHECKS += [("lemmas", f"lemma_rotation_{route}", 1e-10,
             _lemma_rotation_check(route)) for route in _LEMMA_ROUTES]
_CHECKS += [("lemmas", f"lemma_screw_{route}", 1e-10,
             _lemma_screw_check(route)) for route in _LEMMA_SCREW_ROUTES]

VERIFY_SUITES = ("all", "so3", "se3", "cayley", "derivatives", "lemmas")


def _verify_ops() -> dict:
    """Operations under test, routed through one table so a fault can be
    injected for harness self-tests without touching the library."""
    ops = {
        "so3_exp": so3_exp, "so3_log": so3_log,
        "so3_dexp": so3_dexp, "so3_dexp_inv": so3_dexp_inv,
        "so3_ddexp": so3_ddexp, "so3_ddexp_inv": so3_ddexp_inv,
        "so3_cay": so3_cay, "so3_dcay": so3_dcay,
        "se3_exp": se3_exp, "se3_log": se3_log,
        "se3_dexp": se3_dexp, "se3_dexp_inv": se3_dexp_inv,
        "se3_dexp_adform": se3_dexp_adform,
        "se3_dexp_inv_adform": se3_dexp_inv_adform,
        "se3_ddexp": se3_ddexp, "se3_ddexp_inv": se3_ddexp_inv,
        "se3_cay": se3_cay, "se3_dcay": se3_dcay,
        "se3_dcay_inv": se3_dcay_inv,
        "se3_ddcay": se3_ddcay, "se3_ddcay_inv": se3_ddcay_inv,
        "adjoint_cay": adjoint_cay,
    }
    fault = os.environ.get(_FAULT_ENV, "")
    if fault:
        target = fault if fault in ops else "so3_dexp"
        clean = ops[target]

        def faulty(*args, _clean=clean):
            out = np.array(_clean(*args), dtype=float)
            out.flat[0] += 1e-6
            return out

        ops[target] = faulty
    return ops


def cmd_verify(args) -> int:
    ops = _verify_ops()
    results = []
    for index, (suite, name, tol, check) in enumerate(_CHECKS):
        if args.suite != "all" and suite != args.suite:
            continue
        rng = np.random.default_rng((args.seed, index))
        worst = -1.0
        worst_x = worst_y = None
        crash = None
        for _ in range(args.n):
            try:
                residual, x, y = check(ops, rng)
            except Exception as err:  # noqa: BLE001 - an injected fault can
                # make intermediates invalid; that is a failing check, not a
                # harness crash
                if crash is None:
                    crash = str(err)
                residual, x, y = math.inf, None, None
            if residual > worst:
                worst, worst_x, worst_y = residual, x, y
        results.append({
            "suite": suite,
            "check": name,
            "samples": args.n,
            "max_residual": worst,
            "tolerance": tol,
            "status": "pass" if worst < tol else "fail",
            "worst_x": _fmt_vec(worst_x) if worst_x is not None else "",
            "worst_y": _fmt_vec(worst_y) if worst_y is not None else "",
            "crash": crash,
        })

    failures = [r for r in results if r["status"] == "fail"]
    if args.format == "json":
        checks_payload = []
        for r in results:
            entry = dict(r)
            if not math.isfinite(entry["max_residual"]):
                entry["max_residual"] = None
            checks_payload.append(entry)
        payload = {
            "command": "verify",
            "suite": args.suite,
            "n": args.n,
            "seed": args.seed,
            "status": "fail" if failures else "pass",
            "checks": checks_payload,
        }
        text = _json_text(payload)
    else:
        comments = [
            f"# liegroup-maps verify {args.suite} --n {args.n} --seed {args.seed}",
            _timestamp_comment(),
        ]
        header = ["suite", "check", "samples", "max_residual", "tolerance",
                  "status", "worst_x", "worst_y"]
        rows = [[r["suite"], r["check"], str(r["samples"]),
                 format(r["max_residual"], ".3e"),
                 format(r["tolerance"], ".1e"), r["status"],
                 _quote(r["worst_x"]), _quote(r["worst_y"])]
                for r in results]
        text = _csv_text(comments, header, rows)
    _write_output(text, args.output)

    for r in failures:
        if r["crash"] is not None:
            print(f"verify failure in {r['check']}: check raised: "
                  f"{r['crash']}", file=sys.stderr)
            continue
        rerun = f"--x {r['worst_x']}"
        if r["worst_y"]:
            rerun += f" --y {r['worst_y']}"
        print(f"verify failure in {r['check']}: max residual "
              f"{r['max_residual']:.3e} exceeds {r['tolerance']:.1e}; "
              f"worst case {rerun}", file=sys.stderr)
    return EXIT_VERIFY_FAILURE if failures else EXIT_OK


# ---------------------------------------------------------------------------
# integrate
# ---------------------------------------------------------------------------

INTEGRATE_PROBLEMS = ("constant_twist", "heavy_top", "beam_helix",
                      "beam_varying")
_BEAM_PROBLEMS = ("beam_helix", "beam_varying")

TRAJECTORY_COLUMNS = ["t", "r1", "r2", "r3",
                      "R11", "R12", "R13", "R21", "R22", "R23",
                      "R31", "R32", "R33",
                      "inv_drift_orth", "inv_drift_energy"]


def _beam_trajectory(problem: str, length: float, segment: float,
                     map_kind: str):
    if length <= 0.0 or segment <= 0.0:
        raise CliError("--h and --t-end must be positive")
    segments = max(1, round(length / segment))
    strain = helix_strain() if problem == "beam_helix" else varying_strain(length)
    return beam_reconstruct(strain, length, segments, map_kind=map_kind,
                            problem_name=problem)


def _trajectory_rows(traj):
    """One row per sample matching TRAJECTORY_COLUMNS; None marks blanks."""
    energy = (traj.invariant_drift("energy")
              if "energy" in traj.invariant_names else None)
    rows = []
    for k, t in enumerate(traj.times):
        pose = traj.poses[k]
        row = [float(t)]
        row.extend(float(v) for v in pose[:3, 3])
        row.extend(float(v) for v in pose[:3, :3].ravel())
        row.append(float(traj.orth_drift[k]))
        row.append(float(energy[k]) if energy is not None else None)
        rows.append(row)
    return rows


def cmd_integrate(args) -> int:
    error = None
    if args.problem in _BEAM_PROBLEMS:
        # for beams --t-end is the arclength and --h the segment size;
        # --method does not apply (piecewise reconstruction)
        traj = _beam_trajectory(args.problem, args.t_end, args.h, args.map)
    else:
        problem = make_problem(args.problem)
        try:
            traj = integrate(problem, method=args.method, map_kind=args.map,
                             h=args.h, t_end=args.t_end)
        except IntegrationError as err:
            traj = err.partial
            error = str(err)

    rows = _trajectory_rows(traj)
    if args.format == "json":
        payload = {
            "command": "integrate",
            "parameters": {"problem": args.problem, "method": args.method,
                           "map": traj.map_kind, "h": args.h,
                           "t_end": args.t_end},
            "columns": TRAJECTORY_COLUMNS,
            "rows": rows,
            "error": error,
        }
        text = _json_text(payload)
    else:
        comments = [
            f"# liegroup-maps integrate {args.problem} --method {args.method}"
            f" --map {traj.map_kind} --h {_fmt(args.h)}"
            f" --t-end {_fmt(args.t_end)}",
            _timestamp_comment(),
        ]
        if args.problem in _BEAM_PROBLEMS:
            comments.append("# beam problem: t is arclength, h the segment "
                            "size; --method does not apply")
        trailing = [f"# error: {error}"] if error else []
        csv_rows = [[_cell(v) for v in row] for row in rows]
        text = _csv_text(comments, TRAJECTORY_COLUMNS, csv_rows, trailing)
    _write_output(text, args.output)

    if error:
        print(f"integration failed: {error}", file=sys.stderr)
        return EXIT_INTEGRATION_FAILURE
    return EXIT_OK


# ---------------------------------------------------------------------------
# convergence
# ---------------------------------------------------------------------------

_EXACT_FLOOR = 1e-11


def _beam_convergence(problem: str, length: float, h_list, map_kind: str):
    h_sorted = sorted(h_list, reverse=True)
    for h in h_sorted:
        if abs(length / h - round(length / h)) > 1e-9 * max(1.0, length / h):
            raise CliError(f"segment size {h!r} does not divide the length")
    reference_h = min(h_sorted) / 8.0
    reference = _beam_trajectory(problem, length, reference_h, "exponential")
    errors = [final_pose_deviation(reference.final_pose,
                                   _beam_trajectory(problem, length, h,
                                                    map_kind).final_pose)
              for h in h_sorted]
    return h_sorted, errors


def _pairwise_orders(h_sorted, errors):
    orders = []
    for k in range(1, len(h_sorted)):
        ratio = errors[k - 1] / errors[k] if errors[k] > 0 else float("inf")
        orders.append(math.log(ratio) / math.log(h_sorted[k - 1] / h_sorted[k]))
    return orders


def cmd_convergence(args) -> int:
    try:
        h_list = [float(p) for p in args.h_list.split(",")]
    except ValueError:
        raise CliError(f"--h-list expects comma-separated numbers, "
                       f"got {args.h_list!r}")
    if len(h_list) < 3:
        raise CliError("--h-list needs at least three step sizes")

    if args.problem in _BEAM_PROBLEMS:
        h_sorted, errors = _beam_convergence(args.problem, args.t_end,
                                             h_list, args.map)
        orders = _pairwise_orders(h_sorted, errors)
    else:
        problem = make_problem(args.problem)
        try:
            study = convergence_study(problem, [args.method], args.map,
                                      h_list, args.t_end)
        except ValueError as err:
            raise CliError(str(err))
        result = study[args.method]
        h_sorted = list(result.step_sizes)
        errors = list(result.errors)
        orders = list(result.pairwise_orders)

    at_floor = [err < _EXACT_FLOOR for err in errors]
    rows = []
    for k, (h, err) in enumerate(zip(h_sorted, errors)):
        if at_floor[k]:
            order_cell = "exact"
        elif k == 0:
            order_cell = None
        else:
            order_cell = orders[k - 1]
        rows.append([h, err, order_cell])

    if any(at_floor):
        slope = None
    else:
        slope = float(np.polyfit(np.log(h_sorted), np.log(errors), 1)[0])

    if args.format == "json":
        payload = {
            "command": "convergence",
            "parameters": {"problem": args.problem, "method": args.method,
                           "map": args.map, "h_list": h_sorted,
                           "t_end": args.t_end},
            "columns": ["h", "err_final_pose", "observed_order"],
            "rows": [[h, err,
                      cell if isinstance(cell, str) or cell is None
                      else float(cell)]
                     for (h, err, cell) in rows],
            "least_squares_order": slope,
        }
        text = _json_text(payload)
    else:
        comments = [
            f"# liegroup-maps convergence {args.problem}"
            f" --method {args.method} --map {args.map}"
            f" --h-list {','.join(_fmt(h) for h in h_sorted)}"
            f" --t-end {_fmt(args.t_end)}",
            _timestamp_comment(),
        ]
        csv_rows = []
        for h, err, cell in rows:
            if cell is None:
                order_text = ""
            elif isinstance(cell, str):
                order_text = cell
            else:
                order_text = format(cell, ".3f")
            csv_rows.append([_fmt(h), format(err, ".6e"), order_text])
        trailing = ["# least-squares order: "
                    + ("n/a (errors at roundoff floor)" if slope is None
                       else format(slope, ".3f"))]
        text = _csv_text(comments, ["h", "err_final_pose", "observed_order"],
                         csv_rows, trailing)
    _write_output(text, args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser / entry point
# ---------------------------------------------------------------------------


def _add_output_args(parser) -> None:
    parser.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="output format (default csv)")
    parser.add_argument("--output", metavar="PATH",
                        help="write to a file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="liegroup-maps",
        description="Evaluate, verify, and integrate rotation and "
                    "rigid-motion coordinate maps.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate one map at one input")
    p_eval.add_argument("map", choices=sorted(_EVAL_TABLE))
    p_eval.add_argument("--x", required=True,
                        help="comma-separated input vector (3 or 6 entries)")
    p_eval.add_argument("--y",
                        help="comma-separated direction, for directional "
                             "derivatives only")
    _add_output_args(p_eval)
    p_eval.set_defaults(func=cmd_eval)

    p_verify = sub.add_parser("verify",
                              help="run randomized identity suites")
    p_verify.add_argument("suite", choices=VERIFY_SUITES)
    p_verify.add_argument("--n", type=int, default=200,
                          help="samples per check (default 200)")
    p_verify.add_argument("--seed", type=int, default=0,
                          help="random seed (default 0; the environment "
                               "variable LIEGROUP_MAPS_SEED wins)")
    _add_output_args(p_verify)
    p_verify.set_defaults(func=cmd_verify)

    p_int = sub.add_parser("integrate",
                           help="run a trajectory or beam reconstruction")
    p_int.add_argument("--problem", choices=INTEGRATE_PROBLEMS,
                       default="constant_twist")
    p_int.add_argument("--method", choices=("mk_rk4", "implicit_midpoint"),
                       default="mk_rk4")
    p_int.add_argument("--map", choices=("exp", "exponential", "cay",
                                         "cayley"), default="exponential")
    p_int.add_argument("--h", type=float, default=1e-3,
                       help="step size (segment size for beams)")
    p_int.add_argument("--t-end", type=float, default=1.0, dest="t_end",
                       help="final time (arclength for beams)")
    _add_output_args(p_int)
    p_int.set_defaults(func=cmd_integrate)

    p_conv = sub.add_parser("convergence",
                            help="run a step-size refinement study")
    p_conv.add_argument("--problem", choices=INTEGRATE_PROBLEMS,
                        default="heavy_top")
    p_conv.add_argument("--method", choices=("mk_rk4", "implicit_midpoint"),
                        default="mk_rk4")
    p_conv.add_argument("--map", choices=("exp", "exponential", "cay",
                                          "cayley"), default="exponential")
    p_conv.add_argument("--h-list", required=True, dest="h_list",
                        help="comma-separated step sizes, at least three")
    p_conv.add_argument("--t-end", type=float, default=1.0, dest="t_end")
    _add_output_args(p_conv)
    p_conv.set_defaults(func=cmd_convergence)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    env_seed = os.environ.get(_SEED_ENV)
    if env_seed is not None and hasattr(args, "seed"):
        try:
            args.seed = int(env_seed)
        except ValueError:
            print(f"{_SEED_ENV} must be an integer, got {env_seed!r}",
                  file=sys.stderr)
            return EXIT_BAD_INPUT

    try:
        return args.func(args)
    except CliError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.code
    except ChartDomainError as err:
        print(f"domain error: {err}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
