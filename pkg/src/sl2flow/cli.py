"""Command-line front end.

Subcommands: classify, verdict, idempotents, integrate, portrait, scan,
verify.  Input maps are plain text files (see ``parse_phi_file``);
reports are JSON with a stable key set; trajectories and portraits are
comma-delimited text with 17-significant-digit floats.  Exit codes:
0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .algebra import GRAM_STANDARD, ad_matrix, bracket_coords
from .charts import UnsupportedChartError, infinity_singularities
from .completeness import (
    blowup_time,
    causal_type,
    find_idempotents,
    geodesic_verdict,
    metric_verdict,
)
from .euler_arnold import (
    build_field,
    eval_field,
    first_integral_gradients,
    lax_rhs,
)
from .integrator import (
    ComplexRay,
    IntegratorOptions,
    Termination,
    integrate,
    integrate_complex_ray,
)
from .normal_form import Case, NormalForm, reduce
from .algebra import BasisKind, BasisKindTag
from .sampling import PON_SEED, random_phi, random_unit

SCHEMA = "sl2flow-report-v1"


class InputError(ValueError):
    pass


# ---------------------------------------------------------------- input


def _parse_scalar(tok: str, mode: str):
    try:
        if ":" in tok:
            re_s, im_s = tok.split(":")
            val = complex(float(re_s), float(im_s))
            if mode == "real":
                raise InputError(f"complex entry {tok!r} in real mode")
            return val
        x = float(tok)
        return complex(x, 0.0) if mode == "complex" else x
    except ValueError as exc:
        raise InputError(f"bad numeric entry {tok!r}") from exc


def parse_phi_file(text: str):
    """Parse a map description.

    Format: ``key = value`` lines (keys: mode, basis) and a ``matrix =``
    line followed by three whitespace-separated rows.  Real entries are
    plain floats, complex entries are ``re:im`` pairs.  Lines starting
    with ``#`` are comments.
    """
    mode = "real"
    basis = "standard"
    rows: list[list] = []
    in_matrix = False
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if in_matrix and len(rows) < 3:
            rows.append(line.split())
            continue
        if "=" in line:
            key, _, val = line.partition("=")
            key = key.strip().lower()
            val = val.strip()
            if key == "mode":
                if val not in ("real", "complex"):
                    raise InputError(f"mode must be real or complex, got {val!r}")
                mode = val
            elif key == "basis":
                if val != "standard":
                    raise InputError("only the standard basis is supported in input files")
                basis = val
            elif key == "matrix":
                in_matrix = True
                if val:
                    rows.append(val.split())
            else:
                raise InputError(f"unknown key {key!r}")
        else:
            raise InputError(f"cannot parse line {raw!r}")
    if len(rows) != 3 or any(len(r) != 3 for r in rows):
        raise InputError("matrix must have exactly 3 rows of 3 entries")
    dtype = complex if mode == "complex" else float
    phi = np.array([[_parse_scalar(t, mode) for t in r] for r in rows], dtype=dtype)
    return phi, mode, basis


def _parse_vector(text: str, mode: str):
    toks = text.split(",")
    if len(toks) != 3:
        raise InputError("expected three comma-separated components")
    vals = [_parse_scalar(t.strip(), mode) for t in toks]
    dtype = complex if mode == "complex" else float
    return np.array(vals, dtype=dtype)


# --------------------------------------------------------------- output


def _num(x):
    if isinstance(x, complex) or np.iscomplexobj(np.asarray(x)):
        x = complex(x)
        return {"re": x.real, "im": x.imag}
    return float(x)


def _matrix(m):
    return [[_num(v) for v in row] for row in np.asarray(m)]


def _params_dict(nf: NormalForm):
    if nf.case is Case.CASE1:
        names = ("lambda1", "lambda2", "lambda3")
    elif nf.case is Case.CASE2:
        names = ("mu", "alpha", "beta")
    elif nf.case is Case.CASE3:
        names = ("mu", "lambda", "zeta")
    else:
        names = ("lambda", "zeta")
    return {n: _num(v) for n, v in zip(names, nf.params)}


def classify_report(phi, mode: str) -> dict:
    from .normal_form import invert_params

    nf = reduce(phi)
    f = build_field(nf)
    mv = metric_verdict(nf)
    return {
        "schema": SCHEMA,
        "version": __version__,
        "mode": mode,
        "normal_form": {
            "case": int(nf.case),
            "params": _params_dict(nf),
            "delta": nf.delta,
            "basis_kind": nf.basis_kind.kind.value,
            "P": _matrix(nf.P),
        },
        "inverse_params": [_num(v) for v in invert_params(nf)],
        "field": {"coeffs": [_num(c) for c in f.coeffs]},
        "metric": {
            "complete": mv.complete,
            "criterion_id": mv.criterion_id,
            "criterion_value": None if mv.criterion_value is None else _num(mv.criterion_value),
        },
    }


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


# ----------------------------------------------------------- subcommands


def cmd_classify(args) -> int:
    phi, mode, _ = _load_phi(args)
    _emit(_json_dump(classify_report(phi, mode)), args.out)
    return 0


def cmd_verdict(args) -> int:
    phi, mode, _ = _load_phi(args)
    if mode != "real":
        raise InputError("per-geodesic verdicts are real-mode only")
    if args.z0 is None:
        raise InputError("verdict requires --z0")
    z0_std = _parse_vector(args.z0, mode)
    rep = classify_report(phi, mode)
    nf = reduce(phi)
    z0 = np.linalg.solve(nf.P, z0_std)
    gv = geodesic_verdict(nf, z0)
    ct = causal_type(nf, z0)
    rep["geodesic"] = {
        "z0_standard": [_num(v) for v in z0_std],
        "z0_adapted": [_num(v) for v in z0],
        "class": gv.klass.value,
        "side": None if gv.side is None else gv.side.value,
        "endpoints": None if gv.endpoints is None else [
            None if not math.isfinite(e) else _num(e) for e in gv.endpoints
        ],
        "extrapolated": gv.extrapolated,
        "note": gv.note,
        "causal_type": ct.value,
    }
    _emit(_json_dump(rep), args.out)
    return 0


def cmd_idempotents(args) -> int:
    phi, mode, _ = _load_phi(args)
    rep = classify_report(phi, mode)
    nf = reduce(phi)
    f = build_field(nf)
    items = []
    for ray in find_idempotents(f):
        entry = {
            "direction_adapted": [_num(v) for v in ray.direction],
            "direction_standard": [_num(v) for v in nf.P @ ray.direction],
            "kappa": _num(ray.kappa),
            "blowup_time_s0_1": _num(blowup_time(ray, 1.0)),
        }
        if mode == "real":
            entry["causal_type"] = causal_type(nf, np.real(ray.direction)).value
        items.append(entry)
    rep["idempotents"] = items
    _emit(_json_dump(rep), args.out)
    return 0


def _traj_csv(traj, nf, z0_std, mode: str) -> str:
    buf = io.StringIO()
    buf.write("# sl2flow-trajectory-v1\n")
    buf.write(
        f"# mode={mode} case={int(nf.case)} delta={nf.delta} backend={traj.backend}\n"
    )
    buf.write("# z0_standard=" + ",".join(_fmt(v) for v in np.real(z0_std)))
    if mode == "complex":
        buf.write(" imag=" + ",".join(_fmt(v) for v in np.imag(z0_std)))
    buf.write("\n")
    zstd = traj.z @ nf.P.T  # row-wise P @ z
    if mode == "complex":
        buf.write("t_re,t_im,z1_re,z1_im,z2_re,z2_im,z3_re,z3_im\n")
        phase = getattr(traj, "_phase", 1.0 + 0.0j)
        for k in range(len(traj.t)):
            tc = traj.t[k] * phase
            row = [tc.real, tc.imag]
            for j in range(3):
                row += [zstd[k, j].real, zstd[k, j].imag]
            buf.write(",".join(_fmt(v) for v in row) + "\n")
    else:
        buf.write("t,z1,z2,z3\n")
        for k in range(len(traj.t)):
            buf.write(
                ",".join(_fmt(v) for v in (traj.t[k], zstd[k, 0], zstd[k, 1], zstd[k, 2]))
                + "\n"
            )
    buf.write(
        f"# termination={traj.termination.value}"
        + (f" t_est={_fmt(traj.t_est)}" if traj.t_est is not None else "")
        + f" drift_I1={_fmt(traj.integral_drift[0])}"
        + f" drift_I2={_fmt(traj.integral_drift[1])}"
        + f" steps={traj.n_steps}\n"
    )
    return buf.getvalue()


def cmd_integrate(args) -> int:
    phi, mode, _ = _load_phi(args)
    if args.z0 is None:
        raise InputError("integrate requires --z0")
    z0_std = _parse_vector(args.z0, mode)
    nf = reduce(phi)
    f = build_field(nf)
    z0 = np.linalg.solve(nf.P, z0_std)
    opts = _options(args)
    if args.ray is not None:
        if mode != "complex":
            raise InputError("--ray requires a complex-mode input")
        theta_s, rmax_s = args.ray.split(",")
        ray = ComplexRay(float(theta_s), float(rmax_s))
        traj = integrate_complex_ray(f, z0, ray, opts)
        traj._phase = complex(math.cos(ray.theta), math.sin(ray.theta))  # type: ignore[attr-defined]
    else:
        if args.tspan is None:
            raise InputError("integrate requires --tspan (or --ray in complex mode)")
        t0_s, t1_s = args.tspan.split(",")
        traj = integrate(f, z0, (float(t0_s), float(t1_s)), opts)
    _emit(_traj_csv(traj, nf, z0_std, mode), args.out)
    return 0


def cmd_portrait(args) -> int:
    phi, mode, _ = _load_phi(args)
    if mode != "real":
        raise InputError("portrait is real-mode only")
    nf = reduce(phi)
    f = build_field(nf)
    rng = np.random.default_rng(args.seed)
    buf = io.StringIO()
    buf.write("# sl2flow-portrait-v1\n")
    buf.write(f"# case={int(nf.case)} delta={nf.delta} seed={args.seed}\n")
    buf.write("record,chart,label,c1,c2\n")
    try:
        sings = infinity_singularities(f)
    except UnsupportedChartError as exc:
        raise InputError(str(exc)) from exc
    span = 1.0
    for s in sings:
        buf.write(
            f"singularity,{s.chart.value},{s.label}:{s.kind.value},"
            f"{_fmt(s.coords[0])},{_fmt(s.coords[1])}\n"
        )
        span = max(span, abs(s.coords[0]), abs(s.coords[1]))
    from .charts import _infinity_rep, Chart

    rep = _infinity_rep(f, Chart.X)
    rmax = 2.5 * span
    n_leaves = args.leaves
    seeds = rng.uniform(-1.2 * span, 1.2 * span, size=(n_leaves, 2))
    h = 0.02 * span / max(1.0, float(np.max(np.abs(f.coeffs))))
    for li, seed in enumerate(seeds):
        for direction in (1.0, -1.0):
            x = seed.copy()
            for _ in range(args.steps):
                k1 = direction * rep(x[0], x[1])
                k2 = direction * rep(*(x + 0.5 * h * k1))
                k3 = direction * rep(*(x + 0.5 * h * k2))
                k4 = direction * rep(*(x + h * k3))
                x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
                if not np.all(np.isfinite(x)) or max(abs(x[0]), abs(x[1])) > rmax:
                    break
                buf.write(f"leaf,x,{li},{_fmt(x[0])},{_fmt(x[1])}\n")
    _emit(buf.getvalue(), args.out)
    return 0


def _grid_axis(spec: str):
    lo_s, hi_s, n_s = spec.split(":")
    lo, hi, n = float(lo_s), float(hi_s), int(n_s)
    if n < 1:
        raise InputError("grid count must be >= 1")
    return np.linspace(lo, hi, n)


def _numeric_cross_check(f, rng, horizon=50.0):
    """Cheap numeric completeness probe; returns the numeric verdict."""
    opts = IntegratorOptions(rel_tol=1e-9, abs_tol=1e-9, record=False)
    rays = find_idempotents(f)
    if rays:
        ray = rays[0]
        s0 = 1.0 if ray.kappa > 0 else -1.0
        t_star = float(blowup_time(ray, s0))
        traj = integrate(f, s0 * ray.direction, (0.0, 2.0 * t_star), opts)
        return not (traj.termination is Termination.BLOW_UP)
    for _ in range(3):
        z0 = 0.25 * random_unit(rng)
        for tdir in (horizon, -horizon):
            traj = integrate(f, z0, (0.0, tdir), opts)
            if traj.termination is Termination.BLOW_UP:
                return False
    return True


def cmd_scan(args) -> int:
    case = Case(args.case)
    if case not in (Case.CASE1, Case.CASE3):
        raise InputError("scan supports case 1 (nu1,nu2,nu3) and case 3 (eta,nu,zeta)")
    axes = [
        _grid_axis(s) for s in args.grid.split(",")
    ]
    if len(axes) != 3:
        raise InputError("grid must have three axes lo:hi:n,lo:hi:n,lo:hi:n")
    rng = np.random.default_rng(args.seed)
    buf = io.StringIO()
    buf.write("# sl2flow-scan-v1\n")
    buf.write(f"# case={int(case)} seed={args.seed} check={int(args.check)}\n")
    if case is Case.CASE1:
        buf.write("nu1,nu2,nu3,a,b,complete_analytic,complete_numeric,disagree\n")
    else:
        buf.write("eta,nu,zeta,a,b,complete_analytic,complete_numeric,disagree\n")
    n_disagree = 0
    for v1 in axes[0]:
        for v2 in axes[1]:
            for v3 in axes[2]:
                if case is Case.CASE1:
                    if min(abs(v1), abs(v2), abs(v3)) < 1e-9:
                        continue
                    nf = NormalForm(
                        Case.CASE1,
                        (1.0 / v1, 1.0 / v2, 1.0 / v3),
                        np.eye(3),
                        BasisKind(BasisKindTag.ORTHONORMAL, 1),
                        "real",
                    )
                else:
                    if min(abs(v1), abs(v2)) < 1e-9 or abs(v3) < 1e-9:
                        continue
                    nf = NormalForm(
                        Case.CASE3,
                        (1.0 / v1, 1.0 / v2, v3),
                        PON_SEED,
                        BasisKind(BasisKindTag.PSEUDO_ORTHONORMAL, 1),
                        "real",
                    )
                f = build_field(nf)
                mv = metric_verdict(nf)
                a, b = f.coeffs[0], f.coeffs[1]
                num_s = ""
                dis = ""
                if args.check:
                    num = _numeric_cross_check(f, rng)
                    num_s = str(int(num))
                    dis = str(int(num != mv.complete))
                    n_disagree += int(num != mv.complete)
                buf.write(
                    ",".join(
                        [_fmt(v1), _fmt(v2), _fmt(v3), _fmt(a), _fmt(b), str(int(mv.complete)), num_s, dis]
                    )
                    + "\n"
                )
    buf.write(f"# disagreements={n_disagree}\n")
    _emit(buf.getvalue(), args.out)
    return 0


# ------------------------------------------------------------- verify


def _suite_algebra(rng, n, fault_gram=False):
    G = GRAM_STANDARD.copy()
    if fault_gram:
        G = G + 1e-6 * np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    fails = 0
    for _ in range(n):
        x, y, z = rng.normal(size=(3, 3))
        scale = (np.linalg.norm(x) * np.linalg.norm(y) * np.linalg.norm(z)) + 1.0
        jac = (
            bracket_coords(x, bracket_coords(y, z))
            + bracket_coords(y, bracket_coords(z, x))
            + bracket_coords(z, bracket_coords(x, y))
        )
        if np.max(np.abs(jac)) > 1e-12 * scale:
            fails += 1
        adinv = bracket_coords(x, y) @ G @ z + y @ G @ bracket_coords(x, z)
        if abs(adinv) > 1e-12 * scale:
            fails += 1
        from .algebra import to_matrix

        tr = 2.0 * np.trace(to_matrix(x) @ to_matrix(y))
        half = 0.5 * np.trace(ad_matrix(x) @ ad_matrix(y))
        if abs(tr - half) > 1e-12 * (1.0 + np.linalg.norm(x) * np.linalg.norm(y)):
            fails += 1
    return fails, 3 * n


def _suite_normal_form(rng, n):
    fails = 0
    total = 0
    for case in Case:
        for _ in range(n):
            phi, _ = random_phi(case, rng)
            total += 1
            try:
                nf = reduce(phi)
                if nf.case is not case:
                    fails += 1
            except Exception:
                fails += 1
    return fails, total


def _suite_conjugation(rng, n):
    fails = 0
    total = 0
    for case in Case:
        for _ in range(n):
            phi, _ = random_phi(case, rng)
            nf = reduce(phi)
            f = build_field(nf)
            total += 1
            ok = True
            for _ in range(5):
                z = rng.normal(size=3)
                lhs = np.linalg.solve(nf.P, lax_rhs(phi, nf.P @ z))
                rhs = eval_field(f, z)
                if np.max(np.abs(lhs - rhs)) > 1e-8 * max(1.0, float(np.max(np.abs(z)) ** 2)):
                    ok = False
            fails += 0 if ok else 1
    return fails, total


def _suite_gradients(rng, n):
    fails = 0
    total = 0
    for case in Case:
        for _ in range(n):
            phi, _ = random_phi(case, rng)
            f = build_field(reduce(phi))
            z = rng.normal(size=3)
            g1, g2 = first_integral_gradients(f, z)
            e = eval_field(f, z)
            scale = max(1.0, float(np.max(np.abs(z))) ** 3) * max(
                1.0, float(np.max(np.abs(f.iparams)))
            )
            total += 2
            if abs(g1 @ e) > 1e-12 * scale:
                fails += 1
            if abs(g2 @ e) > 1e-12 * scale:
                fails += 1
    return fails, total


def _suite_idempotents(rng, n):
    fails = 0
    total = 0
    for case in Case:
        for _ in range(n):
            phi, _ = random_phi(case, rng)
            f = build_field(reduce(phi))
            for ray in find_idempotents(f):
                total += 1
                res = np.linalg.norm(
                    eval_field(f, ray.direction) - ray.kappa * ray.direction
                )
                if res > 1e-10 * max(1.0, abs(ray.kappa)):
                    fails += 1
    return fails, total


def _suite_drift(rng, n, bound):
    fails = 0
    total = 0
    for case in Case:
        for _ in range(n):
            phi, _ = random_phi(case, rng)
            f = build_field(reduce(phi))
            z0 = random_unit(rng)
            traj = integrate(f, z0, (0.0, 10.0), IntegratorOptions(record=False))
            total += 1
            if traj.termination is Termination.BLOW_UP:
                continue  # blow-up before t=10 is legitimate for incomplete metrics
            if max(traj.integral_drift) > bound:
                fails += 1
    return fails, total


def cmd_verify(args) -> int:
    rng = np.random.default_rng(args.seed)
    suites = [
        ("algebra", lambda: _suite_algebra(rng, 1000, fault_gram=args.fault == "killing-gram")),
        ("normal-form", lambda: _suite_normal_form(rng, 30)),
        ("field-conjugation", lambda: _suite_conjugation(rng, 20)),
        ("first-integral-gradients", lambda: _suite_gradients(rng, 50)),
        ("idempotent-residuals", lambda: _suite_idempotents(rng, 20)),
        ("integrator-drift", lambda: _suite_drift(rng, 10, args.drift_bound)),
    ]
    any_fail = False
    for name, fn in suites:
        fails, total = fn()
        status = "pass" if fails == 0 else "FAIL"
        print(f"{name}: {total} checks, {fails} failures [{status}]")
        any_fail = any_fail or fails > 0
    return 1 if any_fail else 0


# ---------------------------------------------------------------- main


def _load_phi(args):
    if args.input is None:
        raise InputError("missing --input PATH")
    try:
        with open(args.input, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {args.input}: {exc}") from exc
    return parse_phi_file(text)


def _options(args) -> IntegratorOptions:
    kw = {}
    if getattr(args, "tol", None) is not None:
        kw["rel_tol"] = args.tol
        kw["abs_tol"] = args.tol
    return IntegratorOptions(**kw)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sl2flow",
        description="classify and integrate quadratic geodesic flows on sl(2)",
    )
    ap.add_argument("--version", action="version", version=f"sl2flow {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, z0=False, tspan=False):
        p.add_argument("--input", required=False, help="path to the map description file")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        if z0:
            p.add_argument("--z0", default=None, help="flow initial point a,b,c (standard basis)")
        if tspan:
            p.add_argument("--tspan", default=None, help="t0,t1")
            p.add_argument("--ray", default=None, help="theta,rmax (complex mode)")
            p.add_argument("--tol", type=float, default=None, help="integrator tolerance")

    common(sub.add_parser("classify", help="normal form + completeness verdict"))
    common(sub.add_parser("verdict", help="per-geodesic maximal-domain class"), z0=True)
    common(sub.add_parser("idempotents", help="invariant blow-up rays"))
    common(sub.add_parser("integrate", help="integrate the flow"), z0=True, tspan=True)
    p = sub.add_parser("portrait", help="infinity singularities + sampled leaves (CSV)")
    common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--leaves", type=int, default=12)
    p.add_argument("--steps", type=int, default=400)
    p = sub.add_parser("scan", help="completeness region over a parameter grid")
    p.add_argument("--case", type=int, required=True, choices=[1, 3])
    p.add_argument("--grid", required=True, help="lo:hi:n,lo:hi:n,lo:hi:n")
    p.add_argument("--check", action="store_true", help="numeric cross-check per grid point")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p = sub.add_parser("verify", help="run the invariant suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--drift-bound", type=float, default=1e-8)
    p.add_argument("--fault", default=None, choices=["killing-gram"], help="fault injection")
    return ap


_COMMANDS = {
    "classify": cmd_classify,
    "verdict": cmd_verdict,
    "idempotents": cmd_idempotents,
    "integrate": cmd_integrate,
    "portrait": cmd_portrait,
    "scan": cmd_scan,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, NotImplementedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
