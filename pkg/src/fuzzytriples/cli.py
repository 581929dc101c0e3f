"""Command-line front end: ``fuzzy-triples {gamma,sphere,axioms,sample}``.

Exit codes: 0 success or match, 2 verification mismatch, 64 usage or guard error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import schemas
from .clifford import build_module, verify_module
from .fuzzy import fuzzy_fermion_space, gen_fuzzy_fermion_space, geometry_basis
from .montecarlo import ActionConfig, run_chains
from .sphere import (Spectrum, dirac_blocks, fuzzy_sphere_dirac, gen_fuzzy_sphere_dirac,
                     predicted_fuzzy_spectrum, predicted_gen_spectrum)
from .triple import canonical_frobenius, check_axioms, theta_from_dirac, theta_report

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 2, 64
MAX_GENERATORS = 12
MAX_HILBERT = 4096
SPECTRUM_TOL = 1e-9


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _module(p: int, q: int):
    if p < 0 or q < 0:
        raise UsageError("p and q must be non-negative")
    if p + q > MAX_GENERATORS:
        raise UsageError(f"p+q = {p + q} exceeds the guard {MAX_GENERATORS} (spinor dim <= 64)")
    return build_module(p, q)


def _hilbert_guard(dim: int):
    if dim > MAX_HILBERT:
        raise UsageError(f"hilbert_dim {dim} exceeds the guard {MAX_HILBERT}")


def _positive(name, v):
    if v < 1:
        raise UsageError(f"{name} must be a positive integer")


# ---------------------------------------------------------------------------
# commands; each returns (payload, exit code)


def cmd_gamma(args):
    cm = _module(args.p, args.q)
    rep = verify_module(cm) if args.verify else None
    ok = rep.passed if rep is not None else True
    payload = {"command": "gamma", "pass": ok, "module": cm.to_dict(),
               "verification": rep.to_dict() if rep is not None else None}
    return payload, EXIT_OK if ok else EXIT_MISMATCH


def cmd_sphere(args):
    if args.generalised is not None:
        n1, n2 = args.generalised
        _positive("n1", n1)
        _positive("n2", n2)
        _hilbert_guard(8 * n1 * n2)
        n = [n1, n2]
        predicted = predicted_gen_spectrum(n1, n2, block=True)
        operator = "D1"
    else:
        if args.n is None:
            raise UsageError("give --n or --generalised N1 N2")
        _positive("n", args.n)
        _hilbert_guard(4 * args.n ** 2)
        n = args.n
        predicted = predicted_fuzzy_spectrum(n)
        operator = "D"
    payload = {"command": "sphere", "type": [1, 3], "n": n, "operator": operator,
               "predicted": predicted.to_dict(), "computed": None}
    if args.predict_only:
        payload["verdict"] = "PREDICTED"
        return payload, EXIT_OK

    meta = {"type": [1, 3], "n": n}
    if operator == "D1":
        _, d = gen_fuzzy_sphere_dirac(n1, n2)
        D1, D2 = dirac_blocks(d, n1, n2)
        computed = Spectrum.of(D1, kind="generalised", meta=meta)
        second = Spectrum.of(D2, kind="generalised", meta=meta)
        payload["computed_d2"] = second.to_dict()
        ok = computed.matches(predicted, SPECTRUM_TOL) and second.matches(computed, SPECTRUM_TOL)
    else:
        _, d = fuzzy_sphere_dirac(n)
        computed = Spectrum.of(d.matrix, kind="fuzzy", meta=meta)
        ok = computed.matches(predicted, SPECTRUM_TOL)
    payload["computed"] = computed.to_dict()
    payload["max_value_deviation"] = computed.max_value_deviation(predicted)
    payload["verdict"] = "MATCH" if ok else "MISMATCH"
    return payload, EXIT_OK if ok else EXIT_MISMATCH


def _fermion_space(cm, n, n2):
    _positive("n", n)
    if n2 is None:
        _hilbert_guard(cm.dim_v * n * n)
        return fuzzy_fermion_space(cm, n)
    _positive("n2", n2)
    _hilbert_guard(2 * cm.dim_v * n * n2)
    return gen_fuzzy_fermion_space(cm, n, n2)


def cmd_axioms(args):
    cm = _module(args.p, args.q)
    fs = _fermion_space(cm, args.n, args.n2)
    dim_g = None
    if args.random_dirac is not None:
        basis = geometry_basis(fs)
        dim_g = basis.dim_g
        rng = np.random.default_rng(args.random_dirac)
        if dim_g:
            D = basis.combine(rng.standard_normal(dim_g)).matrix
        else:
            D = np.zeros((fs.hilbert_dim,) * 2, dtype=complex)
        kind = "random"
    elif (args.p, args.q) == (1, 3):
        # the sphere operator lives on its own (1,3) module
        fs, d = (fuzzy_sphere_dirac(args.n) if args.n2 is None
                 else gen_fuzzy_sphere_dirac(args.n, args.n2))
        D = d.matrix
        kind = "sphere"
    else:
        D = np.zeros((fs.hilbert_dim,) * 2, dtype=complex)
        kind = "zero"

    axioms = check_axioms(fs, D, tol=args.tol)
    frob = canonical_frobenius(fs.algebra)
    theta = theta_from_dirac(fs, frob, D, check=False)
    trep = theta_report(fs, frob, theta, D, tol=args.tol)
    ok = axioms.passed and trep.passed
    payload = {"command": "axioms", "type": [args.p, args.q], "s": cm.s,
               "n": args.n if args.n2 is None else [args.n, args.n2],
               "hilbert_dim": fs.hilbert_dim, "dirac": kind, "seed": args.random_dirac,
               "dim_g": dim_g, "axioms": axioms.to_dict(), "theta": trep.to_dict(), "pass": ok}
    return payload, EXIT_OK if ok else EXIT_MISMATCH


def cmd_sample(args):
    if args.steps < 1:
        raise UsageError("--steps must be positive")
    if args.chains < 1:
        raise UsageError("--chains must be positive")
    burn_in = args.burn_in if args.burn_in is not None else args.steps // 10
    if not 0 <= burn_in < args.steps:
        raise UsageError("need 0 <= --burn-in < --steps")
    action = ActionConfig(g2=args.g2, g4=args.g4)
    try:
        action.validate()
    except ValueError as e:
        raise UsageError(str(e)) from None
    cm = _module(args.p, args.q)
    fs = _fermion_space(cm, args.n, None)
    basis = geometry_basis(fs)
    if basis.dim_g < 1:
        raise UsageError("the space of Dirac operators is zero-dimensional")
    if args.out is not None:
        os.makedirs(args.out, exist_ok=True)
    report = run_chains(basis, action, args.steps, burn_in, args.seed, chain_count=args.chains,
                        step_size=args.step_size, trace_dir=args.out, eig_every=args.eig_every)
    analytic = None
    if args.g4 == 0:
        # Gaussian: covariance (2 g2 T)^-1 with T_ab = tr(B_a B_b)
        B = np.array([t.matrix for t in basis.basis])
        T = np.einsum("aij,bji->ab", B, B).real
        analytic = {"x2": float(np.trace(np.linalg.inv(2 * args.g2 * T))),
                    "tr_d2": basis.dim_g / (2 * args.g2)}
    payload = {"command": "sample", "type": [args.p, args.q], "n": args.n,
               "dim_g": basis.dim_g, "action": action.to_dict(), "analytic": analytic,
               "report": report.to_dict(), "out": args.out}
    if args.out is not None:
        with open(os.path.join(args.out, "report.json"), "w") as fh:
            json.dump(schemas.sanitize(payload), fh, indent=2, allow_nan=False)
    return payload, EXIT_OK


# ---------------------------------------------------------------------------
# output


def _table(payload) -> str:
    cmd = payload["command"]
    lines = []
    if cmd == "gamma":
        m = payload["module"]
        lines.append(f"type ({m['p']},{m['q']})  s={m['s']}  dim={m['dim_v']}  signs={m['signs']}")
        if payload["verification"]:
            for c in payload["verification"]["checks"]:
                lines.append(_check_line(c))
    elif cmd == "sphere":
        for key in ("predicted", "computed", "computed_d2"):
            spec = payload.get(key)
            if spec:
                body = ", ".join(f"{e['value']}:{e['multiplicity']}" for e in spec["entries"])
                lines.append(f"{key:<11} {{{body}}}")
        lines.append(payload["verdict"])
    elif cmd == "axioms":
        lines.append(f"type {tuple(payload['type'])}  s={payload['s']}  "
                     f"hilbert_dim={payload['hilbert_dim']}  D={payload['dirac']}")
        for c in payload["axioms"]["checks"] + payload["theta"]["checks"]:
            lines.append(_check_line(c))
        lines.append("PASS" if payload["pass"] else "FAIL")
    elif cmd == "sample":
        r = payload["report"]
        for k, e in r["estimates"].items():
            lines.append(f"<{k}> = {e['mean']} +- {e['stderr']}  (n_eff {e['n_eff']})")
        lines.append(f"acceptance {r['acceptance_rate']:.3f}  chains {r['chains']}")
        if payload["analytic"]:
            lines.append(f"analytic {payload['analytic']}")
        lines += [f"flag: {f}" for f in r["flags"]]
    return "\n".join(lines)


def _check_line(c) -> str:
    label = c.get("id", c["name"])
    dev = c["max_deviation"]
    dev = "n/a" if dev is None else f"{dev:.2e}"
    return f"{label!s:<22} {'PASS' if c['pass'] else 'FAIL'}  {dev:>9}  {c['description']}"


def emit(payload, fmt: str, stream=None) -> None:
    stream = stream or sys.stdout
    payload = schemas.sanitize(payload)
    schemas.validate(f"cmd_{payload['command']}", payload)
    if fmt == "json":
        stream.write(json.dumps(payload, indent=2, allow_nan=False) + "\n")
    elif fmt == "csv":
        stream.write(schemas.payload_to_csv(payload))
    else:
        stream.write(_table(payload) + "\n")


def build_parser() -> argparse.ArgumentParser:
    fmt = _Parser(add_help=False)
    fmt.add_argument("--format", choices=("json", "csv", "table"), default="json")
    ap = _Parser(prog="fuzzy-triples", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gamma", parents=[fmt], help="build a Clifford module")
    g.add_argument("--p", type=int, required=True)
    g.add_argument("--q", type=int, required=True)
    g.add_argument("--verify", action="store_true")
    g.set_defaults(func=cmd_gamma)

    s = sub.add_parser("sphere", parents=[fmt], help="fuzzy sphere spectra")
    s.add_argument("--n", type=int)
    s.add_argument("--generalised", type=int, nargs=2, metavar=("N1", "N2"))
    s.add_argument("--predict-only", action="store_true")
    s.set_defaults(func=cmd_sphere)

    a = sub.add_parser("axioms", parents=[fmt], help="check the axioms on a fuzzy space")
    a.add_argument("--p", type=int, required=True)
    a.add_argument("--q", type=int, required=True)
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--n2", type=int)
    a.add_argument("--random-dirac", type=int, metavar="SEED")
    a.add_argument("--tol", type=float, default=1e-12)
    a.set_defaults(func=cmd_axioms)

    m = sub.add_parser("sample", parents=[fmt], help="Monte Carlo over Dirac operators")
    m.add_argument("--p", type=int, required=True)
    m.add_argument("--q", type=int, required=True)
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--g2", type=float, required=True)
    m.add_argument("--g4", type=float, required=True)
    m.add_argument("--steps", type=int, required=True)
    m.add_argument("--seed", type=int, required=True)
    m.add_argument("--burn-in", type=int)
    m.add_argument("--chains", type=int, default=1)
    m.add_argument("--step-size", type=float, default=0.5)
    m.add_argument("--eig-every", type=int, default=1)
    m.add_argument("--out", metavar="DIR", help="directory for trace CSVs and report.json")
    m.set_defaults(func=cmd_sample)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        payload, code = args.func(args)
    except UsageError as e:
        print(f"fuzzy-triples {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE
    emit(payload, args.format)
    return code


if __name__ == "__main__":
    sys.exit(main())
