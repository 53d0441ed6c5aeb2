"""``trotterkit`` command line: exponentials, Trotter sweeps, defect probes, split-step runs.

Exit codes: 0 success, 1 bad flags, 2 unparsable input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from pathlib import Path

import numpy as np

from . import hamiltonians as ham
from .expm import exact_expm, taylor_expm
from .linalg import LinalgError
from .matrix_io import MatrixFormatError, dumps, fmt_float, load_matrix, matrix_to_json, vector_to_json
from .schrodinger import PRESETS, GridSpec, WaveFunction, observables, potential_preset, split_step_trajectory
from .trotter import DEFAULT_SAMPLES, ErrorMetric, SplitHamiltonian, convergence_study, defect, defect_supremum

SEED_ENV = "TROTTERKIT_SEED"
TRAJECTORY_COLUMNS = ["step", "time", "norm", "mean_x", "mean_p", "energy_kinetic"]

_METRIC_ALIASES = {
    "operator": ErrorMetric.OPERATOR_2NORM,
    "operator_2norm": ErrorMetric.OPERATOR_2NORM,
    "state": ErrorMetric.STATE_VECTOR_NORM,
    "state_vector_norm": ErrorMetric.STATE_VECTOR_NORM,
}


class InputError(Exception):
    """A flag value or input file could not be parsed (exit status 2)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- value parsing


def parse_step_range(text: str) -> list[int]:
    """Expand ``a:b:xK`` (geometric), ``a:b:+K`` (arithmetic), ``a:b`` (x2) or ``n1,n2,...``."""
    text = text.strip()
    try:
        if ":" not in text:
            values = [int(v) for v in text.split(",") if v.strip()]
        else:
            parts = text.split(":")
            if len(parts) not in (2, 3):
                raise ValueError
            lo, hi = int(parts[0]), int(parts[1])
            rule = parts[2].strip() if len(parts) == 3 else "x2"
            if rule[:1] == "x":
                factor = int(rule[1:])
                if factor < 2 or lo < 1:
                    raise ValueError
                values, n = [], lo
                while n <= hi:
                    values.append(n)
                    n *= factor
            elif rule[:1] == "+":
                stride = int(rule[1:])
                if stride < 1:
                    raise ValueError
                values = list(range(lo, hi + 1, stride))
            else:
                raise ValueError
    except ValueError:
        raise InputError(f"invalid step range {text!r}; use a:b:xK, a:b:+K or a comma list") from None
    if not values or values[0] < 1 or any(b <= a for a, b in zip(values, values[1:])):
        raise InputError(f"step range {text!r} must be non-empty, positive and increasing")
    return values


def parse_floats(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals or not all(np.isfinite(vals)):
        raise InputError(f"expected finite numbers, got {text!r}")
    return vals


def parse_state(text: str, dim: int) -> np.ndarray:
    try:
        vals = [complex(v.strip().replace(" ", "")) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"cannot parse state {text!r}") from None
    if len(vals) != dim:
        raise InputError(f"state has {len(vals)} entries, Hamiltonian dimension is {dim}")
    xi = np.array(vals, dtype=np.complex128)
    nrm = np.linalg.norm(xi)
    if nrm == 0 or not np.isfinite(nrm):
        raise InputError("state must be finite and nonzero")
    return xi / nrm


def _parse_pauli(text: str) -> np.ndarray:
    try:
        return ham.build_pauli(ham.PauliString.parse(text))
    except (LinalgError, ValueError) as exc:
        raise InputError(str(exc)) from None


def _load(path: str) -> np.ndarray:
    try:
        return load_matrix(path)
    except MatrixFormatError as exc:
        raise InputError(str(exc)) from None


def _labelled(items: list[str] | None, flag: str) -> list[tuple[str, str]]:
    out = []
    for item in items or []:
        label, sep, value = item.partition("=")
        label = label.strip().upper()
        if not sep or label not in ("S", "T"):
            raise InputError(f"{flag} expects S=... or T=..., got {item!r}")
        out.append((label, value))
    return out


def _add(parts: dict, label: str, mat: np.ndarray) -> None:
    if label in parts:
        if parts[label].shape != mat.shape:
            raise InputError(f"terms for {label} have mismatched dimensions")
        parts[label] = parts[label] + mat
    else:
        parts[label] = mat


def effective_seed(seed: int) -> int:
    env = os.environ.get(SEED_ENV)
    if env is None or not env.strip():
        return seed
    try:
        return int(env)
    except ValueError:
        raise InputError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def build_split(args) -> SplitHamiltonian:
    """Assemble ``(S, T)`` from whichever builder flags were given."""
    seed = effective_seed(args.seed)
    if args.random is not None:
        return SplitHamiltonian(
            ham.build_random_hermitian(args.random, seed),
            ham.build_random_hermitian(args.random, seed + 1),
        )
    if args.tight_binding is not None:
        sites = args.tight_binding
        onsite = parse_floats(args.onsite) if args.onsite else [0.0] * sites
        try:
            return ham.build_tight_binding(sites, args.hopping, onsite)
        except LinalgError as exc:
            raise InputError(str(exc)) from None
    parts: dict[str, np.ndarray] = {}
    for label, spec in _labelled(args.pauli, "--pauli"):
        _add(parts, label, _parse_pauli(spec))
    for label, path in _labelled(args.matrix, "--matrix"):
        _add(parts, label, _load(path))
    for label, spec in _labelled(args.diag, "--diag"):
        _add(parts, label, ham.build_diagonal(parse_floats(spec)))
    if not parts:
        raise InputError("no Hamiltonian given; use --pauli, --matrix, --diag, --random or --tight-binding")
    dim = next(iter(parts.values())).shape[0]
    zero = np.zeros((dim, dim), dtype=np.complex128)
    return SplitHamiltonian(parts.get("S", zero), parts.get("T", zero))


def _default_xi(args, dim: int) -> np.ndarray:
    if args.xi:
        return parse_state(args.xi, dim)
    xi = np.zeros(dim, dtype=np.complex128)
    xi[0] = 1.0
    return xi


# ---------------------------------------------------------------- output


def rows_to_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, (int, str)) else fmt_float(v) for v in row])
    return buf.getvalue()


def read_csv_table(text: str) -> tuple[list[str], list[list[float]]]:
    """Parse a CSV written by this tool back into a header and numeric rows."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ValueError("empty CSV")
    return rows[0], [[float(v) for v in r] for r in rows[1:]]


def _emit(args, text: str) -> None:
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)


# ---------------------------------------------------------------- subcommands


def cmd_expm(args) -> None:
    if args.matrix_file:
        h = _load(args.matrix_file)
    elif args.diag:
        h = ham.build_diagonal(parse_floats(args.diag))
    elif args.pauli:
        mats = [_parse_pauli(p) for p in args.pauli]
        if len({m.shape for m in mats}) != 1:
            raise InputError("--pauli terms have different qubit counts")
        h = sum(mats)
    elif args.random is not None:
        h = ham.build_random_hermitian(args.random, effective_seed(args.seed))
    else:
        raise InputError("expm needs --matrix, --diag, --pauli or --random")
    u = exact_expm(h, args.t).matrix
    taylor = taylor_expm(-1j * args.t * h, args.taylor) if args.taylor else None

    if args.format == "json":
        out = matrix_to_json(u)
        out["t"] = args.t
        if taylor is not None:
            out["taylor"] = matrix_to_json(taylor)
            out["taylor_terms"] = args.taylor
            out["frobenius_difference"] = float(np.linalg.norm(u - taylor))
        _emit(args, dumps(out))
        return
    header = ["row", "col", "re", "im"]
    if taylor is not None:
        header += ["taylor_re", "taylor_im"]
    rows = []
    for i in range(u.shape[0]):
        for j in range(u.shape[1]):
            row = [i, j, u[i, j].real, u[i, j].imag]
            if taylor is not None:
                row += [taylor[i, j].real, taylor[i, j].imag]
            rows.append(row)
    _emit(args, rows_to_csv(header, rows))


def cmd_trotter_sweep(args) -> None:
    h = build_split(args)
    metric = _METRIC_ALIASES[args.metric]
    xi = _default_xi(args, h.dim) if metric is ErrorMetric.STATE_VECTOR_NORM else None
    report = convergence_study(h, args.t, parse_step_range(args.n), metric, xi)
    _emit(args, report.to_json() if args.format == "json" else report.to_csv())


def cmd_defect(args) -> None:
    h = build_split(args)
    xi = _default_xi(args, h.dim)
    steps = parse_floats(args.steps)
    if any(s == 0 for s in steps):
        raise InputError("defect steps must be nonzero")
    rows = [
        [s, defect(h, s, xi), defect_supremum(h, s, xi, args.t, args.samples)] for s in steps
    ]
    if args.format == "json":
        _emit(args, dumps({
            "t": args.t,
            "samples": args.samples,
            "xi": vector_to_json(xi),
            "steps": [r[0] for r in rows],
            "defect": [r[1] for r in rows],
            "defect_supremum": [r[2] for r in rows],
        }))
    else:
        _emit(args, rows_to_csv(["step", "defect", "defect_supremum"], rows))


def cmd_splitstep(args) -> None:
    grid = GridSpec(args.points, args.x_min, args.x_max, args.mass)
    psi = WaveFunction.gaussian(grid, args.x0, args.sigma, args.p0)
    v = potential_preset(args.preset, grid)
    dt = args.t / args.steps
    rows, snapshots = [], []
    for step, state in split_step_trajectory(psi, v, args.t, args.steps):
        if step % args.stride and step != args.steps:
            continue
        obs = observables(state)
        rows.append([step, step * dt, *obs])
        if args.snapshots:
            snapshots.append({"step": step, "time": step * dt, "psi": vector_to_json(state.values)})
    if args.snapshots:
        Path(args.snapshots).write_text(dumps({"grid": {
            "points": grid.points, "x_min": grid.x_min, "x_max": grid.x_max, "mass": grid.mass,
        }, "snapshots": snapshots}))
    if args.format == "json":
        _emit(args, dumps([dict(zip(TRAJECTORY_COLUMNS, r)) for r in rows]))
    else:
        _emit(args, rows_to_csv(TRAJECTORY_COLUMNS, rows))


# ---------------------------------------------------------------- parser


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", "-o", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--seed", type=int, default=0, help=f"RNG seed; ${SEED_ENV} overrides")


def _split_sources(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pauli", action="append", metavar="S=COEF*LETTERS",
                   help="add a Pauli string to S or T (repeatable)")
    p.add_argument("--matrix", action="append", metavar="S=FILE", help="add a JSON matrix to S or T")
    p.add_argument("--diag", action="append", metavar="S=E1,E2,...", help="add a diagonal matrix to S or T")
    p.add_argument("--random", type=int, metavar="DIM",
                   help="seeded random Hermitian S (seed) and T (seed + 1)")
    p.add_argument("--tight-binding", type=int, metavar="SITES",
                   help="open chain: S = hopping, T = on-site energies")
    p.add_argument("--hopping", type=float, default=1.0)
    p.add_argument("--onsite", help="comma-separated on-site energies")
    p.add_argument("--t", type=float, default=1.0, help="total evolution time")
    p.add_argument("--xi", help="comma-separated state amplitudes (default: first basis vector)")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="trotterkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("expm", help="exact exponential exp(-iHt) of a Hermitian matrix")
    p.add_argument("--matrix", dest="matrix_file", metavar="FILE", help="JSON matrix file")
    p.add_argument("--diag", help="comma-separated diagonal energies")
    p.add_argument("--pauli", action="append", help="Pauli string term, e.g. 0.5*XZ (repeatable)")
    p.add_argument("--random", type=int, metavar="DIM", help="seeded random Hermitian matrix")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--taylor", type=int, metavar="TERMS", help="also report taylor_expm with TERMS terms")
    _common(p)
    p.set_defaults(func=cmd_expm)

    p = sub.add_parser("trotter-sweep", help="Trotter error against exact evolution over step counts")
    _split_sources(p)
    p.add_argument("--n", default="4:512:x2", help="step counts: a:b:xK, a:b:+K or a list")
    p.add_argument("--metric", choices=sorted(_METRIC_ALIASES), default="operator_2norm")
    _common(p)
    p.set_defaults(func=cmd_trotter_sweep)

    p = sub.add_parser("defect", help="per-step defect and its supremum along the exact orbit")
    _split_sources(p)
    p.add_argument("--steps", default="1e-1,1e-2,1e-3", help="comma-separated step sizes")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    _common(p)
    p.set_defaults(func=cmd_defect)

    p = sub.add_parser("splitstep", help="1D split-step Fourier trajectory")
    p.add_argument("--preset", choices=PRESETS, default="linear")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=256)
    p.add_argument("--points", type=int, default=1024)
    p.add_argument("--x-min", type=float, default=-20.0)
    p.add_argument("--x-max", type=float, default=20.0)
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--p0", type=float, default=0.0)
    p.add_argument("--stride", type=int, default=1, help="record every STRIDE steps (final step always)")
    p.add_argument("--snapshots", metavar="FILE", help="write wavefunction snapshots as JSON")
    _common(p)
    p.set_defaults(func=cmd_splitstep)
    return parser


def _validate(parser, args) -> None:
    for name in ("t", "hopping", "x_min", "x_max", "mass", "x0", "sigma", "p0"):
        val = getattr(args, name, None)
        if val is not None and not np.isfinite(val):
            parser.error(f"--{name.replace('_', '-')} must be finite")
    for name in ("steps", "points", "stride", "samples", "random", "tight_binding", "taylor"):
        val = getattr(args, name, None)
        if isinstance(val, int) and val < 1:
            parser.error(f"--{name.replace('_', '-')} must be >= 1")


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    _validate(parser, args)
    try:
        args.func(args)
    except InputError as exc:
        print(f"trotterkit: input error: {exc}", file=sys.stderr)
        return 2
    except (LinalgError, ValueError, ArithmeticError) as exc:
        print(f"trotterkit: numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
