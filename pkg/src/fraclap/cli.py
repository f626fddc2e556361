"""Command-line driver.

Every subcommand reads file-based inputs, writes its outputs plus a JSON
run manifest (resolved parameters, input digests, seed, version, wall
time) into ``--out-dir``, and is reproducible: identical argv, inputs
and seed give byte-identical CSV output.  Exit codes: 0 success, 1
usage or input error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .consensus import (ConsensusConfig, circle_relocation_config,
                        consensus_error_curve, gamma_lower_bound,
                        simulate_consensus, static_formation)
from .decay import (graph_distances, numerical_range_profile,
                    verify_decay_bounds, verify_p_alpha_bound)
from .errors import GraphFormatError, NumericalError
from .generators import cycle_graph, path_graph
from .graphs import DenseOperator, LaplacianKind, build_laplacian, load_edge_list
from .io import (sha256_file, write_json, write_matrix_csv, write_matrix_mm,
                 write_table_csv)
from .matfun import fractional_power_general, fractional_power_symmetric
from .superdiff import StableParams, stable_density, superdiffusion_exponent
from .walks import (absorption_time_samples, evolve_continuous,
                    expected_absorption_steps, return_probability,
                    simulate_discrete, transition_kernel)

DENSE_LIMIT = 2000
_KINDS = [k.value for k in LaplacianKind]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # exit code 1 for bad flags instead of argparse's default 2
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _add_common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=None,
                   help="output directory (default $FRACLAP_OUT_DIR or .)")
    p.add_argument("--format", choices=("csv", "json", "mm"), default="csv")
    p.add_argument("--force-dense", action="store_true",
                   help=f"allow graphs larger than {DENSE_LIMIT} nodes")
    p.add_argument("--out", default=None, help="primary output file name")


def _graph_args(p, *, required=True):
    p.add_argument("--input", required=required, help="edge-list file")
    p.add_argument("--kind", choices=_KINDS, default=None,
                   help="Laplacian kind (default by graph orientation)")
    p.add_argument("--one-based", action="store_true")
    p.add_argument("--force-undirected", action="store_true")
    p.add_argument("--dangling-fixup", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="fraclap",
                  description="fractional graph Laplacian toolkit")
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", metavar="subcommand")

    p = sub.add_parser("laplacian", parents=[], help="build a graph Laplacian")
    _graph_args(p)
    _add_common(p)

    p = sub.add_parser("power", help="fractional Laplacian power")
    _graph_args(p)
    p.add_argument("--alpha", type=float, required=True)
    _add_common(p)

    p = sub.add_parser("kernel", help="fractional jump kernel")
    _graph_args(p)
    p.add_argument("--alpha", type=float, required=True)
    _add_common(p)

    p = sub.add_parser("walk", help="sample one discrete fractional walk")
    _graph_args(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--steps", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("evolve", help="continuous-time distribution evolution")
    _graph_args(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--times", required=True, help="comma-separated times")
    _add_common(p)

    p = sub.add_parser("absorb", help="absorption steps on the directed path")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--runs", type=int, default=0,
                   help="optional Monte Carlo sample count")
    _add_common(p)

    p = sub.add_parser("decay", help="verify entry decay bounds")
    _graph_args(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--mode", choices=("power", "exponential", "kernel"),
                   default="power")
    p.add_argument("--t", type=float, default=None,
                   help="time (exponential mode)")
    p.add_argument("--pairs", default="all",
                   help='"all" or "sampled:<k>"')
    _add_common(p)

    p = sub.add_parser("frange", help="numerical range profile")
    _graph_args(p)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--angles", type=int, default=360)
    _add_common(p)

    p = sub.add_parser("returnprob", help="average return probability curve")
    _graph_args(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--times", required=True, help="comma-separated times")
    _add_common(p)

    p = sub.add_parser("superdiff", help="lattice spreading exponent fit")
    p.add_argument("--orientation", choices=("undirected", "directed"),
                   required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--tmax", type=float, required=True)
    p.add_argument("--tmin", type=float, default=1e3)
    p.add_argument("--tcount", type=int, default=5)
    p.add_argument("--samples", type=int, default=129)
    _add_common(p)

    p = sub.add_parser("stable", help="stable density evaluation")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True, choices=(0.0, 1.0))
    p.add_argument("--scale", type=float, default=1.0, help="scale parameter")
    p.add_argument("--xi-min", type=float, default=-10.0)
    p.add_argument("--xi-max", type=float, default=10.0)
    p.add_argument("--xi-count", type=int, default=201)
    _add_common(p)

    p = sub.add_parser("consensus", help="fractional consensus simulation")
    p.add_argument("--config", required=True, help="JSON configuration")
    _add_common(p)

    return top


def _out_dir(args) -> Path:
    d = args.out_dir or os.environ.get("FRACLAP_OUT_DIR") or "."
    path = Path(d)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load_graph(args):
    path = Path(args.input)
    if not path.is_file():
        raise UsageError(f"input file not found: {path}")
    g = load_edge_list(path, one_based=args.one_based,
                       force_undirected=args.force_undirected)
    if g.n > DENSE_LIMIT and not args.force_dense:
        raise UsageError(
            f"graph has {g.n} > {DENSE_LIMIT} nodes; pass --force-dense "
            "to run the dense eigensolve anyway")
    return g


def _pick_kind(args, g) -> LaplacianKind:
    if args.kind is not None:
        return LaplacianKind.from_name(args.kind)
    return (LaplacianKind.DIRECTED_OUT if g.directed
            else LaplacianKind.COMBINATORIAL)


def _realify(M, *, tol=1e-10):
    if not np.iscomplexobj(M):
        return np.asarray(M, dtype=float)
    resid = float(np.abs(M.imag).max())
    if resid > tol * max(1.0, float(np.abs(M.real).max())):
        raise NumericalError(f"imaginary residue {resid:.3e} in result")
    return M.real.copy()


def _fractional(L, alpha):
    A = L.matrix
    sym = float(np.abs(A - A.T).max()) <= 1e-12 * max(1.0, float(np.abs(A).max()))
    res = (fractional_power_symmetric(A, alpha) if sym
           else fractional_power_general(A, alpha))
    return _realify(res.matrix), res


def _parse_times(text: str) -> np.ndarray:
    try:
        times = np.array([float(v) for v in text.split(",") if v.strip()])
    except ValueError as exc:
        raise UsageError(f"bad time list {text!r}: {exc}") from None
    if times.size == 0:
        raise UsageError("empty time list")
    return times


def _emit_matrix(base: Path, M, fmt: str) -> Path:
    if fmt == "csv":
        path = base.with_suffix(".csv")
        write_matrix_csv(path, M)
    elif fmt == "mm":
        path = base.with_suffix(".mtx")
        write_matrix_mm(path, M)
    else:
        path = base.with_suffix(".json")
        write_json(path, {"matrix": np.asarray(M)})
    return path


def _emit_table(base: Path, header, columns, fmt: str) -> Path:
    if fmt == "csv":
        path = base.with_suffix(".csv")
        write_table_csv(path, header, columns)
    elif fmt == "mm":
        path = base.with_suffix(".mtx")
        write_matrix_mm(path, np.column_stack([np.asarray(c, dtype=float)
                                               for c in columns]),
                        comment=",".join(header))
    else:
        path = base.with_suffix(".json")
        write_json(path, {"columns": {h: np.asarray(c)
                                      for h, c in zip(header, columns)}})
    return path


def _base(args, outdir: Path, default: str) -> Path:
    name = args.out if args.out else default
    return outdir / name


def _manifest(outdir: Path, sub: str, args, *, inputs=(), extra=None,
              started=0.0) -> None:
    params = {k: v for k, v in sorted(vars(args).items())
              if k not in ("command",) and v is not None}
    payload = {
        "subcommand": sub,
        "parameters": params,
        "inputs": {str(p): sha256_file(p) for p in inputs},
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "duration_s": time.monotonic() - started,
    }
    if extra:
        payload["results"] = extra
    write_json(outdir / f"{sub}_manifest.json", payload)


def _cmd_laplacian(args, outdir):
    g = _load_graph(args)
    kind = _pick_kind(args, g)
    L = build_laplacian(g, kind, dangling_fixup=args.dangling_fixup)
    path = _emit_matrix(_base(args, outdir, "laplacian"), L.matrix, args.format)
    return {"n": g.n, "kind": kind.value, "output": path.name}


def _cmd_power(args, outdir):
    g = _load_graph(args)
    kind = _pick_kind(args, g)
    L = build_laplacian(g, kind, dangling_fixup=args.dangling_fixup)
    M, res = _fractional(L, args.alpha)
    path = _emit_matrix(_base(args, outdir, "power"), M, args.format)
    return {"n": g.n, "kind": kind.value, "alpha": args.alpha,
            "method": res.method, "zero_cluster_size": len(res.zero_cluster),
            "output": path.name}


def _kernel_of(args, g, kind):
    L = build_laplacian(g, kind, dangling_fixup=args.dangling_fixup)
    M, res = _fractional(L, args.alpha)
    op = DenseOperator(matrix=M, kind=kind, alpha=args.alpha, method=res.method)
    return L, transition_kernel(op)


def _cmd_kernel(args, outdir):
    g = _load_graph(args)
    kind = _pick_kind(args, g)
    _, ker = _kernel_of(args, g, kind)
    path = _emit_matrix(_base(args, outdir, "kernel"), ker.P, args.format)
    return {"n": g.n, "kind": kind.value, "alpha": args.alpha,
            "absorbing": list(ker.absorbing), "output": path.name}


def _cmd_walk(args, outdir):
    g = _load_graph(args)
    kind = _pick_kind(args, g)
    _, ker = _kernel_of(args, g, kind)
    traj = simulate_discrete(ker, args.start, args.steps, args.seed)
    path = _emit_table(_base(args, outdir, "walk"), ["step", "node"],
                       [traj.times.astype(int), traj.states], args.format)
    return {"start": args.start, "steps": args.steps, "output": path.name}


def _cmd_evolve(args, outdir):
    g = _load_graph(args)
    kind = _pick_kind(args, g)
    _, ker = _kernel_of(args, g, kind)
    times = _parse_times(args.times)
    traj = evolve_continuous(ker, args.start, times)
    header = ["t"] + [f"u{i}" for i in range(g.n)]
    cols = [traj.times] + [traj.states[:, i] for i in range(g.n)]
    path = _emit_table(_base(args, outdir, "evolve"), header, cols, args.format)
    return {"conservation_drift": traj.conservation_drift,
            "output": path.name}


def _cmd_absorb(args, outdir):
    res = expected_absorption_steps(args.n, args.alpha)
    out = {"expectation": res.expectation, "n_step": res.n_step,
           "fundamental_expectation": res.fundamental_expectation}
    if args.runs > 0:
        g = path_graph(args.n, directed=True)
        L = build_laplacian(g, LaplacianKind.DIRECTED_OUT)
        M, mres = _fractional(L, args.alpha)
        op = DenseOperator(matrix=M, kind=LaplacianKind.DIRECTED_OUT,
                           alpha=args.alpha, method=mres.method)
        samples = absorption_time_samples(transition_kernel(op), 0,
                                          args.runs, args.seed)
        out["mc_mean"] = float(samples.mean())
        out["mc_stderr"] = float(samples.std(ddof=1) / np.sqrt(args.runs))
    base = _base(args, outdir, "absorb")
    if args.format == "json":
        path = base.with_suffix(".json")
        write_json(path, out)
    else:
        keys = sorted(out)
        path = _emit_table(base, keys, [[out[k]] for k in keys], args.format)
    out["output"] = path.name
    return out


def _parse_pairs(text: str):
    if text == "all":
        return None
    if text.startswith("sampled:"):
        try:
            k = int(text.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad pair count in {text!r}") from None
        if k <= 0:
            raise UsageError("sampled pair count must be positive")
        return k
    raise UsageError(f'--pairs expects "all" or "sampled:<k>", got {text!r}')


def _cmd_decay(args, outdir):
    g = _load_graph(args)
    kind = _pick_kind(args, g)
    sample = _parse_pairs(args.pairs)
    L = build_laplacian(g, kind, dangling_fixup=args.dangling_fixup)
    if args.mode == "kernel":
        _, ker = _kernel_of(args, g, kind)
        report = verify_p_alpha_bound(ker, L, args.alpha, sample=sample,
                                      seed=args.seed)
    else:
        if args.mode == "exponential" and args.t is None:
            raise UsageError("exponential mode needs --t")
        report = verify_decay_bounds(L, args.alpha, mode=args.mode, t=args.t,
                                     sample=sample, seed=args.seed)
    path = _emit_table(
        _base(args, outdir, "decay"),
        ["i", "j", "d", "observed", "bound", "ok"],
        [report.pairs[:, 0], report.pairs[:, 1],
         report.distances.astype(int), report.observed, report.bounds,
         report.satisfied.astype(int)],
        args.format)
    summary = {"mode": report.mode, "alpha": report.alpha, "c": report.c,
               "rho": report.rho, "t": report.t, "n_pairs": report.n_pairs,
               "all_satisfied": report.all_satisfied,
               "violations": report.violations,
               "max_ratio": report.max_ratio}
    if report.diagonal_ok is not None:
        summary["diagonal_ok"] = report.diagonal_ok
        summary["diagonal_margin"] = report.diagonal_margin
    write_json(outdir / "decay_summary.json", summary)
    summary["output"] = path.name
    return summary


def _cmd_frange(args, outdir):
    g = _load_graph(args)
    kind = _pick_kind(args, g)
    L = build_laplacian(g, kind, dangling_fixup=args.dangling_fixup)
    M = L.matrix if args.alpha is None else _fractional(L, args.alpha)[0]
    prof = numerical_range_profile(M, angles=args.angles)
    path = _emit_table(
        _base(args, outdir, "frange"),
        ["angle", "boundary_re", "boundary_im", "support"],
        [prof.angles, prof.boundary.real, prof.boundary.imag, prof.support],
        args.format)
    summary = {"min_real": prof.min_real,
               "eigenvector_condition": prof.eigenvector_condition,
               "contains_negative_real": prof.min_real < 0.0}
    write_json(outdir / "frange_summary.json", summary)
    summary["output"] = path.name
    return summary


def _cmd_returnprob(args, outdir):
    g = _load_graph(args)
    kind = _pick_kind(args, g)
    _, ker = _kernel_of(args, g, kind)
    times = _parse_times(args.times)
    curve = return_probability(np.eye(ker.n) - ker.P, times)
    path = _emit_table(_base(args, outdir, "returnprob"), ["t", "value"],
                       [curve.times, curve.values], args.format)
    D = graph_distances(g)
    finite = D[np.isfinite(D)]
    summary = {"spectral_gap": curve.spectral_gap,
               "zero_multiplicity": curve.zero_multiplicity,
               "diameter": int(finite.max()) if finite.size else 0}
    write_json(outdir / "returnprob_summary.json", summary)
    summary["output"] = path.name
    return summary


def _cmd_superdiff(args, outdir):
    if args.tmin <= 0 or args.tmax <= args.tmin:
        raise UsageError("need 0 < tmin < tmax")
    times = np.geomspace(args.tmin, args.tmax, args.tcount)
    fit = superdiffusion_exponent(args.alpha, args.orientation, times,
                                  samples=args.samples)
    path = _emit_table(
        _base(args, outdir, "superdiff"),
        ["t", "fwhm_sq", "exponent"],
        [fit.times, fit.widths ** 2, np.full(fit.times.shape, fit.exponent)],
        args.format)
    summary = {"alpha": fit.alpha, "orientation": fit.orientation,
               "exponent": fit.exponent, "expected": fit.expected,
               "r_squared": fit.r_squared}
    write_json(outdir / "superdiff_summary.json", summary)
    summary["output"] = path.name
    return summary


def _cmd_stable(args, outdir):
    if args.xi_count < 2 or args.xi_max <= args.xi_min:
        raise UsageError("need xi_min < xi_max and at least 2 points")
    params = StableParams(alpha=args.alpha, beta=args.beta, gamma=args.scale)
    xi = np.linspace(args.xi_min, args.xi_max, args.xi_count)
    dens = stable_density(params, xi)
    path = _emit_table(_base(args, outdir, "stable"), ["xi", "density"],
                       [xi, dens], args.format)
    return {"alpha": args.alpha, "beta": args.beta, "scale": args.scale,
            "output": path.name}


def _alpha_tag(alpha: float) -> str:
    return ("%g" % alpha).replace(".", "p").replace("-", "m")


def _consensus_graph(cfg, args):
    g = cfg.get("graph", "directed-cycle")
    if g == "directed-cycle":
        n = int(cfg.get("vehicles", 120))
        return cycle_graph(n, directed=True), ()
    path = Path(g)
    if not path.is_file():
        raise UsageError(f"graph file not found: {path}")
    graph = load_edge_list(path, one_based=bool(cfg.get("one_based", False)))
    if graph.n > DENSE_LIMIT and not args.force_dense:
        raise UsageError(f"graph has {graph.n} > {DENSE_LIMIT} nodes; "
                         "pass --force-dense")
    return graph, (path,)


def _cmd_consensus(args, outdir):
    cfg_path = Path(args.config)
    if not cfg_path.is_file():
        raise UsageError(f"config file not found: {cfg_path}")
    try:
        cfg = json.loads(cfg_path.read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"bad JSON config: {exc}") from None

    graph, extra_inputs = _consensus_graph(cfg, args)
    alphas = cfg.get("alpha", [0.5])
    if np.isscalar(alphas):
        alphas = [alphas]
    beta = float(cfg.get("beta", 0.5))
    horizon = float(cfg.get("horizon", 5.0))
    step = cfg.get("step")
    stride = cfg.get("stride")
    center = np.asarray(cfg.get("center", (3.0, 3.0)), dtype=float)
    gamma_cfg = cfg.get("gamma", "bound+margin")
    margin = float(cfg.get("gamma_margin", 1.0))

    n = graph.n
    angles = 2.0 * np.pi * np.arange(n) / n
    ring = np.column_stack([np.cos(angles), np.sin(angles)])
    v0 = np.column_stack([-np.sin(angles), np.cos(angles)])
    target = static_formation(center + ring)

    results = {}
    for alpha in alphas:
        alpha = float(alpha)
        gamma = None if gamma_cfg == "bound+margin" else float(gamma_cfg)
        run = ConsensusConfig(graph=graph, alpha=alpha, beta=beta,
                              target=target, x0=ring, v0=v0, horizon=horizon,
                              gamma=gamma, gamma_margin=margin,
                              step=float(step) if step else None,
                              output_stride=int(stride) if stride else None)
        gamma_used = gamma if gamma is not None else \
            gamma_lower_bound(_coupling(run), beta).bound + margin
        states = simulate_consensus(run)
        tag = _alpha_tag(alpha)

        traj_header = ["t"]
        traj_cols = [np.array([s.time for s in states])]
        for i in range(n):
            traj_header += [f"x{i}", f"y{i}"]
            traj_cols.append(np.array([s.positions[i, 0] for s in states]))
            traj_cols.append(np.array([s.positions[i, 1] for s in states]))
        traj_path = _emit_table(outdir / f"consensus_traj_alpha{tag}",
                                traj_header, traj_cols, args.format)

        curve = consensus_error_curve(states)
        err_path = _emit_table(outdir / f"consensus_error_alpha{tag}",
                               ["t", "error", "position_error"],
                               [curve[:, 0], curve[:, 1], curve[:, 2]],
                               args.format)
        results[f"alpha={alpha:g}"] = {
            "gamma": gamma_used,
            "initial_position_error": states[0].position_error,
            "final_position_error": states[-1].position_error,
            "trajectory": traj_path.name,
            "errors": err_path.name,
        }
    return {"runs": results, "inputs": [str(p) for p in extra_inputs]}


def _coupling(run: ConsensusConfig):
    from .consensus import _coupling_matrix
    return _coupling_matrix(run)


_COMMANDS = {
    "laplacian": (_cmd_laplacian, lambda a: [a.input]),
    "power": (_cmd_power, lambda a: [a.input]),
    "kernel": (_cmd_kernel, lambda a: [a.input]),
    "walk": (_cmd_walk, lambda a: [a.input]),
    "evolve": (_cmd_evolve, lambda a: [a.input]),
    "absorb": (_cmd_absorb, lambda a: []),
    "decay": (_cmd_decay, lambda a: [a.input]),
    "frange": (_cmd_frange, lambda a: [a.input]),
    "returnprob": (_cmd_returnprob, lambda a: [a.input]),
    "superdiff": (_cmd_superdiff, lambda a: []),
    "stable": (_cmd_stable, lambda a: []),
    "consensus": (_cmd_consensus, lambda a: [a.config]),
}


def cli_dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage())
        handler, input_paths = _COMMANDS[args.command]
        outdir = _out_dir(args)
        started = time.monotonic()
        extra = handler(args, outdir)
        inputs = [p for p in input_paths(args) if p and Path(p).is_file()]
        _manifest(outdir, args.command, args, inputs=inputs, extra=extra,
                  started=started)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (GraphFormatError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    return 0


def main(argv=None) -> int:
    return cli_dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
