"""Command-line front end.

Every subcommand writes a table either as CSV (``# key=value`` parameter
lines, a header row, then one record per cell, floats in shortest
round-trip form) or as JSON ``{"params": ..., "columns": ..., "rows": ...}``.

Exit status: 0 on success, 2 on usage errors (bad flags or inconsistent
parameters), 1 on numerical/domain errors. Failures print a JSON record
``{"error": CODE, "message": ...}`` on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import counting, ctlimit, dtrw, graph, simulate
from .errors import InvalidParamsError, RenewalError

SUBCOMMANDS = ("pmf", "states", "memory", "arrivals", "sibuya", "walk", "simulate", "converge", "defect")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _float_list(text: str) -> list[float]:
    try:
        return [float(Fraction(x.strip())) for x in text.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from exc


def _add_process(p: argparse.ArgumentParser, need_xi: bool = True) -> None:
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--nu", type=float, required=True)
    if need_xi:
        p.add_argument("--xi", type=float, help="xi = p/q on the grid")
        p.add_argument("--xi0", type=float, help="continuous-time rate; xi = xi0 * h**alpha")
        p.add_argument("--h", type=float, default=1.0, help="grid spacing (default 1)")


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", "--output", "-o", dest="output", help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dtrenewal", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("pmf", help="waiting-time pmf and survival")
    _add_process(p)
    p.add_argument("--T", type=int, required=True)
    _add_output(p)

    p = sub.add_parser("states", help="state probabilities phi_n(t)")
    _add_process(p)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--N", type=int, help="largest n (default T)")
    _add_output(p)

    p = sub.add_parser("memory", help="memory function and kernels")
    _add_process(p)
    p.add_argument("--T", type=int, required=True)
    _add_output(p)

    p = sub.add_parser("arrivals", help="expected number of arrivals")
    _add_process(p)
    p.add_argument("--T", type=int, required=True)
    _add_output(p)

    p = sub.add_parser("sibuya", help="Sibuya pmf, survival and hitting numbers")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--T", type=int, required=True)
    _add_output(p)

    p = sub.add_parser("walk", help="walk transition matrices P(t) on a graph")
    _add_process(p)
    p.add_argument("--graph", required=True, help="edge list file, one 'i j' per line")
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--method", choices=("cox", "spectral"), default="cox")
    p.add_argument("--allow-bipartite", action="store_true", help="accept a spectrum containing -1")
    _add_output(p)

    p = sub.add_parser("simulate", help="Monte Carlo state probabilities or walk occupation")
    _add_process(p)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--N", type=int, default=10)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--graph", help="simulate a walker on this graph instead")
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--allow-bipartite", action="store_true")
    _add_output(p)

    p = sub.add_parser("converge", help="discrete vs continuous-time errors as h shrinks")
    _add_process(p, need_xi=False)
    p.add_argument("--xi0", type=float, required=True)
    p.add_argument("--t", type=_float_list, default=[1.0], help="comma-separated target times")
    p.add_argument("--h-list", type=_float_list, default=[2.0**-k for k in range(7)], help="e.g. 1,1/2,1/4")
    p.add_argument("--n", type=int, default=0, help="state index to compare")
    _add_output(p)

    p = sub.add_parser("defect", help="initial condition with defect eps")
    p.add_argument("--graph", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--allow-bipartite", action="store_true")
    _add_output(p)
    return parser


def _params(args) -> counting.PdtpParams:
    if args.xi is None and args.xi0 is None:
        raise UsageError("give --xi or --xi0")
    return counting.PdtpParams(args.alpha, args.nu, xi=args.xi, xi0=args.xi0, h=args.h)


def _param_block(params: counting.PdtpParams) -> dict:
    out = {"alpha": params.alpha, "nu": params.nu, "xi": params.xi, "h": params.h}
    if params.xi0 is not None:
        out["xi0"] = params.xi0
    return out


def _check_horizon(T: int) -> int:
    if T < 1:
        raise UsageError("--T must be >= 1")
    return T


def _spectrum(g: graph.Graph, args):
    H, _ = graph.transition_matrix(g)
    return H, graph.spectral_decompose(H, g.degrees, allow_bipartite=getattr(args, "allow_bipartite", False))


def _cmd_pmf(args):
    params = _params(args)
    T = _check_horizon(args.T)
    theta = counting.pdtp_waiting_pmf(params, T).coeffs
    surv = counting.pdtp_survival(params, T).coeffs
    rows = [[t, theta[t], surv[t]] for t in range(T + 1)]
    return _param_block(params), ["t", "theta", "survival"], rows


def _cmd_states(args):
    params = _params(args)
    T = _check_horizon(args.T)
    N = T if args.N is None else args.N
    phi = counting.pdtp_state_panel(params, N, T).phi
    rows = [[t, n, phi[n, t]] for t in range(T + 1) for n in range(phi.shape[0])]
    return {**_param_block(params), "T": T, "N": phi.shape[0] - 1}, ["t", "n", "phi"], rows


def _cmd_memory(args):
    params = _params(args)
    T = _check_horizon(args.T)
    k = counting.memory_kernels(params, T)
    rows = [[t, k.M[t], k.K0[t], k.B[t], k.D[t]] for t in range(T + 1)]
    return _param_block(params), ["t", "M", "K0", "B", "D"], rows


def _cmd_arrivals(args):
    params = _params(args)
    T = _check_horizon(args.T)
    mean = counting.expected_arrivals(params, T).coeffs
    return _param_block(params), ["t", "mean_arrivals"], [[t, mean[t]] for t in range(T + 1)]


def _cmd_sibuya(args):
    T = _check_horizon(args.T)
    a = args.alpha
    w = counting.sibuya_pmf(a, T).coeffs
    surv = counting.sibuya_survival(a, T).coeffs
    tau = counting.sibuya_hitting(a, T)
    rows = [[t, w[t], surv[t], tau[t]] for t in range(T + 1)]
    return {"alpha": a, "T": T}, ["t", "pmf", "survival", "hitting"], rows


def _cmd_walk(args):
    params = _params(args)
    T = _check_horizon(args.T)
    g = graph.read_edge_list(args.graph)
    H, spec = _spectrum(g, args)
    if args.method == "cox":
        walk = dtrw.cox_transition(counting.pdtp_state_panel(params, T, T), spec, T, H)
    else:
        walk = dtrw.spectral_transition(params, spec, T)
    P = walk.matrices
    n = g.n_nodes
    rows = [[t, i, j, P[t, i, j]] for t in range(T + 1) for i in range(n) for j in range(n)]
    block = {**_param_block(params), "graph": args.graph, "method": args.method}
    return block, ["t", "i", "j", "P"], rows


def _cmd_simulate(args):
    params = _params(args)
    T = _check_horizon(args.T)
    cfg = simulate.SimConfig(seed=args.seed, n_paths=args.paths, T=T)
    block = {**_param_block(params), "seed": args.seed, "paths": args.paths, "T": T}
    if args.graph:
        g = graph.read_edge_list(args.graph)
        H, spec = _spectrum(g, args)
        emp = simulate.simulate_walk(params, g, cfg, start=args.start)
        exact = dtrw.spectral_transition(params, spec, T).matrices[:, args.start, :]
        rows = [
            [t, j, emp.freq[t, j], emp.stderr[t, j], exact[t, j]]
            for t in range(T + 1)
            for j in range(g.n_nodes)
        ]
        block.update(graph=args.graph, start=args.start)
        return block, ["t", "node", "empirical", "stderr", "analytic"], rows
    emp = simulate.simulate_states(params, cfg, N=args.N)
    exact = counting.pdtp_state_panel(params, T, T).phi
    N = emp.freq.shape[0] - 1
    rows = [[t, n, emp.freq[n, t], emp.stderr[n, t], exact[n, t]] for t in range(T + 1) for n in range(N + 1)]
    block["N"] = N
    return block, ["t", "n", "empirical", "stderr", "analytic"], rows


def _cmd_converge(args):
    p = ctlimit.CtParams(args.alpha, args.nu, args.xi0)
    table = ctlimit.convergence_study(p, args.t, args.h_list, n=args.n)
    rows = [[r.t, r.h, r.xi, r.state_error, r.density_error] for r in table]
    block = {"alpha": p.alpha, "nu": p.nu, "xi0": p.xi0, "n": args.n}
    return block, ["t", "h", "xi", "state_error", "density_error"], rows


def _cmd_defect(args):
    g = graph.read_edge_list(args.graph)
    _, spec = _spectrum(g, args)
    P0 = dtrw.initial_defect(spec, args.eps)
    n = g.n_nodes
    rows = [[i, j, P0[i, j]] for i in range(n) for j in range(n)]
    return {"graph": args.graph, "eps": args.eps}, ["i", "j", "P0"], rows


_COMMANDS = {
    "pmf": _cmd_pmf,
    "states": _cmd_states,
    "memory": _cmd_memory,
    "arrivals": _cmd_arrivals,
    "sibuya": _cmd_sibuya,
    "walk": _cmd_walk,
    "simulate": _cmd_simulate,
    "converge": _cmd_converge,
    "defect": _cmd_defect,
}


def _plain(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    return x


def _fmt(x) -> str:
    x = _plain(x)
    return repr(x) if isinstance(x, float) else str(x)


def render_csv(params: dict, columns: list, rows: list) -> str:
    lines = [f"# {k}={_fmt(v)}" for k, v in params.items()]
    lines.append(",".join(columns))
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def render_json(params: dict, columns: list, rows: list) -> str:
    doc = {
        "params": {k: _plain(v) for k, v in params.items()},
        "columns": columns,
        "rows": [[_plain(v) for v in row] for row in rows],
    }
    return json.dumps(doc) + "\n"


def read_csv(text: str) -> tuple[dict, list, list]:
    """Parse output of :func:`render_csv` back into (params, columns, rows)."""
    params, rows, columns = {}, [], None
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition("=")
            params[key] = value
        elif columns is None:
            columns = line.split(",")
        elif line:
            rows.append([float(v) for v in line.split(",")])
    return params, columns, rows


def _error(code: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": code, "message": message}) + "\n")


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        params, columns, rows = _COMMANDS[args.command](args)
    except UsageError as exc:
        _error("USAGE", str(exc))
        return 2
    except InvalidParamsError as exc:
        _error(exc.code, str(exc))
        return 2
    except RenewalError as exc:
        _error(exc.code, str(exc))
        return 1
    except OSError as exc:
        _error("IO", str(exc))
        return 1
    text = render_json(params, columns, rows) if args.format == "json" else render_csv(params, columns, rows)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())
