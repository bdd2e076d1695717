"""Command-line front end: ``paddetect {gen,simulate,analyze,optimize}``.

Every output file starts with ``#`` header lines recording the subcommand and
all resolved parameters (thread count excluded, since it never changes
results), so a file carries what is needed to regenerate it.
"""

from __future__ import annotations

import argparse
import os
import sys
from importlib.metadata import PackageNotFoundError, version

import numpy as np

from .channel import ImpairmentParams, snr_to_sigma_n2
from .constellation import SapskSpec, make_qam, make_sapsk, parse_source, save_constellation
from .detector import DetectorKind
from .mc_engine import THREADS_ENV, SepEstimate, format_sweep_tsv, sweep
from .optimizer import ObjectiveMode, OptimizeConfig, optimize
from .sep_analytic import error_floor, sep_union


def _version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:  # pragma: no cover
        return "0+unknown"


def parse_snr_spec(spec: str) -> list[float]:
    """Inclusive ``start:step:stop`` grid in dB (a single number is a 1-point grid)."""
    parts = spec.split(":")
    try:
        vals = [float(x) for x in parts]
    except ValueError:
        raise ValueError(f"malformed SNR spec {spec!r}; expected start:step:stop") from None
    if len(vals) == 1:
        return vals
    if len(vals) != 3:
        raise ValueError(f"malformed SNR spec {spec!r}; expected start:step:stop")
    start, step, stop = vals
    if step <= 0 or stop < start:
        raise ValueError(f"SNR spec {spec!r} needs step > 0 and stop >= start")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(n)]


def _manifest(command: str, params: dict) -> list[str]:
    lines = [f"paddetect {_version()} {command}"]
    lines += [f"{k} = {v}" for k, v in params.items()]
    return lines


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def cmd_gen(args) -> None:
    if args.type == "qam":
        c = make_qam(args.order)
        params = {"type": "qam", "order": args.order}
    else:
        if args.gamma is None:
            raise ValueError("sapsk needs --gamma")
        c = make_sapsk(SapskSpec(args.order, args.gamma, args.rho))
        params = {"type": "sapsk", "order": args.order, "gamma": args.gamma, "rho": args.rho}
    header = _manifest("gen", params)
    if args.out in (None, "-"):
        lines = [f"# {h}" for h in header] + [f"{s.real:.17g} {s.imag:.17g}" for s in c.points]
        sys.stdout.write("\n".join(lines) + "\n")
    else:
        save_constellation(c, args.out, header)


def cmd_simulate(args) -> None:
    c = parse_source(args.constellation)
    kind = DetectorKind.parse(args.detector)
    grid = parse_snr_spec(args.snr)
    n = int(float(args.n_symbols))
    rows = sweep(c, kind, args.sigma_g2, args.sigma_phi2, grid, n, args.seed, threads=args.threads)
    header = _manifest("simulate", {
        "constellation": args.constellation, "detector": kind.value,
        "sigma_g2": repr(args.sigma_g2), "sigma_phi2": repr(args.sigma_phi2),
        "snr": args.snr, "n_symbols": n, "seed": args.seed,
    })
    _write(args.out, format_sweep_tsv(rows, header))


def cmd_analyze(args) -> None:
    c = parse_source(args.constellation)
    params = {"constellation": args.constellation, "sigma_g2": repr(args.sigma_g2),
              "sigma_phi2": repr(args.sigma_phi2)}
    if args.floor:
        params["floor"] = True
        header = _manifest("analyze", params)
        value = error_floor(c, args.sigma_g2, args.sigma_phi2)
        text = "\n".join([f"# {h}" for h in header] + ["# snr_db\tsep", f"inf\t{value:.10e}"]) + "\n"
    else:
        if args.snr is None:
            raise ValueError("analyze needs --snr or --floor")
        params["snr"] = args.snr
        rows = []
        for snr in parse_snr_spec(args.snr):
            p = ImpairmentParams(snr_to_sigma_n2(snr), args.sigma_g2, args.sigma_phi2)
            rows.append((snr, SepEstimate.analytic(sep_union(c, p))))
        header = _manifest("analyze", params)
        text = "\n".join([f"# {h}" for h in header] + ["# snr_db\tsep"]
                         + [f"{snr:g}\t{est.sep:.10e}" for snr, est in rows]) + "\n"
    _write(args.out, text)


def cmd_optimize(args) -> None:
    cfg = OptimizeConfig(
        order=args.order, kind=args.detector, sigma_g2=args.sigma_g2,
        sigma_phi2=args.sigma_phi2, snr_db=args.snr_db, n_eval=int(float(args.n_eval)),
        seed=args.seed, mode=ObjectiveMode(args.objective), t0=args.t0, cooling=args.cooling,
        iters_per_temp=args.iters_per_temp, step=args.step, t_min_ratio=args.t_min_ratio,
        max_anneal_iters=args.max_anneal_iters, h_fd=args.h_fd,
        refine_max_iter=args.refine_max_iter, refine_tol=args.refine_tol,
        n_validate=int(float(args.n_validate)), threads=args.threads,
    )
    params = {k: repr(v) if isinstance(v, float) else getattr(v, "value", v)
              for k, v in cfg.__dict__.items() if k != "threads"}
    header = _manifest("optimize", params)
    res = optimize(cfg)
    val = res.final_sep_mc
    header_val = header + [
        f"validation_seed = {cfg.fresh_seed}",
        f"validation_sep = {val.sep:.10e} (n_symbols = {val.n_symbols}, n_errors = {val.n_errors}, "
        f"ci95 = {val.ci95_halfwidth:.3e})",
        f"analytic_sep = {res.final_sep_analytic:.10e}",
    ]
    save_constellation(res.constellation, f"{args.out_prefix}.const.txt", header_val)
    hist = "\n".join([f"# {h}" for h in header] + ["# iter\tsep"]
                     + [f"{i}\t{v:.10e}" for i, v in res.objective_history]) + "\n"
    _write(f"{args.out_prefix}.history.tsv", hist)
    _write(f"{args.out_prefix}.validation.tsv",
           "\n".join([f"# {h}" for h in header_val]
                     + ["# snr_db\tsep\tn_symbols\tn_errors\tci95",
                        f"{cfg.snr_db:g}\t{val.sep:.10e}\t{val.n_symbols}\t{val.n_errors}\t"
                        f"{val.ci95_halfwidth:.10e}"]) + "\n")


def _threads_default() -> int:
    return max(1, int(os.environ.get(THREADS_ENV, "1")))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="paddetect", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--threads", type=int, default=_threads_default(),
                       help=f"worker threads (default ${THREADS_ENV} or 1); never changes results")
        p.add_argument("--out", "-o", default=None, help="output file (default stdout)")

    g = sub.add_parser("gen", help="write a QAM or SAPSK constellation file")
    g.add_argument("--type", choices=("qam", "sapsk"), required=True)
    g.add_argument("--order", type=int, required=True)
    g.add_argument("--gamma", type=int, help="SAPSK ring count")
    g.add_argument("--rho", type=float, default=1.0, help="SAPSK ring spacing")
    common(g)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("simulate", help="Monte Carlo SEP sweep")
    s.add_argument("--constellation", "-c", required=True,
                   help="file path, qam:M or sapsk:M:GAMMA:RHO")
    s.add_argument("--detector", "-d", default="pad")
    s.add_argument("--sigma-g2", type=float, default=0.0)
    s.add_argument("--sigma-phi2", type=float, default=0.0)
    s.add_argument("--snr", required=True, help="start:step:stop in dB, inclusive")
    s.add_argument("--n-symbols", default="1e6")
    s.add_argument("--seed", type=int, default=0)
    common(s)
    s.set_defaults(func=cmd_simulate)

    a = sub.add_parser("analyze", help="analytic union-bound SEP or error floor")
    a.add_argument("--constellation", "-c", required=True)
    a.add_argument("--sigma-g2", type=float, default=0.0)
    a.add_argument("--sigma-phi2", type=float, default=0.0)
    grp = a.add_mutually_exclusive_group(required=True)
    grp.add_argument("--snr")
    grp.add_argument("--floor", action="store_true")
    common(a)
    a.set_defaults(func=cmd_analyze)

    o = sub.add_parser("optimize", help="shape a constellation for a detector")
    o.add_argument("--order", type=int, required=True)
    o.add_argument("--detector", "-d", default="pad")
    o.add_argument("--sigma-g2", type=float, default=0.0)
    o.add_argument("--sigma-phi2", type=float, default=0.0)
    o.add_argument("--snr-db", type=float, required=True)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--n-eval", default="1e4")
    o.add_argument("--n-validate", default="1e6")
    o.add_argument("--objective", choices=[m.value for m in ObjectiveMode], default="mc")
    o.add_argument("--t0", type=float, default=None)
    o.add_argument("--cooling", type=float, default=0.95)
    o.add_argument("--iters-per-temp", type=int, default=50)
    o.add_argument("--step", type=float, default=0.1)
    o.add_argument("--t-min-ratio", type=float, default=1e-6)
    o.add_argument("--max-anneal-iters", type=int, default=None)
    o.add_argument("--h-fd", type=float, default=1e-3)
    o.add_argument("--refine-max-iter", type=int, default=20)
    o.add_argument("--refine-tol", type=float, default=1e-6)
    o.add_argument("--out-prefix", required=True)
    o.add_argument("--threads", type=int, default=_threads_default())
    o.set_defaults(func=cmd_optimize)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (ValueError, OSError) as exc:
        print(f"paddetect {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
