"""Command-line front end.

    belab build SELECTOR [--lambda L] [--out state.json]
    belab sweep --family F --detector choi-u|witness|pt-mineig [--grid a:h:b] [--out sweep.csv]
    belab reproduce --figure 1|2|3|all [--out DIR]
    belab gamma --upb tiles|gentiles2|extended-tiles [--restarts N] [--seed S]
    belab range-check --state state.json --candidates eq15|tiles-completion|search|computational|file:PATH
    belab certify --state state.json [--upb U] [--gamma-value G]

Exit codes: 0 success, 2 invalid input, 3 eigensolver failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import catalog as cat
from .certify import (
    DEFAULT_RESTARTS,
    certify_state,
    gamma_search,
    grid_overlap,
    make_detector,
    sweep,
    witness_from_basis,
)
from .io import dump_json, fmt, load_state, save_state, sweep_to_csv
from .linalg import RANK_TOL, ConvergenceError, rank
from .maps import DETECT_TOL, is_ppt
from .range_criterion import check_range_criterion, product_search, range_projector

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERIC = 3
DEFAULT_GRID = "0:0.005:1"
DEFAULT_SEED = 42

FIGURES = {
    1: ("rho1:1", "fig1"),
    2: ("rho2", "fig2"),
    3: ("sigma1", "fig3"),
}

UPBS = {
    "tiles": cat.tiles_upb,
    "gentiles2": cat.gentiles2_4x3_upb,
    "extended-tiles": cat.extended_tiles_4x3_upb,
}


class UsageError(ValueError):
    pass


def parse_grid(spec: str) -> np.ndarray:
    """``start:step:end`` to a strictly increasing grid inside [0, 1] that ends at ``end``."""
    try:
        start, step, end = (float(x) for x in spec.split(":"))
    except ValueError:
        raise UsageError(f"grid must look like start:step:end, got {spec!r}") from None
    if step <= 0 or end <= start:
        raise UsageError(f"grid {spec!r} is not strictly increasing")
    count = (end - start) / step
    n = int(round(count))
    if abs(count - n) > 1e-9 * max(1.0, count):
        raise UsageError(f"grid {spec!r} is not strictly increasing up to its end point")
    grid = np.round(start + step * np.arange(n + 1), 12)
    grid[-1] = end
    if grid[0] < 0 or grid[-1] > 1:
        raise UsageError(f"grid {spec!r} leaves [0, 1]")
    if np.any(np.diff(grid) <= 0):
        raise UsageError(f"grid {spec!r} is not strictly increasing")
    return grid


def resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get("BELAB_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"BELAB_SEED must be an integer, got {env!r}") from None
    return DEFAULT_SEED


def _restarts(n: int) -> int:
    if n < 1:
        raise UsageError("--restarts must be at least 1")
    return n


def _upb(name: str) -> cat.ProductBasis:
    try:
        return UPBS[name]()
    except KeyError:
        raise UsageError(f"unknown UPB {name!r}; choose from {', '.join(UPBS)}") from None


def build_state(selector: str, lam: float | None) -> cat.DensityMatrix:
    """State for a build selector; λ families need ``lam``."""
    fixed = {
        "tiles-edge": lambda: cat.edge_state(cat.tiles_upb()),
        "gentiles2-edge": lambda: cat.edge_state(cat.gentiles2_4x3_upb()),
        "extended-tiles-edge": lambda: cat.edge_state(cat.extended_tiles_4x3_upb()),
    }
    if selector in fixed:
        return fixed[selector]().relabel(label=selector, family=selector)
    name, _, arg = selector.partition(":")
    if name == "gentiles2-minus":
        try:
            k = int(arg)
        except ValueError:
            raise UsageError("gentiles2-minus needs a 1-based member index") from None
        if not 1 <= k <= 7:
            raise UsageError("gentiles2-minus index must be 1..7")
        return cat.complement_state(cat.gentiles2_4x3_upb(), [k - 1]).relabel(label=selector, family="complement")
    try:
        fam = cat.family_from_selector(selector)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if lam is None:
        raise UsageError(f"{selector} needs --lambda")
    if not 0.0 <= lam <= 1.0:
        raise UsageError("--lambda must lie in [0, 1]")
    return fam(lam).relabel(label=f"{selector}@{lam:g}")


def _provenance(args, **extra) -> dict:
    doc = {"version": __version__, "rank_tol": RANK_TOL, "detect_tol": getattr(args, "tol", DETECT_TOL)}
    doc.update(extra)
    return doc


def cmd_build(args) -> int:
    rho = build_state(args.selector, args.lam)
    out = Path(args.out or f"{args.selector.replace(':', '_').replace(',', '-')}.json")
    save_state(rho, out, {"provenance": _provenance(args)})
    print(f"wrote {out}")
    print(f"dims={rho.dims[0]}x{rho.dims[1]} rank={rank(rho.mat)} trace={fmt(np.trace(rho.mat))} "
          f"ppt={str(is_ppt(rho, args.tol)).lower()}")
    return EXIT_OK


def _detector_for(family: cat.Family, name: str, gamma: float | None, restarts: int, seed: int):
    if name == "choi-u" and family.dims[1] != 3:
        raise UsageError("choi-u needs party B of dimension 3")
    if name == "witness":
        if family.upb is None:
            raise UsageError(f"family {family.label} has no product basis for a witness")
        if gamma is not None and not 0.0 < gamma < 1.0:
            raise UsageError("--gamma-value must lie in (0, 1)")
        return make_detector("witness", witness_from_basis(family.upb, gamma, restarts, seed))
    if name not in ("choi-u", "pt-mineig"):
        raise UsageError(f"unknown detector {name!r}")
    return make_detector(name)


def _write_sweep(result, out_csv: Path, args, extra: dict) -> None:
    sweep_to_csv(result.lambdas, result.values, out_csv)
    meta = _provenance(
        args,
        family=result.family_label,
        detector=result.detector_label,
        grid=args.grid,
        points=len(result.lambdas),
        sign_changes=result.sign_changes,
        multiple_sign_changes=result.multiple_sign_changes,
        threshold=result.threshold,
        threshold_is_estimate=True,
        **extra,
    )
    dump_json(meta, out_csv.with_suffix(".json"))


def cmd_sweep(args) -> int:
    try:
        family = cat.family_from_selector(args.family)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    grid = parse_grid(args.grid)
    seed = resolve_seed(args.seed)
    det = _detector_for(family, args.detector, args.gamma_value, _restarts(args.restarts), seed)
    result = sweep(family, grid, det, args.tol)
    out = Path(args.out or f"sweep_{args.family.replace(':', '_').replace(',', '-')}.csv")
    _write_sweep(result, out, args, {"seed": seed})
    print(f"wrote {out} ({len(grid)} rows)")
    print(f"sign_changes={result.sign_changes}")
    print(result.summary())
    return EXIT_OK


def cmd_reproduce(args) -> int:
    figures = sorted(FIGURES) if args.figure == "all" else [int(args.figure)]
    outdir = Path(args.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    grid = parse_grid(args.grid)
    for k in figures:
        selector, stem = FIGURES[k]
        family = cat.family_from_selector(selector)
        result = sweep(family, grid, make_detector("choi-u"), args.tol)
        path = outdir / f"{stem}.csv"
        _write_sweep(result, path, args, {"figure": k})
        print(f"{stem}: family={selector} detector=choi-u value@0={fmt(result.values[0])} {result.summary()}")
    return EXIT_OK


def cmd_gamma(args) -> int:
    upb = _upb(args.upb)
    restarts = _restarts(args.restarts)
    seed = resolve_seed(args.seed)
    res = gamma_search(upb.projector(), upb.dims, restarts, seed)
    b = res.best_index
    near = int(np.count_nonzero(res.values <= res.value + 1e-9))
    report = {
        "upb": args.upb,
        "gamma_estimate": res.value,
        "gamma_kind": "estimated",
        "is_upper_bound": True,
        "minimizer": {"alpha": res.alphas[b].tolist(), "beta": res.betas[b].tolist()},
        "restarts": restarts,
        "seed": seed,
        "restart_values": {
            "min": float(res.values.min()),
            "median": float(np.median(res.values)),
            "max": float(res.values.max()),
            "within_1e-9_of_best": near,
        },
        "iterations": {"mean": float(res.iterations.mean()), "max": int(res.iterations.max())},
        "version": __version__,
    }
    if args.grid_check:
        step = 0.025 if upb.dims[0] <= 3 else 0.1
        g = grid_overlap(upb.projector(), upb.dims, coarse_step=step, fine_step=step / 10)
        report["grid_check"] = {"value": g.value, "coarse_step": step, "evaluations": g.evaluations,
                                "difference": res.value - g.value}
    if args.out:
        dump_json(report, args.out)
    print(f"gamma={fmt(res.value)}")
    print(f"alpha={np.round(res.alphas[b], 9).tolist()} beta={np.round(res.betas[b], 9).tolist()}")
    print(f"restarts={restarts} seed={seed} at_best={near} median={fmt(np.median(res.values))}")
    if args.grid_check:
        print(f"grid_check={fmt(report['grid_check']['value'])}")
    return EXIT_OK


def _read_candidates(spec: str, rho, restarts: int, seed: int):
    if spec == "eq15":
        return cat.tiles_plus_partners(), False
    if spec == "tiles-completion":
        return cat.tiles_completion(), False
    if spec == "computational":
        d1, d2 = rho.dims
        return [cat.ProductVector(np.eye(d1)[i], np.eye(d2)[j]) for i in range(d1) for j in range(d2)], False
    if spec == "search":
        res = product_search(range_projector(rho), rho.dims, restarts, seed)
        return (res.vectors or [res.best_vector]), True
    if spec.startswith("file:"):
        try:
            doc = json.loads(Path(spec[5:]).read_text())
            return [cat.ProductVector(v["alpha"], v["beta"]) for v in doc["vectors"]], False
        except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"cannot read candidates: {exc}") from None
    raise UsageError(f"unknown candidate source {spec!r}")


def _load(path: str):
    try:
        return load_state(path)
    except OSError as exc:
        raise UsageError(f"cannot read state file: {exc}") from None


def cmd_range_check(args) -> int:
    rho = _load(args.state)
    seed = resolve_seed(args.seed)
    cands, searched = _read_candidates(args.candidates, rho, _restarts(args.restarts), seed)
    try:
        report = check_range_criterion(rho, cands, from_search=searched)
    except ValueError as exc:
        raise UsageError(f"refusing range check: {exc}") from None
    doc = report.to_dict()
    doc.update(candidates=args.candidates, seed=seed if searched else None,
               restarts=args.restarts if searched else None)
    text = dump_json(doc, args.out)
    print(text, end="")
    return EXIT_OK


def cmd_certify(args) -> int:
    rho = _load(args.state)
    witness = None
    seed = resolve_seed(args.seed)
    restarts = _restarts(args.restarts)
    if args.upb:
        upb = _upb(args.upb)
        if upb.dims != rho.dims:
            raise UsageError(f"UPB {args.upb} has dims {upb.dims}, state has {rho.dims}")
        if args.gamma_value is not None and not 0.0 <= args.gamma_value <= 1.0:
            raise UsageError("--gamma-value must lie in [0, 1]")
        witness = witness_from_basis(upb, args.gamma_value, restarts, seed)
    elif args.gamma_value is not None:
        raise UsageError("--gamma-value needs --upb")
    report = certify_state(rho, witness, args.tol, seed=seed if witness else None,
                           restarts=restarts if witness else None)
    text = dump_json(report.to_dict(), args.out)
    print(text, end="")
    return EXIT_OK


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="belab", description="Bound entangled states from product bases.")
    parser.add_argument("--version", action="version", version=f"belab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=False):
        p.add_argument("--tol", type=float, default=DETECT_TOL, help="detection tolerance (default 1e-10)")
        p.add_argument("--out", default=None, help="output path")
        if seed:
            p.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
            p.add_argument("--seed", type=int, default=None, help="default $BELAB_SEED or 42")

    p = sub.add_parser("build", help="write a catalog state as JSON")
    p.add_argument("selector", help="tiles-edge, gentiles2-edge, extended-tiles-edge, rho1:i, rho2, "
                                    "rho3:ab, sigma1, sigma2:i,j,..., gentiles2-minus:k")
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    common(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("sweep", help="detector values over a λ grid")
    p.add_argument("--family", required=True)
    p.add_argument("--detector", default="choi-u", choices=["choi-u", "witness", "pt-mineig"])
    p.add_argument("--grid", default=DEFAULT_GRID)
    p.add_argument("--gamma-value", type=float, default=None)
    common(p, seed=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reproduce", help="Choi-detector curves for the three λ families")
    p.add_argument("--figure", required=True, choices=["1", "2", "3", "all"])
    p.add_argument("--grid", default=DEFAULT_GRID)
    common(p)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("gamma", help="seesaw estimate of the witness offset")
    p.add_argument("--upb", required=True)
    p.add_argument("--grid-check", action="store_true", help="cross-check with a brute-force grid")
    common(p, seed=True)
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("range-check", help="range criterion with product candidates")
    p.add_argument("--state", required=True)
    p.add_argument("--candidates", default="search")
    common(p, seed=True)
    p.set_defaults(func=cmd_range_check)

    p = sub.add_parser("certify", help="PPT, Choi detector and witness verdict")
    p.add_argument("--state", required=True)
    p.add_argument("--upb", default=None)
    p.add_argument("--gamma-value", type=float, default=None)
    common(p, seed=True)
    p.set_defaults(func=cmd_certify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = create_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "tol", DETECT_TOL) <= 0:
            raise UsageError("--tol must be positive")
        return args.func(args)
    except ConvergenceError as exc:
        print(f"belab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"belab: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
