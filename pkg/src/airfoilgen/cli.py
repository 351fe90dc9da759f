"""Command-line interface.

Subcommands: preprocess, train, synthesize, cluster, fid, eval, optimize.
Exit codes: 0 success, 1 runtime/evaluation failure, 2 usage/input error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import aero, gaopt, geometry, latent, plots, vaegan
from .errors import (
    AirfoilGenError,
    BadCoefficients,
    MalformedFile,
    NoFilesFound,
    UnknownAirfoil,
)

USAGE_ERRORS = (
    NoFilesFound,
    UnknownAirfoil,
    BadCoefficients,
    MalformedFile,
)


def _load_dataset(path):
    airfoils, scale, m = geometry.read_dataset(path)
    names = [af.name for af in airfoils]
    data = np.stack([af.y for af in airfoils]) if airfoils else np.empty((0, 2 * m))
    return names, data, scale, m


def _outline_plot(loops: list[tuple[str, np.ndarray]], path, title: str) -> None:
    palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    series = [
        plots.Series(
            x=loop[:, 0],
            y=loop[:, 1],
            label=name,
            color=palette[i % len(palette)],
        )
        for i, (name, loop) in enumerate(loops)
    ]
    plots.render_svg(
        plots.SvgPlot(series=series, title=title, xlabel="x/c", ylabel="y/c",
                      equal_aspect=True),
        path,
    )


def cmd_preprocess(args) -> int:
    names = sorted(
        f for f in os.listdir(args.dat_dir) if f.lower().endswith(".dat")
    )
    if not names:
        raise NoFilesFound(f"no .dat files in {args.dat_dir}")
    grid = geometry.cosine_grid(geometry.DEFAULT_M)
    resampled = []
    failures = 0
    for fname in names:
        fpath = os.path.join(args.dat_dir, fname)
        try:
            with open(fpath) as fh:
                raw = geometry.parse_dat(fh.read())
            upper, lower = geometry.resample(raw, grid)
        except AirfoilGenError as exc:
            print(f"skipping {fname}: {exc}", file=sys.stderr)
            failures += 1
            continue
        resampled.append((raw.name, geometry.stack_surfaces(upper, lower)))
    if not resampled:
        raise NoFilesFound(f"no parsable .dat files in {args.dat_dir}")
    dataset, scale = geometry.normalize_dataset(resampled)
    geometry.write_dataset(args.out, dataset, scale, grid.m)
    print(
        f"preprocessed {len(dataset)} airfoils ({failures} skipped), "
        f"scale={scale!r} -> {args.out}"
    )
    return 0


def cmd_train(args) -> int:
    _, data, scale, _ = _load_dataset(args.dataset)
    config = vaegan.TrainConfig(
        epochs=args.epochs,
        batch_size=args.batch_size,
        lr_initial=args.lr,
        lr_after_decay=args.lr_after_decay,
        decay_epoch=args.decay_epoch,
        seed=args.seed,
    )
    log_rows: list = []
    if args.model == "vaegan":
        model = vaegan.train_vaegan(data, config, scale, log_rows)
    else:
        model = vaegan.train_vae(data, config, scale, log_rows)
    vaegan.save_checkpoint(model, args.out)
    if args.log:
        vaegan.write_train_log(args.log, log_rows)
    mse = vaegan.dataset_mse(model, data)
    print(f"trained {args.model} for {args.epochs} epochs, dataset MSE {mse:.6e}")
    return 0


def _encode_named(model, names, data, wanted: str) -> np.ndarray:
    try:
        idx = names.index(wanted)
    except ValueError:
        raise UnknownAirfoil(f"{wanted!r} not in dataset") from None
    mu, _ = vaegan.encode(model.encoder, data[idx : idx + 1])
    return mu[0]


def _export(y_norm: np.ndarray, scale: float, name: str, outdir, smooth: bool):
    grid = geometry.cosine_grid(geometry.DEFAULT_M)
    y = geometry.denormalize(y_norm, scale)
    if smooth:
        upper, lower = geometry.split_surfaces(y)
        y = geometry.stack_surfaces(
            geometry.savgol_smooth(upper), geometry.savgol_smooth(lower)
        )
    upper, lower = geometry.split_surfaces(y)
    loop = geometry.loop_coordinates(upper, lower, grid.xs)
    path = os.path.join(outdir, f"{name}.dat")
    geometry.write_dat(path, name, loop)
    return name, loop


def cmd_synthesize(args) -> int:
    model = vaegan.load_checkpoint(args.checkpoint)
    names, data, _, _ = _load_dataset(args.dataset)
    os.makedirs(args.outdir, exist_ok=True)
    produced = []

    if args.mode == "reconstruct":
        z = _encode_named(model, names, data, args.names[0])
        recon = vaegan.decode(model.decoder, z[None, :])[0]
        idx = names.index(args.names[0])
        mse = float(np.mean((recon - data[idx]) ** 2))
        print(f"reconstruction MSE for {args.names[0]}: {mse:.6e}")
        produced.append(
            _export(recon, model.scale, f"recon_{args.names[0]}", args.outdir,
                    args.smooth)
        )
    elif args.mode in ("interpolate", "extrapolate"):
        if len(args.names) == 2:
            z1 = _encode_named(model, names, data, args.names[0])
            z2 = _encode_named(model, names, data, args.names[1])
            nu = args.nu if args.nu is not None else (
                0.5 if args.mode == "interpolate" else 2.0
            )
            z = latent.interpolate2(z1, z2, nu)
            tag = f"{args.mode}_{nu:g}"
        elif len(args.names) == 3:
            if args.coeffs is None:
                raise BadCoefficients("triplet mode needs --coeffs a,b,c")
            coeffs = [float(c) for c in args.coeffs.split(",")]
            if len(coeffs) != 3:
                raise BadCoefficients("need exactly three coefficients")
            zs = [_encode_named(model, names, data, n) for n in args.names]
            try:
                z = latent.interpolate3(*zs, *coeffs)
            except AirfoilGenError as exc:
                raise BadCoefficients(str(exc)) from exc
            tag = f"{args.mode}_triplet"
        else:
            raise BadCoefficients("interpolation needs two or three airfoil names")
        y = vaegan.decode(model.decoder, z[None, :])[0]
        produced.append(_export(y, model.scale, tag, args.outdir, args.smooth))
    elif args.mode == "sample":
        samples = latent.sample_airfoils(model.decoder, args.count, args.seed)
        for i, y in enumerate(samples):
            produced.append(
                _export(y, model.scale, f"sample_{args.seed}_{i}", args.outdir,
                        args.smooth)
            )
    _outline_plot(
        produced, os.path.join(args.outdir, f"{args.mode}.svg"),
        f"{args.mode} outlines",
    )
    print(f"wrote {len(produced)} airfoil(s) to {args.outdir}")
    return 0


def cmd_cluster(args) -> int:
    model = vaegan.load_checkpoint(args.checkpoint)
    names, data, _, _ = _load_dataset(args.dataset)
    mu, _ = vaegan.encode(model.encoder, data)
    result = latent.kmeans(mu, args.k, seed=args.seed)
    os.makedirs(args.outdir, exist_ok=True)
    report = os.path.join(args.outdir, "clusters.csv")
    with open(report, "w") as fh:
        fh.write("name,cluster,distance\n")
        for name, z, a in zip(names, mu, result.assignments):
            dist = float(np.linalg.norm(z - result.centroids[a]))
            fh.write(f"{name},{a},{dist!r}\n")
    for j, centroid in enumerate(result.centroids):
        y = vaegan.decode(model.decoder, centroid[None, :])[0]
        _export(y, model.scale, f"centroid_{j}", args.outdir, False)
    print(
        f"clustered {len(names)} airfoils into {args.k} clusters, "
        f"inertia {result.inertia:.4f} -> {report}"
    )
    return 0


def cmd_fid(args) -> int:
    model = vaegan.load_checkpoint(args.checkpoint)
    if model.discriminator is None:
        raise MalformedFile("FID needs a vaegan checkpoint (with discriminator)")
    _, data, _, _ = _load_dataset(args.dataset)
    real_features = vaegan.disc_features(model.discriminator, data)
    if args.against == "self":
        other = real_features
        n_other = data.shape[0]
    else:
        if args.samples_from:
            gen_model = vaegan.load_checkpoint(args.samples_from)
        else:
            gen_model = model
        samples = latent.sample_airfoils(gen_model.decoder, args.samples, args.seed)
        other = vaegan.disc_features(model.discriminator, samples)
        n_other = args.samples
    value = latent.fid(real_features, other)
    report = f"FID {value!r} (real n={data.shape[0]}, other n={n_other})"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(report + "\n")
    print(report)
    return 0


def cmd_eval(args) -> int:
    cond = aero.FlowConditions(
        reynolds=args.reynolds, mach=args.mach, alpha=args.alpha
    )
    evaluator = aero.make_evaluator(args.evaluator, xfoil_path=args.xfoil_path)
    rows = []
    for path in args.dats:
        with open(path) as fh:
            raw = geometry.parse_dat(fh.read())
        try:
            result = evaluator(raw.points, cond)
        except AirfoilGenError as exc:
            print(f"evaluation failed for {path}: {exc}", file=sys.stderr)
            rows.append((raw.name, np.nan, np.nan, False))
            continue
        rows.append((raw.name, result.cl, result.cd, result.converged))
    os.makedirs(args.outdir, exist_ok=True)
    report = os.path.join(args.outdir, "aero.csv")
    with open(report, "w") as fh:
        fh.write("name,cl,cd,converged\n")
        for name, cl, cd, conv in rows:
            fh.write(f"{name},{cl!r},{cd!r},{int(conv)}\n")
    good = [(cd, cl) for _, cl, cd, conv in rows if conv]
    if good:
        cds, cls = zip(*good)
        plots.render_svg(
            plots.SvgPlot(
                series=[plots.Series(np.array(cds), np.array(cls),
                                     label="airfoils", kind="scatter")],
                title="lift vs drag", xlabel="Cd", ylabel="Cl",
            ),
            os.path.join(args.outdir, "aero.svg"),
        )
    print(f"evaluated {len(rows)} airfoil(s) -> {report}")
    return 0


def cmd_optimize(args) -> int:
    config = gaopt.GaConfig(
        generations=args.generations,
        population=args.population,
        mutation_probability=args.mutation_probability,
        mutation_scale=args.mutation_scale,
        elitism_count=args.elitism,
        seed=args.seed,
        targets=aero.FitnessTargets(args.cl_target, args.cd_target),
    )
    os.makedirs(args.outdir, exist_ok=True)
    if args.evaluator == "surrogate":
        score_fn = lambda z: -float(np.dot(z, z))  # noqa: E731
        best, history = gaopt.run_ga(
            config, score_fn=score_fn, parallelism=args.parallelism
        )
        model = None
    else:
        model = vaegan.load_checkpoint(args.checkpoint)
        cond = aero.FlowConditions(
            reynolds=args.reynolds, mach=args.mach, alpha=args.alpha
        )
        evaluator = aero.make_evaluator(args.evaluator, xfoil_path=args.xfoil_path)
        best, history = gaopt.run_ga(
            config,
            decoder=model.decoder,
            evaluator=evaluator,
            scale=model.scale,
            cond=cond,
            parallelism=args.parallelism,
        )
    gaopt.write_history_csv(os.path.join(args.outdir, "history.csv"), history)
    gens = np.array([rec.index for rec in history])
    plots.render_svg(
        plots.SvgPlot(
            series=[
                plots.Series(gens, np.array([r.best_fitness for r in history]),
                             label="best", color="#d62728"),
                plots.Series(gens, np.array([r.mean_fitness for r in history]),
                             label="mean"),
            ],
            title="fitness per generation", xlabel="generation", ylabel="fitness",
        ),
        os.path.join(args.outdir, "fitness.svg"),
    )
    with open(os.path.join(args.outdir, "best_latent.txt"), "w") as fh:
        fh.write("\n".join(repr(float(v)) for v in best.z) + "\n")
    if model is not None:
        grid = geometry.cosine_grid(geometry.DEFAULT_M)
        loop = gaopt.decoded_loop(model.decoder, best.z, model.scale, grid)
        geometry.write_dat(os.path.join(args.outdir, "best.dat"), "optimized", loop)
    print(
        f"best fitness {best.fitness!r} after {len(history)} generations "
        f"-> {args.outdir}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="airfoilgen",
        description="Latent-space airfoil parameterization, synthesis and "
        "aerodynamic optimization",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="parse, resample and normalize .dat files")
    p.add_argument("dat_dir")
    p.add_argument("out")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("train", help="train the generative model")
    p.add_argument("dataset")
    p.add_argument("out")
    p.add_argument("--model", choices=["vaegan", "vae"], default="vaegan")
    p.add_argument("--epochs", type=int, default=5000)
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--lr", type=float, default=5e-4)
    p.add_argument("--lr-after-decay", type=float, default=5e-5)
    p.add_argument("--decay-epoch", type=int, default=2500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--log", default=None, help="training log CSV path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("synthesize", help="reconstruct, blend or sample airfoils")
    p.add_argument("checkpoint")
    p.add_argument("dataset")
    p.add_argument(
        "--mode",
        choices=["reconstruct", "interpolate", "extrapolate", "sample"],
        required=True,
    )
    p.add_argument("--names", nargs="*", default=[])
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--coeffs", default=None, help="triplet coefficients a,b,c")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--smooth", action="store_true")
    p.add_argument("--outdir", default="synthesized")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("cluster", help="k-means clustering in the feature domain")
    p.add_argument("checkpoint")
    p.add_argument("dataset")
    p.add_argument("--k", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--outdir", default="clusters")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("fid", help="Frechet distance between samples and data")
    p.add_argument("checkpoint", help="vaegan checkpoint providing features")
    p.add_argument("dataset")
    p.add_argument("--against", choices=["samples", "self"], default="samples")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--samples-from", default=None,
                   help="take decoder samples from this checkpoint instead")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_fid)

    p = sub.add_parser("eval", help="lift/drag evaluation of .dat airfoils")
    p.add_argument("dats", nargs="+")
    p.add_argument("--evaluator", choices=["panel", "xfoil", "auto"],
                   default="auto")
    p.add_argument("--xfoil-path", default=None)
    p.add_argument("--reynolds", type=float, default=2e6)
    p.add_argument("--mach", type=float, default=0.02)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--outdir", default="aero")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("optimize", help="latent-space GA toward target Cl/Cd")
    p.add_argument("checkpoint", nargs="?", default=None)
    p.add_argument("--evaluator",
                   choices=["panel", "xfoil", "auto", "surrogate"],
                   default="auto")
    p.add_argument("--xfoil-path", default=None)
    p.add_argument("--cl-target", type=float, default=0.6)
    p.add_argument("--cd-target", type=float, default=0.006)
    p.add_argument("--generations", type=int, default=60)
    p.add_argument("--population", type=int, default=25)
    p.add_argument("--mutation-probability", type=float, default=0.3)
    p.add_argument("--mutation-scale", type=float, default=0.2)
    p.add_argument("--elitism", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--parallelism", type=int, default=1)
    p.add_argument("--reynolds", type=float, default=2e6)
    p.add_argument("--mach", type=float, default=0.02)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--outdir", default="optimized")
    p.set_defaults(func=cmd_optimize)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "optimize" and args.evaluator != "surrogate":
        if args.checkpoint is None:
            parser.error("optimize needs a checkpoint unless --evaluator surrogate")
    try:
        return args.func(args)
    except USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AirfoilGenError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
