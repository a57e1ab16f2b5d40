"""Command-line front end.

Subcommands:
    sweep       key rates over a grid of channel noise occupations
    protocol    simulate one protocol run end to end, write key material
    linkbudget  maximum tolerable loss and distance versus background
    report      single security report for a fixed channel

Flag precedence is built-in defaults, then --config file values, then
explicit flags. Exit codes: 0 success, 2 bad configuration or arguments,
3 not enough data for channel estimation, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, replace
from pathlib import Path

from . import linkbudget as lb
from . import protocol as proto
from . import security, stats
from .config import (
    CHAIN_PRESETS,
    DEFAULT_OCCUPANCY_GRID,
    ExperimentConfig,
    config_from_dict,
    load_config,
)
from .devices import ChannelParams, response_and_noise
from .errors import InsufficientDataError


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="JSON configuration file")
    common.add_argument("--preset", choices=sorted(CHAIN_PRESETS))
    common.add_argument("--seed", type=int)
    common.add_argument("--out", metavar="PATH", help="output file or directory")
    common.add_argument("--format", choices=("csv", "json"), dest="out_format")
    common.add_argument(
        "--no-delta",
        dest="include_delta",
        action="store_false",
        default=None,
        help="drop the finite-size penalty term",
    )
    common.add_argument(
        "--no-pe",
        dest="include_estimation_penalty",
        action="store_false",
        default=None,
        help="use estimated channel parameters directly, no confidence widening",
    )
    common.add_argument("--e-ec", type=float, dest="e_ec")
    common.add_argument("--beta", type=float, dest="beta_ec")
    common.add_argument("--n-ec-fraction", type=float, dest="n_ec_fraction")
    common.add_argument("--loss", type=float, dest="channel_loss")
    common.add_argument("--nbar", type=float, dest="noise_photons")
    common.add_argument("--n-symbols", type=int, dest="n_symbols")

    parser = argparse.ArgumentParser(
        prog="mwqkd",
        description="Simulator and security analyzer for a microwave "
        "continuous-variable QKD link.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("sweep", parents=[common], help="key rate vs channel noise")
    p = sub.add_parser("protocol", parents=[common], help="simulate one run")
    p.add_argument(
        "--announce-bases",
        action="store_true",
        default=None,
        help="record both basis choices in the key file",
    )
    p = sub.add_parser("linkbudget", parents=[common], help="loss and range limits")
    p.add_argument("--medium", choices=sorted(lb.MEDIA))
    sub.add_parser("report", parents=[common], help="security report, one channel")
    return parser


_OVERRIDE_FIELDS = (
    "seed",
    "e_ec",
    "beta_ec",
    "n_ec_fraction",
    "channel_loss",
    "noise_photons",
    "n_symbols",
    "include_delta",
    "include_estimation_penalty",
    "medium",
)


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    if args.config is not None:
        cfg = load_config(args.config)
    else:
        cfg = ExperimentConfig()
    if args.preset is not None:
        cfg = replace(cfg, preset=args.preset, chain=CHAIN_PRESETS[args.preset])
    overrides = {
        name: getattr(args, name)
        for name in _OVERRIDE_FIELDS
        if getattr(args, name, None) is not None
    }
    if overrides:
        cfg = replace(cfg, **overrides)
    return cfg


def _format_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(out, header, rows, config: ExperimentConfig) -> None:
    lines = ["# config: " + json.dumps(config.to_dict(), sort_keys=True)]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_format_cell(v) for v in row))
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _write_json(out, payload: dict) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _report_kwargs(cfg: ExperimentConfig) -> dict:
    return {
        "n_raw": cfg.n_symbols,
        "beta_ec": cfg.beta_ec,
        "p_ec": cfg.p_ec,
        "e_ec": cfg.e_ec,
        "include_delta": cfg.include_delta,
        "include_estimation_penalty": cfg.include_estimation_penalty,
    }


def cmd_sweep(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    header = (
        "nbar",
        "snr",
        "mi_bits",
        "holevo_bits",
        "asymptotic_key_bits",
        "composite_key_bits_per_raw_symbol",
    )
    reports = []
    rows = []
    kwargs = _report_kwargs(cfg)
    n_ec = max(1, round(cfg.n_ec_fraction * (cfg.n_symbols // 2)))
    for nbar in cfg.noise_grid:
        channel = ChannelParams(loss=cfg.channel_loss, noise_photons=nbar)
        rep = security.build_report(cfg.chain, channel, n_ec=n_ec, **kwargs)
        reports.append(rep)
        rows.append(
            (
                float(nbar),
                rep.snr,
                rep.mi_bits,
                rep.holevo_bits,
                rep.asymptotic_key_bits,
                rep.finite_size.bits_per_raw_symbol,
            )
        )
    crossing = security.noise_tolerance(cfg.chain, cfg.channel_loss)

    if (args.out_format or "csv") == "json":
        payload = {
            "config": cfg.to_dict(),
            "asymptotic_noise_crossing": crossing,
            "reports": [rep.to_dict() for rep in reports],
        }
        _write_json(args.out, payload)
    else:
        _write_csv(args.out, header, rows, cfg)
    if args.out is not None:
        print(f"asymptotic key rate crosses zero at nbar = {crossing:.6f}")
    return 0


def cmd_protocol(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    if args.out is None:
        raise ValueError("protocol needs --out DIRECTORY for its key material")
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    channel = ChannelParams(loss=cfg.channel_loss, noise_photons=cfg.noise_photons)
    codebook = proto.generate_codebook(
        cfg.n_symbols, cfg.chain.codebook_variance, seed=cfg.seed
    )
    record = proto.simulate_transmission(
        codebook,
        cfg.chain,
        channel,
        seed=cfg.seed + 1,
        announce_bases=bool(args.announce_bases),
    )
    proto.write_key_records(record, outdir / "key.csv")
    manifest = proto.key_manifest(codebook, record, cfg.chain, channel, cfg.seed + 1)
    manifest["config"] = cfg.to_dict()
    _write_json(outdir / "manifest.json", manifest)

    alpha, beta = proto.sift(record)
    n_ec = max(1, round(cfg.n_ec_fraction * (cfg.n_symbols // 2)))
    estimate = proto.estimate_channel(alpha[n_ec:], beta[n_ec:], cfg.chain)
    report = security.build_report(
        cfg.chain,
        estimate=estimate,
        n_ec=n_ec,
        extra_inputs={
            "codebook_seed": cfg.seed,
            "transmission_seed": cfg.seed + 1,
            "n_matched": int(alpha.size),
            "config": cfg.to_dict(),
        },
        **_report_kwargs(cfg),
    )

    slope, variance = response_and_noise(cfg.chain, channel, matched=True)
    mi_emp = stats.empirical_mutual_information(alpha, beta)
    mi_sigma = stats.bootstrap_mi_sigma(alpha, beta, seed=cfg.seed + 2)
    hist = stats.build_histogram(beta)
    overlap = stats.histogram_vs_gaussian(
        hist, 0.0, slope**2 * cfg.chain.codebook_variance + variance
    )
    payload = report.to_dict()
    payload["empirical"] = {
        "n_matched": int(alpha.size),
        "mutual_information_bits": mi_emp,
        "mutual_information_sigma": mi_sigma,
        "bhattacharyya_vs_model": overlap,
        "hellinger_vs_model": stats.hellinger_from_coefficient(overlap),
    }
    _write_json(outdir / "report.json", payload)

    dens = hist.densities()
    rows = [
        (float(hist.bin_edges[i]), float(hist.bin_edges[i + 1]), int(c), float(d))
        for i, (c, d) in enumerate(zip(hist.counts, dens))
    ]
    _write_csv(outdir / "histogram.csv", ("bin_lo", "bin_hi", "count", "density"), rows, cfg)

    print(f"matched symbols: {alpha.size} of {cfg.n_symbols}")
    print(f"estimated loss: {estimate.loss:.6f} +- {estimate.loss_sigma:.6f}")
    print(
        f"estimated noise: {estimate.noise_photons:.6f}"
        f" +- {estimate.noise_sigma:.6f} photons"
    )
    print(f"empirical mutual information: {mi_emp:.4f} bits (sigma {mi_sigma:.4f})")
    print(f"composite key: {report.finite_size.bits_per_raw_symbol:.6f} bits/raw symbol")
    return 0


def cmd_linkbudget(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    medium = lb.MEDIA[cfg.medium]
    grid = cfg.occupancies if cfg.occupancies is not None else DEFAULT_OCCUPANCY_GRID
    occupancies = sorted(set(grid) | {medium.background_photons})
    table = lb.sweep_occupancy(cfg.chain, occupancies, medium.attenuation_db_per_m)

    eps_max = lb.max_tolerable_loss(cfg.chain, medium.background_photons)
    distance = lb.distance_limit(cfg.chain, medium)
    channel = ChannelParams(
        loss=cfg.channel_loss, noise_photons=cfg.channel_loss * medium.background_photons / 2.0
    )
    rate = lb.raw_key_rate(cfg.chain, channel, cfg.bandwidth_hz)

    if (args.out_format or "csv") == "json":
        payload = {
            "config": cfg.to_dict(),
            "medium": asdict(medium),
            "max_tolerable_loss": eps_max,
            "distance_limit_m": distance,
            "raw_key_rate_bits_per_s": rate,
            "rows": [
                {"nbar_th": o, "eps_max": e, "distance_m": d} for o, e, d in table
            ],
        }
        _write_json(args.out, payload)
    else:
        _write_csv(args.out, ("nbar_th", "eps_max", "distance_m"), table, cfg)
    if args.out is not None:
        print(f"medium: {medium.label}")
        print(f"max tolerable loss: {eps_max:.6f}")
        print(f"distance limit: {distance:.1f} m")
        print(f"raw key rate at configured loss: {rate:.1f} bit/s")
    return 0


def cmd_report(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    channel = ChannelParams(loss=cfg.channel_loss, noise_photons=cfg.noise_photons)
    n_ec = max(1, round(cfg.n_ec_fraction * (cfg.n_symbols // 2)))
    report = security.build_report(
        cfg.chain,
        channel,
        n_ec=n_ec,
        extra_inputs={"config": cfg.to_dict()},
        **_report_kwargs(cfg),
    )
    _write_json(args.out, report.to_dict())
    return 0


_COMMANDS = {
    "sweep": cmd_sweep,
    "protocol": cmd_protocol,
    "linkbudget": cmd_linkbudget,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return _COMMANDS[args.command](cfg, args)
    except InsufficientDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
