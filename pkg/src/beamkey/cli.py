"""Command-line entry point.

Subcommands: rate-calc, exp1, exp2, exp3, platoon, sweep-demo. Each accepts
--config (TOML or JSON) plus overrides for seed/trials/output; without a
config the shipped defaults for that scenario kind are used. Validation
failures exit nonzero with a machine-readable error category on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

from . import harness
from .scenarios import ConfigError, default_config, parse_config


def _load(kind: str, args) -> "ScenarioConfig":
    if args.config:
        cfg = parse_config(args.config)
        if cfg.kind != kind:
            raise ConfigError(f"config is for kind {cfg.kind!r}, not {kind!r}")
    else:
        cfg = default_config(kind)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.trials is not None:
        cfg = replace(cfg, trials=args.trials)
    if args.out is not None:
        cfg = replace(cfg, output_dir=args.out)
    if getattr(args, "resolution", None) is not None:
        cfg = replace(cfg, grid=replace(cfg.grid, resolution=args.resolution))
    geom_overrides = {}
    for name in ("d", "theta_deg", "n"):
        value = getattr(args, name, None)
        if value is not None:
            geom_overrides[name] = value
    if geom_overrides:
        cfg = replace(cfg, geometry=replace(cfg.geometry, **geom_overrides))
    return cfg


def _common_flags(sub, with_geometry=()):
    sub.add_argument("--config", help="scenario config file (.toml or .json)")
    sub.add_argument("--seed", type=int, default=None, help="override the RNG seed")
    sub.add_argument("--trials", type=int, default=None, help="override Monte Carlo trials per cell")
    sub.add_argument("--out", default=None, help="output directory (default from config)")
    if "resolution" in with_geometry:
        sub.add_argument("--resolution", type=float, default=None, help="grid cell edge length (m)")
    if "d" in with_geometry:
        sub.add_argument("--d", type=float, default=None, help="station-to-mobile distance (m)")
    if "theta" in with_geometry:
        sub.add_argument("--theta-deg", type=float, default=None, dest="theta_deg", help="station separation angle (deg)")
    if "n" in with_geometry:
        sub.add_argument("--n", type=int, default=None, help="number of stations")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beamkey",
        description="Erasure-based secret-key establishment over directional mmWave links",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    rate = subs.add_parser("rate-calc", help="wiretap-code rate algebra and threshold solving")
    rate.add_argument("--config", help="scenario config file")
    rate.add_argument("--bandwidth-hz", type=float, default=None)
    rate.add_argument("--th1-db", type=float, default=None)
    rate.add_argument("--th2-db", type=float, default=None)
    rate.add_argument("--decoding-rate-bps", type=float, default=None)
    rate.add_argument("--r-max-bps", type=float, default=None)
    rate.add_argument("--out", default=None)
    rate.add_argument("--seed", type=int, default=None)
    rate.add_argument("--trials", type=int, default=None)

    _common_flags(subs.add_parser("exp1", help="two stations on a circle"), ("resolution", "d", "theta"))
    _common_flags(subs.add_parser("exp2", help="n equiangular stations"), ("resolution", "d", "n"))
    _common_flags(subs.add_parser("exp3", help="fixed deployment, mobile varies"), ("resolution",))
    _common_flags(subs.add_parser("platoon", help="two-car platoon links"), ("resolution",))
    _common_flags(subs.add_parser("sweep-demo", help="one beam sweep with key extraction"), ("d", "n"))
    return parser


def _rate_cfg(args):
    from .scenarios import CodeConfig

    if args.config:
        cfg = parse_config(args.config)
    else:
        cfg = default_config("rate-calc")
    code_kwargs = {}
    if args.th1_db is not None or args.th2_db is not None:
        if args.th1_db is None or args.th2_db is None:
            raise ConfigError("both --th1-db and --th2-db are required together")
        code_kwargs = {"th1_db": args.th1_db, "th2_db": args.th2_db, "beacon_rate_bps": None, "r_max_bps": None}
    elif args.decoding_rate_bps is not None or args.r_max_bps is not None:
        if args.decoding_rate_bps is None or args.r_max_bps is None:
            raise ConfigError("both --decoding-rate-bps and --r-max-bps are required together")
        code_kwargs = {"beacon_rate_bps": args.decoding_rate_bps, "r_max_bps": args.r_max_bps}
    if args.bandwidth_hz is not None:
        code_kwargs["bandwidth_hz"] = args.bandwidth_hz
    if code_kwargs:
        base = cfg.code.__dict__ | code_kwargs
        cfg = replace(cfg, code=CodeConfig(**base))
    if args.out is not None:
        cfg = replace(cfg, output_dir=args.out)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "rate-calc":
            cfg = _rate_cfg(args)
            report = harness.run_rate_calc(cfg)
            paths = harness.emit_report(report, cfg.output_dir)
        elif args.command == "exp1":
            cfg = _load("exp1", args)
            (report, emap, region), secs = harness.timed(harness.run_exp1, cfg)
            paths = harness.emit_report(report, cfg.output_dir, emap, {"insecure_area": region})
            print(f"exp1: IA = {region.measure:.3f} m^2 over {emap.grid.n_cells} cells ({secs:.1f}s)")
        elif args.command == "exp2":
            cfg = _load("exp2", args)
            (report, emap, region), secs = harness.timed(harness.run_exp2, cfg)
            paths = harness.emit_report(report, cfg.output_dir, emap, {"insecure_area": region})
            print(f"exp2: IA = {region.measure:.3f} m^2 over {emap.grid.n_cells} cells ({secs:.1f}s)")
        elif args.command == "exp3":
            cfg = _load("exp3", args)
            (report, emap, region), secs = harness.timed(harness.run_exp3, cfg)
            regions = {"insecure_area": region} if region is not None else {}
            paths = harness.emit_report(report, cfg.output_dir, emap, regions)
            print(f"exp3: max IA = {report.data['max_insecure_area_m2']:.3f} m^2 ({secs:.1f}s)")
        elif args.command == "platoon":
            cfg = _load("platoon", args)
            (report, regions), secs = harness.timed(harness.run_platoon, cfg)
            paths = harness.emit_report(report, cfg.output_dir, None, regions)
            vols = report.data["insecure_volume_m3"]
            print(
                f"platoon: volumes link1={vols['link1']:.3f} link2={vols['link2']:.3f} "
                f"intersection={vols['intersection']:.3f} m^3; key rate "
                f"{report.data['key_rate_bps'] / 1e6:.1f} Mbps ({secs:.1f}s)"
            )
        elif args.command == "sweep-demo":
            cfg = _load("sweep-demo", args)
            os.makedirs(cfg.output_dir, exist_ok=True)
            transcript = os.path.join(cfg.output_dir, "transcript.json")
            report = harness.run_sweep_demo(cfg, transcript_path=transcript)
            paths = harness.emit_report(report, cfg.output_dir)
            key = report.data["key"]
            print(
                f"sweep-demo: {len(report.data['mobile_decoded'])} frames decoded, "
                f"{len(report.data['eve_intercepted'])} intercepted; key: "
                f"{key['key_bits']} bits" if key["extracted"] else "sweep-demo: no key extractable"
            )
        else:  # pragma: no cover - argparse enforces the choices
            parser.error(f"unknown command {args.command!r}")
        print(f"wrote {paths['report']}")
        return 0
    except ConfigError as exc:
        json.dump({"error": {"category": exc.category, "message": str(exc)}}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    except (ValueError, OSError) as exc:
        category = "io" if isinstance(exc, OSError) else "invalid-input"
        json.dump({"error": {"category": category, "message": str(exc)}}, sys.stderr)
        sys.stderr.write("\n")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
