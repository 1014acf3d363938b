"""Binary Fourier single-pixel imaging simulator: entry point.

Subcommands: gen-patterns, simulate, reconstruct, metrics, color, dynamic,
pipeline, plan-report. Settings come from an optional JSON --config file
and are overridden by flags named after the same keys.
"""

import argparse
import logging
import sys

import experiment
from core.config import DETECTOR_KEYS, ExperimentConfig
from core.errors import FSIError

logger = logging.getLogger(__name__)

COMMANDS = {
    "gen-patterns": (experiment.cmd_gen_patterns, "write the plan and the binary pattern pack"),
    "simulate": (experiment.cmd_simulate, "acquire a scene with the simulated detector"),
    "reconstruct": (experiment.cmd_reconstruct, "reconstruct from plan + measurement files"),
    "metrics": (experiment.cmd_metrics, "RMSE/PSNR of an image against a reference"),
    "color": (experiment.cmd_color, "three-channel acquisition and colour image"),
    "dynamic": (experiment.cmd_dynamic, "spiral acquisition of every frame in a directory"),
    "pipeline": (experiment.cmd_pipeline, "simulate then reconstruct"),
    "plan-report": (experiment.cmd_plan_report, "planning arithmetic only"),
}


def _flag(parser, key: str, **kwargs):
    parser.add_argument("--" + key.replace("_", "-"), dest=key, default=None, **kwargs)


def _add_config_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--log-level", default="WARNING",
                   choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    _flag(p, "image_size", type=int, help="logical image size N (even)")
    _flag(p, "strategy", choices=["full", "spiral"])
    _flag(p, "coefficients", type=int, help="spiral coefficient count m")
    _flag(p, "schedule", choices=["three-step", "four-step"])
    _flag(p, "illumination_rate", type=float, help="patterns per second R")
    _flag(p, "mean_a", type=float)
    _flag(p, "contrast_b", type=float)
    _flag(p, "upsample_k", type=int)
    _flag(p, "upsample_mode", choices=["bicubic", "analytic", "nearest"])
    p.add_argument("--grayscale", dest="binary", action="store_const", const=False, default=None,
                   help="illuminate with grayscale instead of dithered patterns")
    p.add_argument("--serpentine", dest="serpentine", action="store_const", const=True, default=None)
    p.add_argument("--ideal-detector", dest="ideal_detector", action="store_const",
                   const=True, default=None)
    for key in DETECTOR_KEYS:
        _flag(p, key, type=float)
    _flag(p, "scene")
    p.add_argument("--scenes", dest="scenes", nargs=3, default=None, metavar=("R", "G", "B"))
    _flag(p, "frames_dir")
    _flag(p, "reference")
    _flag(p, "image")
    p.add_argument("--plan", dest="plan_path", default=None)
    p.add_argument("--measurements", dest="measurements_path", default=None)
    _flag(p, "output_dir")
    _flag(p, "seed", type=int)
    _flag(p, "maxval", type=int, choices=[255, 65535])
    _flag(p, "trace_patterns", type=int)
    p.add_argument("--vary-frame-seed", dest="vary_frame_seed", action="store_const",
                   const=True, default=None)
    _flag(p, "ram_bytes", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="binfsi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        _add_config_flags(sub.add_parser(name, help=help_text))
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    config = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    overrides = {k: v for k, v in vars(args).items()
                 if k not in ("command", "config", "log_level")}
    return config.with_overrides(overrides)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=args.log_level, format="%(levelname)s %(name)s: %(message)s",
                        force=True)
    command, _ = COMMANDS[args.command]
    logger.debug("running %s", args.command)
    try:
        command(load_config(args).validate())
    except (FSIError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
