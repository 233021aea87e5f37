"""
Command-line interface.

    phenocalc occupancy --uniform --n 4
    phenocalc condition --constant 1/2 --r 3 --s 2
    phenocalc posterior --urn 12 4 6 2/3 1/3 --evidence WWWWWW
    phenocalc limit --urn 12 4 6 2/3 1/3 --posterior-limit 1/3
    phenocalc sample --constant 1/2 --n 100 --trials 10000 --interval 0.4 0.6 --seed 42

Results go to standard output as JSON (or CSV with --output csv); errors go to standard error as
JSON, with exit status 2 for malformed input and 3 for questions the calculus cannot answer.
"""
import argparse
import json
import logging
import sys

from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from phenocalc.src import export
from phenocalc.src.config import load_settings, settings
from phenocalc.src.errors import PhenocalcError, SpecParseError
from phenocalc.src.limitdist import limiting_cdf, sampled_cdf, theorem1_interval
from phenocalc.src.mixtures import (
    atomic_mixture,
    constant_phenomenon,
    limit_thresholds,
    mixture_of_hypotheses,
    near_threshold,
    posterior_limit,
    posterior_trajectory,
    uniform_phenomenon,
    urn_scenario,
)
from phenocalc.src.occupancy import occupancy_row
from phenocalc.src.operators import condition_evidence
from phenocalc.src.primitives.evidence import EvidenceCount, parse_outcomes
from phenocalc.src.primitives.hypotheses import HypothesisModel
from phenocalc.src.primitives.phenomenon import MomentSequence, Phenomenon, phenomenon_from_dict
from phenocalc.src.primitives.scalar import Scalar, parse_scalar, render_decimal, to_json_value
from phenocalc.src.sampler import monte_carlo_theorem1

logger = logging.getLogger(__name__)


class CliConfig(BaseModel):
    """Global options of one invocation: configuration file values overridden by flags."""

    model_config = ConfigDict(frozen=True)

    backend: Literal["exact", "float"] = "exact"
    depth: int = Field(64, ge=0)
    seed: Optional[int] = Field(None, ge=0, lt=2 ** 64)
    output: Literal["json", "csv"] = "json"
    precision: int = Field(6, ge=1, le=17)
    log_level: str = "WARNING"

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "CliConfig":
        base = load_settings(args.config) if args.config else settings
        overrides = {
            key: getattr(args, key)
            for key in ("backend", "depth", "seed", "output", "precision", "log_level")
            if getattr(args, key) is not None
        }
        defaults = {
            "backend": base.backend,
            "depth": base.depth,
            "seed": base.seed,
            "output": base.output,
            "precision": base.precision,
            "log_level": base.log_level,
        }
        return cls(**{**defaults, **overrides})


def _scalar(value: Scalar, config: CliConfig):
    if isinstance(value, float):
        return round(value, config.precision)
    return to_json_value(value)


def _with_decimal(value: Scalar, config: CliConfig) -> Dict[str, Any]:
    return {"value": to_json_value(value), "decimal": render_decimal(value, config.precision)}


def _parse_atoms(text: str, config: CliConfig) -> List[tuple]:
    atoms = []
    for item in text.split(","):
        if not item.strip():
            continue
        if ":" not in item:
            raise SpecParseError(f"Atoms are written p:w, got {item!r}.")
        p, w = item.split(":", 1)
        atoms.append((parse_scalar(p, config.backend), parse_scalar(w, config.backend)))
    if not atoms:
        raise SpecParseError("No atoms given.")
    return atoms


def _read_spec_file(path: str) -> dict:
    try:
        with open(path, 'r', encoding="utf-8") as spec_file:
            return json.load(spec_file)
    except OSError as e:
        raise SpecParseError(f"Could not read {path}: {e}")
    except json.JSONDecodeError as e:
        raise SpecParseError(f"{path} is not valid JSON: {e}")


def _urn(args: argparse.Namespace, config: CliConfig) -> HypothesisModel:
    N, H, n, alpha, beta = args.urn
    try:
        N, H, n = int(N), int(H), int(n)
    except ValueError as e:
        raise SpecParseError(f"Urn sizes must be integers: {e}")
    return urn_scenario(N, H, n, alpha, beta, backend=config.backend)


def load_source(args: argparse.Namespace, config: CliConfig) -> Union[Phenomenon, HypothesisModel]:
    """The phenomenon or hypothesis model named by --spec, --constant, --uniform, --atoms or --urn."""
    if args.urn is not None:
        return _urn(args, config)
    if args.constant is not None:
        return constant_phenomenon(parse_scalar(args.constant, config.backend), config.backend)
    if args.uniform:
        return uniform_phenomenon(config.depth, config.backend)
    if args.atoms is not None:
        return atomic_mixture(_parse_atoms(args.atoms, config), config.backend)
    if args.spec is not None:
        data = _read_spec_file(args.spec)
        if isinstance(data, dict) and data.get("kind") == "hypotheses":
            return HypothesisModel.from_dict(data)
        ph = phenomenon_from_dict(data)
        if isinstance(ph, MomentSequence) and ph.depth > config.depth:
            ph = ph.truncate(config.depth)
        return ph
    raise SpecParseError("Name a phenomenon with --spec, --constant, --uniform, --atoms or --urn.")


def load_phenomenon(args: argparse.Namespace, config: CliConfig) -> Phenomenon:
    source = load_source(args, config)
    if isinstance(source, HypothesisModel):
        return mixture_of_hypotheses(source)
    return source


def load_model(args: argparse.Namespace, config: CliConfig) -> HypothesisModel:
    source = load_source(args, config)
    if isinstance(source, HypothesisModel):
        return source
    return HypothesisModel.from_pairs([("phenomenon", source, 1)])


def _evidence(args: argparse.Namespace) -> EvidenceCount:
    if getattr(args, "evidence", None):
        return EvidenceCount.from_outcomes(parse_outcomes(args.evidence))
    return EvidenceCount(r=args.r, s=args.s)


def cmd_occupancy(args: argparse.Namespace, config: CliConfig) -> str:
    row = occupancy_row(load_phenomenon(args, config), args.n)
    if config.output == "csv":
        return export.occupancy_csv(row, config.precision)
    return _dump({"n": row.n, "backend": row.backend, "probs": [_scalar(p, config) for p in row.probs]})


def cmd_condition(args: argparse.Namespace, config: CliConfig) -> str:
    ph = condition_evidence(load_phenomenon(args, config), _evidence(args))
    return _dump(ph.to_dict())


def cmd_posterior(args: argparse.Namespace, config: CliConfig) -> str:
    model = load_model(args, config)
    steps = posterior_trajectory(model, parse_outcomes(args.evidence or ""))
    if config.output == "csv":
        return export.posterior_csv(steps, config.precision)
    trace = [
        {
            "step": step.step,
            "outcome": None if step.outcome is None else ("W" if step.outcome else "B"),
            "r": step.evidence.r,
            "s": step.evidence.s,
            "posteriors": {label: _with_decimal(w, config) for label, w in step.posteriors},
            "predictive": _with_decimal(step.predictive, config),
        }
        for step in steps
    ]
    return _dump({"labels": model.labels, "steps": trace, "final": trace[-1]})


def cmd_limit(args: argparse.Namespace, config: CliConfig) -> str:
    if args.posterior_limit is not None:
        model = load_model(args, config)
        f = parse_scalar(args.posterior_limit)
        threshold = near_threshold(model, f)
        if threshold is not None:
            logger.warning(f"f={args.posterior_limit} is within {settings.near_tie_tolerance} of the threshold "
                           f"{threshold.frequency} between atoms {threshold.lower} and {threshold.upper}.")
        limits = posterior_limit(model, f)
        return _dump({
            "f": to_json_value(f),
            "limits": {label: _with_decimal(w, config) for label, w in limits},
            "near_tie": None if threshold is None else {
                "lower": to_json_value(threshold.lower),
                "upper": to_json_value(threshold.upper),
                "frequency": threshold.frequency,
            },
            "thresholds": [
                {"lower": to_json_value(t.lower), "upper": to_json_value(t.upper), "frequency": t.frequency}
                for t in limit_thresholds(model)
            ],
        })

    ph = load_phenomenon(args, config)
    if args.interval is not None:
        xi1, xi2 = (parse_scalar(x, config.backend) for x in args.interval)
        if args.n is None:
            cdf = limiting_cdf(ph)
            limit = cdf.evaluate(xi2) - cdf.evaluate(xi1)
            return _dump({"xi1": to_json_value(xi1), "xi2": to_json_value(xi2), "limit": _with_decimal(limit, config)})
        report = theorem1_interval(ph, xi1, xi2, args.n)
        return _dump({
            "n": report.n,
            "xi1": to_json_value(report.lower),
            "xi2": to_json_value(report.upper),
            "midpoint": _scalar(report.midpoint, config),
            "half_open": _scalar(report.half_open, config),
            "limit": None if report.limit is None else _with_decimal(report.limit, config),
        })

    if args.cdf_grid:
        cdf = sampled_cdf(ph, args.n, args.points) if args.n is not None else limiting_cdf(ph)
        if config.output == "csv":
            return export.cdf_csv(cdf, config.precision)
        return _dump(cdf.to_dict())
    raise SpecParseError("limit needs one of --interval, --cdf-grid or --posterior-limit.")


def cmd_sample(args: argparse.Namespace, config: CliConfig) -> str:
    report = monte_carlo_theorem1(
        load_phenomenon(args, config),
        args.n,
        args.trials,
        parse_scalar(args.interval[0], config.backend),
        parse_scalar(args.interval[1], config.backend),
        seed=config.seed,
        workers=args.workers,
    )
    data = report.to_dict()
    data["empirical"] = round(data["empirical"], config.precision)
    data["stderr"] = round(data["stderr"], config.precision)
    return _dump(data)


def _dump(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


class JsonErrorParser(argparse.ArgumentParser):
    """Raises SpecParseError on bad arguments instead of printing usage; subcommand parsers inherit it."""

    def error(self, message: str):
        raise SpecParseError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    options = common.add_argument_group("global options")
    options.add_argument("--backend", choices=["exact", "float"], default=None, help="Arithmetic backend")
    options.add_argument("--depth", type=int, default=None, help="Moment budget for moment-sequence inputs")
    options.add_argument("--output", choices=["json", "csv"], default=None, help="Output format")
    options.add_argument("--precision", type=int, default=None, help="Decimal places for rendered values")
    options.add_argument("--seed", type=int, default=None, help="Seed for sampling")
    options.add_argument("--log-level", dest="log_level", default=None, help="Logging level on standard error")
    options.add_argument("--config", default=None, help="Configuration file to read defaults from")

    source = common.add_argument_group("phenomenon")
    chosen = source.add_mutually_exclusive_group()
    chosen.add_argument("--spec", help="JSON file with a phenomenon or hypotheses spec")
    chosen.add_argument("--constant", help="Constant probability p, e.g. 1/2")
    chosen.add_argument("--uniform", action="store_true", help="All frequencies equally likely")
    chosen.add_argument("--atoms", help='Atomic mixture written "p:w,p:w"')
    chosen.add_argument("--urn", nargs=5, metavar=("N", "H", "n", "ALPHA", "BETA"), help="Two-hypothesis urn model")

    parser = JsonErrorParser(prog="phenocalc", description="Calculus of exchangeable binary phenomena.")
    commands = parser.add_subparsers(dest="command", required=True)

    occupancy = commands.add_parser("occupancy", parents=[common], help="Distribution of successes in n trials")
    occupancy.add_argument("--n", type=int, required=True)
    occupancy.set_defaults(handler=cmd_occupancy)

    condition = commands.add_parser("condition", parents=[common], help="Phenomenon after observed evidence")
    condition.add_argument("--r", type=int, default=0, help="Observed successes")
    condition.add_argument("--s", type=int, default=0, help="Observed failures")
    condition.add_argument("--evidence", help="Draw record such as WWB, instead of --r/--s")
    condition.set_defaults(handler=cmd_condition)

    posterior = commands.add_parser("posterior", parents=[common], help="Posterior of each hypothesis along draws")
    posterior.add_argument("--evidence", default="", help="Draw record such as WWBWBB")
    posterior.set_defaults(handler=cmd_posterior)

    limit = commands.add_parser("limit", parents=[common], help="Limiting distribution of the frequency")
    limit.add_argument("--interval", nargs=2, metavar=("XI1", "XI2"))
    limit.add_argument("--cdf-grid", dest="cdf_grid", action="store_true")
    limit.add_argument("--posterior-limit", dest="posterior_limit", metavar="F")
    limit.add_argument("--n", type=int, default=None, help="Trials for finite-n diagnostics")
    limit.add_argument("--points", type=int, default=None, help="Grid points for --cdf-grid")
    limit.set_defaults(handler=cmd_limit)

    sample = commands.add_parser("sample", parents=[common], help="Monte Carlo check of an interval probability")
    sample.add_argument("--n", type=int, required=True)
    sample.add_argument("--trials", type=int, required=True)
    sample.add_argument("--interval", nargs=2, metavar=("XI1", "XI2"), required=True)
    sample.add_argument("--workers", type=int, default=None)
    sample.set_defaults(handler=cmd_sample)
    return parser


def _fail(error: Dict[str, Any], status: int) -> int:
    sys.stderr.write(json.dumps(error, sort_keys=True) + "\n")
    return status


def main(argv: Optional[List[str]] = None) -> int:
    command = None
    try:
        args = build_parser().parse_args(argv)
        command = args.command
        config = CliConfig.from_args(args)
        logging.basicConfig(level=config.log_level.upper(), stream=sys.stderr)
        logger.info(f"Running {args.command} with backend {config.backend}.")
        sys.stdout.write(args.handler(args, config))
    except PhenocalcError as e:
        logger.debug(f"{command or 'argument parsing'} failed: {e.message}")
        return _fail(e.to_dict(), e.exit_status)
    except ValidationError as e:
        return _fail({"error": "ValidationError", "message": str(e)}, 2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
