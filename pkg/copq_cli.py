"""
COPQ bench command-line interface.

Usage:
    python copq_cli.py gen --problem tsp --n 4 --seed 7 --out tsp4.txt
    python copq_cli.py encode --problem qap --n 3 --seed 1 --out h.json
    python copq_cli.py solve --problem tsp --n 4 --method sa --sa "0.01,10,0.8,10"
    python copq_cli.py bench --problem tsp --n 3 --method sa --trials 30 --seed 1
    python copq_cli.py verify

Exit codes: 0 success, 1 validation error, 2 capability error.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

# Load environment variables from .env file FIRST
from dotenv import load_dotenv
load_dotenv()

from config import Config, get_config
from models.experiment import METHODS, VQE_FORMS, ExperimentConfig
from models.instance import PROBLEM_KINDS, ProblemInstance
from models.results import SaConfig, SpsaConfig
from services.experiment_runner import check_capability, prepare_variational, run_experiment, run_trial
from services.instance_loader import INSTANCE_FORMATS, parse_instance, random_instance, write_instance
from services.ising_encoder import build_model
from services.oracle_suite import MAX_VERIFY_SIZE, run_oracle_suite, verify
from services.presets import preset_overrides
from services.report_writer import REPORT_FORMATS, emit_report, render_csv, report_dict
from utils.error_handler import EXIT_OK, EXIT_VALIDATION, ValidationError, handle_errors
from utils.logger import attach_handlers, setup_logging


class CliParser(argparse.ArgumentParser):
    """ArgumentParser that exits with the validation code on usage errors."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _write_or_print(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    target = Path(out)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding='utf-8')
    except OSError as e:
        raise ValidationError(f"cannot write {target}", details=str(e))
    print(f"wrote {target}")


def _load_instance(args) -> ProblemInstance:
    """Instance from --instance when given, otherwise random from (problem, n, seed)."""
    if args.instance:
        return parse_instance(args.instance, args.instance_format, args.problem)
    if args.n is None:
        raise ValidationError("--n is required unless --instance is given")
    return random_instance(args.problem, args.n, args.seed)


def _experiment_config(args, inst: Optional[ProblemInstance] = None, trials: int = 1) -> ExperimentConfig:
    n = inst.n if inst is not None else args.n
    if n is None:
        raise ValidationError("--n is required unless --instance is given")

    kwargs = {}
    if getattr(args, 'preset', False):
        kwargs.update(preset_overrides(args.problem, n, args.method))
    if args.sa is not None:
        kwargs['sa'] = SaConfig.parse(args.sa)
    if args.spsa_maxiter is not None:
        kwargs['spsa'] = SpsaConfig(maxiter=args.spsa_maxiter)
    if args.form is not None:
        kwargs['form'] = args.form

    return ExperimentConfig(
        problem=args.problem,
        n=n,
        method=args.method,
        trials=trials,
        seed_base=args.seed,
        shots=args.shots,
        reps=args.reps,
        p=args.p,
        penalty=args.penalty,
        exact_objective=args.exact_objective,
        warm_start=not args.no_warm_start,
        instance=inst,
        optimum=getattr(args, 'optimum', None),
        workers=getattr(args, 'workers', Config.DEFAULT_WORKERS),
        **kwargs
    )


@handle_errors()
def cmd_gen(args) -> int:
    if args.n is None:
        raise ValidationError("gen needs --n")
    if args.out is None:
        raise ValidationError("gen needs --out")
    inst = random_instance(args.problem, args.n, args.seed)
    write_instance(inst, args.out)
    print(f"wrote {inst!r} to {args.out}")
    return EXIT_OK


@handle_errors()
def cmd_encode(args) -> int:
    inst = _load_instance(args)
    _, h = build_model(inst, args.penalty)
    _write_or_print(h.to_json() + '\n', args.out)
    return EXIT_OK


@handle_errors()
def cmd_solve(args) -> int:
    inst = _load_instance(args) if args.instance else None
    cfg = _experiment_config(args, inst)
    check_capability(cfg, need_optimum=False)
    if inst is None:
        inst = random_instance(cfg.problem, cfg.n, cfg.seed_base)

    h, initial_point, _ = prepare_variational(cfg, inst)
    record = run_trial(cfg, inst, 0, h, initial_point)
    payload = record.to_dict(include_timing=True)
    if args.show_distribution and record.distribution is not None:
        payload['distribution'] = record.distribution.to_dict()
    _write_or_print(json.dumps(payload, indent=2) + '\n', args.out)
    return EXIT_OK


@handle_errors()
def cmd_bench(args) -> int:
    inst = _load_instance(args) if args.instance else None
    cfg = _experiment_config(args, inst, trials=args.trials)
    result = run_experiment(cfg)

    if args.out is not None:
        emit_report(result, args.format, args.out)
        print(f"wrote {args.format} report to {args.out}")
    elif args.format == 'json':
        sys.stdout.write(json.dumps(report_dict(result), indent=2) + '\n')
    else:
        sys.stdout.write(render_csv([result]))
    return EXIT_OK


@handle_errors()
def cmd_verify(args) -> int:
    n_max = args.n if args.n is not None else MAX_VERIFY_SIZE
    if n_max > MAX_VERIFY_SIZE:
        raise ValidationError(f"verify runs for n <= {MAX_VERIFY_SIZE}, got {n_max}")
    if args.keep_going:
        results = run_oracle_suite(n_max, args.seed)
    else:
        results = verify(n_max, args.seed)
    for result in results:
        status = 'PASS' if result.passed else 'FAIL'
        print(f"{status} {result.name}" + (f": {result.detail}" if result.detail else ''))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--problem', choices=PROBLEM_KINDS, default='tsp', help='Problem family')
    common.add_argument('--n', type=int, default=None, help='Instance size')
    common.add_argument('--seed', type=int, default=0, help='Instance / base trial seed')
    common.add_argument('--out', default=None, help='Output path (stdout when omitted)')
    common.add_argument('--log-level', default=None,
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'])
    common.add_argument('--instance', default=None, help='Read the instance from a file')
    common.add_argument('--instance-format', choices=INSTANCE_FORMATS, default='matrix')
    common.add_argument('--penalty', type=float, default=None, help='Constraint weight A/B')
    return common


def _method_parser() -> argparse.ArgumentParser:
    method = argparse.ArgumentParser(add_help=False)
    method.add_argument('--method', choices=METHODS, required=True)
    method.add_argument('--shots', type=int, default=Config.DEFAULT_SHOTS)
    method.add_argument('--form', choices=VQE_FORMS, default=None, help='VQE variational form')
    method.add_argument('--reps', type=int, default=Config.DEFAULT_VQE_REPS)
    method.add_argument('--p', type=int, default=Config.DEFAULT_QAOA_P, help='QAOA depth')
    method.add_argument('--spsa-maxiter', type=int, default=None)
    method.add_argument('--sa', default=None, metavar='TOL,LEN,COOL,T0')
    method.add_argument('--exact-objective', action='store_true',
                        help='Optimise the statevector expectation instead of sampled estimates')
    method.add_argument('--no-warm-start', action='store_true')
    return method


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    method = _method_parser()

    parser = CliParser(prog='copq', description='TSP/QAP benchmark on classical and simulated quantum solvers')
    subparsers = parser.add_subparsers(dest='command', parser_class=CliParser)
    subparsers.required = True

    gen = subparsers.add_parser('gen', parents=[common], help='Write a random instance')
    gen.set_defaults(handler=cmd_gen)

    encode = subparsers.add_parser('encode', parents=[common], help='Instance to Ising Hamiltonian JSON')
    encode.set_defaults(handler=cmd_encode)

    solve = subparsers.add_parser('solve', parents=[common, method], help='Single run of one method')
    solve.add_argument('--show-distribution', action='store_true')
    solve.set_defaults(handler=cmd_solve)

    bench = subparsers.add_parser('bench', parents=[common, method], help='Full experiment to a report')
    bench.add_argument('--trials', type=int, default=Config.DEFAULT_TRIALS)
    bench.add_argument('--format', choices=REPORT_FORMATS, default='csv')
    bench.add_argument('--preset', action='store_true', help='Use the per-size benchmark parameters')
    bench.add_argument('--optimum', type=float, default=None, help='Known optimum (skips brute force)')
    bench.add_argument('--workers', type=int, default=Config.DEFAULT_WORKERS)
    bench.set_defaults(handler=cmd_bench)

    verify_cmd = subparsers.add_parser('verify', parents=[common], help='Oracle-equivalence suite (n <= 4, default 4)')
    verify_cmd.add_argument('--keep-going', action='store_true', help='Report every check instead of stopping')
    verify_cmd.set_defaults(handler=cmd_verify)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    settings = get_config()
    logger = setup_logging(
        'copq',
        log_dir=settings.LOG_DIR,
        log_level=args.log_level or settings.LOG_LEVEL,
        file_output=settings.LOG_TO_FILE,
        max_bytes=settings.LOG_MAX_BYTES,
        backup_count=settings.LOG_BACKUP_COUNT,
    )
    attach_handlers(logger, 'services', 'models', 'utils', '__main__')
    logger.debug(f"Running {args.command}")
    return args.handler(args)


if __name__ == '__main__':
    sys.exit(main())
