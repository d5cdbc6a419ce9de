"""
JSON and CSV experiment reports.

JSON layout (schema_version 1.0):
    schema_version, config, instance, optimum, success_rule, summary,
    trials, timing
Everything outside `timing` is a deterministic function of the
experiment configuration.
"""
import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple, Union

from config import Config
from models.experiment import ExperimentResult, MetricsSummary
from utils.error_handler import ReportError

logger = logging.getLogger(__name__)

REPORT_FORMATS = ('json', 'csv')

CSV_COLUMNS = [
    'problem', 'n', 'method', 'par', 'sr99', 'sr95', 'feas', 'at_s', 'mt_s',
    'n_feas', 'unc_mean', 'unc_max', 'unc_min', 'unc_std',
]


def _check_records(result: ExperimentResult) -> None:
    if not result.records:
        raise ReportError("refusing to write a report without trial records")


def report_dict(result: ExperimentResult) -> Dict[str, Any]:
    """JSON-ready report of one experiment."""
    _check_records(result)
    summary = result.summary
    trials = []
    for record in result.records:
        entry = record.to_dict(include_timing=False)
        if record.distribution is not None:
            entry['distribution'] = record.distribution.to_dict()
        trials.append(entry)

    return {
        'schema_version': Config.REPORT_SCHEMA_VERSION,
        'config': result.config.to_dict(),
        'instance': result.instance.to_dict(),
        'optimum': result.optimum,
        'success_rule': summary.success_rule,
        'summary': summary.to_dict(include_timing=False),
        'trials': trials,
        'timing': {
            'trial_elapsed_s': [r.elapsed for r in result.records],
            'at_s': summary.at_seconds,
            'mt_s': summary.mt_seconds,
            'warm_start_s': result.warm_start_seconds,
        },
    }


def csv_row(result: ExperimentResult) -> Dict[str, str]:
    cfg, summary = result.config, result.summary
    row = {
        'problem': cfg.problem,
        'n': str(cfg.n),
        'method': cfg.method,
        'par': cfg.par_label(),
        'sr99': f"{summary.sr99:.1f}",
        'sr95': f"{summary.sr95:.1f}",
        'feas': f"{summary.feasibility:.1f}",
        'at_s': f"{summary.at_seconds:.6f}",
        'mt_s': f"{summary.mt_seconds:.6f}",
    }
    row.update(summary.uncertainty.formatted())
    return row


def render_csv(results: Sequence[ExperimentResult]) -> str:
    """CSV text with one row per experiment."""
    if not results:
        raise ReportError("refusing to write a CSV report without experiments")
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator='\n')
    writer.writeheader()
    for result in results:
        _check_records(result)
        writer.writerow(csv_row(result))
    return buffer.getvalue()


def _write(text: str, path: Union[str, Path]) -> Path:
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
    except OSError as e:
        raise ReportError("cannot write report", path=str(target), details=str(e))
    logger.info(f"Report written to {target}")
    return target


def write_csv(results: Sequence[ExperimentResult], path: Union[str, Path]) -> Path:
    return _write(render_csv(results), path)


def emit_report(result: ExperimentResult, fmt: str, path: Union[str, Path]) -> Path:
    """
    Write one experiment as JSON or CSV.

    Raises:
        ReportError: empty record list (no file is written) or I/O failure
    """
    if fmt not in REPORT_FORMATS:
        raise ReportError(f"unknown report format {fmt!r}", details=f"expected one of {REPORT_FORMATS}")
    if fmt == 'json':
        text = json.dumps(report_dict(result), indent=2) + '\n'
    else:
        text = render_csv([result])
    return _write(text, path)


def load_report(path: Union[str, Path]) -> Tuple[MetricsSummary, Dict[str, Any]]:
    """
    Read a JSON report back.

    Returns:
        (summary including AT/MT from the timing section, full report dict)
    """
    source = Path(path)
    try:
        data = json.loads(source.read_text(encoding='utf-8'))
    except OSError as e:
        raise ReportError("cannot read report", path=str(source), details=str(e))
    except json.JSONDecodeError as e:
        raise ReportError("report is not valid JSON", path=str(source), details=str(e))

    version = data.get('schema_version')
    if version != Config.REPORT_SCHEMA_VERSION:
        raise ReportError(
            f"unsupported report schema {version!r}", path=str(source),
            details=f"expected {Config.REPORT_SCHEMA_VERSION}"
        )
    summary = MetricsSummary.from_dict(data['summary'], data.get('timing'))
    return summary, data


def trial_dicts(data: Dict[str, Any]) -> List[Dict[str, Any]]:
    """Per-trial entries of a loaded report with their elapsed times merged back in."""
    elapsed = data.get('timing', {}).get('trial_elapsed_s', [])
    trials = [dict(t) for t in data.get('trials', [])]
    for entry, seconds in zip(trials, elapsed):
        entry['elapsed_s'] = seconds
    return trials
