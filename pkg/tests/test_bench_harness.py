"""
Tests for experiment configuration, presets, the experiment runner and
report output.
"""
import json

import pytest

from models.experiment import ExperimentConfig
from models.results import SaConfig, SpsaConfig
from services.experiment_runner import check_capability, run_experiment
from services.instance_loader import random_instance
from services.presets import get_preset, preset_overrides, preset_sizes
from services.report_writer import (
    CSV_COLUMNS, emit_report, load_report, render_csv, report_dict, trial_dicts, write_csv
)
from utils.error_handler import CapabilityError, ReportError, SizeLimitError, ValidationError


@pytest.fixture
def sa_result():
    cfg = ExperimentConfig(problem='tsp', n=4, method='sa', trials=6, seed_base=3, sa=SaConfig(0.01, 10, 0.8, 10))
    return run_experiment(cfg, show_progress=False)


class TestExperimentConfig:
    def test_defaults(self):
        cfg = ExperimentConfig(problem='qap', n=3, method='bnb')
        assert cfg.trials == 30 and cfg.shots == 1024
        assert cfg.trial_seed(4) == 4
        assert cfg.width == 9

    @pytest.mark.parametrize('kwargs', [
        {'problem': 'vrp'}, {'method': 'dqn'}, {'trials': 0}, {'n': 1},
        {'seed_base': -1}, {'shots': 0}, {'form': 'qaoa'}, {'penalty': 0.0}, {'workers': 0},
    ])
    def test_rejects(self, kwargs):
        base = {'problem': 'tsp', 'n': 3, 'method': 'sa'}
        base.update(kwargs)
        with pytest.raises(ValidationError):
            ExperimentConfig(**base)

    def test_instance_sets_size(self):
        inst = random_instance('tsp', 5, 0)
        assert ExperimentConfig(problem='tsp', n=3, method='bnb', instance=inst).n == 5
        with pytest.raises(ValidationError):
            ExperimentConfig(problem='qap', n=5, method='bnb', instance=inst)

    def test_par_labels(self):
        assert ExperimentConfig('tsp', 3, 'sa').par_label() == '[0.01, 10, 0.8, 10]'
        assert ExperimentConfig('tsp', 5, 'vqe', spsa=SpsaConfig(5500), form='real_amplitudes').par_label() == '[5500, RA]'
        assert ExperimentConfig('tsp', 3, 'qaoa', spsa=SpsaConfig(50)).par_label() == '[50]'
        assert ExperimentConfig('tsp', 3, 'bnb').par_label() == '-'


class TestPresets:
    def test_table_entries(self):
        assert get_preset('tsp', 5, 'vqe') == [5500, 'RA']
        assert get_preset('qap', 7, 'sa') == [1.0, 20, 0.90, 740]
        assert get_preset('tsp', 7, 'qaoa') is None
        assert preset_sizes('qap', 'qaoa') == [3, 4]

    def test_overrides(self):
        assert preset_overrides('tsp', 4, 'sa') == {'sa': SaConfig(0.01, 10, 0.8, 10)}
        assert preset_overrides('tsp', 5, 'vqe') == {'spsa': SpsaConfig(5500), 'form': 'real_amplitudes'}
        assert preset_overrides('qap', 3, 'qaoa') == {'spsa': SpsaConfig(100)}

    def test_missing_preset(self):
        with pytest.raises(ValidationError):
            preset_overrides('tsp', 9, 'qaoa')


class TestCapability:
    def test_width_cap(self, max_qubits):
        max_qubits(16)
        with pytest.raises(SizeLimitError) as info:
            check_capability(ExperimentConfig('tsp', 5, 'vqe'))
        assert info.value.exit_code == 2

    def test_oracle_needed_beyond_brute_force(self):
        with pytest.raises(CapabilityError):
            check_capability(ExperimentConfig('tsp', 10, 'sa'))
        check_capability(ExperimentConfig('tsp', 10, 'sa', optimum=100.0))
        check_capability(ExperimentConfig('tsp', 10, 'sa'), need_optimum=False)

    def test_bnb_cap(self):
        with pytest.raises(SizeLimitError):
            check_capability(ExperimentConfig('tsp', 13, 'bnb', optimum=1.0))


class TestRunExperiment:
    def test_bnb_is_always_right(self):
        for kind in ('tsp', 'qap'):
            result = run_experiment(ExperimentConfig(kind, 5, 'bnb', trials=3), show_progress=False)
            summary = result.summary
            assert (summary.sr99, summary.sr95, summary.feasibility) == (100.0, 100.0, 100.0)

    def test_sa_tsp3(self):
        cfg = ExperimentConfig('tsp', 3, 'sa', trials=30, seed_base=1)
        assert run_experiment(cfg, show_progress=False).summary.sr99 == 100.0

    def test_records_ordered_by_trial(self, sa_result):
        assert [r.seed for r in sa_result.records] == [3, 4, 5, 6, 7, 8]
        assert all(r.cost >= sa_result.optimum for r in sa_result.records)

    def test_worker_pool_gives_same_records(self, sa_result):
        cfg = ExperimentConfig('tsp', 4, 'sa', trials=6, seed_base=3, workers=3)
        pooled = run_experiment(cfg, show_progress=False)
        assert [r.to_dict(include_timing=False) for r in pooled.records] == \
            [r.to_dict(include_timing=False) for r in sa_result.records]

    def test_supplied_instance_and_optimum(self):
        inst = random_instance('qap', 4, 77)
        cfg = ExperimentConfig('qap', 4, 'sa', trials=2, instance=inst, optimum=1.0)
        result = run_experiment(cfg, show_progress=False)
        assert result.instance == inst and result.optimum == 1.0

    def test_vqe_experiment(self):
        cfg = ExperimentConfig('tsp', 2, 'vqe', trials=2, shots=64, spsa=SpsaConfig(maxiter=3))
        result = run_experiment(cfg, show_progress=False)
        assert len(result.records) == 2
        assert result.warm_start_seconds > 0
        assert all(r.distribution is not None for r in result.records)

    @pytest.mark.slow
    def test_vqe_simulator_row_qap(self):
        cfg = ExperimentConfig('qap', 3, 'vqe', trials=30, spsa=SpsaConfig(maxiter=1000))
        assert run_experiment(cfg, show_progress=False).summary.feasibility == 100.0


class TestReports:
    def test_csv_header(self, sa_result):
        text = render_csv([sa_result])
        lines = text.splitlines()
        assert lines[0] == 'problem,n,method,par,sr99,sr95,feas,at_s,mt_s,n_feas,unc_mean,unc_max,unc_min,unc_std'
        assert lines[0].split(',') == CSV_COLUMNS
        assert lines[1].startswith('tsp,4,sa,"[0.01, 10, 0.8, 10]",')
        assert lines[1].endswith(',6,100.00,100.00,100.00,0.00')

    def test_json_round_trip(self, sa_result, tmp_path):
        path = emit_report(sa_result, 'json', tmp_path / 'r.json')
        summary, data = load_report(path)
        assert summary == sa_result.summary
        assert data['schema_version'] == '1.0'
        trials = trial_dicts(data)
        assert [t['elapsed_s'] for t in trials] == [r.elapsed for r in sa_result.records]

    def test_timing_lives_in_its_own_section(self, sa_result):
        data = report_dict(sa_result)
        assert 'at_s' not in data['summary']
        assert all('elapsed_s' not in t for t in data['trials'])
        assert set(data['timing']) == {'trial_elapsed_s', 'at_s', 'mt_s', 'warm_start_s'}

    def test_deterministic_apart_from_timing(self, sa_result):
        cfg = sa_result.config
        again = run_experiment(cfg, show_progress=False)
        first, second = report_dict(sa_result), report_dict(again)
        first.pop('timing')
        second.pop('timing')
        assert json.dumps(first, indent=2) == json.dumps(second, indent=2)

    def test_empty_records_write_nothing(self, sa_result, tmp_path):
        sa_result.records = []
        target = tmp_path / 'empty.json'
        with pytest.raises(ReportError):
            emit_report(sa_result, 'json', target)
        assert not target.exists()

    def test_unknown_format(self, sa_result, tmp_path):
        with pytest.raises(ReportError):
            emit_report(sa_result, 'xml', tmp_path / 'r.xml')

    def test_unwritable_path(self, sa_result, tmp_path):
        blocker = tmp_path / 'file'
        blocker.write_text('x')
        with pytest.raises(ReportError) as info:
            write_csv([sa_result], blocker / 'r.csv')
        assert info.value.path == str(blocker / 'r.csv')

    def test_schema_mismatch(self, tmp_path):
        path = tmp_path / 'old.json'
        path.write_text(json.dumps({'schema_version': '0.1'}))
        with pytest.raises(ReportError):
            load_report(path)
