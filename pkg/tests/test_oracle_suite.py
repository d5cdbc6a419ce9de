"""
Tests for the oracle-equivalence suite.
"""
import numpy as np
import pytest

from models.circuit import GateKind
from models.results import SolveResult
from services import oracle_suite
from services.instance_loader import random_instance
from services.oracle_suite import (
    MAX_VERIFY_SIZE, CheckResult, check_bnb, check_penalty_dominance, check_transpiler, penalty_gap,
    random_circuit, run_oracle_suite, verify
)
from utils.error_handler import ValidationError, VerificationError


def test_every_check_passes():
    results = run_oracle_suite(3, seed=0)
    assert [r.name for r in results] == [
        'spectrum', 'penalty_dominance', 'ground_state', 'decode_roundtrip', 'bnb', 'transpiler'
    ]
    assert all(r.passed for r in results)


@pytest.mark.slow
def test_every_check_passes_at_n4():
    assert all(r.passed for r in verify(4, seed=9))


@pytest.mark.parametrize('n_max', [1, 5])
def test_size_guard(n_max):
    with pytest.raises(ValidationError):
        run_oracle_suite(n_max)


def test_failure_is_reported(monkeypatch):
    def wrong_bnb(inst):
        return SolveResult(pi=tuple(range(inst.n)), cost=-1.0, elapsed=0.0)

    monkeypatch.setattr(oracle_suite, 'bnb_solve', wrong_bnb)
    result = check_bnb(3, seed=0, seeds_per_size=1)
    assert result == CheckResult('bnb', False, result.detail)
    assert 'BNB -1.0' in result.detail

    results = run_oracle_suite(3, seed=0)
    assert [r.name for r in results if not r.passed] == ['bnb']
    with pytest.raises(VerificationError) as info:
        verify(3, seed=0)
    assert info.value.code == 'VERIFICATION_FAILED'


def test_transpiler_check_with_more_circuits():
    assert check_transpiler(seed=42, n_circuits=60).passed


def test_random_circuit_is_bound():
    rng = np.random.default_rng(3)
    circuit = random_circuit(1, 30, rng)
    assert circuit.width == 1 and len(circuit.gates) == 30
    assert all(g.kind.n_qubits == 1 for g in circuit.gates)
    assert circuit.num_parameters == 0
    assert any(g.kind == GateKind.RY for g in random_circuit(3, 200, rng).gates)


def test_default_size_covers_n4(monkeypatch):
    seen = []

    def record(name):
        def check(n_max, seed, *args):
            seen.append((name, n_max))
            return CheckResult(name, True)
        return check

    for name in ('spectrum', 'penalty_dominance', 'ground_state', 'decode_roundtrip', 'bnb'):
        monkeypatch.setattr(oracle_suite, f"check_{name}", record(name))
    monkeypatch.setattr(oracle_suite, 'check_transpiler', lambda seed: CheckResult('transpiler', True))

    assert MAX_VERIFY_SIZE == 4
    assert all(r.passed for r in verify())
    assert {n_max for _, n_max in seen} == {4}
    assert len(seen) == 5


class TestPenaltyDominance:
    @pytest.mark.parametrize('kind', ['tsp', 'qap'])
    @pytest.mark.parametrize('seed', [0, 5, 17])
    def test_sampled_at_n4(self, kind, seed):
        assert penalty_gap(random_instance(kind, 4, seed), samples=2000, seed=seed) > 0

    @pytest.mark.parametrize('kind', ['tsp', 'qap'])
    def test_sample_never_undercuts_exhaustive(self, kind):
        inst = random_instance(kind, 3, 2)
        exhaustive = penalty_gap(inst)
        assert exhaustive > 0
        assert penalty_gap(inst, samples=64, seed=1) >= exhaustive

    def test_check_runs_through_n4(self):
        assert check_penalty_dominance(4, seed=3, samples=1000).passed

    def test_weak_penalty_is_caught(self, monkeypatch):
        real_build = oracle_suite.build_model
        monkeypatch.setattr(oracle_suite, 'build_model', lambda inst: real_build(inst, 1e-6))
        assert penalty_gap(random_instance('tsp', 4, 0), samples=100) <= 0
        result = check_penalty_dominance(4, seed=0, samples=100)
        assert not result.passed
        assert 'penalty gap' in result.detail
