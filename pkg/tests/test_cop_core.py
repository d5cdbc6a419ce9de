"""
Tests for instances, cost functions, the brute-force oracle and the
instance file formats.
"""
import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from models.instance import (
    QapInstance, TspInstance, instance_from_dict, validate_permutation, validate_prefix
)
from services.cost_model import brute_force_optimum, qap_cost, rotate, solution_cost, tour_cost
from services.instance_loader import parse_instance, random_instance, write_instance
from utils.error_handler import ParseError, SizeLimitError, ValidationError


class TestInstances:
    def test_matrix_must_be_square(self):
        with pytest.raises(ValidationError):
            TspInstance(d=[[0, 1, 2], [1, 0, 3]])

    def test_negative_entries_rejected(self):
        with pytest.raises(ValidationError):
            TspInstance(d=[[0, -1], [1, 0]])

    def test_nonzero_diagonal_rejected(self):
        with pytest.raises(ValidationError):
            TspInstance(d=[[1, 1], [1, 0]])

    def test_non_finite_rejected(self):
        with pytest.raises(ValidationError):
            TspInstance(d=[[0, np.inf], [1, 0]])

    def test_qap_shapes_must_match(self):
        with pytest.raises(ValidationError):
            QapInstance(b=np.zeros((2, 2)), c=np.zeros((3, 3)))

    def test_matrices_are_read_only(self, uniform_tsp3):
        with pytest.raises(ValueError):
            uniform_tsp3.d[0, 1] = 7

    def test_to_dict_round_trip(self, qap3):
        assert instance_from_dict(qap3.to_dict()) == qap3

    def test_validate_permutation(self):
        assert validate_permutation([2, 0, 1], 3) == (2, 0, 1)
        with pytest.raises(ValidationError):
            validate_permutation([0, 0, 1], 3)
        with pytest.raises(ValidationError):
            validate_permutation([0, 1], 3)

    def test_validate_prefix(self):
        assert validate_prefix([], 3) == ()
        with pytest.raises(ValidationError):
            validate_prefix([0, 3], 3)


class TestCosts:
    def test_uniform_tour_costs_n(self, uniform_tsp3):
        for pi in itertools.permutations(range(3)):
            assert tour_cost(uniform_tsp3, pi) == 3

    def test_two_city_tour_uses_edge_twice(self):
        inst = TspInstance(d=[[0, 5], [5, 0]])
        assert tour_cost(inst, (0, 1)) == 10

    def test_zero_flow_costs_nothing(self):
        inst = QapInstance(b=np.zeros((3, 3)), c=np.ones((3, 3)) - np.eye(3))
        for pi in itertools.permutations(range(3)):
            assert qap_cost(inst, pi) == 0

    def test_pair_qap(self, pair_qap):
        assert qap_cost(pair_qap, (0, 1)) == 6

    def test_invalid_permutation(self, square_tsp4):
        with pytest.raises(ValidationError):
            tour_cost(square_tsp4, (0, 1, 1, 2))

    def test_solution_cost_dispatch(self, square_tsp4, pair_qap):
        assert solution_cost(square_tsp4, (0, 1, 2, 3)) == 4
        assert solution_cost(pair_qap, (1, 0)) == 6

    @given(st.integers(0, 10_000), st.integers(0, 5))
    def test_rotation_keeps_tour_length(self, seed, k):
        inst = random_instance('tsp', 5, seed)
        pi = tuple(np.random.default_rng(seed).permutation(5))
        assert tour_cost(inst, rotate(pi, k)) == pytest.approx(tour_cost(inst, pi))


class TestBruteForce:
    def test_uniform_tie_breaks_lexicographically(self, uniform_tsp3):
        assert brute_force_optimum(uniform_tsp3) == ((0, 1, 2), 3.0)

    def test_uniform_qap_all_tie(self):
        ones = np.ones((3, 3)) - np.eye(3)
        inst = QapInstance(b=ones, c=ones)
        costs = {qap_cost(inst, pi) for pi in itertools.permutations(range(3))}
        assert costs == {6.0}
        assert brute_force_optimum(inst) == ((0, 1, 2), 6.0)

    @pytest.mark.parametrize('kind', ['tsp', 'qap'])
    def test_matches_independent_enumeration(self, kind):
        inst = random_instance(kind, 4, 3)
        expected = min(solution_cost(inst, pi) for pi in itertools.permutations(range(4)))
        pi, cost = brute_force_optimum(inst)
        assert cost == expected
        assert solution_cost(inst, pi) == cost

    @pytest.mark.parametrize('kind,cost_fn', [('tsp', tour_cost), ('qap', qap_cost)])
    @pytest.mark.parametrize('n', [5, 6])
    def test_no_random_permutation_beats_the_optimum(self, kind, cost_fn, n):
        inst = random_instance(kind, n, 40 + n)
        _, optimum = brute_force_optimum(inst)
        rng = np.random.default_rng(n)
        sampled = [cost_fn(inst, tuple(int(v) for v in rng.permutation(n))) for _ in range(1000)]
        assert optimum <= min(sampled)

    def test_square(self, square_tsp4):
        assert brute_force_optimum(square_tsp4)[1] == 4

    def test_size_guard(self):
        inst = random_instance('tsp', 10, 0)
        with pytest.raises(SizeLimitError):
            brute_force_optimum(inst)


class TestRandomInstance:
    def test_deterministic(self):
        assert random_instance('tsp', 3, 42) == random_instance('tsp', 3, 42)
        assert random_instance('tsp', 3, 42).d.tobytes() == random_instance('tsp', 3, 42).d.tobytes()

    def test_qap_symmetric_zero_diagonal(self):
        inst = random_instance('qap', 4, 7)
        assert inst.symmetric
        assert not np.diag(inst.b).any() and not np.diag(inst.c).any()

    def test_entry_range(self):
        d = random_instance('tsp', 5, 1).d
        off = d[~np.eye(5, dtype=bool)]
        assert off.min() >= 1 and off.max() <= 10

    def test_name_carries_signature(self):
        assert random_instance('qap', 3, 5).name == 'qap-n3-s5'

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValidationError):
            random_instance('vrp', 3, 0)
        with pytest.raises(ValidationError):
            random_instance('tsp', 1, 0)


class TestParsing:
    def test_matrix_tsp(self, tmp_path):
        path = tmp_path / 'u3.txt'
        path.write_text("3\n0 1 1\n1 0 1\n1 1 0\n")
        inst = parse_instance(path)
        assert isinstance(inst, TspInstance)
        assert inst == TspInstance(d=np.ones((3, 3)) - np.eye(3))
        assert inst.name == 'u3'

    def test_qaplib(self, tmp_path):
        path = tmp_path / 'tiny.dat'
        path.write_text("2\n\n0 1\n1 0\n\n0 3\n3 0\n")
        inst = parse_instance(path, fmt='qaplib')
        assert isinstance(inst, QapInstance)
        assert qap_cost(inst, (0, 1)) == 6

    def test_tsplib_full_matrix(self, tmp_path):
        path = tmp_path / 'tiny.tsp'
        path.write_text(
            "NAME : tiny\nTYPE : TSP\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EXPLICIT\n"
            "EDGE_WEIGHT_FORMAT : FULL_MATRIX\nEDGE_WEIGHT_SECTION\n0 2 3\n2 0 4\n3 4 0\nEOF\n"
        )
        inst = parse_instance(path, fmt='tsplib')
        assert inst.name == 'tiny'
        assert tour_cost(inst, (0, 1, 2)) == 9

    def test_tsplib_rejects_coordinates(self, tmp_path):
        path = tmp_path / 'coords.tsp'
        path.write_text("DIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\nEDGE_WEIGHT_SECTION\n")
        with pytest.raises(ParseError):
            parse_instance(path, fmt='tsplib')

    def test_truncated_file_reports_position(self, tmp_path):
        path = tmp_path / 'short.txt'
        path.write_text("3\n0 1 1\n1 0 1\n1 1\n")
        with pytest.raises(ParseError) as info:
            parse_instance(path)
        assert info.value.line == 4

    def test_truncated_qaplib(self, tmp_path):
        path = tmp_path / 'short.dat'
        path.write_text("2\n0 1\n1 0\n0 3\n")
        with pytest.raises(ParseError):
            parse_instance(path, fmt='qaplib')

    def test_non_numeric_token(self, tmp_path):
        path = tmp_path / 'bad.txt'
        path.write_text("2\n0 x\n1 0\n")
        with pytest.raises(ParseError) as info:
            parse_instance(path)
        assert (info.value.line, info.value.column) == (2, 3)

    def test_qap_hint_on_a_tsp_sized_file_is_truncated(self, tmp_path):
        path = tmp_path / 'u3.txt'
        path.write_text("3\n0 1 1\n1 0 1\n1 1 0\n")
        with pytest.raises(ParseError) as info:
            parse_instance(path, kind='qap')
        assert 'unexpected end of file' in info.value.message

    def test_tag_and_hint_mismatch(self, tmp_path):
        path = tmp_path / 'u3.txt'
        path.write_text("tsp 3\n0 1 1\n1 0 1\n1 1 0\n")
        with pytest.raises(ValidationError):
            parse_instance(path, kind='qap')

    def test_tagged_tsp(self, tmp_path):
        path = tmp_path / 'u3.txt'
        path.write_text("TSP 3\n0 1 1\n1 0 1\n1 1 0\n\n")
        assert parse_instance(path) == TspInstance(d=np.ones((3, 3)) - np.eye(3))

    def test_tagged_qap_cut_after_flow_block(self, tmp_path):
        path = tmp_path / 'cut.txt'
        path.write_text("qap 2\n0 1\n1 0\n")
        with pytest.raises(ParseError) as info:
            parse_instance(path)
        assert info.value.line == 3
        assert 'found 2 matrix rows' in info.value.message

    def test_untagged_qap_cut_after_separator_is_ambiguous(self, tmp_path):
        path = tmp_path / 'cut.txt'
        path.write_text("2\n0 1\n1 0\n\n")
        with pytest.raises(ParseError) as info:
            parse_instance(path)
        assert 'ambiguous layout' in info.value.message

    def test_unknown_tag(self, tmp_path):
        path = tmp_path / 'bad.txt'
        path.write_text("vrp 2\n0 1\n1 0\n")
        with pytest.raises(ParseError) as info:
            parse_instance(path)
        assert (info.value.line, info.value.column) == (1, 1)

    def test_tsplib_rejects_nonzero_diagonal(self, tmp_path):
        path = tmp_path / 'diag.tsp'
        path.write_text(
            "DIMENSION : 3\nEDGE_WEIGHT_TYPE : EXPLICIT\nEDGE_WEIGHT_FORMAT : FULL_MATRIX\n"
            "EDGE_WEIGHT_SECTION\n0 2 3\n2 9999 4\n3 4 0\nEOF\n"
        )
        with pytest.raises(ParseError) as info:
            parse_instance(path, fmt='tsplib')
        assert (info.value.line, info.value.column) == (6, 3)
        assert '9999' in info.value.message

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValidationError):
            parse_instance(tmp_path / 'x', fmt='xml')

    @pytest.mark.parametrize('kind', ['tsp', 'qap'])
    def test_write_then_parse(self, tmp_path, kind):
        inst = random_instance(kind, 4, 9)
        path = write_instance(inst, tmp_path / f'{kind}.txt')
        assert path.read_text().splitlines()[0] == f'{kind} 4'
        assert parse_instance(path, kind=kind) == inst
        assert parse_instance(path) == inst
