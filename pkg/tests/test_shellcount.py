"""
Unit tests for lattice-shell counts — recurrence, ball counts, large shells.
"""
import math

import numpy as np
import pytest

from latsum.config import settings
from latsum.errors import DomainError, ResourceLimitError
from latsum.pipeline.shellcount import (
    ball_count,
    build_shell_table,
    combine_tables,
    find_large_shells,
    shell_layer_count,
)
from tests.conftest import brute_force_counts


def _is_three_square_exception(n: int) -> bool:
    while n > 0 and n % 4 == 0:
        n //= 4
    return n % 8 == 7


# =====================================================================
# Table construction
# =====================================================================
class TestBuildShellTable:
    def test_unit_shell(self):
        assert build_shell_table(3, 1).counts.tolist() == [1, 6]

    def test_first_ten_shells(self):
        table = build_shell_table(3, 9)
        assert table.counts.tolist() == [1, 6, 12, 8, 6, 24, 24, 0, 12, 30]

    def test_one_dimension(self):
        assert build_shell_table(1, 4).counts.tolist() == [1, 2, 0, 0, 2]

    def test_empty_range(self):
        table = build_shell_table(2, 0)
        assert table.max_n == 0
        assert table.counts.tolist() == [1]

    def test_rejects_zero_dimension(self):
        with pytest.raises(DomainError):
            build_shell_table(0, 10)

    def test_memory_ceiling(self, monkeypatch):
        monkeypatch.setattr(settings, "LATSUM_MAX_TABLE_ENTRIES", 100)
        with pytest.raises(ResourceLimitError):
            build_shell_table(3, 100)

    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    def test_matches_enumeration(self, d):
        table = build_shell_table(d, 200)
        np.testing.assert_array_equal(table.counts, brute_force_counts(d, 200))

    def test_parity_and_origin(self, r3_table):
        assert r3_table.counts[0] == 1
        assert np.all(r3_table.counts[1:] % 2 == 0)

    def test_table_is_read_only(self):
        table = build_shell_table(3, 10)
        with pytest.raises(ValueError):
            table.counts[1] = 0

    def test_independent_of_thread_count(self):
        serial = build_shell_table(3, 5000, threads=1)
        parallel = build_shell_table(3, 5000, threads=4)
        np.testing.assert_array_equal(serial.counts, parallel.counts)


# =====================================================================
# Three-square theorem
# =====================================================================
class TestThreeSquares:
    def test_zero_pattern(self, r3_table):
        for n in range(10_001):
            assert (r3_table.counts[n] == 0) == _is_three_square_exception(n), n


# =====================================================================
# Ball counts
# =====================================================================
class TestBallCount:
    def test_unit_ball(self, r3_table):
        assert ball_count(r3_table, 1) == 7

    def test_radius_three(self, r3_table):
        assert ball_count(r3_table, 9) == 123

    def test_origin_only(self, r3_table):
        assert ball_count(r3_table, 0) == 1
        assert ball_count(build_shell_table(1, 0), 0) == 1

    def test_out_of_range(self, r3_table):
        with pytest.raises(IndexError):
            ball_count(r3_table, r3_table.max_n + 1)
        with pytest.raises(IndexError):
            ball_count(r3_table, -1)

    def test_gauss_bound(self, r3_table):
        running = np.cumsum(r3_table.counts[:5001].astype(np.int64))
        n = np.arange(1, 5001)
        volume = 4.0 / 3.0 * math.pi * n**1.5
        assert np.all(np.abs(running[1:] - volume) <= 20 * n)

    def test_layer_count(self, r3_table):
        assert shell_layer_count(r3_table, 1, 3) == 6 + 12 + 8
        assert shell_layer_count(r3_table, 0, 9) == ball_count(r3_table, 9)
        with pytest.raises(IndexError):
            shell_layer_count(r3_table, 5, 4)


# =====================================================================
# Large shells
# =====================================================================
class TestFindLargeShells:
    def test_contains_five(self, r3_table):
        small = build_shell_table(3, 100)
        assert 5 in find_large_shells(small, 2.0)

    def test_empty_for_huge_c(self):
        assert find_large_shells(build_shell_table(3, 10), 1000.0) == []

    def test_nonempty_up_to_5000(self):
        hits = find_large_shells(build_shell_table(3, 5000), 2.0)
        assert hits
        assert hits == sorted(hits)

    def test_requires_three_dimensions(self):
        with pytest.raises(DomainError):
            find_large_shells(build_shell_table(2, 10), 1.0)


# =====================================================================
# Dimension consistency
# =====================================================================
class TestCombineTables:
    @pytest.mark.parametrize("d", [3, 4])
    def test_convolution_matches_recurrence(self, d):
        lower = build_shell_table(d - 2, 500)
        r2 = build_shell_table(2, 500)
        combined = combine_tables(lower, r2)
        assert combined.dim == d
        np.testing.assert_array_equal(combined.counts, build_shell_table(d, 500).counts)

    def test_truncates_to_shorter_table(self):
        combined = combine_tables(build_shell_table(1, 50), build_shell_table(2, 20))
        assert combined.max_n == 20
