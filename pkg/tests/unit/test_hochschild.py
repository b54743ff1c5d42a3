"""
Unit tests for Hochschild chain and cochain complexes
"""
import pytest

from src.models.exceptions import DegreeError, ResourceLimitExceeded
from src.models.matrix import SparseMatrix
from src.services.hochschild_service import (
    HochschildModel, boundary_b, boundary_bprime, center_dimension, cochain_delta, cyclic_N, cyclic_t,
    hh0_via_commutators, hochschild_cohomology, hochschild_homology, hochschild_report, map_degrees,
)
from src.utils.io import ALGEBRAS, list_fixtures, load_algebra


def dims(spaces):
    return [h.dim for h in spaces]


class TestChainIdentities:
    """Test the operator identities on chains"""

    @pytest.mark.parametrize("name", ["dual_numbers", "kxk", "t2", "m2"])
    def test_b_squared(self, name):
        """Test b b = 0 and b' b' = 0 through degree 4"""
        a = load_algebra(name)
        for n in range(2, 5):
            assert (boundary_b(a, n - 1) @ boundary_b(a, n)).is_zero()
            assert (boundary_bprime(a, n - 1) @ boundary_bprime(a, n)).is_zero()

    @pytest.mark.parametrize("name", ["dual_numbers", "t2"])
    def test_cyclic_relations(self, name):
        """Test t^(n+1) = 1, (1-t) b' = b (1-t) and N b = b' N"""
        a = load_algebra(name)
        for n in range(1, 4):
            t = cyclic_t(a, n)
            power = SparseMatrix.identity(a.field, t.nrows)
            for _ in range(n + 1):
                power = t @ power
            assert power == SparseMatrix.identity(a.field, t.nrows)

            one_minus = lambda k: SparseMatrix.identity(a.field, cyclic_t(a, k).nrows) - cyclic_t(a, k)  # noqa: E731
            assert one_minus(n - 1) @ boundary_bprime(a, n) == boundary_b(a, n) @ one_minus(n)
            assert cyclic_N(a, n - 1) @ boundary_b(a, n) == boundary_bprime(a, n) @ cyclic_N(a, n)

    @pytest.mark.parametrize("name", ["dual_numbers", "kxk", "t2"])
    def test_delta_squared(self, name):
        """Test delta delta = 0 on C^0..C^2"""
        a = load_algebra(name)
        for n in range(3):
            assert (cochain_delta(a, n + 1) @ cochain_delta(a, n)).is_zero()

    def test_normalized_b_squared(self, a3_zigzag):
        """Test b b = 0 on the normalized complex"""
        for n in range(2, 4):
            assert (boundary_b(a3_zigzag, n - 1, normalized=True) @ boundary_b(a3_zigzag, n, normalized=True)).is_zero()

    def test_dual_numbers_boundary_example(self, dual_numbers):
        """Test b(x (x) x) = x x - x x = 0 and b(1 (x) x) = x - x = 0"""
        b1 = boundary_b(dual_numbers, 1)
        model = HochschildModel(dual_numbers)
        assert b1.apply(model.chain_vector(1, {(1, 1): dual_numbers.field.one})) == {}
        assert b1.apply(model.chain_vector(1, {(0, 1): dual_numbers.field.one})) == {}

    def test_no_boundary_out_of_degree_zero(self, dual_numbers):
        """Test b_0 is refused"""
        with pytest.raises(DegreeError):
            boundary_b(dual_numbers, 0)


SWEEP_DIM = 50_000
SWEEP_ALGEBRAS = [name for name in list_fixtures()[ALGEBRAS] if name not in ("malformed", "nonassociative")]


def sweep_top(a, extra=0):
    """Largest degree n <= 5 with dim(A)^(n + 1 + extra) inside the sweep budget"""
    return max(n for n in range(1, 6) if a.dim ** (n + 1 + extra) <= SWEEP_DIM)


@pytest.mark.slow
class TestIdentitySweep:
    """Test the operator identities on every bundled algebra through degree 5"""

    def test_sweep_covers_bundled_algebras(self):
        """Test the sweep sees every well-formed fixture"""
        assert set(SWEEP_ALGEBRAS) >= {"ground_field", "dual_numbers", "kxk", "t2", "m2", "a3_linear", "a3_zigzag"}

    @pytest.mark.parametrize("name", SWEEP_ALGEBRAS)
    def test_b_and_bprime_squared(self, name):
        """Test b b = 0 and b' b' = 0"""
        a = load_algebra(name)
        model = HochschildModel(a, max_chain_dim=SWEEP_DIM)
        for n in range(2, sweep_top(a) + 1):
            assert (model.b(n - 1) @ model.b(n)).is_zero(), f"b b on C_{n}"
            assert (model.b(n - 1, cyclic_term=False) @ model.b(n, cyclic_term=False)).is_zero(), f"b' b' on C_{n}"

    @pytest.mark.parametrize("name", SWEEP_ALGEBRAS)
    def test_normalized_b_squared(self, name):
        """Test b b = 0 on the normalized complex"""
        a = load_algebra(name)
        model = HochschildModel(a, normalized=True, max_chain_dim=SWEEP_DIM)
        for n in range(2, sweep_top(a) + 1):
            assert (model.b(n - 1) @ model.b(n)).is_zero(), f"normalized b b on C_{n}"

    @pytest.mark.parametrize("name", SWEEP_ALGEBRAS)
    def test_cyclic_relations(self, name):
        """Test t^(n+1) = 1, (1-t) b' = b (1-t) and N b = b' N"""
        a = load_algebra(name)
        model = HochschildModel(a, max_chain_dim=SWEEP_DIM)

        def one_minus_t(k):
            t = model.t(k)
            return SparseMatrix.identity(a.field, t.nrows) - t

        for n in range(1, sweep_top(a) + 1):
            t = model.t(n)
            identity = SparseMatrix.identity(a.field, t.nrows)
            power = identity
            for _ in range(n + 1):
                power = t @ power
            assert power == identity, f"t^{n + 1} on C_{n}"
            assert one_minus_t(n - 1) @ model.b(n, cyclic_term=False) == model.b(n) @ one_minus_t(n), f"C_{n}"
            assert model.norm(n - 1) @ model.b(n) == model.b(n, cyclic_term=False) @ model.norm(n), f"C_{n}"

    @pytest.mark.parametrize("name", SWEEP_ALGEBRAS)
    def test_delta_squared(self, name):
        """Test delta delta = 0 into the largest cochain space inside the budget"""
        a = load_algebra(name)
        model = HochschildModel(a, max_chain_dim=SWEEP_DIM)
        for n in range(sweep_top(a, extra=1)):
            assert (model.delta(n + 1) @ model.delta(n)).is_zero(), f"delta delta on C^{n}"


class TestHomology:
    """Test Hochschild homology and cohomology dimensions"""

    def test_dual_numbers(self, dual_numbers):
        """Test HH of k[x]/x^2 over Q is 2,1,1,1,1"""
        assert dims(hochschild_homology(dual_numbers, 4)) == [2, 1, 1, 1, 1]

    def test_dual_numbers_normalized(self, dual_numbers):
        """Test the normalized complex gives the same dimensions"""
        assert dims(hochschild_homology(dual_numbers, 4, normalized=True)) == [2, 1, 1, 1, 1]

    def test_ground_field(self, ground_field):
        """Test HH of k is k in degree zero"""
        assert dims(hochschild_homology(ground_field, 3)) == [1, 0, 0, 0]

    @pytest.mark.parametrize("name", ["kxk", "t2"])
    def test_separable_and_triangular(self, name):
        """Test HH of k x k and T_2 is 2,0,0,0"""
        assert dims(hochschild_homology(load_algebra(name), 3)) == [2, 0, 0, 0]

    @pytest.mark.parametrize("name", ["a3_linear", "a3_zigzag"])
    def test_a3_orientations(self, name):
        """Test both A_3 path algebras have HH = 3,0,0"""
        assert dims(hochschild_homology(load_algebra(name), 2, normalized=True)) == [3, 0, 0]

    def test_m2_morita(self, m2):
        """Test HH of M_2 matches HH of k"""
        assert dims(hochschild_homology(m2, 2, normalized=True)) == [1, 0, 0]

    def test_dual_numbers_cohomology(self, dual_numbers):
        """Test HH^0, HH^1, HH^2 of the dual numbers over Q"""
        assert dims(hochschild_cohomology(dual_numbers, 2)) == [2, 1, 1]
        assert dims(hochschild_cohomology(dual_numbers, 2, normalized=True)) == [2, 1, 1]

    def test_degree_zero_cross_checks(self, t2):
        """Test HH_0 against A/[A,A] and HH^0 against the center"""
        assert hh0_via_commutators(t2) == 2
        assert center_dimension(t2) == 1
        _, spaces, report = hochschild_report(t2, 2)
        assert report.ok
        assert report.data["hh_dims"] == [2, 0, 0]

    def test_representatives_are_cycles(self, dual_numbers):
        """Test class representatives satisfy b z = 0 and project to unit vectors"""
        spaces = hochschild_homology(dual_numbers, 2)
        for n in (1, 2):
            b = boundary_b(dual_numbers, n)
            for i in range(spaces[n].dim):
                z = spaces[n].representative(i)
                assert b.apply(z) == {}
                assert spaces[n].project(z) == {i: dual_numbers.field.one}

    def test_negative_degree(self, dual_numbers):
        """Test a negative top degree is refused"""
        with pytest.raises(DegreeError):
            hochschild_homology(dual_numbers, -1)


class TestLimits:
    """Test the resource cap and per-degree parallelism"""

    def test_chain_cap(self, m2):
        """Test materializing C_3(M_2) above the cap raises"""
        with pytest.raises(ResourceLimitExceeded):
            hochschild_homology(m2, 3, max_chain_dim=100)

    def test_threads_keep_order(self):
        """Test the thread pool returns results in degree order"""
        assert map_degrees(lambda n: n * n, range(6), threads=3) == [0, 1, 4, 9, 16, 25]

    def test_threads_env(self, dual_numbers, monkeypatch):
        """Test TTCALC_THREADS does not change the answer"""
        monkeypatch.setenv("TTCALC_THREADS", "4")
        assert dims(hochschild_homology(dual_numbers, 3)) == [2, 1, 1, 1]
