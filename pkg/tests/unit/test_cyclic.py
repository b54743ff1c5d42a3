"""
Unit tests for mixed complexes, cyclic homology and the SBI sequence
"""
import pytest

from src.models.enums import CyclicModel
from src.models.exceptions import DegreeError
from src.services.cyclic_service import (
    check_mixed_axioms, cone_mixed_complex, cyclic_dimensions, cyclic_homology, mixed_complex,
    mixed_hochschild, normalized_mixed_complex, sbi_maps, total_sizes, verify_sbi,
)
from src.utils.io import ALGEBRAS, list_fixtures, load_algebra


class TestMixedComplexes:
    """Test the cone and normalized models"""

    def test_cone_dimensions(self, dual_numbers):
        """Test M_0 = C_0 and M_n = C_n + C_{n-1}"""
        mc = cone_mixed_complex(dual_numbers, 2)
        assert mc.dims == [2, 6, 12, 24]
        assert mc.top == 3

    def test_normalized_dimensions(self, dual_numbers):
        """Test the normalized model of k[x]/x^2 has dimension 2 in every degree"""
        mc = normalized_mixed_complex(dual_numbers, 3)
        assert mc.dims == [2, 2, 2, 2, 2]

    @pytest.mark.parametrize("model", [CyclicModel.CONE, CyclicModel.NORMALIZED])
    @pytest.mark.parametrize("name", ["ground_field", "dual_numbers", "kxk", "t2"])
    def test_axioms(self, name, model):
        """Test d1 d1 = 0, d2 d2 = 0 and d1 d2 + d2 d1 = 0"""
        report = check_mixed_axioms(mixed_complex(load_algebra(name), 3, model))
        assert report.ok, report.failures()

    def test_norm_mutation_breaks_anticommutation(self, dual_numbers):
        """Test N replaced by N - 2t fails d1 d2 + d2 d1 = 0"""
        report = check_mixed_axioms(cone_mixed_complex(dual_numbers, 2, norm_mutation=True))
        failed = report.get("mixed.anticommute")
        assert failed.status.value == "fail"
        assert failed.witness.startswith("M_")

    def test_mixed_hochschild_matches_hh(self, dual_numbers):
        """Test the d1-homology of the cone is HH"""
        assert [h.dim for h in mixed_hochschild(cone_mixed_complex(dual_numbers, 3), 3)] == [2, 1, 1, 1]

    def test_total_sizes_guard(self, ground_field):
        """Test Tot_n beyond the materialized degree is refused"""
        mc = cone_mixed_complex(ground_field, 1)
        assert total_sizes(mc, 2) == [2, 1]
        with pytest.raises(DegreeError):
            total_sizes(mc, 3)


class TestCyclicHomology:
    """Test HC dimensions"""

    @pytest.mark.parametrize("model", [CyclicModel.CONE, CyclicModel.NORMALIZED])
    def test_ground_field(self, ground_field, model):
        """Test HC of k is 1,0,1,0,1"""
        assert cyclic_dimensions(ground_field, 4, model) == [1, 0, 1, 0, 1]

    @pytest.mark.parametrize("model", [CyclicModel.CONE, CyclicModel.NORMALIZED])
    def test_dual_numbers(self, dual_numbers, model):
        """Test HC of k[x]/x^2 over Q is 2,0,2,0"""
        assert cyclic_dimensions(dual_numbers, 3, model) == [2, 0, 2, 0]

    @pytest.mark.parametrize("name", ["ground_field", "dual_numbers", "kxk", "t2", "m2"])
    def test_hc0_is_hh0(self, name):
        """Test HC_0 = HH_0"""
        mc = cone_mixed_complex(load_algebra(name), 1)
        assert cyclic_homology(mc, 1)[0].dim == mixed_hochschild(mc, 1)[0].dim

    def test_kxk_doubles_k(self, kxk):
        """Test HC of k x k is twice HC of k"""
        assert cyclic_dimensions(kxk, 3) == [2, 0, 2, 0]

    @pytest.mark.slow
    @pytest.mark.parametrize("name", [n for n in list_fixtures()[ALGEBRAS] if n not in ("malformed", "nonassociative")])
    def test_models_agree(self, name):
        """Test the cone and normalized models give the same HC on every bundled algebra"""
        a = load_algebra(name)
        assert cyclic_dimensions(a, 3, CyclicModel.CONE) == cyclic_dimensions(a, 3, CyclicModel.NORMALIZED)

    @pytest.mark.slow
    @pytest.mark.parametrize("name", ["a3_linear", "a3_zigzag"])
    def test_a3_orientations(self, name):
        """Test both A3 orientations have HC = 3, 0, 3, 0"""
        assert cyclic_dimensions(load_algebra(name), 3) == [3, 0, 3, 0]

    def test_negative_degree(self, ground_field):
        """Test a negative top degree is refused"""
        with pytest.raises(DegreeError):
            cyclic_dimensions(ground_field, -1)


class TestSBI:
    """Test the SBI maps and their exactness"""

    def test_ground_field_periodicity(self, ground_field):
        """Test S: HC_2 -> HC_0 is an isomorphism for k"""
        table = sbi_maps(cone_mixed_complex(ground_field, 3), 3)
        assert table.hc_dims == [1, 0, 1, 0]
        assert table.periodicity[2].shape == (1, 1)
        assert not table.periodicity[2].is_zero()
        assert all(exact for exact, _ in table.exact.values())

    @pytest.mark.parametrize("model", [CyclicModel.CONE, CyclicModel.NORMALIZED])
    @pytest.mark.parametrize("name", ["ground_field", "dual_numbers", "kxk", "t2"])
    def test_verify(self, name, model):
        """Test exactness, S I = 0, I B' = 0, B' I = B and model agreement through degree 3"""
        report = verify_sbi(load_algebra(name), 3, model)
        assert report.ok, report.failures()
        assert report.get("sbi.BI").status.value == "pass"
        assert report.get("sbi.models_agree").status.value == "pass"

    def test_exactness_ids(self, dual_numbers):
        """Test exactness is reported per node"""
        report = verify_sbi(dual_numbers, 2, compare_models=False)
        ids = {c.id for c in report.checks}
        assert {"sbi.exact.n0.hh", "sbi.exact.n2.hc", "sbi.exact.n0.hcs"} <= ids
        assert "sbi.models_agree" not in ids

    def test_connes_recovered_for_dual_numbers(self, dual_numbers):
        """Test B' I is nonzero on HH_0 of the dual numbers"""
        mc = cone_mixed_complex(dual_numbers, 2)
        table = sbi_maps(mc, 2)
        assert not (table.connecting[0] @ table.inclusion[0]).is_zero()

    def test_norm_mutation_fails(self, dual_numbers):
        """Test the mutated cone model is rejected"""
        report = verify_sbi(dual_numbers, 2, norm_mutation=True)
        assert not report.ok
        assert report.get("mixed.anticommute").witness
