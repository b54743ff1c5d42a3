"""
Unit tests for the trace chain map and transport along bimodules
"""
import pytest

from src.models.enums import CheckStatus
from src.models.exceptions import AlgebraMismatchError
from src.models.matrix import SparseMatrix
from src.services.bimodule_service import regular_bimodule, shift
from src.services.transport_service import (
    FROZEN_SIGN_SCHEME, pin_sign_scheme, tensor_power_map, trace_map, trace_maps, transport_cohomology_solve,
    transport_functoriality, transport_normalization, transport_report,
)
from src.utils.io import load_bimodule


class TestTraceMaps:
    """Test Tr on unnormalized chains"""

    def test_regular_is_identity(self, dual_numbers):
        """Test the regular bimodule traces to the identity"""
        maps = trace_maps(regular_bimodule(dual_numbers), 2)
        for n, m in maps.items():
            assert m == SparseMatrix.identity(dual_numbers.field, 2 ** (n + 1))

    def test_morita_corner(self, ground_field, m2):
        """Test k -> M_2 sends 1 (x) 1 to e11 (x) e11"""
        x = load_bimodule("morita_k_m2")
        tr = trace_map(x, 1)
        assert tr.shape == (16, 1)
        assert list(tr.entries()) == [(0, 0, m2.field.one)]

    def test_sign_scheme_pinned(self, ground_field, dual_numbers):
        """Test exactly one sign scheme survives and it is the frozen one"""
        scheme, report = pin_sign_scheme([ground_field, dual_numbers], D=1)
        assert scheme == FROZEN_SIGN_SCHEME == (0, 0)
        assert report.data["scheme"] == [0, 0]
        assert report.get("signs.scheme.00").status == CheckStatus.PASS
        assert report.get("signs.scheme.10").status == CheckStatus.FAIL

    def test_shift_keeps_chain_map(self, dual_numbers):
        """Test a shifted regular bimodule still gives the identity under the frozen scheme"""
        maps = trace_maps(shift(regular_bimodule(dual_numbers), 1), 1)
        assert maps[1] == SparseMatrix.identity(dual_numbers.field, 4)


class TestTransportReport:
    """Test the transport of HH, HC and the SBI ladder"""

    def test_regular(self, dual_numbers):
        """Test transport along A over A"""
        report = transport_report(dual_numbers, dual_numbers, load_bimodule("regular_dual_numbers"), 2)
        assert report.ok, report.failures()
        assert report.data["hh_dims_source"] == [2, 1, 1]
        assert report.data["hh_dims_target"] == [2, 1, 1]
        assert report.get("transport.connes_chain_level").status == CheckStatus.INFO

    def test_morita(self, ground_field, m2):
        """Test transport along the Morita bimodule k -> M_2"""
        report = transport_report(ground_field, m2, load_bimodule("morita_k_m2"), 2)
        assert report.ok, report.failures()
        assert report.data["hh_dims_target"] == [1, 0, 0]
        assert report.data["hc_dims_target"] == [1, 0, 1]
        assert report.get("ladder.S.n2").status == CheckStatus.PASS

    def test_tilting_complex(self, a3_zigzag, a3_linear, a3_tilting):
        """Test transport along a two-term tilting complex between A3 orientations"""
        report = transport_report(a3_zigzag, a3_linear, a3_tilting, 1)
        assert report.ok, report.failures()
        assert report.data["hh_dims_source"] == [3, 0]
        assert report.data["hh_dims_target"] == [3, 0]

    @pytest.mark.slow
    def test_tilting_complex_degree_three(self, a3_zigzag, a3_linear, a3_tilting):
        """Test the A3 tilting transport through degree 3, including the SBI ladder"""
        report = transport_report(a3_zigzag, a3_linear, a3_tilting, 3)
        assert report.ok, report.failures()
        assert report.data["hh_dims_source"] == [3, 0, 0, 0]
        assert report.data["hh_dims_target"] == [3, 0, 0, 0]
        assert report.data["hc_dims_source"] == [3, 0, 3, 0]
        assert report.data["hc_dims_target"] == [3, 0, 3, 0]

    def test_not_an_equivalence(self, ground_field, kxk):
        """Test the corner k -> k x k fails the isomorphism check"""
        report = transport_report(ground_field, kxk, load_bimodule("morphism_k_kxk"), 1)
        assert not report.ok
        assert report.get("transport.chain_map").status == CheckStatus.PASS
        assert report.get("transport.hh_iso").status == CheckStatus.FAIL

    def test_algebra_mismatch(self, dual_numbers, kxk):
        """Test the declared algebras must match the bimodule"""
        with pytest.raises(AlgebraMismatchError):
            transport_report(dual_numbers, kxk, load_bimodule("regular_dual_numbers"), 1)


class TestCohomologyTransport:
    """Test solving for T on HH^*"""

    def test_regular_degree_zero(self, dual_numbers):
        """Test T is the identity on HH^0 for the regular bimodule"""
        transport, report = transport_cohomology_solve(
            dual_numbers, dual_numbers, load_bimodule("regular_dual_numbers"), 0)
        assert report.ok, report.failures()
        assert transport[0] == SparseMatrix.identity(dual_numbers.field, 2)
        assert report.get("cohomology.unit").status == CheckStatus.PASS

    def test_morita(self, ground_field, m2):
        """Test T maps the unit of k to the unit of M_2"""
        transport, report = transport_cohomology_solve(ground_field, m2, load_bimodule("morita_k_m2"), 1)
        assert report.ok, report.failures()
        assert not report.inconclusive
        assert transport[0].shape == (1, 1)
        assert report.data["coh_dims_target"] == [1, 0]

    @pytest.mark.slow
    def test_tilting_complex(self, a3_zigzag, a3_linear, a3_tilting):
        """Test T on HH^* along the A3 tilting complex through degree 3"""
        transport, report = transport_cohomology_solve(a3_zigzag, a3_linear, a3_tilting, 3)
        assert report.ok, report.failures()
        assert report.data["coh_dims_source"] == [1, 0, 0, 0]
        assert report.data["coh_dims_target"] == [1, 0, 0, 0]
        assert transport[0].shape == (1, 1)


class TestFunctoriality:
    """Test Tr of a composite and Tr of a morphism bimodule"""

    def test_morita_round_trip(self):
        """Test Tr of k -> M_2 -> k equals the composite of traces"""
        report = transport_functoriality(load_bimodule("morita_k_m2"), load_bimodule("morita_m2_k"), 1)
        assert report.ok, report.failures()
        assert report.get("functoriality.chain").status == CheckStatus.PASS

    @pytest.mark.slow
    def test_tilting_then_regular(self, a3_linear, a3_tilting):
        """Test Tr of the tilting complex followed by the regular A3 bimodule"""
        report = transport_functoriality(a3_tilting, regular_bimodule(a3_linear), 2)
        assert report.ok, report.failures()
        assert report.get("functoriality.hh").status == CheckStatus.PASS

    def test_identity_morphism(self, dual_numbers):
        """Test the identity map gives the identity on chains"""
        f = SparseMatrix.identity(dual_numbers.field, 2)
        report = transport_normalization(f, dual_numbers, dual_numbers, 2)
        assert report.ok, report.failures()

    def test_non_unital_morphism(self, ground_field, kxk):
        """Test k -> k x k, 1 -> e1"""
        f = SparseMatrix.from_rows(kxk.field, [[1], [0]])
        report = transport_normalization(f, ground_field, kxk, 2)
        assert report.ok, report.failures()

    def test_unital_morphism(self, ground_field, m2):
        """Test k -> M_2, 1 -> identity matrix"""
        f = SparseMatrix.from_rows(m2.field, [[1], [0], [0], [1]])
        report = transport_normalization(f, ground_field, m2, 1)
        assert report.ok, report.failures()

    def test_tensor_power_map(self, ground_field, kxk):
        """Test f (x) f sends 1 (x) 1 to e1 (x) e1"""
        f = SparseMatrix.from_rows(kxk.field, [[1], [0]])
        m = tensor_power_map(f, ground_field, kxk, 1)
        assert m.shape == (4, 1)
        assert list(m.entries()) == [(0, 0, kxk.field.one)]
