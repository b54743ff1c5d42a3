"""
Unit tests for dg bimodules: validation, documents, composition and the endomorphism complex
"""
import json

import pytest

from src.models.bimodule import BMatrix, DgBimodule
from src.models.exceptions import AlgebraMismatchError, DocumentParseError, ValidationFailure
from src.models.matrix import SparseMatrix
from src.models.schemas import BimoduleDocument
from src.services.bimodule_service import (
    bimodule_from_document, bimodule_from_morphism, bimodule_to_document, compose, direct_sum, end_complex,
    regular_bimodule, require_valid_bimodule, shift, validate_bimodule, validate_derived_equivalence,
)
from src.utils.io import load_algebra, load_bimodule, parse_document

BUNDLED_BIMODULES = ["regular_dual_numbers", "morita_k_m2", "morita_m2_k", "morphism_k_kxk",
                     "unital_k_m2", "a3_tilting", "regular_plus_cone_dual_numbers"]


def cone_of_identity(a):
    """The contractible complex B -> B in degrees 1, 0 with the diagonal action of A = B"""
    one = BMatrix.identity(a, 1)
    acts = [BMatrix.scalar(a, {i: a.field.one}) for i in range(a.dim)]
    return DgBimodule("cone", a, a, 0, 1, {0: 1, 1: 1}, {0: one, 1: one}, {1: one}, {0: acts, 1: list(acts)})


class TestBMatrix:
    """Test matrices over an algebra"""

    def test_product_uses_algebra(self, m2):
        """Test (e12) (e21) = (e11) as 1 x 1 matrices"""
        e12 = BMatrix.scalar(m2, {1: m2.field.one})
        e21 = BMatrix.scalar(m2, {2: m2.field.one})
        assert e12 @ e21 == BMatrix.scalar(m2, {0: m2.field.one})

    def test_from_dense_and_back(self, dual_numbers):
        """Test dense coefficient lists round trip through to_dense"""
        rows = [[["1", "0"], ["0", "1"]], [["0", "0"], ["2", "1/2"]]]
        m = BMatrix.from_dense(dual_numbers, rows)
        assert m.shape == (2, 2)
        assert m.to_dense() == rows

    def test_block_diagonal(self, dual_numbers):
        """Test block_diagonal stacks identities"""
        one = BMatrix.identity(dual_numbers, 1)
        assert BMatrix.block_diagonal(dual_numbers, [one, one]) == BMatrix.identity(dual_numbers, 2)


class TestValidation:
    """Test the bimodule axioms"""

    @pytest.mark.parametrize("name", BUNDLED_BIMODULES)
    def test_bundled_fixtures_valid(self, name):
        """Test every bundled bimodule passes validation"""
        report = validate_bimodule(load_bimodule(name))
        assert report.ok, report.failures()

    def test_regular(self, dual_numbers):
        """Test the regular bimodule and its shift are valid"""
        x = regular_bimodule(dual_numbers)
        assert validate_bimodule(x).ok
        y = shift(x, 1)
        assert (y.low, y.high) == (1, 1)
        assert validate_bimodule(y).ok

    def test_broken_action(self, dual_numbers):
        """Test L(x) = 1 violates multiplicativity"""
        one = BMatrix.identity(dual_numbers, 1)
        x = DgBimodule("broken", dual_numbers, dual_numbers, 0, 0, {0: 1}, {0: one}, {}, {0: [one, one]})
        report = validate_bimodule(x)
        assert report.get("bimodule.multiplicative").status.value == "fail"
        with pytest.raises(ValidationFailure):
            require_valid_bimodule(x)

    def test_non_idempotent_presentation(self, dual_numbers):
        """Test E = 2 fails the idempotent check, which carries the dual basis identity"""
        two = BMatrix.from_dense(dual_numbers, [[["2", "0"]]])
        x_act = BMatrix.scalar(dual_numbers, {1: dual_numbers.field.one})
        x = DgBimodule("doubled", dual_numbers, dual_numbers, 0, 0, {0: 1}, {0: two}, {},
                       {0: [BMatrix.identity(dual_numbers, 1), x_act]})
        report = validate_bimodule(x)
        failed = report.get("bimodule.idempotent")
        assert failed.status.value == "fail"
        assert failed.witness.startswith("degree 0")
        assert "dual basis" in failed.detail
        assert report.get("bimodule.dual_basis") is None

    def test_direct_sum(self, dual_numbers):
        """Test ranks add under direct sum"""
        x = regular_bimodule(dual_numbers)
        s = direct_sum(x, x)
        assert s.rank(0) == 2
        assert validate_bimodule(s).ok

    def test_direct_sum_mismatch(self, dual_numbers, kxk):
        """Test summing bimodules over different algebras is refused"""
        with pytest.raises(AlgebraMismatchError):
            direct_sum(regular_bimodule(dual_numbers), regular_bimodule(kxk))


class TestMorphisms:
    """Test bimodules from algebra maps"""

    def test_non_unital_inclusion(self, ground_field, kxk):
        """Test 1 -> e1 gives the bimodule e1 (k x k)"""
        f = SparseMatrix.from_columns(kxk.field, 2, [{0: kxk.field.one}])
        x = bimodule_from_morphism(f, ground_field, kxk)
        assert x.idempotent(0) == BMatrix.scalar(kxk, {0: kxk.field.one})
        assert validate_bimodule(x).ok
        assert x.idempotents == load_bimodule("morphism_k_kxk").idempotents

    def test_not_multiplicative(self, dual_numbers):
        """Test 1 -> 1, x -> 1 is rejected"""
        one = dual_numbers.field.one
        f = SparseMatrix.from_columns(dual_numbers.field, 2, [{0: one}, {0: one}])
        with pytest.raises(ValidationFailure):
            bimodule_from_morphism(f, dual_numbers, dual_numbers)


class TestDocuments:
    """Test bimodule documents"""

    def test_round_trip(self, a3_tilting):
        """Test to_document then from_document keeps the presentation"""
        doc = bimodule_to_document(a3_tilting)
        again = bimodule_from_document(BimoduleDocument.model_validate(doc.model_dump()),
                                       a3_tilting.source, a3_tilting.target)
        for p in a3_tilting.degrees:
            assert again.idempotent(p) == a3_tilting.idempotent(p)
            assert again.differential(p) == a3_tilting.differential(p)

    def test_wrong_action_count(self, dual_numbers):
        """Test a degree with too few action matrices is a parse error"""
        doc = bimodule_to_document(regular_bimodule(dual_numbers))
        doc.modules[0].left_action = doc.modules[0].left_action[:1]
        with pytest.raises(DocumentParseError):
            bimodule_from_document(doc, dual_numbers, dual_numbers)

    def test_degree_range_validated(self):
        """Test degrees [1, 0] fail schema validation"""
        data = {"source": "ground_field", "target": "ground_field", "degrees": [1, 0], "modules": []}
        with pytest.raises(DocumentParseError):
            parse_document(data, BimoduleDocument, "inline")

    def test_inline_algebras(self, tmp_path, fixtures_dir):
        """Test a bimodule document may embed its algebras"""
        algebra = json.loads((fixtures_dir / "algebras" / "dual_numbers.json").read_text())
        doc = json.loads((fixtures_dir / "bimodules" / "regular_dual_numbers.json").read_text())
        doc["source"] = algebra
        path = tmp_path / "inline.json"
        path.write_text(json.dumps(doc))
        x = load_bimodule(str(path))
        assert x.source.same_structure(load_algebra("dual_numbers"))


class TestCompose:
    """Test X (x)_B Y"""

    def test_regular_is_identity(self, dual_numbers):
        """Test A (x)_A A has the presentation of A"""
        x = regular_bimodule(dual_numbers)
        z = compose(x, x)
        assert z.rank(0) == 1
        assert z.idempotent(0) == x.idempotent(0)
        assert [z.action(0, i) for i in range(2)] == [x.action(0, i) for i in range(2)]

    def test_morita_round_trip(self):
        """Test k -> M_2 -> k composes to a rank-one corner of k^2"""
        z = compose(load_bimodule("morita_k_m2"), load_bimodule("morita_m2_k"))
        assert z.rank(0) == 2
        assert validate_bimodule(z).ok
        report = validate_derived_equivalence(z)
        assert report.ok, report.failures()

    def test_shifted_composition(self, a3_tilting):
        """Test composing with a shifted regular bimodule keeps validity and shifts degrees"""
        z = compose(a3_tilting, shift(regular_bimodule(a3_tilting.target), 1))
        assert (z.low, z.high) == (1, 2)
        assert validate_bimodule(z).ok

    def test_mismatch(self, dual_numbers):
        """Test composing over different middle algebras is refused"""
        with pytest.raises(AlgebraMismatchError):
            compose(load_bimodule("morita_k_m2"), regular_bimodule(dual_numbers))


class TestEndComplex:
    """Test the endomorphism complex and the derived-equivalence certificate"""

    def test_regular(self, dual_numbers):
        """Test End of A over A is A in degree zero"""
        end = end_complex(regular_bimodule(dual_numbers))
        assert list(end.degrees) == [0]
        assert end.homology(0).dim == 2
        assert validate_derived_equivalence(regular_bimodule(dual_numbers)).ok

    def test_morita(self):
        """Test e11 M_2 certifies k ~ M_2"""
        report = validate_derived_equivalence(load_bimodule("morita_k_m2"))
        assert report.ok, report.failures()
        assert report.data["end_homology_dims"] == {"0": 1}

    def test_a3_tilting(self, a3_tilting):
        """Test the tilting complex has End = the other A_3 orientation in degree zero"""
        report = validate_derived_equivalence(a3_tilting)
        assert report.ok, report.failures()
        assert report.data["end_homology_dims"] == {"-1": 0, "0": 5, "1": 0}

    def test_contractible_summand(self):
        """Test adding a contractible cone to A leaves End homology equal to A in degree zero"""
        x = load_bimodule("regular_plus_cone_dual_numbers")
        report = validate_derived_equivalence(x)
        assert report.ok, report.failures()
        assert report.data["end_homology_dims"] == {"-1": 0, "0": 2, "1": 0}

    def test_contractible_summand_by_direct_sum(self, dual_numbers):
        """Test A + cone built by direct_sum matches the bundled document"""
        x = direct_sum(regular_bimodule(dual_numbers), cone_of_identity(dual_numbers))
        assert validate_bimodule(x).ok
        report = validate_derived_equivalence(x)
        assert report.ok, report.failures()
        assert report.data["end_homology_dims"] == {"-1": 0, "0": 2, "1": 0}

    def test_contractible_alone(self, dual_numbers):
        """Test the cone alone is acyclic in End and fails the degree-zero isomorphism"""
        cone = cone_of_identity(dual_numbers)
        assert validate_bimodule(cone).ok
        report = validate_derived_equivalence(cone)
        assert report.data["end_homology_dims"] == {"-1": 0, "0": 0, "1": 0}
        failed = report.get("end.h0_iso")
        assert failed.status.value == "fail"
        assert failed.witness == "dim H_0 = 0"

    def test_not_an_equivalence(self, dual_numbers):
        """Test A + A has too many endomorphisms"""
        x = regular_bimodule(dual_numbers)
        report = validate_derived_equivalence(direct_sum(x, x))
        failed = report.get("end.h0_iso")
        assert failed.status.value == "fail"
        assert report.data["end_homology_dims"] == {"0": 8}

    def test_end_d_squared(self, a3_tilting):
        """Test D D = 0 on the corner bases"""
        end = end_complex(a3_tilting)
        for n in (0, 1):
            assert (end.differentials[n - 1] @ end.differentials[n] @ end.corner_bases[n]).is_zero()
