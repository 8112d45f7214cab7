import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from statecone import algebras as ja

ALL_SIMPLE = [
    ja.real_hermitian(3),
    ja.complex_hermitian(3),
    ja.quaternion_hermitian(2),
    ja.spin_factor(3),
    ja.classical(4),
]


def random_element(algebra, seed):
    rng = np.random.default_rng(seed)
    return ja.JordanElement(algebra, rng.normal(size=algebra.dim))


class TestDescriptors:
    @pytest.mark.parametrize("algebra,dim,rank", [
        (ja.real_hermitian(4), 10, 4),
        (ja.complex_hermitian(3), 9, 3),
        (ja.quaternion_hermitian(2), 6, 2),
        (ja.spin_factor(5), 6, 2),
        (ja.classical(7), 7, 7),
    ])
    def test_dimension_and_rank(self, algebra, dim, rank):
        assert algebra.dim == dim
        assert algebra.rank == rank

    def test_direct_sum_adds(self):
        a = ja.Algebra(ja.complex_hermitian(2).summands
                       + ja.classical(3).summands)
        assert a.dim == 4 + 3
        assert a.rank == 2 + 3

    def test_rejects_bad_sizes(self):
        with pytest.raises(ValueError):
            ja.SimpleFactor("spin", 1)
        with pytest.raises(ValueError):
            ja.SimpleFactor("complex", 0)
        with pytest.raises(ValueError):
            ja.SimpleFactor("octonion", 3)


class TestProduct:
    @pytest.mark.parametrize("algebra", ALL_SIMPLE)
    def test_commutative(self, algebra):
        a = random_element(algebra, 1)
        b = random_element(algebra, 2)
        assert ja.norm(ja.jordan_product(a, b)
                       - ja.jordan_product(b, a)) < 1e-12

    @pytest.mark.parametrize("algebra", ALL_SIMPLE)
    def test_unit_is_neutral(self, algebra):
        a = random_element(algebra, 3)
        assert ja.norm(ja.jordan_product(a, ja.unit(algebra)) - a) < 1e-12

    def test_classical_is_pointwise(self):
        algebra = ja.classical(2)
        a = ja.JordanElement(algebra, np.array([2.0, 3.0]))
        b = ja.JordanElement(algebra, np.array([5.0, 7.0]))
        np.testing.assert_allclose(
            ja.jordan_product(a, b).coeffs, [10.0, 21.0]
        )

    def test_spin_product_formula(self):
        algebra = ja.spin_factor(3)
        s, u = 0.7, np.array([0.1, -0.4, 0.2])
        t, v = -0.3, np.array([0.5, 0.0, -0.6])
        a = ja.element_from_reps(algebra, [np.concatenate(([s], u))])
        b = ja.element_from_reps(algebra, [np.concatenate(([t], v))])
        prod = ja.jordan_product(a, b).reps()[0]
        np.testing.assert_allclose(prod[0], s * t + u @ v, atol=1e-14)
        np.testing.assert_allclose(prod[1:], s * v + t * u, atol=1e-14)

    def test_mismatched_algebras_rejected(self):
        with pytest.raises(ja.AlgebraMismatchError):
            ja.jordan_product(
                random_element(ja.complex_hermitian(2), 0),
                random_element(ja.real_hermitian(2), 0),
            )

    @pytest.mark.parametrize("algebra", ALL_SIMPLE)
    def test_jordan_identity(self, algebra):
        # a o (b o (a o a)) == (a o b) o (a o a)
        for seed in range(5):
            a = random_element(algebra, 10 + seed)
            b = random_element(algebra, 20 + seed)
            aa = ja.jordan_product(a, a)
            lhs = ja.jordan_product(a, ja.jordan_product(b, aa))
            rhs = ja.jordan_product(ja.jordan_product(a, b), aa)
            scale = max(1.0, ja.norm(a) ** 3 * ja.norm(b))
            assert ja.norm(lhs - rhs) < 1e-10 * scale

    @pytest.mark.parametrize("algebra", ALL_SIMPLE)
    def test_power_associativity(self, algebra):
        for seed in range(5):
            a = random_element(algebra, 30 + seed)
            a2 = ja.jordan_product(a, a)
            left = ja.jordan_product(ja.jordan_product(a2, a), a)
            right = ja.jordan_product(a2, a2)
            scale = max(1.0, ja.norm(a) ** 4)
            assert ja.norm(left - right) < 1e-10 * scale


@settings(max_examples=25, deadline=None)
@given(coeffs=hst.lists(
    hst.floats(min_value=-2, max_value=2, allow_nan=False), min_size=9,
    max_size=9),
    other=hst.lists(
    hst.floats(min_value=-2, max_value=2, allow_nan=False), min_size=9,
    max_size=9))
def test_complex_jordan_identity_hypothesis(coeffs, other):
    algebra = ja.complex_hermitian(3)
    a = ja.JordanElement(algebra, np.array(coeffs))
    b = ja.JordanElement(algebra, np.array(other))
    aa = ja.jordan_product(a, a)
    lhs = ja.jordan_product(a, ja.jordan_product(b, aa))
    rhs = ja.jordan_product(ja.jordan_product(a, b), aa)
    assert ja.norm(lhs - rhs) < 1e-9


class TestTraceInner:
    @pytest.mark.parametrize("algebra,expected", [
        (ja.complex_hermitian(4), 4.0),
        (ja.real_hermitian(3), 3.0),
        (ja.quaternion_hermitian(2), 2.0),
        (ja.spin_factor(3), 2.0),
        (ja.classical(5), 5.0),
    ])
    def test_unit_trace_is_rank(self, algebra, expected):
        assert ja.trace(ja.unit(algebra)) == pytest.approx(expected)

    def test_spin_trace_is_twice_scalar(self):
        algebra = ja.spin_factor(4)
        rep = np.array([0.35, 0.1, 0.2, -0.3, 0.0])
        el = ja.element_from_reps(algebra, [rep])
        assert ja.trace(el) == pytest.approx(0.7)
        fine = ja.spectral_decompose(el).fine_spectrum()
        assert np.sum(fine) == pytest.approx(0.7)

    @pytest.mark.parametrize("algebra", ALL_SIMPLE)
    def test_trace_associative_form(self, algebra):
        a, b, c = (random_element(algebra, 40 + k) for k in range(3))
        lhs = ja.trace(ja.jordan_product(ja.jordan_product(a, b), c))
        rhs = ja.trace(ja.jordan_product(a, ja.jordan_product(b, c)))
        assert lhs == pytest.approx(rhs, abs=1e-10 * max(1, abs(lhs)))

    @pytest.mark.parametrize("algebra", ALL_SIMPLE)
    def test_inner_product_is_trace_of_product(self, algebra):
        a = random_element(algebra, 50)
        b = random_element(algebra, 51)
        assert ja.inner_product(a, b) == pytest.approx(
            ja.trace(ja.jordan_product(a, b)), abs=1e-10
        )
        assert ja.inner_product(a, ja.unit(algebra)) == pytest.approx(
            ja.trace(a)
        )

    @pytest.mark.parametrize("algebra", ALL_SIMPLE)
    def test_formal_reality(self, algebra):
        # tr(sum of squares) equals the sum of squared norms, so the sum
        # of squares can only vanish if every term does
        elements = [random_element(algebra, 60 + k) for k in range(4)]
        total = ja.zero(algebra)
        for el in elements:
            total = total + ja.jordan_product(el, el)
        assert ja.trace(total) == pytest.approx(
            sum(ja.norm(el) ** 2 for el in elements), rel=1e-10
        )
        eigs = ja.spectral_decompose(total).eigenvalues
        assert np.all(eigs >= -1e-10)


class TestSpectral:
    def test_classical_diagonal(self):
        algebra = ja.classical(2)
        el = ja.JordanElement(algebra, np.array([0.7, 0.3]))
        dec = ja.spectral_decompose(el)
        np.testing.assert_allclose(dec.eigenvalues, [0.7, 0.3])
        np.testing.assert_allclose(dec.idempotents[0].coeffs, [1, 0])
        np.testing.assert_allclose(dec.idempotents[1].coeffs, [0, 1])

    def test_spin_analytic(self):
        algebra = ja.spin_factor(3)
        t, v = 0.4, np.array([0.3, 0.0, -0.4])
        el = ja.element_from_reps(algebra, [np.concatenate(([t], v))])
        dec = ja.spectral_decompose(el)
        np.testing.assert_allclose(dec.eigenvalues, [0.9, -0.1], atol=1e-12)
        for e in dec.idempotents:
            assert ja.norm(ja.jordan_product(e, e) - e) < 1e-12
        assert ja.norm(dec.reconstruct() - el) < 1e-12

    @pytest.mark.parametrize("algebra", ALL_SIMPLE)
    def test_invariants(self, algebra):
        el = random_element(algebra, 70)
        dec = ja.spectral_decompose(el)
        assert np.all(np.diff(dec.eigenvalues) < 0)
        total = ja.zero(algebra)
        for i, e in enumerate(dec.idempotents):
            assert ja.norm(ja.jordan_product(e, e) - e) < 1e-10
            total = total + e
            for j in range(i):
                assert ja.norm(
                    ja.jordan_product(e, dec.idempotents[j])
                ) < 1e-10
        assert ja.norm(total - ja.unit(algebra)) < 1e-10
        assert ja.norm(dec.reconstruct() - el) < 1e-10

    def test_reference_solver_agreement(self):
        rng = np.random.default_rng(3)
        g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        m = g + g.conj().T
        el = ja.element_from_reps(ja.complex_hermitian(4), [m])
        fine = ja.spectral_decompose(el).fine_spectrum()
        np.testing.assert_allclose(
            np.sort(fine), np.linalg.eigvalsh(m), atol=1e-10
        )

    def test_grouping_merges_close_eigenvalues(self):
        algebra = ja.classical(3)
        el = ja.JordanElement(algebra, np.array([0.5, 0.5 + 1e-12, 0.1]))
        dec = ja.spectral_decompose(el, group_tol=1e-8)
        assert len(dec.eigenvalues) == 2
        assert dec.multiplicities[0] == pytest.approx(2.0)

    def test_degenerate_idempotent_is_projection(self):
        algebra = ja.complex_hermitian(3)
        m = np.diag([0.5, 0.5, 0.0]).astype(complex)
        el = ja.element_from_reps(algebra, [m])
        dec = ja.spectral_decompose(el)
        top = dec.idempotents[0]
        assert ja.trace(top) == pytest.approx(2.0, abs=1e-10)
        assert ja.norm(ja.jordan_product(top, top) - top) < 1e-10


class TestFunctionalCalculus:
    def test_identity_function(self):
        el = random_element(ja.complex_hermitian(3), 80)
        assert ja.norm(ja.apply_function(el, lambda x: x) - el) < 1e-12

    def test_log_of_exponentials(self):
        algebra = ja.classical(2)
        el = ja.JordanElement(algebra, np.array([np.e, np.e ** 2]))
        out = ja.apply_function(el, np.log, domain=lambda x: x > 0)
        np.testing.assert_allclose(out.coeffs, [1.0, 2.0], atol=1e-12)

    @pytest.mark.parametrize("algebra", ALL_SIMPLE)
    def test_exp_log_round_trip(self, algebra):
        rng = np.random.default_rng(81)
        raw = random_element(algebra, 81)
        # shift to a strictly positive element
        shift = abs(min(ja.spectral_decompose(raw).eigenvalues)) + 0.5
        positive = raw + shift * ja.unit(algebra)
        lg = ja.apply_function(positive, np.log, domain=lambda x: x > 0)
        back = ja.apply_function(lg, np.exp)
        assert ja.norm(back - positive) < 1e-9

    def test_domain_error_carries_value(self):
        el = ja.JordanElement(ja.classical(2), np.array([1.0, -2.0]))
        with pytest.raises(ja.DomainError) as err:
            ja.apply_function(el, np.log, domain=lambda x: x > 0)
        assert err.value.value == pytest.approx(-2.0)

    @pytest.mark.parametrize("algebra", ALL_SIMPLE)
    def test_spectral_mapping(self, algebra):
        el = random_element(algebra, 82)
        f = lambda x: x ** 2 - x
        image = ja.apply_function(el, f)
        expected = sorted(f(x) for x in
                          ja.spectral_decompose(el).fine_spectrum())
        got = sorted(ja.spectral_decompose(image).fine_spectrum())
        np.testing.assert_allclose(got, expected, atol=1e-9)


class TestSelfDuality:
    @pytest.mark.parametrize("algebra", ALL_SIMPLE)
    def test_positive_pairs_have_nonnegative_inner_product(self, algebra):
        rng = np.random.default_rng(90)
        for _ in range(10):
            a = random_element(algebra, rng.integers(1 << 30))
            b = random_element(algebra, rng.integers(1 << 30))
            pa = ja.jordan_product(a, a)
            pb = ja.jordan_product(b, b)
            assert ja.inner_product(pa, pb) >= -1e-12

    def test_negative_direction_is_witnessed(self):
        algebra = ja.complex_hermitian(2)
        el = ja.element_from_reps(
            algebra, [np.diag([1.0, -0.2]).astype(complex)]
        )
        dec = ja.spectral_decompose(el)
        witness = dec.idempotents[-1]  # projection onto the negative part
        assert ja.inner_product(el, witness) < 0


class TestQuaternionEmbedding:
    def test_unit_maps_to_unit(self):
        h = ja.quaternion_hermitian(2)
        img = ja.embed_quaternion(ja.unit(h))
        assert ja.norm(img - ja.unit(ja.complex_hermitian(4))) < 1e-12

    def test_trace_doubles_and_spectrum_doubles(self):
        h = ja.quaternion_hermitian(2)
        el = random_element(h, 91)
        img = ja.embed_quaternion(el)
        assert ja.trace(img) == pytest.approx(2 * ja.trace(el), abs=1e-10)
        lam = ja.spectral_decompose(el).fine_spectrum()
        lam_img = ja.spectral_decompose(img).fine_spectrum()
        np.testing.assert_allclose(lam_img, np.repeat(lam, 2), atol=1e-9)

    def test_is_jordan_homomorphism(self):
        h = ja.quaternion_hermitian(2)
        a = random_element(h, 92)
        b = random_element(h, 93)
        lhs = ja.embed_quaternion(ja.jordan_product(a, b))
        rhs = ja.jordan_product(ja.embed_quaternion(a), ja.embed_quaternion(b))
        assert ja.norm(lhs - rhs) < 1e-10

    def test_rejects_other_kinds(self):
        with pytest.raises(ja.AlgebraMismatchError):
            ja.embed_quaternion(random_element(ja.complex_hermitian(2), 0))


class TestDirectSum:
    def test_trace_adds_and_spectra_concatenate(self):
        a = random_element(ja.complex_hermitian(2), 94)
        b = random_element(ja.classical(3), 95)
        ab = ja.direct_sum(a, b)
        assert ja.trace(ab) == pytest.approx(ja.trace(a) + ja.trace(b))
        fine = np.sort(ja.spectral_decompose(ab).fine_spectrum())
        ref = np.sort(np.concatenate([
            ja.spectral_decompose(a).fine_spectrum(),
            ja.spectral_decompose(b).fine_spectrum(),
        ]))
        np.testing.assert_allclose(fine, ref, atol=1e-9)

    def test_blockwise_product(self):
        a, c = (random_element(ja.complex_hermitian(2), s) for s in (96, 97))
        b, d = (random_element(ja.spin_factor(3), s) for s in (98, 99))
        lhs = ja.jordan_product(ja.direct_sum(a, b), ja.direct_sum(c, d))
        rhs = ja.direct_sum(ja.jordan_product(a, c), ja.jordan_product(b, d))
        assert ja.norm(lhs - rhs) < 1e-12

    def test_unit_of_sum_merges_eigenvalues(self):
        u = ja.unit(ja.Algebra(
            ja.complex_hermitian(2).summands + ja.classical(2).summands
        ))
        dec = ja.spectral_decompose(u)
        assert len(dec.eigenvalues) == 1
        assert dec.multiplicities[0] == pytest.approx(4.0)


def test_immutability():
    el = random_element(ja.complex_hermitian(2), 100)
    with pytest.raises(AttributeError):
        el.coeffs = np.zeros(4)
    with pytest.raises(ValueError):
        el.coeffs[0] = 1.0
