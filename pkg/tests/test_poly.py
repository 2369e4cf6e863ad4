import random

import pytest

from modconv import (
    DensePoly,
    Felt,
    FieldMismatchError,
    PolyTextError,
    eval_poly,
    mul_karatsuba,
    mul_schoolbook,
    poly_from_text,
    poly_to_text,
)

from conftest import random_vec


class TestDensePoly:
    def test_rejects_noncanonical_coeffs(self, fp17):
        with pytest.raises(ValueError):
            DensePoly(fp17, (17,))
        with pytest.raises(ValueError):
            DensePoly(fp17, (-1,))

    def test_from_ints_reduces(self, fp17):
        assert DensePoly.from_ints(fp17, [20, -1]).coeffs == (3, 16)

    def test_degree_and_zero(self, fp17):
        assert DensePoly(fp17, (1, 2, 0, 0)).degree() == 1
        assert DensePoly(fp17, (0, 0, 0)).degree() is None
        assert DensePoly(fp17, (0, 0, 0)).is_zero()
        assert DensePoly.zero(fp17).degree() is None

    def test_normalize(self, fp17):
        assert DensePoly(fp17, (1, 2, 0, 0)).normalize().coeffs == (1, 2)
        assert DensePoly(fp17, (0, 0, 0)).normalize() == DensePoly.zero(fp17)
        a = DensePoly(fp17, (1, 2))
        assert a.normalize() is a  # already normal: unchanged
        assert a.normalize().normalize() == a


class TestSchoolbook:
    def test_hand_expansion(self):
        from modconv import FourierPrime

        fp7 = FourierPrime.from_modulus(7)
        a = DensePoly(fp7, (1, 2))
        b = DensePoly(fp7, (3, 4))
        assert mul_schoolbook(a, b).coeffs == (3, 3, 1)

    def test_identity_and_zero(self, fp257, rng):
        one = DensePoly.one(fp257)
        for _ in range(10):
            a = DensePoly(fp257, tuple(random_vec(rng, fp257, rng.randint(1, 20))))
            assert mul_schoolbook(a, one) == a
            assert mul_schoolbook(a, DensePoly.zero(fp257)).is_zero()
            assert mul_schoolbook(a, DensePoly(fp257, (0, 0))).is_zero()

    def test_output_length(self, fp257, rng):
        a = DensePoly(fp257, tuple(random_vec(rng, fp257, 5)))
        b = DensePoly(fp257, tuple(random_vec(rng, fp257, 3)))
        assert len(mul_schoolbook(a, b)) == 7

    def test_mismatched_fields(self, fp17, fp257):
        with pytest.raises(FieldMismatchError):
            mul_schoolbook(DensePoly.one(fp17), DensePoly.one(fp257))

    def test_commutative_associative(self, fp998, rng):
        for _ in range(40):
            a, b, c = (
                DensePoly(fp998, tuple(random_vec(rng, fp998, rng.randint(1, 64))))
                for _ in range(3)
            )
            assert mul_schoolbook(a, b) == mul_schoolbook(b, a)
            assert mul_schoolbook(mul_schoolbook(a, b), c) == mul_schoolbook(
                a, mul_schoolbook(b, c)
            )

    def test_degree_additivity(self, fp998, rng):
        for _ in range(40):
            a = DensePoly(fp998, tuple(random_vec(rng, fp998, rng.randint(1, 32))))
            b = DensePoly(fp998, tuple(random_vec(rng, fp998, rng.randint(1, 32))))
            if a.is_zero() or b.is_zero():
                continue
            assert mul_schoolbook(a, b).degree() == a.degree() + b.degree()


class TestKaratsuba:
    def test_agrees_on_all_length_pairs(self, fp998):
        rng = random.Random(99)
        for la in range(1, 65):
            for lb in range(1, 65):
                a = DensePoly(fp998, tuple(random_vec(rng, fp998, la)))
                b = DensePoly(fp998, tuple(random_vec(rng, fp998, lb)))
                assert mul_karatsuba(a, b, 4) == mul_schoolbook(a, b), (la, lb)

    def test_degenerate_threshold_is_schoolbook(self, fp257, rng):
        a = DensePoly(fp257, tuple(random_vec(rng, fp257, 10)))
        b = DensePoly(fp257, tuple(random_vec(rng, fp257, 7)))
        assert mul_karatsuba(a, b, 64) == mul_schoolbook(a, b)

    def test_threshold_validation(self, fp257):
        with pytest.raises(ValueError):
            mul_karatsuba(DensePoly.one(fp257), DensePoly.one(fp257), 0)

    def test_spec_example(self):
        from modconv import FourierPrime

        fp7 = FourierPrime.from_modulus(7)
        a = DensePoly(fp7, (1, 2))
        b = DensePoly(fp7, (3, 4))
        assert mul_karatsuba(a, b, 1).coeffs == (3, 3, 1)


class TestEval:
    def test_constant_term(self, fp17, rng):
        a = DensePoly(fp17, (5, 3, 2))
        assert eval_poly(a, fp17.zero()) == Felt(5, fp17)

    def test_coefficient_sum(self, fp17):
        a = DensePoly(fp17, (1, 1, 1, 1))
        assert eval_poly(a, fp17.one()) == Felt(4, fp17)

    def test_hand_horner(self, fp17):
        a = DensePoly(fp17, (1, 2, 3))
        assert eval_poly(a, Felt(2, fp17)) == fp17.zero()  # 1 + 4 + 12 = 17

    def test_homomorphism(self, fp998, rng):
        for _ in range(60):
            a = DensePoly(fp998, tuple(random_vec(rng, fp998, rng.randint(1, 24))))
            b = DensePoly(fp998, tuple(random_vec(rng, fp998, rng.randint(1, 24))))
            x = Felt(rng.randrange(fp998.p), fp998)
            assert eval_poly(mul_schoolbook(a, b), x) == eval_poly(a, x) * eval_poly(b, x)


class TestTextFormat:
    def test_round_trip(self, fp257, rng):
        for _ in range(20):
            a = DensePoly(fp257, tuple(random_vec(rng, fp257, rng.randint(0, 12))))
            assert poly_from_text(poly_to_text(a)) == a

    def test_rendering(self, fp17):
        assert poly_to_text(DensePoly(fp17, (3, 0, 5))) == "17\n3\n3 0 5\n"
        assert poly_to_text(DensePoly.zero(fp17)) == "17\n0\n\n"

    def test_zero_poly_round_trip(self, fp17):
        assert poly_from_text("17\n0\n\n") == DensePoly.zero(fp17)

    def test_parse_errors_carry_line_numbers(self):
        with pytest.raises(PolyTextError) as err:
            poly_from_text("banana\n1\n0\n")
        assert err.value.line == 1
        with pytest.raises(PolyTextError) as err:
            poly_from_text("17\ntwo\n1 2\n")
        assert err.value.line == 2
        with pytest.raises(PolyTextError) as err:
            poly_from_text("17\n3\n1 2\n")
        assert err.value.line == 3
        with pytest.raises(PolyTextError) as err:
            poly_from_text("17\n1\n99\n")  # out of range
        assert err.value.line == 3
        with pytest.raises(PolyTextError):
            poly_from_text("17\n")
        with pytest.raises(PolyTextError):
            poly_from_text("15\n1\n1\n")  # composite modulus
