import pytest
from hypothesis import given, settings, strategies as st

from msrcode.errors import ParameterError
from msrcode.gf2m import PRIMITIVE_POLYS, SUPPORTED_DEGREES, cosets, field_new
from oracles import brute_subgroup, clmul_mod


def test_gf16_context():
    f = field_new(4)
    assert (f.size, f.order, f.modulus, f.lam) == (16, 15, 0x13, 2)


def test_gf64_context():
    assert field_new(6).size == 64


@pytest.mark.parametrize("m", [5, 3, 18, 0])
def test_unsupported_degree_rejected(m):
    with pytest.raises(ParameterError):
        field_new(m)


def test_known_product():
    # x * x^3 = x^4 = x + 1 modulo x^4 + x + 1
    assert field_new(4).mul(0x02, 0x08) == 0x03


def test_inverse_of_zero():
    with pytest.raises(ZeroDivisionError):
        field_new(4).inv(0)


@pytest.mark.parametrize("m", SUPPORTED_DEGREES)
def test_lambda_is_primitive(m):
    f = field_new(m)
    seen = set()
    v = 1
    for _ in range(f.order):
        seen.add(v)
        v = clmul_mod(v, 2, PRIMITIVE_POLYS[m], m)
    assert v == 1 and len(seen) == f.order
    assert f.pow(f.lam, f.order) == 1


@pytest.mark.parametrize("m", [4, 6, 8])
def test_table_multiply_matches_schoolbook(m):
    f = field_new(m)
    for a in range(f.size):
        for b in range(0, f.size, 7):
            assert f.mul(a, b) == clmul_mod(a, b, f.modulus, m)


def test_every_inverse_in_gf16():
    f = field_new(4)
    for a in range(1, 16):
        assert f.mul(a, f.inv(a)) == 1


def test_gf16_subgroup_frozen():
    cos = cosets(field_new(4))
    assert cos.g == (0x1, 0x8, 0xC, 0xA, 0xF)
    assert cos.gamma_g == (0x2, 0x3, 0xB, 0x7, 0xD)
    assert cos.gamma2_g == (0x4, 0x6, 0x5, 0xE, 0x9)


@pytest.mark.parametrize("m", SUPPORTED_DEGREES)
def test_cosets_partition_nonzero_elements(m):
    f = field_new(m)
    cos = cosets(f)
    assert list(cos.g) == brute_subgroup(f.modulus, m)
    assert 1 in cos.g and f.lam not in (0, 1)
    parts = [set(cos.g), set(cos.gamma_g), set(cos.gamma2_g)]
    assert all(len(s) == f.order // 3 for s in parts)
    assert set().union(*parts) == set(range(1, f.size))
    assert not (parts[0] & parts[1]) and not (parts[0] & parts[2]) and not (parts[1] & parts[2])


def test_array_ops_match_scalar():
    import numpy as np
    f = field_new(6)
    a = np.arange(64)
    b = (a * 37 + 5) % 64
    assert list(f.mul_array(a, b)) == [f.mul(int(x), int(y)) for x, y in zip(a, b)]
    assert list(f.inv_array(a[1:])) == [f.inv(int(x)) for x in a[1:]]


elements = st.integers(0, 255)


@settings(max_examples=300, deadline=None)
@given(elements, elements, elements)
def test_field_axioms_gf256(a, b, c):
    f = field_new(8)
    assert f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
    assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
    assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
    assert f.add(a, a) == 0
    assert f.mul(a, 1) == a and f.mul(a, 0) == 0
    if b:
        assert f.mul(f.div(a, b), b) == a


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 65535), st.integers(-70000, 70000))
def test_pow_matches_repeated_multiply_gf65536(a, e):
    f = field_new(16)
    e_mod = e % f.order
    v = 1
    for bit in bin(e_mod)[2:]:
        v = f.mul(v, v)
        if bit == "1":
            v = f.mul(v, a)
    assert f.pow(a, e) == v
