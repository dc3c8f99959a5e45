import numpy as np
import pytest

from kdvlab.spectral import (
    TorusField,
    cosine_mode,
    evaluate,
    from_basis,
    basis_coeffs,
    grid,
    hamiltonian,
    inner_product,
    integral_u3,
    integral_u3_quadrature,
    linf_norm,
    make_field,
    project,
    sine_mode,
    sobolev_norm,
    zero_field,
)

SQRT_PI = np.sqrt(np.pi)


def random_field(rng, m, scale=0.3):
    return TorusField(scale * (rng.standard_normal(m) + 1j * rng.standard_normal(m)))


def test_make_field_basis_examples():
    c1 = make_field([SQRT_PI / 2])
    x = grid(64)
    assert np.allclose(evaluate(c1, 64), np.cos(x) / SQRT_PI, atol=1e-14)
    assert np.allclose(evaluate(make_field([0.0]), 64), 0.0)
    s1 = make_field([-1j * SQRT_PI / 2])
    assert np.allclose(evaluate(s1, 64), np.sin(x) / SQRT_PI, atol=1e-14)


def test_make_field_empty_rejected():
    with pytest.raises(ValueError):
        make_field([])


def test_reconstruction_matches_mode_sum():
    # grid samples must equal sum_k 2 Re(u_hat(k) e^{ikx}) / pi to roundoff
    rng = np.random.default_rng(0)
    u = random_field(rng, 7)
    n = 64
    x = grid(n)
    direct = sum(
        2.0 * np.real(u.modes[k - 1] * np.exp(1j * k * x)) / np.pi
        for k in range(1, 8)
    )
    assert np.max(np.abs(evaluate(u, n) - direct)) < 1e-12


def test_basis_round_trip():
    rng = np.random.default_rng(1)
    a = rng.standard_normal(5)
    b = rng.standard_normal(5)
    u = from_basis(a, b)
    a2, b2 = basis_coeffs(u)
    assert np.allclose(a, a2) and np.allclose(b, b2)


def test_sobolev_norm_examples():
    assert sobolev_norm(cosine_mode(1), 0.0) == pytest.approx(1.0, abs=1e-14)
    assert sobolev_norm(sine_mode(2), 0.5) == pytest.approx(np.sqrt(2.0), abs=1e-14)
    assert sobolev_norm(zero_field(4), 0.7) == 0.0
    with pytest.raises(ValueError):
        sobolev_norm(cosine_mode(1), -0.1)


def test_linf_norm_examples():
    assert linf_norm(cosine_mode(1)) == pytest.approx(1.0 / SQRT_PI, abs=1e-12)
    assert linf_norm(zero_field(3)) == 0.0
    u = cosine_mode(1, 2) + cosine_mode(2)
    assert linf_norm(u) == pytest.approx(2.0 / SQRT_PI, abs=1e-12)


def test_project_examples_and_properties():
    u = cosine_mode(1, 2) + cosine_mode(2)
    assert np.allclose(project(u, 1).modes, cosine_mode(1, 2).modes)
    assert np.allclose(project(cosine_mode(1), 0).modes, 0.0)
    assert np.allclose(project(u, 5).modes, u.modes)

    rng = np.random.default_rng(2)
    for _ in range(50):
        v = random_field(rng, 12)
        w = random_field(rng, 12)
        n_keep = int(rng.integers(0, 14))
        pv = project(v, n_keep)
        # idempotent
        assert np.allclose(project(pv, n_keep).modes, pv.modes, atol=1e-15)
        # self-adjoint in the L2 pairing
        lhs = inner_product(pv, w)
        rhs = inner_product(v, project(w, n_keep))
        assert abs(lhs - rhs) < 1e-12
        # contraction in every H^s
        for s in (0.0, 0.3, 1.0):
            assert sobolev_norm(pv, s) <= sobolev_norm(v, s) + 1e-14


def test_projection_tail_bound():
    # |(1 - P_N) u|_{H^s} <= N^{s - sigma} |u|_{H^sigma} for s < sigma
    rng = np.random.default_rng(3)
    for _ in range(50):
        u = random_field(rng, 24)
        for n_keep in (2, 5, 11):
            tail = u - project(u, n_keep)
            for s, sigma in ((0.0, 0.5), (0.2, 0.45), (0.25, 1.0)):
                bound = n_keep ** (s - sigma) * sobolev_norm(u, sigma)
                assert sobolev_norm(tail, s) <= bound + 1e-12


def test_integral_u3_examples():
    assert integral_u3(1.7 * cosine_mode(1)) == pytest.approx(0.0, abs=1e-12)
    u = cosine_mode(1, 2) + cosine_mode(2)
    assert integral_u3(u) == pytest.approx(3.0 / (2.0 * SQRT_PI), abs=1e-12)
    assert integral_u3(zero_field(2)) == 0.0


def test_integral_u3_convolution_vs_quadrature():
    rng = np.random.default_rng(4)
    for _ in range(100):
        u = random_field(rng, int(rng.integers(1, 20)))
        if sobolev_norm(u, 0.0) > 2.0:
            u = (2.0 / sobolev_norm(u, 0.0)) * u
        assert abs(integral_u3(u) - integral_u3_quadrature(u)) < 1e-10


def test_hamiltonian_examples():
    a = 0.8
    assert hamiltonian(a * cosine_mode(1)) == pytest.approx(a * a / 2.0, abs=1e-12)
    assert hamiltonian(zero_field(1)) == 0.0
    u = cosine_mode(1, 2) + cosine_mode(2)
    expect = 2.5 - 1.0 / (4.0 * SQRT_PI)
    assert hamiltonian(u) == pytest.approx(expect, abs=1e-12)


def test_parseval_against_grid_quadrature():
    rng = np.random.default_rng(5)
    for _ in range(100):
        u = random_field(rng, int(rng.integers(1, 24)))
        n = 8 * u.n_modes + 8
        vals = evaluate(u, n)
        quad = np.sum(vals**2) * (2.0 * np.pi / n)
        norm_sq = sobolev_norm(u, 0.0) ** 2
        assert abs(quad - norm_sq) <= 1e-10 * max(norm_sq, 1e-30)


def test_field_arithmetic_and_padding():
    u = cosine_mode(1)
    v = sine_mode(3)
    w = u + v
    assert w.n_modes == 3
    assert np.allclose((w - v).modes[:1], u.modes)
    assert np.allclose((2.0 * u).modes, 2.0 * u.modes)
    with pytest.raises(ValueError):
        u.padded(0)


def test_nonfinite_modes_rejected():
    with pytest.raises(ValueError):
        make_field([np.nan + 0j])
