import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import column
from test_lattice import ten_edge_patch
from toric_negativity.errors import DomainError, ResourceLimitError, UnsupportedSettingError
from toric_negativity.groundstate import FluxCoefficients, StateVector, generic_state, psi0, schmidt_spectrum
from toric_negativity.harness import generate_setting
from toric_negativity.entanglement import (
    DensityMatrix,
    check_classical_structure,
    entanglement_report,
    extended_negativity_minus,
    extended_negativity_plus,
    log_negativity,
    mutual_information,
    negativity,
    partial_transpose,
    pt_spectrum,
    pure_pt_spectrum,
    reduce,
    renyi,
    state_entanglement_report,
    state_log_negativity,
    state_mutual_information,
    state_pt_spectrum,
    von_neumann,
)


def bell():
    v = np.zeros(4, dtype=complex)
    v[[0, 3]] = 1 / math.sqrt(2)
    return DensityMatrix((0, 1), np.outer(v, v.conj()))


def random_rho(rng, k, rank=None):
    rank = rank or (1 << k)
    G = rng.normal(size=(1 << k, rank)) + 1j * rng.normal(size=(1 << k, rank))
    m = G @ G.conj().T
    return DensityMatrix(tuple(range(k)), m / np.trace(m).real)


def test_reduce_examples(t33):
    psi = psi0(t33)
    part = reduce(psi, range(6))
    one = reduce(psi, [4])
    assert np.allclose(one.matrix, np.eye(2) / 2)
    nested = reduce(reduce(psi, [0, 1, 2, 3, 4, 5]), [1, 4])
    assert np.allclose(nested.matrix, reduce(psi, [1, 4]).matrix)
    assert part.trace == pytest.approx(1) and part.hermiticity_error() < 1e-12
    with pytest.raises(ResourceLimitError):
        reduce(psi, range(14))
    with pytest.raises(DomainError):
        reduce(one, [5])


def test_reduce_keep_all_is_pure():
    psi = psi0(__import__("toric_negativity.lattice", fromlist=["x"]).build_torus(2, 2))
    rho = DensityMatrix.from_pure(psi)
    lam = rho.eigenvalues()
    assert lam[-1] == pytest.approx(1) and np.allclose(lam[:-1], 0, atol=1e-12)
    assert np.allclose(rho.matrix, np.outer(psi.amplitudes, psi.amplitudes.conj()))


def test_partial_transpose_examples():
    rng = np.random.default_rng(0)
    rho = random_rho(rng, 3)
    assert np.allclose(partial_transpose(rho, []), rho.matrix)
    assert np.allclose(partial_transpose(rho, [0, 1, 2]), rho.matrix.T)
    pt = partial_transpose(rho, [1])
    assert np.allclose(pt, pt.conj().T) and np.trace(pt).real == pytest.approx(1)
    assert np.allclose(np.sort(pt_spectrum(bell(), [0])), [-0.5, 0.5, 0.5, 0.5])
    with pytest.raises(DomainError):
        partial_transpose(rho, [7])


def test_negativity_examples():
    assert negativity(bell(), [0]) == pytest.approx(0.5)
    assert log_negativity(bell(), [0]) == pytest.approx(1)
    diag = DensityMatrix((0, 1), np.diag([0.1, 0.2, 0.3, 0.4]).astype(complex))
    assert log_negativity(diag, [0]) == pytest.approx(0, abs=1e-12)
    assert negativity(diag, [0]) == pytest.approx(0, abs=1e-12)


def test_ten_edge_patch_log_negativity(t43):
    psi = psi0(t43)
    A = ten_edge_patch(t43)
    lam = pure_pt_spectrum(schmidt_spectrum(psi, A).probabilities)
    assert state_log_negativity(psi, A) == pytest.approx(7.0, abs=1e-9)
    assert log_negativity(lam) == pytest.approx(7.0, abs=1e-9)
    assert negativity(lam) == pytest.approx(63.5, abs=1e-7)


def test_uniform_flux_strip(t42, basis42):
    psi = generic_state(t42, FluxCoefficients.uniform(), basis=basis42)
    A = column(t42, 0)
    assert state_log_negativity(psi, A) == pytest.approx(2 + 1 + 1, abs=1e-9)


def test_entropies():
    mixed = DensityMatrix((0, 1, 2), np.eye(8, dtype=complex) / 8)
    for q in (0.3, 0.5, 2.0, 3.0):
        assert renyi(mixed, q) == pytest.approx(3)
    assert renyi(mixed, 1) == von_neumann(mixed) == pytest.approx(3)
    with pytest.raises(DomainError):
        renyi(mixed, 0)


def test_pure_state_renyi_half_is_log_negativity(t33):
    psi = psi0(t33)
    A = [t33.h(1, 1), t33.v(1, 1), t33.h(0, 1)]  # 4 boundary plaquettes
    spec = schmidt_spectrum(psi, A)
    for q in (0.5, 1.0, 2.0):
        assert spec.renyi(q) == pytest.approx(3, abs=1e-10)
    assert spec.log_negativity == pytest.approx(spec.renyi(0.5))
    assert renyi(reduce(psi, A), 2.0) == pytest.approx(3, abs=1e-10)


def test_extended_negativity_examples():
    rng = np.random.default_rng(4)
    rho = random_rho(rng, 3, rank=2)
    assert extended_negativity_plus(rho, [0], 0.5) == pytest.approx(log_negativity(rho, [0]))
    mixed = DensityMatrix((0, 1), np.eye(4, dtype=complex) / 4)
    for a in (0.3, 0.7, 2.0):
        # flat spectrum 1/4: log2(4^(1-2a)) / (2(1-a))
        assert extended_negativity_plus(mixed, [0], a) == pytest.approx((1 - 2 * a) / (1 - a))
        assert renyi(mixed, a) == pytest.approx(2)
    with pytest.raises(DomainError):
        extended_negativity_plus(rho, [0], 1.0)
    with pytest.raises(DomainError):
        extended_negativity_minus(rho, [0], 0.5)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2 ** 31), st.sampled_from([0.3, 0.7, 2.0, 3.0]))
def test_pure_extended_identities(k, seed, alpha):
    rng = np.random.default_rng(seed)
    amp = rng.normal(size=1 << k) + 1j * rng.normal(size=1 << k)
    psi = StateVector.from_dense(amp / np.linalg.norm(amp))
    A = list(range(k // 2))
    lam = pt_spectrum(DensityMatrix.from_pure(psi), A)
    rho_A = reduce(psi, A)
    assert extended_negativity_plus(lam, alpha=alpha) == pytest.approx(renyi(rho_A, alpha), abs=1e-8)
    assert extended_negativity_minus(lam, alpha=alpha) == pytest.approx(renyi(rho_A, 2 * alpha), abs=1e-8)
    assert np.allclose(np.sort(lam)[np.abs(np.sort(lam)) > 1e-12],
                       [x for x in pure_pt_spectrum(schmidt_spectrum(psi, A).probabilities) if abs(x) > 1e-12])


def test_mutual_information_examples(t42, basis42):
    rng = np.random.default_rng(6)
    prod = random_rho(rng, 1).tensor(DensityMatrix((1,), random_rho(rng, 1).matrix))
    assert mutual_information(prod, [0]) == pytest.approx(0, abs=1e-10)
    amp = rng.normal(size=8) + 1j * rng.normal(size=8)
    pure = DensityMatrix.from_pure(StateVector.from_dense(amp / np.linalg.norm(amp)))
    assert mutual_information(pure, [0]) == pytest.approx(2 * von_neumann(reduce(pure, [0])))
    A, B, _ = generate_setting(t42, "f")
    psi = generic_state(t42, FluxCoefficients.uniform(), basis=basis42)
    assert state_mutual_information(psi, A, B) == pytest.approx(2, abs=1e-9)
    rho = reduce(psi, A.sorted() + B.sorted())
    assert mutual_information(rho, A.sorted()) == pytest.approx(2, abs=1e-9)
    assert log_negativity(rho, A.sorted()) == pytest.approx(0, abs=1e-9)


def test_classical_structure(t42, basis42):
    A, B, _ = generate_setting(t42, "f")
    rep = check_classical_structure(t42, A, B, [1, 0, 0, 0], basis=basis42)
    assert rep.product_deviation < 1e-12
    rep = check_classical_structure(t42, A, B, FluxCoefficients.uniform(), basis=basis42)
    assert rep.reconstruction_deviation < 1e-10 and rep.overlap_deviation < 1e-10
    assert rep.product_deviation > 1e-3  # classically correlated, not a product
    A, B, _ = generate_setting(t42, "a")
    with pytest.raises(UnsupportedSettingError):
        check_classical_structure(t42, A, B, FluxCoefficients.uniform(), basis=basis42)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 31), st.permutations(range(4)))
def test_basis_independence(seed, perm):
    rng = np.random.default_rng(seed)
    rho = random_rho(rng, 4, rank=2)
    A = [0, 2]
    en = log_negativity(rho, A)
    assert log_negativity(rho.reorder(perm), A) == pytest.approx(en, abs=1e-10)
    # local unitary on A
    U = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0]
    full = np.kron(np.eye(4), np.kron(U, np.eye(2)))  # acts on edge 2 (third least significant bit)
    turned = DensityMatrix(rho.kept, full @ rho.matrix @ full.conj().T)
    assert log_negativity(turned, A) == pytest.approx(en, abs=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 31), st.integers(1, 3))
def test_transpose_side_symmetry(seed, a):
    rng = np.random.default_rng(seed)
    rho = random_rho(rng, 4, rank=3)
    A, B = list(range(a)), list(range(a, 4))
    assert np.allclose(pt_spectrum(rho, A), pt_spectrum(rho, B), atol=1e-10)
    en = log_negativity(rho, A)
    assert en >= -1e-9
    assert en == pytest.approx(math.log2(1 + 2 * negativity(rho, A)), abs=1e-9)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_additivity(seed):
    rng = np.random.default_rng(seed)
    r1, r2 = random_rho(rng, 2, 2), random_rho(rng, 2, 1)
    r2 = DensityMatrix((2, 3), r2.matrix)
    joint = r1.tensor(r2)
    assert log_negativity(joint, [0, 2]) == pytest.approx(log_negativity(r1, [0]) + log_negativity(r2, [2]), abs=1e-9)


@pytest.mark.parametrize("case", ["far", "adjacent", "ragged"])
def test_dense_and_compressed_routes_agree(t42, basis42, case):
    psi = generic_state(t42, FluxCoefficients.random(np.random.default_rng(7)), basis=basis42)
    A = column(t42, 0)
    B = {"far": column(t42, 2), "adjacent": column(t42, 1),
         "ragged": column(t42, 1)[:2] + column(t42, 3)}[case]
    dense = pt_spectrum(reduce(psi, A + B), A)
    fast = state_pt_spectrum(psi, A, B)
    assert log_negativity(fast) == pytest.approx(log_negativity(dense), abs=1e-10)
    nz = dense[np.abs(dense) > 1e-12]
    assert np.allclose(np.sort(nz), np.sort(fast[np.abs(fast) > 1e-12]), atol=1e-10)


def test_compressed_cap(t43):
    A = column(t43, 0, 1)
    B = column(t43, 2, 3)
    with pytest.raises(ResourceLimitError):
        state_pt_spectrum(psi0(t43), A, B, max_dim=16)
    with pytest.raises(DomainError):
        state_pt_spectrum(psi0(t43), A, A)


def test_reports(t42, basis42):
    rho = reduce(basis42["I"], column(t42, 0) + column(t42, 2))
    rep = entanglement_report(rho, column(t42, 0))
    doc = json.loads(rep.to_json())
    assert doc["log_negativity"] == pytest.approx(0, abs=1e-9)
    assert rep.min_pt_eigenvalue >= -1e-10
    srep = state_entanglement_report(basis42["I"], column(t42, 0))
    assert srep.log_negativity == pytest.approx(2, abs=1e-9)
    assert srep.to_dict()["von_neumann"] == pytest.approx(2, abs=1e-9)
