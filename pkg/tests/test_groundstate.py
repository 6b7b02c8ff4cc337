import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import column
from toric_negativity.errors import DomainError, InvalidLatticeError, ResourceLimitError
from toric_negativity.groundstate import (
    FLUX_LABELS,
    FluxCoefficients,
    StateVector,
    apply_pauli,
    energy,
    expectation,
    dump_state,
    flux_basis,
    flux_loops,
    flux_stabilizers,
    generic_state,
    load_state,
    psi0,
    psi0_plus_form,
    schmidt_spectrum,
    stabilizer_residual,
)
from toric_negativity.lattice import build_planar, build_torus, star_support
from toric_negativity.pauli import PauliString, gf2_rank, plaquette_operator, star_operator


def test_psi0_two_constructions_agree():
    for L in ((2, 2), (3, 2), (3, 3)):
        lat = build_torus(*L)
        assert abs(abs(psi0(lat).inner(psi0_plus_form(lat))) - 1) < 1e-10


def test_psi0_stabilized():
    lat = build_torus(3, 2)
    psi = psi0(lat)
    for s in range(lat.n_vertices):
        assert expectation(psi, star_operator(lat, s)) == pytest.approx(1)
    for p in range(lat.n_faces):
        assert expectation(psi, plaquette_operator(lat, p)) == pytest.approx(1)
    W = flux_loops(lat)
    assert expectation(psi, W["Wz1"]) == pytest.approx(1)
    assert expectation(psi, W["Wz2"]) == pytest.approx(1)
    assert energy(psi, lat) == pytest.approx(-(lat.n_vertices + lat.n_faces))


def test_psi0_support_size():
    lat = build_torus(3, 2)
    rank = gf2_rank([star_support(lat, s) for s in range(lat.n_vertices)])
    assert rank == 5
    assert psi0(lat).nnz == 2 ** rank
    assert np.allclose(np.abs(psi0(lat).values), 2 ** (-rank / 2))


def test_flux_basis_orthonormal():
    lat = build_torus(3, 2)
    basis = flux_basis(lat)
    for i in FLUX_LABELS:
        for j in FLUX_LABELS:
            assert abs(basis[i].inner(basis[j]) - (i == j)) < 1e-12
        assert stabilizer_residual(basis[i], flux_stabilizers(lat, i)) < 1e-12
    W = flux_loops(lat)
    I = basis["I"]
    assert np.allclose(apply_pauli(I, W["Wz1"]).amplitudes, I.amplitudes)
    assert abs(expectation(I, W["Wx2"])) < 1e-12
    assert np.allclose(apply_pauli(I, W["Wx2"]).amplitudes, basis["e"].amplitudes)


def test_generic_state_examples(t42, basis42):
    assert np.allclose(generic_state(t42, [1, 0, 0, 0], basis=basis42).amplitudes, basis42["I"].amplitudes)
    assert generic_state(t42, FluxCoefficients.uniform(), basis=basis42).norm == pytest.approx(1)
    r = 1 / math.sqrt(2)
    psi = generic_state(t42, [r, r, 0, 0], basis=basis42)
    assert expectation(psi, flux_loops(t42)["Wx2"]).real == pytest.approx(1)


def test_psi0_is_a_flux_superposition(t42, basis42, psi0_42):
    r = 1 / math.sqrt(2)
    psi = generic_state(t42, [r, 0, r, 0], basis=basis42)
    assert abs(abs(psi.inner(psi0_42)) - 1) < 1e-10


def test_unnormalized_c_rejected(t42):
    with pytest.raises(DomainError):
        FluxCoefficients([1, 1, 0, 0])
    with pytest.raises(DomainError):
        generic_state(t42, [0.5, 0.5, 0.5, 0.6])
    with pytest.raises(DomainError):
        FluxCoefficients([1, 0, 0])


def test_flux_coefficients_json():
    c = FluxCoefficients.random(np.random.default_rng(1))
    back = FluxCoefficients.from_json(c.to_json())
    assert np.allclose(back.array, c.array)
    assert FluxCoefficients.from_json({"m": 1}).probabilities.tolist() == [0, 0, 1, 0]
    assert FluxCoefficients.uniform()["em"] == 0.5


@settings(max_examples=15, deadline=None)
@given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=8, max_size=8))
def test_generic_state_normalized(v):
    z = np.array(v[:4]) + 1j * np.array(v[4:])
    if np.linalg.norm(z) < 1e-3:
        return
    lat = build_torus(3, 2)
    psi = generic_state(lat, FluxCoefficients.normalize(z), basis=_basis32())
    assert psi.norm == pytest.approx(1, abs=1e-12)


_CACHE = {}


def _basis32():
    if "b" not in _CACHE:
        _CACHE["b"] = flux_basis(build_torus(3, 2))
    return _CACHE["b"]


def test_schmidt_examples(t33, t42, basis42):
    psi = psi0(t33)
    spec = schmidt_spectrum(psi, [t33.h(1, 1), t33.v(1, 1)])
    assert spec.rank == 4 and spec.is_flat()
    assert np.allclose(spec.probabilities, 0.25)
    assert schmidt_spectrum(psi, []).probabilities.tolist() == [1.0]
    strip = schmidt_spectrum(basis42["I"], column(t42, 0))
    assert strip.is_flat() and strip.rank == 2 ** (2 + 2 - 2)
    assert abs(sum(strip.probabilities) - 1) < 1e-10


def test_contractible_spectrum_flux_independent(t33, basis33):
    A = sorted(star_support(t33, t33.vertex(1, 1)))
    ref = schmidt_spectrum(basis33["I"], A).probabilities
    for k in FLUX_LABELS:
        assert np.allclose(schmidt_spectrum(basis33[k], A).probabilities, ref, atol=1e-12)


def test_apply_pauli_examples(t33):
    psi = psi0(t33)
    assert np.allclose(apply_pauli(psi, PauliString.identity(t33.n)).amplitudes, psi.amplitudes)
    assert np.allclose(apply_pauli(psi, plaquette_operator(t33, 0)).amplitudes, psi.amplitudes)
    with pytest.raises(ValueError):
        apply_pauli(psi, PauliString.identity(3))


def test_apply_pauli_matches_dense():
    rng = np.random.default_rng(3)
    amp = rng.normal(size=16) + 1j * rng.normal(size=16)
    psi = StateVector.from_dense(amp)
    P = PauliString(0b0110, 0b1010, 4, -1)
    assert np.allclose(apply_pauli(psi, P).amplitudes, P.matrix() @ amp)


def test_caps_and_topology():
    with pytest.raises(ResourceLimitError):
        psi0(build_torus(5, 3))
    with pytest.raises(InvalidLatticeError):
        flux_basis(build_planar(3, 3))
    assert psi0(build_planar(3, 2)).norm == pytest.approx(1)


@pytest.mark.parametrize("suffix", [".json", ".csv"])
def test_dump_round_trip(tmp_path, t33, suffix):
    psi = generic_state(t33, FluxCoefficients.random(np.random.default_rng(5)))
    path = dump_state(psi, tmp_path / f"psi{suffix}")
    back = load_state(path, n=t33.n)
    assert abs(back.inner(psi) - 1) < 1e-12
    if suffix == ".csv":
        with pytest.raises(DomainError):
            load_state(path)
