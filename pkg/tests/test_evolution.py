"""Tests for propagators, evolved observables, and squeezing measures."""

import dataclasses
import math
import random

import pytest
from mpmath import mp

from countertwist import (
    DEFAULT_PRECISION,
    TIME_SERIES_COLUMNS,
    BasisOrdering,
    DenseOperator,
    HalfInt,
    IllConditionedError,
    InternalConsistencyError,
    InvalidInputError,
    NumericFailureError,
    ObservableSet,
    Propagator,
    PropagatorMethod,
    StateVector,
    TimeSeries,
    build_h_f,
    build_h_ta,
    chiral_operator,
    coherent_initial_state,
    correlation_xz,
    heisenberg_expectations,
    optimal_xi,
    propagator_spectral,
    propagator_taylor,
    spectrum,
    time_series,
    wigner_rotation_y,
    xi_y,
    xi_z,
)

SEED = 20260825


@pytest.fixture(autouse=True)
def _ambient_precision():
    old = mp.dps
    mp.dps = 45
    yield
    mp.dps = old


def _spin(twoj: int) -> HalfInt:
    return HalfInt(twoj)


def _identity_dev(u: Propagator) -> mp.mpf:
    ident = DenseOperator.identity(u.matrix.basis, u.matrix.precision)
    return u.matrix.max_abs_diff(ident)


def _unitarity_dev(u: Propagator) -> mp.mpf:
    gram = u.matrix.dagger().matmul(u.matrix)
    n = u.matrix.dim
    return max(
        abs(gram.entries[a][b] - (1 if a == b else 0))
        for a in range(n)
        for b in range(n)
    )


def _spectral(twoj: int, tau, precision: int = DEFAULT_PRECISION) -> Propagator:
    j = _spin(twoj)
    report = spectrum(j, precision)
    h = build_h_ta(j, 1.0, precision)
    return propagator_spectral(j, tau, report, h, precision)


# ---------------------------------------------------------------------------
# Closed-form references for j=2 (five-state chain)
# ---------------------------------------------------------------------------


def _u_closed_j2(s):
    """Exact j=2 propagator: 2x2-blockable trig entries in the m basis."""
    c = mp.cos(2 * mp.sqrt(3) * s)
    sn = mp.sin(2 * mp.sqrt(3) * s)
    c3, s3 = mp.cos(3 * s), mp.sin(3 * s)
    r2 = mp.sqrt(2)
    return [
        [(1 + c) / 2, 0, -sn / r2, 0, (1 - c) / 2],
        [0, c3, 0, -s3, 0],
        [sn / r2, 0, c, 0, -sn / r2],
        [0, s3, 0, c3, 0],
        [(1 - c) / 2, 0, sn / r2, 0, (1 + c) / 2],
    ]


def _jx_closed_j2(s):
    r3 = mp.sqrt(3)
    return (
        mp.cos(3 * s) * (1 + 3 * mp.cos(2 * r3 * s))
        + r3 * mp.sin(3 * s) * mp.sin(2 * r3 * s)
    ) / 2


def _var_y_closed_j2(s):
    r3 = mp.sqrt(3)
    return (
        17
        - 6 * mp.cos(6 * s)
        - 6 * mp.cos(2 * r3 * s)
        + 3 * mp.cos(4 * r3 * s)
    ) / 8


def _var_z_closed_j2(s):
    r3 = mp.sqrt(3)
    return (
        7
        - 3 * mp.cos(4 * r3 * s)
        - (mp.sin(6 * s) + r3 * mp.sin(2 * r3 * s)) ** 2
    ) / 4


def _corr_closed_j2(s):
    r3 = mp.sqrt(3)
    return (
        -mp.mpf(3)
        / 2
        * mp.cos(r3 * s)
        * (
            (1 - r3) * mp.sin((3 - r3) * s)
            + (1 + r3) * mp.sin((3 + r3) * s)
        )
    )


def _xi_y_closed_j2(s):
    denom = abs(2 * _jx_closed_j2(s))
    return mp.sqrt(2) * mp.sqrt(8 * _var_y_closed_j2(s)) / denom


def _xi_z_closed_j2(s):
    denom = abs(2 * _jx_closed_j2(s))
    return 2 * mp.sqrt(4 * _var_z_closed_j2(s)) / denom


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


class TestStateVector:
    def test_norm_enforced(self):
        basis = BasisOrdering.for_spin(HalfInt(1))
        good = StateVector(
            basis=basis,
            amplitudes=(mp.mpc(1) / mp.sqrt(2), mp.mpc(0, 1) / mp.sqrt(2)),
            precision=34,
        )
        assert good.dim == 2
        with pytest.raises(InternalConsistencyError):
            StateVector(
                basis=basis, amplitudes=(mp.mpc(1), mp.mpc(1)), precision=34
            )

    def test_length_enforced(self):
        basis = BasisOrdering.for_spin(HalfInt(1))
        with pytest.raises(InternalConsistencyError):
            StateVector(basis=basis, amplitudes=(mp.mpc(1),), precision=34)


class TestPropagatorType:
    def test_non_unitary_rejected(self):
        basis = BasisOrdering.for_spin(HalfInt(1))
        matrix = DenseOperator.from_rows(
            basis, [[1, 0], [0, mp.mpf(1) / 2]], precision=34
        )
        with pytest.raises(NumericFailureError):
            Propagator(
                matrix=matrix, chi_t=mp.mpf(0), method=PropagatorMethod.SPECTRAL
            )

    def test_method_labels(self):
        assert PropagatorMethod.SPECTRAL.value == "spectral"
        assert PropagatorMethod.TAYLOR_ORACLE.value == "taylor_oracle"

    def test_dim(self):
        u = _spectral(4, 0.3)
        assert u.dim == 5
        assert u.method is PropagatorMethod.SPECTRAL


class TestTimeSeriesType:
    def _base(self, **overrides):
        fields = dict(
            j=HalfInt(4),
            chi=mp.mpf(1),
            precision=34,
            grid=(mp.mpf(0), mp.mpf(1)),
            columns={"xi_y": (mp.mpf(1), mp.mpf(2))},
        )
        fields.update(overrides)
        return TimeSeries(**fields)

    def test_valid(self):
        series = self._base()
        assert len(series) == 2

    def test_unknown_column(self):
        with pytest.raises(InternalConsistencyError):
            self._base(columns={"bogus": (mp.mpf(1), mp.mpf(2))})

    def test_length_mismatch(self):
        with pytest.raises(InternalConsistencyError):
            self._base(columns={"xi_y": (mp.mpf(1),)})

    def test_xi_positivity(self):
        with pytest.raises(InternalConsistencyError):
            self._base(columns={"xi_z": (mp.mpf(1), mp.mpf(0))})
        series = self._base(columns={"xi_z": (mp.mpf(1), None)})
        assert series.columns["xi_z"][1] is None


# ---------------------------------------------------------------------------
# Spectral propagator
# ---------------------------------------------------------------------------


class TestPropagatorSpectral:
    @pytest.mark.parametrize("twoj", [1, 2, 4, 7, 9])
    def test_identity_at_zero(self, twoj):
        u = _spectral(twoj, 0)
        assert _identity_dev(u) == 0
        assert u.chi_t == 0

    def test_j2_closed_form(self):
        j = _spin(4)
        report = spectrum(j)
        h = build_h_ta(j, 1.0)
        rng = random.Random(SEED)
        times = [mp.mpf(k) / 8 for k in range(-4, 20)]
        times += [mp.mpf(rng.uniform(0.0, 5.0)) for _ in range(16)]
        for s in times:
            u = propagator_spectral(j, s, report, h)
            closed = _u_closed_j2(s)
            dev = max(
                abs(u.matrix.entries[a][b] - closed[a][b])
                for a in range(5)
                for b in range(5)
            )
            assert dev < mp.mpf("1e-30"), f"chi_t={s}"

    @pytest.mark.parametrize("twoj", [2, 3, 4, 5, 8, 11])
    def test_parity_checkerboard_exact_zeros(self, twoj):
        u = _spectral(twoj, 0.83)
        n = u.matrix.dim
        for a in range(n):
            for b in range(n):
                if (a - b) % 2 == 1:
                    assert u.matrix.entries[a][b] == 0

    def test_matches_taylor_oracle_example(self):
        j = _spin(7)
        report = spectrum(j)
        h = build_h_ta(j, 1.0)
        tau = mp.mpf("0.37")
        u = propagator_spectral(j, tau, report, h)
        oracle = propagator_taylor(h, tau)
        assert u.matrix.max_abs_diff(oracle.matrix) < mp.mpf("1e-28")

    @pytest.mark.parametrize("twoj", [1, 3, 4, 6, 10, 15])
    def test_group_inverse(self, twoj):
        j = _spin(twoj)
        report = spectrum(j)
        h = build_h_ta(j, 1.0)
        tau = mp.mpf("0.77")
        forward = propagator_spectral(j, tau, report, h)
        backward = propagator_spectral(j, -tau, report, h)
        prod = forward.matrix.matmul(backward.matrix)
        ident = DenseOperator.identity(prod.basis, prod.precision)
        assert prod.max_abs_diff(ident) < mp.mpf("1e-31")

    def test_unitarity_explicit(self):
        u = _spectral(13, 1.9)
        assert _unitarity_dev(u) < mp.mpf("1e-12")
        assert _unitarity_dev(u) < mp.mpf("1e-29")

    def test_report_spin_mismatch(self):
        report = spectrum(HalfInt(2))
        h = build_h_ta(HalfInt(4), 1.0)
        with pytest.raises(InvalidInputError):
            propagator_spectral(HalfInt(4), 0.1, report, h)

    def test_hamiltonian_spin_mismatch(self):
        report = spectrum(HalfInt(4))
        h = build_h_ta(HalfInt(2), 1.0)
        with pytest.raises(InvalidInputError):
            propagator_spectral(HalfInt(4), 0.1, report, h)

    def test_zero_scale_rejected(self):
        j = HalfInt(4)
        report = spectrum(j)
        h = build_h_ta(j, 0.0)
        with pytest.raises(InvalidInputError):
            propagator_spectral(j, 0.1, report, h)

    @pytest.mark.parametrize("bad", [float("inf"), float("nan"), "later"])
    def test_bad_time_rejected(self, bad):
        j = HalfInt(4)
        report = spectrum(j)
        h = build_h_ta(j, 1.0)
        with pytest.raises(InvalidInputError):
            propagator_spectral(j, bad, report, h)

    def test_near_degenerate_report_rejected(self):
        j = HalfInt(2)
        report = spectrum(j)
        h = build_h_ta(j, 1.0)
        squeezed = dataclasses.replace(
            report.eigenvalues[-1], value=mp.mpf("1e-21")
        )
        tight = dataclasses.replace(
            report,
            eigenvalues=report.eigenvalues[:-1] + (squeezed,),
            pairing_verified=False,
        )
        with pytest.raises(IllConditionedError):
            propagator_spectral(j, 0.1, tight, h)

    def test_large_spin_needs_higher_precision(self):
        j = HalfInt(60)
        report = spectrum(j)
        h = build_h_ta(j, 1.0)
        with pytest.raises(IllConditionedError):
            propagator_spectral(j, 0.3, report, h)

    def test_large_spin_succeeds_at_higher_precision(self):
        j = HalfInt(60)
        report = spectrum(j, precision=50)
        h = build_h_ta(j, 1.0, precision=50)
        u = propagator_spectral(j, 0.3, report, h, precision=50)
        assert _unitarity_dev(u) < mp.mpf("1e-44")

    def test_deterministic(self):
        first = _spectral(9, 1.234)
        second = _spectral(9, 1.234)
        assert first.matrix.entries == second.matrix.entries


# ---------------------------------------------------------------------------
# Taylor oracle
# ---------------------------------------------------------------------------


class TestPropagatorTaylor:
    def test_zero_hamiltonian_identity(self):
        h = build_h_ta(HalfInt(1), 1.0)
        for tau in (0, 1.7, -3.0):
            u = propagator_taylor(h, tau)
            assert _identity_dev(u) == 0
            assert u.method is PropagatorMethod.TAYLOR_ORACLE

    def test_group_inverse(self):
        h = build_h_ta(HalfInt(7), 1.0)
        forward = propagator_taylor(h, mp.mpf("1.1"))
        backward = propagator_taylor(h, mp.mpf("-1.1"))
        prod = forward.matrix.matmul(backward.matrix)
        ident = DenseOperator.identity(prod.basis, prod.precision)
        assert prod.max_abs_diff(ident) < mp.mpf("1e-31")

    def test_scale_respected(self):
        j = HalfInt(4)
        doubled = build_h_ta(j, 2.0)
        plain = build_h_ta(j, 1.0)
        u_doubled = propagator_taylor(doubled, 0.9)
        u_plain = propagator_taylor(plain, 0.9)
        assert u_doubled.matrix.max_abs_diff(u_plain.matrix) < mp.mpf("1e-32")


ORACLE_TIME_COUNTS = {twoj: 20 for twoj in range(1, 11)}
ORACLE_TIME_COUNTS.update({twoj: 8 for twoj in range(11, 17)})
ORACLE_TIME_COUNTS.update({twoj: 5 for twoj in range(17, 21)})


@pytest.mark.parametrize("twoj", sorted(ORACLE_TIME_COUNTS))
def test_spectral_agrees_with_taylor(twoj):
    """Independent construction routes coincide far below the 1e-10 contract."""
    j = _spin(twoj)
    report = spectrum(j)
    h = build_h_ta(j, 1.0)
    rng = random.Random(SEED + twoj)
    worst = mp.mpf(0)
    for _ in range(ORACLE_TIME_COUNTS[twoj]):
        tau = mp.mpf(rng.uniform(0.01, 1.8))
        u = propagator_spectral(j, tau, report, h)
        oracle = propagator_taylor(h, tau)
        worst = max(worst, u.matrix.max_abs_diff(oracle.matrix))
    assert worst < mp.mpf("1e-10")
    assert worst < mp.mpf("1e-28")


# ---------------------------------------------------------------------------
# Unitarity across the spin range
# ---------------------------------------------------------------------------


UNITARITY_SPINS = list(range(21, 45)) + [46, 49, 52, 55, 58, 60]


@pytest.mark.parametrize("twoj", UNITARITY_SPINS)
def test_unitarity_large_spins(twoj):
    """Construction certifies unitarity; quasi-degenerate spins retry at 50."""
    tau = 0.1 + (7 * twoj % 23) / 23 * (2.0 if twoj <= 40 else 0.4)
    try:
        u = _spectral(twoj, tau)
    except IllConditionedError:
        u = _spectral(twoj, tau, precision=50)
    assert u.matrix.dim == twoj + 1


# ---------------------------------------------------------------------------
# Chiral symmetry of the dynamics
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("twoj", list(range(1, 21)))
def test_chiral_conjugation_reverses_time(twoj):
    j = _spin(twoj)
    report = spectrum(j)
    h = build_h_ta(j, 1.0)
    tau = mp.mpf("0.61")
    forward = propagator_spectral(j, tau, report, h)
    backward = propagator_spectral(j, -tau, report, h)
    r = chiral_operator(j)
    conjugated = r.matmul(forward.matrix).matmul(r.dagger())
    assert conjugated.max_abs_diff(backward.matrix) < mp.mpf("1e-10")
    assert conjugated.max_abs_diff(backward.matrix) < mp.mpf("1e-29")


def test_chiral_conjugation_with_field():
    """The z-field Hamiltonian still anticommutes with the chiral flip."""
    j = _spin(5)
    h = build_h_f(j, 1.0, 0.8)
    r = chiral_operator(j)
    anti = h.matmul(r).add(r.matmul(h))
    assert anti.max_abs() < mp.mpf("1e-32")


# ---------------------------------------------------------------------------
# Coherent initial state
# ---------------------------------------------------------------------------


class TestCoherentInitialState:
    def test_j2_amplitudes(self):
        state = coherent_initial_state(HalfInt(4))
        expected = [
            mp.mpf(1) / 4,
            mp.mpf(1) / 2,
            mp.sqrt(6) / 4,
            mp.mpf(1) / 2,
            mp.mpf(1) / 4,
        ]
        for amp, ref in zip(state.amplitudes, expected):
            assert abs(amp - ref) < mp.mpf("1e-33")

    @pytest.mark.parametrize("twoj", [1, 2, 3, 4, 5, 8, 11])
    def test_matches_quarter_turn_rotation(self, twoj):
        j = _spin(twoj)
        state = coherent_initial_state(j)
        with mp.workdps(45):
            quarter_turn = -mp.pi / 2
        rotation = wigner_rotation_y(j, quarter_turn)
        column = [rotation.entries[a][0] for a in range(j.n_states)]
        dev = max(
            abs(amp - ref) for amp, ref in zip(state.amplitudes, column)
        )
        assert dev < mp.mpf("1e-32")

    @pytest.mark.parametrize("twoj", [1, 2, 3, 4, 5, 6, 7, 8, 13])
    def test_mean_spin_and_isotropy(self, twoj):
        j = _spin(twoj)
        state = coherent_initial_state(j)
        u = _spectral(twoj, 0)
        obs = heisenberg_expectations(state, u, j)
        half = mp.mpf(twoj) / 2
        assert abs(obs.mean_jx - half) < mp.mpf("1e-32")
        assert abs(obs.mean_jy) < mp.mpf("1e-32")
        assert abs(obs.mean_jz) < mp.mpf("1e-32")
        assert abs(obs.var_jy - half / 2) < mp.mpf("1e-32")
        assert abs(obs.var_jz - half / 2) < mp.mpf("1e-32")
        assert obs.var_jx < mp.mpf("1e-32")

    def test_precision_honored(self):
        state = coherent_initial_state(HalfInt(4), precision=60)
        with mp.workdps(70):
            dev = abs(state.amplitudes[2] - mp.sqrt(6) / 4)
            assert dev < mp.mpf("1e-58")


# ---------------------------------------------------------------------------
# Heisenberg-picture observables
# ---------------------------------------------------------------------------


class TestHeisenbergExpectations:
    def test_t0_reference_values(self):
        j = HalfInt(4)
        state = coherent_initial_state(j)
        obs = heisenberg_expectations(state, _spectral(4, 0), j)
        assert abs(obs.mean_jx - 2) < mp.mpf("1e-32")
        assert abs(obs.var_jy - 1) < mp.mpf("1e-32")
        assert abs(obs.var_jz - 1) < mp.mpf("1e-32")
        assert abs(obs.casimir - 6) < mp.mpf("1e-32")

    def test_mean_jx_closed_form(self):
        j = HalfInt(4)
        state = coherent_initial_state(j)
        s = mp.mpf("0.4")
        obs = heisenberg_expectations(state, _spectral(4, s), j)
        assert abs(obs.mean_jx - _jx_closed_j2(s)) < mp.mpf("1e-30")

    @pytest.mark.parametrize("twoj", [1, 2, 3, 4, 5, 7, 9, 12])
    def test_casimir_and_energy_conserved(self, twoj):
        j = _spin(twoj)
        report = spectrum(j)
        h = build_h_ta(j, 1.0)
        state = coherent_initial_state(j)
        casimir_ref = mp.mpf(twoj) * (twoj + 2) / 4
        rng = random.Random(SEED + 100 + twoj)
        for _ in range(4):
            tau = mp.mpf(rng.uniform(0.0, 3.0))
            u = propagator_spectral(j, tau, report, h)
            obs = heisenberg_expectations(state, u, j)
            assert abs(obs.casimir - casimir_ref) < mp.mpf("1e-30")
            phi = u.matrix.matvec(state.amplitudes)
            energy = mp.fsum(
                mp.conj(phi[a]) * x
                for a, x in enumerate(h.matvec(phi))
            )
            assert abs(energy) < mp.mpf("1e-30")

    def test_dimension_mismatch(self):
        state = coherent_initial_state(HalfInt(2))
        u = _spectral(4, 0.5)
        with pytest.raises(InvalidInputError):
            heisenberg_expectations(state, u, HalfInt(4))
        with pytest.raises(InvalidInputError):
            heisenberg_expectations(
                coherent_initial_state(HalfInt(4)), u, HalfInt(2)
            )

    def test_means_are_real_scalars(self):
        j = HalfInt(5)
        state = coherent_initial_state(j)
        obs = heisenberg_expectations(state, _spectral(5, 0.9), j)
        for value in (obs.mean_jx, obs.mean_jy, obs.mean_jz, obs.corr_xz):
            assert isinstance(value, mp.mpf)

    def test_variance_clamp_nonnegative(self):
        j = HalfInt(4)
        state = coherent_initial_state(j)
        obs = heisenberg_expectations(state, _spectral(4, 0), j)
        assert obs.var_jx >= 0


# ---------------------------------------------------------------------------
# Squeezing parameters against the closed forms
# ---------------------------------------------------------------------------


def _j2_observables(s):
    j = HalfInt(4)
    state = coherent_initial_state(j)
    return heisenberg_expectations(state, _spectral(4, s), j)


class TestSqueezingClosedForms:
    def test_unity_at_zero(self):
        j = HalfInt(4)
        obs = _j2_observables(mp.mpf(0))
        assert abs(xi_y(obs, j) - 1) < mp.mpf("1e-32")
        assert abs(xi_z(obs, j) - 1) < mp.mpf("1e-32")
        assert abs(_xi_y_closed_j2(mp.mpf(0)) - 1) < mp.mpf("1e-40")
        assert abs(_xi_z_closed_j2(mp.mpf(0)) - 1) < mp.mpf("1e-40")

    def test_closed_forms_on_grid(self):
        j = HalfInt(4)
        report = spectrum(j)
        h = build_h_ta(j, 1.0)
        state = coherent_initial_state(j)
        worst_y = worst_z = worst_c = mp.mpf(0)
        for k in range(1, 81):
            s = mp.mpf(3) * k / 80
            u = propagator_spectral(j, s, report, h)
            obs = heisenberg_expectations(state, u, j)
            value_y, value_z = xi_y(obs, j), xi_z(obs, j)
            assert value_y is not None and value_z is not None
            worst_y = max(worst_y, abs(value_y - _xi_y_closed_j2(s)))
            worst_z = max(worst_z, abs(value_z - _xi_z_closed_j2(s)))
            worst_c = max(
                worst_c, abs(correlation_xz(obs) - _corr_closed_j2(s))
            )
        assert worst_y < mp.mpf("1e-28")
        assert worst_z < mp.mpf("1e-28")
        assert worst_c < mp.mpf("1e-30")

    def test_correlation_zero_at_start(self):
        obs = _j2_observables(mp.mpf(0))
        assert abs(correlation_xz(obs)) < mp.mpf("1e-32")

    def test_variances_match_closed_forms(self):
        s = mp.mpf("1.234")
        obs = _j2_observables(s)
        assert abs(obs.var_jy - _var_y_closed_j2(s)) < mp.mpf("1e-30")
        assert abs(obs.var_jz - _var_z_closed_j2(s)) < mp.mpf("1e-30")


def _fake_obs_with_mean(mean_jx):
    return ObservableSet(
        j=HalfInt(4),
        chi_t=mp.mpf("0.5"),
        precision=34,
        mean_jx=mp.mpf(mean_jx),
        mean_jy=mp.mpf(0),
        mean_jz=mp.mpf(0),
        second_jx=mp.mpf(4),
        second_jy=mp.mpf(1),
        second_jz=mp.mpf(2),
        cov_yz=mp.mpf("0.25"),
        corr_xz=mp.mpf(0),
    )


class TestUndefinedSqueezing:
    def test_vanishing_mean_spin_gives_none(self):
        obs = _fake_obs_with_mean("1e-20")
        j = HalfInt(4)
        assert xi_y(obs, j) is None
        assert xi_z(obs, j) is None
        assert optimal_xi(obs, j) is None

    def test_above_threshold_defined(self):
        obs = _fake_obs_with_mean("1e-10")
        j = HalfInt(4)
        assert xi_y(obs, j) is not None
        assert optimal_xi(obs, j) is not None

    def test_spin_mismatch_rejected(self):
        obs = _fake_obs_with_mean(2)
        with pytest.raises(InvalidInputError):
            xi_y(obs, HalfInt(2))
        with pytest.raises(InvalidInputError):
            optimal_xi(obs, HalfInt(2))


# ---------------------------------------------------------------------------
# Optimal squeezing quadrature
# ---------------------------------------------------------------------------


def _scan_min_variance(obs, points=10**4):
    best = None
    for k in range(points):
        phi = mp.pi * k / points
        variance = (
            mp.cos(phi) ** 2 * obs.var_jy
            + mp.sin(phi) ** 2 * obs.var_jz
            + 2 * mp.cos(phi) * mp.sin(phi) * obs.cov_yz
        )
        if best is None or variance < best:
            best = variance
    return best


class TestOptimalXi:
    def test_isotropic_start(self):
        j = HalfInt(4)
        obs = _j2_observables(mp.mpf(0))
        xi_min, angle = optimal_xi(obs, j)
        assert abs(xi_min - 1) < mp.mpf("1e-32")
        assert angle == 0

    def test_brute_force_scan_example(self):
        j = HalfInt(4)
        obs = _j2_observables(mp.mpf("0.25"))
        xi_min, angle = optimal_xi(obs, j)
        scan = mp.sqrt(4 * _scan_min_variance(obs)) / abs(obs.mean_jx)
        assert abs(xi_min - scan) < mp.mpf("1e-8")
        assert xi_min <= scan + mp.mpf("1e-30")
        assert xi_min <= xi_y(obs, j) + mp.mpf("1e-30")
        assert xi_min <= xi_z(obs, j) + mp.mpf("1e-30")
        variance_at_angle = (
            mp.cos(angle) ** 2 * obs.var_jy
            + mp.sin(angle) ** 2 * obs.var_jz
            + 2 * mp.cos(angle) * mp.sin(angle) * obs.cov_yz
        )
        half_sum = (obs.var_jy + obs.var_jz) / 2
        radius = mp.sqrt(((obs.var_jy - obs.var_jz) / 2) ** 2 + obs.cov_yz**2)
        assert abs(variance_at_angle - (half_sum - radius)) < mp.mpf("1e-30")

    def test_scan_agreement_random_pairs(self):
        rng = random.Random(SEED + 7)
        for _ in range(50):
            twoj = rng.randint(1, 10)
            j = _spin(twoj)
            state = coherent_initial_state(j)
            tau = mp.mpf(rng.uniform(0.05, 3.0))
            obs = heisenberg_expectations(state, _spectral(twoj, tau), j)
            result = optimal_xi(obs, j)
            if result is None:
                continue
            xi_min, _ = result
            scan = mp.sqrt(
                mp.mpf(twoj) * _scan_min_variance(obs, points=2000)
            ) / abs(obs.mean_jx)
            assert xi_min <= scan + mp.mpf("1e-25")
            assert scan - xi_min < mp.mpf("1e-4")

    def test_bounded_by_axis_parameters_on_grid(self):
        j = HalfInt(4)
        report = spectrum(j)
        h = build_h_ta(j, 1.0)
        state = coherent_initial_state(j)
        for k in range(1, 41):
            s = mp.mpf(3) * k / 40
            u = propagator_spectral(j, s, report, h)
            obs = heisenberg_expectations(state, u, j)
            result = optimal_xi(obs, j)
            assert result is not None
            xi_min, _ = result
            assert xi_min <= xi_y(obs, j) + mp.mpf("1e-30")
            assert xi_min <= xi_z(obs, j) + mp.mpf("1e-30")


# ---------------------------------------------------------------------------
# Time series
# ---------------------------------------------------------------------------


class TestTimeSeries:
    def test_grid_and_columns(self):
        series = time_series(HalfInt(4), 1.0, 3.0, 7)
        assert len(series) == 7
        assert series.grid[0] == 0
        assert series.grid[-1] == 3
        steps = [
            series.grid[i + 1] - series.grid[i] for i in range(6)
        ]
        assert all(abs(d - mp.mpf(1) / 2) < mp.mpf("1e-33") for d in steps)
        assert set(series.columns) == set(TIME_SERIES_COLUMNS)

    def test_column_subset(self):
        series = time_series(HalfInt(4), 1.0, 1.0, 3, observables=("xi_z",))
        assert set(series.columns) == {"xi_z"}

    def test_unknown_observable_rejected(self):
        with pytest.raises(InvalidInputError):
            time_series(HalfInt(4), 1.0, 1.0, 3, observables=("vorticity",))

    @pytest.mark.parametrize("steps", [1, 0, -2, True, 2.0])
    def test_bad_steps_rejected(self, steps):
        with pytest.raises(InvalidInputError):
            time_series(HalfInt(4), 1.0, 1.0, steps)

    @pytest.mark.parametrize("t_max", [0, -1.5, float("nan")])
    def test_bad_t_max_rejected(self, t_max):
        with pytest.raises(InvalidInputError):
            time_series(HalfInt(4), 1.0, t_max, 3)

    def test_first_row_is_initial_state(self):
        series = time_series(HalfInt(4), 1.0, 2.0, 5)
        assert abs(series.columns["jx_mean"][0] - 2) < mp.mpf("1e-32")
        assert abs(series.columns["xi_y"][0] - 1) < mp.mpf("1e-32")
        assert abs(series.columns["xi_z"][0] - 1) < mp.mpf("1e-32")
        assert abs(series.columns["corr_xz"][0]) < mp.mpf("1e-32")
        assert abs(series.columns["xi_opt"][0] - 1) < mp.mpf("1e-32")
        assert series.columns["opt_angle"][0] == 0

    def test_matches_closed_forms(self):
        series = time_series(HalfInt(4), 1.0, 2.5, 11)
        for i, s in enumerate(series.grid):
            assert abs(
                series.columns["jx_mean"][i] - _jx_closed_j2(s)
            ) < mp.mpf("1e-30")
            assert abs(
                series.columns["var_jy"][i] - _var_y_closed_j2(s)
            ) < mp.mpf("1e-30")
            assert abs(
                series.columns["corr_xz"][i] - _corr_closed_j2(s)
            ) < mp.mpf("1e-30")

    def test_coupling_scale_invariance(self):
        fast = time_series(HalfInt(4), 2.0, 1.5, 4)
        slow = time_series(HalfInt(4), 1.0, 3.0, 4)
        for i in range(4):
            assert abs(fast.grid[i] - slow.grid[i]) < mp.mpf("1e-32")
            for name in TIME_SERIES_COLUMNS:
                a, b = fast.columns[name][i], slow.columns[name][i]
                if a is None or b is None:
                    assert a is None and b is None
                else:
                    assert abs(a - b) < mp.mpf("1e-30")

    def test_zero_coupling_constant_rows(self):
        series = time_series(HalfInt(4), 0.0, 2.0, 4)
        assert [float(g) for g in series.grid] == pytest.approx(
            [0.0, 2 / 3, 4 / 3, 2.0]
        )
        for i in range(4):
            assert abs(series.columns["jx_mean"][i] - 2) < mp.mpf("1e-32")
            assert abs(series.columns["xi_y"][i] - 1) < mp.mpf("1e-32")

    def test_spin_half_trivial(self):
        series = time_series(HalfInt(1), 1.0, 3.0, 5)
        for i in range(5):
            assert abs(
                series.columns["jx_mean"][i] - mp.mpf(1) / 2
            ) < mp.mpf("1e-32")
            assert abs(
                series.columns["var_jy"][i] - mp.mpf(1) / 4
            ) < mp.mpf("1e-32")
            assert abs(
                series.columns["var_jz"][i] - mp.mpf(1) / 4
            ) < mp.mpf("1e-32")
            assert abs(series.columns["xi_y"][i] - 1) < mp.mpf("1e-32")
            assert abs(series.columns["xi_z"][i] - 1) < mp.mpf("1e-32")
            assert abs(series.columns["corr_xz"][i]) < mp.mpf("1e-32")

    def test_negative_coupling(self):
        series = time_series(HalfInt(4), -1.0, 1.0, 3)
        assert series.grid[-1] == -1
        mirror = time_series(HalfInt(4), 1.0, 1.0, 3)
        for i in range(3):
            assert abs(
                series.columns["var_jy"][i] - mirror.columns["var_jy"][i]
            ) < mp.mpf("1e-30")
            assert abs(
                series.columns["corr_xz"][i] + mirror.columns["corr_xz"][i]
            ) < mp.mpf("1e-30")

    def test_deterministic(self):
        first = time_series(HalfInt(5), 1.0, 1.7, 4)
        second = time_series(HalfInt(5), 1.0, 1.7, 4)
        assert first.grid == second.grid
        for name in TIME_SERIES_COLUMNS:
            assert first.columns[name] == second.columns[name]

    def test_fraction_inputs(self):
        from fractions import Fraction

        series = time_series(HalfInt(4), Fraction(1, 2), Fraction(2), 3)
        assert abs(series.grid[-1] - 1) < mp.mpf("1e-33")
