"""Unitary time evolution and spin-squeezing observables.

Builds the propagator U = exp(-i H t) for the countertwisting Hamiltonian two
independent ways — spectral interpolation over the exact eigenvalues, and a
Taylor scaling-and-squaring oracle — then evolves the coherent initial state
and extracts means, variances, covariances, squeezing parameters, and the
optimal squeezing angle, either at a single time or over a uniform time grid.

All real/complex scalars are mpmath values computed at a requested decimal
precision; every propagator is certified unitary at construction.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp

from .charpoly import block_polynomials
from .errors import (
    IllConditionedError,
    InternalConsistencyError,
    InvalidInputError,
    NumericFailureError,
)
from .spectrum import SpectrumReport, spectrum
from .spin_algebra import (
    DEFAULT_PRECISION,
    BasisOrdering,
    DenseOperator,
    HalfInt,
    _require_precision,
    _require_spin,
    build_cartesian,
    build_h_ta,
    two_step_coupling_squared,
)

__all__ = [
    "ObservableSet",
    "Propagator",
    "PropagatorMethod",
    "StateVector",
    "TimeSeries",
    "TIME_SERIES_COLUMNS",
    "coherent_initial_state",
    "correlation_xz",
    "heisenberg_expectations",
    "optimal_xi",
    "propagator_spectral",
    "propagator_taylor",
    "time_series",
    "xi_y",
    "xi_z",
]


#: Column names produced by :func:`time_series`, in canonical order.
TIME_SERIES_COLUMNS = (
    "jx_mean",
    "var_jy",
    "var_jz",
    "xi_y",
    "xi_z",
    "corr_xz",
    "xi_opt",
    "opt_angle",
)


def _as_dimensionless_time(chi_t, precision: int):
    """Convert chi_t to a finite real mpf at the working precision."""
    with mp.workdps(precision):
        if isinstance(chi_t, Fraction):
            value = mp.mpf(chi_t.numerator) / chi_t.denominator
        else:
            try:
                value = mp.mpf(chi_t)
            except (TypeError, ValueError) as exc:
                raise InvalidInputError(
                    f"chi_t must be a real number, got {chi_t!r}"
                ) from exc
        if not mp.isfinite(value):
            raise InvalidInputError(f"chi_t must be finite, got {chi_t!r}")
        return value


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StateVector:
    """Normalized pure spin state over the m-descending basis.

    :param basis: basis ordering (m = +j ... -j).
    :param amplitudes: complex amplitudes, one per basis label.
    :param precision: decimal digits the amplitudes carry.

    Invariant: the norm is 1 to 10^(-precision+5).
    """

    basis: BasisOrdering
    amplitudes: tuple
    precision: int

    def __post_init__(self) -> None:
        if len(self.amplitudes) != self.basis.j.n_states:
            raise InternalConsistencyError(
                f"state for j={self.basis.j} needs {self.basis.j.n_states} "
                f"amplitudes, got {len(self.amplitudes)}"
            )
        with mp.workdps(self.precision):
            norm = mp.sqrt(mp.fsum(abs(a) ** 2 for a in self.amplitudes))
            if abs(norm - 1) > mp.mpf(10) ** (-self.precision + 5):
                raise InternalConsistencyError(
                    f"state norm deviates from 1 by {mp.nstr(abs(norm - 1), 5)}"
                )

    @property
    def dim(self) -> int:
        return len(self.amplitudes)


class PropagatorMethod(enum.Enum):
    """How a propagator was constructed."""

    SPECTRAL = "spectral"
    TAYLOR_ORACLE = "taylor_oracle"


@dataclass(frozen=True)
class Propagator:
    """Unitary time-evolution operator U = exp(-i H t).

    :param matrix: the dense unitary matrix.
    :param chi_t: dimensionless time (coupling times physical time).
    :param method: construction route.

    Invariant: ||U†U - I||_max < 10^(-p+5) at the matrix precision p
    (checked at construction; violation raises NumericFailureError).
    """

    matrix: DenseOperator
    chi_t: object
    method: PropagatorMethod

    def __post_init__(self) -> None:
        p = self.matrix.precision
        n = self.matrix.dim
        with mp.workdps(p + 10):
            gram = self.matrix.dagger().matmul(self.matrix)
            worst = max(
                abs(gram.entries[a][b] - (1 if a == b else 0))
                for a in range(n)
                for b in range(n)
            )
            if worst > mp.mpf(10) ** (-p + 5):
                raise NumericFailureError(
                    f"propagator fails unitarity: ||U†U - I||_max = "
                    f"{mp.nstr(worst, 5)} at precision {p}"
                )

    @property
    def dim(self) -> int:
        return self.matrix.dim


@dataclass(frozen=True)
class ObservableSet:
    """Spin moments of one evolved state at one dimensionless time.

    Means and second moments are exact-real by construction (imaginary parts
    are certified negligible before being dropped); ``cov_yz`` is the central
    symmetrized covariance (⟨{Jy,Jz}⟩/2 - ⟨Jy⟩⟨Jz⟩) while ``corr_xz`` is the
    raw symmetrized product ⟨JxJz + JzJx⟩.
    """

    j: HalfInt
    chi_t: object
    precision: int
    mean_jx: object
    mean_jy: object
    mean_jz: object
    second_jx: object
    second_jy: object
    second_jz: object
    cov_yz: object
    corr_xz: object

    def _variance(self, second, mean):
        with mp.workdps(self.precision):
            v = second - mean * mean
            return v if v > 0 else mp.mpf(0)

    @property
    def var_jx(self):
        return self._variance(self.second_jx, self.mean_jx)

    @property
    def var_jy(self):
        return self._variance(self.second_jy, self.mean_jy)

    @property
    def var_jz(self):
        return self._variance(self.second_jz, self.mean_jz)

    @property
    def casimir(self):
        """⟨Jx² + Jy² + Jz²⟩, conserved at j(j+1)."""
        with mp.workdps(self.precision):
            return self.second_jx + self.second_jy + self.second_jz


_XI_COLUMNS = frozenset({"xi_y", "xi_z", "xi_opt"})


@dataclass(frozen=True)
class TimeSeries:
    """Observables sampled on a uniform grid of dimensionless times.

    :param grid: the dimensionless times (coupling times physical time; when
        the coupling is zero the grid records the physical time itself so the
        rows stay distinguishable).
    :param columns: mapping column name -> tuple of values, None marking
        points where the quantity is undefined (vanishing mean spin).

    Invariant: every column has one entry per grid point; squeezing-parameter
    columns are positive wherever defined.
    """

    j: HalfInt
    chi: object
    precision: int
    grid: tuple
    columns: dict

    def __post_init__(self) -> None:
        for name, values in self.columns.items():
            if name not in TIME_SERIES_COLUMNS:
                raise InternalConsistencyError(f"unknown column {name!r}")
            if len(values) != len(self.grid):
                raise InternalConsistencyError(
                    f"column {name!r} has {len(values)} entries for "
                    f"{len(self.grid)} grid points"
                )
            if name in _XI_COLUMNS and any(
                v is not None and not v > 0 for v in values
            ):
                raise InternalConsistencyError(
                    f"column {name!r} must be positive where defined"
                )

    def __len__(self) -> int:
        return len(self.grid)


# ---------------------------------------------------------------------------
# Propagators
# ---------------------------------------------------------------------------


def _dimensionless_hamiltonian(h: DenseOperator, precision: int):
    """Rows of h divided by its recorded scale (coupling-independent form)."""
    with mp.workdps(precision):
        scale = mp.mpf(h.scale)
        if scale == 0:
            raise InvalidInputError(
                "Hamiltonian has zero scale; build it with coupling 1 and "
                "carry the physics in chi_t (zero coupling means chi_t = 0)"
            )
        return [[x / scale for x in row] for row in h.entries]


def _exact_dimensionless_rows(j: HalfInt, basis: BasisOrdering):
    """Scale-1 Hamiltonian rows, square roots taken at the ambient precision.

    The propagator is far more sensitive to coupling error than its target
    tolerance, so the couplings are re-evaluated from their exact integer
    squares at full working precision instead of reusing the (rounded)
    entries of the matrix passed in.
    """
    n = j.n_states
    zero = mp.mpc(0)
    rows = [[zero] * n for _ in range(n)]
    for col in range(2, n):
        m = basis.labels[col]
        coupling = mp.sqrt(mp.mpf(two_step_coupling_squared(j, m)))
        upper = mp.mpc(0, -1) * coupling / 2
        rows[col - 2][col] = upper
        rows[col][col - 2] = mp.conj(upper)
    return rows


def _offdiagonal_nonzeros(rows, n: int):
    """Per-row (column, value) lists of the nonzero off-diagonal entries."""
    nz = []
    for a in range(n):
        row = rows[a]
        nz.append(
            [(b, row[b]) for b in range(n) if b != a and row[b] != 0]
        )
    return nz


def _leja_order(values):
    """Order interpolation nodes for numerically stable Newton products.

    Starts from the largest-magnitude node, then greedily appends the node
    maximizing the product of distances to those already chosen.
    """
    remaining = [float(v) for v in values]
    order = [max(range(len(remaining)), key=lambda i: abs(remaining[i]))]
    chosen = {order[0]}
    # Track log-product of distances to avoid under/overflow.
    logs = [
        -math.inf if i in chosen else _log_distance(remaining[i], remaining[order[0]])
        for i in range(len(remaining))
    ]
    while len(order) < len(remaining):
        best = max(
            (i for i in range(len(remaining)) if i not in chosen),
            key=lambda i: logs[i],
        )
        order.append(best)
        chosen.add(best)
        for i in range(len(remaining)):
            if i not in chosen:
                logs[i] += _log_distance(remaining[i], remaining[best])
    return order


def _log_distance(x: float, y: float) -> float:
    d = abs(x - y)
    return math.log(d) if d > 0 else -math.inf


def _interpolation_guard_digits(
    span: float, chi_t: float, n_nodes: int, min_gap: float
) -> int:
    """Extra digits absorbing cancellation in the Newton form of exp.

    Three sources: the k-th Newton term has magnitude up to
    (span·|chi_t|)^k / k! while the assembled propagator has entries of order
    one, so the largest term's decimal magnitude bounds the alternating-sum
    cancellation; divided differences across nodes only ``min_gap`` apart
    subtract nearly equal values, losing log10(1/min_gap) further digits; and
    rounding noise accumulates over the order of n_nodes² scalar operations
    per entry.
    """
    guard = 15 + math.ceil(2 * math.log10(n_nodes + 1))
    if 0 < min_gap < 1:
        guard += math.ceil(-math.log10(min_gap))
    a = span * abs(chi_t)
    if a <= 1 or n_nodes <= 1:
        return guard
    log_a = math.log10(a)
    worst = max(
        k * log_a - math.lgamma(k + 1) / math.log(10)
        for k in range(1, n_nodes)
    )
    return guard + max(0, math.ceil(worst))


def _polish_nodes(j: HalfInt, seeds, precision: int, gap_floor):
    """Newton-refine eigenvalue seeds against the exact chain polynomials.

    The interpolation nodes must carry the full working precision — the
    assembled propagator is far more sensitive to node error than to any
    other rounding — so the reported eigenvalues are treated as seeds and
    sharpened on the exact integer characteristic factors of the two chains
    (each distinct eigenvalue is a simple root of one of them).
    """
    chain_a, chain_b = block_polynomials(j)
    pairs = [(chain_a, chain_a.derivative())]
    if chain_b.coefficients != chain_a.coefficients:
        pairs.append((chain_b, chain_b.derivative()))
    polished = []
    tol = mp.mpf(10) ** (-precision + 2)
    for seed in seeds:
        x = mp.mpf(seed)
        best = None
        for poly, deriv in pairs:
            slope = deriv.evaluate(x)
            if slope == 0:
                continue
            step = poly.evaluate(x) / slope
            if best is None or abs(step) < abs(best[2]):
                best = (poly, deriv, step)
        if best is None:
            raise InvalidInputError(
                "spectrum report value is not near a simple root of either "
                "chain polynomial"
            )
        poly, deriv, step = best
        for _ in range(3):
            x = x - step
            slope = deriv.evaluate(x)
            if slope == 0:
                break
            step = poly.evaluate(x) / slope
        if abs(step) > tol * (1 + abs(x)):
            raise InvalidInputError(
                "spectrum report values are not eigenvalues of this "
                "Hamiltonian"
            )
        polished.append(x)
    ordered = sorted(polished)
    if any(
        b - a < gap_floor for a, b in zip(ordered, ordered[1:])
    ):
        raise InvalidInputError(
            "spectrum report values collapse onto the same eigenvalue"
        )
    return polished


def propagator_spectral(
    j,
    chi_t,
    report: SpectrumReport,
    h: DenseOperator,
    precision: int = DEFAULT_PRECISION,
) -> Propagator:
    """Propagator U = exp(-i H t) by interpolation over the exact spectrum.

    Writes exp as the unique polynomial agreeing with it on the distinct
    eigenvalues (the confluent reduction valid for any Hermitian matrix),
    evaluated in Newton form with Leja-ordered nodes and a cancellation guard,
    exploiting the two-superdiagonal sparsity of the Hamiltonian.  The
    report's eigenvalues seed a Newton refinement on the exact chain
    polynomials at working precision, so the report's own precision does not
    limit the result.

    :param j: spin magnitude.
    :param chi_t: dimensionless time; ``h`` is reduced by its recorded scale,
        so chi_t must carry the full product of coupling and physical time.
    :param report: spectrum of the dimensionless Hamiltonian for the same j.
    :param h: the Hamiltonian matrix for the same j.
    :param precision: decimal digits of the result.
    :raises IllConditionedError: distinct eigenvalues closer than
        10^(-precision/2), where the interpolation weights blow up.
    :raises NumericFailureError: the assembled matrix fails the unitarity
        certificate (never expected when report and h are consistent).
    """
    j = _require_spin(j)
    _require_precision(precision)
    if report.j != j:
        raise InvalidInputError(
            f"spectrum report is for j={report.j}, not j={j}"
        )
    if h.basis.j != j:
        raise InvalidInputError(
            f"Hamiltonian is for j={h.basis.j}, not j={j}"
        )
    if report.dimension != j.n_states:
        raise InvalidInputError(
            "spectrum report multiplicities do not sum to 2j+1"
        )
    tau = _as_dimensionless_time(chi_t, precision + 15)

    distinct = [ev.value for ev in report.eigenvalues]
    n_nodes = len(distinct)
    min_gap = 1.0
    if n_nodes >= 2:
        with mp.workdps(precision + 15):
            gap_floor = mp.mpf(10) ** (-(precision // 2))
            smallest = min(
                distinct[i + 1] - distinct[i] for i in range(n_nodes - 1)
            )
            if smallest < gap_floor:
                raise IllConditionedError(
                    f"distinct eigenvalues only {mp.nstr(smallest, 5)} apart; "
                    f"interpolation needs them separated by at least "
                    f"{mp.nstr(gap_floor, 5)} — retry at higher precision"
                )
            min_gap = float(smallest)

    span = float(distinct[-1] - distinct[0]) if n_nodes >= 2 else 0.0
    guard = _interpolation_guard_digits(span, float(tau), n_nodes, min_gap)
    wp = precision + guard
    n = j.n_states

    with mp.workdps(wp):
        a_rows = _exact_dimensionless_rows(j, h.basis)
        given_rows = _dimensionless_hamiltonian(h, wp)
        h_tol = mp.mpf(10) ** (-h.precision + 3)
        mismatch = max(
            abs(given_rows[a][b] - a_rows[a][b])
            for a in range(n)
            for b in range(n)
        )
        if mismatch > h_tol * (1 + max(abs(x) for row in a_rows for x in row)):
            raise InvalidInputError(
                "h is not the countertwisting Hamiltonian this spectrum "
                f"describes (max coupling deviation {mp.nstr(mismatch, 5)})"
            )
        nz = _offdiagonal_nonzeros(a_rows, n)
        polished = _polish_nodes(
            j, distinct, precision, mp.mpf(10) ** (-(precision // 2))
        )
        order = _leja_order(distinct)
        nodes = [polished[i] for i in order]
        tau_w = mp.mpf(tau)
        values = [mp.exp(mp.mpc(0, -1) * x * tau_w) for x in nodes]

        # Newton divided differences on the Leja-ordered nodes.
        coeffs = list(values)
        for k in range(1, n_nodes):
            for i in range(n_nodes - 1, k - 1, -1):
                coeffs[i] = (coeffs[i] - coeffs[i - 1]) / (
                    nodes[i] - nodes[i - k]
                )

        # Horner evaluation: M <- (A - x_k) M + c_k I, sparse left factor.
        zero = mp.mpc(0)
        m_rows = [
            [coeffs[n_nodes - 1] if a == b else zero for b in range(n)]
            for a in range(n)
        ]
        for k in range(n_nodes - 2, -1, -1):
            shift = nodes[k]
            c_k = coeffs[k]
            new_rows = []
            for a in range(n):
                row_a = m_rows[a]
                parts = [(v, m_rows[b]) for b, v in nz[a]]
                if len(parts) == 2:
                    (v1, r1), (v2, r2) = parts
                    new_row = [
                        v1 * x1 + v2 * x2 - shift * xa
                        for x1, x2, xa in zip(r1, r2, row_a)
                    ]
                elif len(parts) == 1:
                    (v1, r1), = parts
                    new_row = [
                        v1 * x1 - shift * xa for x1, xa in zip(r1, row_a)
                    ]
                else:
                    new_row = [-shift * xa for xa in row_a]
                new_row[a] += c_k
                new_rows.append(new_row)
            m_rows = new_rows

    with mp.workdps(precision):
        entries = tuple(tuple(+x for x in row) for row in m_rows)
        tau_out = +tau
    matrix = DenseOperator(
        basis=h.basis, entries=entries, precision=precision
    )
    return Propagator(
        matrix=matrix, chi_t=tau_out, method=PropagatorMethod.SPECTRAL
    )


def propagator_taylor(
    h: DenseOperator, chi_t, precision: int = DEFAULT_PRECISION
) -> Propagator:
    """Propagator by scaling-and-squaring of the truncated exponential series.

    Independent of the spectral route (no eigenvalues involved): halves the
    generator until its norm is at most one, sums the Taylor series of exp to
    convergence at guarded precision, then squares back up.  Kept as a
    cross-validation oracle for :func:`propagator_spectral`.

    :param h: Hamiltonian matrix; reduced by its recorded scale as in the
        spectral route, so chi_t carries the full dimensionless time.
    """
    _require_precision(precision)
    tau = _as_dimensionless_time(chi_t, precision + 15)
    n = h.dim

    with mp.workdps(precision + 15):
        a_rows = _dimensionless_hamiltonian(h, precision + 15)
        norm = max(
            mp.fsum(abs(x) for x in row) for row in a_rows
        ) * abs(tau)
    squarings = max(0, int(math.ceil(math.log2(float(norm))))) if norm > 1 else 0
    wp = precision + 10 + squarings

    with mp.workdps(wp):
        factor = mp.mpc(0, -1) * mp.mpf(tau) / (1 << squarings)
        b_rows = [[factor * x for x in row] for row in a_rows]
        nz = _offdiagonal_nonzeros(b_rows, n)
        tol = mp.mpf(10) ** (-wp - 3)

        zero = mp.mpc(0)
        one = mp.mpc(1)
        total = [[one if a == b else zero for b in range(n)] for a in range(n)]
        term = [row[:] for row in total]
        k = 0
        while True:
            k += 1
            new_term = []
            for a in range(n):
                parts = [(v, term[b]) for b, v in nz[a]]
                if len(parts) == 2:
                    (v1, r1), (v2, r2) = parts
                    new_row = [
                        (v1 * x1 + v2 * x2) / k for x1, x2 in zip(r1, r2)
                    ]
                elif len(parts) == 1:
                    (v1, r1), = parts
                    new_row = [v1 * x1 / k for x1 in r1]
                else:
                    new_row = [zero] * n
                new_term.append(new_row)
            term = new_term
            term_max = max(abs(x) for row in term for x in row)
            for a in range(n):
                ta, sa = term[a], total[a]
                total[a] = [x + y for x, y in zip(sa, ta)]
            if term_max < tol:
                break
            if k > 40 * wp:
                raise NumericFailureError(
                    "exponential series failed to converge"
                )

        cols_cache = None
        for _ in range(squarings):
            cols_cache = [[total[a][b] for a in range(n)] for b in range(n)]
            total = [
                [mp.fdot(zip(total[a], cols_cache[b])) for b in range(n)]
                for a in range(n)
            ]

    with mp.workdps(precision):
        entries = tuple(tuple(+x for x in row) for row in total)
        tau_out = +tau
    matrix = DenseOperator(
        basis=h.basis, entries=entries, precision=precision
    )
    return Propagator(
        matrix=matrix, chi_t=tau_out, method=PropagatorMethod.TAYLOR_ORACLE
    )


# ---------------------------------------------------------------------------
# States and observables
# ---------------------------------------------------------------------------


def coherent_initial_state(j, precision: int = DEFAULT_PRECISION) -> StateVector:
    """Coherent spin state along +x: the stretched state rotated onto x.

    Amplitudes in the m-descending basis are the exact square roots of the
    symmetric binomial distribution, sqrt(C(2j, i) / 2^(2j)) — all positive,
    matching the quarter-turn rotation of |j, m=j⟩ about y.

    Mean spin (j, 0, 0); transverse variances j/2.
    """
    j = _require_spin(j)
    _require_precision(precision)
    basis = BasisOrdering.for_spin(j)
    tj = j.twice_value
    with mp.workdps(precision):
        power = mp.mpf(2) ** tj
        amplitudes = tuple(
            mp.mpc(mp.sqrt(mp.mpf(math.comb(tj, i)) / power))
            for i in range(j.n_states)
        )
    return StateVector(basis=basis, amplitudes=amplitudes, precision=precision)


def heisenberg_expectations(
    state: StateVector,
    u: Propagator,
    j,
    precision: int = DEFAULT_PRECISION,
) -> ObservableSet:
    """First and second spin moments of the evolved state.

    Evolves observables as O(t) = U† O U against the fixed initial state,
    evaluated as moments of φ = U·state.  All means are certified real to
    10^(-precision+5) scaled by the spin magnitude.

    :raises InvalidInputError: state, propagator, and j disagree in dimension.
    :raises InternalConsistencyError: a mean develops a non-negligible
        imaginary part (would indicate a broken propagator or operator).
    """
    j = _require_spin(j)
    _require_precision(precision)
    if state.basis.j != j:
        raise InvalidInputError(f"state is for j={state.basis.j}, not j={j}")
    if u.matrix.basis.j != j:
        raise InvalidInputError(
            f"propagator is for j={u.matrix.basis.j}, not j={j}"
        )
    n = j.n_states
    wp = precision + 10
    jx, jy, jz = build_cartesian(j, wp)
    with mp.workdps(wp):
        phi = [
            mp.fdot(zip(u.matrix.entries[a], state.amplitudes))
            for a in range(n)
        ]
        vx = [mp.fdot(zip(jx.entries[a], phi)) for a in range(n)]
        vy = [mp.fdot(zip(jy.entries[a], phi)) for a in range(n)]
        vz = [mp.fdot(zip(jz.entries[a], phi)) for a in range(n)]
        phi_c = [mp.conj(x) for x in phi]

        def _inner(bra_conj, ket):
            return mp.fdot(zip(bra_conj, ket))

        means = [_inner(phi_c, v) for v in (vx, vy, vz)]
        seconds = [
            mp.fsum(abs(x) ** 2 for x in v) for v in (vx, vy, vz)
        ]
        cross_yz = _inner([mp.conj(x) for x in vy], vz)
        cross_xz = _inner([mp.conj(x) for x in vx], vz)

        tol = mp.mpf(10) ** (-precision + 5) * (1 + mp.mpf(j.twice_value) / 2)
        for label, value in zip("xyz", means):
            if abs(mp.im(value)) > tol:
                raise InternalConsistencyError(
                    f"mean of J{label} has imaginary part "
                    f"{mp.nstr(mp.im(value), 5)}"
                )
        mean_x, mean_y, mean_z = (mp.re(v) for v in means)
        cov_yz = mp.re(cross_yz) - mean_y * mean_z
        corr_xz = 2 * mp.re(cross_xz)

    with mp.workdps(precision):
        return ObservableSet(
            j=j,
            chi_t=+mp.mpf(u.chi_t),
            precision=precision,
            mean_jx=+mean_x,
            mean_jy=+mean_y,
            mean_jz=+mean_z,
            second_jx=+seconds[0],
            second_jy=+seconds[1],
            second_jz=+seconds[2],
            cov_yz=+cov_yz,
            corr_xz=+corr_xz,
        )


def _check_same_spin(obs: ObservableSet, j) -> HalfInt:
    j = _require_spin(j)
    if obs.j != j:
        raise InvalidInputError(
            f"observables are for j={obs.j}, not j={j}"
        )
    return j


def _mean_spin_defined(obs: ObservableSet):
    """|⟨Jx⟩| if above the definedness threshold, else None."""
    with mp.workdps(obs.precision):
        magnitude = abs(obs.mean_jx)
        if magnitude <= mp.mpf(10) ** (-(obs.precision // 2)):
            return None
        return magnitude


def _xi_from_variance(obs: ObservableSet, j: HalfInt, variance):
    """Wineland parameter sqrt(2j · variance) / |⟨Jx⟩|, None when undefined."""
    mean = _mean_spin_defined(obs)
    if mean is None:
        return None
    with mp.workdps(obs.precision):
        return +(mp.sqrt(mp.mpf(j.twice_value) * variance) / mean)


def xi_y(obs: ObservableSet, j):
    """Squeezing parameter of the y quadrature; None when ⟨Jx⟩ vanishes.

    Values below 1 certify squeezing.
    """
    j = _check_same_spin(obs, j)
    return _xi_from_variance(obs, j, obs.var_jy)


def xi_z(obs: ObservableSet, j):
    """Squeezing parameter of the z quadrature; None when ⟨Jx⟩ vanishes."""
    j = _check_same_spin(obs, j)
    return _xi_from_variance(obs, j, obs.var_jz)


def correlation_xz(obs: ObservableSet):
    """The symmetrized cross moment ⟨JxJz + JzJx⟩ at the sampled time."""
    return obs.corr_xz


def optimal_xi(obs: ObservableSet, j):
    """Minimum squeezing over all transverse quadratures, with its angle.

    The variance of cos(φ)Jy + sin(φ)Jz traces a circle in (cos 2φ, sin 2φ);
    its minimum is the smaller eigenvalue of the 2×2 covariance matrix of
    (Jy, Jz).  Returns (xi_min, angle) with xi_min ≤ min(xi_y, xi_z), or None
    when ⟨Jx⟩ vanishes.  An isotropic covariance leaves the angle free and is
    reported as 0.
    """
    j = _check_same_spin(obs, j)
    mean = _mean_spin_defined(obs)
    if mean is None:
        return None
    with mp.workdps(obs.precision):
        v_y, v_z, c = obs.var_jy, obs.var_jz, obs.cov_yz
        half_sum = (v_y + v_z) / 2
        half_diff = (v_y - v_z) / 2
        radius = mp.sqrt(half_diff ** 2 + c ** 2)
        v_min = half_sum - radius
        if v_min < 0:
            v_min = mp.mpf(0)
        if radius <= mp.mpf(10) ** (-obs.precision + 5) * (1 + half_sum):
            angle = mp.mpf(0)
        else:
            angle = mp.atan2(-c, -half_diff) / 2
        xi_min = mp.sqrt(mp.mpf(j.twice_value) * v_min) / mean
        return (+xi_min, +angle)


# ---------------------------------------------------------------------------
# Time series
# ---------------------------------------------------------------------------


def time_series(
    j,
    chi,
    t_max,
    steps: int,
    observables=None,
    precision: int = DEFAULT_PRECISION,
) -> TimeSeries:
    """Squeezing observables on a uniform time grid from a fresh start point.

    Evolves the coherent +x state; every grid point rebuilds its propagator
    directly at that time from the exact spectrum (no stepping, no error
    accumulation), so rows are independent and order-insensitive.

    :param chi: coupling strength; the grid reports chi·t (or t itself when
        chi = 0, where the dynamics is constant).
    :param t_max: endpoint of the grid, > 0; the grid includes 0 and t_max.
    :param steps: number of grid points, at least 2.
    :param observables: iterable of column names to keep (default: all of
        TIME_SERIES_COLUMNS).
    """
    j = _require_spin(j)
    _require_precision(precision)
    if isinstance(steps, bool) or not isinstance(steps, int):
        raise InvalidInputError(f"steps must be an integer, got {steps!r}")
    if steps < 2:
        raise InvalidInputError(f"steps must be at least 2, got {steps}")
    t_end = _as_dimensionless_time(t_max, precision)
    if not t_end > 0:
        raise InvalidInputError(f"t_max must be positive, got {t_max!r}")
    chi_value = _as_dimensionless_time(chi, precision)

    if observables is None:
        selected = TIME_SERIES_COLUMNS
    else:
        selected = tuple(observables)
        unknown = [name for name in selected if name not in TIME_SERIES_COLUMNS]
        if unknown:
            raise InvalidInputError(
                f"unknown observable columns {unknown!r}; choose from "
                f"{TIME_SERIES_COLUMNS}"
            )

    report = spectrum(j, precision)
    h = build_h_ta(j, 1.0, precision)
    state = coherent_initial_state(j, precision)

    grid = []
    rows = {name: [] for name in selected}
    for i in range(steps):
        with mp.workdps(precision + 10):
            t_i = t_end * i / (steps - 1)
            chi_t_i = chi_value * t_i
        with mp.workdps(precision):
            grid.append(+(chi_t_i if chi_value != 0 else t_i))
        u = propagator_spectral(j, chi_t_i, report, h, precision)
        obs = heisenberg_expectations(state, u, j, precision)
        opt = None
        if "xi_opt" in rows or "opt_angle" in rows:
            opt = optimal_xi(obs, j)
        for name in selected:
            if name == "jx_mean":
                value = obs.mean_jx
            elif name == "var_jy":
                value = obs.var_jy
            elif name == "var_jz":
                value = obs.var_jz
            elif name == "xi_y":
                value = xi_y(obs, j)
            elif name == "xi_z":
                value = xi_z(obs, j)
            elif name == "corr_xz":
                value = obs.corr_xz
            elif name == "xi_opt":
                value = None if opt is None else opt[0]
            else:
                value = None if opt is None else opt[1]
            rows[name].append(value)

    return TimeSeries(
        j=j,
        chi=chi_value,
        precision=precision,
        grid=tuple(grid),
        columns={name: tuple(values) for name, values in rows.items()},
    )
