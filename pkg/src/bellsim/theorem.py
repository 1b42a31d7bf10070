"""Moment-matrix test separating the entangled-pair correlation from every
finite hidden-variable mixture.

For a mixture with weights ``w_i``, responses ``F_i`` and pairing sign ``s``,
the matrix of windowed response moments

    M_nm = s * sum_i w_i f_n(i) f_m(i),       f_n(i) = n-th coefficient of F_i

equals the 2D Fourier coefficient matrix of the model correlation (the
product structure of ``C(alpha, beta)`` factorizes the double integral).  The
entangled-pair correlation has the 2D coefficients

    c_(1,-1) = c_(-1,1) = -pi/2,    all others 0,

so matching it forces ``M_(1,-1) = -pi/2``.  That is impossible for a
mixture:

* correlated pairing (``s = +1``): ``M_(1,-1) = sum_i w_i |f_1(i)|^2 >= 0``
  because ``f_(-1) = conj(f_1)`` for real responses, so the entry sits at
  least ``pi/2`` away from the target;
* anti-correlated pairing (``s = -1``): ``M_(1,-1) = -sum_i w_i |f_1(i)|^2``
  needs ``sum w |f_1|^2 = pi/2``, but a +/-1 response can put at most
  ``|f_1|^2 <= 4/pi`` into the first harmonic (the half-period square wave
  is the optimum), leaving a gap of at least ``pi/2 - 4/pi ~ 0.2976``.

:func:`incompatibility_report` evaluates the witness entries and the residual
for any model; :func:`schmidt_spectrum` and :func:`forced_response` provide
the complementary diagnostics (diagonal weight spectra, and the
norm-violating response any exact match would require).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import CorrelationFunction
from .fourier import Spectrum2D, coefficients_2d, coefficients_simple
from .lhv import LhvModel

QUANTUM_FIRST_MOMENT = -math.pi / 2.0

# Largest first-harmonic power a +/-1 response can carry; attained by the
# half-period square wave.
MAX_FIRST_HARMONIC_POWER = 4.0 / math.pi


@dataclass(frozen=True)
class MomentMatrix:
    """Windowed response-moment matrix of a mixture model.

    ``entries[n + n_max, m + n_max]`` holds ``M_nm``; the matrix is symmetric
    (not Hermitian: no conjugation enters the definition).
    """

    entries: np.ndarray = field(repr=False)
    pairing: str | None = None
    source: str = ""

    def __post_init__(self) -> None:
        arr = np.array(self.entries, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] % 2 != 1:
            raise ValueError(
                f"entries must be a square odd-sized matrix, got {arr.shape}"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)

    @property
    def n_max(self) -> int:
        return (self.entries.shape[0] - 1) // 2

    def entry(self, n: int, m: int) -> complex:
        n, m = int(n), int(m)
        if max(abs(n), abs(m)) > self.n_max:
            raise ValueError(
                f"moment ({n}, {m}) outside window |n|, |m| <= {self.n_max}"
            )
        return complex(self.entries[n + self.n_max, m + self.n_max])

    def anti_diagonal(self) -> np.ndarray:
        """Entries ``M_(n, -n)`` for ``n = -n_max .. n_max``."""
        k = self.n_max
        return np.array(
            [self.entries[k + n, k - n] for n in range(-k, k + 1)],
            dtype=np.complex128,
        )

    def parseval_trace(self) -> float:
        """``sum_n M_(n, -n)``; tends to ``pairing_sign * pi`` as the window grows.

        Each response contributes ``sum_n |f_n|^2 -> pi`` (Parseval), so the
        trace measures how much mixture power the window has captured.
        """
        return float(np.sum(self.anti_diagonal().real))


def moment_matrix(model: LhvModel, n_max: int) -> MomentMatrix:
    """Exact moment matrix of a mixture model over the given window."""
    n_max = int(n_max)
    if n_max < 0:
        raise ValueError(f"n_max must be non-negative, got {n_max}")
    coeff_rows = np.vstack(
        [coefficients_simple(spec, n_max).coefficients for spec in model.responses]
    )
    weighted = model.weights[:, None] * coeff_rows
    entries = model.pairing_sign * (coeff_rows.T @ weighted)
    return MomentMatrix(
        entries=entries,
        pairing=model.pairing,
        source=model.description or f"{model.pairing} mixture, {model.n_atoms} atoms",
    )


def quantum_target(n_max: int) -> MomentMatrix:
    """The 2D coefficient matrix of the entangled-pair correlation."""
    n_max = int(n_max)
    if n_max < 1:
        raise ValueError(f"n_max must be at least 1, got {n_max}")
    entries = np.zeros((2 * n_max + 1, 2 * n_max + 1), dtype=np.complex128)
    entries[n_max + 1, n_max - 1] = QUANTUM_FIRST_MOMENT
    entries[n_max - 1, n_max + 1] = QUANTUM_FIRST_MOMENT
    return MomentMatrix(entries=entries, pairing=None, source="entangled pair, exact")


@dataclass(frozen=True)
class Witness:
    """One compared matrix entry: model value against the quantum target."""

    n: int
    m: int
    value: complex
    target: complex

    @property
    def deviation(self) -> float:
        return abs(self.value - self.target)


@dataclass(frozen=True)
class IncompatibilityReport:
    """Outcome of the moment-matrix comparison for one model."""

    pairing: str
    n_max: int
    residual_inf: float
    parseval_trace: float
    witnesses: tuple[Witness, ...]
    tol: float

    @property
    def compatible(self) -> bool:
        return self.residual_inf <= self.tol

    @property
    def verdict(self) -> str:
        return "compatible" if self.compatible else "incompatible"

    def __str__(self) -> str:
        lines = [
            f"moment-matrix comparison ({self.pairing}, window |n| <= {self.n_max})",
            f"  residual sup-norm: {self.residual_inf:.9f} (tol {self.tol:.1e})",
            f"  parseval trace:    {self.parseval_trace:.9f}",
            f"  verdict:           {self.verdict}",
        ]
        for w in self.witnesses:
            lines.append(
                f"  M({w.n:+d},{w.m:+d}) = {w.value:+.9f}; "
                f"target {w.target:+.9f}; |gap| = {w.deviation:.9f}"
            )
        return "\n".join(lines)


def incompatibility_report(
    model: LhvModel, n_max: int = 4, tol: float = 1e-6
) -> IncompatibilityReport:
    """Compare a model's moment matrix against the entangled-pair target.

    The residual is the sup-norm of the difference over the whole window;
    the witness list pins the two first-harmonic entries where the gap is
    provably bounded away from zero.

    Parameters
    ----------
    model : LhvModel
        Mixture to test.
    n_max : int
        Window half-width; must be at least 2 so the witness entries and a
        ring of zero-target entries are both inside the window.
    tol : float
        Residual below which a model would be declared compatible.  No
        mixture can reach it; the parameter exists so the check is a real
        comparison rather than a foregone conclusion.
    """
    n_max = int(n_max)
    if n_max < 2:
        raise ValueError(f"n_max must be at least 2, got {n_max}")
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    mm = moment_matrix(model, n_max)
    target = quantum_target(n_max)
    residual = float(np.max(np.abs(mm.entries - target.entries)))
    witnesses = tuple(
        Witness(n=n, m=m, value=mm.entry(n, m), target=target.entry(n, m))
        for n, m in ((1, -1), (-1, 1))
    )
    return IncompatibilityReport(
        pairing=model.pairing,
        n_max=n_max,
        residual_inf=residual,
        parseval_trace=mm.parseval_trace(),
        witnesses=witnesses,
        tol=float(tol),
    )


def reconstruct_correlation(mm: MomentMatrix) -> CorrelationFunction:
    """Invert a moment matrix back to its correlation surface.

    Because the moment matrix equals the 2D coefficient matrix of the model
    correlation, the inverse transform ``(1/pi) sum M_nm e^{2i(n a + m b)}``
    reproduces the correlation up to window truncation.
    """
    k = mm.n_max
    ns = np.arange(-k, k + 1)
    chunk = max(1, (1 << 22) // (ns.size * 16))

    def fn(alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
        a, b = np.broadcast_arrays(
            np.asarray(alpha, dtype=np.float64), np.asarray(beta, dtype=np.float64)
        )
        flat_a, flat_b = a.ravel(), b.ravel()
        out = np.empty(flat_a.size, dtype=np.float64)
        for start in range(0, flat_a.size, chunk):
            sl = slice(start, start + chunk)
            ea = np.exp(2j * np.multiply.outer(flat_a[sl], ns))
            eb = np.exp(2j * np.multiply.outer(flat_b[sl], ns))
            out[sl] = np.einsum("in,in->i", ea @ mm.entries, eb).real / math.pi
        return out.reshape(a.shape)

    return CorrelationFunction(
        fn=fn,
        kind="lhv-exact",
        description=f"window reconstruction (|n| <= {k}) of {mm.source}",
    )


def forced_response(phase: float = 0.0):
    """The response amplitude an exact quantum match would force on a wing.

    Matching ``M_(1,-1) = -pi/2`` with a single product response requires
    first-harmonic amplitude ``|f_1|^2 = pi/2``, i.e. the angular profile

        F(theta) = sqrt(2) * cos(phase + 2 theta)

    which exceeds 1 in magnitude on most of its period; a +/-1-valued
    response cannot do this.  Returns a vectorized callable.
    """
    phase = float(phase)

    def profile(theta):
        out = math.sqrt(2.0) * np.cos(phase + 2.0 * np.asarray(theta, dtype=np.float64))
        if out.ndim == 0:
            return float(out)
        return out

    return profile


def forced_response_unit_points(phase: float = 0.0) -> np.ndarray:
    """Angles in ``[0, pi)`` where the forced response has magnitude exactly 1.

    ``|sqrt(2) cos(phase + 2 theta)| = 1`` exactly at four points per period,
    spaced pi/4 apart.
    """
    phase = float(phase)
    points = [
        (math.pi / 8.0 + j * math.pi / 4.0 - phase / 2.0) % math.pi for j in range(4)
    ]
    return np.sort(np.array(points, dtype=np.float64))


def forced_response_excess_fraction(
    phase: float = 0.0, n_points: int = 100_000, band: float = 0.01
) -> float:
    """Fraction of a uniform angle grid where ``| |F| - 1 | > band``.

    Close to 1: the forced response differs from any +/-1 response almost
    everywhere, not just at isolated angles.
    """
    n_points = int(n_points)
    if n_points < 1:
        raise ValueError(f"n_points must be positive, got {n_points}")
    profile = forced_response(phase)
    theta = (np.arange(n_points) + 0.5) * (math.pi / n_points)
    deviation = np.abs(np.abs(profile(theta)) - 1.0)
    return float(np.mean(deviation > band))


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Anti-diagonal weight spectrum ``sigma_n = |c_(n, -n)|`` of a surface."""

    weights: np.ndarray = field(repr=False)
    threshold: float
    source: str = ""

    def __post_init__(self) -> None:
        arr = np.array(self.weights, dtype=np.float64)
        if arr.ndim != 1 or arr.size % 2 != 1:
            raise ValueError(
                f"weights must be a 1D array of odd length, got shape {arr.shape}"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "weights", arr)

    @property
    def n_max(self) -> int:
        return (self.weights.size - 1) // 2

    def weight(self, n: int) -> float:
        n = int(n)
        if abs(n) > self.n_max:
            raise ValueError(f"harmonic {n} outside window |n| <= {self.n_max}")
        return float(self.weights[n + self.n_max])

    @property
    def count_above(self) -> int:
        """Number of anti-diagonal weights above the threshold."""
        return int(np.sum(self.weights > self.threshold))


def schmidt_spectrum(
    corr,
    n_max: int = 8,
    threshold: float = 1e-3,
    resolution: int = 2048,
    stationarity_tol: float = 1e-6,
) -> SchmidtSpectrum:
    """Anti-diagonal weight spectrum of a stationary correlation surface.

    A correlation that depends only on ``alpha - beta`` concentrates all its
    2D coefficient mass on the anti-diagonal ``m = -n``.  If more than
    ``stationarity_tol`` of the squared mass sits elsewhere the surface is
    not stationary and the anti-diagonal spectrum would be misleading, so
    the call fails with the measured share.

    Accepts a :class:`Spectrum2D` directly, or any correlation accepted by
    :func:`bellsim.fourier.coefficients_2d`.
    """
    if isinstance(corr, Spectrum2D):
        spectrum = corr
    else:
        spectrum = coefficients_2d(corr, n_max=n_max, resolution=resolution)
    share = spectrum.off_diagonal_share()
    if share > stationarity_tol:
        raise ValueError(
            f"correlation is not stationary: off-anti-diagonal share {share:.3e} "
            f"exceeds {stationarity_tol:.3e}"
        )
    return SchmidtSpectrum(
        weights=np.abs(spectrum.diagonal()),
        threshold=float(threshold),
        source=spectrum.source,
    )


def chsh_score(
    corr, a: float, a2: float, b: float, b2: float
) -> float:
    """``|C(a,b) - C(a,b2) + C(a2,b) + C(a2,b2)|`` for four settings.

    Every mixture model stays at or below 2; the entangled-pair correlation
    reaches ``2 sqrt(2)`` at the standard settings ``(0, pi/4, pi/8, 3pi/8)``.
    This is a complementary check, not the primary separation argument.
    """
    s = corr(a, b) - corr(a, b2) + corr(a2, b) + corr(a2, b2)
    return float(abs(s))
