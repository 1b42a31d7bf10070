"""Deterministic hidden-variable models built from piecewise-sign responses.

A *simple response* is a function of the analyzer angle that takes only the
values +1 and -1, is constant on finitely many half-open intervals
``[theta_{k-1}, theta_k)`` covering ``[0, pi)``, and alternates sign between
adjacent intervals (equal neighbours would merge, so alternation is a
canonical-form requirement, not a physical one).  Interval k gets the sign
``first_sign * (-1) ** (k + 1)`` counting from k = 1.

A model is a finite mixture of such responses: hidden variable i occurs with
weight ``w_i`` and both wings respond deterministically.  The second wing is
either a copy (``pairing="correlated"``, B = A) or a mirror
(``pairing="anti-correlated"``, B = -A), giving the model correlation

    C(alpha, beta) = s * sum_i w_i F_i(alpha) F_i(beta),    s = +/-1.

The classic rotation-invariant example takes the hidden variable to be an
angle ``lam`` uniform on ``[0, pi)`` with response ``sign(cos(2 (theta -
lam)))`` and anti-correlated pairing.  Its correlation is the triangle wave

    C(alpha, beta) = -1 + 4 delta / pi   for delta in [0, pi/2)
                      3 - 4 delta / pi   for delta in [pi/2, pi),

``delta = (alpha - beta) mod pi``: it matches the entangled-pair correlation
at delta in {0, pi/4, pi/2} but is piecewise linear in between.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .core import (
    CorrelationFunction,
    RandomStream,
    derive_setting_seed,
    normalize_angles,
)
from .quantum import _DEFAULT_CHUNK, MeasuredCorrelation

PAIRINGS = ("correlated", "anti-correlated")

MODEL_FORMAT = "lhv-model"


class ModelValidationError(ValueError):
    """A response spec or model document violates a structural requirement."""


@dataclass(frozen=True)
class SimpleFunctionSpec:
    """Piecewise-sign response on ``[0, pi)``.

    Parameters
    ----------
    breakpoints : tuple of float
        Strictly increasing interior sign-change points in the open interval
        ``(0, pi)``.  May be empty (a constant response).
    first_sign : int
        Sign of the first interval ``[0, breakpoints[0])``; +1 or -1.
    """

    breakpoints: tuple[float, ...] = ()
    first_sign: int = 1

    def __post_init__(self) -> None:
        bps = tuple(float(b) for b in self.breakpoints)
        object.__setattr__(self, "breakpoints", bps)
        if self.first_sign not in (1, -1):
            raise ModelValidationError(
                f"first_sign must be +1 or -1, got {self.first_sign!r}"
            )
        for b in bps:
            if not (0.0 < b < math.pi) or not math.isfinite(b):
                raise ModelValidationError(
                    f"breakpoints must lie strictly inside (0, pi), got {b!r}"
                )
        if any(b2 <= b1 for b1, b2 in zip(bps, bps[1:])):
            raise ModelValidationError(
                f"breakpoints must be strictly increasing, got {bps}"
            )
        object.__setattr__(self, "first_sign", int(self.first_sign))

    @property
    def n_intervals(self) -> int:
        return len(self.breakpoints) + 1

    @property
    def signs(self) -> tuple[int, ...]:
        """Interval signs, alternating from ``first_sign``."""
        return tuple(
            self.first_sign * (-1) ** k for k in range(self.n_intervals)
        )

    def edges(self) -> np.ndarray:
        """Interval edges including the domain endpoints 0 and pi."""
        return np.concatenate(([0.0], self.breakpoints, [math.pi]))


def eval_simple(spec: SimpleFunctionSpec, theta):
    """Evaluate a piecewise-sign response at one or many angles.

    Angles are normalized to ``[0, pi)`` first, so the response is period-pi
    by construction; intervals are half-open on the right, making the value
    at a breakpoint the sign of the interval that starts there.

    Returns an int for scalar input, otherwise an int8 array.
    """
    th = np.asarray(normalize_angles(theta), dtype=np.float64)
    scalar = th.ndim == 0
    flat = np.ascontiguousarray(th.reshape(-1), dtype=np.float64)
    bps = np.ascontiguousarray(spec.breakpoints, dtype=np.float64)
    out = kernels.piecewise_signs(bps, spec.first_sign, flat)
    if scalar:
        return int(out[0])
    return np.asarray(out, dtype=np.int8).reshape(th.shape)


def shift_spec(spec: SimpleFunctionSpec, delta: float) -> SimpleFunctionSpec:
    """Spec of the rotated response ``theta -> F((theta - delta) mod pi)``.

    Sign changes move with the rotation; when the interval count is even the
    old domain boundary is itself a sign change and its image becomes an
    interior breakpoint.  Images that land exactly on 0 are dropped (the
    change sits on the domain seam).
    """
    delta = float(delta)
    points = [float(b) for b in normalize_angles(np.asarray(spec.breakpoints) + delta)]
    if spec.n_intervals % 2 == 0:
        points.append(float(normalize_angles(delta)))
    first = eval_simple(spec, -delta)
    return SimpleFunctionSpec(
        breakpoints=tuple(sorted(p for p in points if p > 0.0)),
        first_sign=first,
    )


def aspect_response(theta, lam):
    """Hidden-angle response ``+1`` where ``cos(2 (theta - lam)) >= 0``.

    Scalar or broadcastable array arguments; scalar inputs return an int.
    """
    c = np.cos(2.0 * (np.asarray(theta, dtype=np.float64) - lam))
    out = np.where(c >= 0.0, np.int8(1), np.int8(-1))
    if out.ndim == 0:
        return int(out)
    return out


def aspect_to_simple(lam: float) -> SimpleFunctionSpec:
    """Exact piecewise-sign form of :func:`aspect_response` at fixed ``lam``.

    The response flips where ``cos(2 (theta - lam))`` changes sign, i.e. at
    ``(lam - pi/4) mod pi`` and ``(lam + pi/4) mod pi``.  Between one and
    three intervals result depending on where the flips land.
    """
    lam = float(normalize_angles(lam))
    flips = sorted(
        float(f)
        for f in normalize_angles([lam - math.pi / 4.0, lam + math.pi / 4.0])
        if 0.0 < float(f) < math.pi
    )
    first = int(aspect_response(0.0, lam))
    return SimpleFunctionSpec(breakpoints=tuple(flips), first_sign=first)


@dataclass(frozen=True)
class LhvModel:
    """Finite mixture of piecewise-sign responses with a pairing convention.

    Parameters
    ----------
    atoms : tuple of (weight, SimpleFunctionSpec)
        Mixture components.  Weights must be positive and sum to 1 within
        1e-9; they are renormalized to sum exactly to 1 on construction.
    pairing : str
        ``"correlated"`` (second wing copies the first) or
        ``"anti-correlated"`` (second wing mirrors the first).
    description : str
        Optional label carried into reports.
    """

    atoms: tuple[tuple[float, SimpleFunctionSpec], ...]
    pairing: str = "correlated"
    description: str = ""

    def __post_init__(self) -> None:
        if self.pairing not in PAIRINGS:
            raise ModelValidationError(
                f"pairing must be one of {PAIRINGS}, got {self.pairing!r}"
            )
        if not self.atoms:
            raise ModelValidationError("model must contain at least one atom")
        cleaned = []
        total = 0.0
        for i, (weight, spec) in enumerate(self.atoms):
            w = float(weight)
            if not math.isfinite(w) or w <= 0.0:
                raise ModelValidationError(
                    f"atom {i}: weight must be positive and finite, got {weight!r}"
                )
            if not isinstance(spec, SimpleFunctionSpec):
                raise ModelValidationError(
                    f"atom {i}: response must be a SimpleFunctionSpec"
                )
            total += w
            cleaned.append((w, spec))
        if abs(total - 1.0) > 1e-9:
            raise ModelValidationError(
                f"atom weights must sum to 1 within 1e-9, got {total!r}"
            )
        object.__setattr__(
            self, "atoms", tuple((w / total, spec) for w, spec in cleaned)
        )

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    @property
    def pairing_sign(self) -> int:
        """+1 for correlated pairing, -1 for anti-correlated."""
        return 1 if self.pairing == "correlated" else -1

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.atoms], dtype=np.float64)

    @property
    def responses(self) -> tuple[SimpleFunctionSpec, ...]:
        return tuple(spec for _, spec in self.atoms)


def lhv_correlation_exact(model: LhvModel, alpha, beta):
    """Exact model correlation ``s * sum_i w_i F_i(alpha) F_i(beta)``.

    Scalar or broadcastable array settings; scalar inputs return a float.
    """
    a = np.asarray(alpha, dtype=np.float64)
    b = np.asarray(beta, dtype=np.float64)
    scalar = a.ndim == 0 and b.ndim == 0
    a, b = np.broadcast_arrays(np.atleast_1d(a), np.atleast_1d(b))
    acc = np.zeros(a.shape, dtype=np.float64)
    for w, spec in model.atoms:
        fa = eval_simple(spec, a).astype(np.float64)
        fb = eval_simple(spec, b).astype(np.float64)
        acc += w * fa * fb
    acc *= model.pairing_sign
    if scalar:
        return float(acc[0])
    return acc


def correlation_function(model: LhvModel) -> CorrelationFunction:
    """Exact model correlation packaged with its provenance."""
    label = model.description or f"{model.pairing} mixture, {model.n_atoms} atoms"
    return CorrelationFunction(
        fn=lambda a, b: lhv_correlation_exact(model, a, b),
        kind="lhv-exact",
        description=label,
    )


def aspect_model(n_atoms: int = 1024) -> LhvModel:
    """Uniform discretization of the rotation-invariant hidden-angle model.

    The hidden angle is sampled at interval midpoints ``(j + 1/2) pi / n``
    with equal weights and anti-correlated pairing.  Midpoints keep every
    response flip strictly inside ``(0, pi)`` for any ``n_atoms >= 1``.
    """
    n_atoms = int(n_atoms)
    if n_atoms < 1:
        raise ModelValidationError(f"n_atoms must be positive, got {n_atoms}")
    w = 1.0 / n_atoms
    atoms = tuple(
        (w, aspect_to_simple((j + 0.5) * math.pi / n_atoms)) for j in range(n_atoms)
    )
    return LhvModel(
        atoms=atoms,
        pairing="anti-correlated",
        description=f"hidden-angle model, {n_atoms} midpoint atoms",
    )


def aspect_correlation_closed(alpha, beta):
    """Closed triangle-wave correlation of the continuum hidden-angle model.

    Scalar or broadcastable array settings; scalar inputs return a float.
    """
    delta = np.mod(np.asarray(alpha, dtype=np.float64) - beta, math.pi)
    out = np.where(
        delta < math.pi / 2.0,
        -1.0 + 4.0 * delta / math.pi,
        3.0 - 4.0 * delta / math.pi,
    )
    if out.ndim == 0:
        return float(out)
    return out


def aspect_correlation_function() -> CorrelationFunction:
    """Continuum hidden-angle correlation packaged with its provenance."""
    return CorrelationFunction(
        fn=aspect_correlation_closed,
        kind="lhv-exact",
        description="hidden-angle model, continuum (triangle wave)",
    )


def aspect_correlation_quadrature(alpha: float, beta: float) -> float:
    """Continuum hidden-angle correlation by exact piecewise integration.

    The integrand ``A(alpha, lam) * B(beta, lam)`` is constant between the
    response flip points of either wing, so integrating over the hidden angle
    reduces to a finite sum of panel widths with the integrand evaluated at
    panel midpoints.  Agrees with :func:`aspect_correlation_closed` to
    rounding error; kept as an independent route for cross-checks.
    """
    alpha = float(alpha)
    beta = float(beta)
    cuts = {0.0, math.pi}
    for setting in (alpha, beta):
        for offset in (-math.pi / 4.0, math.pi / 4.0):
            f = float(normalize_angles(setting + offset))
            if 0.0 < f < math.pi:
                cuts.add(f)
    edges = np.array(sorted(cuts), dtype=np.float64)
    mids = 0.5 * (edges[:-1] + edges[1:])
    widths = np.diff(edges)
    # anti-correlated pairing: B(beta, lam) = -A(beta, lam)
    values = aspect_response(alpha, mids) * (-aspect_response(beta, mids))
    return float(np.sum(values * widths) / math.pi)


def lhv_estimate_correlation(
    model: LhvModel,
    alpha: float,
    beta: float,
    n_runs: int,
    seed: int,
    chunk_size: int = _DEFAULT_CHUNK,
) -> MeasuredCorrelation:
    """Monte Carlo estimate of the model correlation at one setting pair.

    Draws the hidden variable by inverse CDF over the atom weights, one
    uniform per run, and accumulates the deterministic outcome products in
    integers: the estimate is bitwise reproducible for a given seed and
    independent of chunk size and kernel backend.
    """
    n_runs = int(n_runs)
    if n_runs < 1:
        raise ValueError(f"n_runs must be positive, got {n_runs}")
    if chunk_size < 1:
        raise ValueError(f"chunk_size must be positive, got {chunk_size}")
    cum_weights = np.cumsum(model.weights)
    cum_weights[-1] = 1.0
    products = np.empty(model.n_atoms, dtype=np.int8)
    sign = model.pairing_sign
    for i, (_, spec) in enumerate(model.atoms):
        products[i] = sign * eval_simple(spec, alpha) * eval_simple(spec, beta)
    stream = RandomStream(seed)
    product_sum = 0
    remaining = n_runs
    while remaining > 0:
        m = min(remaining, chunk_size)
        product_sum += int(
            kernels.indexed_sign_sum(stream.uniforms(m), cum_weights, products)
        )
        remaining -= m
    estimate = product_sum / n_runs
    variance = max(1.0 - estimate * estimate, 0.0)
    return MeasuredCorrelation(
        alpha=float(alpha),
        beta=float(beta),
        estimate=estimate,
        standard_error=math.sqrt(variance / n_runs),
        n_runs=n_runs,
        seed=int(seed),
    )


def estimated_correlation_function(
    model: LhvModel, n_runs: int, seed: int
) -> CorrelationFunction:
    """Monte Carlo model correlation as a function of the settings.

    Seeding per setting pair mirrors
    :func:`bellsim.quantum.measured_correlation_function`.
    """

    def fn(alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
        a, b = np.broadcast_arrays(
            np.asarray(alpha, dtype=np.float64), np.asarray(beta, dtype=np.float64)
        )
        out = np.empty(a.shape, dtype=np.float64)
        flat_a, flat_b, flat_out = a.ravel(), b.ravel(), out.ravel()
        for i in range(flat_a.size):
            row_seed = derive_setting_seed(seed, flat_a[i], flat_b[i])
            flat_out[i] = lhv_estimate_correlation(
                model, flat_a[i], flat_b[i], n_runs, row_seed
            ).estimate
        return out

    return CorrelationFunction(
        fn=fn,
        kind="lhv-estimated",
        description=(
            f"{model.description or model.pairing + ' mixture'}, "
            f"Monte Carlo (n={int(n_runs)}, seed={int(seed)})"
        ),
    )


def fig2_spec() -> SimpleFunctionSpec:
    """Reference eight-interval response with equally spaced breakpoints.

    Signs alternate starting from +1 over the eight equal intervals
    ``[k pi/8, (k+1) pi/8)``; used as a worked example throughout the test
    suite and exposed on the command line as the ``fig2`` target.
    """
    return SimpleFunctionSpec(
        breakpoints=tuple(k * math.pi / 8.0 for k in range(1, 8)),
        first_sign=1,
    )


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ModelValidationError(message)


def model_to_doc(model: LhvModel) -> dict:
    """JSON-ready document for a model (canonical form, no ``signs`` list)."""
    return {
        "format": MODEL_FORMAT,
        "pairing": model.pairing,
        "description": model.description,
        "atoms": [
            {
                "weight": w,
                "first_sign": spec.first_sign,
                "breakpoints": list(spec.breakpoints),
            }
            for w, spec in model.atoms
        ],
    }


def model_from_doc(doc: dict) -> LhvModel:
    """Build a model from a parsed JSON document, validating every field.

    Atoms may carry an explicit ``signs`` list instead of (or in addition to)
    ``first_sign``; it must alternate and have one entry per interval.
    """
    _require(isinstance(doc, dict), "model document must be a JSON object")
    fmt = doc.get("format", MODEL_FORMAT)
    _require(
        fmt == MODEL_FORMAT,
        f"field 'format' must be {MODEL_FORMAT!r}, got {fmt!r}",
    )
    pairing = doc.get("pairing")
    _require(
        pairing in PAIRINGS,
        f"field 'pairing' must be one of {PAIRINGS}, got {pairing!r}",
    )
    raw_atoms = doc.get("atoms")
    _require(
        isinstance(raw_atoms, list) and raw_atoms,
        "field 'atoms' must be a non-empty list",
    )
    atoms = []
    for i, entry in enumerate(raw_atoms):
        _require(isinstance(entry, dict), f"atom {i}: must be a JSON object")
        _require("weight" in entry, f"atom {i}: missing field 'weight'")
        weight = entry["weight"]
        _require(
            isinstance(weight, (int, float)) and not isinstance(weight, bool),
            f"atom {i}: field 'weight' must be a number, got {weight!r}",
        )
        raw_bps = entry.get("breakpoints", [])
        _require(
            isinstance(raw_bps, list),
            f"atom {i}: field 'breakpoints' must be a list",
        )
        for b in raw_bps:
            _require(
                isinstance(b, (int, float)) and not isinstance(b, bool),
                f"atom {i}: breakpoints must be numbers, got {b!r}",
            )
        signs = entry.get("signs")
        first_sign = entry.get("first_sign")
        if signs is not None:
            _require(
                isinstance(signs, list) and len(signs) == len(raw_bps) + 1,
                f"atom {i}: field 'signs' must list one sign per interval",
            )
            _require(
                all(s in (1, -1) and not isinstance(s, bool) for s in signs),
                f"atom {i}: interval signs must be +1 or -1",
            )
            _require(
                all(s2 == -s1 for s1, s2 in zip(signs, signs[1:])),
                f"atom {i}: adjacent interval signs must alternate",
            )
            if first_sign is not None:
                _require(
                    first_sign == signs[0],
                    f"atom {i}: field 'first_sign' contradicts field 'signs'",
                )
            first_sign = signs[0]
        elif first_sign is None:
            first_sign = 1
        try:
            spec = SimpleFunctionSpec(
                breakpoints=tuple(float(b) for b in raw_bps),
                first_sign=first_sign,
            )
        except ModelValidationError as exc:
            raise ModelValidationError(f"atom {i}: {exc}") from None
        atoms.append((float(weight), spec))
    return LhvModel(
        atoms=tuple(atoms),
        pairing=pairing,
        description=str(doc.get("description", "")),
    )


def save_model(model: LhvModel, path) -> None:
    """Write a model to a JSON file (stable key order for diffability)."""
    Path(path).write_text(
        json.dumps(model_to_doc(model), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def load_model(path) -> LhvModel:
    """Read and validate a model JSON file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError:
        raise
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelValidationError(f"model file is not valid JSON: {exc}") from None
    return model_from_doc(doc)
