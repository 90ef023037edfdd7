"""Delay-feedback reservoir with phase-encoded input and sine readout.

A single nonlinear element is time-multiplexed into ``V`` virtual nodes.
Each input sample ``u_k`` is broadcast over all nodes through a fixed mask
``m``, entering node ``j`` as the phase

    phi[k, j] = beta * m[j] * u_k + alpha * M[k-1, j]

where ``M[k-1, j]`` is the same node's measured value one step earlier
(the feedback loop). The measurement of a node is a sine of its phase,
blurred with its predecessor because the detection chain is slower than
the node spacing:

    M[k, j] = C * sin(phi[k, j-1]) * eps + C * sin(phi[k, j]) * (1 - eps)

with coupling factor ``eps = exp(-pulse_period / bandwidth_time)``. The
predecessor of the first node of a step is the last node of the previous
step: the pulse train is continuous, so the bandwidth filter does not
reset at step boundaries.

``filter_mode="full"`` replaces the two-term mixing above with the
untruncated first-order low-pass scan ``s_j = eps * s_{j-1} +
(1 - eps) * C * sin(phi_j)``, useful for quantifying the truncation error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ParameterError

_FILTER_MODES = ("two_term", "full")


def coupling_factor(pulse_period: float, bandwidth_time: float) -> float:
    """Fraction of a node's reading contributed by its predecessor.

    Equals ``exp(-pulse_period / bandwidth_time)``: a detection chain much
    slower than the node spacing blurs neighbours together (eps -> 1),
    an instantaneous one decouples them (eps -> 0).
    """
    for name, value in (("pulse_period", pulse_period),
                        ("bandwidth_time", bandwidth_time)):
        if not math.isfinite(value) or value <= 0.0:
            raise ParameterError(
                f"{name} must be positive and finite, got {value!r}")
    return math.exp(-pulse_period / bandwidth_time)


@dataclass(frozen=True)
class ReservoirParams:
    """All model constants of one reservoir configuration.

    Reference hardware values: 6.4 ns node spacing, 21 ns effective
    detection time constant. ``noise_sigma = 0`` disables detection noise;
    ``seed`` fixes the noise stream when it is on.
    """

    num_nodes: int
    alpha: float
    beta: float
    gain_c: float = 1.0
    pulse_period: float = 6.4e-9
    bandwidth_time: float = 21e-9
    noise_sigma: float = 0.0
    seed: int = 0
    filter_mode: str = "two_term"

    def __post_init__(self) -> None:
        if self.num_nodes < 1:
            raise ParameterError(f"num_nodes must be >= 1, got {self.num_nodes}")
        for name in ("alpha", "beta", "gain_c"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} must be finite")
        # validates positivity of both time constants as a side effect
        coupling_factor(self.pulse_period, self.bandwidth_time)
        if not (math.isfinite(self.noise_sigma) and self.noise_sigma >= 0.0):
            raise ParameterError(
                f"noise_sigma must be >= 0, got {self.noise_sigma!r}")
        if self.seed < 0:
            raise ParameterError(f"seed must be non-negative, got {self.seed}")
        if self.filter_mode not in _FILTER_MODES:
            raise ParameterError(
                f"filter_mode must be one of {_FILTER_MODES}, got {self.filter_mode!r}")

    @property
    def coupling(self) -> float:
        """Derived coupling factor eps."""
        return coupling_factor(self.pulse_period, self.bandwidth_time)


@dataclass(frozen=True)
class Mask:
    """Fixed per-node input weights breaking the symmetry between nodes."""

    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        if w.ndim != 1 or w.size < 1:
            raise ParameterError("mask must be a non-empty 1-d vector")
        if not np.all(np.isfinite(w)):
            raise ParameterError("mask entries must be finite")
        if w.size > 1 and bool(np.all(w == w[0])):
            raise ParameterError("constant mask collapses node diversity")

    def __len__(self) -> int:
        return int(self.weights.size)


def generate_mask(num_nodes: int, seed: int, kind: str = "uniform") -> Mask:
    """Draw the fixed input mask.

    ``kind="uniform"`` draws i.i.d. from [-1, 1), ``kind="binary"`` from
    {-1, +1}. The same (num_nodes, seed, kind) always yields the same
    mask. A draw that happens to be constant (possible for tiny binary
    masks) is rejected and redrawn from the same stream, so determinism
    is preserved.
    """
    if num_nodes < 1:
        raise ParameterError(f"num_nodes must be >= 1, got {num_nodes}")
    if kind not in ("uniform", "binary"):
        raise ParameterError(f"mask kind must be 'uniform' or 'binary', got {kind!r}")
    rng = np.random.default_rng(seed)
    for _ in range(100):
        if kind == "uniform":
            w = rng.uniform(-1.0, 1.0, num_nodes)
        else:
            w = rng.choice(np.array([-1.0, 1.0]), size=num_nodes)
        if num_nodes == 1 or not bool(np.all(w == w[0])):
            return Mask(w)
    raise ParameterError(
        f"could not draw a non-constant {kind} mask of length {num_nodes}")


@dataclass
class ReservoirState:
    """Carry-over between consecutive input steps.

    ``measurements`` holds the previous step's measured node values (the
    feedback signal), ``last_sine`` the sine of the most recently
    processed node, and ``filter_value`` the low-pass state used by the
    ``"full"`` filter mode.
    """

    measurements: np.ndarray
    last_sine: float = 0.0
    filter_value: float = 0.0

    def __post_init__(self) -> None:
        self.measurements = np.asarray(self.measurements, dtype=float)


def zero_state(params: ReservoirParams) -> ReservoirState:
    """State of a reservoir that has seen no input: no field, no memory."""
    return ReservoirState(np.zeros(params.num_nodes))


def step(
    state: ReservoirState,
    input_value: float,
    mask: Mask,
    params: ReservoirParams,
    rng: np.random.Generator | None = None,
) -> tuple[ReservoirState, np.ndarray]:
    """Advance the reservoir by one input sample.

    Returns ``(new_state, node_row)`` where ``node_row`` holds the V
    measured node values for this sample. ``rng`` supplies the
    detection-noise stream and should be shared across steps of one run
    (``run`` does this); when omitted and noise is on, a fresh generator
    seeded with ``params.seed`` is used.
    """
    w = mask.weights
    if w.size != params.num_nodes:
        raise DimensionError(
            f"mask length {w.size} != num_nodes {params.num_nodes}")
    if state.measurements.size != params.num_nodes:
        raise DimensionError(
            f"state length {state.measurements.size} != num_nodes {params.num_nodes}")
    if not math.isfinite(input_value):
        raise ParameterError(f"input value must be finite, got {input_value!r}")

    eps = params.coupling
    phi = params.beta * w * input_value + params.alpha * state.measurements
    sines = np.sin(phi)

    if params.filter_mode == "two_term":
        prev = np.empty_like(sines)
        prev[0] = state.last_sine
        prev[1:] = sines[:-1]
        row = params.gain_c * (eps * prev + (1.0 - eps) * sines)
        carry = state.filter_value
    else:
        drive = params.gain_c * (1.0 - eps) * sines
        row = np.empty_like(drive)
        s = state.filter_value
        for j in range(row.size):
            s = eps * s + drive[j]
            row[j] = s
        carry = float(s)

    if params.noise_sigma > 0.0:
        if rng is None:
            rng = np.random.default_rng(params.seed)
        row = row + rng.normal(0.0, params.noise_sigma, row.size)

    new_state = ReservoirState(row, float(sines[-1]), carry)
    return new_state, row


def run(
    inputs: np.ndarray,
    mask: Mask,
    params: ReservoirParams,
    washout: int = 50,
) -> np.ndarray:
    """Drive the reservoir over a full input sequence.

    Returns an ``(L - washout, V + 1)`` state matrix: one row of measured
    node values per post-washout sample, plus a trailing constant-1 bias
    column. The run starts from the all-zero state; the first ``washout``
    rows are discarded so the start-up transient never reaches training.
    """
    u = np.asarray(inputs, dtype=float)
    if u.ndim != 1:
        raise DimensionError(f"inputs must be a 1-d sequence, got shape {u.shape}")
    if washout < 0:
        raise ParameterError(f"washout must be >= 0, got {washout}")
    if u.size <= washout:
        raise ParameterError(
            f"need more than washout={washout} input samples, got {u.size}")
    if not np.all(np.isfinite(u)):
        raise ParameterError("inputs must be finite")

    rng = np.random.default_rng(params.seed)
    state = zero_state(params)
    out = np.ones((u.size - washout, params.num_nodes + 1))
    for k in range(u.size):
        # noise is drawn for every step so the stream position does not
        # depend on the washout choice
        state, row = step(state, float(u[k]), mask, params, rng=rng)
        if k >= washout:
            out[k - washout, : params.num_nodes] = row
    return out
