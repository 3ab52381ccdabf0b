"""chi(2) Bell analyzer and the teleportation CNOT built from two of them.

Polarization qubits use H = 0, V = 1. A two-photon state over modes (s, i)
is a length-4 vector over (HH, HV, VH, VV), first letter for mode s.

Analyzer model: the HV and VH components up-convert with probability p_odd
into H_p and V_p pump photons, and the pump is read in the diagonal basis.
Photons that pass go through a half-wave plate on mode i (H <-> V) and a
50:50 beamsplitter a_s -> (a + b)/sqrt2, a_i -> (a - b)/sqrt2 that keeps
polarization. Detectors: D1 = (a, H), D2 = (b, H), D3 = (a, V), D4 = (b, V),
photon-number resolving.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import FailureOutcomeError, InvalidStateError

__all__ = [
    "BELL_STATES",
    "PolarizationState",
    "BellRecord",
    "GateRunReport",
    "analyzer_kraus",
    "classify",
    "bell_outcome_distribution",
    "bell_analyze",
    "bell_success_probability",
    "bell_monte_carlo",
    "CORRECTION_TABLE",
    "PAULI",
    "derive_correction_table",
    "correction_table",
    "teleport_branches",
    "teleport_cnot",
    "cnot",
]

FAILURE = "FAILURE"
TWO_PHOTON_BASIS = ("HH", "HV", "VH", "VV")
_R2 = 1.0 / math.sqrt(2.0)

BELL_STATES = {
    "Phi+": np.array([_R2, 0, 0, _R2], dtype=complex),
    "Phi-": np.array([_R2, 0, 0, -_R2], dtype=complex),
    "Psi+": np.array([0, _R2, _R2, 0], dtype=complex),
    "Psi-": np.array([0, _R2, -_R2, 0], dtype=complex),
}

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"I": _I, "X": _X, "Z": _Z, "XZ": _X @ _Z}


def _check_p(p_odd: float):
    if not (0.0 <= p_odd <= 1.0):
        raise ValueError(f"p_odd must lie in [0, 1], got {p_odd!r}")


@dataclass(frozen=True)
class PolarizationState:
    """Normalized amplitudes over unique basis labels."""

    labels: tuple
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if len(set(self.labels)) != len(self.labels):
            raise InvalidStateError("basis labels must be unique")
        if amps.shape != (len(self.labels),):
            raise InvalidStateError("one amplitude per label required")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > 1e-12:
            raise InvalidStateError(f"state not normalized (norm^2 = {norm!r})")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def two_photon(cls, amplitudes) -> "PolarizationState":
        return cls(TWO_PHOTON_BASIS, np.asarray(amplitudes, dtype=complex))

    @classmethod
    def bell(cls, label: str) -> "PolarizationState":
        return cls.two_photon(BELL_STATES[label])

    def bell_label(self) -> str | None:
        """Name of the Bell state this is (up to phase), if any."""
        if self.labels != TWO_PHOTON_BASIS:
            return None
        for name, vec in BELL_STATES.items():
            if abs(abs(np.vdot(vec, self.amplitudes)) - 1.0) < 1e-12:
                return name
        return None


@dataclass(frozen=True)
class BellRecord:
    input_label: str | None
    outcome: tuple
    classified: str


@dataclass(frozen=True)
class GateRunReport:
    trials: int
    success_rate: float
    conditional_output_fidelity: float
    p_odd_used: float
    analytic_success: float = float("nan")
    standard_error: float = float("nan")
    successes: int = 0


# ---------------------------------------------------------------------------
# analyzer
# ---------------------------------------------------------------------------

_DETECTOR = {("a", "H"): "D1", ("b", "H"): "D2", ("a", "V"): "D3", ("b", "V"): "D4"}


def _passing_amplitudes(pol_s: str, pol_i: str) -> dict:
    """Detector-pair amplitudes for one photon in s and one in i after the
    HWP and the beamsplitter."""
    pol_i = "V" if pol_i == "H" else "H"
    out: dict = {}
    for (port_s, sign_s), (port_i, sign_i) in itertools.product((("a", 1), ("b", 1)), (("a", 1), ("b", -1))):
        d1 = _DETECTOR[(port_s, pol_s)]
        d2 = _DETECTOR[(port_i, pol_i)]
        key = tuple(sorted((d1, d2)))
        out[key] = out.get(key, 0.0) + 0.5 * sign_s * sign_i
    # a^dag a^dag |0> has norm sqrt 2
    return {k: v * (math.sqrt(2.0) if k[0] == k[1] else 1.0) for k, v in out.items()}


@lru_cache(maxsize=None)
def _passing_rows() -> dict:
    rows: dict = {}
    for col, label in enumerate(TWO_PHOTON_BASIS):
        for key, amp in _passing_amplitudes(label[0], label[1]).items():
            rows.setdefault(key, np.zeros(4, dtype=complex))[col] += amp
    return {k: v for k, v in rows.items() if np.any(np.abs(v) > 1e-15)}


def analyzer_kraus(p_odd: float) -> dict:
    """Outcome -> row vector K with amplitude K @ psi for that outcome.

    Outcomes are ("pump", "+") / ("pump", "-") or sorted detector pairs such
    as ("D1", "D3"); ("D2", "D2") is a bunched pair.
    """
    _check_p(p_odd)
    root = math.sqrt(p_odd)
    passing = np.diag([1.0, math.sqrt(1.0 - p_odd), math.sqrt(1.0 - p_odd), 1.0])
    kraus = {
        ("pump", "+"): root * np.conj(BELL_STATES["Psi+"]),
        ("pump", "-"): root * np.conj(BELL_STATES["Psi-"]),
    }
    for key, row in _passing_rows().items():
        kraus[key] = row @ passing
    return kraus


_CLASSIFY = {
    ("pump", "+"): "Psi+",
    ("pump", "-"): "Psi-",
    ("D1", "D3"): "Phi+",
    ("D2", "D4"): "Phi+",
    ("D1", "D4"): "Phi-",
    ("D2", "D3"): "Phi-",
}


def classify(outcome: tuple) -> str:
    """Deterministic outcome -> Bell label; anything else is FAILURE."""
    return _CLASSIFY.get(tuple(outcome), FAILURE)


def _as_vector(state) -> np.ndarray:
    if isinstance(state, PolarizationState):
        if state.labels != TWO_PHOTON_BASIS:
            raise InvalidStateError("analyzer input must be two photons over modes (s, i)")
        return state.amplitudes
    vec = np.asarray(state, dtype=complex)
    if vec.shape != (4,):
        raise InvalidStateError("analyzer input must be two photons over modes (s, i)")
    return vec


def bell_outcome_distribution(state, p_odd: float) -> dict:
    """Analytic outcome probabilities (zero-probability outcomes dropped)."""
    vec = _as_vector(state)
    dist = {}
    for key, row in analyzer_kraus(p_odd).items():
        prob = abs(row @ vec) ** 2
        if prob > 1e-15:
            dist[key] = prob
    return dist


def bell_analyze(state, p_odd: float, rng_seed: int | None = None) -> BellRecord:
    """One sampled pass of ``state`` through the analyzer."""
    if not isinstance(state, PolarizationState):
        state = PolarizationState.two_photon(state)
    dist = bell_outcome_distribution(state, p_odd)
    keys = list(dist)
    probs = np.array([dist[k] for k in keys])
    rng = np.random.default_rng(rng_seed)
    outcome = keys[rng.choice(len(keys), p=probs / probs.sum())]
    return BellRecord(state.bell_label(), outcome, classify(outcome))


def bell_success_probability(p_odd: float) -> float:
    _check_p(p_odd)
    return 0.5 * (1.0 + p_odd)


def bell_monte_carlo(p_odd: float, trials: int, seed: int = 0):
    """Uniform mixture of the four Bell states through the analyzer.

    Returns ``(success_rate, standard_error, misclassified)``.
    """
    rng = np.random.default_rng(seed)
    labels = list(BELL_STATES)
    inputs = rng.integers(0, 4, size=trials)
    success = 0
    wrong = 0
    for k, label in enumerate(labels):
        n = int(np.sum(inputs == k))
        dist = bell_outcome_distribution(BELL_STATES[label], p_odd)
        keys = list(dist)
        probs = np.array([dist[q] for q in keys])
        draws = rng.choice(len(keys), size=n, p=probs / probs.sum())
        verdict = np.array([classify(q) for q in keys])[draws]
        ok = verdict != FAILURE
        success += int(ok.sum())
        wrong += int(np.sum(ok & (verdict != label)))
    rate = success / trials
    return rate, math.sqrt(max(rate * (1.0 - rate), 1e-300) / trials), wrong


# ---------------------------------------------------------------------------
# teleportation CNOT
# ---------------------------------------------------------------------------
# Qubit order of the six-photon register: control, target, r1, r2, r3, r4.
# The resource ((HH + VV) HH + (HV + VH) VV) / 2 has r3 = r4 = r1 xor r2.
# Control is Bell-measured with r3, target with r1; r4 and r2 carry the
# control and target outputs.

_CONTROL_PAIR = (0, 4)
_TARGET_PAIR = (1, 2)
_OUTPUTS = (5, 3)


def _resource() -> np.ndarray:
    vec = np.zeros(16, dtype=complex)
    for r1, r2 in itertools.product((0, 1), repeat=2):
        r3 = r4 = r1 ^ r2
        vec[r1 * 8 + r2 * 4 + r3 * 2 + r4] = 0.5
    return vec


def cnot(control, target) -> np.ndarray:
    """Ideal CNOT output over (control, target) basis HH, HV, VH, VV."""
    ket = np.kron(np.asarray(control, dtype=complex), np.asarray(target, dtype=complex))
    return ket[[0, 1, 3, 2]]


def _six_photon(control, target) -> np.ndarray:
    return np.kron(np.kron(control, target), _resource()).reshape((2,) * 6)


def _measure(register: np.ndarray, pair: tuple, row: np.ndarray) -> np.ndarray:
    """Contract ``row`` (over the pair's 2-qubit basis) into the register."""
    a, b = pair
    moved = np.moveaxis(register, (a, b), (0, 1))
    out = np.tensordot(row.reshape(2, 2), moved, axes=([0, 1], [0, 1]))
    return out


def _outputs_after(control, target, row_c, row_t) -> np.ndarray:
    reg = _six_photon(np.asarray(control, dtype=complex), np.asarray(target, dtype=complex))
    reg = _measure(reg, _CONTROL_PAIR, row_c)
    # remaining axes: target, r1, r2, r4
    reg = _measure(reg, (0, 1), row_t)
    # remaining axes: r2, r4 -> order as (control out, target out) = (r4, r2)
    return reg.T.reshape(4)


def _fidelity(out: np.ndarray, ideal: np.ndarray) -> float:
    n = np.vdot(out, out).real
    if n == 0:
        return 0.0
    return float(abs(np.vdot(ideal, out)) ** 2 / (n * np.vdot(ideal, ideal).real))


def _random_qubit(rng) -> np.ndarray:
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)


def derive_correction_table(samples: int = 6, seed: int = 7) -> dict:
    """Brute-force search over the 16 Pauli pairs for every Bell outcome pair."""
    rng = np.random.default_rng(seed)
    inputs = [(_random_qubit(rng), _random_qubit(rng)) for _ in range(samples)]
    table = {}
    for lc, lt in itertools.product(BELL_STATES, repeat=2):
        row_c = np.conj(BELL_STATES[lc])
        row_t = np.conj(BELL_STATES[lt])
        for pc, pt in itertools.product(PAULI, repeat=2):
            fix = np.kron(PAULI[pc], PAULI[pt])
            if all(_fidelity(fix @ _outputs_after(c, t, row_c, row_t), cnot(c, t)) > 1 - 1e-12 for c, t in inputs):
                table[(lc, lt)] = (pc, pt)
                break
        else:  # pragma: no cover - would mean the resource cannot teleport a CNOT
            raise RuntimeError(f"no Pauli correction for outcome pair {(lc, lt)}")
    return table


# (control-side label, target-side label) -> (control-output Pauli, target-output Pauli)
CORRECTION_TABLE = {
    ("Phi+", "Phi+"): ("I", "I"),
    ("Phi+", "Phi-"): ("Z", "Z"),
    ("Phi+", "Psi+"): ("I", "X"),
    ("Phi+", "Psi-"): ("Z", "XZ"),
    ("Phi-", "Phi+"): ("Z", "I"),
    ("Phi-", "Phi-"): ("I", "Z"),
    ("Phi-", "Psi+"): ("Z", "X"),
    ("Phi-", "Psi-"): ("I", "XZ"),
    ("Psi+", "Phi+"): ("X", "X"),
    ("Psi+", "Phi-"): ("XZ", "XZ"),
    ("Psi+", "Psi+"): ("X", "I"),
    ("Psi+", "Psi-"): ("XZ", "Z"),
    ("Psi-", "Phi+"): ("XZ", "X"),
    ("Psi-", "Phi-"): ("X", "XZ"),
    ("Psi-", "Psi+"): ("XZ", "I"),
    ("Psi-", "Psi-"): ("X", "Z"),
}


def correction_table(outcome_pair) -> tuple:
    """Pauli corrections for two classified analyzer outcomes."""
    a, b = (o.classified if isinstance(o, BellRecord) else o for o in outcome_pair)
    if a == FAILURE or b == FAILURE:
        raise FailureOutcomeError("no correction is defined for a failed Bell measurement")
    return CORRECTION_TABLE[(a, b)]


def teleport_branches(control, target, p_odd: float) -> list:
    """Every joint analyzer outcome with its probability, classification and
    corrected-output fidelity (NaN when either measurement failed)."""
    control = np.asarray(control, dtype=complex)
    target = np.asarray(target, dtype=complex)
    for q in (control, target):
        if q.shape != (2,) or abs(np.vdot(q, q).real - 1.0) > 1e-12:
            raise ValueError("control and target must be normalized qubits")
    kraus = analyzer_kraus(p_odd)
    ideal = cnot(control, target)
    branches = []
    for (oc, row_c), (ot, row_t) in itertools.product(kraus.items(), repeat=2):
        out = _outputs_after(control, target, row_c, row_t)
        prob = float(np.vdot(out, out).real)
        if prob < 1e-15:
            continue
        lc, lt = classify(oc), classify(ot)
        fid = float("nan")
        if lc != FAILURE and lt != FAILURE:
            pc, pt = CORRECTION_TABLE[(lc, lt)]
            fid = _fidelity(np.kron(PAULI[pc], PAULI[pt]) @ out, ideal)
        branches.append((oc, ot, prob, lc, lt, fid))
    return branches


def teleport_cnot(control, target, p_odd: float, rng_seed: int = 0, trials: int = 100_000) -> GateRunReport:
    """Monte Carlo run of the teleported CNOT; branches are sampled from
    their exact probabilities with a seeded generator."""
    _check_p(p_odd)
    if trials < 1:
        raise ValueError("trials must be positive")
    branches = teleport_branches(control, target, p_odd)
    probs = np.array([b[2] for b in branches])
    rng = np.random.default_rng(rng_seed)
    draws = rng.choice(len(branches), size=trials, p=probs / probs.sum())
    ok = np.array([not math.isnan(b[5]) for b in branches])
    fid = np.array([b[5] if not math.isnan(b[5]) else 1.0 for b in branches])
    hit = ok[draws]
    successes = int(hit.sum())
    rate = successes / trials
    if successes:
        worst = float(np.min(fid[draws[hit]]))
    else:
        worst = float(np.min(fid[ok])) if ok.any() else float("nan")
    analytic = float(probs[ok].sum())
    return GateRunReport(trials, rate, worst, p_odd, analytic, math.sqrt(analytic * (1.0 - analytic) / trials), successes)
