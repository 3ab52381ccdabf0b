import itertools
import math
from dataclasses import asdict

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chi2spectral import bellgate
from chi2spectral.bellgate import BELL_STATES, FAILURE, PolarizationState
from chi2spectral.errors import FailureOutcomeError, InvalidStateError

P_VALUES = [0.0, 0.25, 0.5, 0.75, 1.0]
DETECTORS = ["D1", "D3", "D2", "D4"]  # output modes (a,H), (a,V), (b,H), (b,V)


def _linear_optics_rows():
    """Detector-pair amplitudes from the single-photon mode matrix and
    two-photon permanents, independent of the analyzer's own bookkeeping."""
    r = 1 / math.sqrt(2)
    # input modes (s,H), (s,V), (i,H), (i,V); columns of U are images
    U = np.zeros((4, 4))
    U[0, 0] = U[2, 0] = r          # s,H -> (a,H) + (b,H)
    U[1, 1] = U[3, 1] = r          # s,V -> (a,V) + (b,V)
    U[1, 2], U[3, 2] = r, -r       # i,H -> HWP -> V -> (a,V) - (b,V)
    U[0, 3], U[2, 3] = r, -r       # i,V -> HWP -> H -> (a,H) - (b,H)
    rows = {}
    for col, (ps, pi) in enumerate(itertools.product((0, 1), repeat=2)):
        s_in, i_in = ps, 2 + pi
        for m, n in itertools.combinations_with_replacement(range(4), 2):
            amp = U[m, s_in] * U[n, i_in] + U[n, s_in] * U[m, i_in]
            if m == n:
                amp /= math.sqrt(2)
            key = tuple(sorted((DETECTORS[m], DETECTORS[n])))
            rows.setdefault(key, np.zeros(4))[col] += amp
    return {k: v for k, v in rows.items() if np.any(np.abs(v) > 1e-15)}


def test_passing_rows_match_permanent_oracle():
    kraus = bellgate.analyzer_kraus(0.0)
    oracle = _linear_optics_rows()
    passing = {k: v for k, v in kraus.items() if k[0] != "pump"}
    assert set(passing) == set(oracle)
    for key in oracle:
        assert np.allclose(passing[key], oracle[key], atol=1e-15)
    assert np.allclose(kraus[("pump", "+")], 0) and np.allclose(kraus[("pump", "-")], 0)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 1))
def test_kraus_complete(p):
    total = sum(np.outer(np.conj(k), k) for k in bellgate.analyzer_kraus(p).values())
    assert np.allclose(total, np.eye(4), atol=1e-12)


@pytest.mark.parametrize("p", P_VALUES)
def test_no_misclassification_and_per_state_success(p):
    for label, vec in BELL_STATES.items():
        dist = bellgate.bell_outcome_distribution(vec, p)
        assert sum(dist.values()) == pytest.approx(1.0, abs=1e-12)
        verdicts = {bellgate.classify(k) for k in dist}
        assert verdicts <= {label, FAILURE}
        success = sum(v for k, v in dist.items() if bellgate.classify(k) == label)
        assert success == pytest.approx(1.0 if label.startswith("Phi") else p, abs=1e-12)


@pytest.mark.parametrize("p", P_VALUES)
def test_bell_monte_carlo(p):
    rate, se, wrong = bellgate.bell_monte_carlo(p, 100_000, seed=3)
    assert wrong == 0
    expected = bellgate.bell_success_probability(p)
    sigma = math.sqrt(expected * (1 - expected) / 100_000)
    assert abs(rate - expected) <= 3 * max(sigma, 1e-12)


def test_bell_analyze_sampling():
    rec = bellgate.bell_analyze(PolarizationState.bell("Phi-"), 0.3, rng_seed=1)
    assert rec.input_label == "Phi-" and rec.classified in ("Phi-", FAILURE)
    assert bellgate.bell_analyze(BELL_STATES["Psi+"], 1.0, rng_seed=2).classified == "Psi+"
    assert bellgate.bell_analyze(BELL_STATES["Psi-"], 0.0, rng_seed=2).classified == FAILURE


def test_classify_unknown_is_failure():
    assert bellgate.classify(("D1", "D1")) == FAILURE
    assert bellgate.classify(("D1", "D2")) == FAILURE
    assert bellgate.classify(("pump", "+")) == "Psi+"


def test_state_validation():
    with pytest.raises(InvalidStateError):
        PolarizationState.two_photon([1, 1, 0, 0])
    with pytest.raises(InvalidStateError):
        PolarizationState(("HH", "HH"), np.array([1, 0]))
    with pytest.raises(InvalidStateError):
        bellgate.bell_outcome_distribution(np.ones(3) / math.sqrt(3), 0.5)
    with pytest.raises(ValueError):
        bellgate.analyzer_kraus(1.5)
    assert PolarizationState.two_photon(1j * BELL_STATES["Psi-"]).bell_label() == "Psi-"
    assert PolarizationState.two_photon([1, 0, 0, 0]).bell_label() is None


def test_cnot_truth_table():
    H, V = np.array([1, 0]), np.array([0, 1])
    assert np.allclose(bellgate.cnot(H, H), [1, 0, 0, 0])
    assert np.allclose(bellgate.cnot(H, V), [0, 1, 0, 0])
    assert np.allclose(bellgate.cnot(V, H), [0, 0, 0, 1])
    assert np.allclose(bellgate.cnot(V, V), [0, 0, 1, 0])


def test_correction_table_rederived():
    assert bellgate.derive_correction_table(samples=8, seed=123) == bellgate.CORRECTION_TABLE


def test_correction_table_lookup():
    rec = bellgate.BellRecord("Psi+", ("pump", "+"), "Psi+")
    assert bellgate.correction_table((rec, "Phi-")) == ("XZ", "XZ")
    with pytest.raises(FailureOutcomeError):
        bellgate.correction_table((FAILURE, "Phi+"))


@pytest.mark.parametrize("p", P_VALUES)
def test_teleport_branches_exact(p, rng):
    c = rng.normal(size=2) + 1j * rng.normal(size=2)
    t = rng.normal(size=2) + 1j * rng.normal(size=2)
    branches = bellgate.teleport_branches(c / np.linalg.norm(c), t / np.linalg.norm(t), p)
    assert sum(b[2] for b in branches) == pytest.approx(1.0, abs=1e-12)
    good = [b for b in branches if not math.isnan(b[5])]
    assert sum(b[2] for b in good) == pytest.approx(0.25 * (1 + p) ** 2, abs=1e-12)
    assert min(b[5] for b in good) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("p", P_VALUES)
def test_teleport_cnot_monte_carlo(p):
    c = np.array([0.6, 0.8j])
    t = np.array([1, 1]) / math.sqrt(2)
    r = bellgate.teleport_cnot(c, t, p, rng_seed=9, trials=100_000)
    expected = 0.25 * (1 + p) ** 2
    assert r.analytic_success == pytest.approx(expected, abs=1e-12)
    assert abs(r.success_rate - expected) <= 3 * max(r.standard_error, 1e-12)
    assert r.conditional_output_fidelity == pytest.approx(1.0, abs=1e-9)


def test_teleport_deterministic_with_seed():
    a = bellgate.teleport_cnot([1, 0], [0, 1], 0.4, 11, 5000)
    b = bellgate.teleport_cnot([1, 0], [0, 1], 0.4, 11, 5000)
    assert asdict(a) == asdict(b)
    assert bellgate.bell_monte_carlo(0.4, 5000, 5) == bellgate.bell_monte_carlo(0.4, 5000, 5)


def test_teleport_rejects_bad_inputs():
    with pytest.raises(ValueError):
        bellgate.teleport_cnot([1, 1], [1, 0], 0.5)
    with pytest.raises(ValueError):
        bellgate.teleport_cnot([1, 0], [1, 0], 0.5, trials=0)
    with pytest.raises(ValueError):
        bellgate.teleport_cnot([1, 0], [1, 0], -0.1)
