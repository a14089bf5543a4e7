"""scikit-learn compatible wrappers.

The annealers treat a problem instance as their input: ``fit`` runs the
anneal, ``predict`` returns the most probable spin configuration and
``score`` the ground-state success probability. Hyperparameters follow the
usual ``get_params`` / ``set_params`` / ``clone`` protocol, so parameter
sweeps can be written with ``sklearn.model_selection.ParameterGrid``.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin, clone
from sklearn.utils.validation import check_array, check_is_fitted

from ._validation import check_choice, check_instance, check_positive
from .analysis import success_curve, success_probability
from .evolve import DEFAULT_TOL, adiabatic_initial_state, evolve
from .hamiltonians import bqa_hamiltonian, qa_hamiltonian
from .instances import brute_force_ground_states
from .meanfield import solve_selfconsistent
from .schedules import PROTOCOLS, BqaSchedule, QaSchedule

__all__ = ["BifurcationAnnealer", "TransverseFieldAnnealer", "MeanFieldMagnetization"]


class _Annealer(BaseEstimator):
    def _schedule(self):
        raise NotImplementedError

    def _hamiltonian(self, instance):
        raise NotImplementedError

    def _initial_state(self, hamiltonian):
        return adiabatic_initial_state(hamiltonian)

    def fit(self, X, y=None):
        """Anneal the instance ``X`` (instance, dict or path)."""
        instance = check_instance(X)
        hamiltonian = self._hamiltonian(instance)
        self.instance_ = instance
        self.result_ = evolve(
            hamiltonian,
            self._initial_state(hamiltonian),
            sample_count=self.n_samples,
            tol=self.tol,
        )
        self.oracle_ = brute_force_ground_states(instance)
        self.report_ = success_probability(self.result_, self.oracle_)
        self.success_probability_ = self.report_.success_probability
        self.n_spins_ = instance.n
        return self

    def _fitted_for(self, X):
        if X is None:
            check_is_fitted(self, "result_")
            return self
        instance = check_instance(X)
        if getattr(self, "instance_", None) == instance:
            return self
        return clone(self).fit(instance)

    def predict_proba(self, X=None) -> np.ndarray:
        """Final probability of each spin configuration, in ``spin_configurations_`` order."""
        est = self._fitted_for(X)
        basis = est.result_.basis
        configs = est.spin_configurations_
        probs = est.result_.final_state.probabilities()
        return np.array([probs[basis.encode(c)] for c in configs])

    @property
    def spin_configurations_(self) -> np.ndarray:
        check_is_fitted(self, "result_")
        n = self.n_spins_
        idx = np.arange(2**n)[:, None] >> np.arange(n - 1, -1, -1)
        return 1 - 2 * (idx & 1)

    def predict(self, X=None) -> np.ndarray:
        """Most probable +/-1 configuration after the anneal."""
        est = self._fitted_for(X)
        return est.spin_configurations_[int(np.argmax(est.predict_proba()))]

    def score(self, X=None, y=None) -> float:
        return float(self._fitted_for(X).success_probability_)

    def success_curve(self) -> tuple:
        """``(times, ground-state probability)`` over the sampled trajectory."""
        check_is_fitted(self, "result_")
        return self.result_.times, success_curve(self.result_, self.oracle_)


class BifurcationAnnealer(_Annealer):
    """Bifurcation-based annealing on qutrits.

    Parameters
    ----------
    b0, a0 : float
        Bifurcation and driver amplitudes.
    t_final : float
        Annealing time.
    protocol : {"gauss", "const"}
        Driver shape.
    sigma2 : float
        Width of the Gaussian driver.
    sx2_weight : float
        Weight of the optional ``(Sx)^2`` driver; 0 disables it.
    initial_state : {"adiabatic", "ideal"}
        Start from the ground state of ``H(0)`` or from exactly ``|0...0>``.
    tol : float
        Integrator tolerance.
    n_samples : int
        Number of stored sample times.
    """

    def __init__(
        self,
        b0=20.0,
        a0=2.0,
        t_final=200.0,
        protocol="gauss",
        sigma2=0.1,
        sx2_weight=0.0,
        initial_state="adiabatic",
        tol=DEFAULT_TOL,
        n_samples=21,
    ):
        self.b0 = b0
        self.a0 = a0
        self.t_final = t_final
        self.protocol = protocol
        self.sigma2 = sigma2
        self.sx2_weight = sx2_weight
        self.initial_state = initial_state
        self.tol = tol
        self.n_samples = n_samples

    def _schedule(self):
        check_choice("protocol", self.protocol, PROTOCOLS)
        return BqaSchedule(
            check_positive("b0", self.b0),
            check_positive("a0", self.a0),
            check_positive("t_final", self.t_final),
            self.protocol,
            check_positive("sigma2", self.sigma2),
        )

    def _hamiltonian(self, instance):
        return bqa_hamiltonian(instance, self._schedule(), sx2_weight=self.sx2_weight)

    def _initial_state(self, hamiltonian):
        check_choice("initial_state", self.initial_state, ("adiabatic", "ideal"))
        return adiabatic_initial_state(hamiltonian, ideal=self.initial_state == "ideal")


class TransverseFieldAnnealer(_Annealer):
    """Standard linear-schedule annealing on qubits."""

    def __init__(self, gamma=1.0, t_final=200.0, tol=DEFAULT_TOL, n_samples=21):
        self.gamma = gamma
        self.t_final = t_final
        self.tol = tol
        self.n_samples = n_samples

    def _hamiltonian(self, instance):
        schedule = QaSchedule(check_positive("gamma", self.gamma), check_positive("t_final", self.t_final))
        return qa_hamiltonian(instance, schedule)


class MeanFieldMagnetization(TransformerMixin, BaseEstimator):
    """Map rows ``(A, B)`` to the self-consistent magnetization ``m_s``."""

    def __init__(self, jz=1.0):
        self.jz = jz

    def fit(self, X, y=None):
        check_positive("jz", self.jz)
        X = check_array(X, dtype=float)
        if X.shape[1] != 2:
            raise ValueError(f"expected 2 columns (A, B), got {X.shape[1]}")
        self.n_features_in_ = 2
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_array(X, dtype=float)
        if X.shape[1] != 2:
            raise ValueError(f"expected 2 columns (A, B), got {X.shape[1]}")
        return np.array([[solve_selfconsistent(a, b, self.jz).m_s] for a, b in X])
