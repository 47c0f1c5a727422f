"""Blind delegated IQP workbench."""

import json

from . import _core
from ._core import (
    BlindIqpError,
    bias,
    exact_distribution,
    expected_bias,
    protocol_distribution,
    qr_generator_matrix,
    quadratic_residues,
)

__all__ = [
    "BlindIqpError",
    "bias",
    "blindness_distance",
    "exact_distribution",
    "expected_bias",
    "hypothesis_test",
    "protocol_distribution",
    "qr_generator_matrix",
    "quadratic_residues",
    "run_blind",
    "simulator_equivalence",
]


def run_blind(q, theta, qt, seed, adversary="honest"):
    x, transcript = _core.run_blind(q, theta, qt, seed, adversary)
    return x, json.loads(transcript)


def blindness_distance(q1, q2, theta, qt, phase="after_state", adversary="honest"):
    return json.loads(_core.blindness_distance(q1, q2, theta, qt, phase, adversary))


def simulator_equivalence(q, theta, qt, adversary="honest"):
    return json.loads(_core.simulator_equivalence(q, theta, qt, adversary))


def hypothesis_test(n_a, samples, threshold=0.80, seed=0, adversary="honest", reveal=False):
    return json.loads(_core.hypothesis_test(n_a, samples, threshold, seed, adversary, reveal))
