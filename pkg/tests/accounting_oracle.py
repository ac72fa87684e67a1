"""Independent recount of circuit executions for quantum DQN trials.

Recomputes the expected cumulative counter at every logged episode from the
metrics file and the config alone, without touching the simulator:

    executions(record) = sum of episode lengths so far        (1 per step)
                       + updates_so_far * batch * (2P + 1)

where updates happen at every global step s with s >= learning_starts and
s % train_frequency == 0, and P counts the trainable gate occurrences of the
hardware-efficient circuit: theta occurrences 2*q*l plus lambda occurrences
q*l, so P = 3 * n_qubits * n_layers.
"""

from __future__ import annotations


def hea_occurrences(n_qubits: int, n_layers: int) -> int:
    return 3 * n_qubits * n_layers


def updates_until(step: int, learning_starts: int, train_frequency: int) -> int:
    if step < learning_starts:
        return 0
    first = learning_starts + (-learning_starts) % train_frequency
    if first > step:
        return 0
    return (step - first) // train_frequency + 1


def expected_dqn_executions(records, config: dict, n_qubits: int) -> list[int]:
    algo = config.get("algorithm_params", {})
    learning_starts = int(algo.get("learning_starts", 1000))
    train_frequency = int(algo.get("train_frequency", 1))
    batch_size = int(algo.get("batch_size") or 16)
    n_layers = int(config.get("agent_params", {}).get("n_layers", 2))
    p = hea_occurrences(n_qubits, n_layers)
    expected = []
    forwards = 0
    for record in records:
        forwards += record.length
        updates = updates_until(record.global_step, learning_starts, train_frequency)
        expected.append(forwards + updates * batch_size * (2 * p + 1))
    return expected
