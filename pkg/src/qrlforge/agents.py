"""The single agent contract shared by classical networks and quantum circuits.

Training code sees only this surface: ``forward`` produces action values (or
logits) plus an optional state-value scalar, ``gradient`` turns a gradient
w.r.t. those outputs into a gradient over one flat parameter vector.  Which
function approximator sits underneath is invisible to the algorithms.

Quantum agents own an ExecutionCounter and account every statevector run
against it; classical agents carry a counter too, which simply stays at 0.
"""

from __future__ import annotations

import copy
import json
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable

import numpy as np

from . import ansatz as anz
from .envs.base import CONTINUOUS, DISCRETE_INDEX, GRAPH, SpaceDescriptor
from .envs.wrappers import wrap_continuous, wrap_discrete_index
from .errors import ArchitectureMismatchError, ConfigError
from .nn import DenseNet
from .qsim import ExecutionCounter, Observable, counting
from .qsim.program import CircuitProgram

ROLE_VALUE = "value"
ROLE_POLICY = "policy"
ROLE_ACTOR_CRITIC = "actor-critic"
ROLES = (ROLE_VALUE, ROLE_POLICY, ROLE_ACTOR_CRITIC)

CHECKPOINT_FORMAT = "qrlforge-params-v1"


@dataclass
class AgentOutput:
    """Per-action values (Q-values or unnormalized logits) plus an optional critic value."""

    values: np.ndarray
    auxiliary: float | None = None


class Agent(ABC):
    """Common surface for both agent kinds."""

    n_actions: int
    input_dim: int
    role: str
    execution_counter: ExecutionCounter

    @abstractmethod
    def forward(self, observation: np.ndarray) -> AgentOutput:
        raise NotImplementedError

    @abstractmethod
    def gradient(
        self, observation: np.ndarray, values_grad: np.ndarray, aux_grad: float = 0.0
    ) -> np.ndarray:
        raise NotImplementedError

    @abstractmethod
    def get_parameters(self) -> np.ndarray:
        raise NotImplementedError

    @abstractmethod
    def set_parameters(self, flat: np.ndarray) -> None:
        raise NotImplementedError

    @abstractmethod
    def parameter_groups(self) -> list[tuple[str, slice]]:
        raise NotImplementedError

    def forward_batch(self, observations: np.ndarray) -> tuple[np.ndarray, np.ndarray | None]:
        values = []
        aux = []
        for obs in observations:
            out = self.forward(obs)
            values.append(out.values)
            aux.append(out.auxiliary)
        aux_arr = None if aux[0] is None else np.asarray(aux, dtype=np.float64)
        return np.asarray(values), aux_arr

    def gradient_batch(
        self,
        observations: np.ndarray,
        values_grads: np.ndarray,
        aux_grads: np.ndarray | None = None,
    ) -> np.ndarray:
        total = np.zeros(self.n_parameters)
        for i, obs in enumerate(observations):
            aux = 0.0 if aux_grads is None else float(aux_grads[i])
            total += self.gradient(obs, values_grads[i], aux)
        return total

    @property
    def n_parameters(self) -> int:
        return self.get_parameters().size

    def clone(self) -> "Agent":
        """Same architecture and parameters, fresh execution counter."""
        other = copy.deepcopy(self)
        other.execution_counter = ExecutionCounter()
        other.clear_cache()
        return other

    def clear_cache(self) -> None:
        pass

    def save(self, path: str | Path) -> None:
        """Write the flat named-vector checkpoint shared by both agent kinds."""
        flat = self.get_parameters()
        vectors = {name: flat[sl].tolist() for name, sl in self.parameter_groups()}
        payload = {"format": CHECKPOINT_FORMAT, "vectors": vectors}
        Path(path).write_text(json.dumps(payload, indent=1))

    def load(self, path: str | Path) -> None:
        payload = json.loads(Path(path).read_text())
        if payload.get("format") != CHECKPOINT_FORMAT:
            raise ValueError(f"not a {CHECKPOINT_FORMAT} checkpoint: {path}")
        vectors = payload["vectors"]
        flat = self.get_parameters()
        for name, sl in self.parameter_groups():
            if name not in vectors:
                raise ArchitectureMismatchError(f"checkpoint misses parameter group {name!r}")
            arr = np.asarray(vectors[name], dtype=np.float64)
            if arr.size != flat[sl].size:
                raise ArchitectureMismatchError(
                    f"group {name!r} has {arr.size} entries, agent expects {flat[sl].size}"
                )
            flat[sl] = arr
        self.set_parameters(flat)


def agent_forward(agent: Agent, observation: np.ndarray) -> AgentOutput:
    return agent.forward(observation)


def agent_gradient(
    agent: Agent, observation: np.ndarray, output_gradient: np.ndarray, aux_gradient: float = 0.0
) -> np.ndarray:
    return agent.gradient(observation, output_gradient, aux_gradient)


def sync_parameters(source: Agent, target: Agent) -> None:
    """Copy every parameter from source to target; architectures must match."""
    if source.parameter_groups() != target.parameter_groups() or source.n_actions != target.n_actions:
        raise ArchitectureMismatchError(
            f"cannot sync {type(source).__name__} groups {source.parameter_groups()} "
            f"into {type(target).__name__} groups {target.parameter_groups()}"
        )
    target.set_parameters(source.get_parameters())


# ---------------------------------------------------------------------------
# observation encoders


def _onehot_encoder(n_states: int) -> Callable[[np.ndarray], np.ndarray]:
    def encode(obs: np.ndarray) -> np.ndarray:
        out = np.zeros(n_states)
        out[int(round(float(obs[0])))] = 1.0
        return out

    return encode


def _angle_encoder(descriptor: SpaceDescriptor) -> Callable[[np.ndarray], np.ndarray]:
    bounded = {}
    if descriptor.bounds is not None:
        bounded = {i: r for i, r in enumerate(descriptor.bounds) if r is not None}

    def encode(obs: np.ndarray) -> np.ndarray:
        return wrap_continuous(obs, bounded)

    return encode


def _discrete_angle_encoder(n_states: int) -> Callable[[np.ndarray], np.ndarray]:
    def encode(obs: np.ndarray) -> np.ndarray:
        return wrap_discrete_index(int(round(float(obs[0]))), n_states)

    return encode


def _graph_encoder(n_nodes: int) -> Callable[[np.ndarray], np.ndarray]:
    n_feat = n_nodes * (n_nodes - 1) // 2 + n_nodes

    def encode(obs: np.ndarray) -> np.ndarray:
        return np.asarray(obs[:n_feat], dtype=np.float64)

    return encode


def _knapsack_phase_encoder(n_items: int, penalty: float) -> Callable[[np.ndarray], np.ndarray]:
    def encode(obs: np.ndarray) -> np.ndarray:
        values = obs[0 : 3 * n_items : 3]
        weights = obs[1 : 3 * n_items : 3]
        remaining = max(float(obs[-1]), 1e-9)
        return anz.knapsack_phase_features(values, weights, remaining, penalty)

    return encode


# ---------------------------------------------------------------------------
# classical agents


class ClassicalAgent(Agent):
    """Dense-network agent; Q-values or logits straight from the output layer."""

    def __init__(
        self,
        role: str,
        descriptor: SpaceDescriptor,
        hidden_layers: list[int],
        rng: np.random.Generator,
    ) -> None:
        if role not in ROLES:
            raise ValueError(f"unknown role {role!r}")
        self.role = role
        self.n_actions = descriptor.action_count
        self.execution_counter = ExecutionCounter()
        if descriptor.observation_kind == DISCRETE_INDEX:
            assert descriptor.n_states is not None
            self.encode = _onehot_encoder(descriptor.n_states)
            self.input_dim = descriptor.n_states
        else:
            self.encode = lambda obs: np.asarray(obs, dtype=np.float64)
            self.input_dim = descriptor.observation_dim
        self.raw_obs_dim = descriptor.observation_dim
        self.net = DenseNet([self.input_dim, *hidden_layers, self.n_actions], rng)
        self.critic = (
            DenseNet([self.input_dim, *hidden_layers, 1], rng) if role == ROLE_ACTOR_CRITIC else None
        )

    def _check_obs(self, observation: np.ndarray) -> np.ndarray:
        observation = np.asarray(observation, dtype=np.float64)
        if observation.shape[-1] != self.raw_obs_dim:
            raise ValueError(f"observation size {observation.shape[-1]} != {self.raw_obs_dim}")
        return observation

    def forward(self, observation: np.ndarray) -> AgentOutput:
        x = self.encode(self._check_obs(observation))
        values = self.net.forward(x)
        aux = float(self.critic.forward(x)[0]) if self.critic is not None else None
        return AgentOutput(values, aux)

    def forward_batch(self, observations: np.ndarray) -> tuple[np.ndarray, np.ndarray | None]:
        xs = np.stack([self.encode(o) for o in self._check_obs(observations)])
        values = self.net.forward(xs)
        aux = self.critic.forward(xs)[:, 0] if self.critic is not None else None
        return values, aux

    def gradient(
        self, observation: np.ndarray, values_grad: np.ndarray, aux_grad: float = 0.0
    ) -> np.ndarray:
        x = self.encode(self._check_obs(observation))
        _, acts = self.net.forward_cached(x)
        grads, _ = self.net.backward(acts, np.asarray(values_grad, dtype=np.float64))
        parts = [self.net.flatten_grads(grads)]
        if self.critic is not None:
            _, cacts = self.critic.forward_cached(x)
            cgrads, _ = self.critic.backward(cacts, np.array([aux_grad]))
            parts.append(self.critic.flatten_grads(cgrads))
        return np.concatenate(parts)

    def gradient_batch(
        self,
        observations: np.ndarray,
        values_grads: np.ndarray,
        aux_grads: np.ndarray | None = None,
    ) -> np.ndarray:
        xs = np.stack([self.encode(o) for o in self._check_obs(observations)])
        _, acts = self.net.forward_cached(xs)
        grads, _ = self.net.backward(acts, np.asarray(values_grads, dtype=np.float64))
        parts = [self.net.flatten_grads(grads)]
        if self.critic is not None:
            g_aux = np.zeros((len(xs), 1)) if aux_grads is None else np.asarray(aux_grads).reshape(-1, 1)
            _, cacts = self.critic.forward_cached(xs)
            cgrads, _ = self.critic.backward(cacts, g_aux)
            parts.append(self.critic.flatten_grads(cgrads))
        return np.concatenate(parts)

    def get_parameters(self) -> np.ndarray:
        parts = [self.net.get_flat()]
        if self.critic is not None:
            parts.append(self.critic.get_flat())
        return np.concatenate(parts)

    def set_parameters(self, flat: np.ndarray) -> None:
        flat = np.asarray(flat, dtype=np.float64)
        n = self.net.n_params
        self.net.set_flat(flat[:n])
        if self.critic is not None:
            self.critic.set_flat(flat[n : n + self.critic.n_params])

    def parameter_groups(self) -> list[tuple[str, slice]]:
        groups = [("policy", slice(0, self.net.n_params))]
        if self.critic is not None:
            groups.append(("critic", slice(self.net.n_params, self.net.n_params + self.critic.n_params)))
        return groups


# ---------------------------------------------------------------------------
# quantum agents


class QuantumAgent(Agent):
    """Parametrized-quantum-circuit agent.

    Q-values are w_k * <Z_k>; policy logits additionally carry a trainable
    inverse temperature beta (bounded expectations would otherwise cap how
    deterministic the policy can get).  Gradients combine the analytic
    parameter-shift jacobian with the output-scaling chain rule.

    Forward results are cached per observation, so a gradient right after a
    forward costs exactly 2P extra executions (P = trainable gate
    occurrences); a forward always costs 1.
    """

    def __init__(
        self,
        role: str,
        descriptor: SpaceDescriptor,
        spec: anz.AnsatzSpec,
        encoder: Callable[[np.ndarray], np.ndarray],
        rng: np.random.Generator,
        counter: ExecutionCounter | None = None,
        critic_spec: anz.AnsatzSpec | None = None,
    ) -> None:
        if role not in ROLES:
            raise ValueError(f"unknown role {role!r}")
        if len(spec.observables) != descriptor.action_count:
            raise ConfigError(
                f"ansatz supplies {len(spec.observables)} readouts for {descriptor.action_count} actions"
            )
        self.role = role
        self.n_actions = descriptor.action_count
        self.raw_obs_dim = descriptor.observation_dim
        self.input_dim = spec.n_features
        self.encode = encoder
        self.execution_counter = counter if counter is not None else ExecutionCounter()
        self.spec = spec
        self.program = anz.compile_program(spec)
        self.params = anz.initial_params(spec, rng)
        self.beta = np.array([1.0]) if role in (ROLE_POLICY, ROLE_ACTOR_CRITIC) else None
        self.critic_spec = None
        self.critic_program: CircuitProgram | None = None
        if role == ROLE_ACTOR_CRITIC:
            if critic_spec is None:
                raise ConfigError("actor-critic quantum agent needs a critic ansatz")
            if len(critic_spec.observables) != 1:
                raise ConfigError("the critic head must read out exactly one observable")
            self.critic_spec = critic_spec
            self.critic_program = anz.compile_program(critic_spec)
            self.critic_params = anz.initial_params(critic_spec, rng)
        self._cache: dict[bytes, np.ndarray] = {}
        self._critic_cache: dict[bytes, np.ndarray] = {}
        self._layout = self._build_layout()

    def _build_layout(self) -> list[tuple[str, int]]:
        layout = [
            ("theta", self.spec.n_theta),
            ("lambda", self.spec.n_lambda),
            ("w", len(self.spec.observables)),
        ]
        if self.beta is not None:
            layout.append(("beta", 1))
        if self.critic_spec is not None:
            layout.extend(
                [
                    ("critic_theta", self.critic_spec.n_theta),
                    ("critic_lambda", self.critic_spec.n_lambda),
                    ("critic_w", 1),
                ]
            )
        return layout

    def parameter_groups(self) -> list[tuple[str, slice]]:
        groups = []
        pos = 0
        for name, size in self._layout:
            groups.append((name, slice(pos, pos + size)))
            pos += size
        return groups

    def get_parameters(self) -> np.ndarray:
        parts = [self.params.theta, self.params.lam, self.params.w]
        if self.beta is not None:
            parts.append(self.beta)
        if self.critic_spec is not None:
            parts.extend([self.critic_params.theta, self.critic_params.lam, self.critic_params.w])
        return np.concatenate(parts).astype(np.float64, copy=True)

    def set_parameters(self, flat: np.ndarray) -> None:
        flat = np.asarray(flat, dtype=np.float64)
        expected = sum(size for _, size in self._layout)
        if flat.size != expected:
            raise ValueError(f"expected {expected} parameters, got {flat.size}")
        pieces = {}
        pos = 0
        for name, size in self._layout:
            pieces[name] = flat[pos : pos + size].copy()
            pos += size
        self.params = anz.ParamSet(pieces["theta"], pieces["lambda"], pieces["w"])
        if self.beta is not None:
            self.beta = pieces["beta"]
        if self.critic_spec is not None:
            self.critic_params = anz.ParamSet(
                pieces["critic_theta"], pieces["critic_lambda"], pieces["critic_w"]
            )
        self.clear_cache()

    def clear_cache(self) -> None:
        self._cache.clear()
        self._critic_cache.clear()

    def _check_obs(self, observation: np.ndarray) -> np.ndarray:
        observation = np.asarray(observation, dtype=np.float64)
        if observation.shape[-1] != self.raw_obs_dim:
            raise ValueError(f"observation size {observation.shape[-1]} != {self.raw_obs_dim}")
        return observation

    def _expectations(self, features: np.ndarray) -> np.ndarray:
        """Run the main circuit (1 execution) and memoize the readouts."""
        with counting(self.execution_counter):
            exp = self.program.forward(self.params.theta, self.params.lam, features)
        self._cache[features.tobytes()] = exp
        return exp

    def _cached_expectations(self, features: np.ndarray) -> np.ndarray:
        cached = self._cache.get(features.tobytes())
        return cached if cached is not None else self._expectations(features)

    def _critic_value(self, features: np.ndarray) -> float:
        assert self.critic_program is not None
        key = features.tobytes()
        cached = self._critic_cache.get(key)
        if cached is None:
            with counting(self.execution_counter):
                cached = self.critic_program.forward(
                    self.critic_params.theta, self.critic_params.lam, features
                )
            self._critic_cache[key] = cached
        return float(self.critic_params.w[0] * cached[0])

    def forward(self, observation: np.ndarray) -> AgentOutput:
        features = self.encode(self._check_obs(observation))
        exp = self._expectations(features)
        values = self.params.w * exp
        if self.beta is not None:
            values = self.beta[0] * values
        aux = self._critic_value(features) if self.critic_spec is not None else None
        return AgentOutput(values, aux)

    def gradient(
        self, observation: np.ndarray, values_grad: np.ndarray, aux_grad: float = 0.0
    ) -> np.ndarray:
        values_grad = np.asarray(values_grad, dtype=np.float64)
        if values_grad.size != self.n_actions:
            raise ValueError(f"output gradient size {values_grad.size} != {self.n_actions}")
        sizes = dict(self._layout)
        parts = {name: np.zeros(size) for name, size in self._layout}
        if np.any(values_grad != 0.0) or (aux_grad != 0.0 and self.critic_spec is not None):
            features = self.encode(self._check_obs(observation))
            if np.any(values_grad != 0.0):
                exp = self._cached_expectations(features)
                scale = values_grad * self.params.w
                if self.beta is not None:
                    scale = self.beta[0] * scale
                with counting(self.execution_counter):
                    jac = self.program.gradient(self.params.theta, self.params.lam, features)
                g_circ = scale @ jac
                parts["theta"] = g_circ[: self.spec.n_theta]
                parts["lambda"] = g_circ[self.spec.n_theta :]
                beta_factor = self.beta[0] if self.beta is not None else 1.0
                parts["w"] = beta_factor * values_grad * exp
                if self.beta is not None:
                    parts["beta"] = np.array([float(values_grad @ (self.params.w * exp))])
            if aux_grad != 0.0 and self.critic_spec is not None:
                cexp = self._critic_cache.get(features.tobytes())
                if cexp is None:
                    with counting(self.execution_counter):
                        cexp = self.critic_program.forward(
                            self.critic_params.theta, self.critic_params.lam, features
                        )
                    self._critic_cache[features.tobytes()] = cexp
                with counting(self.execution_counter):
                    cjac = self.critic_program.gradient(
                        self.critic_params.theta, self.critic_params.lam, features
                    )
                g_c = aux_grad * self.critic_params.w[0] * cjac[0]
                parts["critic_theta"] = g_c[: self.critic_spec.n_theta]
                parts["critic_lambda"] = g_c[self.critic_spec.n_theta :]
                parts["critic_w"] = np.array([aux_grad * float(cexp[0])])
        return np.concatenate([parts[name] for name, _ in self._layout])

    @property
    def n_parameters(self) -> int:
        return sum(size for _, size in self._layout)

    def parameter_occurrences(self, observation: np.ndarray | None = None) -> int:
        """Trainable gate occurrences P of the main circuit; gradient = 2P runs."""
        features = None
        if observation is not None:
            features = self.encode(self._check_obs(observation))
        return self.program.occurrences(features)


# ---------------------------------------------------------------------------
# construction

HARDWARE_EFFICIENT = "hardware_efficient"
GRAPH_ANSATZ = "graph"
HAMILTONIAN_ANSATZ = "hamiltonian"


def default_ansatz_for(descriptor: SpaceDescriptor) -> str:
    if descriptor.observation_kind == GRAPH:
        return GRAPH_ANSATZ
    if descriptor.knapsack_items is not None:
        return HAMILTONIAN_ANSATZ
    return HARDWARE_EFFICIENT


def _quantum_parts(
    descriptor: SpaceDescriptor, agent_params: dict, need_critic: bool
) -> tuple[anz.AnsatzSpec, Callable, anz.AnsatzSpec | None]:
    name = agent_params.get("ansatz") or default_ansatz_for(descriptor)
    n_layers = int(agent_params.get("n_layers", 2))
    if name == HARDWARE_EFFICIENT:
        if descriptor.observation_kind == DISCRETE_INDEX:
            assert descriptor.n_states is not None
            n_qubits_needed = max(1, math.ceil(math.log2(descriptor.n_states)))
            encoder = _discrete_angle_encoder(descriptor.n_states)
        else:
            n_qubits_needed = descriptor.observation_dim
            encoder = _angle_encoder(descriptor)
        n_qubits = int(agent_params.get("n_qubits", n_qubits_needed))
        if n_qubits != n_qubits_needed:
            raise ConfigError(
                f"hardware-efficient ansatz needs n_qubits={n_qubits_needed} for this "
                f"environment (one qubit per input feature), got {n_qubits}"
            )
        if descriptor.action_count > n_qubits:
            raise ConfigError(
                f"{descriptor.action_count} actions need at least as many qubits, have {n_qubits}"
            )
        spec = anz.build_hardware_efficient(n_qubits, n_layers, descriptor.action_count)
        critic = anz.build_hardware_efficient(n_qubits, n_layers, 1) if need_critic else None
        return spec, encoder, critic
    if name == GRAPH_ANSATZ:
        if descriptor.observation_kind != GRAPH or descriptor.graph_nodes is None:
            raise ConfigError("the graph ansatz requires a graph-structured environment")
        spec = anz.build_graph_equivariant(descriptor.graph_nodes, n_layers)
        encoder = _graph_encoder(descriptor.graph_nodes)
        critic = None
        if need_critic:
            parity = Observable({q: "Z" for q in range(descriptor.graph_nodes)})
            critic = replace(spec, observables=(parity,))
        return spec, encoder, critic
    if name == HAMILTONIAN_ANSATZ:
        if descriptor.knapsack_items is None:
            raise ConfigError("the hamiltonian ansatz requires a knapsack environment")
        n = descriptor.knapsack_items
        penalty = float(agent_params.get("knapsack_penalty", 1.0))
        spec, _ = anz.build_cost_hamiltonian_knapsack(
            np.ones(n), np.ones(n), 1.0, penalty, n_layers=n_layers
        )
        encoder = _knapsack_phase_encoder(n, penalty)
        critic = None
        if need_critic:
            parity = Observable({q: "Z" for q in range(n)})
            critic = replace(spec, observables=(parity,))
        return spec, encoder, critic
    raise ConfigError(f"unknown ansatz {name!r}")


def make_agent(
    agent_kind: str,
    role: str,
    descriptor: SpaceDescriptor,
    agent_params: dict,
    rng: np.random.Generator,
    counter: ExecutionCounter | None = None,
) -> Agent:
    if role not in ROLES:
        raise ConfigError(f"unknown agent role {role!r}")
    if agent_kind == "classical":
        hidden = list(agent_params.get("hidden_layers", [64, 64]))
        agent: Agent = ClassicalAgent(role, descriptor, hidden, rng)
        if counter is not None:
            agent.execution_counter = counter
        return agent
    if agent_kind == "quantum":
        spec, encoder, critic_spec = _quantum_parts(descriptor, agent_params, role == ROLE_ACTOR_CRITIC)
        return QuantumAgent(role, descriptor, spec, encoder, rng, counter, critic_spec)
    raise ConfigError(f"unknown agent kind {agent_kind!r}")
