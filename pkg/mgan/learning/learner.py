""" TD learner: targets from the target network, squared TD loss and parameter updates
    License: MIT
"""

import logging
from typing import Any, Dict, Optional, Tuple

import numpy as np

from mgan.agents.qnet import AgentQNetwork, build_inputs, greedy_actions
from mgan.autodiff.checkpoint import Checkpoint
from mgan.autodiff.ops import mul, reduce_sum, reshape, scale, sub, take_along
from mgan.autodiff.optimizers import OptimizerState, clip_grad_norm, optimizer_step
from mgan.autodiff.parameters import ParameterTree
from mgan.autodiff.tape import Tape, Variable, backward
from mgan.envs.base import EnvSpec
from mgan.exceptions import CheckpointError
from mgan.learning.config import TrainConfig
from mgan.learning.episode import EpisodeBatch
from mgan.mixers import MixerT, make_mixer

logger = logging.getLogger(__name__)


def build_model(
    algorithm: str, spec: EnvSpec, config: TrainConfig, rng: np.random.Generator
) -> Tuple[AgentQNetwork, MixerT, ParameterTree]:
    """Agent network, mixer and freshly initialized parameters for an environment

    Args:
        algorithm (str): `mgan`, `vdn` or `qmix`
        spec (EnvSpec): Sizes of the environment
        config (TrainConfig): Network sizes
        rng (np.random.Generator): Initialization randomness
    Returns:
        tuple: agent network, mixer, parameter tree"""
    agent = AgentQNetwork(spec.obs_dim, spec.n_actions, spec.n_agents, config.agent_hidden)
    mixer = make_mixer(
        algorithm,
        spec.n_agents,
        spec.obs_dim,
        spec.state_dim,
        n_graphs=config.n_graphs,
        embed_dim=config.embed_dim,
        mixing_embed=config.mixing_embed,
    )
    params = ParameterTree()
    agent.init_params(params, rng)
    mixer.init_params(params, rng)
    return agent, mixer, params


def episode_q_values(tape: Tape, agent: AgentQNetwork, batch: EpisodeBatch, steps: int) -> Variable:
    """Agent Q values for the first `steps` steps of every episode, `[B, steps, n, n_actions]`"""
    inputs = build_inputs(batch.obs[:, :steps], batch.last_actions()[:, :steps], agent.n_actions)
    return agent.unroll(tape, inputs)


def mix_steps(
    tape: Tape, mixer: MixerT, chosen_q: Variable, batch: EpisodeBatch, start: int, steps: int
) -> Variable:
    """Q_tot of steps `start..start+steps-1` of every episode, `[B, steps]`"""
    size, n_agents = len(batch), batch.n_agents
    rows = size * steps
    window = slice(start, start + steps)
    obs = batch.obs[:, window].reshape((rows, n_agents, -1))
    state = batch.state[:, window].reshape((rows, -1))
    alive = batch.alive[:, window].reshape((rows, n_agents))
    q_tot = mixer.forward(tape, reshape(chosen_q, (rows, n_agents)), obs, state, alive)
    return reshape(q_tot, (size, steps))


class Learner:
    """Online parameters θ, target parameters θ⁻ and the optimizer

    Args:
        agent (AgentQNetwork): The shared agent network
        mixer (MganMixer|VdnMixer|QmixMixer): The mixing network
        params (ParameterTree): The online parameters
        config (TrainConfig): The hyperparameters"""

    __slots__ = ("_agent", "_mixer", "_params", "_target", "_optimizer", "_config", "_train_steps")

    def __init__(self, agent: AgentQNetwork, mixer: MixerT, params: ParameterTree, config: TrainConfig) -> None:
        self._agent = agent
        self._mixer = mixer
        self._params = params
        self._target = params.copy()
        self._config = config
        self._optimizer = OptimizerState(params, config.learning_rate, config.rms_alpha, config.rms_eps)
        self._train_steps = 0

    @classmethod
    def create(cls, algorithm: str, spec: EnvSpec, config: TrainConfig, rng: np.random.Generator) -> "Learner":
        """Learner with freshly initialized parameters"""
        agent, mixer, params = build_model(algorithm, spec, config, rng)
        return cls(agent, mixer, params, config)

    @property
    def agent(self) -> AgentQNetwork:
        """AgentQNetwork: The agent network"""
        return self._agent

    @property
    def mixer(self) -> MixerT:
        """The mixing network"""
        return self._mixer

    @property
    def params(self) -> ParameterTree:
        """ParameterTree: The online parameters θ"""
        return self._params

    @property
    def target_params(self) -> ParameterTree:
        """ParameterTree: The target parameters θ⁻"""
        return self._target

    @property
    def optimizer(self) -> OptimizerState:
        """OptimizerState: The RMSProp accumulators"""
        return self._optimizer

    @property
    def train_steps(self) -> int:
        """int: Number of parameter updates

        Note:
            Not settable"""
        return self._train_steps

    def q_tot(self, tape: Tape, batch: EpisodeBatch) -> Variable:
        """Q_tot of the actions taken in the batch, `[B, T]`"""
        steps = batch.max_steps
        q = episode_q_values(tape, self._agent, batch, steps)
        chosen = take_along(q, batch.actions)
        return mix_steps(tape, self._mixer, chosen, batch, 0, steps)

    def td_targets(self, batch: EpisodeBatch, target_params: Optional[ParameterTree] = None) -> np.ndarray:
        """`y = r + gamma * (1 - terminated) * Q_tot(next, greedy next actions; θ⁻)`

        The joint maximum is taken through the per-agent greedy actions of the target
        agent network, which is exact for monotonic mixers.

        Args:
            batch (EpisodeBatch): The episodes
            target_params (ParameterTree): Parameters for the targets; defaults to θ⁻
        Returns:
            np.ndarray: Targets `[B, T]`; constants with respect to θ"""
        params = target_params if target_params is not None else self._target
        steps = batch.max_steps
        gamma = self._config.gamma
        if gamma == 0.0:
            return batch.rewards.copy()
        tape = Tape(params, record=False)
        q = episode_q_values(tape, self._agent, batch, steps + 1)
        next_q = q.value[:, 1:]
        greedy = greedy_actions(next_q, batch.avail[:, 1:])
        chosen = tape.constant(np.take_along_axis(next_q, greedy[..., None], axis=-1)[..., 0])
        next_tot = mix_steps(tape, self._mixer, chosen, batch, 1, steps).value
        return batch.rewards + gamma * (1.0 - batch.terminated) * next_tot

    def loss(self, tape: Tape, batch: EpisodeBatch, targets: np.ndarray) -> Variable:
        """Mean squared TD error over the filled steps

        Args:
            tape (Tape): A recording tape over θ
            batch (EpisodeBatch): The episodes
            targets (np.ndarray): `[B, T]` from :meth:`td_targets`
        Returns:
            Variable: The scalar loss
        Raises:
            ValueError: When the batch holds no filled step"""
        filled = float(np.sum(batch.filled))
        if filled == 0.0:
            raise ValueError("loss: the batch holds no filled step")
        err = sub(self.q_tot(tape, batch), tape.constant(np.where(batch.filled > 0, targets, 0.0)))
        masked = mul(mul(err, err), tape.constant(batch.filled))
        return scale(reduce_sum(masked), 1.0 / filled)

    def gradients(self, batch: EpisodeBatch, targets: Optional[np.ndarray] = None) -> Tuple[float, Dict[str, np.ndarray]]:
        """Loss value and its gradient for every trainable parameter"""
        if targets is None:
            targets = self.td_targets(batch)
        tape = Tape(self._params)
        loss = self.loss(tape, batch, targets)
        return float(loss.value), backward(tape, loss)

    def train_step(self, batch: EpisodeBatch) -> float:
        """One optimizer update on `batch`; syncs θ⁻ every `target_update_period` updates

        Returns:
            float: The loss before the update"""
        loss, grads = self.gradients(batch)
        if self._config.grad_clip > 0:
            clip_grad_norm(grads, self._config.grad_clip)
        self._params = optimizer_step(self._params, grads, self._optimizer)
        self._train_steps += 1
        if self._train_steps % self._config.target_update_period == 0:
            self.update_target()
        return loss

    def update_target(self) -> None:
        """Copy θ into θ⁻"""
        self._target.assign(self._params)
        logger.debug("target network synchronised after %d updates", self._train_steps)

    def to_checkpoint(self, metadata: Optional[Dict[str, Any]] = None) -> Checkpoint:
        """Snapshot of θ, θ⁻ and the optimizer"""
        meta = dict(metadata) if metadata is not None else {}
        meta["train_steps"] = self._train_steps
        return Checkpoint(self._params.copy(), self._target.copy(), self._optimizer, meta)

    def restore(self, checkpoint: Checkpoint) -> None:
        """Load θ, θ⁻, the optimizer and the update counter from a checkpoint

        Raises:
            CheckpointMismatchError: When the stored parameters do not fit this architecture"""
        checkpoint.check_structure(self._params)
        square_avg = checkpoint.optimizer.square_avg
        if len(square_avg) and not square_avg.structure_equals(checkpoint.params):
            raise CheckpointError("Checkpoint: optimizer state does not match the parameters")
        self._params = checkpoint.params.copy()
        self._target = checkpoint.target_params.copy()
        self._optimizer = checkpoint.optimizer
        self._train_steps = int(checkpoint.metadata.get("train_steps", 0))
