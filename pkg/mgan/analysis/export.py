""" Credit-weight and embedding exports of greedy episodes
    License: MIT
"""

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from mgan.agents.qnet import AgentQNetwork
from mgan.analysis.pca import pca_project
from mgan.autodiff.ops import masked_softmax
from mgan.autodiff.parameters import ParameterTree
from mgan.autodiff.tape import Tape
from mgan.envs.base import CoopEnv
from mgan.learning.episode import collect_episode
from mgan.mixers.mgan import MganMixer
from mgan.utilities import resolve_path

logger = logging.getLogger(__name__)

ANALYSIS_COLUMNS = ("episode", "t", "agent", "graph", "weight", "scalar", "hp", "alive")
PCA_COLUMNS = ("episode", "t", "agent", "graph", "pc1", "pc2")


@dataclass(frozen=True)
class AnalysisRecord:
    """Embedding, transform scalar and credit weight of one agent in one graph network at one step"""

    episode: int
    t: int
    agent: int
    graph: int
    weight: float
    scalar: float
    hp: Optional[float]
    alive: bool
    embedding: Tuple[float, ...]

    def row(self) -> List[Union[int, float, str]]:
        """CSV row in the order of `ANALYSIS_COLUMNS` followed by the embedding"""
        hp = "" if self.hp is None else repr(self.hp)
        return [
            self.episode,
            self.t,
            self.agent,
            self.graph,
            repr(self.weight),
            repr(self.scalar),
            hp,
            int(self.alive),
        ] + [repr(x) for x in self.embedding]


@dataclass(frozen=True)
class PcaRecord:
    """2-D projection of one embedding, pooled per episode and graph network"""

    episode: int
    t: int
    agent: int
    graph: int
    pc1: float
    pc2: float


def analyze(
    env: CoopEnv,
    agent: AgentQNetwork,
    mixer: MganMixer,
    params: ParameterTree,
    episodes: int,
    seed: int = 0,
) -> Tuple[List[AnalysisRecord], List[PcaRecord]]:
    """Roll greedy episodes and export every credit weight and embedding

    Args:
        env (CoopEnv): The environment; episode i is reset with `seed + i`
        agent (AgentQNetwork): The agent network
        mixer (MganMixer): The mixer whose graph networks are inspected
        params (ParameterTree): The parameters
        episodes (int): Number of episodes
        seed (int): Seed of the first episode
    Returns:
        tuple: one AnalysisRecord per (episode, t, agent, graph) and one PcaRecord for each as well
    Raises:
        TypeError: When the mixer has no graph networks
        ValueError: When `episodes` is not positive"""
    if not isinstance(mixer, MganMixer):
        raise TypeError("analyze: only the mgan mixer has graph networks to export")
    if episodes <= 0:
        raise ValueError(f"analyze: episodes must be positive; got {episodes}")
    records: List[AnalysisRecord] = []
    projections: List[PcaRecord] = []
    for ep_idx in range(episodes):
        episode = collect_episode(env, agent, params, 0.0, None, seed=seed + ep_idx)
        steps, n_agents = len(episode), episode.n_agents
        obs, alive = episode.obs[:steps], episode.alive[:steps]
        tape = Tape(params, record=False)
        embeddings = mixer.embed(tape, obs, alive)
        for g in range(embeddings.n_graphs):
            emb = embeddings.embeddings[g].value
            scalars = embeddings.scalars[g]
            weights = masked_softmax(scalars, alive, allow_empty=True).value
            for t in range(steps):
                for a in range(n_agents):
                    hp = None if episode.health is None else float(episode.health[t, a])
                    records.append(
                        AnalysisRecord(
                            ep_idx,
                            t,
                            a,
                            g,
                            float(weights[t, a]),
                            float(scalars.value[t, a]),
                            hp,
                            bool(alive[t, a]),
                            tuple(float(x) for x in emb[t, a]),
                        )
                    )
            pooled = emb.reshape(steps * n_agents, -1)
            flat = pca_project(pooled) if pooled.shape[0] >= 2 else np.zeros((pooled.shape[0], 2))
            for row, (pc1, pc2) in enumerate(flat):
                projections.append(PcaRecord(ep_idx, row // n_agents, row % n_agents, g, float(pc1), float(pc2)))
        logger.debug("analysed episode %d with %d steps", ep_idx, steps)
    return records, projections


def weight_health_correlation(records: Sequence[AnalysisRecord]) -> Dict[int, Optional[float]]:
    """Pearson correlation between credit weight and agent health over alive rows, per graph network

    Returns:
        dict: graph id to the correlation; `None` when health is missing or either column is constant"""
    res: Dict[int, Optional[float]] = {}
    for g in sorted({rec.graph for rec in records}):
        rows = [(rec.weight, rec.hp) for rec in records if rec.graph == g and rec.alive and rec.hp is not None]
        if len(rows) < 2:
            res[g] = None
            continue
        data = np.asarray(rows, dtype=np.float64)
        if np.std(data[:, 0]) == 0.0 or np.std(data[:, 1]) == 0.0:
            res[g] = None
            continue
        res[g] = float(np.corrcoef(data[:, 0], data[:, 1])[0, 1])
    return res


def write_analysis_csv(records: Sequence[AnalysisRecord], path: Union[str, Path]) -> None:
    """Write the analysis rows; embedding columns are `emb_0..emb_{d-1}`"""
    width = len(records[0].embedding) if records else 0
    with open(resolve_path(path), "w", newline="", encoding="utf-8") as fobj:
        writer = csv.writer(fobj)
        writer.writerow(list(ANALYSIS_COLUMNS) + [f"emb_{i}" for i in range(width)])
        for rec in records:
            writer.writerow(rec.row())


def write_pca_csv(records: Sequence[PcaRecord], path: Union[str, Path]) -> None:
    """Write the 2-D projections"""
    with open(resolve_path(path), "w", newline="", encoding="utf-8") as fobj:
        writer = csv.writer(fobj)
        writer.writerow(PCA_COLUMNS)
        for rec in records:
            writer.writerow([rec.episode, rec.t, rec.agent, rec.graph, repr(rec.pc1), repr(rec.pc2)])
