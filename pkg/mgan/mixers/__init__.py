""" Mixing networks: MGAN and the VDN / QMIX baselines """

from typing import Union

from mgan.constants import ALGORITHMS, DEFAULT_EMBED_DIM, DEFAULT_MIXING_EMBED, DEFAULT_N_GRAPHS
from mgan.mixers.baselines import QmixMixer, VdnMixer, qmix_mix, vdn_mix
from mgan.mixers.mgan import MganMixer, credit_weights, graph_value, hyper_mix, hyper_weights, q_tot_forward

MixerT = Union[MganMixer, VdnMixer, QmixMixer]


def make_mixer(
    algorithm: str,
    n_agents: int,
    obs_dim: int,
    state_dim: int,
    n_graphs: int = DEFAULT_N_GRAPHS,
    embed_dim: int = DEFAULT_EMBED_DIM,
    mixing_embed: int = DEFAULT_MIXING_EMBED,
) -> MixerT:
    """Build the mixer named `algorithm` (one of `mgan`, `vdn`, `qmix`)"""
    if algorithm == "mgan":
        return MganMixer(n_agents, obs_dim, state_dim, n_graphs, embed_dim)
    if algorithm == "vdn":
        return VdnMixer()
    if algorithm == "qmix":
        return QmixMixer(n_agents, state_dim, mixing_embed)
    raise ValueError(f"Unknown algorithm {algorithm!r}; expected one of {', '.join(ALGORITHMS)}")


__all__ = [
    "MganMixer",
    "MixerT",
    "QmixMixer",
    "VdnMixer",
    "credit_weights",
    "graph_value",
    "hyper_mix",
    "hyper_weights",
    "make_mixer",
    "q_tot_forward",
    "qmix_mix",
    "vdn_mix",
]
