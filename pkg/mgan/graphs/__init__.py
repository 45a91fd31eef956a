""" Graph construction and graph convolution encoders """

from mgan.graphs.encoder import (
    AgentGraph,
    EmbeddingSet,
    GraphEncoder,
    attention_aggregate,
    attention_weights,
    build_adjacency,
    combine,
    encode,
)

__all__ = [
    "AgentGraph",
    "EmbeddingSet",
    "GraphEncoder",
    "attention_aggregate",
    "attention_weights",
    "build_adjacency",
    "combine",
    "encode",
]
