""" Agent graph and the attention-aggregator graph convolution encoders
    License: MIT
"""

from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from mgan.agents.qnet import add_linear
from mgan.autodiff.ops import concat, linear, masked_softmax, matmul, relu, reshape, transpose
from mgan.autodiff.parameters import ParameterTree
from mgan.autodiff.tape import Tape, Variable
from mgan.constants import DEFAULT_EMBED_DIM, DEFAULT_N_GRAPHS
from mgan.exceptions import DimensionError, InitializationError
from mgan.utilities import check_finite

GCN_LAYERS = 2


def build_adjacency(alive: Union[np.ndarray, Sequence]) -> np.ndarray:
    """Adjacency over agents: entry `(u, v)` is 1 iff both agents are alive

    Args:
        alive (array-like): {0, 1} liveness, shape `[..., n]`
    Returns:
        np.ndarray: Symmetric {0, 1} matrix of shape `[..., n, n]`; alive agents carry a self-loop"""
    live = (np.asarray(alive) != 0).astype(np.float64)
    if live.ndim == 0 or live.shape[-1] < 1:
        raise DimensionError("build_adjacency: needs at least one agent")
    return live[..., :, None] * live[..., None, :]


def attention_weights(features: Variable, adjacency: np.ndarray) -> Variable:
    """Softmax over neighbours of the dot products `h_v . h_u`

    Args:
        features (Variable): Node features `[..., n, d]`
        adjacency (np.ndarray): {0, 1} matrix `[..., n, n]`
    Returns:
        Variable: Row-stochastic weights `[..., n, n]`; rows of nodes without neighbours are zero"""
    if features.ndim < 2 or np.shape(adjacency)[-2:] != (features.shape[-2], features.shape[-2]):
        raise DimensionError(
            f"attention: adjacency shape {np.shape(adjacency)} does not match features shape {features.shape}"
        )
    logits = matmul(features, transpose(features))
    return masked_softmax(logits, adjacency, allow_empty=True)


def attention_aggregate(features: Variable, adjacency: np.ndarray) -> Variable:
    """Weighted sum of neighbour features, weights from :func:`attention_weights`

    Args:
        features (Variable): Node features `[..., n, d]`
        adjacency (np.ndarray): {0, 1} matrix `[..., n, n]`
    Returns:
        Variable: Aggregated features `[..., n, d]`; zero for nodes without neighbours"""
    return matmul(attention_weights(features, adjacency), features)


def combine(aggregated: Variable, original: Variable, weight: Variable, bias: Variable) -> Variable:
    """`relu(linear(concat(a_v, h_v)))` with one weight matrix shared by every node"""
    if aggregated.shape != original.shape:
        raise DimensionError(f"combine: aggregated shape {aggregated.shape} differs from {original.shape}")
    return relu(linear(concat(aggregated, original), weight, bias))


def encode(tape: Tape, graph: "AgentGraph", prefix: str, transform: str = "transform") -> Tuple[Variable, Variable]:
    """Two aggregate+combine layers followed by the shared transform layer

    Args:
        tape (Tape): The tape reading the parameters
        graph (AgentGraph): Adjacency and node features
        prefix (str): Parameter prefix of the graph network, e.g. `graph.0`
        transform (str): Parameter prefix of the shared transform layer
    Returns:
        tuple: embeddings `[..., n, emb]` and scalars `[..., n]`"""
    embedding, _ = _encode_layers(tape, graph, prefix)
    return embedding, _transform(tape, embedding, transform)


def _encode_layers(tape: Tape, graph: "AgentGraph", prefix: str) -> Tuple[Variable, List[Variable]]:
    hidden = tape.constant(graph.node_features)
    layers = []
    for k in range(GCN_LAYERS):
        aggregated = attention_aggregate(hidden, graph.adjacency)
        hidden = combine(
            aggregated,
            hidden,
            tape.parameter(f"{prefix}.layers.{k}.mlp.weight"),
            tape.parameter(f"{prefix}.layers.{k}.mlp.bias"),
        )
        layers.append(hidden)
    return hidden, layers


def _transform(tape: Tape, embedding: Variable, transform: str) -> Variable:
    out = linear(embedding, tape.parameter(f"{transform}.weight"), tape.parameter(f"{transform}.bias"))
    return reshape(out, out.shape[:-1])


class AgentGraph:
    """Adjacency matrix over agent nodes plus node features

    Args:
        adjacency (np.ndarray): Symmetric {0, 1} matrix `[..., n, n]`
        node_features (np.ndarray): Initial node features `[..., n, d]`
    Raises:
        DimensionError: When the shapes disagree
        ValueError: When the adjacency is not symmetric
        NonFiniteError: When a feature is NaN or Inf"""

    __slots__ = ("_adjacency", "_features")

    def __init__(self, adjacency: np.ndarray, node_features: np.ndarray) -> None:
        adj = np.asarray(adjacency, dtype=np.float64)
        feats = check_finite(np.asarray(node_features, dtype=np.float64), "AgentGraph")
        n = feats.shape[-2] if feats.ndim >= 2 else -1
        if adj.shape[-2:] != (n, n) or adj.shape[:-2] != feats.shape[:-2]:
            raise DimensionError(f"AgentGraph: adjacency shape {adj.shape} does not match features {feats.shape}")
        if not np.array_equal(adj, np.swapaxes(adj, -1, -2)):
            raise ValueError("AgentGraph: adjacency must be symmetric")
        self._adjacency = adj
        self._features = feats

    @classmethod
    def from_alive(cls, node_features: np.ndarray, alive: np.ndarray) -> "AgentGraph":
        """Build the graph of the current step from the alive mask"""
        return cls(build_adjacency(alive), node_features)

    @property
    def adjacency(self) -> np.ndarray:
        """np.ndarray: The adjacency matrix

        Note:
            Not settable"""
        return self._adjacency

    @property
    def node_features(self) -> np.ndarray:
        """np.ndarray: The node features `h_v` of the first layer"""
        return self._features

    @property
    def n_nodes(self) -> int:
        """int: Number of agent nodes"""
        return self._features.shape[-2]

    def neighbours(self, v: int) -> List[int]:
        """Neighbour indices of node `v`; only defined for an unbatched graph"""
        if self._adjacency.ndim != 2:
            raise DimensionError("neighbours: graph is batched")
        return [int(u) for u in np.flatnonzero(self._adjacency[v])]


class EmbeddingSet:
    """Per graph network: final node embeddings and transform-layer scalars

    Args:
        embeddings (list): One `[..., n, emb]` Variable per graph network
        scalars (list): One `[..., n]` Variable per graph network
        first_layer (list): Optional first-layer embeddings per graph network"""

    __slots__ = ("_embeddings", "_scalars", "_first_layer")

    def __init__(
        self, embeddings: List[Variable], scalars: List[Variable], first_layer: Optional[List[Variable]] = None
    ) -> None:
        if len(embeddings) != len(scalars) or not embeddings:
            raise DimensionError("EmbeddingSet: needs one embedding and one scalar vector per graph network")
        self._embeddings = list(embeddings)
        self._scalars = list(scalars)
        self._first_layer = list(first_layer) if first_layer is not None else []

    def __len__(self) -> int:
        return len(self._scalars)

    @property
    def n_graphs(self) -> int:
        """int: Number of graph networks G"""
        return len(self._scalars)

    @property
    def embeddings(self) -> List[Variable]:
        """list(Variable): Final embeddings per graph network"""
        return self._embeddings

    @property
    def scalars(self) -> List[Variable]:
        """list(Variable): Transform-layer scalars c_g per graph network"""
        return self._scalars

    @property
    def first_layer(self) -> List[Variable]:
        """list(Variable): First-layer embeddings per graph network, if kept"""
        return self._first_layer

    def embedding_values(self) -> np.ndarray:
        """np.ndarray: Embeddings stacked to `[G, ..., n, emb]`"""
        return np.stack([emb.value for emb in self._embeddings])

    def scalar_values(self) -> np.ndarray:
        """np.ndarray: Scalars stacked to `[G, ..., n]`"""
        return np.stack([c.value for c in self._scalars])


class GraphEncoder:
    """G independent two-layer graph networks sharing one transform layer

    Args:
        feature_dim (int): Length of the node features (the local observation)
        n_graphs (int): Number of graph networks G
        embed_dim (int): Width of both graph convolution layers
    Raises:
        InitializationError: When a size is not positive"""

    __slots__ = ("_feature_dim", "_n_graphs", "_embed_dim")

    def __init__(self, feature_dim: int, n_graphs: int = DEFAULT_N_GRAPHS, embed_dim: int = DEFAULT_EMBED_DIM) -> None:
        if min(feature_dim, n_graphs, embed_dim) <= 0:
            raise InitializationError("GraphEncoder: all sizes must be positive")
        self._feature_dim = int(feature_dim)
        self._n_graphs = int(n_graphs)
        self._embed_dim = int(embed_dim)

    @property
    def n_graphs(self) -> int:
        """int: Number of graph networks"""
        return self._n_graphs

    @property
    def embed_dim(self) -> int:
        """int: Embedding width"""
        return self._embed_dim

    @property
    def feature_dim(self) -> int:
        """int: Node feature width"""
        return self._feature_dim

    @staticmethod
    def prefix(g: int) -> str:
        """Parameter prefix of graph network `g`"""
        return f"graph.{g}"

    def init_params(self, tree: ParameterTree, rng: np.random.Generator) -> None:
        """Add G graph networks and the shared transform layer to `tree`"""
        for g in range(self._n_graphs):
            in_dim = self._feature_dim
            for k in range(GCN_LAYERS):
                add_linear(tree, f"{self.prefix(g)}.layers.{k}.mlp", 2 * in_dim, self._embed_dim, rng)
                in_dim = self._embed_dim
        add_linear(tree, "transform", self._embed_dim, 1, rng)

    def encode(self, tape: Tape, node_features: np.ndarray, alive: np.ndarray) -> EmbeddingSet:
        """Run every graph network on the graph built from the alive mask

        Args:
            tape (Tape): The tape reading the parameters
            node_features (np.ndarray): `[..., n, feature_dim]`
            alive (np.ndarray): `[..., n]`
        Returns:
            EmbeddingSet: G embeddings and scalar vectors"""
        feats = np.asarray(node_features, dtype=np.float64)
        if feats.shape[-1] != self._feature_dim:
            raise DimensionError(f"GraphEncoder: expected feature width {self._feature_dim}; got {feats.shape}")
        graph = AgentGraph.from_alive(feats, alive)
        embeddings, scalars, first = [], [], []
        for g in range(self._n_graphs):
            embedding, layers = _encode_layers(tape, graph, self.prefix(g))
            embeddings.append(embedding)
            scalars.append(_transform(tape, embedding, "transform"))
            first.append(layers[0])
        return EmbeddingSet(embeddings, scalars, first)
