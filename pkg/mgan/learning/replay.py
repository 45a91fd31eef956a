""" Episode replay buffer
    License: MIT
"""

from collections import deque
from typing import Deque, Iterator

import numpy as np

from mgan.exceptions import InitializationError, ReplayBufferError
from mgan.learning.episode import Episode, EpisodeBatch


class ReplayBuffer:
    """First-in first-out store of whole episodes with uniform sampling

    Args:
        capacity (int): Maximum number of stored episodes
    Raises:
        InitializationError: When the capacity is not positive"""

    __slots__ = ("_episodes", "_capacity", "_added")

    def __init__(self, capacity: int) -> None:
        if capacity <= 0:
            raise InitializationError("ReplayBuffer: capacity must be positive")
        self._capacity = int(capacity)
        self._episodes: Deque[Episode] = deque(maxlen=self._capacity)
        self._added = 0

    def __len__(self) -> int:
        return len(self._episodes)

    def __iter__(self) -> Iterator[Episode]:
        return iter(self._episodes)

    def __str__(self) -> str:
        return f"ReplayBuffer:\n\tcapacity: {self.capacity}\n\tstored: {len(self)}\n\tadded: {self.episodes_added}\n"

    @property
    def capacity(self) -> int:
        """int: Maximum number of stored episodes

        Note:
            Not settable"""
        return self._capacity

    @property
    def episodes_added(self) -> int:
        """int: Episodes added over the buffer lifetime"""
        return self._added

    def add(self, episode: Episode) -> None:
        """Store an episode, evicting the oldest one when full"""
        self._episodes.append(episode)
        self._added += 1

    def can_sample(self, batch_size: int) -> bool:
        """Are at least `batch_size` episodes stored"""
        return len(self._episodes) >= batch_size

    def sample(self, batch_size: int, rng: np.random.Generator) -> EpisodeBatch:
        """Uniformly draw `batch_size` distinct episodes

        Args:
            batch_size (int): Number of episodes
            rng (np.random.Generator): Randomness source
        Returns:
            EpisodeBatch: The padded batch
        Raises:
            ReplayBufferError: When fewer than `batch_size` episodes are stored"""
        if batch_size <= 0:
            raise ValueError("ReplayBuffer: batch size must be positive")
        if not self.can_sample(batch_size):
            raise ReplayBufferError(f"ReplayBuffer: asked for {batch_size} episodes; only {len(self)} stored")
        picks = rng.choice(len(self._episodes), size=batch_size, replace=False)
        return EpisodeBatch([self._episodes[int(i)] for i in picks])
