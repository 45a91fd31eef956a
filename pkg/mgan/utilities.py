""" Utility Functions """

import mmap
import subprocess
from pathlib import Path
from typing import Union

import numpy as np

from mgan.exceptions import NonFiniteError


def is_valid_file(filepath: Union[str, Path, None]) -> bool:
    """check if the passed filepath points to a real file"""
    if filepath is None:
        return False
    return Path(filepath).exists()


def resolve_path(filepath: Union[str, Path]) -> Path:
    """fully resolve the path by expanding user and resolving"""
    return Path(filepath).expanduser().resolve()


def check_finite(value: np.ndarray, where: str) -> np.ndarray:
    """Raise if `value` holds a NaN or Inf

    Args:
        value (np.ndarray): The array to inspect
        where (str): Name of the operation reported in the error
    Returns:
        np.ndarray: `value`, unchanged
    Raises:
        NonFiniteError: When any element is not finite"""
    if not np.all(np.isfinite(value)):
        raise NonFiniteError(f"{where}: non-finite value encountered")
    return value


def one_hot(index: int, size: int) -> np.ndarray:
    """one-hot float vector; a negative index gives the all-zero vector"""
    vec = np.zeros(size, dtype=np.float64)
    if index >= 0:
        vec[index] = 1.0
    return vec


def git_describe(path: Union[str, Path, None] = None) -> Union[str, None]:
    """return `git describe --always --dirty` for the source tree, if available"""
    cwd = Path(path) if path is not None else Path(__file__).parent
    try:
        res = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=str(cwd),
            capture_output=True,
            text=True,
            check=True,
            timeout=5,
        )
    except (OSError, subprocess.SubprocessError):
        return None
    return res.stdout.strip() or None


class MMap:
    """Simplified, read-only mmap.mmap wrapper used to load checkpoints"""

    __slots__ = ("__p", "__f", "__m")

    def __init__(self, path: Union[Path, str]):
        self.__p = Path(path)
        self.__f = self.path.open("rb")
        self.__m = mmap.mmap(self.__f.fileno(), 0, access=mmap.ACCESS_READ)

    def __enter__(self) -> mmap.mmap:
        return self.__m

    def __exit__(self, *args, **kwargs) -> None:
        if self.__m and not self.map.closed:
            self.map.close()
        if self.__f:
            self.__f.close()

    @property
    def map(self) -> mmap.mmap:
        """Return a pointer to the mmap"""
        return self.__m

    @property
    def path(self) -> Path:
        """Return the path to the mmap'd file"""
        return self.__p
