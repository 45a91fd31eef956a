""" ParameterTree, the named store of all trainable weights
    License: MIT
"""

from io import BytesIO, IOBase
from mmap import mmap
from pathlib import Path
from struct import Struct
from struct import error as StructError
from typing import ByteString, Dict, Iterator, List, Tuple, Union

import numpy as np

from mgan.exceptions import CheckpointError, DimensionError, ParameterError
from mgan.utilities import check_finite, resolve_path


class ParameterTree:
    """Named hierarchy of 64-bit arrays, e.g. `graph.0.layers.1.mlp.weight`

    Returns:
        ParameterTree: An empty parameter tree
    Note:
        Entries keep their insertion order; that order is also the export order"""

    __slots__ = ("_entries", "_trainable")

    _COUNT_STRUCT = Struct("<I")
    _ENTRY_STRUCT = Struct("<HBB")

    def __init__(self) -> None:
        self._entries: Dict[str, np.ndarray] = {}
        self._trainable: Dict[str, bool] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, name: str) -> bool:
        """setup the `in` keyword"""
        return name in self._entries

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self._entries[name]
        except KeyError:
            raise ParameterError(f"Unknown parameter: {name}") from None

    def __str__(self) -> str:
        """list the entries of the tree"""
        lines = [f"ParameterTree ({self.num_values} values):"]
        for name, value in self._entries.items():
            flag = "" if self._trainable[name] else " (frozen)"
            lines.append(f"\t{name}: {list(value.shape)}{flag}")
        return "\n".join(lines)

    def __bytes__(self) -> bytes:
        """Export the parameter tree to `bytes`"""
        with BytesIO() as f:
            self.export(f)
            return f.getvalue()

    @classmethod
    def frombytes(cls, b: ByteString) -> "ParameterTree":
        """
        Args:
            b (ByteString): The bytes to load as a ParameterTree
        Returns:
            ParameterTree: The loaded tree
        Raises:
            CheckpointError: When the bytes are truncated or malformed"""
        tree, offset = cls._parse(b, 0)
        if offset != len(b):
            raise CheckpointError("ParameterTree: trailing bytes after the last entry")
        return tree

    @property
    def num_values(self) -> int:
        """int: Total number of scalars stored in the tree"""
        return int(sum(value.size for value in self._entries.values()))

    def names(self) -> List[str]:
        """list(str): All parameter names, in insertion order"""
        return list(self._entries)

    def trainable_names(self) -> List[str]:
        """list(str): Names of the trainable parameters, in insertion order"""
        return [name for name, flag in self._trainable.items() if flag]

    def is_trainable(self, name: str) -> bool:
        """Is the parameter `name` updated by the optimizer"""
        self[name]
        return self._trainable[name]

    def shapes(self) -> Dict[str, Tuple[int, ...]]:
        """dict: Parameter name to shape"""
        return {name: value.shape for name, value in self._entries.items()}

    def items(self) -> Iterator[Tuple[str, np.ndarray]]:
        """Iterate over (name, value) pairs"""
        return iter(self._entries.items())

    def add(self, name: str, value: Union[np.ndarray, float, list], trainable: bool = True) -> None:
        """Add a new entry

        Args:
            name (str): The unique hierarchical name
            value (array-like): The initial value
            trainable (bool): `False` to freeze the entry
        Raises:
            ParameterError: When the name is already present
            NonFiniteError: When the value holds a NaN or Inf"""
        if name in self._entries:
            raise ParameterError(f"Duplicate parameter name: {name}")
        self._entries[name] = check_finite(np.array(value, dtype=np.float64), name)
        self._trainable[name] = bool(trainable)

    def set(self, name: str, value: Union[np.ndarray, float, list]) -> None:
        """Replace the value of an existing entry with one of the same shape

        Args:
            name (str): The parameter name
            value (array-like): The new value
        Raises:
            DimensionError: When the shape changes"""
        arr = check_finite(np.array(value, dtype=np.float64), name)
        if arr.shape != self[name].shape:
            raise DimensionError(f"{name}: expected shape {self[name].shape}; got {arr.shape}")
        self._entries[name] = arr

    def freeze(self, name: str) -> None:
        """Exclude the entry `name` from gradient computation"""
        self[name]
        self._trainable[name] = False

    def copy(self) -> "ParameterTree":
        """Deep copy of the tree; used for the target parameters

        Returns:
            ParameterTree: An independent, structurally equal copy"""
        res = ParameterTree()
        for name, value in self._entries.items():
            res.add(name, value.copy(), self._trainable[name])
        return res

    def assign(self, other: "ParameterTree") -> None:
        """Copy every value of `other` into this tree

        Args:
            other (ParameterTree): A structurally equal tree
        Raises:
            ParameterError: When the structures differ"""
        if not self.structure_equals(other):
            raise ParameterError("Unable to assign parameters as the trees are mismatched")
        for name in self._entries:
            self._entries[name] = other[name].copy()

    def zeros_like(self) -> "ParameterTree":
        """A tree with the same structure holding zeros"""
        res = ParameterTree()
        for name, value in self._entries.items():
            res.add(name, np.zeros_like(value), self._trainable[name])
        return res

    def structure_equals(self, other: "ParameterTree") -> bool:
        """Same names in the same order and the same shapes"""
        if self.names() != other.names():
            return False
        return all(self[name].shape == other[name].shape for name in self._entries)

    def values_equal(self, other: "ParameterTree") -> bool:
        """Structurally equal and bitwise equal values"""
        if not self.structure_equals(other):
            return False
        return all(np.array_equal(self[name], other[name]) for name in self._entries)

    def diff(self, other: "ParameterTree") -> Tuple[List[str], List[str], List[str]]:
        """Structural difference between this (expected) tree and `other`

        Args:
            other (ParameterTree): The tree to compare against
        Returns:
            tuple: names missing from `other`, names only in `other`, names with differing shapes"""
        missing = [name for name in self._entries if name not in other]
        extra = [name for name in other if name not in self._entries]
        mismatched = [name for name in self._entries if name in other and self[name].shape != other[name].shape]
        return missing, extra, mismatched

    def export(self, file: Union[Path, str, IOBase, mmap]) -> None:
        """Export the parameter tree

        Args:
            file (str|Path|IOBase): The file or filepath to which the tree will be written"""
        if not isinstance(file, (IOBase, mmap)):
            file = resolve_path(file)
            with open(file, "wb") as filepointer:
                self.export(filepointer)  # type: ignore
        else:
            file.write(self._COUNT_STRUCT.pack(len(self._entries)))
            for name, value in self._entries.items():
                raw_name = name.encode("utf-8")
                file.write(self._ENTRY_STRUCT.pack(len(raw_name), int(self._trainable[name]), value.ndim))
                file.write(raw_name)
                file.write(Struct(f"<{value.ndim}Q").pack(*value.shape))
                file.write(np.ascontiguousarray(value, dtype="<f8").tobytes())

    @classmethod
    def _parse(cls, b: ByteString, offset: int) -> Tuple["ParameterTree", int]:
        """parse a tree starting at `offset`; returns the tree and the offset past it"""
        buf = memoryview(bytes(b)) if not isinstance(b, (bytes, memoryview)) else memoryview(b)
        try:
            (count,) = cls._COUNT_STRUCT.unpack_from(buf, offset)
            offset += cls._COUNT_STRUCT.size
            tree = ParameterTree()
            for _ in range(count):
                name_len, trainable, ndim = cls._ENTRY_STRUCT.unpack_from(buf, offset)
                offset += cls._ENTRY_STRUCT.size
                name = bytes(buf[offset : offset + name_len]).decode("utf-8")
                offset += name_len
                shape_struct = Struct(f"<{ndim}Q")
                shape = shape_struct.unpack_from(buf, offset)
                offset += shape_struct.size
                nbytes = 8 * int(np.prod(shape, dtype=np.int64))
                if offset + nbytes > len(buf):
                    raise CheckpointError(f"ParameterTree: truncated data for {name}")
                data = np.frombuffer(buf[offset : offset + nbytes], dtype="<f8").astype(np.float64)
                offset += nbytes
                tree.add(name, data.reshape(shape), bool(trainable))
        except (StructError, ValueError, UnicodeDecodeError) as ex:
            raise CheckpointError(f"ParameterTree: malformed data ({ex})") from ex
        return tree, offset
