""" Checkpoint container: parameters, target parameters, optimizer state and metadata
    License: MIT
"""

import json
from io import BytesIO, IOBase
from mmap import mmap
from pathlib import Path
from struct import Struct
from struct import error as StructError
from typing import Any, ByteString, Dict, Optional, Union

from mgan.autodiff.optimizers import OptimizerState
from mgan.autodiff.parameters import ParameterTree
from mgan.constants import CHECKPOINT_MAGIC, CHECKPOINT_VERSION
from mgan.exceptions import CheckpointError, CheckpointMismatchError
from mgan.utilities import MMap, is_valid_file, resolve_path


class Checkpoint:
    """Self-describing training snapshot

    Args:
        params (ParameterTree): The online parameters θ
        target_params (ParameterTree): The target parameters θ⁻; defaults to a copy of `params`
        optimizer (OptimizerState): The optimizer state; defaults to a fresh state
        metadata (dict): JSON-serializable run information (config, counters, version)
    Returns:
        Checkpoint: A checkpoint object
    Note:
        Layout, little-endian: header (magic, version, section count), then tagged \
        sections `PARM`, `TARG`, `OPTS` and `META`"""

    __slots__ = ("_params", "_target", "_optimizer", "_metadata")

    _HEADER_STRUCT = Struct("<8sHH")
    _SECTION_STRUCT = Struct("<4sQ")
    _OPTIM_STRUCT = Struct("<Qddd")

    def __init__(
        self,
        params: ParameterTree,
        target_params: Optional[ParameterTree] = None,
        optimizer: Optional[OptimizerState] = None,
        metadata: Optional[Dict[str, Any]] = None,
    ) -> None:
        self._params = params
        self._target = target_params if target_params is not None else params.copy()
        self._optimizer = optimizer if optimizer is not None else OptimizerState(params)
        self._metadata: Dict[str, Any] = dict(metadata) if metadata is not None else {}
        if not self._params.structure_equals(self._target):
            raise CheckpointError("Checkpoint: target parameters do not match the parameters")

    def __bytes__(self) -> bytes:
        """Export the checkpoint to `bytes`"""
        with BytesIO() as f:
            self.export(f)
            return f.getvalue()

    @property
    def params(self) -> ParameterTree:
        """ParameterTree: The online parameters"""
        return self._params

    @property
    def target_params(self) -> ParameterTree:
        """ParameterTree: The target parameters"""
        return self._target

    @property
    def optimizer(self) -> OptimizerState:
        """OptimizerState: The optimizer state"""
        return self._optimizer

    @property
    def metadata(self) -> Dict[str, Any]:
        """dict: Run information stored alongside the weights"""
        return self._metadata

    def check_structure(self, expected: ParameterTree) -> None:
        """Verify the stored parameters against an expected architecture

        Args:
            expected (ParameterTree): Freshly initialized parameters of the configured architecture
        Raises:
            CheckpointMismatchError: Lists the missing, extra and reshaped parameter names"""
        missing, extra, mismatched = expected.diff(self._params)
        if missing or extra or mismatched:
            raise CheckpointMismatchError(missing, extra, mismatched)

    def export(self, file: Union[Path, str, IOBase, mmap]) -> None:
        """Export the checkpoint to disk

        Args:
            file (str|Path|IOBase): The file or filepath to which the checkpoint will be written"""
        if not isinstance(file, (IOBase, mmap)):
            file = resolve_path(file)
            with open(file, "wb") as filepointer:
                self.export(filepointer)  # type: ignore
            return
        opt = self._optimizer
        sections = [
            (b"PARM", bytes(self._params)),
            (b"TARG", bytes(self._target)),
            (
                b"OPTS",
                self._OPTIM_STRUCT.pack(opt.step, opt.learning_rate, opt.alpha, opt.eps) + bytes(opt.square_avg),
            ),
            (b"META", json.dumps(self._metadata, sort_keys=True).encode("utf-8")),
        ]
        file.write(self._HEADER_STRUCT.pack(CHECKPOINT_MAGIC, CHECKPOINT_VERSION, len(sections)))
        for tag, payload in sections:
            file.write(self._SECTION_STRUCT.pack(tag, len(payload)))
            file.write(payload)

    @classmethod
    def load(cls, filepath: Union[str, Path]) -> "Checkpoint":
        """Load a checkpoint from disk

        Args:
            filepath (str|Path): The checkpoint file
        Returns:
            Checkpoint: The loaded checkpoint
        Raises:
            CheckpointError: When the file is missing or malformed"""
        if not is_valid_file(filepath):
            raise CheckpointError(f"Checkpoint file not found: {filepath}")
        try:
            with MMap(resolve_path(filepath)) as filepointer:
                return cls.frombytes(filepointer)
        except ValueError as ex:  # mmap of an empty file
            raise CheckpointError(f"Unable to read checkpoint {filepath}: {ex}") from ex

    @classmethod
    def frombytes(cls, b: ByteString) -> "Checkpoint":
        """
        Args:
            b (ByteString): The bytes to load as a Checkpoint
        Returns:
            Checkpoint: The loaded checkpoint
        Raises:
            CheckpointError: When the bytes are not a supported checkpoint"""
        buf = bytes(b)
        try:
            magic, version, count = cls._HEADER_STRUCT.unpack_from(buf, 0)
        except StructError as ex:
            raise CheckpointError("Checkpoint: truncated header") from ex
        if magic != CHECKPOINT_MAGIC:
            raise CheckpointError("Checkpoint: bad magic; not a checkpoint file")
        if version != CHECKPOINT_VERSION:
            raise CheckpointError(f"Checkpoint: unsupported format version {version}")

        offset = cls._HEADER_STRUCT.size
        sections: Dict[bytes, bytes] = {}
        for _ in range(count):
            try:
                tag, length = cls._SECTION_STRUCT.unpack_from(buf, offset)
            except StructError as ex:
                raise CheckpointError("Checkpoint: truncated section header") from ex
            offset += cls._SECTION_STRUCT.size
            if offset + length > len(buf):
                raise CheckpointError(f"Checkpoint: truncated section {tag!r}")
            sections[tag] = buf[offset : offset + length]
            offset += length
        for tag in (b"PARM", b"TARG", b"OPTS", b"META"):
            if tag not in sections:
                raise CheckpointError(f"Checkpoint: missing section {tag!r}")

        opts = sections[b"OPTS"]
        try:
            step, lr, alpha, eps = cls._OPTIM_STRUCT.unpack_from(opts, 0)
        except StructError as ex:
            raise CheckpointError("Checkpoint: truncated optimizer section") from ex
        square_avg = ParameterTree.frombytes(opts[cls._OPTIM_STRUCT.size :])
        try:
            metadata = json.loads(sections[b"META"].decode("utf-8"))
        except ValueError as ex:
            raise CheckpointError("Checkpoint: unreadable metadata") from ex
        return Checkpoint(
            ParameterTree.frombytes(sections[b"PARM"]),
            ParameterTree.frombytes(sections[b"TARG"]),
            OptimizerState.restore(square_avg, step, lr, alpha, eps),
            metadata,
        )
