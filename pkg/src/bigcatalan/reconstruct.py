"""Rebuild exact integers from prime-exponent factorizations.

The value is prod over exponent groups of (prod of the group's primes)**e,
with every product evaluated by a balanced tree: operands are paired level
by level so intermediate bit lengths stay balanced. Operand lists are
batched into chunks, and partial products can be spilled to disk when a
soft memory budget is set. None of that changes the resulting integer,
only the memory profile, so outputs are bit-identical across chunk sizes,
budgets and offload settings.

Big-integer multiplication itself is delegated to gmpy2 (GMP).
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Callable, Iterable, Union

from gmpy2 import mpz

from .errors import ResourceBudgetError
from .fixedlog import (
    FRAC_BITS,
    error_to_fixed,
    fixed_floor,
    fixed_fraction,
    fixed_point_log10,
)

if TYPE_CHECKING:
    from .factorization import Factorization

# arbitrary-precision nonnegative integer; plain int and gmpy2.mpz mix freely
Natural = Union[int, mpz]

DEFAULT_CHUNK_SIZE = 100_000
_IO_CHUNK = 1 << 22


@dataclass(frozen=True)
class ChunkPolicy:
    """Batching and memory policy for product evaluation.

    memory_budget is a soft cap in bytes on the tracked live operands.
    When it is exceeded and offload_dir is set, the largest operands are
    spilled to disk; without an offload_dir the breach is an error. A
    budget of None disables tracking entirely.
    """

    chunk_size: int = DEFAULT_CHUNK_SIZE
    memory_budget: int | None = None
    offload_dir: str | Path | None = None

    def __post_init__(self) -> None:
        if self.chunk_size < 1:
            raise ValueError(f"chunk_size must be >= 1, got {self.chunk_size}")
        if self.memory_budget is not None and self.memory_budget < 1:
            raise ValueError(f"memory_budget must be >= 1, got {self.memory_budget}")


@dataclass(frozen=True)
class ReconstructionResult:
    """Summary of one reconstructed integer and its output file."""

    value_bit_length: int
    decimal_digits: int
    sha256_hex: str
    output_path: Path


def _nbytes(value) -> int:
    return max(1, (value.bit_length() + 7) // 8)


class _OperandStore:
    """Tracks live partial products; spills the largest ones when over budget."""

    def __init__(self, policy: ChunkPolicy):
        self.policy = policy
        self._live: dict[int, "mpz"] = {}
        self._spilled: dict[int, Path] = {}
        self._next_handle = 0
        self._spill_seq = 0
        self.live_bytes = 0

    def add(self, value) -> int:
        handle = self._next_handle
        self._next_handle += 1
        self._live[handle] = value
        self.live_bytes += _nbytes(value)
        self._enforce_budget()
        return handle

    def pop(self, handle: int):
        if handle in self._live:
            value = self._live.pop(handle)
            self.live_bytes -= _nbytes(value)
            return value
        path = self._spilled.pop(handle)
        data = path.read_bytes()
        path.unlink(missing_ok=True)
        return mpz.from_bytes(data, "little")

    def _enforce_budget(self) -> None:
        budget = self.policy.memory_budget
        if budget is None or self.live_bytes <= budget:
            return
        if self.policy.offload_dir is None:
            raise ResourceBudgetError(
                f"live operands need {self.live_bytes} bytes, budget is "
                f"{budget} bytes and offloading is disabled"
            )
        while self.live_bytes > budget and self._live:
            self._spill_largest()

    def _spill_largest(self) -> None:
        handle = max(self._live, key=lambda h: self._live[h].bit_length())
        value = self._live.pop(handle)
        directory = Path(self.policy.offload_dir)
        path = directory / f"operand_{os.getpid()}_{self._spill_seq:06d}.bin"
        self._spill_seq += 1
        try:
            directory.mkdir(parents=True, exist_ok=True)
            path.write_bytes(value.to_bytes(_nbytes(value), "little"))
        except OSError as exc:
            raise ResourceBudgetError(f"offload write failed for {path}: {exc}") from exc
        self._spilled[handle] = path
        self.live_bytes -= _nbytes(value)


def _tree_multiply(values: list) -> "mpz":
    """Pairwise balanced product of an in-memory operand list."""
    if not values:
        return mpz(1)
    layer = values
    while len(layer) > 1:
        nxt = [layer[i] * layer[i + 1] for i in range(0, len(layer) - 1, 2)]
        if len(layer) % 2:
            nxt.append(layer[-1])
        layer = nxt
    return layer[0]


def _reduce_handles(store: _OperandStore, handles: list[int]) -> "mpz":
    while len(handles) > 1:
        nxt = []
        for i in range(0, len(handles) - 1, 2):
            x = store.pop(handles[i])
            y = store.pop(handles[i + 1])
            z = x * y
            del x, y
            nxt.append(store.add(z))
        if len(handles) % 2:
            nxt.append(handles[-1])
        handles = nxt
    return store.pop(handles[0])


def _product_into_store(store: _OperandStore, operands: Iterable, chunk_size: int) -> "mpz":
    handles: list[int] = []
    chunk: list = []
    for x in operands:
        chunk.append(mpz(x))
        if len(chunk) >= chunk_size:
            handles.append(store.add(_tree_multiply(chunk)))
            chunk = []
    if chunk:
        handles.append(store.add(_tree_multiply(chunk)))
    if not handles:
        return mpz(1)
    return _reduce_handles(store, handles)


def balanced_product(operands: Iterable[Natural], policy: ChunkPolicy | None = None) -> "mpz":
    """Exact product of the operands (1 for an empty sequence).

    The result does not depend on chunking, budgets or offloading.
    Raises ResourceBudgetError if a memory budget is exceeded while
    offloading is disabled.
    """
    policy = policy or ChunkPolicy()
    return _product_into_store(_OperandStore(policy), operands, policy.chunk_size)


def power(base: Natural, e: int) -> "mpz":
    """Exact base**e for e >= 0 via the arithmetic layer's fast pow."""
    if e < 0:
        raise ValueError(f"exponent must be >= 0, got {e}")
    return mpz(base) ** e


def expand_factorization(
    f: "Factorization",
    policy: ChunkPolicy | None = None,
    progress: Callable[[str], None] | None = None,
) -> "mpz":
    """The exact integer encoded by a factorization (1 when empty).

    Per group: the group product via a chunked balanced tree, then the
    group power; the partial powers are combined, in descending exponent
    order, by another balanced tree.
    """
    policy = policy or ChunkPolicy()
    store = _OperandStore(policy)
    partials: list[int] = []
    for group in f.groups:
        q = _product_into_store(store, group.primes, policy.chunk_size)
        p_e = q ** group.exponent if group.exponent != 1 else q
        del q
        partials.append(store.add(p_e))
        if progress is not None:
            progress(f"group exponent={group.exponent} combined")
    if not partials:
        return mpz(1)
    return _reduce_handles(store, partials)


def write_binary(value: Natural, sink, byte_order: str = "little") -> int:
    """Write a nonnegative integer as headerless magnitude bytes.

    Exactly ceil(bitlen/8) bytes are written (one zero byte for value 0);
    returns the byte count.
    """
    if byte_order not in ("little", "big"):
        raise ValueError(f"byte_order must be 'little' or 'big', got {byte_order!r}")
    v = mpz(value)
    if v < 0:
        raise ValueError("value must be nonnegative")
    nbytes = _nbytes(v)
    data = v.to_bytes(nbytes, byte_order)
    for i in range(0, nbytes, _IO_CHUNK):
        sink.write(data[i : i + _IO_CHUNK])
    return nbytes


def read_binary(source, byte_order: str = "little") -> "mpz":
    """Inverse of write_binary; rejects empty input."""
    if byte_order not in ("little", "big"):
        raise ValueError(f"byte_order must be 'little' or 'big', got {byte_order!r}")
    data = source.read()
    if not data:
        raise ValueError("binary value is empty")
    return mpz.from_bytes(data, byte_order)


def write_decimal(value: Natural, sink) -> int:
    """Write the decimal digits of a nonnegative integer plus one newline.

    Returns the digit count. The whole digit string is materialized, so
    this is meant for verification output, not for the billion-digit case.
    """
    v = mpz(value)
    if v < 0:
        raise ValueError("value must be nonnegative")
    text = v.digits(10)
    sink.write(text.encode("ascii"))
    sink.write(b"\n")
    return len(text)


def decimal_digit_count(value: Natural) -> int:
    """Exact decimal length of a nonnegative integer.

    Uses the high-precision log10 with its error bound; only when the
    value sits provably close to a power of ten does it fall back to an
    exact comparison.
    """
    v = mpz(value)
    if v < 0:
        raise ValueError("value must be nonnegative")
    if v == 0:
        return 1
    fixed, err = fixed_point_log10(v)
    eps = error_to_fixed(err)
    frac = fixed_fraction(fixed)
    if frac < eps or (1 << FRAC_BITS) - frac < eps:
        d = int(v.num_digits(10))
        if mpz(10) ** (d - 1) > v:
            d -= 1
        return d
    return fixed_floor(fixed) + 1


def _write_binary_file(value, path: Path, byte_order: str) -> tuple[str, int]:
    digest = hashlib.sha256()
    nbytes = _nbytes(value)
    data = value.to_bytes(nbytes, byte_order)
    with open(path, "wb") as sink:
        for i in range(0, nbytes, _IO_CHUNK):
            block = data[i : i + _IO_CHUNK]
            digest.update(block)
            sink.write(block)
    return digest.hexdigest(), nbytes


def reconstruct(
    f: "Factorization",
    policy: ChunkPolicy | None = None,
    output_path: str | Path | None = None,
    byte_order: str = "little",
    progress: Callable[[str], None] | None = None,
) -> tuple[ReconstructionResult, "mpz"]:
    """Expand a factorization and stream the value to a binary file.

    Returns the result summary together with the exact value. The file
    holds the headerless magnitude in the requested byte order; its size
    is always ceil(bit_length / 8) bytes.
    """
    if byte_order not in ("little", "big"):
        raise ValueError(f"byte_order must be 'little' or 'big', got {byte_order!r}")
    value = expand_factorization(f, policy=policy, progress=progress)
    path = Path(output_path) if output_path else Path(f"{f.spec.label}_reconstructed.bin")
    sha_hex, _ = _write_binary_file(value, path, byte_order)
    result = ReconstructionResult(
        value_bit_length=value.bit_length(),
        decimal_digits=decimal_digit_count(value),
        sha256_hex=sha_hex,
        output_path=path,
    )
    return result, value
