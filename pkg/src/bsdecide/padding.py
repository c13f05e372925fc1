"""Exponential padding: a payload followed by pseudo-blank bytes up to a total
length of 2**(n**k), where n is the payload length."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MalformedPadding, PaddingOverflow, ReservedByte

BLANK = b"#"
DEFAULT_MAX_BYTES = 2**20


def padded_exponent(n: int, k: int) -> int:
    return n**k


def fits(n: int, k: int, max_bytes: int) -> bool:
    """Whether 2**(n**k) <= max_bytes, without building huge integers."""
    e = padded_exponent(n, k)
    return e < max_bytes.bit_length() and (1 << e) <= max_bytes


@dataclass(frozen=True)
class PaddedBlob:
    payload: bytes
    k: int

    @property
    def n(self) -> int:
        return len(self.payload)

    @property
    def total_length(self) -> int:
        return 1 << padded_exponent(self.n, self.k)

    def to_bytes(self) -> bytes:
        return self.payload + BLANK * (self.total_length - self.n)


def pad(payload: bytes, k: int, max_bytes: int = DEFAULT_MAX_BYTES) -> PaddedBlob:
    if k < 1:
        raise ValueError("k must be a positive integer")
    if not payload:
        raise ValueError("cannot pad an empty payload")
    hit = payload.find(BLANK)
    if hit >= 0:
        raise ReservedByte(hit)
    if not fits(len(payload), k, max_bytes):
        raise PaddingOverflow(len(payload), k, max_bytes)
    return PaddedBlob(bytes(payload), k)


def unpad(blob: bytes, k: int) -> bytes:
    """Recover the payload, checking the blob has exactly the padded shape."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    payload = blob.rstrip(BLANK)
    n = len(payload)
    if n == 0:
        raise MalformedPadding("blob holds no payload")
    if BLANK in payload:
        raise MalformedPadding(f"pseudo-blank inside the payload at offset {payload.find(BLANK)}")
    e = padded_exponent(n, k)
    if e > len(blob).bit_length() or len(blob) != 1 << e:
        raise MalformedPadding(f"length {len(blob)} is not 2**({n}**{k})")
    return payload


def pad_to(payload: bytes, unit: int) -> bytes:
    """Pad to the smallest positive multiple of ``unit`` that holds the payload."""
    hit = payload.find(BLANK)
    if hit >= 0:
        raise ReservedByte(hit)
    total = max(1, -(-len(payload) // unit)) * unit
    return payload + BLANK * (total - len(payload))
