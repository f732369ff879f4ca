"""A deterministic toy trapdoor cipher on top of the Δ⇌Σ equilibrium.

The message becomes an odd integer p below the first steady p of a public Δ.
The ciphertext is od6 of n = p * (p + Δ); the private key is the offset that
moves od6 onto the Σ-series point that sits p_ssv - p rows from equilibrium.

Not a secure cipher: identical messages give identical ciphertexts, and key
material is kept in plain integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from pathlib import Path

from .equilibrium import delta_side_dials, equilibrium_anchor
from .errors import (CodecError, InvalidKeyError, MessageTooLargeError, UnsupportedDeltaError)
from .series import BASE_DIALS_4K2, DialPair, deck_values, resolve_dials

CODEC_MODES = ("ascii2", "fixed3")


def _as_bytes(text) -> bytes:
    return text.encode("latin-1") if isinstance(text, str) else bytes(text)


def encode_message(text, mode: str = "ascii2") -> int:
    """Concatenate decimal byte codes.

    "ascii2" needs every code in 10..99. "fixed3" writes a leading 1 and then
    each byte as three digits, so any byte string round-trips.
    """
    data = _as_bytes(text)
    if not data:
        raise CodecError("empty message")
    if mode == "ascii2":
        bad = [b for b in data if not 10 <= b <= 99]
        if bad:
            raise CodecError(f"byte codes {bad} are not two decimal digits")
        return int("".join(str(b) for b in data))
    if mode == "fixed3":
        return int("1" + "".join(f"{b:03d}" for b in data))
    raise CodecError(f"unknown codec mode {mode!r}")


def decode_message(value: int, mode: str = "ascii2") -> bytes:
    if value < 1:
        raise CodecError("encoded messages are positive")
    digits = str(value)
    if mode == "ascii2":
        if len(digits) % 2:
            raise CodecError(f"{value} has an odd number of digits")
        codes = [int(digits[i:i + 2]) for i in range(0, len(digits), 2)]
        if any(c < 10 for c in codes):
            raise CodecError(f"{value} contains a code below 10")
        return bytes(codes)
    if mode == "fixed3":
        if digits[0] != "1" or (len(digits) - 1) % 3:
            raise CodecError(f"{value} is not a fixed3 encoding")
        codes = [int(digits[i:i + 3]) for i in range(1, len(digits), 3)]
        if any(c > 255 for c in codes):
            raise CodecError(f"{value} contains a code above 255")
        return bytes(codes)
    raise CodecError(f"unknown codec mode {mode!r}")


@dataclass(frozen=True)
class TrapdoorParams:
    delta: int
    delta_dials: DialPair
    sum_dials: DialPair = BASE_DIALS_4K2

    @classmethod
    def for_delta(cls, delta: int) -> "TrapdoorParams":
        if delta % 2:
            raise UnsupportedDeltaError(f"Δ={delta} is odd; the cipher needs an even Δ")
        if delta < 4:
            raise UnsupportedDeltaError("the cipher needs Δ >= 4")
        return cls(delta, delta_side_dials(delta, "odd"))

    def __post_init__(self):
        if self.delta % 2 or self.delta < 4:
            raise UnsupportedDeltaError(f"Δ={self.delta} is not an even Δ >= 4")
        if self.delta_dials != delta_side_dials(self.delta, "odd"):
            raise UnsupportedDeltaError(f"dials {self.delta_dials} do not match Δ={self.delta} mod 4")


def _params(params) -> TrapdoorParams:
    return params if isinstance(params, TrapdoorParams) else TrapdoorParams.for_delta(int(params))


@dataclass(frozen=True)
class TrapdoorPrivateKey:
    constant: int


@dataclass(frozen=True)
class Ciphertext:
    od6: int


@dataclass(frozen=True)
class SteadyPoint:
    ssv: int
    p_ssv: int
    od6_ssv: int
    n_equil: int
    p_equil: int
    q_equil: int


@dataclass(frozen=True)
class EncryptionTrace:
    ssv: int
    p_ssv: int
    od6_ssv: int
    p: int
    p_dist: int
    q: int
    n: int
    od1: int
    od2: int
    od6: int
    n_equil: int
    p_equil: int
    q_equil: int
    p_sum_series: int
    q_sum_series: int
    n_sum_series: int
    private_constant: int

    def as_dict(self) -> dict:
        return asdict(self)


def sum_series_factor_pair(n: int, delta: int) -> tuple[int, int] | None:
    """Integer roots p <= q of x^2 - Δx + N (p may be negative)."""
    disc = delta * delta - 4 * n
    if disc < 0:
        return None
    s = math.isqrt(disc)
    if s * s != disc or (delta - s) % 2:
        return None
    return (delta - s) // 2, (delta + s) // 2


def steady_point(params) -> SteadyPoint:
    """Everything about the public Δ that both sides recompute."""
    params = _params(params)
    delta = params.delta
    anchor = equilibrium_anchor(delta, "odd", params.delta_dials)
    ssv = delta * delta // 2 + 2
    pair = sum_series_factor_pair(anchor.n_anchor, delta)
    if pair is None:
        raise AssertionError(f"equilibrium N={anchor.n_anchor} has no roots for Δ={delta}")
    return SteadyPoint(ssv, anchor.first_steady_p, anchor.od6_ssv, anchor.n_anchor, *pair)


def encrypt_integer(p: int, params) -> tuple[Ciphertext, TrapdoorPrivateKey, EncryptionTrace]:
    params = _params(params)
    delta = params.delta
    if p < 1:
        raise CodecError("the message integer must be positive")
    if p % 2 == 0:
        raise CodecError(f"message integer {p} is even; the cipher needs an odd p")
    point = steady_point(params)
    if p >= point.p_ssv:
        raise MessageTooLargeError(f"message integer {p} is not below p_ssv={point.p_ssv}")
    q = p + delta
    n = p * q
    od = deck_values(n, params.delta_dials)
    od6 = od[6]
    d1, _ = resolve_dials(n, params.delta_dials)
    if od6 is None or od6 != abs(od[1] + 2 * d1):
        raise AssertionError(f"od6 identity fails for n={n}")
    p_dist = point.p_ssv - p
    p_sum = point.p_equil - p_dist
    q_sum = delta - p_sum
    n_sum = p_sum * q_sum
    private = n_sum - od6
    trace = EncryptionTrace(point.ssv, point.p_ssv, point.od6_ssv, p, p_dist, q, n,
                            od[1], od[2], od6, point.n_equil, point.p_equil, point.q_equil,
                            p_sum, q_sum, n_sum, private)
    return Ciphertext(od6), TrapdoorPrivateKey(private), trace


def encrypt(message, params, mode: str = "ascii2"):
    """Encrypt a byte string; returns (ciphertext, private key, trace)."""
    return encrypt_integer(encode_message(message, mode), params)


def decrypt_integer(c: Ciphertext | int, key: TrapdoorPrivateKey | int, params) -> int:
    params = _params(params)
    od6 = c.od6 if isinstance(c, Ciphertext) else int(c)
    constant = key.constant if isinstance(key, TrapdoorPrivateKey) else int(key)
    n_sum = od6 + constant
    pair = sum_series_factor_pair(n_sum, params.delta)
    if pair is None:
        raise InvalidKeyError("ciphertext plus key is not a point on the Σ-series")
    _, q_sum = pair
    point = steady_point(params)
    q_dist = q_sum - point.q_equil
    p = point.p_ssv - q_dist
    if not 1 <= p < point.p_ssv:
        raise InvalidKeyError(f"recovered p={p} is outside 1..p_ssv")
    return p


def decrypt(c, key, params, mode: str = "ascii2") -> bytes:
    return decode_message(decrypt_integer(c, key, params), mode)


def write_key_file(path, delta: int, ciphertext: Ciphertext | int, key: TrapdoorPrivateKey | int):
    od6 = ciphertext.od6 if isinstance(ciphertext, Ciphertext) else int(ciphertext)
    constant = key.constant if isinstance(key, TrapdoorPrivateKey) else int(key)
    Path(path).write_text(f"delta={delta}\nciphertext={od6}\nprivate={constant}\n")


def read_key_file(path) -> dict:
    """Parse a key file into {"delta", "ciphertext", "private"} integers."""
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, value = line.partition("=")
        if not sep:
            raise InvalidKeyError(f"malformed key line {line!r}")
        try:
            out[name.strip()] = int(value.strip())
        except ValueError:
            raise InvalidKeyError(f"malformed key line {line!r}") from None
    missing = {"delta", "ciphertext", "private"} - out.keys()
    if missing:
        raise InvalidKeyError(f"key file lacks {sorted(missing)}")
    return out
