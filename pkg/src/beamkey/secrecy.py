"""Erasure-based secret-key agreement over a broadcast channel.

Alice broadcasts packets whose payloads are random bits. Bob acknowledges
the subset he decoded; acknowledgments are public, so an eavesdropper (Eve)
knows exactly which packets Bob holds. If Eve is known to have intercepted
at most ``e`` of Bob's ``m`` packets, Alice and Bob can both compute
``k = m - e`` key packets that Eve has zero information about, by applying
a combiner matrix whose every (m-e)-column submatrix is invertible. The
combiner itself is public.

The combiner here is a Vandermonde matrix over GF(256) applied symbol-wise
to 8-bit payload chunks. With one packet of slack (e = m-1) the single key
packet degenerates to the XOR of everything Bob received.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from .gf import GF256, BinaryField, vandermonde


class NoKeyError(ValueError):
    """No key can be extracted (Eve may hold everything Bob has)."""


@dataclass(frozen=True)
class RandomPacket:
    """One broadcast packet: an index plus a payload of field symbols.

    Payloads are numpy uint8 arrays, one entry per 8-bit chunk. For toy
    instances with payload_bits < 8 a single symbol holds the payload and
    only its low bits are used.
    """

    packet_id: int
    payload: np.ndarray
    payload_bits: int = 1024

    def __post_init__(self):
        object.__setattr__(self, "payload", np.asarray(self.payload, dtype=np.uint8))


@dataclass(frozen=True)
class ReceptionLog:
    n_sent: int
    bob_received: frozenset[int]
    eve_received: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "bob_received", frozenset(self.bob_received))
        object.__setattr__(self, "eve_received", frozenset(self.eve_received))
        valid = set(range(self.n_sent))
        if not (self.bob_received <= valid and self.eve_received <= valid):
            raise ValueError("received sets must be subsets of {0..n_sent-1}")


@dataclass(frozen=True)
class EveBound:
    """Assumed upper bound on how many of Bob's packets Eve intercepted.

    The bound is an input everywhere; this module makes no attempt to
    estimate it from observations.
    """

    max_intercepted: int

    def __post_init__(self):
        if self.max_intercepted < 0:
            raise ValueError("bound must be >= 0")


@dataclass(frozen=True)
class SecretKey:
    """Extracted key packets plus the public combiner that produced them."""

    key_packets: tuple
    combiner: np.ndarray
    payload_bits: int

    @property
    def n_packets(self) -> int:
        return len(self.key_packets)

    @property
    def bits(self) -> int:
        return self.n_packets * self.payload_bits


def generate_packets(n: int, payload_bits: int = 1024, seed: int = 0) -> list[RandomPacket]:
    """Produce n packets of uniformly random payload, deterministic per seed."""
    if n < 1:
        raise ValueError("need at least one packet")
    if payload_bits >= 8 and payload_bits % 8 != 0:
        raise ValueError("payloads of 8 bits or more must be byte aligned")
    n_symbols = max(1, payload_bits // 8)
    packets = []
    for i in range(n):
        rng = np.random.default_rng([seed, 0x5EC, i])
        if payload_bits < 8:
            payload = rng.integers(0, 1 << payload_bits, size=1, dtype=np.uint8)
        else:
            payload = rng.integers(0, 256, size=n_symbols, dtype=np.uint8)
        packets.append(RandomPacket(packet_id=i, payload=payload, payload_bits=payload_bits))
    return packets


# Decode predicates take (packet_id, rng) and return bool; factories below
# cover the usual cases.

def always_decodes(packet_id, rng):
    return True


def never_decodes(packet_id, rng):
    return False


def iid_erasure(p_erase: float):
    """Predicate that decodes each packet independently with prob 1-p_erase."""
    if not 0.0 <= p_erase <= 1.0:
        raise ValueError("erasure probability must be in [0,1]")

    def decode(packet_id, rng):
        return rng.random() >= p_erase

    return decode


def misses_only(missed: set[int]):
    """Predicate that decodes everything except the given packet ids."""
    missed = set(missed)

    def decode(packet_id, rng):
        return packet_id not in missed

    return decode


def run_exchange(n: int, decode_bob, decode_eve, seed: int) -> ReceptionLog:
    """Broadcast n packets and record who decoded what.

    Each predicate gets its own per-packet random stream derived from the
    seed, so runs are reproducible and Bob/Eve erasures are independent.
    Acknowledgments are public: the returned log is exactly what Eve also
    learns about Bob's reception.
    """
    if n < 1:
        raise ValueError("need at least one packet")
    bob, eve = set(), set()
    for i in range(n):
        if decode_bob(i, np.random.default_rng([seed, 0xB0B, i])):
            bob.add(i)
        if decode_eve(i, np.random.default_rng([seed, 0xE5E, i])):
            eve.add(i)
    return ReceptionLog(n_sent=n, bob_received=frozenset(bob), eve_received=frozenset(eve))


def worst_case_bound(log: ReceptionLog) -> EveBound:
    """The harshest survivable assumption: Eve missed exactly one of Bob's packets.

    Guarantees exactly one key packet. An Eve who missed nothing breaks the
    protocol outright, so this is the boundary case.
    """
    m = len(log.bob_received)
    if m < 1:
        raise NoKeyError("Bob received nothing; no key possible")
    return EveBound(max_intercepted=m - 1)


def build_combiner(m: int, e, field: BinaryField = GF256) -> np.ndarray:
    """Combiner matrix mapping Bob's m packets to k = m-e key packets.

    Vandermonde over distinct nonzero field elements: for every choice of e
    columns (whatever Eve holds), the k x k submatrix on the remaining
    columns is invertible, so the key stays uniform given Eve's packets.
    """
    e = e.max_intercepted if isinstance(e, EveBound) else int(e)
    if m < 1:
        raise ValueError("m must be >= 1")
    if e < 0:
        raise ValueError("eavesdropper bound must be >= 0")
    if e >= m:
        raise NoKeyError(f"bound e={e} >= m={m}: no key extractable")
    return vandermonde(field, m - e, m)


def extract_key(
    log: ReceptionLog,
    packets: list[RandomPacket],
    e,
    field: BinaryField = GF256,
) -> SecretKey:
    """Derive k = |bob_received| - e key packets from Bob's payloads.

    Both ends run this identically: Alice knows what she sent, Bob knows
    what he got, and the log is public, so the outputs are bit-identical.
    """
    e = e.max_intercepted if isinstance(e, EveBound) else int(e)
    bob = sorted(log.bob_received)
    m = len(bob)
    if m == 0 or e >= m:
        raise NoKeyError(f"Eve bound e={e} leaves no secret packets out of m={m}")
    by_id = {p.packet_id: p for p in packets}
    missing = [i for i in bob if i not in by_id]
    if missing:
        raise ValueError(f"payloads missing for packets {missing}")
    payloads = [by_id[i].payload for i in bob]
    bits = {by_id[i].payload_bits for i in bob}
    lengths = {p.size for p in payloads}
    if len(bits) != 1 or len(lengths) != 1:
        raise ValueError("payload lengths must be identical across a session")
    payload_bits = bits.pop()

    g = build_combiner(m, e, field)
    stacked = np.stack(payloads).astype(np.int64)  # (m, n_symbols)
    keys = []
    for row in g:
        acc = np.zeros(stacked.shape[1], dtype=np.int64)
        for coeff, payload in zip(row, stacked):
            acc ^= field.mul(int(coeff), payload)
        keys.append(acc.astype(np.uint8))
    return SecretKey(key_packets=tuple(keys), combiner=g, payload_bits=payload_bits)


def secrecy_oracle(
    m: int,
    e: int,
    combiner: np.ndarray,
    chunk_bits: int = 1,
    field: BinaryField = GF256,
) -> bool:
    """Exhaustively verify that the key leaks nothing to any e-packet Eve.

    Enumerates every e-subset of packet indices, every fixing of those
    payload symbols, and every assignment of the remaining symbols over the
    2**chunk_bits alphabet. The combiner passes iff, for each subset and
    fixing, every free assignment maps to a *distinct* key vector - i.e. the
    key is uniform over its maximal 2**(chunk_bits*k) support, carrying full
    entropy regardless of what Eve saw.
    """
    if chunk_bits < 1 or chunk_bits > 2:
        raise ValueError("chunk_bits must be 1 or 2")
    if m * chunk_bits > 20:
        raise ValueError(
            f"enumeration budget exceeded (m*chunk_bits = {m * chunk_bits} > 20); "
            "verify a smaller instance"
        )
    if not 0 <= e < m:
        raise ValueError("need 0 <= e < m")
    g = np.asarray(combiner, dtype=np.int64)
    k = g.shape[0]
    if g.shape != (k, m):
        raise ValueError("combiner shape must be (k, m)")
    alphabet = 1 << chunk_bits
    if alphabet > field.order:
        raise ValueError("chunk alphabet larger than the field")

    # All payload assignments as a grid, all key vectors in one shot.
    assignments = np.array(list(product(range(alphabet), repeat=m)), dtype=np.int64)
    keys = field.matmul(g, assignments.T).T  # (alphabet**m, k)
    # Pack each key vector into one integer for fast distinctness checks.
    packed = np.zeros(keys.shape[0], dtype=np.int64)
    for j in range(k):
        packed = (packed << field.exponent) | keys[:, j]
    packed = packed.reshape((alphabet,) * m)

    n_free = m - e
    for eve_idx in combinations(range(m), e):
        free_idx = [i for i in range(m) if i not in eve_idx]
        perm = list(eve_idx) + free_idx
        view = packed.transpose(perm).reshape(alphabet**e, alphabet**n_free)
        for fixing in view:
            if np.unique(fixing).size != alphabet**n_free:
                return False
    return True
