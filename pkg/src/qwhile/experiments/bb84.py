"""BB84 key distribution: simple, multi-client, and noisy-channel runs.

One session walks the full protocol: Alice draws a raw key and a basis
string; encodes bit b in basis 0 as |b> and in basis 1 as |+>/|->;
each ket crosses the channel as a density operator; Bob measures in his
own random basis; bases are broadcast and both sides sift positions
where they agree; a global comparison records whether the sifted keys
match. With a sampling fraction s, Alice additionally reveals
ceil(s * L) random sifted positions and the session verdict is success
iff every revealed bit matches (the noisy-channel check).

Channels ship with the exact Kraus families used in the sweep:
bit flip for p in {0.25, 0.5, 0.75} ({sqrt(p) I, sqrt(1-p) X}; larger p
keeps more information), depolarizing p = 0.5, amplitude damping
gamma = 0.5, and the identity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..core import ops
from ..core.types import DensityOperator, Ket, MeasurementSet, SuperOperator
from ..engine.sampler import SamplerState, sample_outcome, splitmix64
from ..errors import QwhileError

_SQ2 = np.sqrt(2.0)
_KETS = {
    (0, 0): np.array([1, 0], dtype=complex),          # |0>
    (0, 1): np.array([0, 1], dtype=complex),          # |1>
    (1, 0): np.array([1, 1], dtype=complex) / _SQ2,   # |+>
    (1, 1): np.array([1, -1], dtype=complex) / _SQ2,  # |->
}


def paper_channels() -> dict[str, SuperOperator]:
    s8 = np.sqrt(8.0)
    depolarizing = SuperOperator([
        np.array([[np.sqrt(5.0) / s8, 0], [0, np.sqrt(5.0) / s8]]),
        np.array([[0, 1 / s8], [1 / s8, 0]]),
        np.array([[0, -1j / s8], [1j / s8, 0]]),
        np.array([[1 / s8, 0], [0, -1 / s8]]),
    ], name="depolarizing_p05")
    amplitude_damping = SuperOperator([
        np.array([[1, 0], [0, 1 / _SQ2]]),
        np.array([[0, 1 / _SQ2], [0, 0]]),
    ], name="amplitude_damping_g05")

    def bit_flip(p: float, tag: str) -> SuperOperator:
        return SuperOperator([
            np.sqrt(p) * np.eye(2),
            np.sqrt(1.0 - p) * np.array([[0, 1], [1, 0]]),
        ], name=f"bit_flip_p{tag}")

    return {
        "identity": SuperOperator.identity(2),
        "bit_flip_p025": bit_flip(0.25, "025"),
        "bit_flip_p05": bit_flip(0.5, "05"),
        "bit_flip_p075": bit_flip(0.75, "075"),
        "depolarizing_p05": depolarizing,
        "amplitude_damping_g05": amplitude_damping,
    }


@dataclass(frozen=True)
class BB84Session:
    raw_key_length: int = 1024
    channel: SuperOperator = field(default_factory=lambda: SuperOperator.identity(2))
    sampling_fraction: float | None = None   # None: no sampling check (simple case)
    seed: int = 0

    def __post_init__(self):
        if self.raw_key_length < 1:
            raise QwhileError("raw key length must be >= 1")
        if self.sampling_fraction is not None and not 0.0 < self.sampling_fraction < 1.0:
            raise QwhileError("sampling fraction must lie in (0, 1)")


@dataclass
class BB84Transcript:
    raw_key: list[int]
    alice_bases: list[int]
    bob_bases: list[int]
    bob_results: list[int]
    agreement: list[int]                 # 1 where bases coincided
    alice_key: list[int]
    bob_key: list[int]
    sample_positions: list[int]
    keys_match: bool                     # global (oracle) comparison
    verdict: bool                        # sampling-check verdict

    @property
    def sifted_length(self) -> int:
        return len(self.alice_key)


def _random_bits(rng: SamplerState, n: int) -> list[int]:
    return [1 if rng.draw() >= 0.5 else 0 for _ in range(n)]


_BASES = {0: MeasurementSet.computational(2), 1: MeasurementSet.plus_minus()}


def bb84_run(session: BB84Session) -> BB84Transcript:
    """One full protocol session, deterministic for a given seed."""
    n = session.raw_key_length
    alice = SamplerState(splitmix64(session.seed, 1))
    bob = SamplerState(splitmix64(session.seed, 2))
    quantum = SamplerState(splitmix64(session.seed, 3))

    raw_key = _random_bits(alice, n)
    alice_bases = _random_bits(alice, n)
    bob_bases = _random_bits(bob, n)

    bob_results: list[int] = []
    for i in range(n):
        ket = Ket(_KETS[(alice_bases[i], raw_key[i])])
        received = ops.apply_superoperator(ket.to_density(), session.channel)
        p = ops.measurement_probabilities(received, _BASES[bob_bases[i]])
        bob_results.append(sample_outcome(p, quantum))

    agreement = [1 if alice_bases[i] == bob_bases[i] else 0 for i in range(n)]
    alice_key = [raw_key[i] for i in range(n) if agreement[i]]
    bob_key = [bob_results[i] for i in range(n) if agreement[i]]
    keys_match = alice_key == bob_key

    sample_positions: list[int] = []
    verdict = keys_match
    if session.sampling_fraction is not None and alice_key:
        k = math.ceil(session.sampling_fraction * len(alice_key))
        pool = list(range(len(alice_key)))
        for _ in range(k):
            idx = int(alice.draw() * len(pool))
            idx = min(idx, len(pool) - 1)
            sample_positions.append(pool.pop(idx))
        sample_positions.sort()
        verdict = all(alice_key[i] == bob_key[i] for i in sample_positions)

    return BB84Transcript(raw_key, alice_bases, bob_bases, bob_results, agreement,
                          alice_key, bob_key, sample_positions, keys_match, verdict)


def bb84_multi_client(clients: int, raw_key_length: int = 1024, seed: int = 0,
                      channel: SuperOperator | None = None,
                      sampling_fraction: float | None = None) -> list[BB84Transcript]:
    """One Alice against many Bobs; sessions are fully isolated and each
    client gets an independently derived seed."""
    if clients < 1:
        raise QwhileError("need at least one client")
    channel = channel or SuperOperator.identity(2)
    out = []
    for c in range(clients):
        session = BB84Session(raw_key_length, channel, sampling_fraction,
                              seed=splitmix64(seed, 1000 + c))
        out.append(bb84_run(session))
    return out


@dataclass
class SweepCell:
    channel: str
    raw_key_length: int
    sampling_fraction: float
    sessions: int
    successes: int


def bb84_channel_sweep(channels: dict[str, SuperOperator] | None = None,
                       lengths: tuple[int, ...] = (16, 32, 64),
                       fractions: tuple[float, ...] = (0.2, 0.5),
                       sessions: int = 100, seed: int = 0) -> list[SweepCell]:
    """Success counts per (channel, length, fraction) cell."""
    channels = channels or paper_channels()
    cells: list[SweepCell] = []
    for ci, (name, chan) in enumerate(channels.items()):
        for li, length in enumerate(lengths):
            for fi, fraction in enumerate(fractions):
                wins = 0
                for s in range(sessions):
                    mix = splitmix64(seed, ((ci * 97 + li) * 89 + fi) * 100003 + s)
                    t = bb84_run(BB84Session(length, chan, fraction, seed=mix))
                    wins += 1 if t.verdict else 0
                cells.append(SweepCell(name, length, fraction, sessions, wins))
    return cells


def sweep_csv(cells: list[SweepCell]) -> str:
    lines = ["channel,raw_key_length,sampling_fraction,sessions,successes"]
    for c in cells:
        lines.append(f"{c.channel},{c.raw_key_length},{c.sampling_fraction},{c.sessions},{c.successes}")
    return "\n".join(lines) + "\n"
