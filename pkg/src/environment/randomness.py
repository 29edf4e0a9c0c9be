"""Seeded random streams; one independent stream per concern and replicate"""
from dataclasses import dataclass
from enum import IntEnum

import numpy as np


class Stream(IntEnum):
    SCENARIO = 0
    SENSOR = 1
    FILTER = 2
    CLUSTERING = 3


@dataclass(frozen=True)
class RandomSource:
    """Equal (seed, stream_id) pairs give bit-identical draw sequences"""
    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(seq))

    def stream(self, stream: Stream) -> "RandomSource":
        return RandomSource(self.seed, int(stream))


@dataclass
class RandomStreams:
    """Live generators for one replicate"""
    scenario: np.random.Generator
    sensor: np.random.Generator
    filter: np.random.Generator
    clustering: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int) -> "RandomStreams":
        root = RandomSource(seed)
        return cls(
            scenario=root.stream(Stream.SCENARIO).generator(),
            sensor=root.stream(Stream.SENSOR).generator(),
            filter=root.stream(Stream.FILTER).generator(),
            clustering=root.stream(Stream.CLUSTERING).generator(),
        )
