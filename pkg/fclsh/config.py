"""Library settings and reproducible randomness."""

import logging
import os
from dataclasses import dataclass, fields

import numpy as np

from .errors import UsageError
from .presets import Experiment

logger = logging.getLogger(__name__)

MERSENNE_61 = (1 << 61) - 1

_ENV_PREFIX = "FCLSH_"


@dataclass(frozen=True)
class Settings:
    """Budgets and defaults. Values come from data/experiments.json, then FCLSH_* variables."""

    prime: int = MERSENNE_61
    table_budget: int = 1 << 21
    ball_budget: int = 10_000_000
    # largest supported log2 of the Hadamard code length
    code_order_budget: int = 24
    repeats: int = 5
    delta: float = 0.1
    seed: int = 0
    chunk_rows: int = 4096
    strategy1_factor: int = 3

    @classmethod
    def load(cls, environ: dict | None = None) -> "Settings":
        """
        Build settings from the packaged defaults and environment overrides.

        :param environ: Mapping to read overrides from (defaults to os.environ)
        :return: Settings instance
        """
        environ = os.environ if environ is None else environ
        known = {f.name: f.type for f in fields(cls)}
        values = {k: v for k, v in Experiment.get_defaults().items() if k in known}
        for name in known:
            raw = environ.get(_ENV_PREFIX + name.upper())
            if raw is None:
                continue
            try:
                values[name] = float(raw) if name == "delta" else int(raw, 0)
            except ValueError:
                raise UsageError(f"invalid value for {_ENV_PREFIX}{name.upper()}: {raw!r}") from None
            logger.debug("setting %s overridden from environment: %s", name, values[name])
        return cls(**values)


_settings: Settings | None = None


def get_settings() -> Settings:
    """Process-wide settings, loaded on first use."""
    global _settings
    if _settings is None:
        _settings = Settings.load()
    return _settings


class SeedStreams:
    """
    Named, independent random streams derived from one 64-bit seed.

    Usage Example:
        streams = SeedStreams(7)
        rng = streams.generator("family", 0)
    """

    NAMES = ("family", "mapping", "permutation", "data", "queries", "hyperplanes", "partition")

    def __init__(self, seed: int):
        self.seed = int(seed)

    def generator(self, name: str, *keys: int) -> np.random.Generator:
        """
        Return a Generator for a named stream, optionally sub-keyed (repeat, partition...).

        :param name: One of SeedStreams.NAMES
        :param keys: Extra integers selecting an independent child stream
        :return: numpy Generator
        """
        if name not in self.NAMES:
            raise UsageError(f"unknown random stream {name!r}")
        tag = self.NAMES.index(name)
        return np.random.default_rng(np.random.SeedSequence([self.seed, tag, *keys]))

    def child_seed(self, name: str, *keys: int) -> int:
        """A plain integer seed for APIs that take one."""
        return int(self.generator(name, *keys).integers(0, 2**63 - 1))
