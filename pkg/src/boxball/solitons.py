"""Conserved soliton counts of periodic configurations.

``f_0`` is the number of particles and ``f_k`` (``k >= 1``) the number of
solitons of size at least ``k``.  They are read off by repeatedly deleting every
``(1, 0)`` pair of the cyclic word, the pair ``(x_N, x_1)`` included; ``f_k`` is
the number of pairs seen at the ``k``-th deletion round.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .lattice import CYCLIC, BinaryConfiguration, ConfigurationError, periodic_transform


@dataclass(frozen=True)
class SolitonProfile:
    """``(f_0, f_1, ..., f_m)``; stored up to the first zero, zero beyond."""

    f: tuple[int, ...]

    def __getitem__(self, k: int) -> int:
        if k < 0:
            raise IndexError("soliton index must be nonnegative")
        return self.f[k] if k < len(self.f) else 0

    def __len__(self) -> int:
        return len(self.f)

    def sizes(self) -> dict[int, int]:
        """Number of solitons of each exact size ``k``: ``f_k - f_{k+1}``."""
        return {k: self[k] - self[k + 1] for k in range(1, len(self.f)) if self[k] > self[k + 1]}

    def to_list(self) -> list[int]:
        return list(self.f)


def _word(seq: Iterable[int] | str) -> str:
    if isinstance(seq, str):
        word = seq
    else:
        word = "".join(str(int(b)) for b in seq)
    if word.strip("01"):
        raise ConfigurationError("soliton counting needs a 0/1 word")
    return word


def _contract_word(word: str, cyclic: bool) -> tuple[str, int]:
    # (1,0) pairs never overlap, so a single left-to-right replace removes them
    # all simultaneously; the wrap pair cannot clash with an interior pair
    wrap = cyclic and len(word) >= 2 and word[-1] == "1" and word[0] == "0"
    core = word[1:-1] if wrap else word
    pairs = core.count("10")
    out = core.replace("10", "")
    return out, pairs + int(wrap)


def contract(seq: Sequence[int] | str, cyclic: bool = True) -> tuple[int, ...]:
    """One application of the contraction ``H``: delete every (1,0) pair at once."""
    out, _ = _contract_word(_word(seq), cyclic)
    return tuple(int(ch) for ch in out)


def profile_of_word(word: str) -> tuple[int, ...]:
    """Soliton profile of a cyclic 0/1 word, as a plain tuple."""
    f = [word.count("1")]
    if f[0] == 0:
        return (0,)
    while True:
        word, pairs = _contract_word(word, True)
        f.append(pairs)
        if pairs == 0:
            return tuple(f)


def soliton_counts(config: BinaryConfiguration | Sequence[int] | str) -> SolitonProfile:
    """Profile ``(f_0, f_1, ...)`` of a cyclic configuration."""
    if isinstance(config, BinaryConfiguration):
        if config.boundary != CYCLIC:
            raise ConfigurationError("soliton counts are defined for cyclic configurations")
        word = _word(config.sites)
    else:
        word = _word(config)
    return SolitonProfile(profile_of_word(word))


@dataclass(frozen=True)
class ConservationReport:
    before: SolitonProfile
    after: SolitonProfile
    image: BinaryConfiguration

    @property
    def conserved(self) -> bool:
        return self.before == self.after

    def to_dict(self) -> dict:
        return {"before": self.before.to_list(), "after": self.after.to_list(),
                "image": "".join(map(str, self.image.sites)), "conserved": self.conserved}


def verify_conservation(config: BinaryConfiguration, step=periodic_transform) -> ConservationReport:
    """Compare soliton profiles before and after one periodic step.

    ``step`` is injectable so that a deliberately broken dynamics can serve as
    a negative control.
    """
    image = step(config)
    return ConservationReport(soliton_counts(config), soliton_counts(image), image)
