"""Cohen's kappa for two annotators over one criterion."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Sequence

__all__ = ["KappaReport", "cohens_kappa"]

# Marginal chance agreement this close to 1 is treated as degenerate.
_EPS = 1e-12


@dataclass(frozen=True)
class KappaReport:
    criterion: str
    n: int
    agreements: int
    kappa: float | None
    degenerate: bool = False
    undefined: bool = False

    def to_json(self) -> dict:
        return {
            "criterion": self.criterion,
            "n": self.n,
            "agreements": self.agreements,
            "kappa": self.kappa,
            "degenerate": self.degenerate,
            "undefined": self.undefined,
        }


def cohens_kappa(
    labels_a: Sequence[Hashable],
    labels_b: Sequence[Hashable],
    criterion: str = "",
) -> KappaReport:
    """Chance-corrected agreement kappa = (p_o - p_e) / (1 - p_e).

    p_o is the observed agreement fraction; p_e sums the products of the
    two annotators' marginal label frequencies. When both annotators used
    a single shared category, chance agreement is 1 and the statistic is
    degenerate: perfect agreement reports kappa = 1 with the degenerate
    flag, anything else reports no kappa with the undefined flag.
    """
    if len(labels_a) != len(labels_b):
        raise ValueError(
            f"label vectors differ in length: {len(labels_a)} vs {len(labels_b)}"
        )
    n = len(labels_a)
    if n == 0:
        raise ValueError("label vectors must be non-empty")

    agreements = sum(1 for a, b in zip(labels_a, labels_b) if a == b)
    p_o = agreements / n
    marginal_a = Counter(labels_a)
    marginal_b = Counter(labels_b)
    # Sum in a canonical category order: float addition is not associative,
    # and set iteration order would make kappa(a, b) != kappa(b, a) by ulps.
    categories = sorted(
        set(marginal_a) | set(marginal_b), key=lambda c: (str(type(c)), repr(c))
    )
    p_e = sum(
        (marginal_a[label] / n) * (marginal_b[label] / n) for label in categories
    )

    if p_e >= 1.0 - _EPS:
        if agreements == n:
            return KappaReport(criterion, n, agreements, kappa=1.0, degenerate=True)
        return KappaReport(criterion, n, agreements, kappa=None, undefined=True)

    kappa = (p_o - p_e) / (1.0 - p_e)
    return KappaReport(criterion, n, agreements, kappa=kappa)
