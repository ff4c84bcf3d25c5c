"""Synthesizing datasets that realize prescribed clique weights.

Over binary variables, a sample pooled from equal-size blocks can make every
marginal over at most k variables exactly uniform while giving the parity of
each chosen (k+1)-subset an exact rational bias. Uniform small marginals
zero out every weight of size 2..k, and the weight of a (k+1)-subset becomes
a closed-form function of its parity bias alone (``bias_to_weight``). The
generator therefore turns any non-negative weight target on (k+1)-subsets
into a concrete dataset whose computed weights are proportional to the
target up to reported rounding error - an adversarial-instance factory for
the solvers.

Blocks are full binary cubes (every vector once) or odd-parity slices (every
vector with odd parity on the target subset, twice). At the cube sizes used
here both are uniform on every other subset of size up to k+1, so fixing one
subset's parity never disturbs the rest.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import Dataset, VariableSpec
from .errors import GuardLimitError

__all__ = [
    "TargetBiases",
    "ParitySample",
    "RealizationReport",
    "bias_to_weight",
    "weight_to_bias",
    "generate",
    "realize_weights",
    "biases_to_dict",
    "biases_from_dict",
    "dump_biases",
    "load_biases",
]

DEFAULT_CUBE_LIMIT = 14
BIAS_CAP = 1.0 - 1e-12


@dataclass(frozen=True)
class TargetBiases:
    """Rational parity biases p_h / q on (k+1)-subsets of binary variables."""

    k: int
    n: int
    q: int
    entries: dict[tuple[int, ...], int]

    def __post_init__(self):
        if self.k < 1 or self.n < self.k + 1:
            raise ValueError(f"need n >= k+1 >= 2, got n={self.n}, k={self.k}")
        if self.q < 1:
            raise ValueError(f"denominator must be >= 1, got {self.q}")
        entries = {
            tuple(sorted(int(v) for v in h)): int(p)
            for h, p in self.entries.items()
        }
        object.__setattr__(self, "entries", entries)
        for h, p in entries.items():
            if len(h) != self.k + 1 or len(set(h)) != self.k + 1:
                raise ValueError(f"subset {h} must have exactly {self.k + 1} vertices")
            if h[0] < 0 or h[-1] >= self.n:
                raise ValueError(f"subset {h} outside [0, {self.n})")
            if not 0 <= p < self.q:
                raise ValueError(f"numerator for {h} must be in [0, {self.q}), got {p}")


@dataclass(frozen=True, eq=False)
class ParitySample:
    """A generated dataset plus block provenance.

    ``block_log`` records one (subset, block index, parity_fixed) triple per
    emitted block, in emission order.
    """

    dataset: Dataset
    block_log: tuple[tuple[tuple[int, ...], int, bool], ...]


@dataclass(frozen=True)
class RealizationReport:
    """Biases realizing a weight target, with the scaling and rounding error.

    ``scale`` is the constant c such that the induced weights approximate
    c * target; ``per_set_error`` maps each (k+1)-subset to the difference
    (induced weight) - c * (target weight).
    """

    biases: TargetBiases
    scale: float
    per_set_error: dict[tuple[int, ...], float]
    total_abs_error: float


def bias_to_weight(b: float) -> float:
    """Weight (nats) of a (k+1)-subset whose parity has bias b.

    Holds when all smaller marginals are uniform; strictly increasing in b,
    with small-bias behavior b^2/2 + O(b^4).
    """
    if not 0.0 <= b < 1.0:
        raise ValueError(f"bias must be in [0, 1), got {b}")
    return 0.5 * ((1.0 + b) * math.log1p(b) + (1.0 - b) * math.log1p(-b))


def weight_to_bias(w: float) -> float:
    """Inverse of bias_to_weight, by bisection to absolute tolerance 1e-12."""
    if w == 0.0:
        return 0.0
    cap = bias_to_weight(BIAS_CAP)
    if not 0.0 <= w < cap:
        raise ValueError(f"weight must be in [0, {cap:.6f}), got {w}")
    lo, hi = 0.0, BIAS_CAP
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if bias_to_weight(mid) < w:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _cube(n: int) -> np.ndarray:
    codes = np.arange(1 << n, dtype=np.int64)
    return ((codes[:, None] >> np.arange(n)) & 1).astype(np.int64)


def generate(tb: TargetBiases, cube_limit: int = DEFAULT_CUBE_LIMIT) -> ParitySample:
    """Build the pooled sample realizing a TargetBiases prescription.

    For every (k+1)-subset h (including those with numerator zero) emits q
    blocks of 2^n rows: q - p_h full cubes and p_h odd-parity slices (each
    odd vector twice). Pooling keeps every marginal of size <= k exactly
    uniform and gives parity of h the exact bias (p_h / q) / C(n, k+1).
    """
    if tb.n > cube_limit:
        raise GuardLimitError(
            f"parity generation refused: n={tb.n} exceeds cube limit "
            f"{cube_limit} (blocks have 2^n rows)"
        )
    cube = _cube(tb.n)
    blocks: list[np.ndarray] = []
    log: list[tuple[tuple[int, ...], int, bool]] = []
    for h in itertools.combinations(range(tb.n), tb.k + 1):
        p = tb.entries.get(h, 0)
        odd = cube[cube[:, h].sum(axis=1) % 2 == 1]
        odd_block = np.concatenate([odd, odd])
        for b in range(tb.q):
            fixed = b >= tb.q - p
            blocks.append(odd_block if fixed else cube)
            log.append((h, b, fixed))
    rows = np.concatenate(blocks)
    specs = tuple(VariableSpec(f"x{i}", 2) for i in range(tb.n))
    return ParitySample(dataset=Dataset(specs, rows), block_log=tuple(log))


def realize_weights(
    targets: dict[tuple[int, ...], float],
    n: int,
    k: int,
    q_grid: int,
    scale: float | None = None,
) -> RealizationReport:
    """Round a non-negative weight target into realizable rational biases.

    Targets are scaled by c (chosen so the largest bias lands on the last
    grid point, or supplied explicitly), inverted through bias_to_weight,
    and rounded to the q_grid denominator. The report carries the per-subset
    difference between the induced weight and c times the target.
    """
    targets = {
        tuple(sorted(int(v) for v in h)): float(w) for h, w in targets.items()
    }
    for h, w in targets.items():
        if len(h) != k + 1:
            raise ValueError(f"target subset {h} must have {k + 1} vertices")
        if not (w >= 0.0 and math.isfinite(w)):
            raise ValueError(f"target weight for {h} must be finite and >= 0")
    n_sets = math.comb(n, k + 1)
    max_w = max(targets.values(), default=0.0)
    if scale is None:
        if max_w == 0.0:
            scale = 1.0
        else:
            if q_grid < 2:
                worst = max(targets, key=targets.get)
                raise ValueError(
                    f"infeasible scaling: denominator {q_grid} cannot encode a "
                    f"nonzero bias for subset {worst}"
                )
            r_cap = (q_grid - 1) / q_grid
            scale = bias_to_weight(r_cap / n_sets) / max_w
    entries: dict[tuple[int, ...], int] = {}
    errors: dict[tuple[int, ...], float] = {}
    for h in itertools.combinations(range(n), k + 1):
        w = targets.get(h, 0.0)
        r = weight_to_bias(scale * w) * n_sets
        if r >= 1.0:
            raise ValueError(
                f"infeasible scaling: subset {h} needs per-set bias {r:.6f} >= 1"
            )
        p = round(r * q_grid)
        if p >= q_grid:
            raise ValueError(
                f"infeasible scaling: subset {h} rounds to numerator {p} >= {q_grid}"
            )
        if p:
            entries[h] = p
        errors[h] = bias_to_weight((p / q_grid) / n_sets) - scale * w
    tb = TargetBiases(k=k, n=n, q=q_grid, entries=entries)
    return RealizationReport(
        biases=tb,
        scale=scale,
        per_set_error=errors,
        total_abs_error=float(sum(abs(e) for e in errors.values())),
    )


def biases_to_dict(tb: TargetBiases) -> dict:
    items = sorted(tb.entries.items())
    return {
        "k": tb.k,
        "n": tb.n,
        "Q": tb.q,
        "biases": [{"vars": list(h), "p": p} for h, p in items],
    }


def biases_from_dict(doc: dict) -> TargetBiases:
    return TargetBiases(
        k=int(doc["k"]),
        n=int(doc["n"]),
        q=int(doc["Q"]),
        entries={
            tuple(entry["vars"]): int(entry["p"]) for entry in doc["biases"]
        },
    )


def dump_biases(tb: TargetBiases, target) -> None:
    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8") as fh:
            dump_biases(tb, fh)
        return
    json.dump(biases_to_dict(tb), target, indent=2)
    target.write("\n")


def load_biases(source) -> TargetBiases:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return load_biases(fh)
    return biases_from_dict(json.load(source))
