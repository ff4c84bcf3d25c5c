"""Clique weight functions over vertex subsets.

The weight of a subset is an alternating sum of marginal entropies of the
target distribution: singletons carry negative entropy, pairs carry mutual
information, and larger subsets correct for the overcounting of dependence
already captured by their sub-cliques. Summed over all cliques of a
triangulated graph (singletons excluded), these weights measure how much the
graph reduces divergence from the fully independent baseline, which is what
the solvers maximize.

Two equivalent formulas are implemented: a bottom-up recursion
(``compute_weights``) and a direct inclusion-exclusion sum
(``weight_inclusion_exclusion``) kept as an independent cross-check.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path

from . import dataset as ds

__all__ = [
    "WeightFunction",
    "compute_weights",
    "weight_inclusion_exclusion",
    "attachment_gain",
    "monotone_deficit",
    "weights_to_dict",
    "weights_from_dict",
    "dump_weights",
    "load_weights",
]

SINGLETON_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class WeightFunction:
    """Real-valued weights (nats) on all vertex subsets of size 1..k+1.

    Keys of ``weights`` are sorted vertex tuples. Treat as immutable after
    construction; all operations on it are pure.
    """

    k: int
    n: int
    weights: dict[tuple[int, ...], float]

    def __post_init__(self):
        if self.k < 1 or self.n < 1:
            raise ValueError("need k >= 1 and n >= 1")
        expected = sum(
            _comb(self.n, s) for s in range(1, min(self.k + 1, self.n) + 1)
        )
        if len(self.weights) != expected:
            raise ValueError(
                f"weight domain has {len(self.weights)} subsets, expected "
                f"{expected} (all sizes 1..{self.k + 1} of {self.n} vertices)"
            )
        for size in range(1, min(self.k + 1, self.n) + 1):
            for h in itertools.combinations(range(self.n), size):
                if h not in self.weights:
                    raise ValueError(f"missing weight for subset {h}")
        for v in range(self.n):
            if self.weights[(v,)] > SINGLETON_TOL:
                raise ValueError(
                    f"singleton weight for vertex {v} is positive: "
                    f"{self.weights[(v,)]}"
                )

    def __getitem__(self, subset) -> float:
        key = tuple(sorted(int(v) for v in subset))
        try:
            return self.weights[key]
        except KeyError:
            raise ValueError(f"no weight entry for subset {key}") from None


def _comb(n: int, r: int) -> int:
    import math

    return math.comb(n, r)


def compute_weights(provider, k: int) -> WeightFunction:
    """Weights for all subsets of size 1..k+1, built bottom-up by size.

    w(h) = -H(h) - sum of w over all proper nonempty subsets of h, so that
    the weights of all nonempty subsets of h telescope to -H(h).
    """
    n = provider.n_vars
    if not 1 <= k <= n - 1:
        raise ValueError(f"need 1 <= k <= n-1; got k={k}, n={n}")
    w: dict[tuple[int, ...], float] = {}
    for size in range(1, k + 2):
        for h in itertools.combinations(range(n), size):
            acc = -ds.scope_entropy(provider, h)
            for sub_size in range(1, size):
                for hp in itertools.combinations(h, sub_size):
                    acc -= w[hp]
            w[h] = acc
    return WeightFunction(k=k, n=n, weights=w)


def weight_inclusion_exclusion(provider, h) -> float:
    """The same weight as an alternating entropy sum over subsets of h.

    w(h) = -sum over nonempty subsets h' of h of (-1)^(|h|-|h'|) H(h').
    Serves as an independent oracle for the recursion in compute_weights.
    """
    h = tuple(sorted(int(v) for v in h))
    if not h:
        raise ValueError("subset must be nonempty")
    total = 0.0
    for size in range(1, len(h) + 1):
        sign = (-1) ** (len(h) - size)
        for hp in itertools.combinations(h, size):
            total -= sign * ds.scope_entropy(provider, hp)
    return total


def attachment_gain(wf: WeightFunction, h, v: int) -> float:
    """Sum of weights of all subsets of h that contain v and have size >= 2.

    This is the total-weight change from extending a graph whose cliques are
    the subsets of h minus v to one whose cliques are the subsets of h; for
    weights computed from a distribution it equals I(X_v; X_{h minus v}) and
    is therefore nonnegative up to rounding.
    """
    h = tuple(sorted(int(x) for x in h))
    v = int(v)
    if v not in h:
        raise ValueError(f"vertex {v} not in subset {h}")
    if len(h) < 2:
        raise ValueError("subset must have at least 2 vertices")
    rest = tuple(x for x in h if x != v)
    total = 0.0
    for size in range(1, len(rest) + 1):
        for sub in itertools.combinations(rest, size):
            total += wf[tuple(sorted(sub + (v,)))]
    return total


def monotone_deficit(wf: WeightFunction, h, v: int) -> float:
    """Raw sum of weights of all subsets of h containing v (singleton too).

    Equals H(X_{h minus v}) - H(X_h), i.e. minus the conditional entropy of
    X_v given the rest of h; always <= 0 up to rounding for weights computed
    from a distribution.
    """
    h = tuple(sorted(int(x) for x in h))
    v = int(v)
    if v not in h:
        raise ValueError(f"vertex {v} not in subset {h}")
    if len(h) < 2:
        raise ValueError("subset must have at least 2 vertices")
    return attachment_gain(wf, h, v) + wf[(v,)]


def weights_to_dict(wf: WeightFunction) -> dict:
    """Serializable weight dump, sorted by (size, lexicographic vertices)."""
    items = sorted(wf.weights.items(), key=lambda kv: (len(kv[0]), kv[0]))
    return {
        "k": wf.k,
        "n": wf.n,
        "log_base": "e",
        "weights": [{"vars": list(h), "w": float(w)} for h, w in items],
    }


def weights_from_dict(doc: dict) -> WeightFunction:
    """Parse a weight dump; subsets absent from the file get weight 0.

    Zero-filling lets externally supplied instances (e.g. weights only on
    pairs) omit the rest of the domain.
    """
    if doc.get("log_base", "e") != "e":
        raise ValueError(f"unsupported log base {doc.get('log_base')!r}")
    k = int(doc["k"])
    n = int(doc["n"])
    w: dict[tuple[int, ...], float] = {}
    for size in range(1, min(k + 1, n) + 1):
        for h in itertools.combinations(range(n), size):
            w[h] = 0.0
    for entry in doc["weights"]:
        h = tuple(sorted(int(v) for v in entry["vars"]))
        if h not in w:
            raise ValueError(f"subset {h} outside the size-1..{k + 1} domain")
        w[h] = float(entry["w"])
    return WeightFunction(k=k, n=n, weights=w)


def dump_weights(wf: WeightFunction, target) -> None:
    """Write a weight dump as JSON to a path or open text stream."""
    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8") as fh:
            dump_weights(wf, fh)
        return
    json.dump(weights_to_dict(wf), target, indent=2)
    target.write("\n")


def load_weights(source) -> WeightFunction:
    """Read a weight dump from a path or open text stream."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return load_weights(fh)
    return weights_from_dict(json.load(source))
