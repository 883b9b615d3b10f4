"""k-node induced-subgraph census over directed sentence graphs.

Isomorphism classes of small digraphs are identified by a permutation-minimal
signature: the k x k adjacency matrix is flattened row-major into a k^2-bit
integer (first bit most significant, diagonal always zero) and the minimum
value over all k! node relabelings is kept. Exhausting the permutations is
affordable for k <= 6 (at most 720) and makes equality of signatures exactly
equivalent to digraph isomorphism.

Two mining modes exist because strided sliding windows and a plain span
filter disagree near window boundaries:

* ``strided``: windows of up to w consecutive sentence positions advance by
  w - k + 1; every k-combination inside a window is tallied. Consecutive
  windows overlap by k - 1 positions, so no combination is counted twice.
* ``exhaustive``: every k-subset whose position span (max - min) is at most
  w is tallied exactly once, regardless of window placement.

Both modes count induced subgraphs, including disconnected patterns.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import ValidationError
from .sentgraph import SentenceGraph

MAX_K = 6

MODES = ("strided", "exhaustive")


@dataclass(frozen=True, order=True)
class Signature:
    """Isomorphism-class identifier of a directed graph on k nodes."""

    k: int
    bits: int

    def encode(self) -> str:
        """Serialize as "k:hex", zero-padded to ceil(k^2 / 4) digits."""
        width = (self.k * self.k + 3) // 4
        return f"{self.k}:{self.bits:0{width}x}"

    @staticmethod
    def parse(text: str) -> "Signature":
        try:
            k_part, bits_part = text.split(":")
            sig = Signature(int(k_part), int(bits_part, 16))
        except ValueError as exc:
            raise ValidationError(f"bad signature string {text!r}") from exc
        if not 1 <= sig.k <= MAX_K or sig.bits < 0 or sig.bits >= 1 << (sig.k * sig.k):
            raise ValidationError(f"bad signature string {text!r}")
        return sig

    def edges(self) -> tuple[tuple[int, int], ...]:
        """Decode the canonical adjacency back to 1-based directed edges."""
        k, n2 = self.k, self.k * self.k
        out = []
        for p in range(n2):
            if (self.bits >> (n2 - 1 - p)) & 1:
                out.append((p // k + 1, p % k + 1))
        return tuple(out)

    def describe(self) -> str:
        arcs = ",".join(f"{u}->{v}" for u, v in self.edges())
        return f"{self.k}n[{arcs or 'empty'}]"


@lru_cache(maxsize=None)
def _bit_permutations(k: int) -> tuple[tuple[int, ...], ...]:
    """For each node permutation, where each of the k^2 adjacency bits moves."""
    maps = []
    for perm in itertools.permutations(range(k)):
        move = [0] * (k * k)
        for i in range(k):
            for j in range(k):
                move[i * k + j] = perm[i] * k + perm[j]
        maps.append(tuple(move))
    return tuple(maps)


_CANON_CACHE: dict[tuple[int, int], int] = {}


def _canonical_bits(k: int, mask: int) -> int:
    key = (k, mask)
    hit = _CANON_CACHE.get(key)
    if hit is not None:
        return hit
    top = k * k - 1
    positions = [p for p in range(k * k) if (mask >> (top - p)) & 1]
    best = mask
    for move in _bit_permutations(k):
        out = 0
        for p in positions:
            out |= 1 << (top - move[p])
        if out < best:
            best = out
    _CANON_CACHE[key] = best
    return best


def canonical_signature(k: int, edges) -> Signature:
    """Minimal row-major adjacency encoding over all k! node relabelings.

    Edges are 1-based (u, v) pairs on nodes 1..k; self-loops are rejected.
    """
    if not 1 <= k <= MAX_K:
        raise ValidationError(
            f"k={k} unsupported: permutation canonicalization is limited to k <= {MAX_K}"
        )
    top = k * k - 1
    mask = 0
    for u, v in set(edges):
        if not (1 <= u <= k and 1 <= v <= k):
            raise ValidationError(f"edge ({u},{v}) out of range for k={k}")
        if u == v:
            raise ValidationError(f"self-loop ({u},{v}) is not allowed")
        mask |= 1 << (top - ((u - 1) * k + (v - 1)))
    return Signature(k, _canonical_bits(k, mask))


def count_dag_classes(k: int) -> int:
    """Distinct isomorphism classes among all forward-edge graphs on k nodes.

    Enumerates every subset of the k(k-1)/2 forward slots and counts distinct
    canonical signatures; equals the number of unlabeled DAGs on k nodes
    (2, 6, 31, 302 for k = 2..5).
    """
    if not 2 <= k <= 5:
        raise ValidationError(f"count_dag_classes supports 2 <= k <= 5, got {k}")
    slots = [(u, v) for u in range(1, k + 1) for v in range(u + 1, k + 1)]
    seen: set[Signature] = set()
    for pick in range(1 << len(slots)):
        edges = [slots[t] for t in range(len(slots)) if (pick >> t) & 1]
        seen.add(canonical_signature(k, edges))
    return len(seen)


@dataclass(frozen=True)
class CensusConfig:
    k: int
    w: int
    mode: str = "strided"

    def __post_init__(self):
        if not 2 <= self.k <= MAX_K:
            raise ValidationError(f"k must lie in 2..{MAX_K}, got {self.k}")
        if self.w < self.k:
            raise ValidationError(f"window w={self.w} must be >= k={self.k}")
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass
class SubgraphSet:
    """Frequency table of canonical k-node patterns mined from one graph."""

    k: int
    counts: dict[Signature, int] = field(default_factory=dict)

    def total(self) -> int:
        return sum(self.counts.values())


def mine_subgraphs(graph: SentenceGraph, cfg: CensusConfig) -> SubgraphSet:
    """Tally canonical signatures of induced k-node subgraphs.

    Node combinations come out of itertools.combinations in ascending order,
    so only forward adjacency checks are needed on sentence graphs.
    """
    k, w = cfg.k, cfg.w
    edges = graph.edges
    top = k * k - 1
    counts: dict[Signature, int] = {}

    def tally(combo: tuple[int, ...]) -> None:
        mask = 0
        for a in range(k):
            u = combo[a]
            for b in range(a + 1, k):
                if (u, combo[b]) in edges:
                    mask |= 1 << (top - (a * k + b))
        sig = Signature(k, _canonical_bits(k, mask))
        counts[sig] = counts.get(sig, 0) + 1

    n = graph.n
    if cfg.mode == "strided":
        stride = w - k + 1
        i = 0
        while i < n - k + 1:
            window = range(i + 1, min(i + w, n) + 1)
            for combo in itertools.combinations(window, k):
                tally(combo)
            i += stride
    else:
        for combo in itertools.combinations(range(1, n + 1), k):
            if combo[-1] - combo[0] <= w:
                tally(combo)
    return SubgraphSet(k=k, counts=counts)


def census_record(doc_id: str, subgraphs: SubgraphSet) -> dict:
    """Cache row: {"id", "k", "counts"} with keys in signature order."""
    counts = {sig.encode(): count for sig, count in sorted(subgraphs.counts.items())}
    return {"id": doc_id, "k": subgraphs.k, "counts": counts}


def census_from_record(record: dict) -> tuple[str, SubgraphSet]:
    try:
        doc_id = record["id"]
        k = int(record["k"])
        counts = {Signature.parse(s): int(c) for s, c in record["counts"].items()}
    except (KeyError, TypeError, AttributeError, ValueError) as exc:
        raise ValidationError(f"malformed census record: {record!r}") from exc
    for sig, count in counts.items():
        if sig.k != k:
            raise ValidationError(f"census record for '{doc_id}' mixes k={sig.k} with k={k}")
        if count < 1:
            raise ValidationError(f"census record for '{doc_id}' has non-positive count")
    return doc_id, SubgraphSet(k=k, counts=counts)
