"""The transformation semigroup S_k and its forward-Ramsey subsets.

Colors are 1-based throughout: an element of S_k is a function
``[1..k] -> [1..k]`` stored as the tuple of its images.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from itertools import product
from typing import Iterable, Mapping, Sequence

from .errors import InputError, ParseError

__all__ = [
    "SkFun",
    "RamseyPartition",
    "compose",
    "rho_of_path",
    "is_idempotent",
    "is_forward_ramsey",
    "ramsey_partition",
    "all_functions",
    "set_partitions",
]


@dataclass(frozen=True, order=True)
class SkFun:
    """A total function on ``[1..k]``; ``table[i-1]`` is the image of ``i``."""

    k: int
    table: tuple[int, ...]

    def __post_init__(self):
        if self.k < 1:
            raise InputError(f"arity must be positive, got {self.k}")
        table = tuple(int(v) for v in self.table)
        object.__setattr__(self, "table", table)
        if len(table) != self.k:
            raise InputError(f"table {table} does not have length {self.k}")
        if any(v < 1 or v > self.k for v in table):
            raise InputError(f"table {table} has entries outside [1..{self.k}]")

    @classmethod
    def identity(cls, k: int) -> "SkFun":
        return cls(k, tuple(range(1, k + 1)))

    @classmethod
    def constant(cls, k: int, c: int) -> "SkFun":
        return cls(k, (c,) * k)

    @classmethod
    def parse(cls, text: str) -> "SkFun":
        """Read the ``k:v1,...,vk`` form."""
        head, sep, body = text.strip().partition(":")
        if not sep:
            raise ParseError(f"expected 'k:v1,...,vk', got {text!r}")
        try:
            k = int(head)
            values = tuple(int(v) for v in body.split(",")) if body else ()
        except ValueError:
            raise ParseError(f"non-integer entry in {text!r}") from None
        return cls(k, values)

    def __call__(self, color: int) -> int:
        return self.table[color - 1]

    def __str__(self) -> str:
        return f"{self.k}:" + ",".join(map(str, self.table))

    def image(self, colors: Iterable[int]) -> frozenset[int]:
        return frozenset(self(c) for c in colors)

    def kernel(self) -> tuple[tuple[int, ...], ...]:
        """The partition of ``[1..k]`` into fibers, classes sorted by minimum."""
        fibers: dict[int, list[int]] = {}
        for i, v in enumerate(self.table, start=1):
            fibers.setdefault(v, []).append(i)
        return tuple(sorted(tuple(f) for f in fibers.values()))


def compose(f: SkFun, g: SkFun) -> SkFun:
    """Return ``f ∘ g``, the function ``i -> f(g(i))``."""
    if f.k != g.k:
        raise InputError(f"arity mismatch: {f.k} vs {g.k}")
    ft = f.table
    return SkFun(f.k, tuple(ft[v - 1] for v in g.table))


def rho_of_path(labels: Sequence[SkFun], k: int | None = None) -> SkFun:
    """Compose edge labels listed bottom-up: ``(e_1..e_s) -> ρ(e_s)∘…∘ρ(e_1)``.

    An empty sequence yields the identity, which needs ``k``.
    """
    if not labels:
        if k is None:
            raise InputError("empty label sequence needs an explicit arity")
        return SkFun.identity(k)
    if k is not None and any(f.k != k for f in labels):
        raise InputError("arity mismatch in label sequence")
    return reduce(lambda acc, f: compose(f, acc), labels[1:], labels[0])


def is_idempotent(f: SkFun) -> bool:
    return compose(f, f) == f


def is_forward_ramsey(functions: Iterable[SkFun]) -> bool:
    """True iff ``e∘f == e`` for every ordered pair, including ``e == f``."""
    fs = list(dict.fromkeys(functions))
    if len({f.k for f in fs}) > 1:
        raise InputError("mixed arities in forward-Ramsey test")
    return all(compose(e, f) == e for e in fs for f in fs)


@dataclass(frozen=True)
class RamseyPartition:
    """A partition of the colors into classes that each function collapses.

    For every recorded function ``f`` and class index ``i``, ``f`` sends the
    whole class ``classes[i]`` to ``representatives[(f, i)]``, which lies in
    that class. Class indices are 0-based; colors are 1-based.
    """

    k: int
    classes: tuple[tuple[int, ...], ...]
    representatives: Mapping[tuple[SkFun, int], int] = field(compare=False)

    def __post_init__(self):
        seen = sorted(c for cls in self.classes for c in cls)
        if seen != list(range(1, self.k + 1)) or any(not cls for cls in self.classes):
            raise InputError(f"classes {self.classes} do not partition [1..{self.k}]")

    @property
    def class_of(self) -> dict[int, int]:
        return {c: i for i, cls in enumerate(self.classes) for c in cls}

    def index(self, color: int) -> int:
        for i, cls in enumerate(self.classes):
            if color in cls:
                return i
        raise InputError(f"color {color} outside [1..{self.k}]")

    def __len__(self) -> int:
        return len(self.classes)

    def encode(self) -> str:
        """Class index per color, e.g. ``0,0,1`` for ``{{1,2},{3}}``."""
        class_of = self.class_of
        return ",".join(str(class_of[c]) for c in range(1, self.k + 1))

    @classmethod
    def decode(cls, text: str) -> "RamseyPartition":
        """Inverse of :meth:`encode` (representatives are not carried)."""
        labels = [int(v) for v in text.split(",")]
        groups: dict[int, list[int]] = {}
        for color, label in enumerate(labels, start=1):
            groups.setdefault(label, []).append(color)
        classes = tuple(tuple(groups[i]) for i in sorted(groups))
        return cls(len(labels), classes, {})


def _satisfies(classes, fs) -> dict | None:
    reps = {}
    for f in fs:
        for i, cls in enumerate(classes):
            images = {f(m) for m in cls}
            if len(images) != 1:
                return None
            (m_i,) = images
            if m_i not in cls:
                return None
            reps[(f, i)] = m_i
    return reps


def set_partitions(items: Sequence[int]):
    """Yield every set partition of ``items`` (restricted growth strings)."""
    n = len(items)
    if n == 0:
        yield ()
        return

    def rec(i, labels, nblocks):
        if i == n:
            blocks: list[list[int]] = [[] for _ in range(nblocks)]
            for item, lab in zip(items, labels):
                blocks[lab].append(item)
            yield tuple(tuple(b) for b in blocks)
            return
        for lab in range(nblocks + 1):
            labels.append(lab)
            yield from rec(i + 1, labels, max(nblocks, lab + 1))
            labels.pop()

    yield from rec(0, [], 0)


def _canonical(classes) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted(tuple(sorted(c)) for c in classes))


def ramsey_partition(functions: Iterable[SkFun], k: int) -> RamseyPartition:
    """Partition ``[1..k]`` so every function collapses each class into itself.

    Starts from the common kernel, merges each class with the class holding
    its image until images fall inside, and falls back to an exhaustive
    search over set partitions (finest first) if that fixpoint is invalid.
    """
    fs = sorted(set(functions))
    if any(f.k != k for f in fs):
        raise InputError(f"function arity differs from k={k}")
    if not fs:
        return RamseyPartition(k, tuple((c,) for c in range(1, k + 1)), {})

    key = {c: tuple(f(c) for f in fs) for c in range(1, k + 1)}
    groups: dict[tuple, list[int]] = {}
    for c in range(1, k + 1):
        groups.setdefault(key[c], []).append(c)
    classes = [set(g) for g in groups.values()]

    changed = True
    while changed:
        changed = False
        for f in fs:
            for cls in list(classes):
                if cls not in classes:
                    continue
                images = {f(m) for m in cls}
                if len(images) != 1:
                    continue
                (img,) = images
                if img in cls:
                    continue
                other = next(o for o in classes if img in o)
                classes.remove(cls)
                classes.remove(other)
                classes.append(cls | other)
                changed = True

    candidate = _canonical(classes)
    reps = _satisfies(candidate, fs)
    if reps is not None:
        return RamseyPartition(k, candidate, reps)

    if k > 8:
        raise InputError("no valid class partition found; input is not forward Ramsey")
    best = None
    for parts in set_partitions(list(range(1, k + 1))):
        parts = _canonical(parts)
        if _satisfies(parts, fs) is None:
            continue
        rank = (-len(parts), parts)
        if best is None or rank < best[0]:
            best = (rank, parts)
    if best is None:
        raise InputError("no valid class partition exists; input is not forward Ramsey")
    parts = best[1]
    return RamseyPartition(k, parts, _satisfies(parts, fs))


def all_functions(k: int) -> list[SkFun]:
    """Every element of S_k in lexicographic order (k^k of them)."""
    return [SkFun(k, t) for t in product(range(1, k + 1), repeat=k)]
