"""Canonical set partitions of [n] and the sublattices the cumulant calculi run over."""

from __future__ import annotations

import enum
import functools
import itertools
from collections.abc import Hashable, Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import click

from cumulanttools.common import InvalidInput, echo_json, format_rational


class PartitionError(InvalidInput):
    """Malformed, non-canonical or mismatched partitions."""


class LatticeFamily(str, enum.Enum):
    ALL = "all"
    PAIR = "pair"
    NONCROSSING = "noncrossing"
    INTERVAL = "interval"
    NONCROSSING_PAIR = "noncrossing-pair"
    INTERVAL_PAIR = "interval-pair"

    def contains(self, p: Partition) -> bool:
        """Membership predicate; agrees with ``enumerate_family``."""
        if self is LatticeFamily.ALL:
            return True
        if self is LatticeFamily.PAIR:
            return is_pair(p)
        if self is LatticeFamily.NONCROSSING:
            return is_noncrossing(p)
        if self is LatticeFamily.INTERVAL:
            return is_interval(p)
        if self is LatticeFamily.NONCROSSING_PAIR:
            return is_pair(p) and is_noncrossing(p)
        return is_pair(p) and is_interval(p)

    @property
    def pair_family(self) -> LatticeFamily:
        """The pair-partition sublattice of this family."""
        return {
            LatticeFamily.ALL: LatticeFamily.PAIR,
            LatticeFamily.PAIR: LatticeFamily.PAIR,
            LatticeFamily.NONCROSSING: LatticeFamily.NONCROSSING_PAIR,
            LatticeFamily.NONCROSSING_PAIR: LatticeFamily.NONCROSSING_PAIR,
            LatticeFamily.INTERVAL: LatticeFamily.INTERVAL_PAIR,
            LatticeFamily.INTERVAL_PAIR: LatticeFamily.INTERVAL_PAIR,
        }[self]


@dataclass(frozen=True, slots=True)
class Partition:
    """
    A set partition of {1..n} in canonical form.

    Blocks are ascending tuples ordered by their minima, so two equal
    partitions compare and hash equal and ``str`` round-trips through
    ``Partition.parse``.
    """

    n: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.n < 0:
            raise PartitionError("partition size must be non-negative.")
        seen: list[int] = []
        previous_min = 0
        for block in self.blocks:
            if not block:
                raise PartitionError("partition blocks must be non-empty.")
            if any(b <= a for a, b in zip(block, block[1:])):
                raise PartitionError(f"block {block} is not strictly ascending.")
            if block[0] <= previous_min:
                raise PartitionError("blocks must be ordered by their minimum element.")
            previous_min = block[0]
            seen.extend(block)
        if sorted(seen) != list(range(1, self.n + 1)):
            raise PartitionError(
                f"blocks {self.blocks} do not partition {{1..{self.n}}}."
            )

    @classmethod
    def _trusted(cls, n: int, blocks: tuple[tuple[int, ...], ...]) -> Partition:
        obj = object.__new__(cls)
        object.__setattr__(obj, "n", n)
        object.__setattr__(obj, "blocks", blocks)
        return obj

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], n: int | None = None) -> Partition:
        """Build a partition from blocks in any order, normalising to canonical form."""
        normalised = tuple(sorted(tuple(sorted(block)) for block in blocks))
        size = sum(len(block) for block in normalised) if n is None else n
        return cls(size, normalised)

    @classmethod
    def parse(cls, text: str) -> Partition:
        """Parse ``"1,3|2"``; canonical order is required."""
        stripped = text.strip()
        if not stripped:
            return cls(0, ())
        blocks: list[tuple[int, ...]] = []
        for raw_block in stripped.split("|"):
            elements = []
            for raw in raw_block.split(","):
                raw = raw.strip()
                if not raw.isdigit() or int(raw) < 1:
                    raise PartitionError(
                        f"partition elements must be positive integers, got {raw!r} in {text!r}."
                    )
                elements.append(int(raw))
            blocks.append(tuple(elements))
        size = sum(len(block) for block in blocks)
        return cls(size, tuple(blocks))

    @classmethod
    def from_json(cls, data: object) -> Partition:
        if not isinstance(data, list) or not all(isinstance(b, list) for b in data):
            raise PartitionError("partition JSON must be an array of arrays.")
        blocks = []
        for block in data:
            if not all(isinstance(e, int) and not isinstance(e, bool) for e in block):
                raise PartitionError("partition JSON elements must be integers.")
            blocks.append(tuple(block))
        return cls(sum(len(block) for block in blocks), tuple(blocks))

    def to_json(self) -> list[list[int]]:
        return [list(block) for block in self.blocks]

    def __str__(self) -> str:
        return "|".join(",".join(str(e) for e in block) for block in self.blocks)

    def labels(self) -> tuple[int, ...]:
        """Restricted growth string: the block index of every element."""
        out = [0] * self.n
        for index, block in enumerate(self.blocks):
            for element in block:
                out[element - 1] = index
        return tuple(out)

    def block_sizes(self) -> tuple[int, ...]:
        return tuple(len(block) for block in self.blocks)


def top(n: int) -> Partition:
    return Partition._trusted(n, (tuple(range(1, n + 1)),) if n else ())


def bottom(n: int) -> Partition:
    return Partition._trusted(n, tuple((i,) for i in range(1, n + 1)))


def consecutive_pairs(m: int) -> Partition:
    """1,2|3,4|...|2m-1,2m."""
    return Partition._trusted(2 * m, tuple((2 * k + 1, 2 * k + 2) for k in range(m)))


def lukacs_grouping(m: int) -> Partition:
    """1|2|...|m-2|m-1,m: the last two positions multiplied together."""
    if m < 2:
        raise PartitionError("the product grouping needs at least two positions.")
    return Partition._trusted(
        m, tuple((i,) for i in range(1, m - 1)) + ((m - 1, m),)
    )


def _from_labels(labels: Sequence[int]) -> Partition:
    grouped: dict[int, list[int]] = {}
    for position, label in enumerate(labels, start=1):
        grouped.setdefault(label, []).append(position)
    blocks = tuple(sorted(tuple(block) for block in grouped.values()))
    return Partition._trusted(len(labels), blocks)


def kernel(h: Sequence[Hashable]) -> Partition:
    """ker h: positions i, j share a block iff h(i) == h(j)."""
    if not h:
        raise PartitionError("kernel needs a non-empty label tuple.")
    first_seen: dict[Hashable, int] = {}
    return _from_labels([first_seen.setdefault(v, len(first_seen)) for v in h])


def _check_sizes(p: Partition, q: Partition) -> None:
    if p.n != q.n:
        raise PartitionError(f"partition sizes differ: {p.n} != {q.n}.")


def join(p: Partition, q: Partition) -> Partition:
    """Lattice supremum: transitive closure of block overlap."""
    _check_sizes(p, q)
    parent = list(range(p.n + 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for block in itertools.chain(p.blocks, q.blocks):
        root = find(block[0])
        for element in block[1:]:
            other = find(element)
            if other != root:
                parent[other] = root
    return _from_labels([find(i) for i in range(1, p.n + 1)])


def meet(p: Partition, q: Partition) -> Partition:
    """Lattice infimum: the nonempty pairwise block intersections."""
    _check_sizes(p, q)
    first_seen: dict[tuple[int, int], int] = {}
    return _from_labels(
        [first_seen.setdefault(pair, len(first_seen)) for pair in zip(p.labels(), q.labels())]
    )


def leq(p: Partition, q: Partition) -> bool:
    """Refinement order: every block of p lies inside a block of q."""
    _check_sizes(p, q)
    q_labels = q.labels()
    return all(
        all(q_labels[e - 1] == q_labels[block[0] - 1] for e in block[1:])
        for block in p.blocks
    )


def is_pair(p: Partition) -> bool:
    return all(len(block) == 2 for block in p.blocks)


def is_interval(p: Partition) -> bool:
    return all(block[-1] - block[0] + 1 == len(block) for block in p.blocks)


def _blocks_cross(first: tuple[int, ...], second: tuple[int, ...]) -> bool:
    # Merge both blocks and collapse runs; an a<b<c<d alternation needs 4 runs.
    merged = sorted([(e, 0) for e in first] + [(e, 1) for e in second])
    runs = 1
    for (_, left), (_, right) in zip(merged, merged[1:]):
        if left != right:
            runs += 1
            if runs >= 4:
                return True
    return False


def is_noncrossing(p: Partition) -> bool:
    return not any(
        _blocks_cross(first, second)
        for first, second in itertools.combinations(p.blocks, 2)
    )


def crossing_number(p: Partition) -> int:
    """Number of crossing block pairs {a,c},{b,d} with a<b<c<d."""
    if not is_pair(p):
        raise PartitionError(f"crossing_number needs a pair partition, got {p}.")
    count = 0
    for (a, c), (b, d) in itertools.combinations(p.blocks, 2):
        if a < b < c < d:
            count += 1
    return count


def mobius_to_top(p: Partition) -> Fraction:
    """
    mu(p, 1) in the partition lattice.

    [p, 1] is isomorphic to the full lattice on the blocks of p, so the value
    is (-1)^(k-1) (k-1)! for k blocks.
    """
    k = len(p.blocks)
    if k == 0:
        return Fraction(1)
    return Fraction((-1) ** (k - 1) * factorial(k - 1))


def count_kernel_maps(p: Partition, N: int) -> int:
    """Number of maps [n] -> [N] whose kernel is exactly p."""
    if N < 0:
        raise PartitionError("label pool size must be non-negative.")
    count = 1
    for i in range(len(p.blocks)):
        count *= N - i
        if count <= 0:
            return 0
    return count


def without_singletons(p: Partition) -> Partition:
    """Drop singleton blocks and renumber the remaining elements."""
    kept = sorted(e for block in p.blocks if len(block) > 1 for e in block)
    renumber = {e: i for i, e in enumerate(kept, start=1)}
    return Partition._trusted(
        len(kept),
        tuple(
            tuple(renumber[e] for e in block) for block in p.blocks if len(block) > 1
        ),
    )


# --- enumeration -----------------------------------------------------------


def _all_partitions(n: int) -> list[Partition]:
    # Restricted growth strings in lexicographic order, iteratively.
    if n == 0:
        return [Partition._trusted(0, ())]
    rgs = [0] * n
    prefix_max = [0] * n
    out: list[Partition] = []
    while True:
        out.append(_from_labels(rgs))
        i = n - 1
        while i > 0 and rgs[i] > prefix_max[i]:
            i -= 1
        if i == 0:
            return out
        rgs[i] += 1
        running = max(prefix_max[i], rgs[i])
        for j in range(i + 1, n):
            rgs[j] = 0
            prefix_max[j] = running


def _pairings(n: int) -> list[Partition]:
    # Smallest unmatched element first, explicit stack instead of recursion.
    if n % 2:
        return []
    out: list[Partition] = []
    stack: list[tuple[tuple[tuple[int, int], ...], tuple[int, ...]]] = [
        ((), tuple(range(1, n + 1)))
    ]
    while stack:
        pairs, rest = stack.pop()
        if not rest:
            out.append(Partition._trusted(n, pairs))
            continue
        first, others = rest[0], rest[1:]
        for index in reversed(range(len(others))):
            stack.append(
                (pairs + ((first, others[index]),), others[:index] + others[index + 1 :])
            )
    return out


@functools.lru_cache(maxsize=None)
def _noncrossing_blocks(lo: int, hi: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """Noncrossing partitions of the interval [lo, hi] as block lists."""
    if lo > hi:
        return ((),)
    out: list[tuple[tuple[int, ...], ...]] = []
    rest = range(lo + 1, hi + 1)
    for size in range(hi - lo + 1):
        for chosen in itertools.combinations(rest, size):
            block = (lo, *chosen)
            bounds = (*block, hi + 1)
            gaps = [
                _noncrossing_blocks(bounds[i] + 1, bounds[i + 1] - 1)
                for i in range(len(block))
            ]
            for combo in itertools.product(*gaps):
                out.append((block, *(b for part in combo for b in part)))
    return tuple(out)


@functools.lru_cache(maxsize=None)
def _noncrossing_pair_blocks(lo: int, hi: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    if lo > hi:
        return ((),)
    out: list[tuple[tuple[int, int], ...]] = []
    for partner in range(lo + 1, hi + 1, 2):
        for inner in _noncrossing_pair_blocks(lo + 1, partner - 1):
            for outer in _noncrossing_pair_blocks(partner + 1, hi):
                out.append(((lo, partner), *inner, *outer))
    return tuple(out)


def _interval_partitions(n: int) -> list[Partition]:
    if n == 0:
        return [Partition._trusted(0, ())]
    out = []
    for cuts in range(2 ** (n - 1)):
        blocks: list[tuple[int, ...]] = []
        start = 1
        for position in range(1, n):
            if cuts >> (position - 1) & 1:
                blocks.append(tuple(range(start, position + 1)))
                start = position + 1
        blocks.append(tuple(range(start, n + 1)))
        out.append(Partition._trusted(n, tuple(blocks)))
    return out


def _canonical(n: int, block_lists: Iterable[tuple[tuple[int, ...], ...]]) -> list[Partition]:
    return [Partition._trusted(n, tuple(sorted(blocks))) for blocks in block_lists]


@functools.lru_cache(maxsize=64)
def _enumerate_cached(family: LatticeFamily, n: int) -> tuple[Partition, ...]:
    if family is LatticeFamily.ALL:
        found = _all_partitions(n)
    elif family is LatticeFamily.PAIR:
        found = _pairings(n)
    elif family is LatticeFamily.NONCROSSING:
        found = _canonical(n, _noncrossing_blocks(1, n))
    elif family is LatticeFamily.NONCROSSING_PAIR:
        found = _canonical(n, _noncrossing_pair_blocks(1, n)) if n % 2 == 0 else []
    elif family is LatticeFamily.INTERVAL:
        found = _interval_partitions(n)
    else:
        found = (
            [Partition._trusted(n, tuple((k, k + 1) for k in range(1, n, 2)))]
            if n % 2 == 0
            else []
        )
    return tuple(sorted(found, key=Partition.labels))


def enumerate_family(family: LatticeFamily, n: int) -> list[Partition]:
    """
    All members of ``family`` on [n], duplicate-free, in lexicographic order of
    their restricted growth strings (the order of ``enumerate_family(ALL, n)``).
    """
    if n < 0:
        raise PartitionError("n must be non-negative.")
    return list(_enumerate_cached(LatticeFamily(family), n))


def iter_family(family: LatticeFamily, n: int) -> tuple[Partition, ...]:
    """Shared immutable enumeration for hot loops."""
    if n < 0:
        raise PartitionError("n must be non-negative.")
    return _enumerate_cached(LatticeFamily(family), n)


def connecting_partitions(grouping: Partition, family: LatticeFamily) -> list[Partition]:
    """Members rho of ``family`` on the same ground set with rho v grouping = 1."""
    return [
        rho
        for rho in iter_family(family, grouping.n)
        if len(join(rho, grouping).blocks) <= 1
    ]


def product_formula_partitions(
    grouping: Partition, family: LatticeFamily, base: Partition
) -> list[Partition]:
    """Connecting partitions that additionally refine ``base``."""
    _check_sizes(grouping, base)
    return [rho for rho in connecting_partitions(grouping, family) if leq(rho, base)]


# --- cli -------------------------------------------------------------------

FAMILY_CHOICE = click.Choice([family.value for family in LatticeFamily])


def _parse_partition_arg(text: str) -> Partition:
    return Partition.parse(text)


@click.group(help="Set-partition lattice operations.")
def cli() -> None:
    """Root command group for partition utilities."""


@cli.command("enum")
@click.option("--family", type=FAMILY_CHOICE, default="all", show_default=True)
@click.option("--n", "n", type=int, required=True, help="Ground-set size.")
@click.option("--count-only", is_flag=True, help="Only report the number of members.")
def enum_command(family: str, n: int, count_only: bool) -> None:
    """Enumerate a partition family on [n]."""
    members = enumerate_family(LatticeFamily(family), n)
    if count_only:
        echo_json({"count": len(members)})
        return
    echo_json({"count": len(members), "partitions": [str(p) for p in members]})


@cli.command("mobius")
@click.argument("partition")
def mobius_command(partition: str) -> None:
    """Mobius function mu(p, 1) of the partition lattice."""
    echo_json({"value": format_rational(mobius_to_top(_parse_partition_arg(partition)))})


@cli.command("kernel")
@click.argument("labels")
def kernel_command(labels: str) -> None:
    """Kernel partition of a comma-separated label tuple."""
    echo_json({"partition": str(kernel(tuple(labels.split(","))))})


@cli.command("join")
@click.argument("first")
@click.argument("second")
def join_command(first: str, second: str) -> None:
    """Lattice join of two partitions."""
    echo_json({"partition": str(join(Partition.parse(first), Partition.parse(second)))})


@cli.command("meet")
@click.argument("first")
@click.argument("second")
def meet_command(first: str, second: str) -> None:
    """Lattice meet of two partitions."""
    echo_json({"partition": str(meet(Partition.parse(first), Partition.parse(second)))})


@cli.command("leq")
@click.argument("first")
@click.argument("second")
def leq_command(first: str, second: str) -> None:
    """Whether FIRST refines SECOND."""
    echo_json({"leq": leq(Partition.parse(first), Partition.parse(second))})


@cli.command("crossings")
@click.argument("partition")
def crossings_command(partition: str) -> None:
    """Noncrossing test, plus the crossing number for pair partitions."""
    p = Partition.parse(partition)
    echo_json(
        {
            "noncrossing": is_noncrossing(p),
            "crossing_number": crossing_number(p) if is_pair(p) else None,
        }
    )


@cli.command("kernel-maps")
@click.argument("partition")
@click.option("--N", "pool", type=int, required=True, help="Label pool size.")
def kernel_maps_command(partition: str, pool: int) -> None:
    """Number of maps [n] -> [N] with the given kernel."""
    echo_json({"count": count_kernel_maps(Partition.parse(partition), pool)})


@cli.command("connect")
@click.option("--grouping", required=True, help="Base partition, e.g. '1,2|3,4'.")
@click.option("--family", type=FAMILY_CHOICE, default="pair", show_default=True)
def connect_command(grouping: str, family: str) -> None:
    """Members of a family whose join with the grouping is the top partition."""
    found = connecting_partitions(Partition.parse(grouping), LatticeFamily(family))
    echo_json({"count": len(found), "partitions": [str(p) for p in found]})
