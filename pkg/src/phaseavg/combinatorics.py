"""Set partitions, even partitions and uniform block permutations.

Ground-set elements are stored 0-based; every text form is 1-based.  Blocks
are kept in canonical order: each block sorted, blocks sorted by their least
element.  All weights are exact Python integers.
"""

from __future__ import annotations

import math
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Iterable, Iterator, Sequence

from .errors import InvalidArgumentError

MAX_PARTITION_N = 12
MAX_UBP_N = 8


def _fmt_block(block: Sequence[int], n: int) -> str:
    if n <= 9:
        return "".join(str(x + 1) for x in block)
    return ",".join(str(x + 1) for x in block)


def _parse_block(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        raise InvalidArgumentError("empty block in partition text")
    parts = text.split(",") if "," in text else list(text)
    try:
        return tuple(int(p) - 1 for p in parts)
    except ValueError:
        raise InvalidArgumentError(f"malformed block {text!r}") from None


class SetPartition:
    """A partition of {0, ..., n-1} into non-empty blocks."""

    __slots__ = ("n", "blocks", "_block_of")

    def __init__(self, blocks: Iterable[Iterable[int]], n: int | None = None):
        bl = [tuple(sorted(int(x) for x in b)) for b in blocks]
        if any(len(b) == 0 for b in bl):
            raise InvalidArgumentError("blocks must be non-empty")
        bl.sort(key=lambda b: b[0])
        elems = [x for b in bl for x in b]
        if n is None:
            n = len(elems)
        if n < 1 or sorted(elems) != list(range(n)):
            raise InvalidArgumentError(f"blocks {bl} do not partition a ground set of size {n}")
        self.n = n
        self.blocks = tuple(bl)
        block_of = [0] * n
        for i, b in enumerate(self.blocks):
            for x in b:
                block_of[x] = i
        self._block_of = tuple(block_of)

    def block_of(self, x: int) -> int:
        """Index of the block holding element ``x``."""
        return self._block_of[x]

    def __len__(self) -> int:
        return len(self.blocks)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SetPartition) and self.blocks == other.blocks

    def __hash__(self) -> int:
        return hash(self.blocks)

    def __str__(self) -> str:
        return "|".join(_fmt_block(b, self.n) for b in self.blocks)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({str(self)!r})"

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    @property
    def type(self) -> PartitionType:
        return PartitionType.from_sizes(self.sizes)

    @property
    def is_even(self) -> bool:
        return all(len(b) % 2 == 0 for b in self.blocks)

    @classmethod
    def parse(cls, text: str) -> SetPartition:
        return cls(_parse_block(b) for b in text.split("|"))

    @classmethod
    def finest(cls, n: int) -> SetPartition:
        return cls(((i,) for i in range(n)), n)

    @classmethod
    def coarsest(cls, n: int) -> SetPartition:
        return cls([range(n)], n)


class EvenPartition(SetPartition):
    """A set partition whose blocks all have even size."""

    __slots__ = ()

    def __init__(self, blocks: Iterable[Iterable[int]], n: int | None = None):
        super().__init__(blocks, n)
        if not self.is_even:
            raise InvalidArgumentError(f"{self} has a block of odd size")


class PartitionType:
    """Integer partition of n given by multiplicities m_1, ..., m_n."""

    __slots__ = ("multiplicities",)

    def __init__(self, multiplicities: Sequence[int]):
        m = tuple(int(x) for x in multiplicities)
        if any(x < 0 for x in m):
            raise InvalidArgumentError("multiplicities must be non-negative")
        while m and m[-1] == 0:
            m = m[:-1]
        if not m:
            raise InvalidArgumentError("empty partition type")
        self.multiplicities = m

    @classmethod
    def from_sizes(cls, sizes: Iterable[int]) -> PartitionType:
        sizes = list(sizes)
        if not sizes or any(s < 1 for s in sizes):
            raise InvalidArgumentError(f"invalid part sizes {sizes}")
        m = [0] * max(sizes)
        for s in sizes:
            m[s - 1] += 1
        return cls(m)

    @property
    def n(self) -> int:
        return sum((i + 1) * m for i, m in enumerate(self.multiplicities))

    @property
    def num_blocks(self) -> int:
        return sum(self.multiplicities)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(i + 1 for i, m in enumerate(self.multiplicities) for _ in range(m))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PartitionType) and self.multiplicities == other.multiplicities

    def __hash__(self) -> int:
        return hash(self.multiplicities)

    def __str__(self) -> str:
        return " ".join(f"{i + 1}^{m}" for i, m in enumerate(self.multiplicities) if m)

    __repr__ = __str__


def integer_partitions(n: int) -> list[PartitionType]:
    """All types of partitions of an n-element set, largest parts first."""

    def rec(rest: int, cap: int) -> Iterator[list[int]]:
        if rest == 0:
            yield []
            return
        for part in range(min(rest, cap), 0, -1):
            for tail in rec(rest - part, part):
                yield [part] + tail

    if n < 1:
        raise InvalidArgumentError("n must be positive")
    return [PartitionType.from_sizes(s) for s in rec(n, n)]


def _as_type(n: int, lam: PartitionType | Sequence[int]) -> PartitionType:
    if not isinstance(lam, PartitionType):
        lam = PartitionType.from_sizes(lam)
    if lam.n != n:
        raise InvalidArgumentError(f"type {lam} is not a partition of {n}")
    return lam


def count_of_type(n: int, lam: PartitionType | Sequence[int], kind: str = "ubp") -> int:
    """Number of partitions / ordered partitions / UBPs of [n] of type ``lam``.

    ``lam`` is either a :class:`PartitionType` or the list of its part sizes.
    """
    lam = _as_type(n, lam)
    m = lam.multiplicities
    denom_sizes = math.prod(math.factorial(i + 1) ** mi for i, mi in enumerate(m))
    denom_mult = math.prod(math.factorial(mi) for mi in m)
    ordered = math.factorial(n) // denom_sizes
    if kind == "ordered":
        return ordered
    if kind == "partition":
        return ordered // denom_mult
    if kind == "ubp":
        return ordered * ordered // denom_mult
    raise InvalidArgumentError(f"unknown kind {kind!r}")


def count_ubps(n: int) -> int:
    return sum(count_of_type(n, lam, "ubp") for lam in integer_partitions(n))


def count_even_partitions(two_n: int) -> int:
    if two_n < 2 or two_n % 2:
        raise InvalidArgumentError("size must be a positive even integer")
    return sum(
        count_of_type(two_n, [2 * s for s in lam.sizes], "partition")
        for lam in integer_partitions(two_n // 2)
    )


# -- enumeration -------------------------------------------------------------


def _check_range(n: int, cap: int, what: str) -> None:
    if not isinstance(n, int) or n < 1 or n > cap:
        raise InvalidArgumentError(f"{what} requires 1 <= n <= {cap}, got {n!r}")


def enumerate_set_partitions(n: int) -> list[SetPartition]:
    """All partitions of [n] in canonical form."""
    _check_range(n, MAX_PARTITION_N, "set partition enumeration")
    out: list[SetPartition] = []
    blocks: list[list[int]] = []

    def rec(x: int) -> None:
        if x == n:
            out.append(SetPartition(blocks, n))
            return
        for b in blocks:
            b.append(x)
            rec(x + 1)
            b.pop()
        blocks.append([x])
        rec(x + 1)
        blocks.pop()

    rec(0)
    return out


def enumerate_even_partitions(two_n: int) -> list[EvenPartition]:
    """All partitions of [two_n] whose blocks have even size."""
    if not isinstance(two_n, int) or two_n % 2:
        raise InvalidArgumentError(f"even partitions need an even ground set, got {two_n!r}")
    _check_range(two_n, MAX_PARTITION_N, "even partition enumeration")

    def rec(remaining: tuple[int, ...]) -> Iterator[tuple[tuple[int, ...], ...]]:
        if not remaining:
            yield ()
            return
        first, rest = remaining[0], remaining[1:]
        for k in range(1, len(rest) + 1, 2):
            for others in combinations(rest, k):
                left = tuple(x for x in rest if x not in others)
                for tail in rec(left):
                    yield ((first,) + others,) + tail

    return [EvenPartition(p, two_n) for p in rec(tuple(range(two_n)))]


class UniformBlockPermutation:
    """A triple (alpha, beta, f) with f a size-preserving block bijection.

    ``f[k]`` is the index, in ``beta.blocks``, of the image of ``alpha.blocks[k]``.
    """

    __slots__ = ("alpha", "beta", "f")

    def __init__(self, alpha: SetPartition, beta: SetPartition, f: Sequence[int]):
        f = tuple(int(k) for k in f)
        if alpha.n != beta.n:
            raise InvalidArgumentError("alpha and beta live on different ground sets")
        if sorted(f) != list(range(len(beta))) or len(f) != len(alpha):
            raise InvalidArgumentError(f"f={f} is not a bijection between the blocks")
        for k, fk in enumerate(f):
            if len(alpha.blocks[k]) != len(beta.blocks[fk]):
                raise InvalidArgumentError("f must preserve block sizes")
        self.alpha = alpha
        self.beta = beta
        self.f = f

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[Iterable[int], Iterable[int]]], n: int | None = None):
        """Build from (alpha block, image block) pairs, in any order."""
        pairs = [(tuple(sorted(a)), tuple(sorted(b))) for a, b in pairs]
        alpha = SetPartition([a for a, _ in pairs], n)
        beta = SetPartition([b for _, b in pairs], alpha.n)
        image = {a: b for a, b in pairs}
        f = [beta.blocks.index(image[a]) for a in alpha.blocks]
        return cls(alpha, beta, f)

    @classmethod
    def parse(cls, text: str) -> UniformBlockPermutation:
        """Parse ``"12|3/23|1"``: block k of the lower row is the image of block k of the upper row."""
        try:
            top, bottom = text.split("/")
        except ValueError:
            raise InvalidArgumentError(f"malformed UBP text {text!r}") from None
        tops = [_parse_block(b) for b in top.split("|")]
        bots = [_parse_block(b) for b in bottom.split("|")]
        if len(tops) != len(bots):
            raise InvalidArgumentError(f"block counts differ in {text!r}")
        return cls.from_pairs(zip(tops, bots))

    @classmethod
    def identity(cls, alpha: SetPartition) -> UniformBlockPermutation:
        return cls(alpha, alpha, range(len(alpha)))

    @property
    def n(self) -> int:
        return self.alpha.n

    def pairs(self) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
        return [(a, self.beta.blocks[fk]) for a, fk in zip(self.alpha.blocks, self.f)]

    def image(self, k: int) -> tuple[int, ...]:
        return self.beta.blocks[self.f[k]]

    def __len__(self) -> int:
        return len(self.alpha)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, UniformBlockPermutation)
            and self.alpha == other.alpha
            and self.beta == other.beta
            and self.f == other.f
        )

    def __hash__(self) -> int:
        return hash((self.alpha, self.beta, self.f))

    def __str__(self) -> str:
        n = self.n
        top = "|".join(_fmt_block(a, n) for a in self.alpha.blocks)
        bottom = "|".join(_fmt_block(self.image(k), n) for k in range(len(self)))
        return f"{top}/{bottom}"

    def __repr__(self) -> str:
        return f"UBP({str(self)!r})"

    def inverse(self) -> UniformBlockPermutation:
        return ubp_inverse(self)

    def __matmul__(self, other: UniformBlockPermutation) -> UniformBlockPermutation:
        return ubp_compose(self, other)


UBP = UniformBlockPermutation


def enumerate_ubps(n: int) -> list[UniformBlockPermutation]:
    """Every uniform block permutation of [n], grouped by type."""
    _check_range(n, MAX_UBP_N, "UBP enumeration")
    by_type: dict[tuple[int, ...], list[SetPartition]] = defaultdict(list)
    for p in enumerate_set_partitions(n):
        by_type[tuple(sorted(p.sizes))].append(p)

    out: list[UniformBlockPermutation] = []
    for group in by_type.values():
        for alpha in group:
            a_idx: dict[int, list[int]] = defaultdict(list)
            for k, b in enumerate(alpha.blocks):
                a_idx[len(b)].append(k)
            sizes = sorted(a_idx)
            for beta in group:
                b_idx: dict[int, list[int]] = defaultdict(list)
                for k, b in enumerate(beta.blocks):
                    b_idx[len(b)].append(k)
                for perms in product(*(permutations(b_idx[s]) for s in sizes)):
                    f = [0] * len(alpha)
                    for s, perm in zip(sizes, perms):
                        for ak, bk in zip(a_idx[s], perm):
                            f[ak] = bk
                    out.append(UniformBlockPermutation(alpha, beta, f))
    return out


# -- order structure ---------------------------------------------------------


def _same_n(x, y) -> None:
    if x.n != y.n:
        raise InvalidArgumentError(f"ground sets differ: {x.n} vs {y.n}")


def refines(finer: SetPartition, coarser: SetPartition) -> bool:
    """True iff every block of ``finer`` lies inside a block of ``coarser``."""
    _same_n(finer, coarser)
    return all(len({coarser.block_of(x) for x in b}) == 1 for b in finer.blocks)


def refines_ubp(finer: UniformBlockPermutation, coarser: UniformBlockPermutation) -> bool:
    _same_n(finer, coarser)
    if not (refines(finer.alpha, coarser.alpha) and refines(finer.beta, coarser.beta)):
        return False
    for k, a in enumerate(finer.alpha.blocks):
        big = coarser.alpha.block_of(a[0])
        target = set(coarser.image(big))
        if not set(finer.image(k)) <= target:
            return False
    return True


def join(a: SetPartition, b: SetPartition) -> SetPartition:
    """Least common coarsening of two partitions."""
    _same_n(a, b)
    parent = list(range(a.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for blk in a.blocks + b.blocks:
        for x in blk[1:]:
            parent[find(x)] = find(blk[0])
    groups: dict[int, list[int]] = defaultdict(list)
    for x in range(a.n):
        groups[find(x)].append(x)
    return SetPartition(groups.values(), a.n)


def ubp_compose(g: UniformBlockPermutation, h: UniformBlockPermutation) -> UniformBlockPermutation:
    """The composite ``g o h`` (apply ``h`` first).

    Blocks of the result are the minimal unions of blocks of ``h.alpha`` whose
    image under ``h`` is a union of blocks of ``g.alpha``.
    """
    _same_n(g, h)
    k = len(h)
    parent = list(range(k))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    # link h-blocks whose images meet the same g.alpha block
    owner: dict[int, int] = {}
    for j in range(k):
        for y in h.image(j):
            gb = g.alpha.block_of(y)
            if gb in owner:
                parent[find(j)] = find(owner[gb])
            else:
                owner[gb] = j
    groups: dict[int, list[int]] = defaultdict(list)
    for j in range(k):
        groups[find(j)].append(j)

    pairs = []
    for members in groups.values():
        src = sorted(x for j in members for x in h.alpha.blocks[j])
        mid = {x for j in members for x in h.image(j)}
        g_blocks = {g.alpha.block_of(y) for y in mid}
        dst = sorted(x for gb in g_blocks for x in g.image(gb))
        pairs.append((src, dst))
    return UniformBlockPermutation.from_pairs(pairs, h.n)


def ubp_inverse(x: UniformBlockPermutation) -> UniformBlockPermutation:
    inv = [0] * len(x)
    for k, fk in enumerate(x.f):
        inv[fk] = k
    return UniformBlockPermutation(x.beta, x.alpha, inv)


# -- Moebius functions and weights -------------------------------------------


def _mu_chain(b: int) -> int:
    return (-1) ** (b - 1) * math.factorial(b - 1)


def moebius_partition(finer: SetPartition, coarser: SetPartition) -> int:
    """Moebius function of the refinement order on partitions, closed form."""
    if not refines(finer, coarser):
        raise InvalidArgumentError(f"{finer} does not refine {coarser}")
    merged = [0] * len(coarser)
    for b in finer.blocks:
        merged[coarser.block_of(b[0])] += 1
    return math.prod(_mu_chain(b) for b in merged)


def moebius_ubp(finer: UniformBlockPermutation, coarser: UniformBlockPermutation) -> int:
    if not refines_ubp(finer, coarser):
        raise InvalidArgumentError(f"{finer} is not below {coarser}")
    return moebius_partition(finer.alpha, coarser.alpha)


@lru_cache(maxsize=None)
def cf_u_block(n: int) -> int:
    """Weight of the coarsest UBP of [n]: 1, -1, 4, -33, 456, ..."""
    if n < 1:
        raise InvalidArgumentError("block size must be positive")
    return sum(
        count_of_type(n, lam, "ubp") * _mu_chain(lam.num_blocks) for lam in integer_partitions(n)
    )


@lru_cache(maxsize=None)
def cf_pi_block(two_n: int) -> int:
    """Weight of the one-block even partition of [two_n]: 1, -2, 16, -272, ..."""
    if two_n < 2 or two_n % 2:
        raise InvalidArgumentError("block size must be a positive even integer")
    total = 0
    for lam in integer_partitions(two_n // 2):
        doubled = PartitionType.from_sizes([2 * s for s in lam.sizes])
        total += count_of_type(two_n, doubled, "partition") * _mu_chain(doubled.num_blocks)
    return total


def cf_u(x: UniformBlockPermutation) -> int:
    return math.prod(cf_u_block(len(a)) for a in x.alpha.blocks)


def cf_pi(a: SetPartition) -> int:
    if not a.is_even:
        raise InvalidArgumentError(f"{a} is not an even partition")
    return math.prod(cf_pi_block(len(b)) for b in a.blocks)


def _series_log(coeffs: Sequence[Fraction]) -> list[Fraction]:
    """Coefficients of log(A) for a power series A with A[0] == 1."""
    if coeffs[0] != 1:
        raise InvalidArgumentError("series must start with 1")
    out = [Fraction(0)] * len(coeffs)
    for n in range(1, len(coeffs)):
        acc = n * coeffs[n] - sum(k * out[k] * coeffs[n - k] for k in range(1, n))
        out[n] = acc / n
    return out


def verify_generating_functions(order: int, kind: str = "both") -> bool:
    """Check the exponential generating-function identities through ``order``.

    ``kind`` selects the UBP identity (``"ubp"``), the even-partition identity
    (``"even"``) or both.  Arithmetic is exact.
    """
    if not 1 <= order <= MAX_PARTITION_N:
        raise InvalidArgumentError(f"order must lie in [1, {MAX_PARTITION_N}]")
    if kind not in ("ubp", "even", "both"):
        raise InvalidArgumentError(f"unknown kind {kind!r}")
    ok = True
    if kind in ("ubp", "both"):
        a = [Fraction(1, math.factorial(k) ** 2) for k in range(order + 1)]
        log_a = _series_log(a)
        ok &= all(log_a[k] == Fraction(cf_u_block(k), math.factorial(k) ** 2) for k in range(1, order + 1))
    if kind in ("even", "both"):
        a = [Fraction(2**k, math.factorial(2 * k)) for k in range(order + 1)]
        log_a = _series_log(a)
        ok &= all(
            log_a[k] == Fraction(cf_pi_block(2 * k) * 2**k, math.factorial(2 * k))
            for k in range(1, order + 1)
        )
    return bool(ok)
