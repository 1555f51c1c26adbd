"""The matchstick game: saturated covers on modular lattices.

A saturated cover is a set Q of covering relations such that
(1) x Q (x v y) forces (x ^ y) Q y, and
(2) no covering diamond has exactly three of its four edges in Q.
On a finite modular lattice these are in bijection with the saturated
transfer systems, by generation one way and by taking covering relations
the other.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    InvalidCover,
    InvariantViolation,
    NotModular,
    NotSaturated,
    SizeLimit,
)
from .transfer import generate


@dataclass(frozen=True)
class CoverViolation:
    rule: int
    witness: tuple

    def __str__(self):
        return f"rule ({self.rule}) violated at {self.witness}"


def _cover_table(lat):
    cached = lat._cache.get("cover_table")
    if cached is None:
        edges = list(lat.covers)
        cached = (edges, {e: i for i, e in enumerate(edges)})
        lat._cache["cover_table"] = cached
    return cached


def covering_diamonds(lat):
    """All tetrads (m, x, y, j) whose four bounding relations are covers,
    as 4-tuples of cover-edge indices (mx, my, xj, yj)."""
    cached = lat._cache.get("diamonds")
    if cached is not None:
        return cached
    edges, eidx = _cover_table(lat)
    out = []
    for x in range(lat.n):
        for y in range(x + 1, lat.n):
            if lat.leq[x, y] or lat.leq[y, x]:
                continue
            m = int(lat.meet[x, y])
            j = int(lat.join[x, y])
            quad = ((m, x), (m, y), (x, j), (y, j))
            if all(e in eidx for e in quad):
                out.append(tuple(eidx[e] for e in quad))
    lat._cache["diamonds"] = out
    return out


def rule_one_implications(lat):
    """Implication graph over cover edges: edge (x, x v y) forces
    (x ^ y, y).  Built once per lattice; modularity guarantees the forced
    pair is itself a cover, and a missing one certifies non-modularity."""
    cached = lat._cache.get("rule_one")
    if cached is not None:
        return cached
    edges, eidx = _cover_table(lat)
    implies = [set() for _ in edges]
    for x in range(lat.n):
        for y in range(lat.n):
            j = int(lat.join[x, y])
            if j == x:
                continue
            src = eidx.get((x, j))
            if src is None:
                continue
            m = int(lat.meet[x, y])
            if m == y:
                continue
            dst = eidx.get((m, y))
            if dst is None:
                raise NotModular(f"{j} covers {x} but {y} does not cover {m}")
            if dst != src:
                implies[src].add(dst)
    cached = [tuple(sorted(s)) for s in implies]
    lat._cache["rule_one"] = cached
    return cached


def find_cover_violation(lat, bits):
    """First violated saturated-cover rule, or None.

    Diamonds are scanned before the restriction rule so that a
    three-of-four configuration is reported as such even when it also
    breaks rule (1).
    """
    edges, _ = _cover_table(lat)
    for quad in covering_diamonds(lat):
        inside = sum(bits >> e & 1 for e in quad)
        if inside == 3:
            missing = next(e for e in quad if not bits >> e & 1)
            return CoverViolation(2, tuple(edges[e] for e in quad) + (edges[missing],))
    implies = rule_one_implications(lat)
    for i in range(len(edges)):
        if bits >> i & 1:
            for t in implies[i]:
                if not bits >> t & 1:
                    return CoverViolation(1, (edges[i], edges[t]))
    return None


class SaturatedCover:
    """An immutable saturated cover on a modular lattice."""

    __slots__ = ("lattice", "bits")

    def __init__(self, lattice, bits):
        if not lattice.is_modular():
            raise NotModular("saturated covers are defined on modular lattices")
        violation = find_cover_violation(lattice, bits)
        if violation is not None:
            raise InvalidCover(violation)
        object.__setattr__(self, "lattice", lattice)
        object.__setattr__(self, "bits", bits)

    @classmethod
    def _wrap(cls, lattice, bits):
        obj = object.__new__(cls)
        object.__setattr__(obj, "lattice", lattice)
        object.__setattr__(obj, "bits", bits)
        return obj

    @classmethod
    def from_edges(cls, lattice, edge_pairs):
        _, eidx = _cover_table(lattice)
        bits = 0
        for pair in edge_pairs:
            pair = tuple(pair)
            if pair not in eidx:
                raise ValueError(f"{pair} is not a covering relation")
            bits |= 1 << eidx[pair]
        return cls(lattice, bits)

    def __setattr__(self, name, value):
        raise AttributeError("SaturatedCover is immutable")

    def edges(self):
        table, _ = _cover_table(self.lattice)
        return [table[i] for i in range(len(table)) if self.bits >> i & 1]

    def __eq__(self, other):
        return (
            isinstance(other, SaturatedCover)
            and self.bits == other.bits
            and self.lattice.same_order(other.lattice)
        )

    def __hash__(self):
        return hash((self.lattice.n, self.lattice.leq.tobytes(), self.bits))

    def __repr__(self):
        return f"SaturatedCover({self.edges()})"


def _cover_machinery(lat):
    cached = lat._cache.get("cover_machinery")
    if cached is None:
        edges, _ = _cover_table(lat)
        implies = rule_one_implications(lat)
        diamonds = covering_diamonds(lat)
        watching = [[] for _ in edges]
        for quad in diamonds:
            for e in quad:
                watching[e].append(quad)
        cached = (len(edges), implies, diamonds, watching)
        lat._cache["cover_machinery"] = cached
    return cached


def _cover_propagate(machinery, inc, exc, seed):
    _, implies, _, watching = machinery
    work = [seed]
    inc |= 1 << seed
    while work:
        e = work.pop()
        for t in implies[e]:
            if not inc >> t & 1:
                if exc >> t & 1:
                    return None
                inc |= 1 << t
                work.append(t)
        for quad in watching[e]:
            if sum(inc >> q & 1 for q in quad) == 3:
                fourth = next(q for q in quad if not inc >> q & 1)
                if exc >> fourth & 1:
                    return None
                inc |= 1 << fourth
                work.append(fourth)
    return inc


def _cover_dead(machinery, inc, exc):
    # an exclusion can strand a diamond at three-in with the fourth out
    _, _, diamonds, _ = machinery
    for quad in diamonds:
        if sum(inc >> q & 1 for q in quad) == 3 and any(
            exc >> q & 1 and not inc >> q & 1 for q in quad
        ):
            return True
    return False


def _cover_step(machinery, state):
    """Expand one backtracking state into its surviving children, or
    return None when the state is a leaf."""
    edge_count = machinery[0]
    i, inc, exc = state
    while i < edge_count and (inc | exc) >> i & 1:
        i += 1
    if i == edge_count:
        return None
    children = []
    with_e = _cover_propagate(machinery, inc, exc, i)
    if with_e is not None:
        children.append((i + 1, with_e, exc))
    new_exc = exc | (1 << i)
    if not _cover_dead(machinery, inc, new_exc):
        children.append((i + 1, inc, new_exc))
    return children


def _cover_run(machinery, state):
    out = []
    stack = [state]
    while stack:
        s = stack.pop()
        children = _cover_step(machinery, s)
        if children is None:
            out.append(s[1])
        else:
            stack.extend(children)
    return out


def _resume_cover_enumeration(args):
    lat, state = args
    return _cover_run(_cover_machinery(lat), state)


def enumerate_saturated_covers(lat, guard=64, jobs=1):
    """All saturated covers, by backtracking over cover edges.

    Rule (1) propagates along a precomputed implication graph; rule (2)
    watches each covering diamond, forcing the fourth edge at three-in and
    killing the branch at three-in-one-out.  With jobs > 1 the search tree
    is split across worker processes and the results merged.
    """
    if not lat.is_modular():
        raise NotModular("saturated covers are defined on modular lattices")
    edges, _ = _cover_table(lat)
    if guard is not None and len(edges) > guard:
        raise SizeLimit(f"{len(edges)} cover edges exceed guard {guard}")
    machinery = _cover_machinery(lat)
    root = (0, 0, 0)
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        states, leaves = [root], []
        while states and len(states) < 4 * jobs:
            nxt = []
            for s in states:
                children = _cover_step(machinery, s)
                if children is None:
                    leaves.append(s[1])
                else:
                    nxt.extend(children)
            states = nxt
        out = list(leaves)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for chunk in pool.map(_resume_cover_enumeration, [(lat, s) for s in states]):
                out.extend(chunk)
    else:
        out = _cover_run(machinery, root)
    out = sorted(set(out))
    for bits in out:
        if find_cover_violation(lat, bits) is not None:
            raise InvariantViolation("backtracking emitted an invalid cover")
    return [SaturatedCover._wrap(lat, b) for b in out]


def cover_to_system(cover):
    """Generate the saturated transfer system of a saturated cover."""
    system = generate(cover.lattice, cover.edges())
    if not system.is_saturated():
        raise InvariantViolation("generated system of a saturated cover is not saturated")
    return system


def system_to_cover(system):
    """Covering relations of a saturated transfer system, as a cover."""
    lat = system.lattice
    if not lat.is_modular():
        raise NotModular("the bijection requires a modular ambient lattice")
    if not system.is_saturated():
        raise NotSaturated("only saturated systems restrict to saturated covers")
    edges = [e for e in lat.covers if system.contains(*e)]
    return SaturatedCover.from_edges(lat, edges)
