"""Characteristic functions, interior operators, and chi-fiber structure.

The characteristic function of a transfer system sends each element to the
least element related to it.  It is always an interior operator (monotone,
idempotent, contractive), every interior operator arises this way, and the
preimage of an operator is an interval in the refinement lattice whose top
is saturated.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import InvariantViolation, NotMonotone, SizeLimit
from .transfer import (
    TransferSystem,
    enumerate_transfer_systems,
    generate,
    saturated_hull,
)


class MonotoneEndomap:
    """A monotone self-map of a lattice, stored as its image array."""

    __slots__ = ("lattice", "image")

    def __init__(self, lattice, image):
        image = tuple(int(v) for v in image)
        if len(image) != lattice.n:
            raise ValueError("image must assign every element")
        for x in range(lattice.n):
            for y in range(lattice.n):
                if lattice.leq[x, y] and not lattice.leq[image[x], image[y]]:
                    raise NotMonotone(f"map reverses {x} <= {y}")
        object.__setattr__(self, "lattice", lattice)
        object.__setattr__(self, "image", image)

    def __setattr__(self, name, value):
        raise AttributeError("endomaps are immutable")

    def __call__(self, x):
        return self.image[x]

    def pointwise_leq(self, other):
        return all(self.lattice.leq[a, b] for a, b in zip(self.image, other.image))

    def __eq__(self, other):
        return isinstance(other, MonotoneEndomap) and self.image == other.image

    def __hash__(self):
        return hash(self.image)

    def __repr__(self):
        return f"{type(self).__name__}{self.image}"


class InteriorOperator(MonotoneEndomap):
    """Idempotent, contractive, monotone self-map."""

    def __init__(self, lattice, image):
        super().__init__(lattice, image)
        for x in range(lattice.n):
            if not lattice.leq[self.image[x], x]:
                raise InvariantViolation(f"operator is not contractive at {x}")
            if self.image[self.image[x]] != self.image[x]:
                raise InvariantViolation(f"operator is not idempotent at {x}")


def characteristic(system):
    """The characteristic interior operator of a transfer system.

    chi(x) is the meet of the R-downset of x; membership of the meet in
    the downset is recomputed and asserted rather than assumed.
    """
    lat = system.lattice
    image = []
    for x in range(lat.n):
        down = system.downset(x)
        m = down[0]
        for y in down[1:]:
            m = int(lat.meet[m, y])
        if m not in down:
            raise InvariantViolation(f"downset of {x} has no least element")
        image.append(m)
    return InteriorOperator(lat, image)


# -- interior operator enumeration -------------------------------------------


def interior_system_masks(lat, max_elements=16):
    """All join-closed subsets containing bottom, as element bitmasks.

    Interior systems are exactly the images of interior operators; they
    are enumerated by include/exclude search with join-closure
    propagation, far below the 2^n subset space.
    """
    if lat.n > max_elements:
        raise SizeLimit(f"{lat.n} elements exceed interior enumeration guard {max_elements}")
    n = lat.n
    join = lat.join
    out = []

    def close_with(mask, e, excluded):
        work = [e]
        mask |= 1 << e
        while work:
            a = work.pop()
            probe = mask
            while probe:
                low = probe & -probe
                b = low.bit_length() - 1
                probe ^= low
                j = int(join[a, b])
                if not mask >> j & 1:
                    if excluded >> j & 1:
                        return None
                    mask |= 1 << j
                    work.append(j)
        return mask

    order = [x for x in range(n) if x != lat.bottom]

    def rec(i, mask, excluded):
        while i < len(order) and (mask | excluded) >> order[i] & 1:
            i += 1
        if i == len(order):
            out.append(mask)
            return
        e = order[i]
        included = close_with(mask, e, excluded)
        if included is not None:
            rec(i + 1, included, excluded)
        rec(i + 1, mask, excluded | (1 << e))

    rec(0, 1 << lat.bottom, 0)
    out.sort()
    return out


def operator_from_interior_system(lat, mask):
    """f(x) = join of the system's elements below x."""
    image = []
    for x in range(lat.n):
        best = lat.bottom
        probe = mask
        while probe:
            low = probe & -probe
            s = low.bit_length() - 1
            probe ^= low
            if lat.leq[s, x]:
                best = int(lat.join[best, s])
        image.append(best)
    return InteriorOperator(lat, image)


def interior_system_of(operator):
    """The image set of an interior operator, as an element bitmask."""
    mask = 0
    for v in set(operator.image):
        mask |= 1 << v
    return mask


def enumerate_interior_operators(lat, max_elements=16):
    """All interior operators, sorted by lexicographic image."""
    ops = [operator_from_interior_system(lat, m) for m in interior_system_masks(lat, max_elements)]
    ops.sort(key=lambda f: f.image)
    return ops


def count_interior_operators(lat, max_elements=16):
    return len(interior_system_masks(lat, max_elements))


def chi_image_check(lat, tr=None, max_elements=16):
    """Whether the characteristic map surjects onto the interior operators."""
    if tr is None:
        tr = enumerate_transfer_systems(lat)
    chi_images = {characteristic(r).image for r in tr}
    op_images = {f.image for f in enumerate_interior_operators(lat, max_elements)}
    return chi_images == op_images


# -- fibers -------------------------------------------------------------------


@dataclass(frozen=True)
class ChiFiber:
    """One fiber of the characteristic map: an interval in Tr(P)."""

    operator: InteriorOperator
    least: TransferSystem
    greatest: TransferSystem
    members: tuple


def fiber_minimum(lat, operator):
    """The least transfer system with the given characteristic operator,
    generated by the graph pairs (f(y), y)."""
    pairs = [(operator.image[y], y) for y in range(lat.n) if operator.image[y] != y]
    return generate(lat, pairs)


def fiber_decomposition(lat, tr=None):
    """Group Tr(P) by characteristic operator and verify the interval shape.

    For every fiber: it is closed under meet and join, its greatest
    element is the saturated hull of each member, its least element is the
    generated system of the operator's graph, and membership coincides
    with the interval test.  Failures raise InvariantViolation.
    """
    if tr is None:
        tr = enumerate_transfer_systems(lat)
    groups = {}
    for r in tr:
        groups.setdefault(characteristic(r).image, []).append(r)
    fibers = []
    for image in sorted(groups):
        members = sorted(groups[image], key=lambda s: s.bits)
        operator = InteriorOperator(lat, image)
        greatest = max(members, key=lambda s: bin(s.bits).count("1"))
        least = min(members, key=lambda s: bin(s.bits).count("1"))
        for r in members:
            if not (least.refines(r) and r.refines(greatest)):
                raise InvariantViolation("fiber is not an interval")
            if saturated_hull(r) != greatest:
                raise InvariantViolation("fiber maximum is not the saturated hull")
        if not greatest.is_saturated():
            raise InvariantViolation("fiber maximum is not saturated")
        if fiber_minimum(lat, operator) != least:
            raise InvariantViolation("fiber minimum disagrees with the generated system")
        member_bits = {r.bits for r in members}
        for r in tr:
            inside = least.refines(r) and r.refines(greatest)
            if inside != (r.bits in member_bits):
                raise InvariantViolation("interval membership mismatch")
        for a in members:
            for b in members:
                if (a & b).bits not in member_bits or (a | b).bits not in member_bits:
                    raise InvariantViolation("fiber not closed under meet/join")
        fibers.append(ChiFiber(operator, least, greatest, tuple(members)))
    return fibers


# -- the Galois pair -----------------------------------------------------------


def galois_F(lat, elements):
    """Least transfer system relating each given element to top.

    The result is cosaturated (generated by relations into the top).
    """
    return generate(lat, [(x, lat.top) for x in elements])


def galois_G(system):
    """The fibrant set: all elements related to top."""
    lat = system.lattice
    return frozenset(x for x in range(lat.n) if system.contains(x, lat.top))


def is_moore_family(lat, elements):
    """Contains top and is closed under pairwise meets."""
    if lat.top not in elements:
        return False
    return all(int(lat.meet[x, y]) in elements for x in elements for y in elements)
