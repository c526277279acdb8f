"""Degree-power indices and their exact incremental maintenance.

The three indices tracked everywhere in this package are the sums of the
squared, cubed, and fourth-power degrees over all nodes of a graph.  All
values are exact integers; attaching one new node changes them by a closed
delta that only involves the chosen parents' degrees before the attachment,
so a growth process can maintain the bundle in O(parents) per step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class IndexBundle:
    """Exact values of the squared/cubic/quartic degree sums."""

    zagreb: int
    cubic: int
    quartic: int

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.zagreb, self.cubic, self.quartic)


def compute_bundle(degrees: Iterable[int], leaf_count: int = 0) -> IndexBundle:
    """Compute the index bundle from scratch.

    ``leaf_count`` counts degree-1 nodes stored implicitly (used by the
    caterpillar model, whose state keeps spine degrees only); each such leaf
    contributes 1 to every power sum.
    """
    z = y = x = leaf_count
    for d in degrees:
        d2 = d * d
        z += d2
        y += d2 * d
        x += d2 * d2
    return IndexBundle(z, y, x)


def apply_attachment_delta(
    bundle: IndexBundle,
    parent_degrees_before: Sequence[int],
    newcomer_degree: int,
) -> IndexBundle:
    """Bundle after one attachment step.

    Each chosen parent of prior degree D gains one edge, changing the power
    sums by (D+1)^p - D^p; the newcomer enters with degree equal to the
    number of parents.  Hence

        zagreb  += sum(2D + 1) + w^2
        cubic   += sum(3D^2 + 3D + 1) + w^3
        quartic += sum(4D^3 + 6D^2 + 4D + 1) + w^4

    with w = ``newcomer_degree``.  Parents must be distinct and
    ``parent_degrees_before`` taken before any of them is updated.
    """
    w = newcomer_degree
    dz = w * w
    dy = w * w * w
    dx = w * w * w * w
    for d in parent_degrees_before:
        d2 = d * d
        dz += 2 * d + 1
        dy += 3 * d2 + 3 * d + 1
        dx += 4 * d2 * d + 6 * d2 + 4 * d + 1
    return IndexBundle(bundle.zagreb + dz, bundle.cubic + dy, bundle.quartic + dx)
