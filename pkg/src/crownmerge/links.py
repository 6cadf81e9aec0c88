"""Connective links between segments, found by straight-line ray casting.

From every edge pixel of every segment a ray is cast in each of the 8
compass directions.  The ray walks pixel by pixel (diagonals move one step
in both axes, king-style) across interstitial label-0 pixels and either

* leaves the raster           -> discarded,
* returns to its own segment  -> discarded,
* reaches another segment     -> recorded as a link carrying the
                                 interstitial pixels it crossed.

The connective distance between two segments is the number of distinct
interstitial pixels covered by all their links together, so overlapping
rays are only counted once.  Segment pairs with no links are infinitely
far apart.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Sequence

from .raster_io import Isol, LabeledRaster, PixelCoord

#: Compass name -> unit step, clockwise from north; y grows downward.
DIRECTIONS: tuple[tuple[str, int, int], ...] = (
    ("N", 0, -1),
    ("NE", 1, -1),
    ("E", 1, 0),
    ("SE", 1, 1),
    ("S", 0, 1),
    ("SW", -1, 1),
    ("W", -1, 0),
    ("NW", -1, -1),
)

#: Distance value for segment pairs without any connective link.
NO_CONNECTION = math.inf


@dataclass(frozen=True)
class ConnectiveLink:
    """A single recorded ray from one segment to another."""

    origin_isol: int
    target_isol: int
    direction: str
    origin_pixel: PixelCoord
    interstitial: tuple[PixelCoord, ...]

    @property
    def length(self) -> int:
        return len(self.interstitial)


class LinkStore:
    """All links of a scene, grouped by unordered segment pair.

    Per-pair pixel unions and length sums are precomputed because distance
    queries and merge bookkeeping hit them constantly.
    """

    def __init__(self, links_by_pair: Mapping[tuple[int, int], Sequence[ConnectiveLink]]):
        self._links: dict[tuple[int, int], tuple[ConnectiveLink, ...]] = {}
        self._union: dict[tuple[int, int], frozenset[PixelCoord]] = {}
        self._stats: dict[tuple[int, int], tuple[int, int]] = {}
        for pair, links in links_by_pair.items():
            a, b = pair
            if a >= b:
                raise ValueError(f"pair key {pair} must be (low, high) with low < high")
            if not links:
                raise ValueError(f"pair {pair} has an empty link list")
            for link in links:
                if {link.origin_isol, link.target_isol} != {a, b}:
                    raise ValueError(
                        f"link {link.origin_isol}->{link.target_isol} "
                        f"filed under pair {pair}"
                    )
            self._links[pair] = tuple(links)
            self._union[pair] = frozenset(
                px for link in links for px in link.interstitial
            )
            self._stats[pair] = (len(links), sum(link.length for link in links))

    def pairs(self) -> tuple[tuple[int, int], ...]:
        """Linked segment pairs, sorted."""
        return tuple(sorted(self._links))

    def has_links(self, a: int, b: int) -> bool:
        return _key(a, b) in self._links

    def links_between(self, a: int, b: int) -> tuple[ConnectiveLink, ...]:
        return self._links.get(_key(a, b), ())

    def pair_union(self, a: int, b: int) -> frozenset[PixelCoord]:
        """Distinct interstitial pixels over all links of the pair."""
        return self._union.get(_key(a, b), frozenset())

    def link_stats(self, a: int, b: int) -> tuple[int, int]:
        """(link count, summed link length) for the pair; (0, 0) if unlinked."""
        return self._stats.get(_key(a, b), (0, 0))

    def __len__(self) -> int:
        return len(self._links)


def _key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


# ---------------------------------------------------------------------------
# ray casting
# ---------------------------------------------------------------------------


def cast_rays(
    raster: LabeledRaster,
    isols: Sequence[Isol],
    max_ray: int | None = None,
) -> LinkStore:
    """Cast all rays and collect the resulting links.

    Args:
        raster: the labeled scene.
        isols: its segments (from :func:`extract_isols`).
        max_ray: abandon rays crossing more than this many interstitial
            pixels; ``None`` means unlimited.

    Every surviving ray is stored, one link per originating edge pixel and
    direction, even when two rays cover the same pixels; the union-based
    distance is unaffected by such duplicates.
    """
    width, height = raster.width, raster.height
    flat = raster.labels.ravel().tolist()
    found: dict[tuple[int, int], list[ConnectiveLink]] = {}

    for isol in isols:
        own = isol.id
        for px, py in sorted(isol.edge_pixels):
            for name, dx, dy in DIRECTIONS:
                x, y = px + dx, py + dy
                path: list[PixelCoord] = []
                while 0 <= x < width and 0 <= y < height:
                    label = flat[y * width + x]
                    if label == 0:
                        path.append((x, y))
                        if max_ray is not None and len(path) > max_ray:
                            break
                        x += dx
                        y += dy
                        continue
                    if label != own:
                        link = ConnectiveLink(
                            origin_isol=own,
                            target_isol=label,
                            direction=name,
                            origin_pixel=(px, py),
                            interstitial=tuple(path),
                        )
                        found.setdefault(_key(own, label), []).append(link)
                    break
    return LinkStore(found)


# ---------------------------------------------------------------------------
# distances
# ---------------------------------------------------------------------------


def pair_distance(store: LinkStore, a: int, b: int) -> int | float:
    """Connective distance between two segments.

    The count of distinct interstitial pixels over the pair's links; 0 for
    touching segments, ``NO_CONNECTION`` when no link exists.
    """
    if not store.has_links(a, b):
        return NO_CONNECTION
    return len(store.pair_union(a, b))


def group_distance(
    store: LinkStore, group_a: Iterable[int], group_b: Iterable[int]
) -> int | float:
    """Connective distance between two disjoint groups of segments.

    The pixel-set union runs over every cross pair, so shared interstitial
    pixels are not double counted and the result can be well below the sum
    of pair distances.
    """
    set_a, set_b = frozenset(group_a), frozenset(group_b)
    if not set_a or not set_b:
        raise ValueError("groups must be non-empty")
    if set_a & set_b:
        raise ValueError(f"groups overlap: {sorted(set_a & set_b)}")
    union: set[PixelCoord] = set()
    linked = False
    for a in set_a:
        for b in set_b:
            if store.has_links(a, b):
                linked = True
                union |= store.pair_union(a, b)
    return len(union) if linked else NO_CONNECTION


def dump_links_csv(store: LinkStore, stream: IO[str]) -> None:
    """Debug dump: one row per link."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(
        ["origin_isol", "target_isol", "direction", "origin_x", "origin_y", "length"]
    )
    for pair in store.pairs():
        for link in store.links_between(*pair):
            writer.writerow(
                [
                    link.origin_isol,
                    link.target_isol,
                    link.direction,
                    link.origin_pixel[0],
                    link.origin_pixel[1],
                    link.length,
                ]
            )
