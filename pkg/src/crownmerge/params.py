"""Per-node geometric parameters of a merge forest.

Each merge node gets, besides plain member-size sums, three quantities
describing the interstitial ground it bridged:

* ``a_merge``        distinct link pixels between the two merged groups,
* ``l_hat``          mean link length over that link multiset (every
                     recorded link counts once, even on coinciding paths),
* ``lw_ratio``       l_hat**2 / a_merge, a length-to-width shape cue for
                     the bridged valley (0 when a_merge is 0),
* ``a_cumulative``   distinct link pixels over this merge and every merge
                     below it, which grows monotonically along any path.

Singletons only carry the member sums.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO, Mapping, Sequence

from .hac import Hierarchy
from .links import LinkStore
from .raster_io import Isol, PixelCoord


@dataclass(frozen=True)
class NodeParams:
    n_pix: int
    n_edge: int
    a_merge: int | None = None
    l_hat: float | None = None
    lw_ratio: float | None = None
    a_cumulative: int | None = None


#: Streams selectable by name; ``lw_over_acum`` is lw_ratio / a_cumulative
#: with 0 wherever a_cumulative is 0.
NAMED_STREAMS = ("a_merge", "lw_over_acum", "n_pix", "n_edge", "a_cumulative")

#: Base fields usable in a ``ratio:<numer>/<denom>`` stream.
RATIO_FIELDS = ("a_merge", "l_hat", "lw_ratio", "n_pix", "n_edge", "a_cumulative")


def compute_params(
    hierarchy: Hierarchy, store: LinkStore, isols: Sequence[Isol] | Mapping[int, Isol]
) -> dict[int, NodeParams]:
    """Compute parameters for every node, keyed by node id.

    Cross-pair links for a merge are re-read from the store; cumulative
    pixel sets are built bottom-up and dropped once their single successor
    has consumed them, keeping peak memory at one frontier of sets.
    """
    isol_map = isols if isinstance(isols, Mapping) else {i.id: i for i in isols}
    out: dict[int, NodeParams] = {}
    cum: dict[int, frozenset[PixelCoord] | set[PixelCoord]] = {}

    for node in hierarchy.nodes():
        if node.is_singleton:
            (isol_id,) = node.members
            isol = isol_map[isol_id]
            out[node.id] = NodeParams(n_pix=len(isol.pixels), n_edge=len(isol.edge_pixels))
            cum[node.id] = frozenset()
            continue

        left, right = node.ancestors
        left_members = sorted(hierarchy.node(left).members)
        right_members = sorted(hierarchy.node(right).members)
        merge_pixels: set[PixelCoord] = set()
        link_count = 0
        length_sum = 0
        for a in left_members:
            for b in right_members:
                count, total = store.link_stats(a, b)
                if count:
                    merge_pixels |= store.pair_union(a, b)
                    link_count += count
                    length_sum += total

        a_merge = len(merge_pixels)
        l_hat = length_sum / link_count if link_count else 0.0
        lw_ratio = (l_hat * l_hat) / a_merge if a_merge > 0 else 0.0

        cum_set = set(cum.pop(left)) | cum.pop(right) | merge_pixels
        cum[node.id] = cum_set

        out[node.id] = NodeParams(
            n_pix=out[left].n_pix + out[right].n_pix,
            n_edge=out[left].n_edge + out[right].n_edge,
            a_merge=a_merge,
            l_hat=l_hat,
            lw_ratio=lw_ratio,
            a_cumulative=len(cum_set),
        )
    return out


def parameter_stream(
    hierarchy: Hierarchy, params: Mapping[int, NodeParams], choice: str
) -> dict[int, float]:
    """One scalar per merge node, selected by name.

    ``choice`` is one of NAMED_STREAMS or ``ratio:<numer>/<denom>`` over
    RATIO_FIELDS (value 0 wherever the denominator is 0).
    """
    extract = _stream_extractor(choice)
    return {
        node_id: extract(params[node_id]) for node_id in hierarchy.merge_node_ids()
    }


def validate_stream(choice: str) -> None:
    """Raise ValueError if choice names no known stream."""
    _stream_extractor(choice)


def _stream_extractor(choice: str):
    if choice == "a_merge":
        return lambda p: float(p.a_merge)
    if choice == "lw_over_acum":
        return lambda p: p.lw_ratio / p.a_cumulative if p.a_cumulative else 0.0
    if choice == "n_pix":
        return lambda p: float(p.n_pix)
    if choice == "n_edge":
        return lambda p: float(p.n_edge)
    if choice == "a_cumulative":
        return lambda p: float(p.a_cumulative)
    if choice.startswith("ratio:"):
        body = choice[len("ratio:") :]
        numer, sep, denom = body.partition("/")
        if not sep or numer not in RATIO_FIELDS or denom not in RATIO_FIELDS:
            raise ValueError(
                f"bad ratio stream {choice!r}; use ratio:<numer>/<denom> "
                f"with fields from {RATIO_FIELDS}"
            )

        def ratio(p: NodeParams) -> float:
            top = float(getattr(p, numer))
            bottom = float(getattr(p, denom))
            return top / bottom if bottom else 0.0

        return ratio
    raise ValueError(
        f"unknown parameter stream {choice!r}; expected one of "
        f"{NAMED_STREAMS} or ratio:<numer>/<denom>"
    )


def dump_params_csv(
    hierarchy: Hierarchy, params: Mapping[int, NodeParams], stream: IO[str]
) -> None:
    """CSV of all nodes; merge-only fields stay blank on singleton rows."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(
        [
            "node_id",
            "merge_iteration",
            "a_merge",
            "l_hat",
            "lw_ratio",
            "n_pix",
            "n_edge",
            "a_cumulative",
        ]
    )
    for node in hierarchy.nodes():
        p = params[node.id]
        if node.is_singleton:
            writer.writerow([node.id, "", "", "", "", p.n_pix, p.n_edge, ""])
        else:
            writer.writerow(
                [
                    node.id,
                    node.merge_iteration,
                    p.a_merge,
                    p.l_hat,
                    p.lw_ratio,
                    p.n_pix,
                    p.n_edge,
                    p.a_cumulative,
                ]
            )
