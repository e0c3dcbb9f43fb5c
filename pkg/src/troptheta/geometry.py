"""Polyhedral structure of tropical theta functions.

A tropical theta function is a min of affine forms l_u(x) = w(u) + <u, x>.
Its domains of linearity are the cells where one witness u attains the min;
the corner locus (the points with >= 2 witnesses) is the tropical theta
divisor.  Everything here is exact: cells come out as rational H- and
V-representations, the divisor as a polyhedral complex clipped to one
fundamental parallelepiped, with lattice identifications and the quotient
counts (Betti numbers, Euler characteristic) computed from them.

Soundness of the competitor pools: for any box R and any single witness u,
f <= l_u everywhere, so every u'' active somewhere in R satisfies
l_{u''} <= l_u somewhere in R, hence at a corner of R (their difference is
affine).  Sweeping the corners with bound l_u(corner) is one ellipsoid
enumeration per coset and corner, finite by positive-definiteness.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import gcd
from typing import Sequence

from .lattice import CosetLattice, enumerate_below
from .linalg import (
    IntVec,
    RatMatrix,
    Row,
    ShapeMismatchError,
    inverse,
    matvec,
    solve,
    transpose,
    vecdot,
)
from .theta import TropicalThetaFunction
from .varieties import InvalidDataError, TropPoint, as_point


class OnCornerLocusError(ValueError):
    """The query point lies on the corner locus; carries the tie set."""

    def __init__(self, ties: tuple[IntVec, ...]):
        self.ties = ties
        super().__init__(f"point lies on the corner locus; witnesses {ties}")


class RankTooLargeError(ValueError):
    """Vertex enumeration is only provided for g <= 3."""


class UnsupportedFormatError(ValueError):
    """Unknown export format, or format/rank mismatch."""


_MAX_RANK = 3
Halfspace = tuple[IntVec, Fraction]  # <normal, x> >= offset


# ---------- exact polyhedral helpers ----------


def _vertices_of(eqs, ineqs, g):
    """Vertices of { <a,x> = b for eqs, <a,x> >= b for ineqs }: every
    g-subset of tight constraints with a unique solution that satisfies the
    rest.  Exact; intended for g <= 3 and modest constraint counts."""
    ineqs = tuple(ineqs)
    need = g - len(eqs)
    if need < 0:
        return ()
    found = set()
    rejected = set()
    for subset in combinations(range(len(ineqs)), need):
        rows = [list(a) for a, _ in eqs] + [list(ineqs[i][0]) for i in subset]
        rhs = [b for _, b in eqs] + [ineqs[i][1] for i in subset]
        try:
            x = tuple(solve(rows, rhs))
        except ShapeMismatchError:
            continue
        if x in found or x in rejected:
            continue
        if all(vecdot(a, x) >= b for a, b in ineqs):
            found.add(x)
        else:
            rejected.add(x)
    return tuple(sorted(found))


def _clip_box(ineqs, center, halfwidth, g):
    """Vertices of box(center, halfwidth) cut by ineqs, incrementally.

    Constraints satisfied by every current vertex cannot cut the hull and
    are skipped outright; a cutting constraint only spawns vertices tight
    on its own plane, so only (g-1)-subsets of the applied constraints are
    solved against it.  Bounded throughout since the box starts bounded.

    Planes closest to the center go first: the true facets land early and
    the rest of the pool degrades into O(|verts|) redundancy skips.
    """
    applied = list(_box_halfspaces(center, halfwidth, g))
    verts = {
        tuple(c + s * halfwidth for c, s in zip(center, signs))
        for signs in product((-1, 1), repeat=g)
    }

    def depth(con):
        a, b = con
        norm = sum(float(x) * float(x) for x in a) ** 0.5
        return float(b - vecdot(a, center)) / norm

    for a, b in sorted(ineqs, key=depth, reverse=True):
        keep = {v for v in verts if vecdot(a, v) >= b}
        if len(keep) == len(verts):
            continue
        fresh = set()
        for subset in combinations(range(len(applied)), g - 1):
            rows = [list(a)] + [list(applied[i][0]) for i in subset]
            rhs = [b] + [applied[i][1] for i in subset]
            try:
                x = tuple(solve(rows, rhs))
            except ShapeMismatchError:
                continue
            if x in fresh or x in keep:
                continue
            if all(vecdot(aa, x) >= bb for aa, bb in applied):
                fresh.add(x)
        verts = keep | fresh
        applied.append((a, b))
        if not verts:
            break
    return tuple(sorted(verts))


def _affine_span(points):
    """Row-reduced basis of the direction space of the affine hull."""
    if len(points) <= 1:
        return ()
    base = points[0]
    rows = [list(q - p for p, q in zip(base, pt)) for pt in points[1:]]
    g = len(base)
    basis = []
    col = 0
    r = 0
    while r < len(rows) and col < g:
        pivot = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            col += 1
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        pv = rows[r][col]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        r += 1
        col += 1
    basis = [tuple(row) for row in rows[:r]]
    return tuple(basis)


def _gcd_normalize(normal: IntVec, offset: Fraction) -> Halfspace:
    g = 0
    for a in normal:
        g = gcd(g, abs(int(a)))
    if g == 0:
        raise InvalidDataError("zero normal")
    return tuple(int(a) // g for a in normal), Fraction(offset) / g


# ---------- cells ----------


@dataclass(frozen=True)
class Facet:
    """A codimension-1 face of a cell: the locus where the cell's witness
    ties with `witnesses` (every competitor sharing the supporting plane)."""

    normal: IntVec
    offset: Fraction
    witnesses: tuple[IntVec, ...]
    vertices: tuple[TropPoint, ...]


@dataclass(frozen=True)
class LinearityCell:
    """Closure of the region where one witness attains the min.

    halfspaces are the supporting competitors (normal u'' - u, offset
    w(u) - w(u'')); vertices are exact rational points.  dim < g marks a
    degenerate cell (only possible at special profiles); span records a
    basis of its affine hull's direction space.
    """

    witness: IntVec
    halfspaces: tuple[Halfspace, ...]
    vertices: tuple[TropPoint, ...]
    dim: int
    span: tuple[Row, ...]
    facets: tuple[Facet, ...]
    bounded: bool = True

    @property
    def g(self) -> int:
        return len(self.witness)

    def contains(self, v: Sequence) -> bool:
        point = as_point(v)
        return all(vecdot(a, point) >= b for a, b in self.halfspaces)

    def to_json_dict(self) -> dict:
        return {
            "witness": list(self.witness),
            "halfspaces": [
                {"normal": list(a), "offset": str(b)} for a, b in self.halfspaces
            ],
            "vertices": [[str(c) for c in p] for p in self.vertices],
            "dim": self.dim,
            "span": [[str(c) for c in d] for d in self.span],
            "bounded": self.bounded,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "LinearityCell":
        # facet data is not serialized; deserialized cells carry geometry only
        return cls(
            witness=tuple(int(x) for x in data["witness"]),
            halfspaces=tuple(
                (tuple(int(x) for x in h["normal"]), Fraction(h["offset"]))
                for h in data["halfspaces"]
            ),
            vertices=tuple(
                tuple(Fraction(c) for c in p) for p in data["vertices"]
            ),
            dim=int(data["dim"]),
            span=tuple(tuple(Fraction(c) for c in d) for d in data["span"]),
            facets=(),
            bounded=bool(data["bounded"]),
        )


def _terms_below(theta: TropicalThetaFunction, v, bound) -> list[IntVec]:
    """All u with w(u) + <u, v> <= bound."""
    point = as_point(v)
    if not theta.is_ample:
        return sorted(
            rep
            for rep, w in theta.profile.finite_entries()
            if w + vecdot(rep, point) <= bound
        )
    B = theta._B_rows
    lam = theta.factor.Lambda
    lam_t_v = matvec(transpose(lam), point)
    out = set()
    for rep, w in theta.profile.finite_entries():
        lin = tuple(
            e + pr + lv
            for e, pr, lv in zip(
                theta.factor.ell, matvec(theta.base.P.entries, rep), lam_t_v
            )
        )
        const = w + vecdot(rep, point)
        center = tuple(solve(B, tuple(-c for c in lin)))
        center_val = (
            Fraction(1, 2) * vecdot(center, matvec(B, center))
            + vecdot(lin, center)
            + const
        )
        if bound < center_val:
            continue
        for n in enumerate_below(B, center, bound - center_val):
            shift = matvec(lam, n)
            out.add(tuple(int(r + s) for r, s in zip(rep, shift)))
    return sorted(out)


def _box_halfspaces(center, halfwidth, g):
    out = []
    for i in range(g):
        e = tuple(1 if j == i else 0 for j in range(g))
        ne = tuple(-1 if j == i else 0 for j in range(g))
        out.append((e, center[i] - halfwidth))
        out.append((ne, -(center[i] + halfwidth)))
    return out


def _build_cell(
    theta: TropicalThetaFunction, u: IntVec, center, halfwidth=Fraction(13, 7)
) -> LinearityCell:
    """The global cell of witness u: competitors pooled over a growing box,
    certified once the polytope stays strictly inside it.

    If Q is the intersection of the pool's halfspaces, then Q cut to the box
    equals the true cell cut to the box (any point of the box beaten by some
    outside competitor is beaten by its local witness, which is in the
    pool); so Q inside the box certifies Q = cell.  center should be a point
    in or near the cell; pool sizes stay small when it is.
    """
    g = theta.base.g
    w_u = theta.extended_w(u)
    center = as_point(center)
    halfwidth = Fraction(halfwidth)
    wcache: dict[IntVec, Fraction] = {}

    def wof(other: IntVec) -> Fraction:
        if other not in wcache:
            wcache[other] = theta.extended_w(other)
        return wcache[other]

    for round_ in range(24):
        corners = [
            tuple(c + s * halfwidth for c, s in zip(center, signs))
            for signs in product((-1, 1), repeat=g)
        ]
        # u'' can only win somewhere in the box if l_{u''} <= l_u at a box
        # corner (their difference is affine), so pool per corner with the
        # corner's own bound
        groups: dict[IntVec, tuple[Fraction, list[IntVec]]] = {}
        for corner in corners:
            for other in _terms_below(theta, corner, w_u + vecdot(u, corner)):
                if other == u:
                    continue
                normal = tuple(int(o - a) for o, a in zip(other, u))
                a, b = _gcd_normalize(normal, w_u - wof(other))
                cur = groups.get(a)
                if cur is None or b > cur[0]:
                    groups[a] = (b, [other])
                elif b == cur[0] and other not in cur[1]:
                    cur[1].append(other)
        ineqs = [(a, b) for a, (b, _) in sorted(groups.items())]
        box = _box_halfspaces(center, halfwidth, g)
        verts = _clip_box(ineqs, center, halfwidth, g)
        on_box = any(
            any(vecdot(a, p) == b for a, b in box) for p in verts
        )
        if verts and not on_box:
            break
        # vertices inside the box are certified cell points: retarget the
        # box onto their bounding region, widening exponentially as backup
        margin = Fraction(2, 3) * 2 ** max(0, round_ - 1)
        if verts:
            lo = [min(p[i] for p in verts) for i in range(g)]
            hi = [max(p[i] for p in verts) for i in range(g)]
            center = tuple((a + b) / 2 for a, b in zip(lo, hi))
            halfwidth = max(
                (b - a) / 2 for a, b in zip(lo, hi)
            ) + margin
        else:
            halfwidth = margin
    else:
        raise InvalidDataError(f"cell of witness {u} did not stabilize")

    tight = []
    facet_list = []
    span = _affine_span(verts)
    dim = len(span)
    for a, (b, wits) in sorted(groups.items()):
        tight_verts = tuple(p for p in verts if vecdot(a, p) == b)
        if not tight_verts:
            continue
        # a tight set with >= g vertices is a codimension-1 face; planes
        # only grazing lower faces are implied by the facets and dropped
        if dim == g and len(tight_verts) < g:
            continue
        tight.append((a, b))
        if dim == g:
            facet_list.append(
                Facet(
                    normal=a,
                    offset=b,
                    witnesses=tuple(sorted([u] + sorted(wits))),
                    vertices=tight_verts,
                )
            )
    return LinearityCell(
        witness=u,
        halfspaces=tuple(tight),
        vertices=verts,
        dim=dim,
        span=span,
        facets=tuple(facet_list),
    )


def linearity_cell(theta: TropicalThetaFunction, v) -> LinearityCell:
    """The maximal domain of linearity containing v; the witness must be
    unique at v (otherwise the tie set is reported via OnCornerLocusError)."""
    g = theta.base.g
    if g > _MAX_RANK:
        raise RankTooLargeError(f"vertex enumeration capped at g <= {_MAX_RANK}")
    point = as_point(v)
    result = theta.evaluate(point)
    if not result.unique:
        raise OnCornerLocusError(result.witnesses)
    u = result.canonical
    if not theta.is_ample:
        # finite support: the competitor set is the whole profile; the cell
        # of a uniquely witnessed point is always full-dimensional, though
        # possibly unbounded, so no vertex certification is attempted
        w_u = theta.extended_w(u)
        groups: dict[IntVec, Fraction] = {}
        for rep, w in theta.profile.finite_entries():
            if rep == u:
                continue
            a, b = _gcd_normalize(
                tuple(int(o - a_) for o, a_ in zip(rep, u)), w_u - w
            )
            if a not in groups or b > groups[a]:
                groups[a] = b
        ineqs = tuple(sorted(groups.items()))
        return LinearityCell(
            witness=u,
            halfspaces=ineqs,
            vertices=_vertices_of((), ineqs, g),
            dim=g,
            span=tuple(
                tuple(Fraction(1 if i == j else 0) for j in range(g))
                for i in range(g)
            ),
            facets=(),
            bounded=False,
        )
    return _build_cell(theta, u, point)


# ---------- fundamental domain ----------


@dataclass(frozen=True)
class FundamentalDomain:
    """The closed parallelepiped { P^T t : t in [0,1]^g } with exact
    halfspace data for clipping."""

    matrix: RatMatrix  # P^T; columns are the period basis vectors
    corners: tuple[TropPoint, ...]
    halfspaces: tuple[tuple[Row, Fraction], ...]

    @property
    def g(self) -> int:
        return self.matrix.rows

    def contains(self, v: Sequence) -> bool:
        point = as_point(v)
        return all(vecdot(a, point) >= b for a, b in self.halfspaces)

    def lattice_coordinates(self, v: Sequence) -> TropPoint:
        return tuple(self.matrix.solve(as_point(v)))

    def to_json_dict(self) -> dict:
        return {
            "matrix": [[str(c) for c in row] for row in self.matrix.entries],
            "corners": [[str(c) for c in p] for p in self.corners],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "FundamentalDomain":
        Pt = RatMatrix(
            tuple(tuple(Fraction(c) for c in row) for row in data["matrix"])
        )
        return cls(
            matrix=Pt,
            corners=tuple(
                tuple(Fraction(c) for c in p) for p in data["corners"]
            ),
            halfspaces=_parallelepiped_halfspaces(Pt),
        )


def _parallelepiped_halfspaces(Pt: RatMatrix):
    inv_rows = inverse(Pt.entries)
    halfspaces = []
    for i in range(Pt.rows):
        row = tuple(inv_rows[i])
        halfspaces.append((row, Fraction(0)))
        halfspaces.append((tuple(-c for c in row), Fraction(-1)))
    return tuple(halfspaces)


def _domain(theta: TropicalThetaFunction) -> FundamentalDomain:
    g = theta.base.g
    Pt = RatMatrix(transpose(theta.base.P.entries))
    corners = tuple(
        sorted(tuple(matvec(Pt.entries, s)) for s in product((0, 1), repeat=g))
    )
    return FundamentalDomain(
        matrix=Pt, corners=corners, halfspaces=_parallelepiped_halfspaces(Pt)
    )


# ---------- the corner locus ----------


@dataclass(frozen=True)
class SkeletonPiece:
    """A clipped codimension-1 piece of the corner locus: the tie locus of
    `witnesses` intersected with one cell and the fundamental domain."""

    witnesses: tuple[IntVec, ...]
    vertices: tuple[TropPoint, ...]

    @property
    def dim(self) -> int:
        return len(_affine_span(self.vertices))

    def to_json_dict(self) -> dict:
        return {
            "witnesses": [list(u) for u in self.witnesses],
            "vertices": [[str(c) for c in p] for p in self.vertices],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "SkeletonPiece":
        return cls(
            witnesses=tuple(tuple(int(x) for x in u) for u in data["witnesses"]),
            vertices=tuple(
                tuple(Fraction(c) for c in p) for p in data["vertices"]
            ),
        )


@dataclass(frozen=True)
class QuotientSummary:
    """Cell counts of the complex modulo the period lattice.

    zero_cells are canonical representatives (lattice coordinates in
    [0,1)^g mapped back).  Euler characteristic and Betti numbers are
    computed for g <= 2; the divisor graph may carry subdivision points
    from the clipping seams, which changes no invariant."""

    zero_cells: tuple[TropPoint, ...]
    one_cell_count: int
    top_cell_count: int
    betti0: int | None
    betti1: int | None
    euler_characteristic: int | None

    def to_json_dict(self) -> dict:
        return {
            "zero_cells": [[str(c) for c in p] for p in self.zero_cells],
            "one_cell_count": self.one_cell_count,
            "top_cell_count": self.top_cell_count,
            "betti0": self.betti0,
            "betti1": self.betti1,
            "euler_characteristic": self.euler_characteristic,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "QuotientSummary":
        def opt(x):
            return None if x is None else int(x)

        return cls(
            zero_cells=tuple(
                tuple(Fraction(c) for c in p) for p in data["zero_cells"]
            ),
            one_cell_count=int(data["one_cell_count"]),
            top_cell_count=int(data["top_cell_count"]),
            betti0=opt(data["betti0"]),
            betti1=opt(data["betti1"]),
            euler_characteristic=opt(data["euler_characteristic"]),
        )


@dataclass(frozen=True)
class CellComplex:
    """Linearity cells meeting the fundamental domain, the clipped corner
    locus, and the quotient topology."""

    g: int
    cells: tuple[LinearityCell, ...]
    skeleton: tuple[SkeletonPiece, ...]
    domain: FundamentalDomain
    quotient: QuotientSummary

    def to_json_dict(self) -> dict:
        return {
            "g": self.g,
            "domain": self.domain.to_json_dict(),
            "cells": [c.to_json_dict() for c in self.cells],
            "skeleton": [p.to_json_dict() for p in self.skeleton],
            "quotient": self.quotient.to_json_dict(),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "CellComplex":
        return cls(
            g=int(data["g"]),
            cells=tuple(
                LinearityCell.from_json_dict(c) for c in data["cells"]
            ),
            skeleton=tuple(
                SkeletonPiece.from_json_dict(p) for p in data["skeleton"]
            ),
            domain=FundamentalDomain.from_json_dict(data["domain"]),
            quotient=QuotientSummary.from_json_dict(data["quotient"]),
        )


def _generic_seed(theta: TropicalThetaFunction, fd: FundamentalDomain):
    g = theta.base.g
    for k in range(64):
        t = tuple(
            Fraction(1, 2) + Fraction((i + 1) * k, 64 * (i + 2) * g + 257)
            for i in range(g)
        )
        point = tuple(matvec(fd.matrix.entries, t))
        result = theta.evaluate(point)
        if result.unique:
            return result.canonical, point
    raise InvalidDataError("no generic seed point found in the domain")


def _meets_domain(cell: LinearityCell, fd: FundamentalDomain) -> bool:
    ineqs = tuple(cell.halfspaces) + tuple(fd.halfspaces)
    return bool(_vertices_of((), ineqs, fd.g))


def _quotient_point(fd: FundamentalDomain, p: TropPoint):
    t = fd.lattice_coordinates(p)
    return tuple(c % 1 for c in t)


def _canonical_shift(fd: FundamentalDomain, points):
    """Lattice translate moving the barycenter into [0,1)^g coordinates."""
    g = fd.g
    bary = tuple(sum(p[i] for p in points) / len(points) for i in range(g))
    t = fd.lattice_coordinates(bary)
    shift_t = tuple(c - (c % 1) for c in t)
    delta = tuple(matvec(fd.matrix.entries, shift_t))
    return tuple(
        tuple(c - d for c, d in zip(p, delta)) for p in points
    )


def corner_locus(theta: TropicalThetaFunction) -> CellComplex:
    """The tropical theta divisor in one fundamental parallelepiped.

    BFS across facet witnesses from a generic seed cell; every cell whose
    closure meets the domain is kept, facets are clipped to the domain and
    deduplicated, and quotient counts are taken modulo the period lattice.
    """
    g = theta.base.g
    if g > _MAX_RANK:
        raise RankTooLargeError(f"corner locus capped at g <= {_MAX_RANK}")
    if not theta.is_ample:
        raise InvalidDataError("corner locus needs an ample polarization")
    fd = _domain(theta)
    seed, seed_point = _generic_seed(theta, fd)

    cells: dict[IntVec, LinearityCell] = {}
    meets: dict[IntVec, bool] = {}
    queue = [(seed, seed_point)]
    while queue:
        u, hint = queue.pop(0)
        if u in cells:
            continue
        cell = _build_cell(theta, u, hint)
        cells[u] = cell
        meets[u] = _meets_domain(cell, fd)
        if not meets[u]:
            continue
        # facet witnesses reach the facet-sharing neighbors; the tie sets at
        # the cell's vertices reach everything else that touches the cell;
        # each neighbor is seeded with a point known to lie in its closure
        neighbors: dict[IntVec, TropPoint] = {}
        for facet in cell.facets:
            for w in facet.witnesses:
                neighbors.setdefault(w, facet.vertices[0])
        for p in cell.vertices:
            for w in theta.evaluate(p).witnesses:
                neighbors.setdefault(w, p)
        neighbors.pop(u, None)
        for w in sorted(neighbors):
            if w not in cells:
                queue.append((w, neighbors[w]))

    kept = tuple(
        cells[u] for u in sorted(cells) if meets[u]
    )

    # clip facets of full-dimensional cells to the domain, dedupe by geometry
    piece_map: dict[tuple, SkeletonPiece] = {}
    for cell in kept:
        if cell.dim < g:
            continue
        for facet in cell.facets:
            verts = _vertices_of(
                ((facet.normal, facet.offset),),
                tuple(cell.halfspaces) + tuple(fd.halfspaces),
                g,
            )
            if not verts:
                continue
            key = (verts, facet.witnesses)
            if key not in piece_map:
                piece_map[key] = SkeletonPiece(
                    witnesses=facet.witnesses, vertices=verts
                )
    skeleton = tuple(piece_map[k] for k in sorted(piece_map))

    quotient = _quotient_summary(theta, fd, kept, skeleton)
    return CellComplex(
        g=g, cells=kept, skeleton=skeleton, domain=fd, quotient=quotient
    )


def _quotient_summary(theta, fd, kept_cells, skeleton) -> QuotientSummary:
    g = fd.g
    factor_cosets = CosetLattice(theta.factor.Lambda)
    top_classes = {
        factor_cosets.decompose(c.witness)[0]
        for c in kept_cells
        if c.dim == g
    }

    if g == 1:
        nodes = {
            _quotient_point(fd, piece.vertices[0]) for piece in skeleton
        }
        zero = tuple(
            sorted(tuple(matvec(fd.matrix.entries, t)) for t in nodes)
        )
        v_count = len(zero)
        return QuotientSummary(
            zero_cells=zero,
            one_cell_count=0,
            top_cell_count=len(top_classes),
            betti0=v_count,
            betti1=0,
            euler_characteristic=v_count - len(top_classes),
        )

    if g == 2:
        edge_keys = set()
        node_keys = set()
        adjacency = []
        for piece in skeleton:
            pts = piece.vertices
            if len(pts) == 1:
                node_keys.add(_quotient_point(fd, pts[0]))
                continue
            # endpoints are the lex extremes; interior points (tangencies
            # against the clipping parallelepiped) are not graph nodes
            canon = tuple(sorted(_canonical_shift(fd, pts)))
            edge_keys.add(canon)
            ends = (_quotient_point(fd, pts[0]), _quotient_point(fd, pts[-1]))
            node_keys.update(ends)
            adjacency.append((canon, tuple(sorted(ends))))
        # union-find over quotient nodes through quotient edges
        parent = {n: n for n in node_keys}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        seen_edges = set()
        for canon, (p, q) in sorted(adjacency):
            if canon in seen_edges:
                continue
            seen_edges.add(canon)
            rp, rq = find(p), find(q)
            if rp != rq:
                parent[rp] = rq
        v_count = len(node_keys)
        e_count = len(edge_keys)
        b0 = len({find(n) for n in node_keys})
        b1 = e_count - v_count + b0
        zero = tuple(
            sorted(tuple(matvec(fd.matrix.entries, t)) for t in node_keys)
        )
        return QuotientSummary(
            zero_cells=zero,
            one_cell_count=e_count,
            top_cell_count=len(top_classes),
            betti0=b0,
            betti1=b1,
            euler_characteristic=v_count - e_count + len(top_classes),
        )

    # g = 3: report facet classes and vertex classes; graph invariants of
    # the 2-dimensional skeleton are out of scope
    face_keys = set()
    node_keys = set()
    for piece in skeleton:
        pts = piece.vertices
        if len(pts) >= 3:
            face_keys.add(tuple(sorted(_canonical_shift(fd, pts))))
        for p in pts:
            node_keys.add(_quotient_point(fd, p))
    zero = tuple(sorted(tuple(matvec(fd.matrix.entries, t)) for t in node_keys))
    return QuotientSummary(
        zero_cells=zero,
        one_cell_count=len(face_keys),
        top_cell_count=len(top_classes),
        betti0=None,
        betti1=None,
        euler_characteristic=None,
    )


# ---------- export ----------


def _fmt(x) -> str:
    return f"{float(x):.6f}"


def _cycle_order(points):
    """Order coplanar points around their barycenter; exact comparisons."""
    if len(points) <= 3:
        return tuple(sorted(points))
    g = len(points[0])
    basis = _affine_span(tuple(sorted(points)))
    if len(basis) != 2:
        return tuple(sorted(points))
    bary = tuple(sum(p[i] for p in points) / len(points) for i in range(g))
    planar = []
    for p in sorted(points):
        d = tuple(c - b for c, b in zip(p, bary))
        planar.append((vecdot(d, basis[0]), vecdot(d, basis[1]), p))

    def half(xy):
        x, y, _ = xy
        return 0 if (y > 0 or (y == 0 and x > 0)) else 1

    def cross(u, v):
        return u[0] * v[1] - u[1] * v[0]

    def cmp(a, b):
        ha, hb = half(a), half(b)
        if ha != hb:
            return -1 if ha < hb else 1
        c = cross((a[0], a[1]), (b[0], b[1]))
        if c != 0:
            return -1 if c > 0 else 1
        return -1 if a[2] < b[2] else (1 if a[2] > b[2] else 0)

    ordered = sorted(planar, key=functools.cmp_to_key(cmp))
    return tuple(p for _, _, p in ordered)


def _export_json(complex_: CellComplex) -> bytes:
    blob = json.dumps(
        complex_.to_json_dict(), sort_keys=True, separators=(",", ":")
    )
    return (blob + "\n").encode("ascii")


def _export_svg(complex_: CellComplex) -> bytes:
    if complex_.g != 2:
        raise UnsupportedFormatError("svg export needs g = 2")
    fd = complex_.domain
    xs = [c[0] for c in fd.corners]
    ys = [c[1] for c in fd.corners]
    pad = Fraction(1, 2)
    x0, x1 = min(xs) - pad, max(xs) + pad
    y0, y1 = min(ys) - pad, max(ys) + pad
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(x1 - x0)} {_fmt(y1 - y0)}">',
    ]
    t_corners = [(0, 0), (1, 0), (1, 1), (0, 1)]
    ring = [
        tuple(matvec(fd.matrix.entries, t)) for t in t_corners
    ]
    path = " ".join(f"{_fmt(p[0])},{_fmt(p[1])}" for p in ring)
    lines.append(
        f'<polygon points="{path}" fill="none" stroke="#888888" '
        'stroke-width="0.02"/>'
    )
    for piece in complex_.skeleton:
        pts = piece.vertices
        if len(pts) >= 2:
            a, b = pts[0], pts[-1]
            lines.append(
                f'<line x1="{_fmt(a[0])}" y1="{_fmt(a[1])}" '
                f'x2="{_fmt(b[0])}" y2="{_fmt(b[1])}" '
                'stroke="#000000" stroke-width="0.04"/>'
            )
        else:
            lines.append(
                f'<circle cx="{_fmt(pts[0][0])}" cy="{_fmt(pts[0][1])}" '
                'r="0.05" fill="#000000"/>'
            )
    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode("ascii")


def _export_obj(complex_: CellComplex) -> bytes:
    if complex_.g != 3:
        raise UnsupportedFormatError("obj export needs g = 3")
    verts: list[TropPoint] = []
    index: dict[TropPoint, int] = {}
    elements = []
    for piece in complex_.skeleton:
        pts = _cycle_order(piece.vertices)
        ids = []
        for p in pts:
            if p not in index:
                verts.append(p)
                index[p] = len(verts)
            ids.append(index[p])
        if len(ids) >= 3:
            elements.append("f " + " ".join(str(i) for i in ids))
        elif len(ids) == 2:
            elements.append("l " + " ".join(str(i) for i in ids))
    lines = ["# corner locus mesh"]
    for p in verts:
        lines.append("v " + " ".join(_fmt(c) for c in p))
    lines.extend(elements)
    return ("\n".join(lines) + "\n").encode("ascii")


def export_mesh(complex_: CellComplex, format: str = "json") -> bytes:
    """Serialize a cell complex deterministically.  json works for every
    rank; svg projects g = 2, obj writes g = 3 surfaces."""
    if format == "json":
        return _export_json(complex_)
    if format == "svg":
        return _export_svg(complex_)
    if format == "obj":
        return _export_obj(complex_)
    raise UnsupportedFormatError(f"unknown format {format!r}")
