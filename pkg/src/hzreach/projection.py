"""2-D projections of hybrid zonotopes as support polygons, plus SVG/CSV output.

A hybrid zonotope is a union of constrained zonotopes, one per feasible
binary assignment.  Each piece is projected onto a coordinate pair and
enclosed by the polygon cut out by its support halfplanes in k equally
spaced directions, which is tight in every queried direction and sound for
display at any k.
"""

from __future__ import annotations

import numpy as np

from .errors import EmptySetError
from .lp import LpProblem, lp_solve
from .sets import HybridZonotope
from .util import parallel_map


def _fiber_support(Z: HybridZonotope, xb: np.ndarray, d: np.ndarray):
    """Support value and a maximizer of d @ x over the fiber with binaries xb."""
    obj = -(d @ Z.Gc)
    base = Z.Gb @ xb + Z.c
    if Z.n_g == 0:
        return float(d @ base), base
    if Z.n_c == 0:
        xc = np.where(obj > 0, -1.0, 1.0)
    else:
        rhs = Z.b - Z.Ab @ xb
        res = lp_solve(LpProblem(obj, Z.Ac, rhs, -np.ones(Z.n_g), np.ones(Z.n_g)))
        if not res.is_optimal:
            raise EmptySetError("binary assignment lost feasibility")
        xc = res.x
    point = Z.Gc @ xc + base
    return float(d @ point), point


def _clip(poly: np.ndarray, d: np.ndarray, h: float) -> np.ndarray:
    """Sutherland-Hodgman clip of a convex polygon by the halfplane d@x <= h."""
    if len(poly) == 0:
        return poly
    out = []
    vals = poly @ d - h
    m = len(poly)
    for i in range(m):
        j = (i + 1) % m
        vi, vj = vals[i], vals[j]
        if vi <= 0:
            out.append(poly[i])
        if (vi <= 0) != (vj <= 0):
            s = vi / (vi - vj)
            out.append(poly[i] + s * (poly[j] - poly[i]))
    return np.array(out) if out else np.zeros((0, 2))


def support_polygon(Z: HybridZonotope, xb: np.ndarray, k_dirs: int,
                    start_box: np.ndarray) -> np.ndarray:
    """Outer polygon of one binary fiber from k_dirs support halfplanes.

    The halfplanes of the equally spaced directions are refined with the
    normals of the chords between adjacent support maximizers, so facets
    revealed by the sampled directions are cut exactly; every added
    halfplane's offset is its own LP support value, keeping the polygon a
    superset of the fiber's projection.
    """
    angles = 2.0 * np.pi * np.arange(k_dirs) / k_dirs
    dirs = np.column_stack([np.cos(angles), np.sin(angles)])
    supports = []
    maximizers = []
    for d in dirs:
        h, p = _fiber_support(Z, xb, d)
        supports.append(h)
        maximizers.append(p)
    extra = []
    for k in range(k_dirs):
        delta = maximizers[(k + 1) % k_dirs] - maximizers[k]
        norm = np.hypot(*delta)
        if norm < 1e-12:
            continue
        n = np.array([delta[1], -delta[0]]) / norm
        if n @ (dirs[k] + dirs[(k + 1) % k_dirs]) < 0:
            n = -n
        extra.append(n)
    poly = start_box
    for d, h in zip(dirs, supports):
        poly = _clip(poly, d, h)
    for n in extra:
        poly = _clip(poly, n, _fiber_support(Z, xb, n)[0])
    return _tidy(poly)


def _tidy(poly: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Drop duplicate and collinear vertices left behind by tangent clips."""
    if len(poly) < 3:
        return poly
    keep = []
    for p in poly:
        if not keep or np.hypot(*(p - keep[-1])) > tol:
            keep.append(p)
    if len(keep) > 1 and np.hypot(*(keep[0] - keep[-1])) <= tol:
        keep.pop()
    out = []
    m = len(keep)
    for i in range(m):
        a, b, c = keep[i - 1], keep[i], keep[(i + 1) % m]
        cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if abs(cross) > tol:
            out.append(b)
    return np.array(out if len(out) >= 3 else keep)


def emit_projection(Z: HybridZonotope, dims: tuple[int, int],
                    k_dirs: int = 64) -> list[np.ndarray]:
    """One convex polygon per feasible binary assignment of the projection.

    The union of the returned polygons contains the projection of the set
    onto coordinates ``dims``; each polygon's support in every queried
    direction matches the fiber's true support to LP accuracy.

    Raises:
        EmptySetError: if the set is empty.
    """
    i, j = dims
    if i == j:
        raise ValueError("projection needs two distinct coordinates")
    P = Z.project([i, j])
    assignments = P.feasible_binary_assignments()
    if not assignments:
        raise EmptySetError("cannot project an empty set")
    hull = P.interval_hull("generator_relaxed")
    pad = float(np.max(hull.radius)) + 1.0
    lo, hi = hull.lower - pad, hull.upper + pad
    box = np.array([[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]])
    return parallel_map(lambda xb: support_polygon(P, xb, k_dirs, box), assignments)


def write_points_csv(path, points: np.ndarray, dims: tuple[int, int]) -> None:
    i, j = dims
    with open(path, "w") as fh:
        fh.write(f"x{i},x{j}\n")
        for p in points:
            fh.write(f"{float(p[0])!r},{float(p[1])!r}\n")


_PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]


def write_svg(path, groups, size: int = 640, margin: float = 0.05) -> None:
    """Render labeled polygon groups (and optional scatter points) to SVG.

    Args:
        groups: list of (label, polygons, points) where polygons is a list of
            (m, 2) arrays and points an (k, 2) array or None.
    """
    pts = [poly for _, polys, _ in groups for poly in polys if len(poly)]
    pts += [p for _, _, p in groups if p is not None and len(p)]
    if not pts:
        raise ValueError("nothing to draw")
    allp = np.vstack(pts)
    lo, hi = allp.min(axis=0), allp.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    pad = margin * float(span.max())
    lo, hi = lo - pad, hi + pad
    scale = size / float((hi - lo).max())

    def sx(v):
        return (v - lo[0]) * scale

    def sy(v):
        return size - (v - lo[1]) * scale

    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="0 0 {size} {size}">',
             f'<rect width="{size}" height="{size}" fill="white"/>']
    for gi, (label, polys, points) in enumerate(groups):
        color = _PALETTE[gi % len(_PALETTE)]
        lines.append(f'<g id="{label}">')
        for poly in polys:
            if len(poly) < 2:
                continue
            coords = " ".join(f"{sx(x):.3f},{sy(y):.3f}" for x, y in poly)
            lines.append(f'<polygon points="{coords}" fill="{color}" '
                         f'fill-opacity="0.35" stroke="{color}" stroke-width="1"/>')
        if points is not None:
            for x, y in points:
                lines.append(f'<circle cx="{sx(x):.3f}" cy="{sy(y):.3f}" r="1.2" '
                             f'fill="{color}"/>')
        lines.append("</g>")
    lines.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
