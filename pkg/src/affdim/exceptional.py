"""Parameters where extra algebraic coincidences depress the dimension.

A rank-one site j collapses the plane onto the line t_j + span(v_j), and
composing any word with j on the outside acts on that line by a 1-d
affine map. When the parameter angle aligns the fixed points of two
such line maps, a pair of distinct three-letter words share the same
composition; deleting one of the duplicates leaves a strictly smaller
system whose dimension can drop below the generic value. This module
locates those angles, verifies the coincidence exactly at the map
level, and certifies the drop with the same brackets used elsewhere.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .attractor import PointCloud, _scalar_coeffs
from .dimension import (
    DimensionBracket,
    SolverOptions,
    affinity_dimension,
    pressure_upper_root,
)
from .errors import (
    ConfigError,
    ExcludedParameterError,
    IdentityMismatchError,
    NoSignChangeError,
)
from .ifs import AffineMap2, IfsFamily, Word, compose_word
from .linalg import Mat2, unit_vector

Letters = Tuple[int, ...]


@dataclass(frozen=True)
class LineMap:
    """Affine map x -> lam * x + offset of the real line."""

    lam: float
    offset: float

    def __call__(self, x: float) -> float:
        return self.lam * x + self.offset

    def fixed_point(self) -> float:
        if abs(self.lam) >= 1.0:
            raise ExcludedParameterError(
                "line map with |slope| %g >= 1 has no attracting fixed point"
                % abs(self.lam)
            )
        return self.offset / (1.0 - self.lam)


def line_map(fam: IfsFamily, j: int, word: Word, alpha: float) -> LineMap:
    """Action of f_j o f_word on the invariant line of site j.

    Site j maps the whole plane onto t_j + span(v_j); parametrizing that
    line by x -> x * v_j + t_j, the composition acts on the coordinate x
    by a 1-d affine map, returned here.
    """
    if not 0 <= j < fam.n_singular:
        raise ConfigError("site index out of range")
    anchor = fam.singular_letter(j)
    if any(letter == anchor for letter in word):
        raise ConfigError("word may not contain the anchor site itself")
    site = fam.singular[j]
    maps = fam.instantiate(alpha)
    f = compose_word(maps, tuple(word))
    w = unit_vector(site.w_angle(alpha))
    v = unit_vector(site.v_angle)
    point = f.apply(np.asarray(site.translation, dtype=float))
    lam = site.rho * float(np.dot(w, f.linear.apply(v)))
    offset = site.rho * float(np.dot(w, point))
    return LineMap(lam, offset)


def fixed_point_gap(fam: IfsFamily, j: int, i: int, alpha: float) -> float:
    """Difference of the fixed points of the line maps of f_j and
    f_j o f_i; a zero makes f_j o f_j o f_i and f_j o f_i o f_j equal."""
    g_empty = line_map(fam, j, (), alpha)
    g_i = line_map(fam, j, (i,), alpha)
    return g_empty.fixed_point() - g_i.fixed_point()


def _affine_coeffs(m: AffineMap2) -> np.ndarray:
    linear = m.linear if isinstance(m.linear, Mat2) else m.linear.as_mat2()
    return np.array(
        [linear.a11, linear.a12, linear.a21, linear.a22,
         m.translation[0], m.translation[1]]
    )


def commutation_residual(fam: IfsFamily, alpha: float, j: int, i: int) -> float:
    """Largest coefficient difference between f_j o f_j o f_i and
    f_j o f_i o f_j at the given angle."""
    maps = fam.instantiate(alpha)
    anchor = fam.singular_letter(j)
    a = compose_word(maps, (anchor, anchor, i))
    b = compose_word(maps, (anchor, i, anchor))
    return float(np.max(np.abs(_affine_coeffs(a) - _affine_coeffs(b))))


_MAX_BISECT = 200


def find_common_fixed_point_angle(
    fam: IfsFamily,
    j: int,
    i: int,
    grid_size: int = 256,
    tol: float = 1e-12,
    residual_tol: float = 1e-10,
) -> float:
    """Angle where the fixed-point gap of site j against letter i
    vanishes, verified down at the map level.

    The gap is evaluated on a uniform grid over one period of the site
    angle; every sign change between consecutive valid grid points is
    bisected until |gap| <= tol, and parameters where a line map loses
    its fixed point are skipped rather than bisected across. The found
    angle must reproduce the word coincidence with coefficient residual
    at most residual_tol.
    """
    if grid_size < 2:
        raise ConfigError("grid must have at least two points")
    if i == fam.singular_letter(j):
        raise ConfigError("companion letter coincides with the site")
    site = fam.singular[j]
    if site.beta == 0.0:
        raise ConfigError("site angle does not move with the parameter")
    period = 2.0 * math.pi / abs(site.beta)

    def gap(a: float) -> Optional[float]:
        try:
            return fixed_point_gap(fam, j, i, a)
        except ExcludedParameterError:
            return None

    grid = [k * period / grid_size for k in range(grid_size + 1)]
    values = [gap(a) for a in grid]
    candidates: List[float] = []
    for k in range(grid_size):
        lo, hi = grid[k], grid[k + 1]
        glo, ghi = values[k], values[k + 1]
        if glo is None or ghi is None:
            continue
        if abs(glo) <= tol:
            candidates.append(lo)
            continue
        if glo * ghi >= 0.0:
            continue
        root = None
        for _ in range(_MAX_BISECT):
            mid = 0.5 * (lo + hi)
            gmid = gap(mid)
            if gmid is None:
                break
            if abs(gmid) <= tol:
                root = mid
                break
            if glo * gmid < 0.0:
                hi = mid
            else:
                lo, glo = mid, gmid
        if root is not None:
            candidates.append(root)
    if not candidates:
        finite = [abs(v) for v in values if v is not None]
        raise NoSignChangeError(
            "no root of the fixed-point gap on a %d-point grid over one "
            "period (smallest |gap| %.3e, %d excluded points)"
            % (grid_size + 1, min(finite) if finite else float("nan"),
               sum(v is None for v in values))
        )
    best = None
    for alpha_star in candidates:
        residual = commutation_residual(fam, alpha_star, j, i)
        if residual <= residual_tol:
            return alpha_star
        if best is None or residual < best[1]:
            best = (alpha_star, residual)
    raise IdentityMismatchError(
        "fixed-point gap vanishes at angle %.12g but the word coincidence "
        "residual is %.3e (tolerance %.1e)" % (best[0], best[1], residual_tol)
    )


@dataclass(frozen=True, eq=False)
class ReducedFamily:
    """All three-letter words minus one of a duplicated pair.

    removed_word and duplicate_word compose to the same map at the angle
    the family was built at; words are in lexicographic letter order
    with the removed one skipped.
    """

    maps: Tuple[AffineMap2, ...]
    words: Tuple[Letters, ...]
    removed_word: Letters
    duplicate_word: Letters

    def __len__(self) -> int:
        return len(self.maps)

    def __iter__(self):
        return iter(self.maps)


def exceptional_family(
    fam: IfsFamily, alpha_star: float, j: int, i: int
) -> ReducedFamily:
    """Three-letter grouping of the family at the coincidence angle,
    with the word (j, j, i) dropped in favor of its duplicate (j, i, j)."""
    anchor = fam.singular_letter(j)
    if i == anchor:
        raise ConfigError("companion letter coincides with the site")
    maps = fam.instantiate(alpha_star)
    removed = (anchor, anchor, i)
    duplicate = (anchor, i, anchor)
    words = tuple(
        w for w in itertools.product(range(fam.n_maps), repeat=3) if w != removed
    )
    composed = tuple(compose_word(maps, w) for w in words)
    return ReducedFamily(composed, words, removed, duplicate)


def _bracket_dict(b: DimensionBracket) -> dict:
    return {
        "lower": b.lower,
        "upper": b.upper,
        "depth": b.depth,
        "certified_upper": b.certified_upper,
    }


@dataclass(frozen=True, eq=False)
class ExceptionalReport:
    """Outcome of a dimension-drop certification at a coincidence angle."""

    alpha_star: float
    identity_residual: float
    original: DimensionBracket
    reduced: DimensionBracket
    strict_gap: bool
    margin: float

    def to_dict(self) -> dict:
        return {
            "alpha_star": self.alpha_star,
            "identity_residual": self.identity_residual,
            "original": _bracket_dict(self.original),
            "reduced": _bracket_dict(self.reduced),
            "strict_gap": self.strict_gap,
            "margin": self.margin,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _reduced_depth(n_maps: int, opts: SolverOptions) -> int:
    # deepest level whose cumulative word count fits the budget
    depth, total = 0, 0
    while depth < opts.depth:
        total += n_maps ** (depth + 1)
        if total > opts.budget:
            break
        depth += 1
    if depth < 1:
        raise ConfigError("budget too small for even one reduced level")
    return depth


def dimension_drop(
    fam: IfsFamily,
    j: int,
    i: int,
    opts: Optional[SolverOptions] = None,
) -> ExceptionalReport:
    """Locate the coincidence angle and compare dimension brackets of
    the full three-letter grouping and the reduced family.

    strict_gap is set only when the certified upper end for the reduced
    family falls below the certified lower end for the original; an
    overlap is reported as-is rather than raised.
    """
    opts = opts or SolverOptions()
    alpha_star = find_common_fixed_point_angle(fam, j, i)
    residual = commutation_residual(fam, alpha_star, j, i)
    original = affinity_dimension(fam, alpha_star, opts)
    if original.upper >= 1.0:
        raise ConfigError(
            "dimension-drop certification needs the affinity bracket below 1 "
            "(upper end %.6g)" % original.upper
        )
    reduced_maps = exceptional_family(fam, alpha_star, j, i).maps
    depth = _reduced_depth(len(reduced_maps), opts)
    upper = pressure_upper_root(reduced_maps, depth, opts.tol, opts)
    reduced = DimensionBracket(0.0, upper, depth, True)
    margin = original.lower - upper
    return ExceptionalReport(
        alpha_star=alpha_star,
        identity_residual=residual,
        original=original,
        reduced=reduced,
        strict_gap=bool(upper < original.lower),
        margin=margin,
    )


def translation_series_gap(
    system: Sequence[LineMap],
    word_a: Sequence[int],
    word_b: Sequence[int],
    terms: int,
) -> Tuple[float, float]:
    """Difference of the truncated coded points of two symbol sequences
    under a 1-d affine system, with a geometric tail bound alongside.

    Words shorter than the truncation length repeat periodically. The
    coded point of a sequence is offset_0 + lam_0 * offset_1 + ...; the
    bound covers the discarded tails of both series.
    """
    if terms < 1:
        raise ConfigError("need at least one term")
    if not word_a or not word_b:
        raise ConfigError("words must be nonempty")
    if not system:
        raise ConfigError("empty line-map system")
    max_lam = max(abs(g.lam) for g in system)
    if max_lam >= 1.0:
        raise ConfigError("line-map slopes must stay below 1 in magnitude")
    max_off = max(abs(g.offset) for g in system)

    def partial(word: Sequence[int]) -> float:
        total, weight = 0.0, 1.0
        for k in range(terms):
            g = system[word[k % len(word)]]
            total += weight * g.offset
            weight *= g.lam
        return total

    tail = 2.0 * max_off * max_lam ** terms / (1.0 - max_lam)
    return partial(word_a) - partial(word_b), tail


def invariance_clouds(
    fam: IfsFamily,
    j: int,
    i: int,
    alpha_star: float,
    n_points: int,
    seed: int,
    burn_in: int = 64,
) -> Tuple[PointCloud, PointCloud]:
    """Coupled random-orbit samples of the three-letter grouping and the
    reduced family at the coincidence angle.

    Both orbits consume the same word stream; the reduced side routes
    the removed word to its duplicate, so at an exact coincidence the
    clouds agree to the residual of the word identity.
    """
    if n_points < 1:
        raise ConfigError("need at least one point")
    reduced = exceptional_family(fam, alpha_star, j, i)
    maps = fam.instantiate(alpha_star)
    full_words = list(itertools.product(range(fam.n_maps), repeat=3))
    coeffs_full = [_scalar_coeffs(compose_word(maps, w)) for w in full_words]
    coeffs_red = [
        _scalar_coeffs(
            compose_word(
                maps,
                reduced.duplicate_word if w == reduced.removed_word else w,
            )
        )
        for w in full_words
    ]

    chunk = 1 << 15
    sizes = []
    left = n_points
    while left > 0:
        take = min(chunk, left)
        sizes.append(take)
        left -= take
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    parts_f, parts_g = [], []
    n_words = len(full_words)
    for size, child in zip(sizes, children):
        rng = np.random.default_rng(child)
        picks = rng.integers(0, n_words, size=burn_in + size).tolist()
        out_f = np.empty((size, 2))
        out_g = np.empty((size, 2))
        xf = yf = xg = yg = 0.0
        k = 0
        for step, pick in enumerate(picks):
            for c, x, y, which in (
                (coeffs_full[pick], xf, yf, 0),
                (coeffs_red[pick], xg, yg, 1),
            ):
                if c[0] == "d":
                    nx = c[1] * x + c[2] * y + c[5]
                    ny = c[3] * x + c[4] * y + c[6]
                else:
                    s = c[1] * (c[4] * x + c[5] * y)
                    nx, ny = c[2] * s + c[6], c[3] * s + c[7]
                if which == 0:
                    xf, yf = nx, ny
                else:
                    xg, yg = nx, ny
            if step >= burn_in:
                out_f[k] = xf, yf
                out_g[k] = xg, yg
                k += 1
        parts_f.append(out_f)
        parts_g.append(out_g)
    cloud_f = PointCloud(np.concatenate(parts_f), seed, "chaos", n_points)
    cloud_g = PointCloud(np.concatenate(parts_g), seed, "chaos", n_points)
    return cloud_f, cloud_g
