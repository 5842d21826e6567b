"""Rank-1 cylinders of the MSA and exact rational polygon predicates."""

from dataclasses import dataclass
from fractions import Fraction

from selmer_expansions.core.data_types import PointB
from selmer_expansions.core.numfield import NumberField
from selmer_expansions.core.selmer_maps import msa_branch
from selmer_expansions.exceptions import DomainException

Point2 = tuple[Fraction, Fraction]

# Closed triangle B^2 = {1 >= x_1 >= x_2 >= 0}
B2_VERTICES: list[Point2] = [
    (Fraction(0), Fraction(0)),
    (Fraction(1), Fraction(0)),
    (Fraction(1), Fraction(1)),
]

_RATIONALS = NumberField.rationals()


@dataclass(frozen=True)
class NestingCheck:
    """Outcome of testing S B(k) inside S B(k + 1)."""

    k: int
    contained: bool
    witness: Point2 | None


def msa_cylinder_vertices(k: int, n: int) -> list[tuple[Fraction, ...]]:
    """The 2n vertices of the closed cell B(k).

    Listed as (1,...,1,1/k), (1,...,1,1/(k+1)), ..., (1/k,...,1/k), (1/(k+1),...,1/(k+1)).
    """
    if k < 1 or n < 1:
        raise DomainException("Cylinder needs k >= 1 and n >= 1", f"k={k}, n={n}")
    vertices: list[tuple[Fraction, ...]] = []
    for ones in range(n - 1, -1, -1):
        for value in (Fraction(1, k), Fraction(1, k + 1)):
            vertices.append((Fraction(1),) * ones + (value,) * (n - ones))
    return vertices


def msa_cylinder_image_vertices(k: int, n: int = 2) -> list[Point2]:
    """Images of the vertices of B(k) under the branch S_k (n = 2 only)."""
    if n != 2:
        raise DomainException("Cylinder images are only drawn for n = 2", str(n))
    images: list[Point2] = []
    for vertex in msa_cylinder_vertices(k, 2):
        image = msa_branch(PointB.of(_RATIONALS, vertex), k)
        first, second = (c.rational_value() for c in image.coords)
        images.append((first, second))
    return images


def orientation(a: Point2, b: Point2, c: Point2) -> int:
    """Sign of the cross product (b - a) x (c - a)."""
    cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return (cross > 0) - (cross < 0)


def convex_hull(points: list[Point2]) -> list[Point2]:
    """Counter-clockwise hull without duplicate or collinear vertices."""
    unique = sorted(set(points))
    if len(unique) <= 2:
        return unique

    def half(sequence: list[Point2]) -> list[Point2]:
        chain: list[Point2] = []
        for p in sequence:
            while len(chain) >= 2 and orientation(chain[-2], chain[-1], p) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(unique)
    upper = half(list(reversed(unique)))
    return lower[:-1] + upper[:-1]


def polygon_contains(hull: list[Point2], point: Point2) -> bool:
    """Closed containment of ``point`` in a counter-clockwise convex hull."""
    if len(hull) == 1:
        return point == hull[0]
    if len(hull) == 2:
        a, b = hull
        return orientation(a, b, point) == 0 and min(a, b) <= point <= max(a, b)
    return all(
        orientation(hull[i], hull[(i + 1) % len(hull)], point) >= 0 for i in range(len(hull))
    )


def polygon_inside(inner: list[Point2], outer: list[Point2]) -> bool:
    """Whether the hull of ``inner`` lies in the hull of ``outer``."""
    outer_hull = convex_hull(outer)
    return all(polygon_contains(outer_hull, p) for p in inner)


def image_nesting(k: int) -> NestingCheck:
    """Check S B(k) inside S B(k + 1) and find a point of the difference."""
    inner = msa_cylinder_image_vertices(k)
    outer = msa_cylinder_image_vertices(k + 1)
    inner_hull = convex_hull(inner)
    witness = next((p for p in outer if not polygon_contains(inner_hull, p)), None)
    return NestingCheck(k=k, contained=polygon_inside(inner, outer), witness=witness)


def msa_nonfull_witness(k: int) -> Point2:
    """A point of B^2 outside S B(k): the rank-1 cylinder B(k) is not full."""
    hull = convex_hull(msa_cylinder_image_vertices(k))
    for vertex in B2_VERTICES:
        if not polygon_contains(hull, vertex):
            return vertex
    raise DomainException(f"S B({k}) covers B^2")


def msa_partition_cells(k_max: int) -> list[list[Point2]]:
    """Closed cells B(1), ..., B(k_max) of B^2 as counter-clockwise hulls."""
    if k_max < 1:
        raise DomainException("Partition needs k_max >= 1", str(k_max))
    cells: list[list[Point2]] = []
    for k in range(1, k_max + 1):
        vertices = [(v[0], v[1]) for v in msa_cylinder_vertices(k, 2)]
        cells.append(convex_hull(vertices))
    return cells
