"""Figure of the time-1 partition of B^2 into the MSA cells B(k)."""

import io
import logging

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Polygon  # noqa: E402

from selmer_expansions.core.cylinders import (  # noqa: E402
    B2_VERTICES,
    Point2,
    convex_hull,
    msa_cylinder_image_vertices,
    msa_partition_cells,
)
from selmer_expansions.core.numfield import format_rational  # noqa: E402
from selmer_expansions.exceptions import DomainException, OutputException  # noqa: E402

logger = logging.getLogger(__name__)

# Fixed SVG ids so identical input gives identical files
plt.rcParams["svg.hashsalt"] = "selmer-partition"
plt.rcParams["svg.fonttype"] = "none"


def partition_rows(k_max: int) -> list[list[str]]:
    """CSV rows (polygon, k, vertex, x_1, x_2) with exact rational vertices.

    ``polygon`` is ``B`` for the cell B(k) and ``SB`` for its image S B(k).
    """
    rows: list[list[str]] = []
    for k, cell in enumerate(msa_partition_cells(k_max), start=1):
        rows += _polygon_rows("B", k, cell)
    for k in range(1, k_max + 1):
        rows += _polygon_rows("SB", k, convex_hull(msa_cylinder_image_vertices(k)))
    return rows


def _polygon_rows(kind: str, k: int, vertices: list[Point2]) -> list[list[str]]:
    return [
        [kind, str(k), str(index), format_rational(x), format_rational(y)]
        for index, (x, y) in enumerate(vertices)
    ]


def render_partition_svg(k_max: int, show_images: bool = True) -> str:
    """SVG of B^2 with the cells B(1)..B(k_max) and, optionally, the images S B(k)."""
    if k_max < 1:
        raise DomainException("Partition needs k_max >= 1", str(k_max))
    cells = msa_partition_cells(k_max)
    columns = 2 if show_images else 1
    fig, axes = plt.subplots(1, columns, figsize=(5 * columns, 5), squeeze=False)
    try:
        left = axes[0][0]
        _draw_triangle(left)
        for k, cell in enumerate(cells, start=1):
            _draw_polygon(left, cell, f"B({k})", shade=k % 2 == 1)
        left.set_title(f"B(1), ..., B({k_max})")

        if show_images:
            right = axes[0][1]
            _draw_triangle(right)
            for k in range(k_max, 0, -1):
                image = convex_hull(msa_cylinder_image_vertices(k))
                _draw_polygon(right, image, f"SB({k})", shade=k % 2 == 1)
            right.set_title("S B(k)")

        buffer = io.StringIO()
        fig.savefig(buffer, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
    logger.debug("Rendered partition with %d cells", k_max)
    return buffer.getvalue()


def write_partition_svg(k_max: int, output_path: str, show_images: bool = True) -> None:
    """Write the partition figure to ``output_path``.

    Raises:
        OutputException: If writing fails
    """
    svg = render_partition_svg(k_max, show_images)
    try:
        with open(output_path, "w", encoding="utf-8") as f:
            f.write(svg)
    except OSError as e:
        raise OutputException("Failed to write SVG file", str(e)) from e


def _draw_triangle(ax: plt.Axes) -> None:
    corners = [(float(x), float(y)) for x, y in B2_VERTICES]
    ax.add_patch(Polygon(corners, closed=True, fill=False, linewidth=1.5, edgecolor="black"))
    ax.set_xlim(-0.05, 1.05)
    ax.set_ylim(-0.05, 1.05)
    ax.set_aspect("equal")
    ax.set_xlabel("$x_1$")
    ax.set_ylabel("$x_2$")


def _draw_polygon(ax: plt.Axes, vertices: list[Point2], label: str, shade: bool) -> None:
    points = [(float(x), float(y)) for x, y in vertices]
    ax.add_patch(
        Polygon(
            points,
            closed=True,
            facecolor="0.85" if shade else "white",
            edgecolor="black",
            linewidth=0.8,
        )
    )
    if len(points) >= 3:
        cx = sum(x for x, _ in points) / len(points)
        cy = sum(y for _, y in points) / len(points)
        ax.text(cx, cy, label, ha="center", va="center", fontsize=7)
