"""Scale-true SVG rendering of dendrograms.

The vertical axis is depth in swadesh units (present day at the bottom),
the horizontal axis carries chain widths at the same scale. Languages are
drawn as rhombi, isolects (chain endpoints) as points. The root link is
drawn in both limiting configurations: a maximal-width chain and a deepest
ancestor point, both dashed since the data cannot decide between them.
"""

import math

from .dendrogram import Dendrogram, Leaf, RootLink, attach_depth, root_geometry

__all__ = ["render_svg"]

_FMT = "{:.3f}"


def _fmt(x: float) -> str:
    return _FMT.format(x)


class _Canvas:
    def __init__(self):
        self.chains = []  # ((x1, d1), (x2, d2), width)
        self.edges = []  # ((x, d_top), (x, d_bottom), length)
        self.points = []  # (x, d)
        self.leaves = []  # (x, label)
        self.dashed = []  # ((x1, d1), (x2, d2))
        self.texts = []  # (x, d, text, anchor)


def _place(node, x_attach: float, canvas: _Canvas) -> None:
    if isinstance(node, Leaf):
        canvas.leaves.append((x_attach, node.label))
        return
    if node.attach_side == "left":
        x_left = x_attach
    else:
        x_left = x_attach - node.width
    x_right = x_left + node.width
    d_left = node.left_edge + attach_depth(node.left)
    d_right = node.right_edge + attach_depth(node.right)
    canvas.chains.append(((x_left, d_left), (x_right, d_right), node.width))
    canvas.points.append((x_left, d_left))
    canvas.points.append((x_right, d_right))
    if node.width > 1e-9:
        canvas.texts.append(((x_left + x_right) / 2.0, max(d_left, d_right) + 0.8,
                             _fmt(node.width), "middle"))
    for child, edge, x_end, d_end in (
        (node.left, node.left_edge, x_left, d_left),
        (node.right, node.right_edge, x_right, d_right),
    ):
        child_top = attach_depth(child)
        canvas.edges.append(((x_end, d_end), (x_end, child_top), edge))
        if edge > 1e-9:
            canvas.texts.append((x_end + 0.4, (d_end + child_top) / 2.0, _fmt(edge), "start"))
        _place(child, x_end, canvas)


def _layout(d: Dendrogram):
    canvas = _Canvas()
    if isinstance(d.root, RootLink):
        h_l = attach_depth(d.root.left)
        h_r = attach_depth(d.root.right)
        gap = max(d.root.length - abs(h_l - h_r), 2.0)
        _place(d.root.left, 0.0, canvas)
        _place(d.root.right, gap, canvas)
        chain_geom = root_geometry(d, variant="max_chain")
        point_geom = root_geometry(d, variant="deep_point")
        # variant 1: widest possible chain at the deeper endpoint's level
        deep = chain_geom.depth
        canvas.dashed.append(((0.0, h_l), (0.0, deep)))
        canvas.dashed.append(((gap, h_r), (gap, deep)))
        canvas.dashed.append(((0.0, deep), (gap, deep)))
        canvas.texts.append((gap / 2.0, deep + 0.8,
                             f"chain variant, width {_fmt(chain_geom.chain_width)}", "middle"))
        # variant 2: single deepest ancestor point O
        x_o = gap / 2.0
        canvas.dashed.append(((x_o, point_geom.depth), (0.0, h_l)))
        canvas.dashed.append(((x_o, point_geom.depth), (gap, h_r)))
        canvas.points.append((x_o, point_geom.depth))
        canvas.texts.append((x_o + 0.4, point_geom.depth + 1.2,
                             f"O (depth {_fmt(point_geom.depth)})", "start"))
        canvas.texts.append((x_o, max(h_l, h_r) - 0.8,
                             f"link {_fmt(d.root.length)}", "middle"))
        top = point_geom.depth
    else:
        _place(d.root, 0.0, canvas)
        top = 0.0
        for (_, d1), (_, d2), _ in canvas.chains:
            top = max(top, d1, d2)
        for (_, d1), _, _ in canvas.edges:
            top = max(top, d1)
    return canvas, top


def render_svg(d: Dendrogram, scale: float = 14.0) -> str:
    """Render the dendrogram to an SVG string (depth to scale, no timestamps)."""
    canvas, top = _layout(d)
    top = max(top, 1.0)
    xs = [x for x, _ in canvas.points]
    xs += [x for x, _ in canvas.leaves]
    xs += [p[0] for seg in canvas.dashed for p in seg]
    x_min, x_max = (min(xs), max(xs)) if xs else (0.0, 1.0)

    margin = 60.0
    label_room = 110.0

    def px(x: float) -> float:
        return margin + (x - x_min) * scale

    def py(depth: float) -> float:
        return margin + (top + 1.0 - depth) * scale

    width = px(x_max) + margin + 40.0
    height = py(0.0) + label_room

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" '
        f'height="{height:.0f}" viewBox="0 0 {width:.0f} {height:.0f}">',
        '<rect width="100%" height="100%" fill="white"/>',
        '<g font-family="sans-serif" font-size="11" fill="black">',
    ]

    # depth ruler
    axis_x = margin / 2.0
    tick_step = 5 if top <= 60 else 10
    parts.append(
        f'<line x1="{axis_x:.1f}" y1="{py(0.0):.1f}" x2="{axis_x:.1f}" '
        f'y2="{py(top + 1.0):.1f}" stroke="#888" stroke-width="1"/>'
    )
    for tick in range(0, int(math.ceil(top)) + 1, tick_step):
        y = py(float(tick))
        parts.append(
            f'<line x1="{axis_x - 3:.1f}" y1="{y:.1f}" x2="{axis_x + 3:.1f}" '
            f'y2="{y:.1f}" stroke="#888" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{axis_x - 6:.1f}" y="{y + 4:.1f}" text-anchor="end" '
            f'fill="#555">{tick}</text>'
        )
    parts.append(
        f'<text x="{axis_x:.1f}" y="{py(top + 1.0) - 8:.1f}" text-anchor="middle" '
        f'fill="#555">swadesh</text>'
    )

    for (x1, d1), (x2, d2) in canvas.dashed:
        parts.append(
            f'<line x1="{px(x1):.1f}" y1="{py(d1):.1f}" x2="{px(x2):.1f}" '
            f'y2="{py(d2):.1f}" stroke="#666" stroke-width="1.2" '
            f'stroke-dasharray="5,4"/>'
        )
    for (x1, d1), (x2, d2), _ in canvas.chains:
        parts.append(
            f'<line x1="{px(x1):.1f}" y1="{py(d1):.1f}" x2="{px(x2):.1f}" '
            f'y2="{py(d2):.1f}" stroke="black" stroke-width="2.6"/>'
        )
    for (x1, d1), (x2, d2), _ in canvas.edges:
        parts.append(
            f'<line x1="{px(x1):.1f}" y1="{py(d1):.1f}" x2="{px(x2):.1f}" '
            f'y2="{py(d2):.1f}" stroke="black" stroke-width="1.3"/>'
        )
    for x, depth in canvas.points:
        parts.append(
            f'<circle cx="{px(x):.1f}" cy="{py(depth):.1f}" r="2.4" fill="black"/>'
        )
    r = 5.0
    for x, label in canvas.leaves:
        cx, cy = px(x), py(0.0)
        parts.append(
            f'<polygon points="{cx:.1f},{cy - r:.1f} {cx + r:.1f},{cy:.1f} '
            f'{cx:.1f},{cy + r:.1f} {cx - r:.1f},{cy:.1f}" fill="white" '
            f'stroke="black" stroke-width="1.3"/>'
        )
        parts.append(
            f'<text x="{cx:.1f}" y="{cy + r + 4:.1f}" '
            f'transform="rotate(-55 {cx:.1f} {cy + r + 4:.1f})" '
            f'text-anchor="end">{label}</text>'
        )
    for x, depth, text, anchor in canvas.texts:
        parts.append(
            f'<text x="{px(x):.1f}" y="{py(depth):.1f}" text-anchor="{anchor}" '
            f'fill="#333" font-size="10">{text}</text>'
        )
    parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
