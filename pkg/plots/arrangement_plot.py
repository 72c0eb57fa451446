"""
SVG-Bild einer ebenen Anordnung: Geraden <x, u> = c, beschränkte Zellen
gefüllt (id="cell-<i>"), Ecken als Punkte. Gleiche Eingabe -> gleiche Bytes.
"""
import io

import numpy as np
from matplotlib import rc_context
from matplotlib.figure import Figure
from matplotlib.patches import Polygon
from scipy.spatial import ConvexHull

from arrangement import cell_vertices


def _bounding_box(complex_) -> tuple[float, float, float, float]:
    """
    Box um die Ecken von C, 10% des Durchmessers als Rand.
    Ohne Ecken: Einheitsbox. Eine einzelne Ecke: Einheitsbox um die Ecke.
    """
    pts = np.array([[float(c) for c in v.witness] for v in complex_.faces_by_dim[0]], dtype=float)
    if pts.size == 0:
        return 0.0, 1.0, 0.0, 1.0
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    diameter = float(np.linalg.norm(hi - lo))
    pad = 0.1 * diameter if diameter > 0 else 0.5
    return lo[0] - pad, hi[0] + pad, lo[1] - pad, hi[1] + pad


def _clip_line(h, box):
    # <x, u> = c geschnitten mit dem Rand der Box
    x0, x1, y0, y1 = box
    u0, u1 = float(h.normal[0]), float(h.normal[1])
    c = float(h.offset)
    pts = []
    if u1 != 0:
        for x in (x0, x1):
            y = (c - u0 * x) / u1
            if y0 <= y <= y1:
                pts.append((x, y))
    if u0 != 0:
        for y in (y0, y1):
            x = (c - u1 * y) / u0
            if x0 <= x <= x1:
                pts.append((x, y))
    pts = sorted(set(pts))
    if len(pts) < 2:
        return None
    return pts[0], pts[-1]


class ArrangementPlot:
    def __init__(self, figsize=(6, 6)):
        self.fig = Figure(figsize=figsize)
        self.ax = self.fig.add_subplot(111)

    def update_plot(self, hps, complex_, title=None):
        self.ax.clear()
        box = _bounding_box(complex_)

        # beschränkte 2-Zellen schattiert
        for i, cell in enumerate(complex_.faces_by_dim[2]):
            verts = cell_vertices(complex_, cell)
            pts = np.array([[float(c) for c in v.witness] for v in verts], dtype=float)
            hull = ConvexHull(pts)
            patch = Polygon(pts[hull.vertices], closed=True, facecolor="purple",
                            alpha=0.35, edgecolor="none")
            patch.set_gid(f"cell-{i}")
            self.ax.add_patch(patch)

        for k, h in enumerate(hps):
            seg = _clip_line(h, box)
            if seg is None:
                continue
            (xa, ya), (xb, yb) = seg
            line, = self.ax.plot([xa, xb], [ya, yb], color="dodgerblue", lw=1.2)
            line.set_gid(f"hyperplane-{k}")

        verts = complex_.faces_by_dim[0]
        if verts:
            xs = [float(v.witness[0]) for v in verts]
            ys = [float(v.witness[1]) for v in verts]
            dots, = self.ax.plot(xs, ys, "o", color="black", ms=3)
            dots.set_gid("vertices")

        self.ax.set_xlim(box[0], box[1])
        self.ax.set_ylim(box[2], box[3])
        self.ax.set_aspect("equal", "box")
        self.ax.set_axis_off()
        if title:
            self.ax.set_title(title)

    def to_svg(self) -> str:
        buf = io.StringIO()
        # fester Salt + kein Datum -> bytegleiche Ausgabe
        with rc_context({"svg.hashsalt": "hkmod", "svg.fonttype": "none"}):
            self.fig.savefig(buf, format="svg", metadata={"Date": None})
        return buf.getvalue()
