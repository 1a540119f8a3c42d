#!/usr/bin/env python3
"""
🎨 HEATMAP - Cell-grid renders of datasets with missing cells highlighted

One filled square per cell; values in [0, 1] map through a matplotlib
colormap, missing cells get the missing color. Output is binary PPM (P6)
through Pillow or SVG 1.1 through svgwrite, chosen by file extension.
"""

import logging
import os
from typing import Optional, Tuple

import numpy as np
import svgwrite
from matplotlib import colormaps
from matplotlib.colors import to_rgb
from PIL import Image

from backend.datasets import AmputedDataset, CompleteDataset
from backend.errors import ValidationError
from config.settings import Config

logger = logging.getLogger(__name__)

FORMATS = ('.ppm', '.svg')


def _palette(name: str):
    lookup = {key.lower(): key for key in colormaps}
    if name.lower() not in lookup:
        raise ValidationError("palette", f"unknown colormap {name!r}")
    return colormaps[lookup[name.lower()]]


def _as_masked(data) -> np.ma.MaskedArray:
    if isinstance(data, AmputedDataset):
        return data.values
    if isinstance(data, CompleteDataset):
        return np.ma.MaskedArray(data.values, mask=np.zeros(data.shape, dtype=bool))
    if isinstance(data, np.ma.MaskedArray):
        return data
    return np.ma.masked_invalid(np.asarray(data, dtype=float))


def cell_colors(data, palette: Optional[str] = None,
                missing_color: str = Config.MISSING_COLOR) -> np.ndarray:
    """n x d x 3 uint8 colors, one per cell"""
    values = _as_masked(data)
    if values.ndim != 2:
        raise ValidationError("matrix", "expected a 2-D matrix")
    missing = np.ma.getmaskarray(values)
    present = values.data[~missing]
    if present.size and (np.any(~np.isfinite(present)) or present.min() < 0.0 or present.max() > 1.0):
        raise ValidationError("matrix", "values must lie in [0, 1] (or be missing)")
    cmap = _palette(palette or Config.DEFAULT_PALETTE)
    rgba = cmap(np.where(missing, 0.0, values.data))
    colors = np.round(rgba[..., :3] * 255).astype(np.uint8)
    colors[missing] = np.round(np.array(to_rgb(missing_color)) * 255).astype(np.uint8)
    return colors


def _hex(rgb: Tuple[int, int, int]) -> str:
    return '#%02x%02x%02x' % tuple(int(c) for c in rgb)


def render_heatmap(data, path: str, palette: Optional[str] = None, cell_size: Optional[int] = None) -> str:
    """Write a PPM or SVG heatmap of `data` to `path`"""
    extension = os.path.splitext(path)[1].lower()
    if extension not in FORMATS:
        raise ValidationError("path", f"unsupported image format {extension!r}; use .ppm or .svg")
    size = int(cell_size or Config.CELL_SIZE)
    colors = cell_colors(data, palette)
    n_rows, n_cols, _ = colors.shape
    if extension == '.ppm':
        pixels = np.repeat(np.repeat(colors, size, axis=0), size, axis=1)
        Image.fromarray(np.ascontiguousarray(pixels)).save(path, format='PPM')
    else:
        drawing = svgwrite.Drawing(path, size=(n_cols * size, n_rows * size), profile='full')
        for i in range(n_rows):
            for j in range(n_cols):
                drawing.add(drawing.rect(insert=(j * size, i * size), size=(size, size),
                                         fill=_hex(colors[i, j])))
        drawing.save()
    logger.info("rendered %dx%d heatmap to %s", n_rows, n_cols, path)
    return path
