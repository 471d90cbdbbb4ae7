"""Domain-coloured amplitude images.

Hue follows the argument (0 deg at +1, 90 deg at i, 180 deg at -1, 270 deg
at -i), value is ``min(|z|, 1)``, saturation is 1. Channels are
``floor(255 c + 0.5)``.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.colors import hsv_to_rgb

LEGEND_ANCHORS = (1j, -1j, 0, 1, -1)


def complex_to_rgb(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    hue = np.mod(np.angle(z), 2 * np.pi) / (2 * np.pi)
    hue = np.where(hue >= 1.0, 0.0, hue)
    value = np.minimum(np.abs(z), 1.0)
    hsv = np.stack([hue, np.ones_like(hue), value], axis=-1)
    rgb = hsv_to_rgb(hsv)
    return np.floor(255 * rgb + 0.5).astype(np.uint8)


def write_ppm(pixels: np.ndarray, path) -> None:
    pixels = np.ascontiguousarray(pixels, dtype=np.uint8)
    h, w, _ = pixels.shape
    Path(path).write_bytes(b"P6\n%d %d\n255\n" % (w, h) + pixels.tobytes())


def read_ppm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    magic, dims, maxval, body = data.split(b"\n", 3)
    if magic != b"P6" or maxval != b"255":
        raise ValueError("not an 8-bit binary PPM")
    w, h = map(int, dims.split())
    return np.frombuffer(body, dtype=np.uint8).reshape(h, w, 3)


def render_amplitude_grid(traj, path, scale: int = 1) -> np.ndarray:
    """One pixel per (step, basis state); step t is row t."""
    amps = traj.amplitudes if hasattr(traj, "amplitudes") else np.atleast_2d(traj)
    if amps.size == 0:
        raise ValueError("empty trajectory")
    pixels = complex_to_rgb(amps)
    if scale > 1:
        pixels = pixels.repeat(scale, axis=0).repeat(scale, axis=1)
    write_ppm(pixels, path)
    return pixels


def render_legend(path, scale: int = 1) -> np.ndarray:
    """Strip of the anchor colours for i, -i, 0, 1, -1."""
    pixels = complex_to_rgb(np.array([LEGEND_ANCHORS]))
    if scale > 1:
        pixels = pixels.repeat(scale, axis=0).repeat(scale, axis=1)
    write_ppm(pixels, path)
    return pixels


def write_png(pixels: np.ndarray, path) -> None:
    import matplotlib.pyplot as plt

    plt.imsave(path, pixels, format="png", metadata={"Software": None})
