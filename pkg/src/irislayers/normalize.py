"""Rubber-sheet iris normalization.

Remaps the annulus between the pupil and iris boundary circles onto a fixed
radial x angular grid (default 64 x 512).  Row 0 samples the pupil boundary,
the last row the iris boundary; column j corresponds to the angle
theta_j = 2*pi*j / angular, measured from the +x axis with y increasing in
the sin direction (image row index).  The two circles need not be
concentric: for each angle the sampling segment runs from the pupil-boundary
point to the iris-boundary point at that same angle.
"""

from dataclasses import dataclass

import numpy as np


class InvalidAnnotationError(ValueError):
    """Non-positive radius or circle center outside the image."""


class DegenerateAnnotationError(ValueError):
    """Pupil and iris boundary coincide at some angle."""


@dataclass(frozen=True)
class CircleAnnotation:
    """Pupil and iris boundary circles, in pixel coordinates."""

    pupil_cx: float
    pupil_cy: float
    pupil_r: float
    iris_cx: float
    iris_cy: float
    iris_r: float

    def validate(self, height, width):
        if self.pupil_r <= 0 or self.iris_r <= 0:
            raise InvalidAnnotationError(
                f"non-positive radius: pupil_r={self.pupil_r}, iris_r={self.iris_r}"
            )
        for name, cx, cy in (("pupil", self.pupil_cx, self.pupil_cy),
                             ("iris", self.iris_cx, self.iris_cy)):
            if not (0 <= cx < width and 0 <= cy < height):
                raise InvalidAnnotationError(
                    f"{name} center ({cx}, {cy}) outside image {width}x{height}"
                )


def bilinear_sample(image, xs, ys):
    """Bilinear interpolation at fractional (x, y); out-of-bounds clamps to edge."""
    h, w = image.shape
    xs = np.clip(xs, 0.0, w - 1.0)
    ys = np.clip(ys, 0.0, h - 1.0)
    x0 = np.floor(xs).astype(np.intp)
    y0 = np.floor(ys).astype(np.intp)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = xs - x0
    fy = ys - y0
    top = image[y0, x0] * (1 - fx) + image[y0, x1] * fx
    bot = image[y1, x0] * (1 - fx) + image[y1, x1] * fx
    return top * (1 - fy) + bot * fy


def rubber_sheet(image, circles, radial=64, angular=512):
    """Unwrap the iris annulus into a radial x angular texture in [0, 1].

    Samples linearly between the pupil-boundary point and the iris-boundary
    point at each angle; both boundaries are included (denominator radial-1).
    """
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 2:
        raise InvalidAnnotationError("image must be 2-D grayscale")
    h, w = image.shape
    circles.validate(h, w)

    theta = 2.0 * np.pi * np.arange(angular) / angular
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    px = circles.pupil_cx + circles.pupil_r * cos_t
    py = circles.pupil_cy + circles.pupil_r * sin_t
    ix = circles.iris_cx + circles.iris_r * cos_t
    iy = circles.iris_cy + circles.iris_r * sin_t

    seg = np.hypot(ix - px, iy - py)
    if np.any(seg < 1e-9):
        j = int(np.argmin(seg))
        raise DegenerateAnnotationError(
            f"pupil and iris boundaries coincide at angle index {j}"
        )

    t = (np.arange(radial) / (radial - 1))[:, None]
    xs = px[None, :] + t * (ix - px)[None, :]
    ys = py[None, :] + t * (iy - py)[None, :]
    out = bilinear_sample(image, xs, ys)
    return np.clip(out, 0.0, 1.0).astype(np.float32)


def replicate_channels(normalized):
    """Stack a 2-D normalized texture into a 3 x H x W tensor (all channels equal)."""
    normalized = np.asarray(normalized, dtype=np.float32)
    return np.repeat(normalized[None, :, :], 3, axis=0)
