"""JSON encodings of points, symplectic elements, strata and results."""

from __future__ import annotations

import math
from typing import Any

import numpy as np

from .siegel import SiegelPoint, SymplecticElement, make_siegel_point, make_symplectic
from .universal import BoundaryPoint, StratumDescriptor, UniversalPoint

SIG_DIGITS = 15


class InputError(ValueError):
    """Malformed JSON structure (as opposed to a mathematically invalid value)."""


def round_sig(x: float) -> float:
    if not math.isfinite(x):
        return x
    return float(f"{x:.{SIG_DIGITS}g}") + 0.0  # no negative zero


def clean(obj: Any) -> Any:
    """Recursively convert numpy types and round floats to 15 significant digits."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return round_sig(float(obj))
    return obj


def _matrix(data, name: str, g: int) -> np.ndarray:
    try:
        M = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{name} must be a numeric matrix") from exc
    if M.shape != (g, g):
        raise InputError(f"{name} must have shape ({g}, {g}), got {M.shape}")
    return M


def _genus(data: dict) -> int:
    if not isinstance(data, dict) or "g" not in data:
        raise InputError("expected an object with key 'g'")
    g = data["g"]
    if not isinstance(g, int) or isinstance(g, bool) or g < 1:
        raise InputError(f"'g' must be a positive integer, got {g!r}")
    return g


def point_to_json(Z: SiegelPoint) -> dict:
    return {"g": Z.genus, "X": Z.X.tolist(), "Y": Z.Y.tolist()}


def point_from_json(data: dict) -> SiegelPoint:
    g = _genus(data)
    for key in ("X", "Y"):
        if key not in data:
            raise InputError(f"point is missing {key!r}")
    return make_siegel_point(_matrix(data["X"], "X", g), _matrix(data["Y"], "Y", g))


def element_to_json(M: SymplecticElement) -> dict:
    conv = (lambda b: b.astype(np.int64).tolist()) if M.integral else (lambda b: b.tolist())
    return {"g": M.genus, "A": conv(M.A), "B": conv(M.B), "C": conv(M.C), "D": conv(M.D)}


def element_from_json(data: dict) -> SymplecticElement:
    g = _genus(data)
    blocks = []
    for key in "ABCD":
        if key not in data:
            raise InputError(f"element is missing {key!r}")
        blocks.append(_matrix(data[key], key, g))
    return make_symplectic(*blocks)


def universal_to_json(U: UniversalPoint) -> dict:
    return {"g": U.genus, "point": point_to_json(U.point)}


def universal_from_json(data: dict) -> UniversalPoint:
    g = _genus(data)
    if "point" not in data:
        raise InputError("universal point is missing 'point'")
    return UniversalPoint(g, point_from_json(data["point"]))


def descriptor_to_json(d: StratumDescriptor) -> dict:
    return d.to_json()


def descriptor_from_json(data: dict) -> StratumDescriptor:
    if not isinstance(data, dict) or "kind" not in data or "genera" not in data:
        raise InputError("descriptor needs 'kind' and 'genera'")
    return StratumDescriptor.from_json(data)


def boundary_to_json(b: BoundaryPoint) -> dict:
    return {
        "descriptor": descriptor_to_json(b.descriptor),
        "point": None if b.point is None else point_to_json(b.point),
    }


def any_point_from_json(data: dict) -> SiegelPoint:
    """Accept either a point ``{g, X, Y}`` or a universal point ``{g, point}``."""
    if isinstance(data, dict) and "point" in data:
        return universal_from_json(data).point
    return point_from_json(data)


__all__ = [
    "InputError",
    "clean",
    "round_sig",
    "point_to_json",
    "point_from_json",
    "element_to_json",
    "element_from_json",
    "universal_to_json",
    "universal_from_json",
    "descriptor_to_json",
    "descriptor_from_json",
    "boundary_to_json",
    "any_point_from_json",
]
