"""Desk-scale image corruptions and the corruption-error metrics.

Error tables hold top-1 errors as fractions in [0, 1]; CE and mCE are
reported in percent.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, DataFormatError, DegenerateBaselineError

SEVERITY_LEVELS = (1, 2, 3, 4, 5)

#: parameter per severity level 1..5, each monotone in severity
SEVERITY_TABLE: dict[str, tuple[float, ...]] = {
    "gaussian_noise": (0.04, 0.08, 0.12, 0.16, 0.20),  # noise std
    "shot_noise": (60, 25, 12, 5, 3),  # photons per unit intensity
    "impulse_noise": (0.01, 0.02, 0.05, 0.07, 0.10),  # corrupted pixel fraction
    "defocus_blur": (1, 2, 3, 4, 6),  # disk radius in px
    "contrast": (0.75, 0.5, 0.4, 0.3, 0.2),  # contrast factor
    "brightness": (0.05, 0.1, 0.15, 0.2, 0.3),  # additive offset
    "pixelate": (2, 3, 4, 6, 8),  # block size in px
}
CORRUPTIONS = tuple(SEVERITY_TABLE)


@dataclass(frozen=True)
class Severity:
    level: int
    value: float

    @classmethod
    def of(cls, corruption: str, level: int) -> "Severity":
        if corruption not in SEVERITY_TABLE:
            raise ArgumentError(f"unknown corruption {corruption!r}")
        if level not in SEVERITY_LEVELS:
            raise ArgumentError(f"severity must be in 1..5, got {level!r}")
        return cls(level, SEVERITY_TABLE[corruption][level - 1])


def disk_kernel(radius: float) -> np.ndarray:
    r = int(np.ceil(radius))
    yy, xx = np.mgrid[-r : r + 1, -r : r + 1]
    disk = (yy**2 + xx**2 <= radius**2).astype(np.float64)
    return disk / disk.sum()


def _filter_planes(x: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    r = kernel.shape[0] // 2
    lead = x.shape[:-2]
    h, w = x.shape[-2:]
    xp = np.pad(x, [(0, 0)] * len(lead) + [(r, r), (r, r)], mode="edge")
    out = np.zeros_like(x)
    for i in range(kernel.shape[0]):
        for j in range(kernel.shape[1]):
            if kernel[i, j]:
                out += kernel[i, j] * xp[..., i : i + h, j : j + w]
    return out


def _pixelate(x: np.ndarray, block: int) -> np.ndarray:
    """Replace each ``block`` x ``block`` tile by its mean (edge tiles may be smaller)."""
    block = int(block)
    if block <= 1:
        return x.copy()
    h, w = x.shape[-2:]
    starts_r = np.arange(0, h, block)
    starts_c = np.arange(0, w, block)
    sums = np.add.reduceat(np.add.reduceat(x, starts_r, axis=-2), starts_c, axis=-1)
    counts = np.outer(np.diff(np.append(starts_r, h)), np.diff(np.append(starts_c, w)))
    means = sums / counts
    rows = np.arange(h) // block
    cols = np.arange(w) // block
    return means[..., rows[:, None], cols[None, :]]


def corrupt(image, corruption: str, severity: Severity | int, seed: int = 0) -> np.ndarray:
    """Apply one corruption to an image or batch with values in [0, 1].

    The last two axes are spatial. Output is clipped to [0, 1] and fully
    determined by ``(image, corruption, severity, seed)``.
    """
    if corruption not in SEVERITY_TABLE:
        raise ArgumentError(f"unknown corruption {corruption!r}; known: {', '.join(CORRUPTIONS)}")
    if not isinstance(severity, Severity):
        severity = Severity.of(corruption, severity)
    x = np.asarray(image, dtype=np.float64)
    if x.ndim < 2:
        raise ArgumentError("image needs at least two spatial axes")
    if x.size and (x.min() < 0.0 or x.max() > 1.0):
        raise ArgumentError("image values must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    v = severity.value

    if corruption == "gaussian_noise":
        out = x + rng.normal(0.0, 1.0, size=x.shape) * v
    elif corruption == "shot_noise":
        out = rng.poisson(x * v) / v
    elif corruption == "impulse_noise":
        u = rng.random(x.shape)
        out = np.where(u < v / 2, 0.0, np.where(u < v, 1.0, x))
    elif corruption == "defocus_blur":
        out = _filter_planes(x, disk_kernel(v)) if v > 0 else x.copy()
    elif corruption == "contrast":
        mean = x.mean(axis=(-2, -1), keepdims=True)
        # written so that a factor of exactly 1 returns x unchanged
        out = x * v + mean * (1.0 - v)
    elif corruption == "brightness":
        out = x + v
    else:
        out = _pixelate(x, v)
    return np.clip(out, 0.0, 1.0)


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------


@dataclass
class ErrorTable:
    entries: dict[str, list[float]] = field(default_factory=dict)
    clean_error: float = 0.0

    def __post_init__(self):
        self.entries = {c: [float(e) for e in errs] for c, errs in self.entries.items()}
        for c, errs in self.entries.items():
            if len(errs) != len(SEVERITY_LEVELS):
                raise DataFormatError(f"{c}: expected 5 severity entries, got {len(errs)}")
            if any(not 0.0 <= e <= 1.0 for e in errs):
                raise DataFormatError(f"{c}: errors must lie in [0, 1]")
        if not 0.0 <= float(self.clean_error) <= 1.0:
            raise DataFormatError("clean_error must lie in [0, 1]")
        self.clean_error = float(self.clean_error)

    def to_dict(self) -> dict:
        return {"entries": self.entries, "clean_error": self.clean_error}

    @classmethod
    def from_dict(cls, d: dict) -> "ErrorTable":
        unknown = set(d) - {"entries", "clean_error"}
        if unknown or "entries" not in d:
            raise DataFormatError(f"not an ErrorTable object (keys {sorted(d)})")
        return cls(dict(d["entries"]), d.get("clean_error", 0.0))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["corruption", "severity", "error"])
        writer.writerow(["clean", 0, repr(self.clean_error)])
        for c, errs in self.entries.items():
            for s, e in zip(SEVERITY_LEVELS, errs):
                writer.writerow([c, s, repr(e)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ErrorTable":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["corruption", "severity", "error"]:
            raise DataFormatError("ErrorTable CSV must start with header corruption,severity,error")
        clean = 0.0
        cells: dict[str, dict[int, float]] = {}
        try:
            for c, s, e in rows[1:]:
                if c == "clean":
                    clean = float(e)
                else:
                    cells.setdefault(c, {})[int(s)] = float(e)
        except ValueError as exc:
            raise DataFormatError(f"bad ErrorTable CSV row: {exc}") from exc
        entries = {}
        for c, by_s in cells.items():
            if sorted(by_s) != list(SEVERITY_LEVELS):
                raise DataFormatError(f"{c}: severities {sorted(by_s)} are not 1..5")
            entries[c] = [by_s[s] for s in SEVERITY_LEVELS]
        return cls(entries, clean)


@dataclass
class CorruptionReport:
    ce: dict[str, float]
    mce: float
    clean_error: float

    def to_dict(self) -> dict:
        return {"ce": self.ce, "mce": self.mce, "clean_error": self.clean_error}

    @classmethod
    def from_dict(cls, d: dict) -> "CorruptionReport":
        if set(d) != {"ce", "mce", "clean_error"}:
            raise DataFormatError(f"not a CorruptionReport object (keys {sorted(d)})")
        return cls({k: float(v) for k, v in d["ce"].items()}, float(d["mce"]), float(d["clean_error"]))


def corruption_error(f: ErrorTable, baseline: ErrorTable, corruption: str) -> float:
    """Severity-summed error of ``f`` relative to ``baseline``, in percent."""
    for name, table in (("model", f), ("baseline", baseline)):
        if corruption not in table.entries:
            raise ArgumentError(f"{name} table has no entry for {corruption!r}")
    denom = sum(baseline.entries[corruption])
    if denom <= 0:
        raise DegenerateBaselineError(f"baseline errors for {corruption!r} sum to zero")
    return 100.0 * sum(f.entries[corruption]) / denom


def mean_corruption_error(ce_values) -> float:
    values = list(ce_values.values()) if isinstance(ce_values, dict) else list(ce_values)
    if not values:
        raise ArgumentError("mCE needs at least one CE value")
    return float(sum(values) / len(values))


def corruption_report(f: ErrorTable, baseline: ErrorTable) -> CorruptionReport:
    ce = {c: corruption_error(f, baseline, c) for c in f.entries}
    return CorruptionReport(ce, mean_corruption_error(ce), f.clean_error)


def dumps(obj) -> str:
    return json.dumps(obj.to_dict(), indent=2, sort_keys=True)
