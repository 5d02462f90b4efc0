"""Multi-position scans: dataset I/O, per-position estimation and a
reproducible object detector.

Dataset CSV (UTF-8, LF)::

    position,sample_index,intensity

with rows grouped by position (strictly increasing) and ``sample_index``
dense from 0 inside each group.  A ``key=value`` sidecar manifest next to
the CSV (same stem, ``.manifest`` suffix) carries ``f0``, optional
``rate_hz`` and, for synthetic data, ``seed`` / ``phantom``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidConfiguration, NumericFailure, ScanFormatError
from .estimators import AmplitudeEstimate, Method, estimate, estimate_sigma
from .signal_synth import DEFAULT_SAMPLES, Phantom, SignalSpec, TimeSeries, make_phantom, phantom_scan
from .sr_theory import optimal_threshold

HEADER = ("position", "sample_index", "intensity")
PROFILE_HEADER = ("position", "method", "amplitude_physical", "amplitude_normalized",
                  "converged", "clamped")


@dataclass(eq=False)
class ScanDataset:
    """Series per scan position.

    ``f0`` is in cycles/sample when ``rate_hz`` is None, otherwise in Hz.
    Equality compares the data (positions, samples, f0, rate), not the
    provenance.
    """

    positions: tuple
    series: dict
    f0: float
    rate_hz: float | None = None
    provenance: str = "synthetic"
    source: str = ""
    manifest: dict = field(default_factory=dict)
    true_profile: dict | None = None

    def __post_init__(self):
        self.positions = tuple(float(p) for p in self.positions)
        if not self.positions:
            raise ValueError("a scan needs at least one position")
        if any(b <= a for a, b in zip(self.positions, self.positions[1:])):
            raise ValueError("scan positions must be strictly increasing")
        if set(self.series) != set(self.positions):
            raise ValueError("series keys must match positions")
        if any(len(self.series[p]) == 0 for p in self.positions):
            raise ValueError("every position needs a non-empty series")

    @property
    def f0_normalized(self) -> float:
        return self.f0 / self.rate_hz if self.rate_hz else self.f0

    def __eq__(self, other):
        if not isinstance(other, ScanDataset):
            return NotImplemented
        return (self.positions == other.positions and self.f0 == other.f0
                and self.rate_hz == other.rate_hz
                and all(np.array_equal(self.series[p].samples, other.series[p].samples)
                        for p in self.positions))


def simulate_scan(phantom: Phantom, n_samples: int = DEFAULT_SAMPLES, seed: int = 0,
                  f0: float = 0.1, sigma: float = 1.0, phase: float = 0.0) -> ScanDataset:
    template = SignalSpec(0.0, f0, phase, sigma, n_samples, seed)
    series = phantom_scan(phantom, template)
    manifest = {"f0": f0, "seed": seed, "phantom": phantom.name,
                "positions": len(phantom.positions), "samples": n_samples, "sigma": sigma,
                "phase": phase}
    if phantom.name == "rod":
        manifest["amplitude"] = max(phantom.amplitude_profile.values())
    elif phantom.name == "flat":
        manifest["amplitude"] = phantom.amplitude_profile[phantom.positions[0]]
    return ScanDataset(phantom.positions, series, f0, None, "synthetic",
                       f"phantom={phantom.name} seed={seed}", manifest,
                       dict(phantom.amplitude_profile))


def manifest_path(path) -> Path:
    return Path(path).with_suffix(".manifest")


def write_manifest(path, values: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key, value in values.items():
            if value is None:
                continue
            fh.write(f"{key}={value!r}\n" if isinstance(value, float) else f"{key}={value}\n")


def read_manifest(path) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ScanFormatError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key] = value
    return out


def write_dataset(dataset: ScanDataset, path) -> Path:
    """Write the CSV and its manifest; returns the manifest path."""
    path = Path(path)
    pos, idx, val = [], [], []
    for p in dataset.positions:
        s = dataset.series[p].samples
        pos.append(np.full(s.size, p))
        idx.append(np.arange(s.size))
        val.append(s)
    table = np.column_stack([np.concatenate(pos), np.concatenate(idx), np.concatenate(val)])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(HEADER) + "\n")
        np.savetxt(fh, table, fmt=["%.17g", "%d", "%.17g"], delimiter=",")
    meta = dict(dataset.manifest)
    meta["f0"] = float(dataset.f0)
    meta["rate_hz"] = None if dataset.rate_hz is None else float(dataset.rate_hz)
    mpath = manifest_path(path)
    write_manifest(mpath, meta)
    return mpath


def _locate_bad_line(lines):
    for i, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != 3:
            raise ScanFormatError(f"line {i}: expected 3 comma-separated fields, got {len(fields)}")
        for name, text in zip(HEADER, fields):
            if not text.strip():
                raise ScanFormatError(f"line {i}: empty {name} field")
            try:
                float(text)
            except ValueError:
                raise ScanFormatError(f"line {i}: {name} {text!r} is not a number") from None
    raise ScanFormatError("unparseable data")  # pragma: no cover


def _parse_float(manifest, key, path):
    try:
        return float(manifest[key])
    except ValueError:
        raise ScanFormatError(f"{path}: manifest {key}={manifest[key]!r} is not a number") from None


def ingest(path, f0: float | None = None, rate_hz: float | None = None) -> ScanDataset:
    """Read and validate a scan CSV (and its manifest, when present).

    ``f0``/``rate_hz`` override the manifest.  Raises
    :class:`ScanFormatError` naming the offending line.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0].strip().lstrip("﻿") != ",".join(HEADER):
        raise ScanFormatError(f"line 1: header must be {','.join(HEADER)!r}")
    if len(lines) < 2:
        raise ScanFormatError("no data rows")
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            raise ScanFormatError(f"line {i}: empty row")
    try:
        table = np.loadtxt(lines[1:], delimiter=",", ndmin=2, dtype=float)
    except ValueError:
        _locate_bad_line(lines)
    if table.shape[1] != 3:
        raise ScanFormatError(f"expected 3 columns, got {table.shape[1]}")
    pos, idx, val = table.T
    bad = ~np.isfinite(table).all(axis=1)
    if bad.any():
        i = int(np.argmax(bad))
        raise ScanFormatError(f"line {i + 2}: non-finite value (NaN or inf)")
    if np.any(idx != np.round(idx)):
        i = int(np.argmax(idx != np.round(idx)))
        raise ScanFormatError(f"line {i + 2}: sample_index {idx[i]!r} is not an integer")
    starts = np.flatnonzero(np.r_[True, pos[1:] != pos[:-1]])
    block_pos = pos[starts]
    if np.any(np.diff(block_pos) <= 0):
        j = int(np.argmax(np.diff(block_pos) <= 0)) + 1
        raise ScanFormatError(f"line {starts[j] + 2}: position {block_pos[j]!r} is not greater "
                              f"than the previous block's {block_pos[j - 1]!r} (non-monotone or regrouped)")
    ends = np.r_[starts[1:], pos.size]
    series = {}
    for s, e in zip(starts, ends):
        expected = np.arange(e - s)
        if not np.array_equal(idx[s:e], expected):
            k = int(np.argmax(idx[s:e] != expected))
            raise ScanFormatError(f"line {s + k + 2}: sample_index {int(idx[s + k])} breaks the dense "
                                  f"0-based sequence of position {pos[s]!r}")
        series[float(pos[s])] = TimeSeries(val[s:e].copy(), rate_hz)

    mpath = manifest_path(path)
    manifest = read_manifest(mpath) if mpath.exists() else {}
    if f0 is None:
        if "f0" not in manifest:
            raise ScanFormatError(f"{path}: no f0 given and no manifest {mpath.name} with f0")
        f0 = _parse_float(manifest, "f0", mpath)
    if rate_hz is None and manifest.get("rate_hz"):
        rate_hz = _parse_float(manifest, "rate_hz", mpath)
    if rate_hz is not None:
        series = {p: TimeSeries(s.samples, rate_hz) for p, s in series.items()}
    positions = tuple(series)
    for key, count in (("positions", len(positions)),):
        if key in manifest and int(float(manifest[key])) != count:
            raise ScanFormatError(f"{mpath}: manifest declares {manifest[key]} positions, "
                                  f"file has {count} (empty or missing position block)")
    if "samples" in manifest:
        want = int(float(manifest["samples"]))
        short = [p for p in positions if len(series[p]) != want]
        if short:
            raise ScanFormatError(f"position {short[0]!r} has {len(series[short[0]])} samples, "
                                  f"manifest declares {want}")
    true_profile = None
    if manifest.get("phantom") in ("rod", "flat", "high", "low"):
        amp = _parse_float(manifest, "amplitude", mpath) if "amplitude" in manifest else None
        ph = make_phantom(manifest["phantom"], len(positions), amp)
        if ph.positions == positions:
            true_profile = dict(ph.amplitude_profile)
    return ScanDataset(positions, series, f0, rate_hz, "ingested", str(path), manifest, true_profile)


@dataclass(frozen=True)
class Detection:
    object_detected: bool
    edge_positions: tuple | None
    profile_correlation: float | None
    baseline: float
    spread: float
    threshold: float


@dataclass(eq=False)
class ScanProfile:
    method: Method
    positions: tuple
    per_position: dict
    detection: Detection | None = None

    def amplitudes(self, physical: bool = False) -> np.ndarray:
        attr = "amplitude_physical" if physical else "amplitude_normalized"
        return np.array([getattr(self.per_position[p], attr) for p in self.positions])

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(PROFILE_HEADER)
            for p in self.positions:
                e = self.per_position[p]
                w.writerow([repr(p), str(e.method), repr(float(e.amplitude_physical)),
                            repr(float(e.amplitude_normalized)), str(e.converged).lower(),
                            str(e.clamped).lower()])


def read_profile_csv(path) -> list:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    if rows and tuple(rows[0]) != PROFILE_HEADER:
        raise ScanFormatError(f"{path}: unexpected profile header {tuple(rows[0])}")
    return rows


def _estimate_one(series, method, f0, gamma, sigma):
    try:
        return estimate(series, method, f0=f0, gamma=gamma, sigma=sigma)
    except (NumericFailure, InvalidConfiguration, ValueError):
        try:
            s = estimate_sigma(series) if sigma is None else sigma
        except ValueError:
            s = math.nan
        return AmplitudeEstimate(method, 0.0, s, converged=False)


def run_scan(dataset: ScanDataset, method, gamma: float | None = None, sigma: float | None = None,
             freq_offset: float = 0.0, detect: bool = True) -> ScanProfile:
    """Estimate the amplitude at every position with one shared quantizer threshold.

    ``freq_offset`` mis-states the frequency given to the estimators by the
    relative amount ``f0 * (1 + freq_offset)``.  A failing position is
    recorded with ``converged=False`` and amplitude 0; the scan goes on.
    """
    method = Method(method)
    gamma = optimal_threshold() if gamma is None else float(gamma)
    f0 = dataset.f0_normalized * (1.0 + freq_offset)
    per_position = {p: _estimate_one(dataset.series[p], method, f0, gamma, sigma)
                    for p in dataset.positions}
    profile = ScanProfile(method, dataset.positions, per_position)
    if detect and len(dataset.positions) >= 7:
        profile.detection = detect_object(profile, true_profile=dataset.true_profile)
    return profile


def _pearson(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.ptp(a) == 0 or np.ptp(b) == 0:
        return None
    da, db = a - a.mean(), b - b.mean()
    denom = math.sqrt(float(da @ da) * float(db @ db))
    if denom == 0:
        return None
    return float(np.clip(da @ db / denom, -1.0, 1.0))


def detect_object(profile, baseline_fraction: float = 0.2, k: float = 4.0, min_run: int = 3,
                  true_profile: dict | None = None) -> Detection:
    """Flag an object when an interior run of at least ``min_run`` positions
    exceeds ``baseline + k * spread``.

    Baseline and spread are the median and median absolute deviation of the
    outer ``baseline_fraction`` of positions on each side.  If the MAD is 0
    while the window is not constant (e.g. many clamped zeros), the mean
    absolute deviation from the median is used instead.  Edges are the
    midpoints between the run ends and their outer neighbours.
    """
    if isinstance(profile, ScanProfile):
        positions = np.array(profile.positions)
        values = profile.amplitudes()
    else:
        positions = np.array(sorted(profile))
        values = np.array([profile[p] for p in positions], dtype=float)
    n = positions.size
    if n < 7:
        raise ValueError(f"object detection needs at least 7 positions, got {n}")
    n_base = max(1, int(math.floor(baseline_fraction * n)))
    window = np.r_[values[:n_base], values[n - n_base:]]
    baseline = float(np.median(window))
    dev = np.abs(window - baseline)
    spread = float(np.median(dev))
    if spread == 0:
        spread = float(np.mean(dev))
    threshold = baseline + k * spread
    above = values > threshold
    best = None
    start = None
    for i in range(n_base, n - n_base + 1):
        inside = i < n - n_base and above[i]
        if inside and start is None:
            start = i
        elif not inside and start is not None:
            if best is None or i - start > best[1] - best[0]:
                best = (start, i)
            start = None
    detected = best is not None and best[1] - best[0] >= min_run
    edges = None
    if detected:
        lo, hi = best[0], best[1] - 1
        edges = (float(0.5 * (positions[lo - 1] + positions[lo])),
                 float(0.5 * (positions[hi] + positions[hi + 1])))
    corr = None
    if true_profile is not None:
        corr = _pearson(values, [true_profile[p] for p in positions])
    return Detection(bool(detected), edges, corr, baseline, spread, threshold)
