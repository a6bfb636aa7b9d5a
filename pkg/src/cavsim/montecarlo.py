"""Fluctuation Monte Carlo and deterministic parameter sweeps.

Randomness is drawn from counter-based Philox streams keyed by
(seed, grid index), with a fixed draw order inside each stream
(cavity 1: C, kappa_ratio, delta_c, delta_a; cavity 2 likewise; then
the two interferometer phases). Results are therefore bit-identical
however the grid points are scheduled, including under the optional
thread pool capped by the CAVSIM_THREADS environment variable.

Out-of-range draws are clamped, not resampled: C at 0 from below and
kappa_ratio into [0, 1]. Clamp counts are reported in the result
metadata (the kappa_ratio clamp fires at the percent level for the
standard fluctuation spec, which puts its mean two sigma below 1).
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .analytic import avg_fidelity_new, avg_fidelity_old, avg_success
from .cavity import CavityParams, reflection_amplitudes
from .entangle import _bell_new_core, _bell_old_core

__all__ = [
    "GaussianSpec",
    "CavityFluctuation",
    "FluctuationSpec",
    "SweepResult",
    "standard_fluctuation_spec",
    "default_c_grid",
    "mc_infidelity_curve",
    "mc_phase_noise",
    "sweep_1d",
]

_SCHEMES = ("new", "old")
_WEIGHT_FLOOR = 1e-24


@dataclass(frozen=True)
class GaussianSpec:
    mean: float
    sigma: float

    def __post_init__(self):
        if not (math.isfinite(self.mean) and math.isfinite(self.sigma)):
            raise ValueError("mean and sigma must be finite")
        if self.sigma < 0.0:
            raise ValueError("sigma must be >= 0")


@dataclass(frozen=True)
class CavityFluctuation:
    """Gaussian distributions of one cavity's parameters.

    Along a cooperativity grid the C distribution is rescaled so that
    sigma/mean stays fixed (the standard spec fluctuates C by 10% of
    its grid value).
    """

    c: GaussianSpec
    kappa_ratio: GaussianSpec
    delta_c: GaussianSpec
    delta_a: GaussianSpec

    def __post_init__(self):
        if self.c.mean <= 0.0:
            raise ValueError("C mean must be positive (it sets the relative sigma)")


@dataclass(frozen=True)
class FluctuationSpec:
    cavity1: CavityFluctuation
    cavity2: CavityFluctuation
    phi1: GaussianSpec
    phi2: GaussianSpec
    trials: int
    seed: int
    window: int = 50

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in a uint64")
        if self.window < 1:
            raise ValueError("window must be >= 1")

    def to_flat_dict(self) -> dict:
        out = {}
        for tag, cav in (("cavity1", self.cavity1), ("cavity2", self.cavity2)):
            for field in ("c", "kappa_ratio", "delta_c", "delta_a"):
                g: GaussianSpec = getattr(cav, field)
                out[f"{tag}_{field}_mean"] = g.mean
                out[f"{tag}_{field}_sigma"] = g.sigma
        out["phi1_mean"] = self.phi1.mean
        out["phi1_sigma"] = self.phi1.sigma
        out["phi2_mean"] = self.phi2.mean
        out["phi2_sigma"] = self.phi2.sigma
        out["trials"] = self.trials
        out["seed"] = self.seed
        out["window"] = self.window
        return out

    @classmethod
    def from_flat_dict(cls, d: dict) -> "FluctuationSpec":
        def cav(tag):
            return CavityFluctuation(
                *(
                    GaussianSpec(float(d[f"{tag}_{f}_mean"]), float(d[f"{tag}_{f}_sigma"]))
                    for f in ("c", "kappa_ratio", "delta_c", "delta_a")
                )
            )

        return cls(
            cavity1=cav("cavity1"),
            cavity2=cav("cavity2"),
            phi1=GaussianSpec(float(d["phi1_mean"]), float(d["phi1_sigma"])),
            phi2=GaussianSpec(float(d["phi2_mean"]), float(d["phi2_sigma"])),
            trials=int(d["trials"]),
            seed=int(d["seed"]),
            window=int(d["window"]),
        )


def standard_fluctuation_spec(
    trials: int = 10_000, seed: int = 2024, sigma_phi: float = 0.0
) -> FluctuationSpec:
    """Standard fluctuation spec: kappa_ratio ~ N(0.9, 0.05), detunings
    ~ N(0, 0.05), C fluctuating by 10% of its grid value, optional
    Gaussian interferometer phases."""
    cav = CavityFluctuation(
        c=GaussianSpec(4.0, 0.4),
        kappa_ratio=GaussianSpec(0.9, 0.05),
        delta_c=GaussianSpec(0.0, 0.05),
        delta_a=GaussianSpec(0.0, 0.05),
    )
    phi = GaussianSpec(0.0, sigma_phi)
    return FluctuationSpec(cavity1=cav, cavity2=cav, phi1=phi, phi2=phi, trials=trials, seed=seed)


def default_c_grid(points: int = 500, c_min: float = 1.0, c_max: float = 10.0) -> np.ndarray:
    return np.linspace(c_min, c_max, points)


def _round12(x: float) -> float:
    return float(f"{float(x):.12g}")


@dataclass(frozen=True)
class SweepResult:
    """One curve: grid, mean values, standard errors, run metadata."""

    xs: tuple
    means: tuple
    stderrs: tuple
    metadata: dict

    def rows(self):
        return list(zip(self.xs, self.means, self.stderrs))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["x", "mean", "stderr"])
            for x, m, e in self.rows():
                writer.writerow([f"{x:.12g}", f"{m:.12g}", f"{e:.12g}"])

    def to_json(self, path) -> None:
        with open(path, "w", newline="") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def to_dict(self) -> dict:
        return {
            "metadata": _rounded(self.metadata),
            "columns": ["x", "mean", "stderr"],
            "rows": [[_round12(x), _round12(m), _round12(e)] for x, m, e in self.rows()],
        }


def _rounded(obj):
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, float):
        return _round12(obj)
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(v) for v in obj]
    if isinstance(obj, np.generic):
        # stray numpy scalar (np.bool_, np.int64, ...): unwrap for json
        return _rounded(obj.item())
    return obj


def _n_threads() -> int:
    raw = os.environ.get("CAVSIM_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"CAVSIM_THREADS must be an integer, got {raw!r}") from exc
    if n < 1:
        raise ValueError("CAVSIM_THREADS must be >= 1")
    return n


def _draw_cavity(rng, cav: CavityFluctuation, c_mean: float, n: int):
    """Fixed draw order: C, kappa_ratio, delta_c, delta_a."""
    rel = cav.c.sigma / cav.c.mean
    c = rng.normal(c_mean, rel * c_mean, n)
    kr = rng.normal(cav.kappa_ratio.mean, cav.kappa_ratio.sigma, n)
    dc = rng.normal(cav.delta_c.mean, cav.delta_c.sigma, n)
    da = rng.normal(cav.delta_a.mean, cav.delta_a.sigma, n)
    clamped_c = int(np.count_nonzero(c < 0.0))
    clamped_kr = int(np.count_nonzero((kr < 0.0) | (kr > 1.0)))
    return np.maximum(c, 0.0), np.clip(kr, 0.0, 1.0), dc, da, clamped_c, clamped_kr


def _mc_point(spec: FluctuationSpec, scheme: str, c_mean: float, index: int):
    """Mean infidelity at one grid point from its own Philox stream."""
    rng = np.random.Generator(
        np.random.Philox(key=np.array([spec.seed, index], dtype=np.uint64))
    )
    n = spec.trials
    c1, k1, dc1, da1, cl_c1, cl_k1 = _draw_cavity(rng, spec.cavity1, c_mean, n)
    c2, k2, dc2, da2, cl_c2, cl_k2 = _draw_cavity(rng, spec.cavity2, c_mean, n)
    f1 = rng.normal(spec.phi1.mean, spec.phi1.sigma, n)
    f2 = rng.normal(spec.phi2.mean, spec.phi2.sigma, n)

    rc1, rnc1 = reflection_amplitudes(c1, dc1, da1, k1)
    rc2, rnc2 = reflection_amplitudes(c2, dc2, da2, k2)
    if scheme == "new":
        with np.errstate(divide="ignore", invalid="ignore"):
            fid, weight = _bell_new_core(rc1, rnc1, rc2, rnc2, f2 - f1)
        valid = weight > _WEIGHT_FLOOR
    else:
        num_phi, den_phi, num_psi, den_psi = _bell_old_core(rc1, rnc1, rc2, rnc2)
        total = den_phi + den_psi
        valid = total > _WEIGHT_FLOOR
        with np.errstate(divide="ignore", invalid="ignore"):
            # herald-probability-weighted average over the two branches
            fid = (num_phi + num_psi) / total
    infid = 1.0 - fid[valid]
    n_valid = infid.size
    mean = float(np.mean(infid)) if n_valid else math.nan
    stderr = float(np.std(infid, ddof=1) / math.sqrt(n_valid)) if n_valid > 1 else 0.0
    return mean, stderr, n - n_valid, cl_c1 + cl_c2, cl_k1 + cl_k2


def _moving_average(means, stderrs, window: int):
    n = len(means)
    out_m = []
    out_e = []
    for i in range(n):
        lo = max(0, i - window // 2)
        hi = min(n, i + (window + 1) // 2)
        seg = means[lo:hi]
        err = stderrs[lo:hi]
        out_m.append(float(np.mean(seg)))
        out_e.append(float(np.sqrt(np.sum(np.square(err))) / len(seg)))
    return out_m, out_e


def mc_infidelity_curve(spec: FluctuationSpec, scheme: str, c_grid=None) -> SweepResult:
    """Mean atom-atom infidelity versus cooperativity under fluctuations.

    For each grid point both cavities are redrawn spec.trials times with
    every parameter fluctuating; the new scheme evaluates the (common)
    heralded Bell fidelity including the two drawn interferometer
    phases, the old scheme the herald-probability-weighted average of
    its two branches. Per-point means are then smoothed with a centered
    moving average of `spec.window` neighboring points (window 1 leaves
    them untouched). Samples where nothing heralds are skipped and
    counted in the metadata.
    """
    if scheme not in _SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected 'new' or 'old'")
    grid = default_c_grid() if c_grid is None else np.asarray(c_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("c_grid must be a non-empty 1-d array")
    if np.any(grid <= 0.0):
        raise ValueError("cooperativity grid values must be positive")

    points = list(enumerate(grid))
    workers = min(_n_threads(), len(points))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda iv: _mc_point(spec, scheme, iv[1], iv[0]), points))
    else:
        results = [_mc_point(spec, scheme, c, i) for i, c in points]

    raw_means = [r[0] for r in results]
    raw_errs = [r[1] for r in results]
    skipped = sum(r[2] for r in results)
    clamped_c = sum(r[3] for r in results)
    clamped_kr = sum(r[4] for r in results)
    means, errs = _moving_average(raw_means, raw_errs, spec.window)

    meta = dict(spec.to_flat_dict())
    meta.update(
        {
            "kind": "mc_infidelity_curve",
            "scheme": scheme,
            "skipped_no_herald": skipped,
            "clamped_c": clamped_c,
            "clamped_kappa_ratio": clamped_kr,
            "grid_points": int(grid.size),
        }
    )
    return SweepResult(
        xs=tuple(float(x) for x in grid),
        means=tuple(means),
        stderrs=tuple(errs),
        metadata=meta,
    )


def mc_phase_noise(
    spec: FluctuationSpec, scheme: str, sigma_phi: float, c_grid=None
) -> SweepResult:
    """Same curve with both interferometer phases drawn as N(0, sigma_phi).

    With sigma_phi = 0 this reproduces mc_infidelity_curve bit for bit
    (the phase draws still consume the same stream positions).
    """
    noisy = replace(
        spec, phi1=GaussianSpec(0.0, sigma_phi), phi2=GaussianSpec(0.0, sigma_phi)
    )
    result = mc_infidelity_curve(noisy, scheme, c_grid)
    result.metadata["kind"] = "mc_phase_noise"
    return result


_SWEEP_AXES = ("zeta", "kappa_ratio", "delta_c", "c")
_QUANTITIES = ("fidelity", "success")


def sweep_1d(
    base: CavityParams, axis: str, values, scheme: str, quantity: str = "fidelity"
) -> SweepResult:
    """Deterministic sweep of a Bloch-averaged quantity along one axis.

    axis is one of zeta / kappa_ratio / delta_c / c; quantity selects
    the averaged fidelity or success probability. Standard errors are
    zero (nothing is sampled).
    """
    if axis not in _SWEEP_AXES:
        raise ValueError(f"unknown axis {axis!r}; expected one of {_SWEEP_AXES}")
    if scheme not in _SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected 'new' or 'old'")
    if quantity not in _QUANTITIES:
        raise ValueError(f"unknown quantity {quantity!r}; expected one of {_QUANTITIES}")
    xs = [float(v) for v in values]
    means = []
    for v in xs:
        p = replace(base, **{axis: v})
        if quantity == "success":
            means.append(avg_success(p, scheme))
        elif scheme == "new":
            means.append(avg_fidelity_new(p))
        else:
            means.append(avg_fidelity_old(p))
    meta = {
        "kind": "sweep_1d",
        "axis": axis,
        "scheme": scheme,
        "quantity": quantity,
        "base_c": base.c,
        "base_delta_c": base.delta_c,
        "base_delta_a": base.delta_a,
        "base_kappa_ratio": base.kappa_ratio,
        "base_zeta": base.zeta,
    }
    return SweepResult(
        xs=tuple(xs),
        means=tuple(means),
        stderrs=tuple(0.0 for _ in xs),
        metadata=meta,
    )
