"""Rician channels for a BS, an RIS and users on a semicircle around the RIS.

Coordinates (metres): the RIS sits at the origin with its URA in the x-z
plane, facing +y.  Users lie on the half circle ``r = d_RU`` in the y > 0
half plane.  The BS sits on the x axis (the line through the semicircle's
diameter) at ``(-d_BR, 0, 0)`` with its ULA along y, broadside towards the RIS.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from hcmslp.errors import ConfigurationError

SPEED_OF_LIGHT = 299_792_458.0


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class SystemGeometry:
    M: int = 32
    N_y: int = 8
    N_z: int = 8
    K: int = 32
    carrier_hz: float = 3.5e9
    d_br: float = 100.0
    d_ru: float = 10.0
    spacing: float = 0.5
    user_angles: tuple[float, ...] | None = None

    def __post_init__(self):
        if min(self.M, self.N_y, self.N_z, self.K) < 1:
            raise ConfigurationError("array sizes and user count must be >= 1")
        if min(self.d_br, self.d_ru, self.carrier_hz, self.spacing) <= 0:
            raise ConfigurationError("distances, carrier and spacing must be positive")
        if self.user_angles is None:
            k = np.arange(1, self.K + 1)
            object.__setattr__(self, "user_angles", tuple(np.pi * (k - 0.5) / self.K))
        angles = np.asarray(self.user_angles, dtype=float)
        if angles.shape != (self.K,):
            raise ConfigurationError(f"expected {self.K} user angles, got {angles.size}")
        if np.any(angles <= 0) or np.any(angles >= np.pi):
            raise ConfigurationError("user angles must lie strictly inside (0, pi)")

    @property
    def N(self) -> int:
        return self.N_y * self.N_z

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    def bs_position(self) -> np.ndarray:
        return np.array([-self.d_br, 0.0, 0.0])

    def user_positions(self) -> np.ndarray:
        a = np.asarray(self.user_angles)
        return np.stack([self.d_ru * np.cos(a), self.d_ru * np.sin(a), np.zeros_like(a)], axis=1)

    def with_random_users(self, rng: np.random.Generator) -> SystemGeometry:
        angles = np.sort(rng.uniform(0.0, np.pi, self.K))
        # uniform draws hit the closed endpoints with probability zero
        return replace(self, user_angles=tuple(angles))


@dataclass(frozen=True)
class FadingParams:
    kappa: float = db_to_linear(3.0)
    c0: float = db_to_linear(-30.0)
    d0: float = 1.0
    alpha_h: float = 3.5
    alpha_g: float = 2.5
    alpha_f: float = 2.8

    def __post_init__(self):
        if self.kappa < 0:
            raise ConfigurationError("kappa must be >= 0")
        if self.c0 <= 0 or self.d0 <= 0:
            raise ConfigurationError("c0 and d0 must be positive")
        if min(self.alpha_h, self.alpha_g, self.alpha_f) <= 0:
            raise ConfigurationError("path-loss exponents must be positive")

    def path_loss(self, d: float, alpha: float) -> float:
        return self.c0 * (d / self.d0) ** (-alpha)


@dataclass(frozen=True, eq=False)
class ChannelSet:
    H: np.ndarray  # K x M, rows h_k^H
    G: np.ndarray  # N x M
    F: np.ndarray  # K x N, rows f_k^H

    def __post_init__(self):
        K, M = self.H.shape
        N = self.G.shape[0]
        if self.G.shape != (N, M) or self.F.shape != (K, N):
            raise ValueError(
                f"inconsistent channel shapes H{self.H.shape} G{self.G.shape} F{self.F.shape}"
            )

    def save(self, path) -> None:
        np.savez(path, H=self.H, G=self.G, F=self.F)

    @classmethod
    def load(cls, path) -> ChannelSet:
        with np.load(path) as z:
            return cls(z["H"], z["G"], z["F"])


@dataclass(frozen=True, eq=False)
class PhaseConfig:
    levels: int
    indices: np.ndarray = field(repr=False)

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=int).copy()
        if self.levels < 2:
            raise ConfigurationError("phase levels Q must be >= 2")
        if idx.ndim != 1 or np.any(idx < 0) or np.any(idx >= self.levels):
            raise ConfigurationError(f"phase indices must lie in [0, {self.levels})")
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)

    @property
    def angles(self) -> np.ndarray:
        return 2.0 * np.pi * self.indices / self.levels

    @property
    def coefficients(self) -> np.ndarray:
        return np.exp(1j * self.angles)

    def __eq__(self, other):
        if not isinstance(other, PhaseConfig):
            return NotImplemented
        return self.levels == other.levels and np.array_equal(self.indices, other.indices)

    def to_json(self) -> str:
        return json.dumps({"levels": self.levels, "indices": self.indices.tolist()})

    @classmethod
    def from_json(cls, text: str) -> PhaseConfig:
        d = json.loads(text)
        return cls(int(d["levels"]), np.asarray(d["indices"], dtype=int))


def steering_ula(angle: float, M: int, spacing: float = 0.5) -> np.ndarray:
    """ULA response ``exp(j 2 pi spacing m sin(angle))``, m = 0..M-1."""
    m = np.arange(M)
    return np.exp(2j * np.pi * spacing * m * np.sin(angle))


def steering_ura(azimuth: float, elevation: float, N_y: int, N_z: int, spacing: float = 0.5):
    """URA response as the Kronecker product of its two axis responses.

    Azimuth is measured from the array normal in the horizontal plane and
    elevation from that plane; the horizontal direction cosine is
    ``sin(az) cos(el)`` and the vertical one ``sin(el)``.
    """
    n_y = np.arange(N_y)
    n_z = np.arange(N_z)
    a_y = np.exp(2j * np.pi * spacing * n_y * np.sin(azimuth) * np.cos(elevation))
    a_z = np.exp(2j * np.pi * spacing * n_z * np.sin(elevation))
    return np.kron(a_y, a_z)


def _ris_angles(direction: np.ndarray) -> tuple[float, float]:
    """(azimuth, elevation) of a unit direction seen from the RIS facing +y."""
    dx, dy, dz = direction
    el = np.arcsin(np.clip(dz, -1.0, 1.0))
    az = np.arctan2(dx, dy)
    return float(az), float(el)


def los_components(geom: SystemGeometry):
    """Deterministic unit-gain LoS matrices (H_los, G_los, F_los) and link distances."""
    lam = geom.wavelength
    bs = geom.bs_position()
    users = geom.user_positions()

    # BS ULA lies along y, broadside along +x
    def bs_angle(target):
        d = target - bs
        return float(np.arcsin(d[1] / np.linalg.norm(d)))

    d_bu = np.linalg.norm(users - bs, axis=1)
    H_los = np.empty((geom.K, geom.M), dtype=complex)
    for k, u in enumerate(users):
        a = steering_ula(bs_angle(u), geom.M, geom.spacing)
        H_los[k] = np.exp(-2j * np.pi * d_bu[k] / lam) * a.conj()

    az, el = _ris_angles(-bs / np.linalg.norm(bs))
    a_ris = steering_ura(az, el, geom.N_y, geom.N_z, geom.spacing)
    a_bs = steering_ula(bs_angle(np.zeros(3)), geom.M, geom.spacing)
    G_los = np.exp(-2j * np.pi * geom.d_br / lam) * np.outer(a_ris, a_bs.conj())

    F_los = np.empty((geom.K, geom.N), dtype=complex)
    for k, u in enumerate(users):
        az, el = _ris_angles(u / np.linalg.norm(u))
        a = steering_ura(az, el, geom.N_y, geom.N_z, geom.spacing)
        F_los[k] = np.exp(-2j * np.pi * geom.d_ru / lam) * a.conj()
    return (H_los, G_los, F_los), (d_bu, geom.d_br, geom.d_ru)


def _cgauss(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def rician(los: np.ndarray, kappa: float, rng: np.random.Generator) -> np.ndarray:
    los_w = np.sqrt(kappa / (kappa + 1.0))
    nlos_w = np.sqrt(1.0 / (kappa + 1.0))
    return los_w * los + nlos_w * _cgauss(rng, los.shape)


def gen_channels(geom: SystemGeometry, fading: FadingParams, rng: np.random.Generator) -> ChannelSet:
    (H_los, G_los, F_los), (d_bu, d_br, d_ru) = los_components(geom)
    pl_h = np.sqrt([fading.path_loss(d, fading.alpha_h) for d in d_bu])[:, None]
    H = pl_h * rician(H_los, fading.kappa, rng)
    G = np.sqrt(fading.path_loss(d_br, fading.alpha_g)) * rician(G_los, fading.kappa, rng)
    F = np.sqrt(fading.path_loss(d_ru, fading.alpha_f)) * rician(F_los, fading.kappa, rng)
    return ChannelSet(H, G, F)


def total_channel(ch: ChannelSet, phases: PhaseConfig) -> np.ndarray:
    """``H + F diag(exp(j theta)) G``."""
    if phases.indices.shape != (ch.F.shape[1],):
        raise ValueError(f"{phases.indices.size} phases for {ch.F.shape[1]} RIS elements")
    return ch.H + (ch.F * phases.coefficients) @ ch.G


def save_geometry(geom: SystemGeometry, fading: FadingParams, path) -> None:
    Path(path).write_text(json.dumps({"geometry": asdict(geom), "fading": asdict(fading)}, indent=2))
