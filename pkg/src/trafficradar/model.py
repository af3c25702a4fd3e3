"""Domain types and the closed-form Doppler speed conversions.

A 24 GHz continuous-wave module mixes the transmitted tone with the echo
and outputs the beat (Doppler) frequency. For the modules used here the
shift is 44.68 Hz per km/h of radial velocity. A roadside mount sees the
vehicle at an angle, so the radial velocity is the true speed scaled by
the cosine of the horizontal mounting angle and the cosine of the grazing
angle; both corrections live in :class:`SensorGeometry`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

DEFAULT_DOPPLER_CONSTANT = 44.68  # Hz per km/h at 24.125 GHz
DEFAULT_SAMPLE_RATE = 48000


@dataclass(frozen=True)
class SensorGeometry:
    """Mounting angles and sensor constants shared by every stage.

    azimuth_deg is the horizontal angle between the antenna boresight and
    the road axis; elevation_deg is the grazing angle between the boresight
    and the ground plane. Both must be in [0, 90) so the combined cosine
    correction stays strictly positive and all conversions remain total.
    """

    azimuth_deg: float = 0.0
    elevation_deg: float = 0.0
    doppler_constant: float = DEFAULT_DOPPLER_CONSTANT
    sample_rate: int = DEFAULT_SAMPLE_RATE

    def __post_init__(self) -> None:
        if not 0.0 <= self.azimuth_deg < 90.0:
            raise ValueError(f"azimuth_deg must be in [0, 90), got {self.azimuth_deg}")
        if not 0.0 <= self.elevation_deg < 90.0:
            raise ValueError(f"elevation_deg must be in [0, 90), got {self.elevation_deg}")
        if not self.doppler_constant > 0:
            raise ValueError(f"doppler_constant must be > 0, got {self.doppler_constant}")
        if not (isinstance(self.sample_rate, int) and self.sample_rate > 0):
            raise ValueError(f"sample_rate must be a positive integer, got {self.sample_rate}")

    @property
    def angle_factor(self) -> float:
        """cos(azimuth) * cos(elevation); > 0 by construction."""
        return math.cos(math.radians(self.azimuth_deg)) * math.cos(
            math.radians(self.elevation_deg)
        )

    @property
    def hz_per_kmh(self) -> float:
        """Doppler shift per km/h of road speed after both angle corrections."""
        return self.doppler_constant * self.angle_factor


@dataclass(frozen=True)
class DetectionEvent:
    """One vehicle pass extracted from a spectrogram.

    peak_frequency is the highest above-threshold frequency seen during
    the event; estimated_speed is that frequency converted through the
    angle-corrected Doppler relation (None until speeds are assigned).
    """

    t_start: float
    t_end: float
    peak_frequency: float
    peak_power_db: float
    estimated_speed: float | None = None

    def __post_init__(self) -> None:
        if not self.t_end > self.t_start:
            raise ValueError(f"t_end ({self.t_end}) must be > t_start ({self.t_start})")
        if self.peak_frequency < 0:
            raise ValueError(f"peak_frequency must be >= 0, got {self.peak_frequency}")


def speed_to_doppler(speed_kmh: float, geom: SensorGeometry) -> float:
    """Doppler shift in Hz produced by a vehicle at ``speed_kmh``.

    Applies the sensor constant and both mounting-angle cosines, e.g.
    57.3 km/h at 20/20 degrees -> 2260.7 Hz.
    """
    if speed_kmh < 0:
        raise ValueError(f"speed_kmh must be >= 0, got {speed_kmh}")
    return geom.hz_per_kmh * speed_kmh


def doppler_to_speed(freq_hz: float, geom: SensorGeometry) -> float:
    """Road speed in km/h for a measured Doppler shift; inverse of
    :func:`speed_to_doppler`."""
    if freq_hz < 0:
        raise ValueError(f"freq_hz must be >= 0, got {freq_hz}")
    return freq_hz / geom.hz_per_kmh


def max_unambiguous_speed(geom: SensorGeometry) -> float:
    """Highest radial speed (km/h) the sample rate can represent.

    Nyquist caps the measurable Doppler shift at sample_rate / 2; mounting
    angles do not enter because they only reduce the observed shift.
    At 48 ksps and 44.68 Hz/(km/h) this is 537.2 km/h.
    """
    return (geom.sample_rate / 2.0) / geom.doppler_constant
