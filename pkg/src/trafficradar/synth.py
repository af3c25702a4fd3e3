"""Synthetic baseband generator for pass-by scenarios.

Builds the beat-frequency waveform a roadside CW sensor would record for
vehicles driving along a straight lane past the mount point. Each pass is
rendered as a phase-continuous chirp: the instantaneous Doppler frequency
follows the exact 2-D geometry (sensor at the origin, travel line at a
fixed lateral offset), so the shift is largest while the vehicle is far
out and collapses to zero at closest approach. Amplitude follows an
inverse-square law in range with an optional Gaussian azimuth beam;
elevation is folded in as a fixed cosine, matching the estimator model.

The output doubles as the test oracle: `expected_detections` reports the
true pass times and speeds for scoring the analysis pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import SensorGeometry
from .wavio import Recording

KMH_TO_MS = 1.0 / 3.6
MAX_INTERFERENCE_HZ = 700.0  # supply/amplifier noise lives below this

LANES = ("close", "far")


class ScenarioError(ValueError):
    """Invalid scenario description; message names the offending field."""


@dataclass(frozen=True)
class VehiclePass:
    """One vehicle travelling at constant speed along the lane line.

    Position along the road axis at time t is
    ``start_along_m - speed * (t - start_time_s)`` with the sensor at the
    origin, so positive start_along_m means the vehicle approaches, passes
    the sensor at range lateral_offset_m, and recedes. reflectivity scales
    the echo amplitude (radar cross-section proxy); lane is a label used
    only for ground-truth export.
    """

    speed_kmh: float
    lateral_offset_m: float
    start_along_m: float
    start_time_s: float = 0.0
    reflectivity: float = 1.0
    lane: str = "close"

    def __post_init__(self) -> None:
        if not self.speed_kmh > 0:
            raise ScenarioError(f"speed_kmh must be > 0, got {self.speed_kmh}")
        if not self.lateral_offset_m > 0:
            raise ScenarioError(f"lateral_offset_m must be > 0, got {self.lateral_offset_m}")
        if not self.reflectivity > 0:
            raise ScenarioError(f"reflectivity must be > 0, got {self.reflectivity}")
        if self.lane not in LANES:
            raise ScenarioError(f"lane must be one of {LANES}, got {self.lane!r}")

    @property
    def speed_ms(self) -> float:
        return self.speed_kmh * KMH_TO_MS

    @property
    def closest_approach_time_s(self) -> float:
        return self.start_time_s + self.start_along_m / self.speed_ms


@dataclass(frozen=True)
class NoiseModel:
    """Additive noise: a white Gaussian floor plus low-frequency tones.

    white_noise_db is the standard deviation of the floor relative to unit
    amplitude (-inf disables it). interference_tones are (frequency_hz,
    amplitude) pairs modelling supply and amplifier hum; they must sit
    below 700 Hz where the analysis band starts. The seed makes renders
    reproducible.
    """

    white_noise_db: float = float("-inf")
    interference_tones: tuple[tuple[float, float], ...] = ()
    seed: int = 0

    def __post_init__(self) -> None:
        tones = tuple((float(f), float(a)) for f, a in self.interference_tones)
        object.__setattr__(self, "interference_tones", tones)
        for i, (freq, amp) in enumerate(tones):
            if not 0.0 <= freq < MAX_INTERFERENCE_HZ:
                raise ScenarioError(
                    f"interference_tones[{i}]: frequency must be in [0, {MAX_INTERFERENCE_HZ}),"
                    f" got {freq}"
                )
            if amp < 0:
                raise ScenarioError(f"interference_tones[{i}]: amplitude must be >= 0, got {amp}")

    @property
    def white_noise_sigma(self) -> float:
        if self.white_noise_db == float("-inf"):
            return 0.0
        return 10.0 ** (self.white_noise_db / 20.0)


@dataclass(frozen=True)
class Scenario:
    """World description for one synthetic recording.

    beam_width_deg, when set, enables a Gaussian azimuth beam (3 dB full
    width) centred on the geometry's azimuth boresight; the default is an
    isotropic antenna over the road half-plane. amplitude_ceiling caps the
    inverse-square echo amplitude near closest approach.
    """

    geometry: SensorGeometry
    duration_s: float
    vehicles: tuple[VehiclePass, ...] = ()
    noise: NoiseModel = field(default_factory=NoiseModel)
    beam_width_deg: float | None = None
    amplitude_ceiling: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "vehicles", tuple(self.vehicles))
        if not self.duration_s > 0:
            raise ScenarioError(f"duration_s must be > 0, got {self.duration_s}")
        if self.beam_width_deg is not None and not self.beam_width_deg > 0:
            raise ScenarioError(f"beam_width_deg must be > 0, got {self.beam_width_deg}")
        if not self.amplitude_ceiling > 0:
            raise ScenarioError(f"amplitude_ceiling must be > 0, got {self.amplitude_ceiling}")
        for i, p in enumerate(self.vehicles):
            if p.start_time_s < 0:
                raise ScenarioError(f"vehicles[{i}].start_time_s must be >= 0, got {p.start_time_s}")
            if p.start_along_m < 0:
                raise ScenarioError(
                    f"vehicles[{i}].start_along_m must be >= 0, got {p.start_along_m}"
                )
            if p.closest_approach_time_s > self.duration_s:
                raise ScenarioError(
                    f"vehicles[{i}]: closest approach at {p.closest_approach_time_s:.2f} s"
                    f" falls outside the {self.duration_s:.2f} s recording"
                )


def instantaneous_radial_speed(p: VehiclePass, geom: SensorGeometry, t) -> np.ndarray | float:
    """Signed radial speed in km/h seen by the sensor at time(s) ``t``.

    Positive while approaching, zero at closest approach, negative while
    receding; zero before the pass starts. The horizontal line-of-sight
    angle comes from the exact positions; elevation contributes the fixed
    cos(grazing angle) factor.
    """
    t = np.asarray(t, dtype=np.float64)
    tau = t - p.start_time_s
    x = p.start_along_m - p.speed_ms * tau
    r = np.hypot(x, p.lateral_offset_m)
    cos_phi = math.cos(math.radians(geom.elevation_deg))
    radial = p.speed_kmh * (x / r) * cos_phi
    radial = np.where(tau >= 0.0, radial, 0.0)
    return radial if radial.ndim else float(radial)


def expected_detections(scenario: Scenario) -> list[tuple[float, float]]:
    """Ground truth for scoring: (closest-approach time, true speed km/h)
    per vehicle, sorted by time."""
    times = [(p.closest_approach_time_s, p.speed_kmh) for p in scenario.vehicles]
    return sorted(times)


def _beam_voltage_gain(x: np.ndarray, offset_m: float, boresight_deg: float,
                       width_deg: float) -> np.ndarray:
    """Gaussian azimuth pattern, 3 dB full width ``width_deg``, applied on
    voltage (half the dB attenuation of the power pattern)."""
    los_deg = np.degrees(np.arctan2(offset_m, x))
    delta = (los_deg - boresight_deg) / (width_deg / 2.0)
    return np.asarray(0.5 ** (delta * delta / 2.0))


def render_pass(p: VehiclePass, geom: SensorGeometry, *, duration_s: float,
                beam_width_deg: float | None = None, amplitude_ceiling: float = 1.0,
                travel_cutoff_m: float = 150.0, taper_s: float = 0.05,
                ) -> tuple[int, np.ndarray]:
    """Render one vehicle's contribution.

    Returns (start_sample_index, float64 samples). The support is clipped
    to where the vehicle is within travel_cutoff_m of the sensor along the
    road and tapered with short cosine ramps, so distant (inaudible) tail
    samples are never computed. Everything is a function of time since
    start_time_s, which keeps a delayed copy of the same pass sample-exact
    under time shift.
    """
    fs = geom.sample_rate
    v = p.speed_ms
    tau_enter = max(0.0, (p.start_along_m - travel_cutoff_m) / v)
    tau_exit = (p.start_along_m + travel_cutoff_m) / v
    t_begin = p.start_time_s + tau_enter
    t_end = min(duration_s, p.start_time_s + tau_exit)
    n0 = int(math.ceil(t_begin * fs - 1e-9))
    n1 = int(math.floor(t_end * fs))
    if n1 <= n0:
        return 0, np.zeros(0)

    n = np.arange(n0, n1, dtype=np.float64)
    tau = (n - p.start_time_s * fs) / fs
    x = p.start_along_m - v * tau
    r2 = x * x + p.lateral_offset_m * p.lateral_offset_m
    r = np.sqrt(r2)

    cos_phi = math.cos(math.radians(geom.elevation_deg))
    freq_hz = geom.doppler_constant * p.speed_kmh * (x / r) * cos_phi
    phase_cycles = np.cumsum(freq_hz) / fs

    amp = p.reflectivity / r2
    if beam_width_deg is not None:
        amp = amp * _beam_voltage_gain(x, p.lateral_offset_m, geom.azimuth_deg, beam_width_deg)
    np.minimum(amp, amplitude_ceiling, out=amp)

    ramp = int(round(taper_s * fs))
    if ramp > 0 and len(amp) > 2 * ramp:
        edge = 0.5 - 0.5 * np.cos(np.linspace(0.0, math.pi, ramp))
        amp[:ramp] *= edge
        amp[-ramp:] *= edge[::-1]

    return n0, amp * np.sin(2.0 * math.pi * phase_cycles)


def render_float(scenario: Scenario, *, travel_cutoff_m: float = 150.0,
                 taper_s: float = 0.05) -> np.ndarray:
    """Superpose all vehicle chirps, interference tones and white noise
    into one float64 buffer (no normalization or quantization)."""
    fs = scenario.geometry.sample_rate
    n_samples = int(round(scenario.duration_s * fs))
    buf = np.zeros(n_samples)

    for p in scenario.vehicles:
        n0, chunk = render_pass(
            p, scenario.geometry, duration_s=scenario.duration_s,
            beam_width_deg=scenario.beam_width_deg,
            amplitude_ceiling=scenario.amplitude_ceiling,
            travel_cutoff_m=travel_cutoff_m, taper_s=taper_s,
        )
        if len(chunk):
            buf[n0 : n0 + len(chunk)] += chunk

    if scenario.noise.interference_tones:
        t = np.arange(n_samples) / fs
        for freq, amp in scenario.noise.interference_tones:
            buf += amp * np.sin(2.0 * math.pi * freq * t)

    sigma = scenario.noise.white_noise_sigma
    if sigma > 0.0:
        rng = np.random.default_rng(scenario.noise.seed)
        buf += rng.normal(0.0, sigma, n_samples)

    return buf


def render(scenario: Scenario, *, travel_cutoff_m: float = 150.0,
           taper_s: float = 0.05) -> Recording:
    """Render to a 16-bit recording, normalized so the peak sits at 0.9 of
    full scale (all-zero input stays all-zero)."""
    buf = render_float(scenario, travel_cutoff_m=travel_cutoff_m, taper_s=taper_s)
    peak = np.max(np.abs(buf)) if len(buf) else 0.0
    if peak > 0.0:
        buf = buf * (0.9 / peak)
    samples = np.round(buf * 32767.0).astype(np.int16)
    return Recording(samples=samples, sample_rate=scenario.geometry.sample_rate)


# ---------------------------------------------------------------------------
# scenario file format (YAML); see README for the schema


def scenario_from_dict(doc: dict) -> Scenario:
    """Build a Scenario from parsed file content, naming bad fields."""
    if not isinstance(doc, dict):
        raise ScenarioError(f"scenario document must be a mapping, got {type(doc).__name__}")

    def grab(mapping: dict, key: str, ctx: str, default=None, required: bool = False):
        if key not in mapping:
            if required:
                raise ScenarioError(f"{ctx}{key}: required field is missing")
            return default
        return mapping[key]

    geom_doc = grab(doc, "geometry", "", default={})
    if not isinstance(geom_doc, dict):
        raise ScenarioError("geometry: must be a mapping")
    try:
        geometry = SensorGeometry(
            azimuth_deg=float(grab(geom_doc, "azimuth_deg", "geometry.", 0.0)),
            elevation_deg=float(grab(geom_doc, "elevation_deg", "geometry.", 0.0)),
            doppler_constant=float(grab(geom_doc, "doppler_constant", "geometry.", 44.68)),
            sample_rate=int(grab(geom_doc, "sample_rate", "geometry.", 48000)),
        )
    except ValueError as exc:
        raise ScenarioError(f"geometry: {exc}") from exc

    noise_doc = grab(doc, "noise", "", default={}) or {}
    if not isinstance(noise_doc, dict):
        raise ScenarioError("noise: must be a mapping")
    raw_level = grab(noise_doc, "white_noise_db", "noise.")
    tones_doc = grab(noise_doc, "interference_tones", "noise.", default=[]) or []
    tones = []
    for i, entry in enumerate(tones_doc):
        try:
            freq, amp = entry
            tones.append((float(freq), float(amp)))
        except (TypeError, ValueError) as exc:
            raise ScenarioError(
                f"noise.interference_tones[{i}]: expected [frequency_hz, amplitude]"
            ) from exc
    noise = NoiseModel(
        white_noise_db=float("-inf") if raw_level is None else float(raw_level),
        interference_tones=tuple(tones),
        seed=int(grab(noise_doc, "seed", "noise.", 0)),
    )

    vehicles = []
    vehicles_doc = grab(doc, "vehicles", "", default=[]) or []
    if not isinstance(vehicles_doc, list):
        raise ScenarioError("vehicles: must be a list")
    for i, vdoc in enumerate(vehicles_doc):
        ctx = f"vehicles[{i}]."
        if not isinstance(vdoc, dict):
            raise ScenarioError(f"vehicles[{i}]: must be a mapping")
        try:
            vehicles.append(VehiclePass(
                speed_kmh=float(grab(vdoc, "speed_kmh", ctx, required=True)),
                lateral_offset_m=float(grab(vdoc, "lateral_offset_m", ctx, required=True)),
                start_along_m=float(grab(vdoc, "start_along_m", ctx, required=True)),
                start_time_s=float(grab(vdoc, "start_time_s", ctx, 0.0)),
                reflectivity=float(grab(vdoc, "reflectivity", ctx, 1.0)),
                lane=str(grab(vdoc, "lane", ctx, "close")),
            ))
        except ScenarioError as exc:
            raise ScenarioError(f"vehicles[{i}]: {exc}") from exc

    beam = grab(doc, "beam_width_deg", "")
    return Scenario(
        geometry=geometry,
        duration_s=float(grab(doc, "duration_s", "", required=True)),
        vehicles=tuple(vehicles),
        noise=noise,
        beam_width_deg=None if beam is None else float(beam),
        amplitude_ceiling=float(grab(doc, "amplitude_ceiling", "", 1.0)),
    )


def scenario_to_dict(scenario: Scenario) -> dict:
    """Inverse of scenario_from_dict, used for config echo in outputs."""
    doc = {
        "geometry": {
            "azimuth_deg": scenario.geometry.azimuth_deg,
            "elevation_deg": scenario.geometry.elevation_deg,
            "doppler_constant": scenario.geometry.doppler_constant,
            "sample_rate": scenario.geometry.sample_rate,
        },
        "duration_s": scenario.duration_s,
        "amplitude_ceiling": scenario.amplitude_ceiling,
        "noise": {
            "white_noise_db": (None if scenario.noise.white_noise_sigma == 0.0
                               else scenario.noise.white_noise_db),
            "interference_tones": [list(t) for t in scenario.noise.interference_tones],
            "seed": scenario.noise.seed,
        },
        "vehicles": [
            {
                "speed_kmh": p.speed_kmh,
                "lateral_offset_m": p.lateral_offset_m,
                "start_along_m": p.start_along_m,
                "start_time_s": p.start_time_s,
                "reflectivity": p.reflectivity,
                "lane": p.lane,
            }
            for p in scenario.vehicles
        ],
    }
    if scenario.beam_width_deg is not None:
        doc["beam_width_deg"] = scenario.beam_width_deg
    return doc


def load_scenario_file(path) -> Scenario:
    import yaml

    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ScenarioError(f"could not parse scenario file {path}: {exc}") from exc
    return scenario_from_dict(doc)
