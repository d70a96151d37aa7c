"""Synthetic journey generator with ground truth.

Models the magnetic environment of an electrified vehicle as a smooth
ambient level (~50 uT) plus seeded Gaussian bumps pinned to route
positions, with a weaker per-carriage component on top.  Peak deviation
from ambient is normalized per vehicle kind so buses stay far below
trains, which stay below deep-underground stock, for every seed:

    kind              route peak  carriage peak  total deviation
    Bus                    60          10            60..70   uT
    OvergroundTrain       170          30           170..200  uT
    UndergroundTube       280          50           280..330  uT

Passengers riding the same carriage observe the same field shifted by
their seat separation, which at cruise speed is a sub-second temporal
shift; different devices add gain, bias, noise, and clock offset on top.
Everything is a pure function of seeds, so corpora are reproducible
byte-for-byte.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .errors import InvalidInputError
from .model import ActivityLabel, MagneticSample, Trace

BASE_FIELD_UT = 50.0
ACCEL_MPS2 = 1.0
BUMP_SPACING_M = 80.0
# spatial texture width expressed as seconds of travel at cruise speed
TEXTURE_SCALE_S = 0.4
TEXTURE_WIDTH_SPAN = 2.5
TEXTURE_AMP_LO = 0.12
TEXTURE_AMP_HI = 0.35
# dynamic (traction) distortion: atom width and spacing in seconds.
# Amplitude is RMS-normalized per vehicle kind so the fluctuation energy
# does not depend on journey length; transient spikes legitimately exceed
# the static carriage field.
DYNAMIC_SIGMA_LO_S = 0.2
DYNAMIC_SIGMA_HI_S = 0.45
DYNAMIC_SPACING_S = 0.4
DEFAULT_LEG_LENGTH_M = 1000.0

# stream tags so unrelated draws never share a seed sequence
_TAG_ROUTE = 101
_TAG_CARRIAGE = 102
_TAG_VEHICLE = 103
_TAG_DEVICE = 104
_TAG_DYNAMIC = 105


class VehicleKind(enum.Enum):
    BUS = "Bus"
    OVERGROUND_TRAIN = "OvergroundTrain"
    UNDERGROUND_TUBE = "UndergroundTube"

    @classmethod
    def parse(cls, text: str) -> "VehicleKind":
        for kind in cls:
            if kind.value == text:
                return kind
        raise InvalidInputError(f"unknown vehicle kind: {text!r}")


@dataclass(frozen=True)
class _VehicleParams:
    cruise_speed_mps: float
    carriage_length_m: float
    route_peak_ut: float
    carriage_peak_ut: float
    dynamic_rms_ut: float
    ride_dc_ut: float


# cruise speeds 30/60/20 km/h; carriage/vehicle lengths in metres.  The DC
# term keeps the modeled magnitude positive under the deepest traction dips
# so the axis split never folds the sign.
_VEHICLE_PARAMS = {
    VehicleKind.OVERGROUND_TRAIN: _VehicleParams(30.0 / 3.6, 20.4, 170.0, 30.0, 45.0, 160.0),
    VehicleKind.UNDERGROUND_TUBE: _VehicleParams(60.0 / 3.6, 16.1, 280.0, 50.0, 60.0, 225.0),
    VehicleKind.BUS: _VehicleParams(20.0 / 3.6, 11.1, 60.0, 10.0, 12.0, 25.0),
}


def vehicle_params(kind: VehicleKind) -> _VehicleParams:
    return _VEHICLE_PARAMS[kind]


@dataclass(frozen=True)
class DeviceModel:
    """Sensor and clock characteristics of one phone."""

    device_id: str = "dev"
    sensitivity_gain: float = 1.0
    bias_ut: float = 0.0
    noise_sigma_ut: float = 1.0
    sample_rate_hz: float = 49.65
    clock_offset_ms: int = 0

    def __post_init__(self):
        if not self.device_id:
            raise InvalidInputError("device_id must be non-empty")
        if not self.sensitivity_gain > 0:
            raise InvalidInputError("sensitivity_gain must be > 0")
        if self.noise_sigma_ut < 0:
            raise InvalidInputError("noise_sigma_ut must be >= 0")
        if not self.sample_rate_hz > 0:
            raise InvalidInputError("sample_rate_hz must be > 0")


@dataclass(frozen=True)
class JourneySpec:
    """One passenger's ride: route, timing, seat, and recording device."""

    route_seed: int
    n_stations: int
    segment_duration_s: float
    vehicle_kind: VehicleKind
    carriage_index: int
    seat_offset_m: float
    device: DeviceModel
    depart_ms: int

    def __post_init__(self):
        if self.n_stations < 2:
            raise InvalidInputError("n_stations must be >= 2")
        if self.segment_duration_s < 60:
            raise InvalidInputError("segment_duration_s must be >= 60")
        if self.carriage_index < 0:
            raise InvalidInputError("carriage_index must be >= 0")
        if self.seat_offset_m < 0:
            raise InvalidInputError("seat_offset_m must be >= 0")
        params = _VEHICLE_PARAMS[self.vehicle_kind]
        if self.segment_duration_s < 2 * params.cruise_speed_mps / ACCEL_MPS2:
            raise InvalidInputError("segment too short to reach cruise speed")


def _seed_seq(*entropy: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(e) & 0xFFFFFFFFFFFFFFFF for e in entropy])


def _float_bits(x: float) -> int:
    return int(np.float64(x).view(np.uint64))


def _make_bumps(
    rng: np.random.Generator, length_m: float, peak_ut: float, texture_scale_m: float
):
    """Positive Gaussian bumps over [0, length_m], rescaled so the densely
    sampled maximum of their sum is exactly peak_ut.

    Two families: broad excursions spaced ~80 m apart, plus dense texture a
    few multiples of ``texture_scale_m`` wide.  The texture is what makes
    unrelated routes expensive to warp onto each other; without it any two
    bumpy curves align suspiciously well.  Its width tracks the vehicle's
    cruise speed so every kind shows comparable steepness per sample.
    """
    n_broad = max(4, int(round(length_m / BUMP_SPACING_M)))
    n_fine = max(8, int(round(length_m / (1.2 * texture_scale_m))))
    centers = np.concatenate(
        [rng.uniform(0.0, length_m, n_broad), rng.uniform(0.0, length_m, n_fine)]
    )
    sigmas = np.concatenate(
        [
            rng.uniform(15.0, 60.0, n_broad),
            rng.uniform(texture_scale_m, TEXTURE_WIDTH_SPAN * texture_scale_m, n_fine),
        ]
    )
    amps = np.concatenate(
        [rng.uniform(0.2, 1.0, n_broad), rng.uniform(TEXTURE_AMP_LO, TEXTURE_AMP_HI, n_fine)]
    )
    grid = np.arange(0.0, length_m + 0.5, 0.5)
    peak = _eval_bumps(grid, centers, sigmas, amps).max()
    return centers, sigmas, amps * (peak_ut / peak)


def _eval_bumps(pos, centers, sigmas, amps, chunk: int = 8192) -> np.ndarray:
    pos = np.atleast_1d(np.asarray(pos, dtype=np.float64))
    out = np.empty_like(pos)
    inv = 1.0 / (2.0 * sigmas * sigmas)
    for lo in range(0, pos.size, chunk):
        p = pos[lo : lo + chunk]
        d = p[:, None] - centers[None, :]
        out[lo : lo + chunk] = np.exp(-(d * d) * inv) @ amps
    return out


class FieldModel:
    """Scalar magnetic field magnitude (uT) along one route.

    Callable as ``field(position_m, carriage=0)``; accepts scalars or
    arrays.  Distinct carriage indices get independent additive bump sets,
    so two carriages of the same train disagree almost everywhere.
    """

    def __init__(self, route_seed: int, n_stations: int, vehicle_kind: VehicleKind,
                 route_length_m: Optional[float] = None):
        if n_stations < 2:
            raise InvalidInputError("n_stations must be >= 2")
        if route_length_m is None:
            route_length_m = (n_stations - 1) * DEFAULT_LEG_LENGTH_M
        if not route_length_m > 0:
            raise InvalidInputError("route_length_m must be > 0")
        self.route_seed = int(route_seed)
        self.vehicle_kind = vehicle_kind
        self.route_length_m = float(route_length_m)
        params = _VEHICLE_PARAMS[vehicle_kind]
        self._texture_scale_m = params.cruise_speed_mps * TEXTURE_SCALE_S
        rng = np.random.default_rng(_seed_seq(route_seed, _TAG_ROUTE))
        self._route = _make_bumps(
            rng, self.route_length_m, params.route_peak_ut, self._texture_scale_m
        )
        self._carriage_peak = params.carriage_peak_ut
        self._carriage_cache: dict[int, tuple] = {}

    def _carriage_bumps(self, carriage: int):
        bumps = self._carriage_cache.get(carriage)
        if bumps is None:
            rng = np.random.default_rng(
                _seed_seq(self.route_seed, _TAG_CARRIAGE, carriage)
            )
            bumps = _make_bumps(
                rng, self.route_length_m, self._carriage_peak, self._texture_scale_m
            )
            self._carriage_cache[carriage] = bumps
        return bumps

    def __call__(self, position_m, carriage: int = 0):
        scalar = np.isscalar(position_m)
        pos = np.atleast_1d(np.asarray(position_m, dtype=np.float64))
        val = BASE_FIELD_UT + _eval_bumps(pos, *self._route)
        val += _eval_bumps(pos, *self._carriage_bumps(int(carriage)))
        return float(val[0]) if scalar else val


def generate_field(route_seed: int, n_stations: int, vehicle_kind: VehicleKind,
                   route_length_m: Optional[float] = None) -> FieldModel:
    return FieldModel(route_seed, n_stations, vehicle_kind, route_length_m)


def _leg_positions(tau: np.ndarray, duration_s: float, cruise: float) -> np.ndarray:
    """Trapezoidal speed profile: ramp at ACCEL_MPS2, cruise, symmetric ramp
    down, covering cruise * (duration - ramp) metres."""
    t_ramp = cruise / ACCEL_MPS2
    leg_len = cruise * (duration_s - t_ramp)
    pos = np.empty_like(tau)
    ramp_up = tau < t_ramp
    ramp_down = tau > duration_s - t_ramp
    mid = ~(ramp_up | ramp_down)
    pos[ramp_up] = 0.5 * ACCEL_MPS2 * tau[ramp_up] ** 2
    pos[mid] = 0.5 * ACCEL_MPS2 * t_ramp * t_ramp + cruise * (tau[mid] - t_ramp)
    rem = duration_s - tau[ramp_down]
    pos[ramp_down] = leg_len - 0.5 * ACCEL_MPS2 * rem * rem
    return pos


@dataclass(frozen=True)
class _VehicleMotion:
    """Physical journey shared by everyone on board: dwell lengths and any
    per-carriage oscillation while standing at a station."""

    dwell_s: np.ndarray
    osc_on: np.ndarray
    osc_amp: np.ndarray
    osc_freq: np.ndarray
    osc_phase: np.ndarray


def _vehicle_motion(spec: JourneySpec) -> _VehicleMotion:
    n_dwells = spec.n_stations - 2
    rng = np.random.default_rng(
        _seed_seq(spec.route_seed, _TAG_VEHICLE, spec.depart_ms, spec.carriage_index)
    )
    params = _VEHICLE_PARAMS[spec.vehicle_kind]
    return _VehicleMotion(
        dwell_s=rng.uniform(15.0, 45.0, n_dwells),
        osc_on=rng.random(n_dwells) < 0.5,
        osc_amp=rng.uniform(0.3, 0.7, n_dwells) * params.carriage_peak_ut,
        osc_freq=rng.uniform(0.2, 0.6, n_dwells),
        osc_phase=rng.uniform(0.0, 2.0 * math.pi, n_dwells),
    )


def journey_total_duration_s(spec: JourneySpec) -> float:
    """Vehicle phase only (legs + dwells), excluding the walk wrap."""
    motion = _vehicle_motion(spec)
    return (spec.n_stations - 1) * spec.segment_duration_s + float(motion.dwell_s.sum())


def _dynamic_distortion(spec: JourneySpec, vehicle_s: float):
    """Time-varying distortion from the vehicle's own electrics.

    Signed Gaussian atoms over the vehicle phase, RMS-normalized per kind.
    A property of (route, departure, carriage), so every passenger in the
    carriage observes the same fluctuation; passengers on other vehicles
    observe an independent one.
    """
    params = _VEHICLE_PARAMS[spec.vehicle_kind]
    rng = np.random.default_rng(
        _seed_seq(spec.route_seed, _TAG_DYNAMIC, spec.depart_ms, spec.carriage_index)
    )
    count = max(8, int(round(vehicle_s / DYNAMIC_SPACING_S)))
    centers = rng.uniform(0.0, vehicle_s, count)
    sigmas = rng.uniform(DYNAMIC_SIGMA_LO_S, DYNAMIC_SIGMA_HI_S, count)
    signs = rng.integers(0, 2, count) * 2.0 - 1.0
    amps = rng.uniform(0.4, 1.0, count) * signs
    grid = np.arange(0.0, vehicle_s + 0.05, 0.05)
    rms = float(_eval_bumps(grid, centers, sigmas, amps).std())
    return centers, sigmas, amps * (params.dynamic_rms_ut / rms)


def generate_trace(spec: JourneySpec) -> Trace:
    """Simulate one recorded journey: walk in, ride with station dwells,
    walk out.  Returns a Trace in the device's local clock."""
    params = _VEHICLE_PARAMS[spec.vehicle_kind]
    motion = _vehicle_motion(spec)
    dev = spec.device
    rng = np.random.default_rng(
        _seed_seq(
            spec.route_seed,
            _TAG_DEVICE,
            spec.depart_ms,
            spec.carriage_index,
            _float_bits(spec.seat_offset_m),
            _float_bits(dev.sensitivity_gain),
            _float_bits(dev.bias_ut),
            dev.clock_offset_ms,
        )
    )
    walk_in_s = rng.uniform(20.0, 40.0)
    walk_out_s = rng.uniform(20.0, 40.0)
    foot_label = ActivityLabel.ON_FOOT if rng.random() < 0.7 else ActivityLabel.WALKING

    n_legs = spec.n_stations - 1
    leg_s = spec.segment_duration_s
    vehicle_s = n_legs * leg_s + float(motion.dwell_s.sum())
    total_s = walk_in_s + vehicle_s + walk_out_s

    # samples sit on a lattice anchored at departure, so devices sharing a
    # nominal rate sample the ride at identical instants
    period_s = 1.0 / dev.sample_rate_hz
    k0 = -int(math.floor(walk_in_s / period_s))
    n = int(math.floor((vehicle_s + walk_out_s) / period_s)) - k0 + 1
    tau = (k0 + np.arange(n)) * period_s  # 0 is the moment of departure

    leg_len = params.cruise_speed_mps * (leg_s - params.cruise_speed_mps / ACCEL_MPS2)
    # event boundaries of the vehicle phase, alternating leg / dwell
    bounds = [0.0]
    for leg in range(n_legs):
        bounds.append(bounds[-1] + leg_s)
        if leg < n_legs - 1:
            bounds.append(bounds[-1] + float(motion.dwell_s[leg]))

    position = np.zeros(n)
    values = np.full(n, BASE_FIELD_UT)
    labels = np.empty(n, dtype=object)

    walking = (tau < 0.0) | (tau >= vehicle_s)
    labels[walking] = foot_label
    # ambient wander while on foot, a couple of slow sinusoids
    amp1, amp2 = rng.uniform(1.0, 3.0, 2)
    f1, f2 = rng.uniform(0.05, 0.2, 2)
    ph1, ph2 = rng.uniform(0.0, 2.0 * math.pi, 2)
    tw = tau[walking]
    values[walking] += amp1 * np.sin(2 * math.pi * f1 * tw + ph1) + amp2 * np.sin(
        2 * math.pi * f2 * tw + ph2
    )

    field = generate_field(
        spec.route_seed,
        spec.n_stations,
        spec.vehicle_kind,
        route_length_m=n_legs * leg_len + 100.0,
    )
    observer_shift = spec.carriage_index * params.carriage_length_m + spec.seat_offset_m

    idx = 0  # event index; even = leg, odd = dwell
    for leg in range(n_legs):
        lo, hi = bounds[idx], bounds[idx + 1]
        sel = (tau >= lo) & (tau < hi)
        position[sel] = leg * leg_len + _leg_positions(
            tau[sel] - lo, leg_s, params.cruise_speed_mps
        )
        labels[sel] = ActivityLabel.IN_VEHICLE
        idx += 1
        if leg < n_legs - 1:
            lo, hi = bounds[idx], bounds[idx + 1]
            sel = (tau >= lo) & (tau < hi)
            position[sel] = (leg + 1) * leg_len
            labels[sel] = ActivityLabel.STILL
            if motion.osc_on[leg]:
                values[sel] += motion.osc_amp[leg] * np.sin(
                    2 * math.pi * motion.osc_freq[leg] * (tau[sel] - lo)
                    + motion.osc_phase[leg]
                )
            idx += 1

    riding = (tau >= 0.0) & (tau < vehicle_s)
    values[riding] += (
        field(position[riding] + observer_shift, carriage=spec.carriage_index)
        - BASE_FIELD_UT
        + params.ride_dc_ut
    )
    values[riding] += _eval_bumps(tau[riding], *_dynamic_distortion(spec, vehicle_s))
    # the scalar is a magnitude; identical floor either side of a pair
    np.maximum(values, 1.0, out=values)

    # occasional short misclassification inside a ride; absorbed by debounce.
    # Kept clear of the head so the leading in-vehicle run stays longer than
    # the debounce window and the span is never truncated.
    if rng.random() < 0.5 and vehicle_s > 30:
        f_start = rng.uniform(15.0, vehicle_s - 10.0)
        f_len = rng.uniform(2.0, 5.0)
        labels[(tau >= f_start) & (tau < f_start + f_len)] = ActivityLabel.UNKNOWN

    reading = values * dev.sensitivity_gain + dev.bias_ut
    if dev.noise_sigma_ut > 0:
        reading = reading + rng.normal(0.0, dev.noise_sigma_ut, n)

    # slowly rotating unit vector carries the full magnitude across axes
    theta = rng.uniform(0.0, math.pi) + rng.uniform(-0.02, 0.02) * tau
    phi = rng.uniform(0.0, 2.0 * math.pi) + rng.uniform(-0.02, 0.02) * tau
    mx = reading * np.sin(theta) * np.cos(phi)
    my = reading * np.sin(theta) * np.sin(phi)
    mz = reading * np.cos(theta)

    jitter = rng.integers(-2, 3, n)
    t_ms = spec.depart_ms + np.round(tau * 1000.0).astype(np.int64) + jitter
    t_ms -= dev.clock_offset_ms

    samples = tuple(
        MagneticSample(
            t_ms=int(t_ms[i]),
            mx=float(mx[i]),
            my=float(my[i]),
            mz=float(mz[i]),
            activity=labels[i],
        )
        for i in range(n)
    )
    return Trace(device_id=dev.device_id, clock_offset_ms=dev.clock_offset_ms,
                 samples=samples)


@dataclass(frozen=True)
class Corpus:
    """Generated traces plus the trajectory-id pairs that truly rode together."""

    traces: tuple[Trace, ...]
    coloc_pairs: tuple[tuple[str, str], ...]
    specs: tuple[tuple[JourneySpec, ...], ...] = dc_field(default=(), repr=False)


_CORPUS_KINDS = (VehicleKind.OVERGROUND_TRAIN, VehicleKind.UNDERGROUND_TUBE)


def generate_corpus(
    n_users: int,
    n_journeys: int,
    coloc_fraction: float,
    master_seed: int,
) -> Corpus:
    """Build one trace per user covering ``n_journeys`` rides each.

    Users are paired off per journey slot; each pair shares a vehicle
    (route seed, carriage, departure) with probability ``coloc_fraction``,
    otherwise everyone rides an independent route at the same departure
    time.  Buses are excluded here: their distortion is too flat to carry
    a shape signature, which is exactly why they defeat this kind of
    matching.  Trajectory ids follow segmentation ordinals, so journey j
    of user i becomes ``u<i>#<j>``.
    """
    if n_users < 1 or n_journeys < 0:
        raise InvalidInputError("need n_users >= 1 and n_journeys >= 0")
    if not 0.0 <= coloc_fraction <= 1.0:
        raise InvalidInputError("coloc_fraction must be within [0, 1]")

    root = np.random.SeedSequence(int(master_seed) & 0xFFFFFFFFFFFFFFFF)
    dev_ss, sched_ss = root.spawn(2)
    dev_rng = np.random.default_rng(dev_ss)
    rng = np.random.default_rng(sched_ss)

    devices = [
        DeviceModel(
            device_id=f"u{i:02d}",
            sensitivity_gain=float(dev_rng.uniform(0.97, 1.03)),
            bias_ut=float(dev_rng.uniform(-15.0, 15.0)),
            noise_sigma_ut=1.0,
            clock_offset_ms=int(dev_rng.integers(-2000, 2001)),
        )
        for i in range(n_users)
    ]

    per_user_specs: list[list[JourneySpec]] = [[] for _ in range(n_users)]
    truth: list[tuple[str, str]] = []
    depart_ms = 1_600_000_000_000

    for j in range(n_journeys):
        leg_s = float(rng.uniform(60.0, 150.0))
        kind = _CORPUS_KINDS[int(rng.integers(len(_CORPUS_KINDS)))]
        slot_seeds: list[int] = []
        slot_carriages: list[int] = []
        pair_start = n_users - (n_users % 2)  # odd user out rides alone
        for a in range(0, pair_start, 2):
            together = rng.random() < coloc_fraction
            seed_a = int(rng.integers(1 << 62))
            carriage_a = int(rng.integers(4))
            if together:
                slot_seeds += [seed_a, seed_a]
                slot_carriages += [carriage_a, carriage_a]
                pair = sorted((f"u{a:02d}#{j}", f"u{a + 1:02d}#{j}"))
                truth.append((pair[0], pair[1]))
            else:
                slot_seeds += [seed_a, int(rng.integers(1 << 62))]
                slot_carriages += [carriage_a, int(rng.integers(4))]
        for _ in range(pair_start, n_users):
            slot_seeds.append(int(rng.integers(1 << 62)))
            slot_carriages.append(int(rng.integers(4)))

        for i in range(n_users):
            per_user_specs[i].append(
                JourneySpec(
                    route_seed=slot_seeds[i],
                    n_stations=3,
                    segment_duration_s=leg_s,
                    vehicle_kind=kind,
                    carriage_index=slot_carriages[i],
                    seat_offset_m=float(rng.uniform(0.0, 15.0)),
                    device=devices[i],
                    depart_ms=depart_ms,
                )
            )
        # worst-case journey span plus walk wrap, then a gap before the next
        depart_ms += int((2 * leg_s + 45.0 + 120.0) * 1000.0)

    traces = []
    for i in range(n_users):
        samples: list[MagneticSample] = []
        for spec in per_user_specs[i]:
            samples.extend(generate_trace(spec).samples)
        traces.append(
            Trace(
                device_id=devices[i].device_id,
                clock_offset_ms=devices[i].clock_offset_ms,
                samples=tuple(samples),
            )
        )

    return Corpus(
        traces=tuple(traces),
        coloc_pairs=tuple(sorted(truth)),
        specs=tuple(tuple(s) for s in per_user_specs),
    )
