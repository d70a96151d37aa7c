import numpy as np
import pytest

from magcoloc import ActivityLabel, MagneticSample, Trace, Trajectory


def make_trajectory(trace_id="t#0", start_ms=0, rate=5.0, values=None) -> Trajectory:
    if values is None:
        values = np.linspace(40.0, 60.0, 30)
    return Trajectory(
        trace_id=trace_id, start_ms=start_ms, sample_rate_hz=rate, values=np.asarray(values)
    )


def make_trace(labels_and_durations, rate_hz=10.0, device_id="dev", t0_ms=1_000,
               base=50.0, slope=0.01) -> Trace:
    """Trace with the given (label, seconds) episodes and a gentle ramp so the
    magnitude is never constant."""
    period_ms = 1000.0 / rate_hz
    samples = []
    t = float(t0_ms)
    k = 0
    for label, seconds in labels_and_durations:
        for _ in range(int(round(seconds * rate_hz))):
            mag = base + slope * k
            samples.append(
                MagneticSample(t_ms=int(round(t)), mx=mag, my=0.0, mz=0.0, activity=label)
            )
            t += period_ms
            k += 1
    return Trace(device_id=device_id, clock_offset_ms=0, samples=tuple(samples))


@pytest.fixture(scope="session")
def warm_kernels():
    """Compile the JIT alignment kernels once so timed tests measure the
    algorithm, not compilation."""
    from magcoloc import ddtw, ddtw_distance, dtw, dtw_distance

    a = np.array([0.0, 1.0, 2.0, 1.0])
    b = np.array([0.0, 2.0, 1.0])
    dtw(a, b)
    ddtw(a, b)
    dtw_distance(a, b)
    ddtw_distance(a, b)
    dtw(a, b, band=3)
    return True


ON_FOOT = ActivityLabel.ON_FOOT
WALKING = ActivityLabel.WALKING
IN_VEHICLE = ActivityLabel.IN_VEHICLE
STILL = ActivityLabel.STILL
UNKNOWN = ActivityLabel.UNKNOWN
RUNNING = ActivityLabel.RUNNING
