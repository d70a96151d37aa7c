import numpy as np
import pytest

from magcoloc import (
    ActivityLabel,
    FOOT_LABELS,
    InvalidInputError,
    MagneticSample,
    MatchReport,
    Thresholds,
    Trace,
    Trajectory,
    WarpPath,
)


def sample(t_ms=0, mx=1.0, my=2.0, mz=3.0, activity=ActivityLabel.STILL):
    return MagneticSample(t_ms=t_ms, mx=mx, my=my, mz=mz, activity=activity)


class TestActivityLabel:
    def test_parse_round_trip(self):
        for label in ActivityLabel:
            assert ActivityLabel.parse(label.value) is label

    def test_parse_unknown_text(self):
        with pytest.raises(InvalidInputError):
            ActivityLabel.parse("Flying")

    def test_foot_labels(self):
        assert FOOT_LABELS == {ActivityLabel.ON_FOOT, ActivityLabel.WALKING}


class TestMagneticSample:
    def test_negative_time_rejected(self):
        with pytest.raises(InvalidInputError):
            sample(t_ms=-1)

    def test_non_finite_axis_rejected(self):
        with pytest.raises(InvalidInputError):
            sample(mx=float("nan"))
        with pytest.raises(InvalidInputError):
            sample(mz=float("inf"))

    def test_activity_must_be_enum(self):
        with pytest.raises(InvalidInputError):
            MagneticSample(t_ms=0, mx=0.0, my=0.0, mz=0.0, activity="Still")

    def test_immutable(self):
        s = sample()
        with pytest.raises(AttributeError):
            s.mx = 5.0


class TestTrace:
    def test_strictly_increasing_timestamps_required(self):
        good = Trace("d", 0, (sample(0), sample(1), sample(2)))
        assert len(good) == 3
        with pytest.raises(InvalidInputError):
            Trace("d", 0, (sample(0), sample(0)))
        with pytest.raises(InvalidInputError):
            Trace("d", 0, (sample(5), sample(4)))

    def test_empty_device_id_rejected(self):
        with pytest.raises(InvalidInputError):
            Trace("", 0, (sample(0),))

    def test_samples_coerced_to_tuple(self):
        tr = Trace("d", 0, [sample(0), sample(1)])
        assert isinstance(tr.samples, tuple)


class TestTrajectory:
    def test_needs_two_values(self):
        with pytest.raises(InvalidInputError):
            Trajectory("t", 0, 1.0, np.array([1.0]))

    def test_negative_magnitudes_rejected(self):
        with pytest.raises(InvalidInputError):
            Trajectory("t", 0, 1.0, np.array([1.0, -0.5]))

    def test_non_finite_rejected(self):
        with pytest.raises(InvalidInputError):
            Trajectory("t", 0, 1.0, np.array([1.0, np.nan]))

    def test_rate_must_be_positive(self):
        with pytest.raises(InvalidInputError):
            Trajectory("t", 0, 0.0, np.array([1.0, 2.0]))

    def test_values_are_read_only_copy(self):
        src = np.array([1.0, 2.0, 3.0])
        traj = Trajectory("t", 0, 1.0, src)
        src[0] = 99.0
        assert traj.values[0] == 1.0
        with pytest.raises(ValueError):
            traj.values[0] = 5.0

    def test_n_and_duration(self):
        traj = Trajectory("t", 0, 4.0, np.arange(9.0))
        assert traj.n == 9
        assert traj.duration_s == pytest.approx(2.0)

    def test_equality_by_content(self):
        a = Trajectory("t", 5, 2.0, np.array([1.0, 2.0]))
        b = Trajectory("t", 5, 2.0, np.array([1.0, 2.0]))
        c = Trajectory("t", 5, 2.0, np.array([1.0, 2.5]))
        assert a == b
        assert hash(a) == hash(b)
        assert a != c


class TestWarpPath:
    def test_valid_path(self):
        p = WarpPath(pairs=((1, 1), (2, 1), (2, 2), (3, 3)))
        assert p.length == 4
        assert p.end == (3, 3)

    def test_must_start_at_origin(self):
        with pytest.raises(InvalidInputError):
            WarpPath(pairs=((1, 2), (2, 2)))

    def test_no_stationary_step(self):
        with pytest.raises(InvalidInputError):
            WarpPath(pairs=((1, 1), (1, 1)))

    def test_no_backward_step(self):
        with pytest.raises(InvalidInputError):
            WarpPath(pairs=((1, 1), (2, 2), (1, 2)))

    def test_no_jump(self):
        with pytest.raises(InvalidInputError):
            WarpPath(pairs=((1, 1), (3, 2)))

    def test_empty_rejected(self):
        with pytest.raises(InvalidInputError):
            WarpPath(pairs=())


class TestThresholds:
    def test_defaults(self):
        t = Thresholds()
        assert t.max_temporal_offset_s == 5.0
        assert t.max_compression_rate == 1.5
        assert t.max_ddtw_score == 5.0

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"max_temporal_offset_s": 0.0},
            {"max_compression_rate": -1.0},
            {"max_ddtw_score": 0.0},
        ],
    )
    def test_positivity(self, kwargs):
        with pytest.raises(InvalidInputError):
            Thresholds(**kwargs)


def report(**overrides):
    base = dict(
        trajectory_a="a#0",
        trajectory_b="b#0",
        temporal_offset_s=1.0,
        compression_rate=1.2,
        ddtw_score=3.0,
        temporal_ok=True,
        compression_ok=True,
        score_ok=True,
        accepted=True,
    )
    base.update(overrides)
    return MatchReport(**base)


class TestMatchReport:
    def test_accepted_is_conjunction(self):
        assert report().accepted is True
        with pytest.raises(InvalidInputError):
            report(score_ok=False)  # accepted=True contradicts a failing verdict
        rejected = report(score_ok=False, accepted=False)
        assert rejected.accepted is False

    def test_score_and_verdict_present_together(self):
        with pytest.raises(InvalidInputError):
            report(ddtw_score=None)  # score_ok still True
        with pytest.raises(InvalidInputError):
            report(score_ok=None)  # ddtw_score still set
        skipped = report(ddtw_score=None, score_ok=None, accepted=False)
        assert skipped.ddtw_score is None

    def test_unevaluated_score_cannot_be_accepted(self):
        with pytest.raises(InvalidInputError):
            report(ddtw_score=None, score_ok=None, accepted=True)

    def test_compression_rate_lower_bound(self):
        with pytest.raises(InvalidInputError):
            report(compression_rate=0.9)

    def test_negative_offset_rejected(self):
        with pytest.raises(InvalidInputError):
            report(temporal_offset_s=-0.1)

    def test_heuristic_verdicts(self):
        r = report(ddtw_score=None, score_ok=None, accepted=False)
        assert r.heuristic_verdicts == (True, True, None)
