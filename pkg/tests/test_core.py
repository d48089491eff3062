"""Domain types: coordinates, frames, recordings, labels."""

import numpy as np
import numpy.testing as npt
import pytest

from tacgest.core import (
    GESTURE_NAMES,
    GestureClass,
    Frame,
    Recording,
    SensorCoord,
    coord_to_index,
    id_of_label,
    index_to_coord,
    label_of_id,
    recordings_equal,
)
from tacgest.errors import DomainError

from conftest import make_recording


def test_gesture_name_table():
    assert GESTURE_NAMES == (
        "tap", "double_tap", "swipe_down", "swipe_up", "swipe_right",
        "swipe_left", "circle_cw", "circle_ccw", "swipe_up_2f", "swipe_down_2f",
    )
    for i, name in enumerate(GESTURE_NAMES):
        assert label_of_id(i) == GestureClass(i, name)
        assert id_of_label(name) == i


def test_label_of_id_rejects_out_of_range():
    for bad in (-1, 10, 3.5, "tap"):
        with pytest.raises(DomainError):
            label_of_id(bad)


def test_id_of_label_rejects_unknown():
    with pytest.raises(DomainError):
        id_of_label("pinch")


def test_coord_index_round_trip():
    for idx in range(81):
        assert coord_to_index(index_to_coord(idx)) == idx


def test_coord_to_index_lattice_corners():
    assert coord_to_index(SensorCoord(0, 0)) == 72   # bottom-left
    assert coord_to_index(SensorCoord(8, 8)) == 8    # top-right
    assert coord_to_index(SensorCoord(4, 4)) == 40   # center


def test_coord_to_index_uses_cell_containment():
    # any point inside a cell maps to that cell's index
    assert coord_to_index(SensorCoord(0.1, 0.1)) == 72
    assert coord_to_index(SensorCoord(8.9, 8.9)) == 8


def test_coord_to_index_rejects_out_of_bounds():
    for x, y in [(-0.1, 0), (0, -0.1), (9.0, 0), (0, 9.0)]:
        with pytest.raises(DomainError):
            coord_to_index(SensorCoord(x, y))


def test_frame_validation():
    with pytest.raises(DomainError):
        Frame(np.zeros(80))
    with pytest.raises(DomainError):
        Frame(np.full(81, -0.1))
    with pytest.raises(DomainError):
        Frame(np.full(81, np.nan))


def test_frame_grid_shape():
    f = Frame(np.arange(81, dtype=float))
    assert f.grid().shape == (9, 9)
    assert f.grid()[0, 0] == 0 and f.grid()[8, 8] == 80


def test_recording_validation():
    with pytest.raises(DomainError):
        Recording(pressures=np.zeros((0, 81)))
    with pytest.raises(DomainError):
        Recording(pressures=np.zeros((2, 80)))
    with pytest.raises(DomainError):
        Recording(pressures=np.zeros((2, 81)), tilt_deg=45)
    with pytest.raises(DomainError):
        Recording(pressures=np.zeros((2, 81)), speed="warp")


def test_recording_timestamps_must_be_nondecreasing():
    with pytest.raises(DomainError):
        Recording(pressures=np.zeros((3, 81)), timestamps_ms=[0, 100, 50])


def test_recording_derives_timestamps_from_rate():
    rec = make_recording(np.zeros((4, 81)), rate_hz=15.0)
    npt.assert_array_equal(rec.timestamps(), [0, 67, 133, 200])
    assert rec.timestamps().dtype == np.int64


def test_recording_pressures_read_only():
    rec = make_recording(np.zeros((2, 81)))
    with pytest.raises(ValueError):
        rec.pressures[0, 0] = 1.0


def test_recordings_equal_discriminates():
    a = make_recording(np.zeros((2, 81)), label_id=1, rec_id="x")
    b = make_recording(np.zeros((2, 81)), label_id=1, rec_id="x")
    assert recordings_equal(a, b)
    c = make_recording(np.zeros((2, 81)), label_id=2, rec_id="x")
    assert not recordings_equal(a, c)


def test_source_id_strips_augmentation_suffix():
    rec = make_recording(np.zeros((2, 81)), rec_id="p0-rec3+r2")
    assert rec.source_id == "p0-rec3"
