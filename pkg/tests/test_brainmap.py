import numpy as np
import pytest

from brainenc.brainmap import CSV_COLUMNS, export_voxel_scores, write_voxel_scores
from brainenc.errors import MissingScores, ValidationError
from brainenc.io import read_array
from brainenc.metrics import compute_report
from brainenc.types import RoiSpec, TaskId


def make_report(roi_name, voxels, seed, noise=1.0, labels=None):
    rng = np.random.default_rng(seed)
    Y = rng.standard_normal((30, voxels))
    Yhat = Y + noise * rng.standard_normal((30, voxels))
    roi = RoiSpec(roi_name, "L", voxels, "AAL", labels)
    return compute_report(Y, Yhat, TaskId("CR"), "sub1", roi, dataset_id="demo")


def test_two_roi_table_means_match_rows():
    reports = [make_report("Language_LH", 4, 0), make_report("PMC_L", 3, 1)]
    table = export_voxel_scores(reports, "mae")
    assert len(table.rows) == 7
    for roi_name, mean in table.roi_means:
        rows = [r.score for r in table.rows if r.roi_name == roi_name]
        assert mean == pytest.approx(np.mean(rows), abs=1e-12)


def test_single_voxel_perfect_prediction():
    rng = np.random.default_rng(2)
    Y = rng.standard_normal((30, 1))
    # a single-voxel ROI has no within-sample variance: score it per voxel
    report = compute_report(Y, Y.copy(), TaskId("CR"), "sub1", RoiSpec("DMN", "NA", 1),
                            pc_mode="per-voxel")
    table = export_voxel_scores([report], "mae")
    assert len(table.rows) == 1
    assert table.rows[0].score == 0.0


def test_row_count_equals_total_voxels():
    reports = [make_report("A", 5, 3), make_report("B", 7, 4), make_report("C", 2, 5)]
    table = export_voxel_scores(reports, "pearson")
    assert len(table.rows) == 14
    assert [r for r in table.roi_means] == [
        (rep.roi.name, pytest.approx(np.mean(rep.per_voxel_pearson))) for rep in reports
    ]


def test_voxel_index_unique_within_roi():
    table = export_voxel_scores([make_report("A", 5, 6)], "mae")
    indices = [r.voxel_index for r in table.rows]
    assert indices == list(range(5))


def test_atlas_labels_carried():
    table = export_voxel_scores(
        [make_report("A", 3, 7, labels=(11, 22, 33))], "mae"
    )
    assert [r.atlas_label for r in table.rows] == [11, 22, 33]


def test_csv_columns_exact(tmp_path):
    table = export_voxel_scores([make_report("A", 3, 8, labels=(1, 2, 3))], "mae")
    csv_path = tmp_path / "v.csv"
    write_voxel_scores(table, csv_path, tmp_path / "s.csv", tmp_path / "v.npy")
    lines = csv_path.read_text().strip().split("\n")
    assert lines[0] == ",".join(CSV_COLUMNS)
    first = lines[1].split(",")
    assert first[0] == "0" and first[1] == "1" and first[2] == "A"
    assert first[3] == "CR" and first[4] == "sub1" and first[5] == "mae"
    raw = read_array(tmp_path / "v.npy")
    assert raw.shape == (1, 3)
    assert np.allclose(raw.ravel(), [r.score for r in table.rows])
    summary = (tmp_path / "s.csv").read_text().strip().split("\n")
    assert summary[0] == "roi,mean_mae"


def test_mixed_subjects_rejected():
    a = make_report("A", 3, 9)
    rng = np.random.default_rng(10)
    Y = rng.standard_normal((30, 3))
    b = compute_report(Y, Y + 1, TaskId("CR"), "sub2", RoiSpec("B", "L", 3))
    with pytest.raises(ValidationError):
        export_voxel_scores([a, b], "mae")


def test_empty_reports_rejected():
    with pytest.raises(MissingScores):
        export_voxel_scores([], "mae")
