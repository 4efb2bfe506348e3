import csv

import numpy as np
import pytest

from elaselect.errors import UnsupportedFunctionError
from elaselect.problems import (MULTIMODAL_FIDS, SUPPORTED_FIDS,
                                UNIMODAL_FIDS, ProblemId, make_instance,
                                suite, write_manifest)
from elaselect.sampling import make_rng


def test_supported_fid_partition():
    assert set(UNIMODAL_FIDS) | set(MULTIMODAL_FIDS) == set(SUPPORTED_FIDS)
    assert not set(UNIMODAL_FIDS) & set(MULTIMODAL_FIDS)


def test_unknown_fid_rejected():
    with pytest.raises(UnsupportedFunctionError):
        make_instance(2, 3, 1)


@pytest.mark.parametrize("fid", SUPPORTED_FIDS)
@pytest.mark.parametrize("dim", [2, 5])
def test_y_opt_invariant(fid, dim):
    for iid in range(0, 6):
        inst = make_instance(fid, dim, iid)
        assert abs(inst.objective(inst.x_opt) - inst.y_opt) <= 1e-12
        assert inst.domain.contains(inst.x_opt[None, :]).all()


@pytest.mark.parametrize("fid", SUPPORTED_FIDS)
def test_optimum_is_sample_minimum(fid):
    """No random point beats the declared optimum value."""
    dim = 3
    rng = make_rng([99, fid])
    for iid in (0, 1, 3):
        inst = make_instance(fid, dim, iid)
        points = rng.uniform(-5.0, 5.0, size=(300, dim))
        sampled = np.array([inst.objective(p) for p in points])
        assert sampled.min() >= inst.y_opt - 1e-9


def test_iid0_is_untransformed():
    inst = make_instance(1, 4, 0)
    assert np.array_equal(inst.x_opt, np.zeros(4))
    assert inst.y_opt == 0.0
    assert inst.objective(np.ones(4)) == pytest.approx(4.0)


def test_instances_differ_across_iids():
    probe = np.full(3, 1.5)
    values = {make_instance(3, 3, iid).objective(probe) for iid in (1, 2, 3)}
    assert len(values) == 3


def test_instance_deterministic():
    a = make_instance(17, 5, 2)
    b = make_instance(17, 5, 2)
    probe = np.linspace(-4, 4, 5)
    assert np.array_equal(a.x_opt, b.x_opt)
    assert a.objective(probe) == b.objective(probe)


def test_seed_scheme_changes_transforms():
    a = make_instance(3, 3, 1, seed_scheme=0)
    b = make_instance(3, 3, 1, seed_scheme=1)
    assert not np.array_equal(a.x_opt, b.x_opt)


def test_linear_slope_corner_optimum():
    inst = make_instance(5, 3, 1)
    corners = np.abs(inst.x_opt)
    assert np.all(corners == 5.0)
    # moving inward from the optimal corner can only increase the objective
    inward = inst.x_opt - 0.1 * np.sign(inst.x_opt)
    assert inst.objective(inward) > inst.y_opt


def test_problem_id_ordering_and_validation():
    assert ProblemId(1, 2, 1) < ProblemId(1, 2, 2) < ProblemId(1, 3, 0)
    with pytest.raises(ValueError):
        ProblemId(1, 0, 1)


class TestSuite:
    def test_ordering_and_uniqueness(self):
        instances = suite(dims=[3, 2], fids=[3, 1], iids=[1, 2])
        keys = [(i.id.dim, i.id.fid, i.id.iid) for i in instances]
        assert keys == sorted(keys)
        assert len(set(keys)) == len(keys) == 8

    def test_rejects_empty_axes(self):
        with pytest.raises(ValueError):
            suite(dims=[], fids=[1], iids=[1])

    def test_manifest(self, tmp_path):
        instances = suite(dims=[2], fids=[1, 3], iids=[0, 1])
        path = tmp_path / "manifest.csv"
        write_manifest(instances, path)
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 4
        for inst, row in zip(instances, rows):
            assert int(row["fid"]) == inst.id.fid
            assert float(row["y_opt"]) == pytest.approx(inst.y_opt)
