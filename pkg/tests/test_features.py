import numpy as np
import pytest
from scipy.spatial.distance import pdist

from conftest import random_design, scaled_copy, shifted_copy, with_values
from elaselect.errors import SchemaMismatchError
from elaselect.features import (FEATURE_SETS, FeatureMatrix, FeatureVector,
                                aggregate_median, basic, cm_angle,
                                compute_all, disp, ela_distribution,
                                ela_levelset, ela_meta, ic, nbc, pca, schema)
from elaselect.features.landscape import greedy_tour
from elaselect.sampling import BoxDomain, SampleDesign


def design_from(points, values, domain=None):
    points = np.asarray(points, dtype=float)
    if domain is None:
        lo = points.min(axis=0) - 1.0
        hi = points.max(axis=0) + 1.0
        domain = BoxDomain(points.shape[1], lo, hi)
    return SampleDesign(points=points, domain=domain,
                        values=np.asarray(values, dtype=float),
                        evals_consumed=len(points))


class TestVectorContainers:
    def test_parallel_names_values(self):
        with pytest.raises(ValueError):
            FeatureVector(("a", "b"), np.array([1.0]), 5)
        with pytest.raises(ValueError):
            FeatureVector(("a", "a"), np.array([1.0, 2.0]), 5)

    def test_getitem_and_concat(self):
        fv = FeatureVector.concat(
            [FeatureVector(("a",), np.array([1.0]), 3),
             FeatureVector(("b",), np.array([2.0]), 3)], cost_evals=3)
        assert fv["b"] == 2.0
        assert fv.cost_evals == 3

    def test_matrix_schema_mismatch(self):
        rows = {
            (1, 2, 1): FeatureVector(("a",), np.array([1.0]), 1),
            (1, 2, 2): FeatureVector(("b",), np.array([1.0]), 1),
        }
        with pytest.raises(SchemaMismatchError):
            FeatureMatrix.from_rows(("fid", "dim", "iid"), rows)

    def test_matrix_csv_round_trip_with_nan(self, tmp_path):
        matrix = FeatureMatrix(("fid", "dim"), [(1, 2), (3, 2)], ("a", "b"),
                               np.array([[1.5, np.nan], [0.25, -3.0]]))
        path = tmp_path / "m.csv"
        matrix.to_csv(path)
        back = FeatureMatrix.from_csv(path)
        assert back.key_fields == ("fid", "dim")
        assert back.keys == matrix.keys
        assert back.names == matrix.names
        assert np.array_equal(back.values, matrix.values, equal_nan=True)


class TestDistribution:
    def test_skewness_frozen_oracle(self):
        # moment skewness of {0,0,0,1} is 2/sqrt(3)
        design = random_design(0, n=4)
        design = with_values(design, [0.0, 0.0, 0.0, 1.0])
        fv = ela_distribution(design)
        assert fv["ela_distr.skewness"] == pytest.approx(1.1547005383792515,
                                                         abs=1e-12)

    def test_symmetric_two_point_oracle(self):
        # {-1,1,-1,1}: zero skewness, excess kurtosis -2
        design = random_design(1, n=4)
        design = with_values(design, [-1.0, 1.0, -1.0, 1.0])
        fv = ela_distribution(design)
        assert fv["ela_distr.skewness"] == pytest.approx(0.0, abs=1e-12)
        assert fv["ela_distr.kurtosis"] == pytest.approx(-2.0, abs=1e-12)

    def test_constant_objective(self):
        design = with_values(random_design(2, n=10), np.zeros(10))
        fv = ela_distribution(design)
        assert np.isnan(fv["ela_distr.skewness"])
        assert np.isnan(fv["ela_distr.kurtosis"])
        assert fv["ela_distr.n_peaks"] == 1.0

    def test_bimodal_peak_count(self):
        values = np.concatenate([np.random.default_rng(0).normal(0, 0.1, 200),
                                 np.random.default_rng(1).normal(10, 0.1, 200)])
        design = with_values(random_design(3, n=400), values)
        assert ela_distribution(design)["ela_distr.n_peaks"] >= 2.0

    def test_affine_equivariance(self):
        design = random_design(4, n=60)
        base = ela_distribution(design)
        pos = ela_distribution(with_values(design, 2.5 * design.values + 7.0))
        neg = ela_distribution(with_values(design, -design.values))
        assert pos["ela_distr.skewness"] == pytest.approx(
            base["ela_distr.skewness"], abs=1e-10)
        assert pos["ela_distr.kurtosis"] == pytest.approx(
            base["ela_distr.kurtosis"], abs=1e-10)
        assert neg["ela_distr.skewness"] == pytest.approx(
            -base["ela_distr.skewness"], abs=1e-10)


class TestLevelset:
    def test_separable_split_is_learnable(self):
        # y increases with x1 only, so every level split is linearly separable
        design = random_design(5, n=80, f=lambda x: float(x[0]))
        fv = ela_levelset(design)
        for tag in ("10", "25", "50"):
            assert fv[f"ela_level.mmce_lda_{tag}"] <= 0.1

    def test_monotone_y_invariance(self):
        design = random_design(6, n=50)
        base = ela_levelset(design)
        warped = ela_levelset(
            with_values(design, design.values ** 3 + 5.0 * design.values))
        assert np.allclose(base.values, warped.values, equal_nan=True)

    def test_requires_enough_points(self):
        with pytest.raises(ValueError):
            ela_levelset(random_design(7, n=10))


class TestMeta:
    def test_exact_linear_fit_oracle(self):
        design = random_design(8, n=50, dim=2)
        y = 3.0 * design.points[:, 0] - 2.0 * design.points[:, 1] + 7.0
        fv = ela_meta(with_values(design, y))
        assert fv["ela_meta.lin_r2_adj"] == pytest.approx(1.0, abs=1e-10)
        assert fv["ela_meta.lin_coef_min"] == pytest.approx(2.0, abs=1e-10)
        assert fv["ela_meta.lin_coef_max"] == pytest.approx(3.0, abs=1e-10)
        assert fv["ela_meta.lin_coef_ratio"] == pytest.approx(1.5, abs=1e-10)

    def test_quadratic_fit_and_condition(self):
        design = random_design(9, n=60, dim=2)
        y = 4.0 * design.points[:, 0] ** 2 + design.points[:, 1] ** 2
        fv = ela_meta(with_values(design, y))
        assert fv["ela_meta.quad_r2_adj"] == pytest.approx(1.0, abs=1e-10)
        assert fv["ela_meta.quad_cond"] == pytest.approx(4.0, abs=1e-8)

    def test_requires_enough_points(self):
        with pytest.raises(ValueError):
            ela_meta(random_design(10, n=5, dim=3))


class TestDisp:
    def test_against_independent_oracle(self):
        design = random_design(11, n=100)
        fv = disp(design)
        y = design.values
        order = np.argsort(y, kind="stable")
        full = pdist(design.points)
        for q, tag in ((0.05, "05"), (0.25, "25")):
            k = int(np.ceil(q * len(y)))
            sub = pdist(design.points[order[:k]])
            assert fv[f"disp.ratio_mean_{tag}"] == pytest.approx(
                sub.mean() / full.mean(), abs=1e-12)
            assert fv[f"disp.diff_median_{tag}"] == pytest.approx(
                np.median(sub) - np.median(full), abs=1e-12)

    def test_tiny_quantile_is_nan(self):
        fv = disp(random_design(12, n=20))
        # ceil(0.02 * 20) = 1 point: pairwise distances undefined
        assert np.isnan(fv["disp.ratio_mean_02"])

    def test_translation_invariance(self):
        design = random_design(13, n=50)
        fv = disp(design)
        shifted = disp(shifted_copy(design, np.full(design.dim, 3.7)))
        assert np.allclose(fv.values, shifted.values, equal_nan=True,
                           atol=1e-10)


class TestNbc:
    def test_collinear_equispaced_oracle(self):
        # on a line with increasing y, nn and nb distances coincide
        points = np.linspace(0, 9, 10)[:, None]
        design = design_from(points, np.arange(10.0))
        fv = nbc(design)
        assert fv["nbc.nn_nb_sd_ratio"] == pytest.approx(1.0)
        assert fv["nbc.nn_nb_mean_ratio"] == pytest.approx(1.0)

    def test_against_independent_oracle(self):
        design = random_design(14, n=40)
        X, y = design.points, design.values
        n = len(y)
        nn = np.empty(n)
        nb = []
        for i in range(n):
            dists = np.linalg.norm(X - X[i], axis=1)
            dists[i] = np.inf
            nn[i] = dists.min()
            better = [j for j in range(n)
                      if y[j] < y[i] or (y[j] == y[i] and j < i)]
            if better:
                nb.append(min(dists[j] for j in better))
        fv = nbc(design)
        assert fv["nbc.nn_nb_mean_ratio"] == pytest.approx(
            nn.mean() / np.mean(nb), abs=1e-12)
        assert fv["nbc.nn_nb_sd_ratio"] == pytest.approx(
            np.std(nn, ddof=1) / np.std(nb, ddof=1), abs=1e-12)

    def test_isotropic_scale_invariance(self):
        design = random_design(15, n=50)
        fv = nbc(design)
        scaled = nbc(scaled_copy(design, 4.0))
        for name in ("nbc.nn_nb_sd_ratio", "nbc.nn_nb_mean_ratio"):
            assert scaled[name] == pytest.approx(fv[name], abs=1e-10)

    def test_requires_enough_points(self):
        with pytest.raises(ValueError):
            nbc(random_design(16, n=4))


class TestIc:
    def test_alternating_oracle(self):
        # strictly alternating slopes: two symbol pairs, entropy log_6(2)
        points = np.linspace(0, 1, 20)[:, None]
        values = np.where(np.arange(20) % 2 == 0, 0.0, 1.0)
        design = design_from(points, values)
        fv = ic(design)
        assert fv["ic.h_max"] == pytest.approx(np.log(2) / np.log(6),
                                               abs=1e-12)

    def test_constant_objective(self):
        points = np.linspace(0, 1, 20)[:, None]
        design = design_from(points, np.zeros(20))
        fv = ic(design)
        assert fv["ic.h_max"] == 0.0
        assert fv["ic.eps_s"] == pytest.approx(-5.0)

    def test_h_max_bounds(self):
        for seed in range(5):
            fv = ic(random_design(seed, n=60))
            assert 0.0 <= fv["ic.h_max"] <= 1.0

    def test_greedy_tour_visits_all(self):
        design = random_design(17, n=30)
        tour = greedy_tour(design.points)
        assert tour[0] == 0
        assert sorted(tour) == list(range(30))

    def test_translation_invariance(self):
        design = random_design(18, n=50)
        fv = ic(design)
        shifted = ic(shifted_copy(design, np.full(design.dim, -2.2)))
        assert np.allclose(fv.values, shifted.values, equal_nan=True,
                           atol=1e-10)


class TestCmAngle:
    def test_single_cell_oracle(self):
        # one occupied cell; the angle at the cell center is computed by hand
        domain = BoxDomain(2, np.array([0.0, 0.0]), np.array([3.0, 3.0]))
        points = np.array([[0.9, 0.1], [0.1, 0.9], [0.2, 0.3]])
        design = SampleDesign(points=points, domain=domain,
                              values=np.array([0.0, 1.0, 0.5]),
                              evals_consumed=3)
        fv = cm_angle(design, blocks_per_dim=3)
        center = np.array([0.5, 0.5])
        v_best = points[0] - center
        v_worst = points[1] - center
        cos = v_best @ v_worst / (np.linalg.norm(v_best)
                                  * np.linalg.norm(v_worst))
        assert fv["cm_angle.angle_mean"] == pytest.approx(
            np.degrees(np.arccos(cos)), abs=1e-10)
        assert fv["cm_angle.frac_nonempty"] == pytest.approx(1.0 / 9.0)

    def test_angle_bounds(self):
        for seed in range(5):
            fv = cm_angle(random_design(seed, n=80))
            assert 0.0 <= fv["cm_angle.angle_mean"] <= 180.0

    def test_rejects_single_block(self):
        with pytest.raises(ValueError):
            cm_angle(random_design(19, n=20), blocks_per_dim=1)


class TestPca:
    def test_rank_one_oracle(self):
        x1 = np.linspace(-1, 1, 30)
        points = np.column_stack([x1, 2.0 * x1])
        design = design_from(points, 3.0 * x1)
        fv = pca(design)
        # a single component explains everything: k/ncols = 1/2 for X,
        # 1/3 for [X | y], and the first component carries all variance
        assert fv["pca.expl_var_cov_x"] == pytest.approx(0.5)
        assert fv["pca.expl_var_cov_init"] == pytest.approx(1.0 / 3.0)
        assert fv["pca.pc1_cov_x"] == pytest.approx(1.0, abs=1e-12)
        assert fv["pca.degenerate"] == 0.0

    def test_correlation_scale_free(self):
        design = random_design(20, n=50)
        fv = pca(design)
        stretched = design_from(design.points * np.array([1.0, 50.0]),
                                design.values,
                                domain=BoxDomain(2, np.array([-5.0, -250.0]),
                                                 np.array([5.0, 250.0])))
        fv2 = pca(stretched)
        assert fv2["pca.expl_var_cor_x"] == pytest.approx(
            fv["pca.expl_var_cor_x"], abs=1e-10)
        assert fv2["pca.pc1_cor_x"] == pytest.approx(
            fv["pca.pc1_cor_x"], abs=1e-10)

    def test_degenerate_flag_on_constant_column(self):
        points = np.column_stack([np.linspace(0, 1, 20), np.zeros(20)])
        design = design_from(points, np.linspace(0, 1, 20))
        assert pca(design)["pca.degenerate"] == 1.0

    def test_requires_more_points_than_dims(self):
        with pytest.raises(ValueError):
            pca(random_design(21, n=2, dim=3))


class TestBasic:
    def test_values(self):
        design = random_design(22, n=30, dim=3)
        fv = basic(design)
        assert fv["basic.dim"] == 3.0
        assert fv["basic.n"] == 30.0
        assert fv["basic.lower_min"] == -5.0
        assert fv["basic.upper_max"] == 5.0
        assert fv["basic.best"] == design.values.min()
        assert fv["basic.worst"] == design.values.max()


class TestComputeAll:
    def test_matches_schema(self):
        fv = compute_all(random_design(23, n=100))
        assert fv.names == schema()
        assert len(fv.names) == 83
        for set_name, _, _ in FEATURE_SETS:
            assert fv[f"{set_name}.status"] == 0.0

    def test_failing_set_degrades_to_nan(self):
        # 12 points: enough for most sets but below the levelset minimum
        fv = compute_all(random_design(24, n=12))
        assert fv["ela_level.status"] == 1.0
        assert np.isnan(fv["ela_level.mmce_lda_10"])
        assert fv["basic.status"] == 0.0
        assert fv.names == schema()

    def test_set_subset(self):
        fv = compute_all(random_design(25, n=50), sets=("basic", "nbc"))
        assert fv.names == schema(sets=("basic", "nbc"))

    def test_deterministic(self):
        a = compute_all(random_design(26, n=60))
        b = compute_all(random_design(26, n=60))
        assert np.array_equal(a.values, b.values, equal_nan=True)


class TestAggregateMedian:
    def test_nan_ignoring_median(self):
        rows = {
            (1, 2, 1): FeatureVector(("a", "b"), np.array([1.0, np.nan]), 1),
            (1, 2, 2): FeatureVector(("a", "b"), np.array([3.0, 5.0]), 1),
            (1, 2, 3): FeatureVector(("a", "b"), np.array([2.0, np.nan]), 1),
            (4, 2, 1): FeatureVector(("a", "b"),
                                     np.array([np.nan, np.nan]), 1),
        }
        matrix = FeatureMatrix.from_rows(("fid", "dim", "iid"), rows)
        agg = aggregate_median(matrix)
        assert agg.keys == [(1, 2), (4, 2)]
        assert agg.row((1, 2))[0] == 2.0
        assert agg.row((1, 2))[1] == 5.0
        assert np.isnan(agg.row((4, 2))[0])

    def test_rejects_aggregated_input(self):
        matrix = FeatureMatrix(("fid", "dim"), [(1, 2)], ("a",),
                               np.array([[1.0]]))
        with pytest.raises(ValueError):
            aggregate_median(matrix)
