"""Tests for feature construction and test matrices."""

import json
import logging

import numpy as np
import pytest

from tests.fixtures.sample_mdps import BOUNDARY_REWARDS_MDP, HAND_WRITTEN_FEATURES, INF
from tropical_adp.config import FeatureKind, FeatureSpec, InfinitySpec, TestMatrixKind, TestMatrixSpec
from tropical_adp.errors import FeatureLoadError, InvalidArgumentError
from tropical_adp.features import (
    build_features,
    build_full_basis,
    build_random_ls_basis,
    build_reward_bins,
    build_test_matrix,
    load_features,
    reward_bin_edges,
)
from tropical_adp.mdp import Mdp, flatten_q
from tropical_adp.minplus import SpanBasis, mp_dot, save_matrix_csv

pytestmark = pytest.mark.unit


@pytest.fixture
def boundary_mdp() -> Mdp:
    return Mdp.from_dict(BOUNDARY_REWARDS_MDP)


class TestRewardBins:
    """Test reward-level binning features."""

    def test_edges(self):
        """Test that bins split [g_min, g_max] into k closed intervals of equal width."""
        np.testing.assert_allclose(reward_bin_edges(1.0, 10.0, 3), [[1, 4], [4, 7], [7, 10]])
        assert reward_bin_edges(0.1, 0.7, 3)[-1, 1] == 0.7

    def test_boundary_reward_in_both_bins(self, boundary_mdp):
        """Test that a reward on a shared edge gets a zero in both bins."""
        basis = build_reward_bins(boundary_mdp, 2)
        expected = np.array([[0.0, INF], [INF, 0.0], [0.0, 0.0], [0.0, INF]])
        np.testing.assert_array_equal(basis.matrix, expected)

    def test_sentinel_mode(self, boundary_mdp):
        """Test that sentinel features are finite with the sentinel off-bin."""
        basis = build_reward_bins(boundary_mdp, 2, InfinitySpec.from_string("sentinel:1000"))
        assert basis.infinity == 1000.0
        assert basis.matrix[0, 1] == 1000.0
        assert np.all(np.isfinite(basis.matrix))

    def test_rows_have_unit_norm(self, make_mdp):
        """Test that every row holds a zero, so each pair's min-plus norm is 0."""
        mdp = make_mdp(n=20, d=4, seed=6)
        basis = build_reward_bins(mdp, 5)
        assert basis.rows == mdp.n * mdp.d
        assert basis.k == 5
        assert np.all(basis.matrix.min(axis=1) == 0.0)

    def test_pairs_in_different_bins_are_far_apart(self, make_mdp):
        """Test that pairs sharing no bin are at min-plus distance +∞."""
        mdp = make_mdp(n=10, d=3, seed=8)
        basis = build_reward_bins(mdp, 3)
        rewards = flatten_q(mdp.rewards)
        low, high = int(np.argmin(rewards)), int(np.argmax(rewards))
        assert mp_dot(basis.row(low), basis.row(high)) == INF

    def test_bin_membership_matches_rewards(self, make_mdp):
        """Test that row s*d + a sits in the bin containing g_a(s)."""
        mdp = make_mdp(n=6, d=2, seed=4, reward_range=(1, 10))
        basis = build_reward_bins(mdp, 3)
        edges = reward_bin_edges(float(mdp.rewards.min()), float(mdp.rewards.max()), 3)
        for s in range(mdp.n):
            for a in range(mdp.d):
                g = mdp.rewards[s, a]
                inside = (edges[:, 0] <= g) & (g <= edges[:, 1])
                np.testing.assert_array_equal(basis.row(s * mdp.d + a) == 0.0, inside)

    def test_constant_rewards_collapse(self, single_state_mdp, caplog):
        """Test that equal rewards give one zero column and a warning."""
        with caplog.at_level(logging.WARNING, logger="tropical_adp.features"):
            basis = build_reward_bins(single_state_mdp, 4)
        assert basis.k == 1
        np.testing.assert_array_equal(basis.matrix, [[0.0]])
        assert "constant" in caplog.text

    def test_rejects_zero_bins(self, boundary_mdp):
        """Test that k must be positive."""
        with pytest.raises(InvalidArgumentError):
            build_reward_bins(boundary_mdp, 0)


class TestFullBasisAndFiles:
    """Test the identity basis and file-based features."""

    def test_full_basis(self):
        """Test the min-plus identity in both infinity modes."""
        exact = build_full_basis(3)
        assert exact.matrix[0, 1] == INF
        sentinel = build_full_basis(3, 50.0)
        assert sentinel.matrix[0, 1] == 50.0
        np.testing.assert_array_equal(np.diag(sentinel.matrix), 0.0)

    def test_load_json_and_override_infinity(self, tmp_path):
        """Test that an explicit infinity replaces the file's +∞ entries."""
        path = tmp_path / "features.json"
        path.write_text(json.dumps(HAND_WRITTEN_FEATURES), encoding="utf-8")
        assert load_features(path).matrix[0, 1] == INF
        assert load_features(path, 1000.0).matrix[0, 1] == 1000.0

    def test_load_csv(self, tmp_path):
        """Test CSV feature files."""
        path = tmp_path / "features.csv"
        save_matrix_csv(np.array(HAND_WRITTEN_FEATURES, dtype=float), path)
        basis = load_features(path)
        assert (basis.rows, basis.k) == (4, 2)
        assert basis.matrix[2, 0] == INF

    def test_malformed_csv(self, tmp_path):
        """Test that a CSV with an all-+∞ row fails with a feature-load error."""
        path = tmp_path / "features.csv"
        path.write_text("0,1\ninf,inf\n", encoding="utf-8")
        with pytest.raises(FeatureLoadError):
            load_features(path)

    def test_build_features_row_mismatch(self, boundary_mdp, tmp_path):
        """Test that a custom file must have n·d rows."""
        path = tmp_path / "features.json"
        path.write_text(json.dumps([[0.0], [0.0], [0.0]]), encoding="utf-8")
        spec = FeatureSpec(FeatureKind.CUSTOM_FILE, path=path)
        with pytest.raises(FeatureLoadError, match="expected n·d = 4"):
            build_features(spec, boundary_mdp)

    def test_build_features_dispatch(self, boundary_mdp):
        """Test that the feature setting selects bins or the full basis."""
        assert build_features(FeatureSpec(k=2), boundary_mdp).k == 2
        assert build_features(FeatureSpec(FeatureKind.FULL_BASIS), boundary_mdp).k == 4


class TestTestMatrix:
    """Test the W matrices for the variational projection."""

    def test_identity_and_features(self):
        """Test the deterministic choices."""
        basis = SpanBasis(np.array(HAND_WRITTEN_FEATURES, dtype=float))
        identity = build_test_matrix(TestMatrixSpec(TestMatrixKind.IDENTITY), basis)
        np.testing.assert_array_equal(np.diag(identity), 0.0)
        assert identity.shape == (4, 4)
        features = build_test_matrix(TestMatrixSpec(TestMatrixKind.FEATURES), basis)
        np.testing.assert_array_equal(features, basis.matrix)

    def test_random_default_columns(self, rng):
        """Test the default column count rows // 5 and a zero in every column."""
        basis = build_full_basis(40, 1000.0)
        w = build_test_matrix(TestMatrixSpec(), basis, rng)
        assert w.shape == (40, 8)
        assert set(np.unique(w)) <= {0.0, 1000.0}
        assert np.all((w == 0.0).any(axis=0))

    def test_random_default_is_sparse(self, rng):
        """Test that the default draw keeps about two zeros per column at 500 rows."""
        basis = build_full_basis(500, 1000.0)
        w = build_test_matrix(TestMatrixSpec(), basis, rng)
        zeros = (w == 0.0).sum(axis=0)
        assert w.shape == (500, 100)
        assert zeros.min() >= 1
        assert zeros.mean() <= 4.0

    def test_random_sparse_columns_get_a_zero(self, rng):
        """Test that even a very sparse draw leaves every column with a zero."""
        basis = build_full_basis(6)
        w = build_test_matrix(TestMatrixSpec(m=20, density=0.01), basis, rng)
        assert w.shape == (6, 20)
        assert np.all((w == 0.0).any(axis=0))

    def test_random_is_seeded(self):
        """Test that equal seeds give equal matrices."""
        basis = build_full_basis(10)
        first = build_test_matrix(TestMatrixSpec(m=3, density=0.5), basis, np.random.default_rng(1))
        second = build_test_matrix(TestMatrixSpec(m=3, density=0.5), basis, np.random.default_rng(1))
        np.testing.assert_array_equal(first, second)

    def test_random_needs_generator(self):
        """Test that random W requires an explicit generator."""
        with pytest.raises(InvalidArgumentError, match="random generator"):
            build_test_matrix(TestMatrixSpec(), build_full_basis(5))


class TestRandomLsBasis:
    """Test the conventional basis generator."""

    def test_constant_first_column(self, rng):
        """Test that column 0 is all ones and the rest are random."""
        basis = build_random_ls_basis(10, 3, rng)
        np.testing.assert_array_equal(basis.matrix[:, 0], 1.0)
        assert basis.matrix.shape == (10, 3)

    def test_rejects_k_above_n(self, rng):
        """Test that k may not exceed n."""
        with pytest.raises(InvalidArgumentError):
            build_random_ls_basis(3, 4, rng)
