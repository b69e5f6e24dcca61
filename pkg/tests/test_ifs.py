import math

import numpy as np
import pytest

from affdim import (
    AffineMap2,
    IfsFamily,
    LineDir,
    Mat2,
    RankOneFactor,
    RankOneSite,
    attractor_bound,
    check_irreducibility,
    compose_word,
    enumerate_words,
    fixed_point,
    identity_map,
    natural_projection,
    unit_vector,
    word_kernel,
)
from affdim.errors import ConfigError, ContractionError
from affdim.ifs import compose_linear

from families import cantor_similarities, scalar_family


def random_linear(rng):
    if rng.uniform() < 0.5:
        return Mat2.from_array(rng.normal(size=(2, 2)) * 0.4)
    return RankOneFactor(
        float(rng.uniform(0.1, 0.8)),
        float(rng.uniform(0.0, math.pi)),
        float(rng.uniform(0.0, math.pi)),
    )


def as_array(linear):
    return linear.as_array() if isinstance(linear, Mat2) else linear.as_mat2().as_array()


class TestComposeLinear:
    def test_matches_matrix_product(self):
        rng = np.random.default_rng(5)
        for _ in range(300):
            a, b = random_linear(rng), random_linear(rng)
            got = compose_linear(a, b)
            assert np.allclose(as_array(got), as_array(a) @ as_array(b), atol=1e-13)

    def test_preserves_factored_forms(self):
        dense = Mat2(0.3, 0.1, -0.2, 0.4)
        rank = RankOneFactor(0.5, 0.3, 1.1)
        assert isinstance(compose_linear(rank, dense), RankOneFactor)
        assert isinstance(compose_linear(dense, rank), RankOneFactor)
        assert isinstance(compose_linear(rank, rank), RankOneFactor)
        assert isinstance(compose_linear(dense, dense), Mat2)

    def test_orthogonal_rank_one_pair_collapses_exactly(self):
        # w of the left factor perpendicular to v of the right factor
        left = RankOneFactor(0.5, 0.2, 1.0)
        right = RankOneFactor(0.7, 1.0 + math.pi / 2, 0.4)
        out = compose_linear(left, right)
        assert isinstance(out, Mat2)
        assert out.singular_values() == (0.0, 0.0)

    def test_second_singular_value_exactly_zero(self):
        dense = Mat2(0.3, 0.1, -0.2, 0.4)
        rank = RankOneFactor(0.5, 0.3, 1.1)
        for prod in (compose_linear(dense, rank), compose_linear(rank, dense)):
            assert prod.singular_values()[1] == 0.0


class TestAffineMap2:
    def test_apply_and_compose(self):
        f = AffineMap2(Mat2.diagonal(0.5, 0.5), (1.0, 0.0))
        g = AffineMap2(Mat2.diagonal(0.25, 0.25), (0.0, 1.0))
        p = np.array([2.0, 2.0])
        assert np.allclose(f.compose(g).apply(p), f.apply(g.apply(p)))

    def test_apply_points_matches_apply(self):
        rng = np.random.default_rng(8)
        for linear in (Mat2(0.3, 0.1, -0.2, 0.4), RankOneFactor(0.5, 0.3, 1.1)):
            f = AffineMap2(linear, (0.2, -0.1))
            pts = rng.normal(size=(17, 2))
            batch = f.apply_points(pts)
            for k in range(17):
                assert np.allclose(batch[k], f.apply(pts[k]), atol=1e-14)

    def test_fixed_point(self):
        f = AffineMap2(Mat2.diagonal(0.5, 0.25), (1.0, 3.0))
        p = fixed_point(f)
        assert np.allclose(f.apply(p), p, atol=1e-14)

    def test_identity_map(self):
        assert np.allclose(identity_map().apply((3.0, -4.0)), [3.0, -4.0])


class TestWords:
    def test_compose_word_order(self):
        # word (0, 1) means f_0 after f_1
        maps = cantor_similarities().instantiate()
        w = compose_word(maps, (0, 1))
        assert np.allclose(w.apply((0.0, 0.0)), maps[0].apply(maps[1].apply((0.0, 0.0))))

    def test_empty_word_is_identity(self):
        maps = cantor_similarities().instantiate()
        assert np.allclose(compose_word(maps, ()).apply((1.0, 2.0)), [1.0, 2.0])

    def test_enumerate_words_counts(self):
        words = list(enumerate_words(2, 3))
        assert len(words) == 2 + 4 + 8

    def test_enumerate_words_prunes_subtrees(self):
        total = list(enumerate_words(2, 4))
        kept = list(enumerate_words(2, 4, prune=lambda word: len(word) >= 2))
        assert len(kept) < len(total)
        assert all(len(w) <= 1 for w in kept)


def test_attractor_bound_cantor():
    maps = cantor_similarities().instantiate()
    # max translation 2/3, max norm 1/3
    assert attractor_bound(maps) == pytest.approx(1.0, abs=1e-14)


def test_attractor_bound_requires_contraction():
    expanding = [AffineMap2(Mat2.diagonal(1.0, 0.5), (0.0, 0.0))]
    with pytest.raises(ContractionError):
        attractor_bound(expanding)


class TestRankOneSite:
    def test_row_angle_moves_linearly(self):
        site = RankOneSite(rho=0.5, v_angle=0.1, c=0.2, beta=2.0, translation=(0.0, 0.0))
        assert site.w_angle(0.3) == pytest.approx(0.2 + 0.6)

    def test_map_at(self):
        site = RankOneSite(rho=0.5, v_angle=0.0, c=0.0, beta=1.0, translation=(1.0, 0.0))
        m = site.map_at(0.0)
        assert isinstance(m.linear, RankOneFactor)
        assert np.allclose(m.apply((1.0, 0.0)), [1.5, 0.0])


class TestIfsFamily:
    def test_rejects_non_contracting_regular(self):
        with pytest.raises(ContractionError):
            IfsFamily(
                regular=(AffineMap2(Mat2.diagonal(1.0, 0.3), (0.0, 0.0)),),
                singular=(),
            )

    def test_rejects_singular_regular_matrix(self):
        with pytest.raises(ConfigError):
            IfsFamily(
                regular=(AffineMap2(Mat2(0.3, 0.3, 0.3, 0.3), (0.0, 0.0)),),
                singular=(),
            )

    def test_letter_layout(self):
        fam = scalar_family()
        assert fam.n_regular == 1 and fam.n_singular == 1 and fam.n_maps == 2
        assert fam.singular_letter(0) == 1

    def test_angles_broadcast(self):
        fam = scalar_family()
        assert fam.angles(0.7) == (0.7,)
        with pytest.raises(ConfigError):
            fam.angles((0.1, 0.2))

    def test_instantiate_order_and_parameter(self):
        fam = scalar_family()
        maps = fam.instantiate(math.pi / 2)
        assert isinstance(maps[0].linear, Mat2)
        rank = maps[1].linear
        # row direction rotated to e2
        assert abs(float(rank.w() @ unit_vector(0.0))) < 1e-12

    def test_regular_subfamily(self):
        sub = scalar_family().regular_subfamily()
        assert sub.n_singular == 0 and sub.n_regular == 1


def test_natural_projection_point_and_diameter():
    fam = cantor_similarities()
    point, diam = natural_projection(fam, 0.0, (0, 1, 0))
    # f0 f1 f0 (0) = f0 f1 (0) = f0(2/3) = 2/9
    assert np.allclose(point, [2.0 / 9.0, 0.0], atol=1e-15)
    assert diam == pytest.approx((1.0 / 3.0) ** 3 * 1.0, rel=1e-12)


class TestWordKernel:
    def test_regular_word_has_trivial_kernel(self):
        fam = scalar_family()
        info = word_kernel(fam, 0.0, (0, 0))
        assert info.kind == "trivial"

    def test_site_word_kernel_line(self):
        fam = scalar_family()
        info = word_kernel(fam, 0.0, (1, 0))
        assert info.kind == "line"
        # kernel of rho v w^T (1/3 Id) is perpendicular to w = e1
        assert info.direction.distance_to(LineDir(math.pi / 2)) < 1e-10

    def test_collapsed_word_full_plane(self):
        # w perpendicular to v: f_j o f_j is the zero linear map
        fam = IfsFamily(
            regular=(),
            singular=(
                RankOneSite(
                    rho=0.5,
                    v_angle=0.0,
                    c=math.pi / 2,
                    beta=1.0,
                    translation=(0.3, 0.0),
                ),
            ),
        )
        info = word_kernel(fam, 0.0, (0, 0))
        assert info.kind == "full_plane"


class TestIrreducibility:
    def test_rotations_have_no_invariant_line(self):
        mats = [Mat2.scaled_rotation(0.3, 1.0), Mat2.scaled_rotation(0.3, 2.2)]
        assert check_irreducibility(mats) is None

    def test_shared_eigendirection_detected(self):
        mats = [Mat2.diagonal(0.3, 0.1), Mat2.diagonal(0.2, 0.4)]
        witness = check_irreducibility(mats)
        assert witness is not None
        assert min(
            witness.distance_to(LineDir(0.0)), witness.distance_to(LineDir(math.pi / 2))
        ) < 1e-10

    def test_all_scalar_returns_witness(self):
        mats = [Mat2.diagonal(0.3, 0.3), Mat2.diagonal(0.2, 0.2)]
        witness = check_irreducibility(mats)
        assert witness is not None

    def test_single_nonscalar_matrix_reducible(self):
        witness = check_irreducibility([Mat2.diagonal(0.3, 0.2)])
        assert witness is not None
