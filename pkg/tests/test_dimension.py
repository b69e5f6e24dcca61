import math

import numpy as np
import pytest

from affdim import (
    AffineMap2,
    AnchoredSumSpec,
    IfsFamily,
    Mat2,
    RankOneSite,
    SolverOptions,
    affinity_dimension,
    anchor_exponent_lower,
    anchor_exponent_profile,
    anchor_exponent_upper,
    anchored_norm_sum,
    partition_sum,
    pressure_upper_root,
    quasi_multiplicativity_probe,
    regular_dimension_bracket,
    similarity_dimension_1d,
)
from affdim.errors import BudgetError, ConfigError
from affdim.ifs import compose_word, enumerate_words

from families import (
    brute_svf,
    cantor_similarities,
    random_admissible,
    rotation_family,
    scalar_family,
    two_anchor_family,
    weighted_root,
)

SCALAR_LIMIT = weighted_root((0.5, 1.0 / 3.0))  # root of 2^-s + 3^-s = 1


def anchor_spec(fam, j, max_len):
    # start/end and allowed use site indices, not global letters
    allowed = frozenset(range(fam.n_singular)) - {j}
    return AnchoredSumSpec(start=j, end=j, max_len=max_len, allowed=allowed)


class TestAnchoredNormSum:
    def test_scalar_family_closed_form_s1(self):
        # empty word + two powers of the 1/3 similarity, each weighted by
        # rho |<w, 3^-k v>| = (1/2) 3^-k at alpha = 0
        fam = scalar_family()
        got = anchored_norm_sum(fam, 0.0, anchor_spec(fam, 0, 2), 1.0)
        assert got == pytest.approx(0.5 * (1 + 1 / 3 + 1 / 9), abs=1e-15)

    def test_scalar_family_counts_nonzero_terms_at_s0(self):
        fam = scalar_family()
        got = anchored_norm_sum(fam, 0.0, anchor_spec(fam, 0, 2), 0.0)
        assert got == 3.0

    def test_zero_terms_stay_masked_at_s0(self):
        # antidiagonal linear part swaps the axes, so odd-length words
        # land exactly perpendicular to the row direction at alpha = 0
        fam = IfsFamily(
            regular=(
                AffineMap2(Mat2(0.0, 0.3, 0.3, 0.0), (0.0, 0.0)),
            ),
            singular=(
                RankOneSite(
                    rho=0.5, v_angle=0.0, c=0.0, beta=1.0, translation=(1.0, 0.0)
                ),
            ),
        )
        got = anchored_norm_sum(fam, 0.0, anchor_spec(fam, 0, 2), 0.0)
        # lengths 0 and 2 survive, length 1 collapses exactly
        assert got == 2.0

    def test_spec_validation(self):
        fam = scalar_family()
        with pytest.raises(ConfigError):
            AnchoredSumSpec(start=0, end=0, max_len=2, allowed=frozenset({0, 1}))

    def test_other_anchors_allowed_in_words(self):
        fam = two_anchor_family()
        spec = anchor_spec(fam, 0, 2)
        assert 1 in spec.allowed
        value = anchored_norm_sum(fam, 0.0, spec, 1.0)
        assert value > 0.0


class TestProfile:
    def test_scalar_profile_values(self):
        fam = scalar_family()
        prof = anchor_exponent_profile(fam, 0.0, 0, max_len=12)
        assert prof[0] == 0.0
        # length-1 truncation solves 2^-s + 6^-s = 1
        assert prof[1] == pytest.approx(weighted_root((0.5, 1 / 6)), abs=1e-8)
        assert prof[12] == pytest.approx(SCALAR_LIMIT, abs=1e-3)
        assert prof[12] <= SCALAR_LIMIT + 1e-12

    def test_profile_exactly_nondecreasing(self):
        fam = scalar_family()
        prof = anchor_exponent_profile(fam, 0.4, 0, max_len=10)
        assert all(b >= a for a, b in zip(prof, prof[1:]))

    def test_lower_is_last_profile_entry(self):
        fam = scalar_family()
        prof = anchor_exponent_profile(fam, 0.0, 0, max_len=8)
        assert anchor_exponent_lower(fam, 0.0, 0, max_len=8) == prof[-1]


class TestUpper:
    def test_scalar_upper_certified_and_tight(self):
        fam = scalar_family()
        upper, certified = anchor_exponent_upper(fam, 0.0, 0, max_len=12)
        assert certified
        assert SCALAR_LIMIT <= upper + 1e-12
        assert upper == pytest.approx(SCALAR_LIMIT, abs=5e-3)


class TestAffinityDimension:
    def test_scalar_bracket(self):
        bracket = affinity_dimension(scalar_family(), 0.0, SolverOptions(depth=12))
        assert bracket.lower <= SCALAR_LIMIT <= bracket.upper
        assert bracket.upper - bracket.lower <= 1e-2
        assert bracket.certified_upper
        assert bracket.depth == 12
        assert set(bracket.per_anchor) == {0}

    def test_needs_a_site(self):
        with pytest.raises(ConfigError):
            affinity_dimension(cantor_similarities(), 0.0)

    def test_regular_part_must_stay_below_one(self):
        # invertible sub-system alone has exponent > 1
        heavy = IfsFamily(
            regular=(
                AffineMap2(Mat2.diagonal(0.8, 0.75), (0.0, 0.0)),
                AffineMap2(Mat2.diagonal(0.75, 0.8), (0.2, 0.0)),
            ),
            singular=(
                RankOneSite(rho=0.5, v_angle=0.0, c=0.0, beta=1.0, translation=(1.0, 0.0)),
            ),
        )
        with pytest.raises(ConfigError):
            affinity_dimension(heavy, 0.0)

    def test_brackets_clamp_at_one(self):
        fam = IfsFamily(
            regular=(AffineMap2(Mat2.diagonal(0.4, 0.4), (0.0, 0.0)),),
            singular=(
                RankOneSite(rho=0.75, v_angle=0.0, c=0.0, beta=1.0, translation=(1.0, 0.0)),
                RankOneSite(rho=0.75, v_angle=0.9, c=0.4, beta=1.0, translation=(0.0, 1.0)),
            ),
        )
        bracket = affinity_dimension(fam, 0.0, SolverOptions(depth=8))
        assert bracket.upper <= 1.0
        assert bracket.lower <= bracket.upper

    def test_threads_do_not_change_results(self):
        fam = two_anchor_family()
        one = affinity_dimension(fam, 0.3, SolverOptions(depth=10, threads=1))
        many = affinity_dimension(fam, 0.3, SolverOptions(depth=10, threads=4))
        assert one.lower == many.lower and one.upper == many.upper

    def test_budget_is_enforced(self):
        with pytest.raises(BudgetError):
            affinity_dimension(scalar_family(), 0.0, SolverOptions(depth=12, budget=10))


class TestPartitionSum:
    def brute(self, maps, n, s, n_regular):
        # words touching a rank-one letter are exactly rank deficient;
        # numpy's SVD of the composed matrix cannot see that, so the
        # small singular value is forced to zero for those words
        total = 0.0
        for word in enumerate_words(len(maps), n):
            if len(word) != n:
                continue
            linear = compose_word(maps, word).linear
            arr = (
                linear.as_array()
                if isinstance(linear, Mat2)
                else linear.as_mat2().as_array()
            )
            if any(letter >= n_regular for letter in word):
                a1 = float(np.linalg.norm(arr, 2))
                if s <= 0.0:
                    total += 1.0
                elif s <= 1.0:
                    total += a1 ** s
                continue
            total += brute_svf(arr, s)
        return total

    def test_matches_brute_force_on_mixed_family(self):
        fam = IfsFamily(
            regular=(
                AffineMap2(Mat2(0.3, 0.1, -0.05, 0.25), (0.1, 0.0)),
                AffineMap2(Mat2.scaled_rotation(0.35, 0.8), (0.0, 0.1)),
            ),
            singular=(
                RankOneSite(rho=0.45, v_angle=0.4, c=0.3, beta=1.0, translation=(0.0, 0.0)),
            ),
        )
        maps = fam.instantiate(0.6)
        for n in (1, 2, 4):
            for s in (0.0, 0.5, 1.0, 1.5):
                got = partition_sum(maps, n, s)
                want = self.brute(maps, n, s, fam.n_regular)
                assert got == pytest.approx(want, rel=1e-12, abs=1e-13)

    def test_s0_counts_every_word(self):
        maps = scalar_family().instantiate()
        assert partition_sum(maps, 3, 0.0) == 8.0

    def test_validation(self):
        maps = scalar_family().instantiate()
        with pytest.raises(ValueError):
            partition_sum(maps, 0, 1.0)
        with pytest.raises(ValueError):
            partition_sum(maps, 2, -0.5)


class TestPressureRoot:
    def test_similarities_exact_at_every_depth(self):
        maps = cantor_similarities().instantiate()
        target = math.log(2) / math.log(3)
        for n in (1, 3, 6):
            assert pressure_upper_root(maps, n) == pytest.approx(target, abs=1e-8)

    def test_single_map_root_zero(self):
        maps = [AffineMap2(Mat2.diagonal(0.3, 0.3), (0.0, 0.0))]
        assert pressure_upper_root(maps, 4) == 0.0

    def test_clamped_at_two(self):
        maps = [
            AffineMap2(Mat2.diagonal(0.9, 0.9), (0.0, 0.0)),
            AffineMap2(Mat2.diagonal(0.9, 0.9), (0.1, 0.0)),
        ]
        assert pressure_upper_root(maps, 3) == 2.0


class TestRegularBracket:
    def test_cantor_similarities_collapse(self):
        bracket = regular_dimension_bracket(cantor_similarities(), SolverOptions(depth=12))
        target = math.log(2) / math.log(3)
        assert bracket.lower == pytest.approx(target, abs=1e-6)
        assert bracket.upper == pytest.approx(target, abs=1e-6)
        assert bracket.lower <= bracket.upper
        assert bracket.certified_upper

    def test_rotation_pair_exact(self):
        fam = rotation_family().regular_subfamily()
        bracket = regular_dimension_bracket(fam, SolverOptions(depth=10))
        target = math.log(2) / math.log(10 / 3)
        assert bracket.lower == pytest.approx(target, abs=1e-8)
        assert bracket.upper == pytest.approx(target, abs=1e-8)

    def test_generic_family_ordered_bracket(self):
        fam = IfsFamily(
            regular=(
                AffineMap2(Mat2(0.3, 0.12, -0.04, 0.22), (0.0, 0.0)),
                AffineMap2(Mat2(0.25, -0.08, 0.1, 0.3), (0.1, 0.0)),
            ),
            singular=(),
        )
        bracket = regular_dimension_bracket(fam, SolverOptions(depth=10))
        assert 0.0 < bracket.lower <= bracket.upper < 2.0

    def test_depth_guard(self):
        with pytest.raises(ConfigError):
            regular_dimension_bracket(cantor_similarities(), SolverOptions(depth=0))


class TestSimilarityDimension1d:
    def test_half_third(self):
        assert similarity_dimension_1d((0.5, 1 / 3)) == pytest.approx(
            SCALAR_LIMIT, abs=1e-10
        )

    def test_single_ratio(self):
        assert similarity_dimension_1d([0.4]) == 0.0

    def test_negative_ratios_use_magnitude(self):
        assert similarity_dimension_1d((-0.5, 1 / 3)) == pytest.approx(
            SCALAR_LIMIT, abs=1e-10
        )

    def test_validation(self):
        with pytest.raises(ConfigError):
            similarity_dimension_1d(())
        with pytest.raises(ConfigError):
            similarity_dimension_1d((0.5, 1.0))


class TestQuasiMultiplicativity:
    def test_positive_floor_on_rotation_family(self):
        fam = rotation_family()
        rng = np.random.default_rng(2)
        words = [
            tuple(int(x) for x in rng.integers(0, 2, size=rng.integers(1, 6)))
            for _ in range(100)
        ]
        floor = quasi_multiplicativity_probe(fam, 0.0, 3, words)
        assert floor > 0.0

    def test_rejects_site_letters_in_samples(self):
        fam = rotation_family()
        with pytest.raises(ConfigError):
            quasi_multiplicativity_probe(fam, 0.0, 2, [(2,)])


class TestRandomFamilies:
    @pytest.mark.parametrize("seed", range(6))
    def test_bracket_is_consistent(self, seed):
        fam = random_admissible(seed)
        bracket = affinity_dimension(fam, 0.25, SolverOptions(depth=9))
        assert 0.0 <= bracket.lower <= bracket.upper <= 1.0
        for anchor in bracket.per_anchor.values():
            assert anchor.lower >= 0.0

    @pytest.mark.parametrize("seed", (3, 11))
    def test_profiles_monotone(self, seed):
        fam = random_admissible(seed)
        for j in range(fam.n_singular):
            prof = anchor_exponent_profile(fam, 0.1, j, max_len=10)
            assert all(b >= a for a, b in zip(prof, prof[1:]))
