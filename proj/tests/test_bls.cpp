#include "bls/bls.hpp"

#include "bls/linalg.hpp"
#include "bls/rng.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace bls;
using testsupport::max_abs_diff;
using testsupport::random_matrix;

namespace {

Architecture arch_for(int input_dim, int output_dim, int nf = 3, int nw = 2, int ne = 4) {
    Architecture arch;
    arch.feature_groups = nw;
    arch.feature_nodes = nf;
    arch.enhancement_groups = 1;
    arch.enhancement_nodes = ne;
    arch.input_dim = input_dim;
    arch.output_dim = output_dim;
    return arch;
}

// With the identity feature map the feature columns are linear in the input,
// so wide states are structurally rank-deficient; tanh features give a
// generically full-rank state when a test needs one.
Architecture full_rank_arch(int input_dim, int output_dim, int nf = 3, int nw = 2, int ne = 4) {
    Architecture arch = arch_for(input_dim, output_dim, nf, nw, ne);
    arch.feature_activation = Activation::tanh;
    return arch;
}

// Cold retrain on the model's own basis and data: the batch reference every
// incremental update must reproduce.
Matrix batch_weights(const BlsModel& model) {
    const Matrix U = state_matrix(model.inputs, model.basis).values;
    return pseudoinverse(U) * model.targets;
}

void check_penrose(const Matrix& U, const Matrix& P, double tol) {
    // scale-relative: pseudoinverse entries blow up near rank deficiency
    const double u_scale = std::max(1.0, U.cwiseAbs().maxCoeff());
    const double p_scale = std::max(1.0, P.cwiseAbs().maxCoeff());
    CHECK(max_abs_diff(U * P * U, U) < tol * u_scale);
    CHECK(max_abs_diff(P * U * P, P) < tol * p_scale);
    CHECK(max_abs_diff((U * P).transpose(), U * P) < tol * p_scale * u_scale);
    CHECK(max_abs_diff((P * U).transpose(), P * U) < tol * p_scale * u_scale);
}

} // namespace

TEST_SUITE("bls") {

TEST_CASE("train_bls interpolates exactly when N <= L") {
    Rng rng(1);
    const Matrix X = random_matrix(rng, 8, 3);
    const Matrix Y = random_matrix(rng, 8, 2);
    const BlsModel model = train_bls(X, Y, full_rank_arch(3, 2), 0.0, 7);
    REQUIRE(model.state_width() == 10);
    CHECK(max_abs_diff(model.state * model.output_weights, Y) < 1e-8);
}

TEST_CASE("tiny ridge matches the pseudoinverse on a well-conditioned instance") {
    Rng rng(2);
    const Matrix X = random_matrix(rng, 60, 3);
    const Matrix Y = random_matrix(rng, 60, 1);
    const double tiny = std::ldexp(1.0, -30);
    const Architecture arch = full_rank_arch(3, 1);

    const Matrix U = state_matrix(X, init_basis(arch, 5)).values;
    const Matrix W_pinv = pseudoinverse(U) * Y;
    const Matrix W_ridge = ridge_solve(U, Y, tiny);
    CHECK(max_abs_diff(W_pinv, W_ridge) < 1e-6);
}

TEST_CASE("training is deterministic in (inputs, seed)") {
    Rng rng(3);
    const Matrix X = random_matrix(rng, 20, 3);
    const Matrix Y = random_matrix(rng, 20, 1);
    const BlsModel a = train_bls(X, Y, arch_for(3, 1), 0.0, 11);
    const BlsModel b = train_bls(X, Y, arch_for(3, 1), 0.0, 11);
    CHECK(a.output_weights == b.output_weights);
    CHECK(a.state == b.state);
}

TEST_CASE("predict and decode_labels") {
    Rng rng(4);
    const Matrix X = random_matrix(rng, 8, 3);
    const Matrix Y = random_matrix(rng, 8, 2);
    BlsModel model = train_bls(X, Y, full_rank_arch(3, 2), 0.0, 3);

    BlsModel zeroed = model;
    zeroed.output_weights.setZero();
    CHECK(predict(zeroed, X).cwiseAbs().maxCoeff() == 0.0);

    // exact-fit model reproduces its training targets
    CHECK(max_abs_diff(predict(model, X), Y) < 1e-8);

    Matrix scores(3, 3);
    scores << 0.9, 0.05, 0.05, 0.1, 0.1, 0.8, 0.4, 0.4, 0.2;
    const std::vector<int> labels = decode_labels(scores);
    CHECK(labels == std::vector<int>{0, 2, 0});  // tie in row 2 -> lowest index

    CHECK_THROWS_AS(predict(model, Matrix::Zero(2, 5)), std::invalid_argument);
}

TEST_CASE("incremental updates refuse the ridge regime") {
    Rng rng(5);
    const Matrix X = random_matrix(rng, 30, 3);
    const Matrix Y = random_matrix(rng, 30, 1);
    const BlsModel model = train_bls(X, Y, arch_for(3, 1), 0.05, 7);
    CHECK_FALSE(model.pinv_regime());
    CHECK_THROWS_AS(bls_add_samples(model, X.topRows(2), Y.topRows(2)), NumericalError);
    CHECK_THROWS_AS(bls_add_enhancement(model, 2, 1), NumericalError);
    CHECK_THROWS_AS(bls_add_features(model, 1), NumericalError);
}

TEST_CASE("bls_add_samples: already-satisfied samples leave W unchanged") {
    Rng rng(6);
    // wide regime (N < L) so the C != 0 branch is the natural one
    const Matrix X = random_matrix(rng, 6, 3);
    const Matrix Y = random_matrix(rng, 6, 1);
    const BlsModel model = train_bls(X, Y, arch_for(3, 1), 0.0, 9);

    const Matrix X_new = random_matrix(rng, 2, 3);
    const Matrix Y_new = state_matrix(X_new, model.basis).values * model.output_weights;
    const BlsModel updated = bls_add_samples(model, X_new, Y_new);
    CHECK(max_abs_diff(updated.output_weights, model.output_weights) < 1e-12);
}

TEST_CASE("bls_add_samples equals batch retrain, tall and wide") {
    Rng rng(7);

    SUBCASE("tall full-column-rank state (C = 0 branch)") {
        const Matrix X = random_matrix(rng, 40, 3);
        const Matrix Y = random_matrix(rng, 40, 2);
        const BlsModel model = train_bls(X, Y, arch_for(3, 2), 0.0, 13);
        const BlsModel updated =
            bls_add_samples(model, random_matrix(rng, 7, 3), random_matrix(rng, 7, 2));
        CHECK(max_abs_diff(updated.output_weights, batch_weights(updated)) < 1e-8);
        check_penrose(updated.state, updated.state_pinv, 1e-9);
    }

    SUBCASE("wide state, new independent rows (C != 0 branch)") {
        const Matrix X = random_matrix(rng, 5, 3);
        const Matrix Y = random_matrix(rng, 5, 1);
        const BlsModel model = train_bls(X, Y, arch_for(3, 1), 0.0, 13);
        const BlsModel updated =
            bls_add_samples(model, random_matrix(rng, 3, 3), random_matrix(rng, 3, 1));
        CHECK(max_abs_diff(updated.output_weights, batch_weights(updated)) < 1e-8);
        check_penrose(updated.state, updated.state_pinv, 1e-9);
    }

    SUBCASE("wide state, duplicated row (forces C = 0 branch)") {
        const Matrix X = random_matrix(rng, 5, 3);
        const Matrix Y = random_matrix(rng, 5, 1);
        const BlsModel model = train_bls(X, Y, arch_for(3, 1), 0.0, 13);
        const BlsModel updated = bls_add_samples(model, X.topRows(1), Y.topRows(1));
        CHECK(max_abs_diff(updated.output_weights, batch_weights(updated)) < 1e-8);
    }
}

TEST_CASE("bls_add_enhancement equals batch retrain") {
    Rng rng(8);
    const Matrix X = random_matrix(rng, 50, 3);
    const Matrix Y = random_matrix(rng, 50, 2);
    const BlsModel model = train_bls(X, Y, arch_for(3, 2), 0.0, 21);

    SUBCASE("random extension") {
        const BlsModel updated = bls_add_enhancement(model, 3, 404);
        CHECK(updated.state_width() == model.state_width() + 3);
        CHECK(max_abs_diff(updated.output_weights, batch_weights(updated)) < 1e-8);
        check_penrose(updated.state, updated.state_pinv, 1e-9);
        // prediction on the training inputs is the cached state times W
        CHECK(max_abs_diff(predict(updated, X), updated.state * updated.output_weights) < 1e-10);
    }

    SUBCASE("duplicated group forces the C = 0 branch") {
        EnhancementMap copy = model.basis.enhancement_groups[0];
        const BlsModel updated = bls_add_enhancement_with(model, copy);
        CHECK(max_abs_diff(updated.output_weights, batch_weights(updated)) < 1e-8);
    }
}

TEST_CASE("bls_add_features equals batch retrain") {
    Rng rng(9);
    const Matrix X = random_matrix(rng, 45, 4);
    const Matrix Y = random_matrix(rng, 45, 1);
    const BlsModel model = train_bls(X, Y, arch_for(4, 1), 0.0, 31);

    const BlsModel updated = bls_add_features(model, 77);
    // one feature group of nf plus one extension block of ne columns
    CHECK(updated.state_width() == model.state_width() + 3 + 4);
    CHECK(max_abs_diff(updated.output_weights, batch_weights(updated)) < 1e-8);
    check_penrose(updated.state, updated.state_pinv, 1e-9);

    const BlsModel again = bls_add_features(updated, 78);
    CHECK(max_abs_diff(again.output_weights, batch_weights(again)) < 1e-8);
}

TEST_CASE("chained increments stay equal to the batch retrain") {
    Rng rng(10);
    const Matrix X = random_matrix(rng, 60, 3);
    const Matrix Y = random_matrix(rng, 60, 2);
    BlsModel model = train_bls(X.topRows(40), Y.topRows(40), arch_for(3, 2), 0.0, 55);

    model = bls_add_samples(model, X.bottomRows(20), Y.bottomRows(20));
    model = bls_add_enhancement(model, 4, 100);
    model = bls_add_features(model, 200);
    CHECK(max_abs_diff(model.output_weights, batch_weights(model)) < 1e-8);
    check_penrose(model.state, model.state_pinv, 1e-9);
}

TEST_CASE("cached pseudoinverse acts as a left inverse at full column rank") {
    Rng rng(11);
    const Matrix X = random_matrix(rng, 40, 3);
    const Matrix Y = random_matrix(rng, 40, 1);
    const BlsModel model = train_bls(X, Y, full_rank_arch(3, 1), 0.0, 5);
    CHECK(max_abs_diff(model.state_pinv * model.state,
                       Matrix::Identity(model.state_width(), model.state_width())) < 1e-9);
}

}
