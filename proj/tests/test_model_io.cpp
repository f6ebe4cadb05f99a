#include "bls/model_io.hpp"

#include "bls/rng.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cstdio>

using namespace bls;
using testsupport::random_matrix;

namespace {

Architecture arch_for() {
    Architecture arch;
    arch.feature_groups = 2;
    arch.feature_nodes = 3;
    arch.enhancement_groups = 1;
    arch.enhancement_nodes = 4;
    arch.input_dim = 3;
    arch.output_dim = 2;
    return arch;
}

struct TempPath {
    std::string path;
    explicit TempPath(const char* name) : path(std::string("/tmp/bls_io_") + name) {}
    ~TempPath() { std::remove(path.c_str()); }
};

} // namespace

TEST_SUITE("model_io") {

TEST_CASE("bls model round trip is exact") {
    Rng rng(1);
    const Matrix X = random_matrix(rng, 20, 3);
    const Matrix Y = random_matrix(rng, 20, 2);
    const BlsModel model = train_bls(X, Y, arch_for(), 0.0, 42);

    const TempPath file("bls.json");
    save_model(file.path, model);
    CHECK(model_kind_in_file(file.path) == "bls");

    const BlsModel back = load_bls_model(file.path);
    CHECK(back.output_weights == model.output_weights);
    CHECK(back.state == model.state);
    CHECK(back.state_pinv == model.state_pinv);
    CHECK(back.inputs == model.inputs);
    CHECK(back.targets == model.targets);
    CHECK(back.lambda == model.lambda);
    CHECK(back.basis.seed == model.basis.seed);
    CHECK(back.basis.feature_groups[0].weights == model.basis.feature_groups[0].weights);
    CHECK(back.basis.enhancement_groups[0].weights == model.basis.enhancement_groups[0].weights);

    // the reloaded model predicts identically
    const Matrix probe = random_matrix(rng, 5, 3);
    CHECK(predict(back, probe) == predict(model, probe));

    // and keeps working through an increment
    const BlsModel grown = bls_add_enhancement(back, 2, 7);
    CHECK(grown.state_width() == model.state_width() + 2);
}

TEST_CASE("cbls model round trip is exact") {
    Rng rng(2);
    const Matrix X = random_matrix(rng, 25, 3);
    Matrix Y = random_matrix(rng, 25, 2);
    Y(4, 1) += 5.0;
    TrainConfig config;
    config.gamma = 1e-6;
    config.sigma = 0.8;
    config.seed = 9;
    const CblsModel model = train_cbls(X, Y, arch_for(), config);
    REQUIRE(model.converged);

    const TempPath file("cbls.json");
    save_model(file.path, model);
    CHECK(model_kind_in_file(file.path) == "cbls");

    const CblsModel back = load_cbls_model(file.path);
    CHECK(back.output_weights == model.output_weights);
    CHECK(back.gram_inverse == model.gram_inverse);
    CHECK(back.weighted_state == model.weighted_state);
    CHECK(back.weighted_targets == model.weighted_targets);
    CHECK(back.sample_weights == model.sample_weights);
    CHECK(back.converged == model.converged);
    CHECK(back.iterations == model.iterations);
    CHECK(back.objective_trace == model.objective_trace);
    CHECK(back.config.sigma == model.config.sigma);

    const Matrix probe = random_matrix(rng, 4, 3);
    CHECK(predict(back, probe) == predict(model, probe));

    const CblsModel grown = cbls_add_samples(back, probe, random_matrix(rng, 4, 2));
    CHECK(grown.inputs.rows() == 29);
}

TEST_CASE("loading the wrong kind or a missing file fails") {
    Rng rng(3);
    const Matrix X = random_matrix(rng, 10, 3);
    const Matrix Y = random_matrix(rng, 10, 2);
    const BlsModel model = train_bls(X, Y, arch_for(), 0.0, 1);
    const TempPath file("kind.json");
    save_model(file.path, model);
    CHECK_THROWS(load_cbls_model(file.path));
    CHECK_THROWS(load_bls_model("/nonexistent/model.json"));
    CHECK_THROWS(model_kind_in_file("/nonexistent/model.json"));
}

}
