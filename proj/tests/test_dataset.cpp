#include "bls/dataset.hpp"

#include "bls/bls.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>

using namespace bls;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content)
        : path("/tmp/bls_test_" + name) {
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_SUITE("dataset") {

TEST_CASE("load_csv parses a hand-written regression file exactly") {
    const TempFile f("reg.csv", "1.5,2.0,3.25\n-0.5,4.0,1.0\n");
    const Dataset ds = load_csv(f.path, CsvSchema{});
    REQUIRE(ds.sample_count() == 2);
    REQUIRE(ds.X.cols() == 2);
    CHECK(ds.X(0, 0) == 1.5);
    CHECK(ds.X(0, 1) == 2.0);
    CHECK(ds.Y(0, 0) == 3.25);
    CHECK(ds.X(1, 0) == -0.5);
    CHECK(ds.Y(1, 0) == 1.0);
    CHECK(ds.task == Task::regression);
}

TEST_CASE("load_csv honors the header flag") {
    const TempFile f("head.csv", "a,b,target\n1,2,3\n");
    CsvSchema schema;
    schema.has_header = true;
    const Dataset ds = load_csv(f.path, schema);
    CHECK(ds.sample_count() == 1);
    CHECK(ds.Y(0, 0) == 3.0);
    CHECK_THROWS(load_csv(f.path, CsvSchema{}));  // header cells are not numeric
}

TEST_CASE("load_csv maps string labels by first appearance") {
    const TempFile f("cls.csv", "0.1,0.2,cat\n0.3,0.4,dog\n0.5,0.6,cat\n");
    CsvSchema schema;
    schema.classification = true;
    const Dataset ds = load_csv(f.path, schema);
    CHECK(ds.task == Task::classification);
    CHECK(ds.class_labels == std::vector<std::string>{"cat", "dog"});
    CHECK(ds.labels == std::vector<int>{0, 1, 0});
    CHECK(ds.Y(0, 0) == 1.0);
    CHECK(ds.Y(1, 1) == 1.0);
    CHECK(ds.Y.rows() == 3);
}

TEST_CASE("load_csv honors a pinned label order") {
    const TempFile f("pin.csv", "0.1,0.2,dog\n0.3,0.4,cat\n");
    CsvSchema schema;
    schema.classification = true;
    schema.label_order = {"cat", "dog"};
    const Dataset ds = load_csv(f.path, schema);
    CHECK(ds.labels == std::vector<int>{1, 0});
    CHECK(ds.class_labels == std::vector<std::string>{"cat", "dog"});

    schema.label_order = {"cat"};
    CHECK_THROWS(load_csv(f.path, schema));  // 'dog' is not in the pinned set
}

TEST_CASE("load_csv rejects malformed input") {
    const TempFile empty("empty.csv", "");
    CHECK_THROWS(load_csv(empty.path, CsvSchema{}));
    const TempFile ragged("ragged.csv", "1,2,3\n4,5\n");
    CHECK_THROWS(load_csv(ragged.path, CsvSchema{}));
    const TempFile text("text.csv", "1,abc,3\n");
    CHECK_THROWS(load_csv(text.path, CsvSchema{}));
    CHECK_THROWS(load_csv("/nonexistent/file.csv", CsvSchema{}));
}

TEST_CASE("csv round trip") {
    const TempFile f("rt.csv", "1.25,-2.5,0.75\n3.5,4.125,-1.5\n");
    const Dataset ds = load_csv(f.path, CsvSchema{});
    const TempFile out("rt_out.csv", "");
    save_csv(out.path, ds);
    const Dataset back = load_csv(out.path, CsvSchema{});
    CHECK(ds.X == back.X);
    CHECK(ds.Y == back.Y);
}

TEST_CASE("normalize: unit range for regression, symmetric for classification") {
    Dataset ds;
    ds.task = Task::regression;
    ds.X.resize(2, 1);
    ds.X << 0.0, 10.0;
    ds.Y.resize(2, 1);
    ds.Y << 5.0, 15.0;
    const Dataset unit = normalize(ds, NormalizeMode::regression_unit);
    CHECK(unit.X(0, 0) == 0.0);
    CHECK(unit.X(1, 0) == 1.0);
    CHECK(unit.Y(0, 0) == 0.0);
    CHECK(unit.Y(1, 0) == 1.0);

    Dataset cls;
    cls.task = Task::classification;
    cls.X.resize(2, 1);
    cls.X << -2.0, 2.0;
    cls.Y = Matrix::Zero(2, 2);
    const Dataset sym = normalize(cls, NormalizeMode::classification_sym);
    CHECK(sym.X(0, 0) == -1.0);
    CHECK(sym.X(1, 0) == 1.0);
}

TEST_CASE("normalization is invertible from the recorded ranges") {
    Rng rng(8);
    Dataset ds;
    ds.task = Task::regression;
    ds.X = testsupport::random_matrix(rng, 20, 3, -7.0, 13.0);
    ds.Y = testsupport::random_matrix(rng, 20, 2, 2.0, 9.0);
    const Dataset unit = normalize(ds, NormalizeMode::regression_unit);

    CHECK(testsupport::max_abs_diff(denormalize_targets(unit, unit.Y), ds.Y) < 1e-12);
    // features invert through the recorded ranges the same way
    Matrix X_back = unit.X;
    for (Eigen::Index c = 0; c < X_back.cols(); ++c) {
        const auto& r = unit.feature_ranges[static_cast<std::size_t>(c)];
        X_back.col(c) = (X_back.col(c).array() * (r.max - r.min) + r.min).matrix();
    }
    CHECK(testsupport::max_abs_diff(X_back, ds.X) < 1e-12);
}

TEST_CASE("constant columns map to the midpoint") {
    Dataset ds;
    ds.task = Task::regression;
    ds.X.resize(3, 1);
    ds.X << 4.0, 4.0, 4.0;
    ds.Y.resize(3, 1);
    ds.Y << 1.0, 2.0, 3.0;
    const Dataset unit = normalize(ds, NormalizeMode::regression_unit);
    CHECK(unit.X(0, 0) == 0.5);
    CHECK(unit.X(2, 0) == 0.5);
}

TEST_CASE("apply_normalization reuses training ranges") {
    Dataset train;
    train.task = Task::regression;
    train.X.resize(2, 1);
    train.X << 0.0, 10.0;
    train.Y.resize(2, 1);
    train.Y << 0.0, 100.0;
    const Dataset unit = normalize(train, NormalizeMode::regression_unit);

    Dataset test = train;
    test.X << 5.0, 20.0;  // 20 falls outside: maps beyond 1 on purpose
    test.Y << 50.0, 50.0;
    const Dataset mapped = apply_normalization(test, unit.feature_ranges, unit.target_ranges,
                                               NormalizeMode::regression_unit);
    CHECK(mapped.X(0, 0) == 0.5);
    CHECK(mapped.X(1, 0) == 2.0);
    CHECK(mapped.Y(0, 0) == 0.5);
}

TEST_CASE("one_hot encodes and rejects out-of-range labels") {
    const Matrix Y = one_hot({2, 0, 1}, 3);
    CHECK(Y(0, 2) == 1.0);
    CHECK(Y(0, 0) == 0.0);
    CHECK(Y.rowwise().sum().minCoeff() == 1.0);
    CHECK(Y.rowwise().sum().maxCoeff() == 1.0);
    CHECK(decode_labels(Y) == std::vector<int>{2, 0, 1});
    CHECK_THROWS_AS(one_hot({3}, 3), std::invalid_argument);
    CHECK_THROWS_AS(one_hot({-1}, 3), std::invalid_argument);
}

TEST_CASE("inject_target_outliers touches exactly ceil(p*N) rows") {
    Rng rng(4);
    Dataset ds;
    ds.task = Task::regression;
    ds.X = testsupport::random_matrix(rng, 10, 2);
    ds.Y = testsupport::random_matrix(rng, 10, 1);

    const Dataset same = inject_target_outliers(ds, 0.0, 0.0, 1.0, 5);
    CHECK(same.Y == ds.Y);

    const Dataset all = inject_target_outliers(ds, 1.0, 0.5, 1.0, 5);
    for (Eigen::Index i = 0; i < 10; ++i) CHECK(all.Y(i, 0) != ds.Y(i, 0));

    const Dataset third = inject_target_outliers(ds, 0.25, 0.5, 1.0, 5);
    int touched = 0;
    for (Eigen::Index i = 0; i < 10; ++i)
        if (third.Y(i, 0) != ds.Y(i, 0)) ++touched;
    CHECK(touched == 3);  // ceil(0.25 * 10)
    CHECK(third.X == ds.X);

    // additive draws stay within [lo, hi] of the original
    for (Eigen::Index i = 0; i < 10; ++i) {
        const double delta = all.Y(i, 0) - ds.Y(i, 0);
        CHECK(delta >= 0.5);
        CHECK(delta <= 1.0);
    }

    const Dataset repeat = inject_target_outliers(ds, 0.25, 0.5, 1.0, 5);
    CHECK(repeat.Y == third.Y);

    Dataset cls = ds;
    cls.task = Task::classification;
    CHECK_THROWS_AS(inject_target_outliers(cls, 0.1, 0.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(inject_target_outliers(ds, 1.5, 0.0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("flip_labels flips and restores") {
    Dataset ds;
    ds.task = Task::classification;
    ds.X = Matrix::Zero(8, 1);
    ds.labels = {0, 1, 0, 1, 0, 1, 0, 1};
    ds.Y = one_hot(ds.labels, 2);
    ds.class_labels = {"a", "b"};

    const Dataset same = flip_labels(ds, 0.0, 9);
    CHECK(same.labels == ds.labels);

    const Dataset flipped = flip_labels(ds, 0.5, 9);
    int changed = 0;
    for (std::size_t i = 0; i < 8; ++i)
        if (flipped.labels[i] != ds.labels[i]) ++changed;
    CHECK(changed == 4);
    CHECK(decode_labels(flipped.Y) == flipped.labels);

    const Dataset restored = flip_labels(flipped, 0.5, 9);  // same selection, same seed
    CHECK(restored.labels == ds.labels);
    CHECK(restored.Y == ds.Y);

    Dataset multi = ds;
    multi.Y = one_hot({0, 1, 2, 0, 1, 2, 0, 1}, 3);
    CHECK_THROWS_AS(flip_labels(multi, 0.1, 1), std::invalid_argument);
    Dataset reg = ds;
    reg.task = Task::regression;
    CHECK_THROWS_AS(flip_labels(reg, 0.1, 1), std::invalid_argument);
}

}
