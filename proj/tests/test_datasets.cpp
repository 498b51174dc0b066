#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "gp/datasets.hpp"
#include "gp/errors.hpp"

using namespace gp;

namespace {

std::string write_temp_csv(const char* name, const std::string& content) {
    const std::string path =
        (std::filesystem::temp_directory_path() / name).string();
    std::ofstream out(path);
    out << content;
    out.close();
    return path;
}

} // namespace

TEST_CASE("keijzer12 formula and counts") {
    const Dataset ds = gen_keijzer12(5000, 500, 11, -3.0, 3.0);
    CHECK(ds.input_size == 2);
    CHECK(ds.train_idx.size() == 5000);
    CHECK(ds.test_idx.size() == 500);
    CHECK(ds.samples.size() == 5500);

    // Targets must match an independent re-evaluation of the formula.
    for (const Sample& s : ds.samples) {
        const double expect = s.x[0] * s.x[1] + std::sin((s.x[0] - 1.0) * (s.x[1] - 1.0));
        REQUIRE(s.y == doctest::Approx(expect).epsilon(1e-15));
        REQUIRE(s.x[0] >= -3.0);
        REQUIRE(s.x[0] <= 3.0);
    }

    // Fixed points of the formula.
    CHECK(1.0 * 1.0 + std::sin(0.0) == 1.0);
    CHECK(std::sin(1.0) == doctest::Approx(0.8414709848).epsilon(1e-9));
}

TEST_CASE("generators are pure functions of their parameters") {
    const Dataset a = gen_keijzer12(100, 10, 42, -3.0, 3.0);
    const Dataset b = gen_keijzer12(100, 10, 42, -3.0, 3.0);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        REQUIRE(a.samples[i].x == b.samples[i].x);
        REQUIRE(a.samples[i].y == b.samples[i].y);
    }
    const Dataset c = gen_keijzer12(100, 10, 43, -3.0, 3.0);
    CHECK(a.samples[0].x != c.samples[0].x);
}

TEST_CASE("csv loading, split and standardization") {
    std::string content = "f1,f2,f3,f4,class\n";
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        char row[128];
        std::snprintf(row, sizeof row, "%.6f,%.6f,%.6f,%.6f,%d\n", rng.uniform(0.0, 10.0),
                      rng.uniform(-5.0, 5.0), rng.uniform(100.0, 200.0), rng.uniform(0.0, 1.0),
                      static_cast<int>(rng.bounded(2)));
        content += row;
    }
    const std::string path = write_temp_csv("gp_test_tabular.csv", content);

    CsvOptions opt;
    opt.label = "class";
    opt.train_count = 150;
    opt.task = TaskKind::Classification;
    const Dataset ds = load_csv(path, opt);
    CHECK(ds.input_size == 4);
    CHECK(ds.samples.size() == 200);
    CHECK(ds.train_idx.size() == 150);
    CHECK(ds.test_idx.size() == 50);

    // Split indices are disjoint and cover everything.
    std::set<std::int32_t> all(ds.train_idx.begin(), ds.train_idx.end());
    all.insert(ds.test_idx.begin(), ds.test_idx.end());
    CHECK(all.size() == 200);

    // Standardization is fit on the train split only: train means ~ 0,
    // train sd ~ 1 (recomputed here independently).
    for (int f = 0; f < 4; ++f) {
        double mean = 0.0;
        for (std::int32_t i : ds.train_idx) mean += ds.samples[static_cast<std::size_t>(i)].x[static_cast<std::size_t>(f)];
        mean /= static_cast<double>(ds.train_idx.size());
        REQUIRE(std::fabs(mean) < 1e-9);
        double var = 0.0;
        for (std::int32_t i : ds.train_idx) {
            const double d = ds.samples[static_cast<std::size_t>(i)].x[static_cast<std::size_t>(f)] - mean;
            var += d * d;
        }
        var /= static_cast<double>(ds.train_idx.size());
        REQUIRE(std::sqrt(var) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("csv error diagnostics carry row and column context") {
    CsvOptions opt;
    opt.label = "y";
    opt.train_count = 1;
    opt.task = TaskKind::Regression;

    const std::string bad_cell = write_temp_csv("gp_test_badcell.csv", "a,y\n1,2\nfoo,3\n");
    CHECK_THROWS_WITH_AS(load_csv(bad_cell, opt),
                         doctest::Contains("row 3"), DataError);

    const std::string ragged = write_temp_csv("gp_test_ragged.csv", "a,y\n1,2\n1,2,3\n");
    CHECK_THROWS_WITH_AS(load_csv(ragged, opt), doctest::Contains("row 3"), DataError);

    const std::string no_label = write_temp_csv("gp_test_nolabel.csv", "a,b\n1,2\n");
    CHECK_THROWS_AS(load_csv(no_label, opt), DataError);

    const std::string one_row = write_temp_csv("gp_test_onerow.csv", "a,y\n1,2\n");
    CHECK_THROWS_AS(load_csv(one_row, opt), ConfigError);

    CsvOptions cls = opt;
    cls.task = TaskKind::Classification;
    const std::string bad_label = write_temp_csv("gp_test_badlabel.csv", "a,y\n1,2\n2,0\n3,1\n");
    CHECK_THROWS_AS(load_csv(bad_label, cls), DataError);

    CHECK_THROWS_AS(load_csv("/no/such/file.csv", opt), DataError);
}

TEST_CASE("noisy patches: shapes, noiseless case and noise level") {
    SUBCASE("patch side 21 gives 441 features") {
        const Dataset ds = gen_noisy_patches(10, 2, 21, 0.1, 3);
        CHECK(ds.input_size == 441);
    }
    SUBCASE("zero noise means the center feature equals the target") {
        const Dataset ds = gen_noisy_patches(50, 5, 9, 0.0, 4);
        const int center = (9 / 2) * 9 + 9 / 2;
        for (const Sample& s : ds.samples) {
            REQUIRE(s.x[static_cast<std::size_t>(center)] == s.y);
            for (double v : s.x) {
                REQUIRE(v >= 0.0);
                REQUIRE(v <= 1.0);
            }
        }
    }
    SUBCASE("center-pixel noise has variance ~ sigma^2") {
        const double sigma = 0.1;
        const Dataset ds = gen_noisy_patches(10000, 1, 9, sigma, 5);
        const int center = (9 / 2) * 9 + 9 / 2;
        double mse = 0.0;
        for (std::int32_t i : ds.train_idx) {
            const Sample& s = ds.samples[static_cast<std::size_t>(i)];
            const double d = s.x[static_cast<std::size_t>(center)] - s.y;
            mse += d * d;
        }
        mse /= static_cast<double>(ds.train_idx.size());
        CHECK(mse == doctest::Approx(sigma * sigma).epsilon(0.10));
    }
}

TEST_CASE("batch iterator partitions each epoch") {
    const Dataset ds = gen_keijzer12(1200, 100, 6, -3.0, 3.0);

    SUBCASE("1200/60 gives 20 disjoint covering batches") {
        BatchIterator it(ds, 60, 99);
        std::set<std::int32_t> seen;
        for (int b = 0; b < 20; ++b) {
            const SampleBatch batch = it.next();
            REQUIRE(batch.indices.size() == 60);
            REQUIRE(batch.id == b + 1);
            seen.insert(batch.indices.begin(), batch.indices.end());
        }
        CHECK(seen.size() == 1200);
        // next epoch starts over with a fresh permutation
        const SampleBatch again = it.next();
        CHECK(again.indices.size() == 60);
        CHECK(again.id == 21);
    }

    SUBCASE("full-size batch is the whole shuffled train split") {
        BatchIterator it(ds, 1200, 99);
        const SampleBatch batch = it.next();
        std::set<std::int32_t> seen(batch.indices.begin(), batch.indices.end());
        CHECK(seen.size() == 1200);
    }

    SUBCASE("equal seeds give identical batch sequences") {
        BatchIterator a(ds, 60, 7);
        BatchIterator b(ds, 60, 7);
        for (int i = 0; i < 50; ++i) {
            REQUIRE(a.next().indices == b.next().indices);
        }
    }

    SUBCASE("oversized batch is a configuration error") {
        CHECK_THROWS_AS(BatchIterator(ds, 1201, 1), ConfigError);
        CHECK_THROWS_AS(BatchIterator(ds, 0, 1), ConfigError);
    }

    SUBCASE("short remainder block completes the partition") {
        BatchIterator it(ds, 500, 3);
        std::set<std::int32_t> seen;
        std::size_t sizes = 0;
        for (int b = 0; b < 3; ++b) {
            const SampleBatch batch = it.next();
            sizes += batch.indices.size();
            seen.insert(batch.indices.begin(), batch.indices.end());
        }
        CHECK(sizes == 1200);
        CHECK(seen.size() == 1200);
    }
}

TEST_CASE("patch csv loads flattened patches without standardization") {
    // one flattened 2x2 patch per row plus the clean-center target
    const std::string path = write_temp_csv("gp_test_patches.csv",
                                            "p0,p1,p2,p3,target\n"
                                            "0.1,0.2,0.3,0.4,0.25\n"
                                            "0.5,0.5,0.5,0.5,0.5\n"
                                            "0.9,0.8,0.7,0.6,0.75\n");
    CsvOptions opt;
    opt.label = "target";
    opt.train_count = 2;
    opt.standardize = false;
    opt.shuffle_split = false;
    opt.task = TaskKind::Denoising;
    const Dataset ds = load_csv(path, opt);
    CHECK(ds.input_size == 4);
    CHECK(ds.samples[0].x == std::vector<double>{0.1, 0.2, 0.3, 0.4});
    CHECK(ds.samples[0].y == 0.25);
    CHECK(ds.train_idx == std::vector<std::int32_t>{0, 1});
    CHECK(ds.test_idx == std::vector<std::int32_t>{2});
}

TEST_CASE("bundled banknote-format file loads with the documented shape") {
    CsvOptions opt;
    opt.label = "class";
    opt.train_count = 1200;
    opt.task = TaskKind::Classification;
    const Dataset ds = load_csv(std::string(GP_SOURCE_DIR) + "/data/banknote_synth.csv", opt);
    CHECK(ds.input_size == 4);
    CHECK(ds.samples.size() == 1372);
    CHECK(ds.train_idx.size() == 1200);
    CHECK(ds.test_idx.size() == 172);
    int ones = 0;
    for (const Sample& s : ds.samples) ones += s.y == 1.0;
    CHECK(ones == 610); // class balance of the original format
}

TEST_CASE("full train batch has id zero") {
    const Dataset ds = gen_keijzer12(10, 2, 1, -1.0, 1.0);
    const SampleBatch batch = full_train_batch(ds);
    CHECK(batch.id == 0);
    CHECK(batch.indices == ds.train_idx);
}
