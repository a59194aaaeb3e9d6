#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cohemark/embedder.hpp"
#include "cohemark/error.hpp"
#include "cohemark/fuzzy_cmeans.hpp"
#include "cohemark/synthetic.hpp"
#include "support/fcm_oracle.hpp"

namespace cohemark {
namespace {

std::vector<Point> random_points(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Point> pts(n, Point(d));
    for (auto& p : pts)
        for (auto& x : p) x = u(gen);
    return pts;
}

std::vector<Point> two_blobs(std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::vector<Point> pts;
    for (int i = 0; i < 20; ++i) pts.push_back({-5.0 + noise(gen), noise(gen)});
    for (int i = 0; i < 20; ++i) pts.push_back({5.0 + noise(gen), noise(gen)});
    return pts;
}

ClusterModel model_with_centers(std::vector<Point> centers, double m = 2.0) {
    return ClusterModel(std::move(centers), m, 1e-5, "hash:d=2:seed=0", TrainingMeta{});
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("cohemark_fcm_" + name);
}

TEST(FcmConfig, Validation) {
    FcmConfig c;
    EXPECT_NO_THROW(c.validate());
    c.fuzziness = 1.0;
    EXPECT_THROW(c.validate(), Error);
    c = {};
    c.cluster_count = 0;
    EXPECT_THROW(c.validate(), Error);
    c = {};
    c.epsilon = 0.0;
    EXPECT_THROW(c.validate(), Error);
    c = {};
    c.max_iterations = 0;
    EXPECT_THROW(c.validate(), Error);
}

TEST(FcmSolve, SingleClusterIsTheMean) {
    const auto pts = random_points(30, 3, 4);
    FcmConfig c;
    c.cluster_count = 1;
    const auto sol = fcm_solve(pts, c);
    for (std::size_t t = 0; t < 3; ++t) {
        double mean = 0;
        for (const auto& p : pts) mean += p[t];
        EXPECT_NEAR(sol.centers[0][t], mean / 30.0, 1e-12);
    }
    for (const auto& row : sol.memberships) EXPECT_EQ(row[0], 1.0);
}

TEST(FcmSolve, TwoBlobsAgreeWithOracle) {
    const auto pts = two_blobs(8);
    FcmConfig c;
    c.cluster_count = 2;
    c.fuzziness = 2.0;
    c.epsilon = 1e-10;
    c.max_iterations = 1000;
    c.seed = 3;
    const auto sol = fcm_solve(pts, c);
    const auto oracle = testing::oracle_fcm(pts, fcm_initial_memberships(pts.size(), 2, c.seed), 2.0, 1e-10, 1000);

    // Sorted centers: blob at x=-5 first.
    EXPECT_LT(sol.centers[0][0], 0.0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const std::size_t own = i < 20 ? 0 : 1;
        EXPECT_GT(sol.memberships[i][own], 0.95);
        EXPECT_GT(oracle.memberships[i][own], 0.95);
        for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(sol.memberships[i][j], oracle.memberships[i][j], 1e-6);
    }
}

TEST(FcmSolve, NeedsAtLeastKPoints) {
    FcmConfig c;
    try {
        (void)fcm_solve(random_points(4, 2, 1), c);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::InsufficientData);
        EXPECT_NE(std::string(e.what()).find("need at least K points"), std::string::npos);
    }
}

TEST(FcmSolve, NonFiniteInput) {
    auto pts = random_points(10, 2, 1);
    pts[3][1] = std::nan("");
    FcmConfig c;
    c.cluster_count = 2;
    try {
        (void)fcm_solve(pts, c);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NumericalFailure);
    }
}

TEST(FcmInit, RowsAreNormalizedAndSeeded) {
    const auto a = fcm_initial_memberships(50, 8, 7);
    const auto b = fcm_initial_memberships(50, 8, 7);
    const auto c = fcm_initial_memberships(50, 8, 8);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
    for (const auto& row : a) EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-12);
}

TEST(PredictMembership, ZeroDistanceIsIndicator) {
    const auto model = model_with_centers({{-1.0, 0.0}, {0.0, -1.0}, {0.0, 1.0}, {1.0, 0.0}});
    const auto mv = predict_membership(model, EmbeddingVector::from_unit({1.0, 0.0}));
    EXPECT_EQ(mv.degrees()[3], 1.0);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(mv.degrees()[j], 0.0);
}

TEST(PredictMembership, EquidistantIsUniform) {
    // Every center at distance 1 from x = (1, 0).
    const auto model = model_with_centers({{0.0, 0.0}, {1.0, -1.0}, {1.0, 1.0}, {2.0, 0.0}});
    const auto mv = predict_membership(model, EmbeddingVector::from_unit({1.0, 0.0}));
    for (double v : mv.degrees()) EXPECT_NEAR(v, 0.25, 1e-12);
}

TEST(PredictMembership, OneDimensionalTwoCenters) {
    const std::vector<Point> centers{{0.0}, {3.0}};
    const std::vector<double> x{1.0};
    const auto u = fcm_memberships(centers, x, 2.0);
    EXPECT_NEAR(u[0], 0.8, 1e-9);
    EXPECT_NEAR(u[1], 0.2, 1e-9);
}

TEST(PredictMembership, Mismatches) {
    const auto model = model_with_centers({{1.0, 0.0}, {0.0, 1.0}});
    EXPECT_THROW((void)predict_membership(model, EmbeddingVector::from_unit({1.0, 0.0, 0.0})), Error);
    try {
        model.require_embedder(HashEmbedder(2, 1).spec());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::EmbedderMismatch);
    }
}

TEST(FcmProperty, ObjectiveNonIncreasing) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        FcmConfig c;
        c.cluster_count = 2 + seed % 6;
        c.fuzziness = 1.1 + 0.2 * static_cast<double>(seed % 5);
        c.seed = seed;
        const auto sol = fcm_solve(random_points(60, 2 + seed % 3, seed + 100), c);
        for (std::size_t i = 1; i < sol.objective_history.size(); ++i)
            EXPECT_LE(sol.objective_history[i], sol.objective_history[i - 1] + 1e-9) << "seed " << seed;
    }
}

TEST(FcmProperty, MembershipsSumToOne) {
    const HashEmbedder e;
    const auto corpus = synthetic_sentences(200, 4);
    FcmConfig c;
    const auto model = train(e.embed_texts(corpus), c, e.spec().identity);
    for (const auto& s : synthetic_sentences(100, 99)) {
        const auto mv = predict_membership(model, e.embed_text(s));
        double total = 0;
        for (double v : mv.degrees()) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
            total += v;
        }
        EXPECT_NEAR(total, 1.0, 1e-6);
    }
}

TEST(FcmProperty, PermutationEquivariance) {
    // Well-separated blobs so both orders reach the same optimum.
    std::vector<Point> pts;
    std::mt19937_64 gen(2);
    std::normal_distribution<double> noise(0.0, 0.1);
    const std::vector<Point> means{{0, 0, 4}, {4, 0, 0}, {0, 4, 0}};
    for (int i = 0; i < 45; ++i) {
        const auto& m = means[i % 3];
        pts.push_back({m[0] + noise(gen), m[1] + noise(gen), m[2] + noise(gen)});
    }
    auto shuffled = pts;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);

    FcmConfig c;
    c.cluster_count = 3;
    c.fuzziness = 2.0;
    c.epsilon = 1e-12;
    c.max_iterations = 2000;
    const auto a = fcm_solve(pts, c);
    const auto b = fcm_solve(shuffled, c);
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t t = 0; t < 3; ++t) EXPECT_NEAR(a.centers[j][t], b.centers[j][t], 1e-8);

    const auto probes = random_points(25, 3, 77);
    for (const auto& x : probes) {
        const auto ua = fcm_memberships(a.centers, x, 2.0);
        const auto ub = fcm_memberships(b.centers, x, 2.0);
        for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(ua[j], ub[j], 1e-8);
    }
}

TEST(ModelIo, RoundTripIsExact) {
    const HashEmbedder e;
    const auto corpus = synthetic_sentences(120, 6);
    FcmConfig c;
    c.seed = 6;
    const auto model = train(e.embed_texts(corpus), c, e.spec().identity);
    const auto path = temp_file("roundtrip.json");
    save_model(model, path);
    const auto back = load_model(path);
    ASSERT_EQ(back.cluster_count(), model.cluster_count());
    for (std::size_t j = 0; j < model.cluster_count(); ++j) EXPECT_EQ(back.centers()[j], model.centers()[j]);
    EXPECT_EQ(back.fuzziness(), model.fuzziness());
    EXPECT_EQ(back.epsilon(), model.epsilon());
    EXPECT_EQ(back.embedder_identity(), model.embedder_identity());
    EXPECT_EQ(back.training_meta().iterations, model.training_meta().iterations);
    EXPECT_EQ(back.training_meta().objective_history, model.training_meta().objective_history);
    for (const auto& s : synthetic_sentences(30, 60)) {
        const auto x = e.embed_text(s);
        EXPECT_EQ(predict_membership(back, x), predict_membership(model, x));
    }
    EXPECT_EQ(model_to_json(back), model_to_json(model));
    std::filesystem::remove(path);
}

TEST(ModelIo, SameSeedSameFile) {
    const HashEmbedder e;
    const auto pts = e.embed_texts(synthetic_sentences(150, 2));
    FcmConfig c;
    c.seed = 12;
    EXPECT_EQ(model_to_json(train(pts, c, e.spec().identity)), model_to_json(train(pts, c, e.spec().identity)));
}

TEST(ModelIo, UnknownVersion) {
    auto j = nlohmann::json::parse(model_to_json(model_with_centers({{1.0, 0.0}, {0.0, 1.0}})));
    j["format_version"] = 999;
    try {
        (void)model_from_json(j.dump());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::SchemaVersionMismatch);
    }
    j["format_version"] = "999";
    try {
        (void)model_from_json(j.dump());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::SchemaVersionMismatch);
    }
}

TEST(ModelIo, TruncatedFile) {
    const auto text = model_to_json(model_with_centers({{1.0, 0.0}, {0.0, 1.0}}));
    const auto path = temp_file("truncated.json");
    {
        std::ofstream out(path);
        out << text.substr(0, text.size() / 2);
    }
    try {
        (void)load_model(path);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::IoFailure);
    }
    std::filesystem::remove(path);
    try {
        (void)load_model(path);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::IoFailure);
    }
}

TEST(Train, DefaultsGiveEightCenters) {
    const HashEmbedder e;
    const auto model = train(e.embed_texts(synthetic_sentences(1000, 0)), FcmConfig{}, e.spec().identity);
    EXPECT_EQ(model.cluster_count(), 8u);
    EXPECT_EQ(model.dimension(), 64u);
}

}  // namespace
}  // namespace cohemark
