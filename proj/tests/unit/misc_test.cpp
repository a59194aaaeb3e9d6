#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "cli/parallel.hpp"
#include "cohemark/json_io.hpp"
#include "cohemark/rng.hpp"
#include "cohemark/segmenter.hpp"
#include "cohemark/synthetic.hpp"
#include "support/pipeline.hpp"

namespace cohemark {
namespace {

TEST(Rng, DerivedSeedsDiffer) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t t = 0; t < 50; ++t)
        for (std::uint64_t k = 0; k < 50; ++k) seen.insert(derive_seed(7, {t, k}));
    EXPECT_EQ(seen.size(), 2500u);
    EXPECT_EQ(derive_seed(7, {1, 2}), derive_seed(7, {1, 2}));
    EXPECT_NE(derive_seed(7, {1, 2}), derive_seed(7, {2, 1}));
    EXPECT_NE(derive_seed(7, {1}), derive_seed(8, {1}));
}

TEST(Rng, UniformAndNormalMoments) {
    Rng rng(3);
    double s = 0;
    double s2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        s += z;
        s2 += z * z;
    }
    EXPECT_NEAR(s / n, 0.0, 0.01);
    EXPECT_NEAR(s2 / n, 1.0, 0.02);
    double u = 0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.uniform();
        ASSERT_GE(x, 0.0);
        ASSERT_LT(x, 1.0);
        u += x;
    }
    EXPECT_NEAR(u / n, 0.5, 0.005);
    for (int i = 0; i < 1000; ++i) EXPECT_LT(rng.below(7), 7u);
}

TEST(Synthetic, CorpusIsBalancedAndSeeded) {
    const auto a = synthetic_sentences(800, 1);
    EXPECT_EQ(a, synthetic_sentences(800, 1));
    EXPECT_NE(a, synthetic_sentences(800, 2));
    for (const auto& s : a) EXPECT_EQ(segment_sentences(s).size(), 1u) << s;
    const auto prompts = synthetic_prompts(20, 1);
    ASSERT_EQ(prompts.size(), 20u);
    for (const auto& p : prompts) EXPECT_EQ(segment_sentences(p).size(), 2u);
}

TEST(Synthetic, NullTextsDrawFromPool) {
    const auto pool = synthetic_sentences(100, 4);
    const std::set<std::string> members(pool.begin(), pool.end());
    const auto texts = null_texts(pool, 30, 15, 4);
    ASSERT_EQ(texts.size(), 30u);
    for (const auto& t : texts) {
        const auto s = segment_sentences(t);
        EXPECT_EQ(s.size(), 15u);
        for (const auto& x : s) EXPECT_TRUE(members.count(x.text())) << x.text();
    }
    EXPECT_EQ(texts, null_texts(pool, 30, 15, 4));
}

TEST(JsonIo, GenerationRecordRoundTrip) {
    const auto p = testing::DeskPipeline::build(400, 9);
    auto rec = p.generate_one(synthetic_prompts(1, 9).front(), 9);
    const nlohmann::json j = rec;
    EXPECT_EQ(j["text"], rec.text());
    EXPECT_EQ(j["outcome"], "completed");
    const auto back = j.get<GenerationRecord>();
    EXPECT_EQ(back, rec);
    rec.outcome = GenerationOutcome::Failed;
    rec.failure_reason = "x";
    EXPECT_EQ(nlohmann::json(rec).get<GenerationRecord>(), rec);
}

TEST(JsonIo, CalibrationRoundTrip) {
    std::vector<double> s;
    for (int i = 0; i < 150; ++i) s.push_back((i % 13) / 13.0);
    auto rep = calibrate_threshold(s, 0.05);
    rep.null_hit_rate = 0.26;
    const auto back = nlohmann::json(rep).get<CalibrationReport>();
    EXPECT_EQ(back.threshold, rep.threshold);
    EXPECT_EQ(back.target_fpr, rep.target_fpr);
    EXPECT_EQ(back.null_sample_size, rep.null_sample_size);
    EXPECT_EQ(back.null_hit_rate, rep.null_hit_rate);
}

TEST(JsonIo, ShortestRoundTripDoubles) {
    EXPECT_EQ(format_double(0.25), "0.25");
    EXPECT_EQ(format_double(1.0), "1");
    const double t = std::nextafter(0.5, 1.0);
    EXPECT_EQ(std::stod(format_double(t)), t);
}

TEST(ParallelMap, KeepsOrderAndRethrowsLowestIndex) {
    const auto out = cli::parallel_map(100, 4, [](std::size_t i) { return i * i; });
    for (std::size_t i = 0; i < 100; ++i) EXPECT_EQ(out[i], i * i);
    try {
        (void)cli::parallel_map(50, 3, [](std::size_t i) -> int {
            if (i == 7 || i == 30) throw std::runtime_error(std::to_string(i));
            return 0;
        });
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_STREQ(e.what(), "7");
    }
    EXPECT_TRUE(cli::parallel_map(0, 4, [](std::size_t) { return 1; }).empty());
}

}  // namespace
}  // namespace cohemark
