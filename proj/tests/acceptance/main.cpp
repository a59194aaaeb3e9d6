// One PASS/FAIL line per acceptance criterion; exit status is the number of failures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli/cli.hpp"
#include "cli/io.hpp"
#include "cohemark/attack.hpp"
#include "cohemark/detector.hpp"
#include "cohemark/fuzzy_cmeans.hpp"
#include "cohemark/synthetic.hpp"
#include "support/fcm_oracle.hpp"
#include "support/null_oracle.hpp"
#include "support/pipeline.hpp"
#include "support/stub_sidecar.hpp"

namespace {

using namespace cohemark;
using Clock = std::chrono::steady_clock;
namespace fs = std::filesystem;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x, int prec = 4) {
    std::ostringstream s;
    s.precision(prec);
    s << x;
    return s.str();
}

// ---------------------------------------------------------------------------

Outcome fcm_oracle_equivalence() {
    const auto t0 = Clock::now();
    const std::size_t ks[] = {2, 3, 8};
    double worst = 0.0;
    bool monotone = true;
    for (std::uint64_t ds = 0; ds < 20; ++ds) {
        std::mt19937_64 gen(1000 + ds);
        const std::size_t dim = 2 + ds % 2;
        const std::size_t k = ks[ds % 3];
        const std::size_t n = 30 + (gen() % 71);
        // A few loose blobs plus uniform background.
        std::normal_distribution<double> noise(0.0, 0.3);
        std::uniform_real_distribution<double> uni(-2.0, 2.0);
        std::vector<Point> centers(k, Point(dim));
        for (auto& c : centers)
            for (auto& x : c) x = uni(gen);
        std::vector<Point> pts;
        for (std::size_t i = 0; i < n; ++i) {
            Point p(dim);
            if (i % 4 == 3) {
                for (auto& x : p) x = uni(gen);
            } else {
                const auto& c = centers[gen() % k];
                for (std::size_t t = 0; t < dim; ++t) p[t] = c[t] + noise(gen);
            }
            pts.push_back(p);
        }

        FcmConfig cfg;
        cfg.cluster_count = k;
        cfg.fuzziness = 2.0;
        cfg.epsilon = 1e-10;
        cfg.max_iterations = 1000;
        cfg.seed = ds;
        const auto sol = fcm_solve(pts, cfg);
        const auto oracle =
            testing::oracle_fcm(pts, fcm_initial_memberships(n, k, cfg.seed), cfg.fuzziness, cfg.epsilon, 1000);

        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t t = 0; t < dim; ++t)
                worst = std::max(worst, std::abs(sol.centers[j][t] - oracle.centers[j][t]));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < k; ++j)
                worst = std::max(worst, std::abs(sol.memberships[i][j] - oracle.memberships[i][j]));
        for (std::size_t i = 1; i < sol.objective_history.size(); ++i)
            monotone = monotone && sol.objective_history[i] <= sol.objective_history[i - 1] + 1e-9;
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-6 && monotone && secs < 10.0,
            "max |diff| " + fmt(worst, 3) + ", objective non-increasing " + (monotone ? "yes" : "no") + ", " +
                fmt(secs, 3) + " s"};
}

Outcome membership_spot_values() {
    const auto model_of = [](std::vector<Point> c, double m) {
        return ClusterModel(std::move(c), m, 1e-5, "hash:d=1:seed=0", TrainingMeta{});
    };
    // Zero distance: x equals the fourth center.
    const auto a = predict_membership(
        model_of({{0.0, 1.0}, {0.6, 0.8}, {-0.6, 0.8}, {0.8, -0.6}, {-1.0, 0.0}}, 2.0),
        EmbeddingVector::from_unit({0.8, -0.6}));
    bool indicator = true;
    for (std::size_t j = 0; j < 5; ++j) indicator = indicator && a[j] == (j == 3 ? 1.0 : 0.0);

    // Every center at distance 1 from x.
    const auto b = predict_membership(model_of({{0.0, 0.0}, {1.0, -1.0}, {1.0, 1.0}, {2.0, 0.0}}, 2.0),
                                      EmbeddingVector::from_unit({1.0, 0.0}));
    double uniform_err = 0.0;
    for (std::size_t j = 0; j < 4; ++j) uniform_err = std::max(uniform_err, std::abs(b[j] - 0.25));

    // 1-D, centers 0 and 3, x = 1.
    const auto c = predict_membership(model_of({{0.0}, {3.0}}, 2.0), EmbeddingVector::from_unit({1.0}));
    const double two_err = std::max(std::abs(c[0] - 0.8), std::abs(c[1] - 0.2));

    return {indicator && uniform_err <= 1e-9 && two_err <= 1e-9,
            std::string("indicator ") + (indicator ? "exact" : "WRONG") + ", uniform err " + fmt(uniform_err, 3) +
                ", [0.8,0.2] err " + fmt(two_err, 3)};
}

struct GenerationSet {
    testing::DeskPipeline pipeline;
    std::vector<std::string> prompts;
    std::vector<GenerationRecord> records;
    double seconds = 0.0;
};

GenerationSet& generations() {
    static GenerationSet set = [] {
        auto p = testing::DeskPipeline::build(1000, 0);
        const auto t0 = Clock::now();
        auto prompts = synthetic_prompts(200, 77);
        std::vector<GenerationRecord> recs;
        for (std::size_t i = 0; i < prompts.size(); ++i) recs.push_back(p.generate_one(prompts[i], 5000 + i));
        const double secs = seconds_since(t0);
        return GenerationSet{std::move(p), std::move(prompts), std::move(recs), secs};
    }();
    return set;
}

Outcome replay_exactness() {
    auto& g = generations();
    const auto t0 = Clock::now();
    std::size_t completed = 0;
    std::size_t exact = 0;
    for (std::size_t i = 0; i < g.records.size(); ++i) {
        if (g.records[i].outcome != GenerationOutcome::Completed) continue;
        ++completed;
        DetectOptions o;
        o.prompt = g.prompts[i];
        const auto r = detect(g.records[i].text(), g.pipeline.model, *g.pipeline.embedder, g.pipeline.nssc, 0.6, o);
        exact += (r.ratio == 1.0 && r.green_count == r.scored_count) ? 1 : 0;
    }
    const double secs = g.seconds + seconds_since(t0);
    return {completed > 0 && exact == completed && secs < 60.0,
            std::to_string(exact) + "/" + std::to_string(completed) + " completed records at r = 1.0, " +
                fmt(secs, 3) + " s"};
}

Outcome desk_scale_tpr() {
    const auto t0 = Clock::now();
    auto& g = generations();
    const auto& p = g.pipeline;
    std::vector<std::string> wm_texts;
    for (const auto& r : g.records)
        if (r.outcome == GenerationOutcome::Completed && r.sentences.size() >= 15) wm_texts.push_back(r.text());
    // Top up with fresh prompts if any generation failed.
    const auto extra = synthetic_prompts(400, 78);
    for (std::size_t i = 0; wm_texts.size() < 200 && i < extra.size(); ++i) {
        const auto r = p.generate_one(extra[i], 9000 + i);
        if (r.outcome == GenerationOutcome::Completed && r.sentences.size() >= 15) wm_texts.push_back(r.text());
    }
    wm_texts.resize(std::min<std::size_t>(wm_texts.size(), 200));

    const auto score = [&](const std::vector<std::string>& texts) {
        std::vector<double> s;
        for (const auto& t : texts) {
            const auto r = detect(t, p.model, *p.embedder, p.nssc, 0.6);
            if (r.verdict != Verdict::Undecidable) s.push_back(r.ratio);
        }
        return s;
    };
    const auto calib = score(null_texts(p.corpus, 500, 15, 501));
    const auto held = score(null_texts(p.corpus, 200, 15, 502));
    const auto wm = score(wm_texts);
    const auto report = calibrate_threshold(calib, 0.01);
    const double tpr = fraction_at_or_above(wm, report.threshold);
    const double fpr = fraction_at_or_above(held, report.threshold);
    const double secs = seconds_since(t0) + g.seconds;
    return {wm.size() == 200 && held.size() == 200 && tpr >= 0.99 && fpr <= 0.02 && secs < 300.0,
            "threshold " + fmt(report.threshold) + " from " + std::to_string(calib.size()) + " null texts, TPR " +
                fmt(tpr) + " on " + std::to_string(wm.size()) + ", held-out FPR " + fmt(fpr) + " on " +
                std::to_string(held.size()) + ", " + fmt(secs, 3) + " s"};
}

double oracle_null_mean() {
    static const double m = testing::mean(testing::simulate_null_ratios(testing::NullChainSpec{}, 200000, 2024));
    return m;
}

Outcome null_ratio_oracle() {
    std::mt19937_64 gen(7);
    std::vector<double> ratios;
    std::vector<ClusterId> r(8);
    for (int c = 0; c < 1000; ++c) {
        std::vector<MembershipIndex> chain;
        for (int i = 0; i < 16; ++i) {
            std::iota(r.begin(), r.end(), 0);
            std::shuffle(r.begin(), r.end(), gen);
            chain.emplace_back(r);
        }
        ratios.push_back(replay_chain(chain, NsscConfig{}, 0.5).ratio);
    }
    const double impl = testing::mean(ratios);
    const double oracle = oracle_null_mean();
    return {std::abs(impl - oracle) <= 0.02,
            "implementation " + fmt(impl) + " over 1000 chains, oracle " + fmt(oracle) + " over 200000"};
}

Outcome robustness_trend() {
    auto& g = generations();
    const auto& p = g.pipeline;
    const std::vector<double> grid{0.0, 0.05, 0.1, 0.2, 0.5, 1.0};
    std::vector<double> means(grid.size(), 0.0);
    double big_mean = 0.0;
    bool zero_exact = true;
    std::size_t n = 0;
    for (std::size_t i = 0; i < g.records.size() && n < 200; ++i) {
        const auto& rec = g.records[i];
        if (rec.outcome != GenerationOutcome::Completed) continue;
        ++n;
        DetectOptions o;
        o.prompt = g.prompts[i];
        const auto clean = detect(rec.text(), p.model, *p.embedder, p.nssc, 0.6, o);
        for (std::size_t s = 0; s < grid.size(); ++s) {
            const auto att = embedding_noise_attack(rec, grid[s], 31 + i, p.model, *p.embedder, p.nssc, 0.6, o);
            means[s] += att.detection.ratio;
            if (grid[s] == 0.0) zero_exact = zero_exact && att.detection == clean;
        }
        big_mean += embedding_noise_attack(rec, 10.0, 31 + i, p.model, *p.embedder, p.nssc, 0.6, o).detection.ratio;
    }
    bool trend = n > 0;
    std::string curve;
    for (std::size_t s = 0; s < grid.size(); ++s) {
        means[s] /= static_cast<double>(n);
        if (s > 0) trend = trend && means[s] <= means[s - 1] + 0.02;
        curve += (s ? " " : "") + fmt(grid[s], 2) + ":" + fmt(means[s], 3);
    }
    big_mean /= static_cast<double>(n);
    const double null_mean = oracle_null_mean();
    const bool washes_out = std::abs(big_mean - null_mean) <= 0.1;
    return {trend && zero_exact && washes_out && n == 200,
            std::to_string(n) + " texts; mean r " + curve + "; sigma 0 unchanged " + (zero_exact ? "yes" : "no") +
                "; sigma 10 " + fmt(big_mean, 3) + " vs null " + fmt(null_mean, 3)};
}

Outcome failure_accounting() {
    auto& g = generations();
    const auto& p = g.pipeline;
    std::vector<std::size_t> sizes(p.model.cluster_count(), 0);
    for (const auto& s : p.corpus) ++sizes[primary_cluster(membership_index_of(p.model, *p.embedder, s))];
    const auto smallest = *std::min_element(sizes.begin(), sizes.end());
    const double min_share = static_cast<double>(smallest) / static_cast<double>(p.corpus.size());
    std::size_t failed = 0;
    for (const auto& r : g.records) failed += r.outcome == GenerationOutcome::Failed ? 1 : 0;
    const double rate = static_cast<double>(failed) / static_cast<double>(g.records.size());
    return {min_share >= 0.05 && rate < 0.05 && g.records.size() == 200,
            "smallest cluster share " + fmt(min_share, 3) + ", " + std::to_string(failed) + "/" +
                std::to_string(g.records.size()) + " failed (rate " + fmt(rate, 3) + ")"};
}

Outcome cli_determinism() {
    const auto dir = fs::temp_directory_path() / "cohemark_acceptance_cli";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto at = [&](const std::string& name) { return (dir / name).string(); };
    std::ostringstream sink;
    testing::StubSidecar stub(nullptr, testing::fixed_generate_handler("A calm rewrite of the text. It is short."));

    const std::vector<std::vector<std::string>> commands{
        {"synth-corpus", "--sentences", "800", "--prompts", "10", "--seed", "5", "--out-corpus", at("corpus.txt"),
         "--out-prompts", at("prompts.txt")},
        {"train-clusters", "--corpus", at("corpus.txt"), "--seed", "5", "--out", at("model.json")},
        {"generate", "--prompt-file", at("prompts.txt"), "--model", at("model.json"), "--corpus", at("corpus.txt"),
         "--seed", "5", "--jobs", "3", "--out", at("gen.jsonl")},
        {"null-texts", "--corpus", at("corpus.txt"), "--count", "120", "--seed", "5", "--out", at("null.txt")},
        {"detect", "--input", at("gen.jsonl"), "--model", at("model.json"), "--record-prompts", "--out",
         at("det.jsonl")},
        {"calibrate", "--input", at("null.txt"), "--model", at("model.json"), "--out", at("cal.json")},
        {"evaluate", "--watermarked", at("det.jsonl"), "--null", at("null.txt"), "--model", at("model.json"), "--out",
         at("eval.json"), "--roc-out", at("roc.csv")},
        {"attack", "--input", at("gen.jsonl"), "--model", at("model.json"), "--record-prompts", "--sigma",
         "0,0.1,1,10", "--seed", "5", "--out", at("noise.csv")},
        {"attack", "--kind", "paraphrase_remote", "--input", at("gen.jsonl"), "--model", at("model.json"),
         "--record-prompts", "--lm-url", stub.url(), "--out", at("para.csv"), "--texts-out", at("para.jsonl")},
    };
    std::size_t compared = 0;
    std::vector<std::string> mismatched;
    for (const auto& cmd : commands) {
        if (cli::run(cmd, sink, sink) != 0) return {false, "command failed: " + cmd.front() + ": " + sink.str()};
    }
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (!name.ends_with(".manifest.json")) continue;
        const auto manifest = nlohmann::json::parse(cli::read_file(entry.path()));
        const auto rerun_dir = dir / ("rerun_" + name);
        if (cli::run({"rerun", "--manifest", entry.path().string(), "--out-dir", rerun_dir.string()}, sink, sink) != 0)
            return {false, "rerun failed for " + name};
        for (const auto& [flag, value] : manifest["outputs"].items()) {
            const auto original = fs::path(value.get<std::string>());
            ++compared;
            if (cli::read_file(original) != cli::read_file(rerun_dir / original.filename()))
                mismatched.push_back(original.filename().string());
        }
    }
    fs::remove_all(dir);
    std::string detail = std::to_string(commands.size()) + " commands, " + std::to_string(compared) +
                         " outputs re-run from manifests";
    for (const auto& m : mismatched) detail += "; differs: " + m;
    return {mismatched.empty() && compared >= commands.size(), detail};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"fcm-oracle-equivalence", fcm_oracle_equivalence},
        {"membership-spot-values", membership_spot_values},
        {"replay-exactness", replay_exactness},
        {"desk-scale-tpr-at-1pct", desk_scale_tpr},
        {"null-ratio-oracle", null_ratio_oracle},
        {"robustness-trend", robustness_trend},
        {"failure-accounting", failure_accounting},
        {"cli-determinism", cli_determinism},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    }
    return failures;
}
