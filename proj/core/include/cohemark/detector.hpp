#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cohemark/cohe_sampler.hpp"
#include "cohemark/embedder.hpp"
#include "cohemark/fuzzy_cmeans.hpp"
#include "cohemark/nssc.hpp"

namespace cohemark {

enum class Verdict { Watermarked, Clean, Undecidable };

std::string_view to_string(Verdict verdict);

struct TraceEntry {
    ClusterId primary = 0;
    std::vector<ClusterId> green;
    NsscMode mode = NsscMode::V1;
    bool hit = false;

    friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct DetectionResult {
    std::size_t green_count = 0;   // S_V
    std::size_t scored_count = 0;  // S_T
    double ratio = 0.0;            // S_V / S_T, 0 when nothing was scored
    double threshold = 0.0;
    Verdict verdict = Verdict::Undecidable;
    std::vector<TraceEntry> trace;
    /// Binomial z-score against DetectOptions::null_hit_rate; diagnostics only.
    std::optional<double> z_score;

    friend bool operator==(const DetectionResult&, const DetectionResult&) = default;
};

struct DetectOptions {
    /// When set, the first sentence is scored against this prompt.
    std::optional<std::string> prompt;
    PromptAnchor prompt_anchor = PromptAnchor::WholePrompt;
    std::size_t min_scored = 3;
    std::optional<double> null_hit_rate;
};

/// Replays the NSSC rules along a chain of membership indices. chain[0] only
/// provides the predecessor of chain[1]; every later element is scored.
DetectionResult replay_chain(std::span<const MembershipIndex> chain, const NsscConfig& nssc, double threshold,
                             const DetectOptions& options = {});

/// Detection from precomputed embeddings; `prompt` is the optional predecessor of sentence 0.
DetectionResult detect_embeddings(const std::optional<EmbeddingVector>& prompt,
                                  std::span<const EmbeddingVector> sentences, const ClusterModel& model,
                                  const NsscConfig& nssc, double threshold, const DetectOptions& options = {});

/// Segments and embeds `text`, then replays the rules.
DetectionResult detect(const std::string& text, const ClusterModel& model, const Embedder& embedder,
                       const NsscConfig& nssc, double threshold, const DetectOptions& options = {});

struct ScoreSummary {
    double mean = 0.0;
    double p50 = 0.0;
    double p90 = 0.0;
    double p95 = 0.0;
    double p99 = 0.0;
    double max = 0.0;
};

struct CalibrationReport {
    static constexpr std::size_t kRecommendedSampleSize = 100;

    double target_fpr = 0.01;
    double threshold = 0.0;
    std::size_t null_sample_size = 0;
    ScoreSummary summary;
    /// Set when fewer than kRecommendedSampleSize null scores were supplied.
    bool small_sample = false;
    /// Pooled per-sentence hit rate of the calibration corpus, when known.
    std::optional<double> null_hit_rate;
};

/// Smallest threshold t with |{s >= t}| / n <= target_fpr: with a = floor(n * fpr)
/// and scores sorted descending, t is the next double above the (a+1)-th score.
CalibrationReport calibrate_threshold(std::span<const double> null_scores, double target_fpr);

/// Fraction of scores at or above `threshold`.
double fraction_at_or_above(std::span<const double> scores, double threshold);

ScoreSummary summarize_scores(std::span<const double> scores);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    double threshold = 0.0;
};

struct Evaluation {
    double target_fpr = 0.0;
    double threshold = 0.0;
    double tpr_at_fpr = 0.0;
    double empirical_fpr = 0.0;
    std::vector<RocPoint> roc;
};

/// Threshold from the null scores at `target_fpr`; ROC over every distinct score.
Evaluation evaluate(std::span<const double> watermarked_scores, std::span<const double> null_scores,
                    double target_fpr);

/// ROC points (fpr ascending) for thresholds at each distinct score plus one above the maximum.
std::vector<RocPoint> roc_curve(std::span<const double> positive_scores, std::span<const double> negative_scores);

}  // namespace cohemark
