#include "cohemark/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cohemark/error.hpp"
#include "cohemark/segmenter.hpp"

namespace cohemark {

std::string_view to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::Watermarked: return "watermarked";
        case Verdict::Clean: return "clean";
        case Verdict::Undecidable: return "undecidable";
    }
    return "undecidable";
}

DetectionResult replay_chain(std::span<const MembershipIndex> chain, const NsscConfig& nssc, double threshold,
                             const DetectOptions& options) {
    nssc.validate();
    DetectionResult result;
    result.threshold = threshold;
    SamplerState state;
    for (std::size_t i = 1; i < chain.size(); ++i) {
        const auto& previous = chain[i - 1];
        const auto primary = primary_cluster(chain[i]);
        auto green = green_spaces(previous, state.mode, nssc);
        const bool hit = is_green(green, primary);
        result.trace.push_back(TraceEntry{primary, std::move(green), state.mode, hit});
        result.green_count += hit ? 1 : 0;
        state = advance_state(state, primary_cluster(previous), primary, nssc);
    }
    result.scored_count = result.trace.size();
    if (result.scored_count > 0) {
        result.ratio = static_cast<double>(result.green_count) / static_cast<double>(result.scored_count);
    }
    if (result.scored_count < options.min_scored) {
        result.verdict = Verdict::Undecidable;
    } else {
        result.verdict = result.ratio >= threshold ? Verdict::Watermarked : Verdict::Clean;
    }
    if (options.null_hit_rate && result.scored_count > 0) {
        const double p = *options.null_hit_rate;
        const double n = static_cast<double>(result.scored_count);
        const double sd = std::sqrt(n * p * (1.0 - p));
        if (sd > 0.0) result.z_score = (static_cast<double>(result.green_count) - n * p) / sd;
    }
    return result;
}

DetectionResult detect_embeddings(const std::optional<EmbeddingVector>& prompt,
                                  std::span<const EmbeddingVector> sentences, const ClusterModel& model,
                                  const NsscConfig& nssc, double threshold, const DetectOptions& options) {
    std::vector<MembershipIndex> chain;
    chain.reserve(sentences.size() + 1);
    if (prompt) chain.push_back(membership_index(predict_membership(model, *prompt)));
    for (const auto& e : sentences) chain.push_back(membership_index(predict_membership(model, e)));
    return replay_chain(chain, nssc, threshold, options);
}

DetectionResult detect(const std::string& text, const ClusterModel& model, const Embedder& embedder,
                       const NsscConfig& nssc, double threshold, const DetectOptions& options) {
    model.require_embedder(embedder.spec());
    const auto sentences = segment_sentences(text);
    const auto embeddings = embedder.embed(sentences);
    std::optional<EmbeddingVector> prompt;
    if (options.prompt && !trim(*options.prompt).empty()) {
        prompt = embedder.embed_text(prompt_anchor_text(*options.prompt, options.prompt_anchor));
    }
    return detect_embeddings(prompt, embeddings, model, nssc, threshold, options);
}

// --- calibration and evaluation ---

double fraction_at_or_above(std::span<const double> scores, double threshold) {
    if (scores.empty()) return 0.0;
    const auto n = std::count_if(scores.begin(), scores.end(), [&](double s) { return s >= threshold; });
    return static_cast<double>(n) / static_cast<double>(scores.size());
}

ScoreSummary summarize_scores(std::span<const double> scores) {
    if (scores.empty()) throw Error(Errc::EmptyInput, "no scores to summarize");
    std::vector<double> sorted(scores.begin(), scores.end());
    std::sort(sorted.begin(), sorted.end());
    // Nearest-rank quantile.
    const auto q = [&](double p) {
        const auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(sorted.size())));
        return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
    };
    ScoreSummary s;
    s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
    s.p50 = q(0.50);
    s.p90 = q(0.90);
    s.p95 = q(0.95);
    s.p99 = q(0.99);
    s.max = sorted.back();
    return s;
}

CalibrationReport calibrate_threshold(std::span<const double> null_scores, double target_fpr) {
    if (null_scores.empty()) throw Error(Errc::EmptyInput, "calibration needs at least one null score");
    if (!(target_fpr > 0.0 && target_fpr < 1.0)) {
        throw Error(Errc::InvalidArgument, "target FPR must lie strictly between 0 and 1");
    }
    std::vector<double> sorted(null_scores.begin(), null_scores.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const auto n = sorted.size();
    // Guard against fpr * n landing a hair below an integer.
    auto allowed = static_cast<std::size_t>(std::floor(target_fpr * static_cast<double>(n) + 1e-9));
    allowed = std::min(allowed, n - 1);

    CalibrationReport report;
    report.target_fpr = target_fpr;
    report.threshold = std::nextafter(sorted[allowed], std::numeric_limits<double>::infinity());
    report.null_sample_size = n;
    report.summary = summarize_scores(null_scores);
    report.small_sample = n < CalibrationReport::kRecommendedSampleSize;
    return report;
}

std::vector<RocPoint> roc_curve(std::span<const double> positive_scores, std::span<const double> negative_scores) {
    std::vector<double> thresholds(positive_scores.begin(), positive_scores.end());
    thresholds.insert(thresholds.end(), negative_scores.begin(), negative_scores.end());
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    std::vector<RocPoint> roc;
    roc.reserve(thresholds.size() + 1);
    if (!thresholds.empty()) {
        const double above = std::nextafter(thresholds.front(), std::numeric_limits<double>::infinity());
        roc.push_back({fraction_at_or_above(negative_scores, above), fraction_at_or_above(positive_scores, above),
                       above});
    }
    for (double t : thresholds) {
        roc.push_back({fraction_at_or_above(negative_scores, t), fraction_at_or_above(positive_scores, t), t});
    }
    return roc;
}

Evaluation evaluate(std::span<const double> watermarked_scores, std::span<const double> null_scores,
                    double target_fpr) {
    if (watermarked_scores.empty() || null_scores.empty()) {
        throw Error(Errc::EmptyInput, "evaluation needs non-empty watermarked and null score lists");
    }
    const auto calibration = calibrate_threshold(null_scores, target_fpr);
    Evaluation ev;
    ev.target_fpr = target_fpr;
    ev.threshold = calibration.threshold;
    ev.tpr_at_fpr = fraction_at_or_above(watermarked_scores, ev.threshold);
    ev.empirical_fpr = fraction_at_or_above(null_scores, ev.threshold);
    ev.roc = roc_curve(watermarked_scores, null_scores);
    return ev;
}

}  // namespace cohemark
