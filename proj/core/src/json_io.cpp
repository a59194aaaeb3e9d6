#include "cohemark/json_io.hpp"

#include <charconv>
#include <stdexcept>

#include "cohemark/error.hpp"

namespace cohemark {

using nlohmann::json;

namespace {

NsscMode mode_from_string(const std::string& s) {
    if (s == "v1") return NsscMode::V1;
    if (s == "v2") return NsscMode::V2;
    throw Error(Errc::InvalidArgument, "unknown NSSC mode '" + s + "'");
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

void to_json(json& j, const AcceptedSentence& s) {
    j = json{{"text", s.text},
             {"trials", s.trials},
             {"green", s.green},
             {"mode", std::string(to_string(s.mode))},
             {"primary", s.primary}};
}

void from_json(const json& j, AcceptedSentence& s) {
    s.text = j.at("text").get<std::string>();
    s.trials = j.at("trials").get<std::size_t>();
    s.green = j.at("green").get<std::vector<ClusterId>>();
    s.mode = mode_from_string(j.at("mode").get<std::string>());
    s.primary = j.at("primary").get<ClusterId>();
}

void to_json(json& j, const GenerationRecord& r) {
    j = json{{"prompt", r.prompt},
             {"text", r.text()},
             {"outcome", std::string(to_string(r.outcome))},
             {"failure_reason", r.failure_reason},
             {"prompt_primary", r.prompt_primary},
             {"total_trials", r.total_trials},
             {"sentences", r.sentences}};
}

void from_json(const json& j, GenerationRecord& r) {
    r.prompt = j.at("prompt").get<std::string>();
    const auto outcome = j.at("outcome").get<std::string>();
    if (outcome == "completed") {
        r.outcome = GenerationOutcome::Completed;
    } else if (outcome == "failed") {
        r.outcome = GenerationOutcome::Failed;
    } else {
        throw Error(Errc::InvalidArgument, "unknown generation outcome '" + outcome + "'");
    }
    r.failure_reason = j.value("failure_reason", std::string{});
    r.prompt_primary = j.value("prompt_primary", ClusterId{0});
    r.total_trials = j.value("total_trials", std::size_t{0});
    r.sentences = j.at("sentences").get<std::vector<AcceptedSentence>>();
}

void to_json(json& j, const TraceEntry& t) {
    j = json{{"primary", t.primary}, {"green", t.green}, {"mode", std::string(to_string(t.mode))}, {"hit", t.hit}};
}

void to_json(json& j, const DetectionResult& r) {
    j = json{{"ratio", r.ratio},
             {"s_v", r.green_count},
             {"s_t", r.scored_count},
             {"threshold", r.threshold},
             {"verdict", std::string(to_string(r.verdict))},
             {"trace", r.trace}};
    if (r.z_score) j["z_score"] = *r.z_score;
}

void to_json(json& j, const CalibrationReport& r) {
    j = json{{"target_fpr", r.target_fpr},
             {"threshold", r.threshold},
             {"null_sample_size", r.null_sample_size},
             {"small_sample", r.small_sample},
             {"summary",
              {{"mean", r.summary.mean},
               {"p50", r.summary.p50},
               {"p90", r.summary.p90},
               {"p95", r.summary.p95},
               {"p99", r.summary.p99},
               {"max", r.summary.max}}}};
    if (r.null_hit_rate) j["null_hit_rate"] = *r.null_hit_rate;
}

void from_json(const json& j, CalibrationReport& r) {
    r.target_fpr = j.at("target_fpr").get<double>();
    r.threshold = j.at("threshold").get<double>();
    r.null_sample_size = j.at("null_sample_size").get<std::size_t>();
    r.small_sample = j.value("small_sample", false);
    const auto& s = j.at("summary");
    r.summary = ScoreSummary{s.at("mean").get<double>(), s.at("p50").get<double>(), s.at("p90").get<double>(),
                             s.at("p95").get<double>(), s.at("p99").get<double>(), s.at("max").get<double>()};
    if (j.contains("null_hit_rate")) r.null_hit_rate = j.at("null_hit_rate").get<double>();
}

std::string roc_to_csv(std::span<const RocPoint> roc) {
    std::string out = "fpr,tpr,threshold\n";
    for (const auto& p : roc) {
        out += format_double(p.fpr) + ',' + format_double(p.tpr) + ',' + format_double(p.threshold) + '\n';
    }
    return out;
}

}  // namespace cohemark
