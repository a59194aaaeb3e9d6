#pragma once

#include <nlohmann/json.hpp>

#include <span>
#include <string>

#include "cohemark/cohe_sampler.hpp"
#include "cohemark/detector.hpp"

namespace cohemark {

void to_json(nlohmann::json& j, const AcceptedSentence& s);
void from_json(const nlohmann::json& j, AcceptedSentence& s);

/// {"prompt", "prompt_primary", "text", "outcome", "failure_reason", "total_trials", "sentences": [...]}
void to_json(nlohmann::json& j, const GenerationRecord& r);
void from_json(const nlohmann::json& j, GenerationRecord& r);

void to_json(nlohmann::json& j, const TraceEntry& t);

/// {"ratio", "s_v", "s_t", "threshold", "verdict", "trace": [...]} plus "z_score" when present.
void to_json(nlohmann::json& j, const DetectionResult& r);

void to_json(nlohmann::json& j, const CalibrationReport& r);
void from_json(const nlohmann::json& j, CalibrationReport& r);

/// "fpr,tpr,threshold" header followed by one row per point, full precision.
std::string roc_to_csv(std::span<const RocPoint> roc);

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double value);

}  // namespace cohemark
