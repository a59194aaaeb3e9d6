#include "cohemark/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cohemark/error.hpp"
#include "cohemark/segmenter.hpp"

namespace cohemark {

std::string_view to_string(Errc code) {
    switch (code) {
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::RemoteUnavailable: return "RemoteUnavailable";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::InsufficientData: return "InsufficientData";
        case Errc::NumericalFailure: return "NumericalFailure";
        case Errc::EmbedderMismatch: return "EmbedderMismatch";
        case Errc::IoFailure: return "IoFailure";
        case Errc::SchemaVersionMismatch: return "SchemaVersionMismatch";
        case Errc::RankOutOfRange: return "RankOutOfRange";
        case Errc::LmUnavailable: return "LmUnavailable";
        case Errc::EmptyInput: return "EmptyInput";
        case Errc::EmptyResponse: return "EmptyResponse";
    }
    return "Unknown";
}

Sentence::Sentence(std::string text, std::size_t index) : index_(index) {
    const auto trimmed = trim(text);
    if (trimmed.empty()) {
        throw Error(Errc::InvalidArgument, "sentence text is empty after trimming");
    }
    text_ = std::string(trimmed);
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw Error(Errc::DimensionMismatch, "dot product of vectors with different dimensions");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    // Both operands are unit norm.
    return dot(a.values(), b.values());
}

EmbeddingVector EmbeddingVector::normalized(std::vector<double> values) {
    if (values.empty()) {
        throw Error(Errc::InvalidArgument, "embedding must have positive dimension");
    }
    const double norm = std::sqrt(dot(values, values));
    if (!std::isfinite(norm) || norm == 0.0) {
        throw Error(Errc::NumericalFailure, "cannot normalize a zero or non-finite embedding");
    }
    for (auto& v : values) v /= norm;
    return EmbeddingVector(std::move(values));
}

EmbeddingVector EmbeddingVector::from_unit(std::vector<double> values) {
    if (values.empty()) {
        throw Error(Errc::InvalidArgument, "embedding must have positive dimension");
    }
    const double norm = std::sqrt(dot(values, values));
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > kNormTolerance) {
        throw Error(Errc::NumericalFailure, "embedding is not unit norm");
    }
    return EmbeddingVector(std::move(values));
}

MembershipVector::MembershipVector(std::vector<double> degrees) : degrees_(std::move(degrees)) {
    if (degrees_.empty()) {
        throw Error(Errc::InvalidArgument, "membership vector must have at least one cluster");
    }
    double sum = 0.0;
    for (double d : degrees_) {
        if (!(d >= 0.0 && d <= 1.0)) {
            throw Error(Errc::NumericalFailure, "membership degree outside [0,1]");
        }
        sum += d;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
        throw Error(Errc::NumericalFailure, "membership degrees do not sum to 1");
    }
}

MembershipIndex::MembershipIndex(std::vector<ClusterId> ranking) : ranking_(std::move(ranking)) {
    std::vector<bool> seen(ranking_.size(), false);
    for (ClusterId id : ranking_) {
        if (id >= ranking_.size() || seen[id]) {
            throw Error(Errc::InvalidArgument, "membership index is not a permutation");
        }
        seen[id] = true;
    }
    if (ranking_.empty()) {
        throw Error(Errc::InvalidArgument, "membership index must have at least one cluster");
    }
}

MembershipIndex membership_index(const MembershipVector& mv) {
    std::vector<ClusterId> order(mv.size());
    std::iota(order.begin(), order.end(), ClusterId{0});
    const auto degrees = mv.degrees();
    // stable_sort keeps ascending ids among equal degrees
    std::stable_sort(order.begin(), order.end(),
                     [&](ClusterId a, ClusterId b) { return degrees[a] > degrees[b]; });
    return MembershipIndex(std::move(order));
}

ClusterId primary_cluster(const MembershipIndex& mi) { return mi.at_rank(0); }

}  // namespace cohemark
