#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace cohemark {

using ClusterId = std::size_t;

/// A trimmed, non-empty sentence together with its position in the document.
class Sentence {
  public:
    /// Trims surrounding whitespace; throws InvalidArgument if nothing remains.
    Sentence(std::string text, std::size_t index);

    [[nodiscard]] const std::string& text() const noexcept { return text_; }
    [[nodiscard]] std::size_t index() const noexcept { return index_; }

    friend bool operator==(const Sentence&, const Sentence&) = default;

  private:
    std::string text_;
    std::size_t index_;
};

/// Unit-norm point in semantic space.
class EmbeddingVector {
  public:
    static constexpr double kNormTolerance = 1e-6;

    /// L2-normalizes `values`. Throws NumericalFailure on a zero or non-finite vector.
    static EmbeddingVector normalized(std::vector<double> values);

    /// Accepts values that are already unit norm within kNormTolerance.
    static EmbeddingVector from_unit(std::vector<double> values);

    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return values_.size(); }

    friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

  private:
    explicit EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {}

    std::vector<double> values_;
};

double dot(std::span<const double> a, std::span<const double> b);
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

/// Per-cluster membership degrees; each in [0,1], summing to 1.
class MembershipVector {
  public:
    static constexpr double kSumTolerance = 1e-6;

    explicit MembershipVector(std::vector<double> degrees);

    [[nodiscard]] std::span<const double> degrees() const noexcept { return degrees_; }
    [[nodiscard]] std::size_t size() const noexcept { return degrees_.size(); }
    [[nodiscard]] double operator[](ClusterId j) const { return degrees_.at(j); }

    friend bool operator==(const MembershipVector&, const MembershipVector&) = default;

  private:
    std::vector<double> degrees_;
};

/// Cluster ids ordered by descending membership degree, ties by ascending id.
class MembershipIndex {
  public:
    /// Validates that `ranking` is a permutation of 0..K-1.
    explicit MembershipIndex(std::vector<ClusterId> ranking);

    [[nodiscard]] std::span<const ClusterId> ranking() const noexcept { return ranking_; }
    [[nodiscard]] std::size_t size() const noexcept { return ranking_.size(); }
    [[nodiscard]] ClusterId at_rank(std::size_t rank) const { return ranking_.at(rank); }

    friend bool operator==(const MembershipIndex&, const MembershipIndex&) = default;

  private:
    std::vector<ClusterId> ranking_;
};

MembershipIndex membership_index(const MembershipVector& mv);

/// The top-ranked cluster of a membership index.
ClusterId primary_cluster(const MembershipIndex& mi);

}  // namespace cohemark
