#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cohemark/embedder.hpp"
#include "cohemark/types.hpp"

namespace cohemark {

using Point = std::vector<double>;

struct FcmConfig {
    std::size_t cluster_count = 8;
    // m = 2 collapses every center onto the data mean for K = 8 on
    // sentence-embedding dimensions; 1.1 keeps the clusters apart.
    double fuzziness = 1.1;
    double epsilon = 1e-5;
    std::size_t max_iterations = 300;
    std::uint64_t seed = 0;

    /// Throws InvalidArgument when any field violates its range.
    void validate() const;
};

/// Output of the raw alternating optimization, before any model wrapping.
struct FcmSolution {
    std::vector<Point> centers;                  // K x d, lexicographically sorted
    std::vector<std::vector<double>> memberships;  // N x K, columns follow `centers`
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> objective_history;       // one entry per iteration
};

/// Seeded initial membership matrix (N x K, rows sum to 1).
std::vector<std::vector<double>> fcm_initial_memberships(std::size_t n, std::size_t k, std::uint64_t seed);

/// Membership of `x` to each center: the fuzzy c-means membership update with
/// frozen centers. A zero distance yields the indicator of the first such center.
std::vector<double> fcm_memberships(std::span<const Point> centers, std::span<const double> x, double fuzziness);

/// Sum over points and clusters of u^m * |x - c|^2.
double fcm_objective(std::span<const Point> points, std::span<const Point> centers,
                     const std::vector<std::vector<double>>& memberships, double fuzziness);

/// Runs fuzzy c-means on arbitrary points. Alternates center and membership
/// updates from fcm_initial_memberships until the L1 change of the membership
/// matrix is at most epsilon or max_iterations is reached.
FcmSolution fcm_solve(std::span<const Point> points, const FcmConfig& config);

struct TrainingMeta {
    std::size_t iterations = 0;
    double final_objective = 0.0;
    std::uint64_t seed = 0;
    bool converged = false;
    std::vector<double> objective_history;

    friend bool operator==(const TrainingMeta&, const TrainingMeta&) = default;
};

class ClusterModel {
  public:
    ClusterModel(std::vector<Point> centers, double fuzziness, double epsilon, std::string embedder_identity,
                 TrainingMeta meta = {});

    [[nodiscard]] std::size_t cluster_count() const noexcept { return centers_.size(); }
    [[nodiscard]] std::size_t dimension() const noexcept { return centers_.front().size(); }
    [[nodiscard]] std::span<const Point> centers() const noexcept { return centers_; }
    [[nodiscard]] double fuzziness() const noexcept { return fuzziness_; }
    [[nodiscard]] double epsilon() const noexcept { return epsilon_; }
    [[nodiscard]] const std::string& embedder_identity() const noexcept { return embedder_identity_; }
    [[nodiscard]] const TrainingMeta& training_meta() const noexcept { return meta_; }

    /// Throws EmbedderMismatch unless `spec` is the embedder the model was trained with.
    void require_embedder(const EmbedderSpec& spec) const;

    friend bool operator==(const ClusterModel&, const ClusterModel&) = default;

  private:
    std::vector<Point> centers_;
    double fuzziness_;
    double epsilon_;
    std::string embedder_identity_;
    TrainingMeta meta_;
};

/// Trains on embeddings produced by the embedder named by `embedder_identity`.
/// Throws InsufficientData when there are fewer points than clusters.
ClusterModel train(std::span<const EmbeddingVector> points, const FcmConfig& config,
                   const std::string& embedder_identity);

MembershipVector predict_membership(const ClusterModel& model, const EmbeddingVector& x);

/// Embeds `text` with `embedder` (identity-checked) and ranks its memberships.
MembershipIndex membership_index_of(const ClusterModel& model, const Embedder& embedder, std::string_view text);

inline constexpr int kModelFormatVersion = 1;

void save_model(const ClusterModel& model, const std::filesystem::path& path);
std::string model_to_json(const ClusterModel& model);
ClusterModel load_model(const std::filesystem::path& path);
ClusterModel model_from_json(std::string_view text);

}  // namespace cohemark
