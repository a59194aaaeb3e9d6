#include "cohemark/fuzzy_cmeans.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "cohemark/error.hpp"
#include "cohemark/rng.hpp"

namespace cohemark {

using nlohmann::json;

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        acc += diff * diff;
    }
    return acc;
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

std::vector<Point> compute_centers(std::span<const Point> points, const std::vector<std::vector<double>>& u,
                                   std::size_t k, double m) {
    const std::size_t d = points.front().size();
    std::vector<Point> centers(k, Point(d, 0.0));
    std::vector<double> weight_sum(k, 0.0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const double w = std::pow(u[i][j], m);
            weight_sum[j] += w;
            for (std::size_t a = 0; a < d; ++a) centers[j][a] += w * points[i][a];
        }
    }
    for (std::size_t j = 0; j < k; ++j) {
        if (!(weight_sum[j] > 0.0)) {
            throw Error(Errc::NumericalFailure, "cluster " + std::to_string(j) + " lost all membership weight");
        }
        for (auto& c : centers[j]) c /= weight_sum[j];
        if (!all_finite(centers[j])) {
            throw Error(Errc::NumericalFailure, "non-finite cluster center");
        }
    }
    return centers;
}

}  // namespace

void FcmConfig::validate() const {
    if (cluster_count < 1) throw Error(Errc::InvalidArgument, "cluster count must be at least 1");
    if (!(fuzziness > 1.0) || !std::isfinite(fuzziness)) {
        throw Error(Errc::InvalidArgument, "fuzziness must be finite and greater than 1");
    }
    if (!(epsilon > 0.0)) throw Error(Errc::InvalidArgument, "epsilon must be positive");
    if (max_iterations < 1) throw Error(Errc::InvalidArgument, "max_iterations must be at least 1");
}

std::vector<std::vector<double>> fcm_initial_memberships(std::size_t n, std::size_t k, std::uint64_t seed) {
    Rng rng(derive_seed(seed, {0xFC3}));
    std::vector<std::vector<double>> u(n, std::vector<double>(k, 0.0));
    for (auto& row : u) {
        double sum = 0.0;
        for (auto& v : row) {
            v = rng.uniform();
            sum += v;
        }
        if (sum == 0.0) {
            std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(k));
            continue;
        }
        for (auto& v : row) v /= sum;
    }
    return u;
}

std::vector<double> fcm_memberships(std::span<const Point> centers, std::span<const double> x, double fuzziness) {
    const std::size_t k = centers.size();
    std::vector<double> d2(k);
    for (std::size_t j = 0; j < k; ++j) {
        if (centers[j].size() != x.size()) {
            throw Error(Errc::DimensionMismatch, "point dimension " + std::to_string(x.size()) +
                                                     " does not match center dimension " +
                                                     std::to_string(centers[j].size()));
        }
        d2[j] = squared_distance(x, centers[j]);
    }
    std::vector<double> u(k, 0.0);
    const auto zero = std::find(d2.begin(), d2.end(), 0.0);
    if (zero != d2.end()) {
        u[static_cast<std::size_t>(zero - d2.begin())] = 1.0;
        return u;
    }
    // (|x-c_j| / |x-c_k|)^(2/(m-1)) == (d2_j / d2_k)^(1/(m-1))
    const double exponent = 1.0 / (fuzziness - 1.0);
    for (std::size_t j = 0; j < k; ++j) {
        double denom = 0.0;
        for (std::size_t l = 0; l < k; ++l) denom += std::pow(d2[j] / d2[l], exponent);
        u[j] = 1.0 / denom;
    }
    if (!all_finite(u)) {
        throw Error(Errc::NumericalFailure, "non-finite membership degree");
    }
    return u;
}

double fcm_objective(std::span<const Point> points, std::span<const Point> centers,
                     const std::vector<std::vector<double>>& memberships, double fuzziness) {
    double j_total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = 0; j < centers.size(); ++j) {
            j_total += std::pow(memberships[i][j], fuzziness) * squared_distance(points[i], centers[j]);
        }
    }
    return j_total;
}

FcmSolution fcm_solve(std::span<const Point> points, const FcmConfig& config) {
    config.validate();
    const std::size_t n = points.size();
    const std::size_t k = config.cluster_count;
    if (n < k) {
        throw Error(Errc::InsufficientData, "need at least K points: have " + std::to_string(n) + ", K = " +
                                                std::to_string(k));
    }
    const std::size_t d = points.front().size();
    for (const auto& p : points) {
        if (p.size() != d) throw Error(Errc::DimensionMismatch, "training points have mixed dimensions");
        if (!all_finite(p)) throw Error(Errc::NumericalFailure, "training point has non-finite entries");
    }

    FcmSolution sol;
    auto u = fcm_initial_memberships(n, k, config.seed);
    std::vector<Point> centers;
    for (std::size_t it = 1; it <= config.max_iterations; ++it) {
        centers = compute_centers(points, u, k, config.fuzziness);
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            auto row = fcm_memberships(centers, points[i], config.fuzziness);
            for (std::size_t j = 0; j < k; ++j) change += std::abs(row[j] - u[i][j]);
            u[i] = std::move(row);
        }
        const double objective = fcm_objective(points, centers, u, config.fuzziness);
        if (!std::isfinite(objective)) throw Error(Errc::NumericalFailure, "non-finite objective");
        sol.objective_history.push_back(objective);
        sol.iterations = it;
        if (change <= config.epsilon) {
            sol.converged = true;
            break;
        }
    }

    // Canonical ordering so identical seeds give identical model files.
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::lexicographical_compare(centers[a].begin(), centers[a].end(), centers[b].begin(),
                                            centers[b].end());
    });
    sol.centers.reserve(k);
    for (auto j : order) sol.centers.push_back(centers[j]);
    sol.memberships.assign(n, std::vector<double>(k));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) sol.memberships[i][j] = u[i][order[j]];
    }
    return sol;
}

// --- model ---

ClusterModel::ClusterModel(std::vector<Point> centers, double fuzziness, double epsilon,
                           std::string embedder_identity, TrainingMeta meta)
    : centers_(std::move(centers)),
      fuzziness_(fuzziness),
      epsilon_(epsilon),
      embedder_identity_(std::move(embedder_identity)),
      meta_(std::move(meta)) {
    if (centers_.empty()) throw Error(Errc::InvalidArgument, "cluster model needs at least one center");
    const auto d = centers_.front().size();
    if (d == 0) throw Error(Errc::InvalidArgument, "cluster centers must have positive dimension");
    for (const auto& c : centers_) {
        if (c.size() != d) throw Error(Errc::DimensionMismatch, "cluster centers have mixed dimensions");
        if (!all_finite(c)) throw Error(Errc::NumericalFailure, "cluster center has non-finite entries");
    }
    if (!(fuzziness_ > 1.0) || !std::isfinite(fuzziness_)) {
        throw Error(Errc::InvalidArgument, "fuzziness must be finite and greater than 1");
    }
    if (!(epsilon_ > 0.0)) throw Error(Errc::InvalidArgument, "epsilon must be positive");
    if (embedder_identity_.empty()) throw Error(Errc::InvalidArgument, "embedder identity must not be empty");
}

void ClusterModel::require_embedder(const EmbedderSpec& spec) const {
    if (spec.identity != embedder_identity_) {
        throw Error(Errc::EmbedderMismatch, "model was trained with embedder '" + embedder_identity_ +
                                                "' but '" + spec.identity + "' was supplied");
    }
    if (spec.dimension != dimension()) {
        throw Error(Errc::DimensionMismatch, "embedder dimension " + std::to_string(spec.dimension) +
                                                 " does not match model dimension " + std::to_string(dimension()));
    }
}

ClusterModel train(std::span<const EmbeddingVector> points, const FcmConfig& config,
                   const std::string& embedder_identity) {
    std::vector<Point> raw;
    raw.reserve(points.size());
    for (const auto& p : points) raw.emplace_back(p.values().begin(), p.values().end());
    if (raw.size() < config.cluster_count) {
        throw Error(Errc::InsufficientData, "need at least K points: have " + std::to_string(raw.size()) +
                                                ", K = " + std::to_string(config.cluster_count));
    }
    auto sol = fcm_solve(raw, config);
    TrainingMeta meta;
    meta.iterations = sol.iterations;
    meta.final_objective = sol.objective_history.back();
    meta.seed = config.seed;
    meta.converged = sol.converged;
    meta.objective_history = std::move(sol.objective_history);
    return ClusterModel(std::move(sol.centers), config.fuzziness, config.epsilon, embedder_identity,
                        std::move(meta));
}

MembershipVector predict_membership(const ClusterModel& model, const EmbeddingVector& x) {
    if (x.dimension() != model.dimension()) {
        throw Error(Errc::DimensionMismatch, "embedding dimension " + std::to_string(x.dimension()) +
                                                 " does not match model dimension " +
                                                 std::to_string(model.dimension()));
    }
    auto u = fcm_memberships(model.centers(), x.values(), model.fuzziness());
    // Rounding can leave a degree a hair outside [0,1].
    for (auto& v : u) v = std::clamp(v, 0.0, 1.0);
    return MembershipVector(std::move(u));
}

MembershipIndex membership_index_of(const ClusterModel& model, const Embedder& embedder, std::string_view text) {
    model.require_embedder(embedder.spec());
    return membership_index(predict_membership(model, embedder.embed_text(text)));
}

// --- persistence ---

std::string model_to_json(const ClusterModel& model) {
    const auto& meta = model.training_meta();
    json j;
    j["format_version"] = kModelFormatVersion;
    j["cluster_count"] = model.cluster_count();
    j["dimension"] = model.dimension();
    j["fuzziness"] = model.fuzziness();
    j["epsilon"] = model.epsilon();
    j["embedder_identity"] = model.embedder_identity();
    j["centers"] = std::vector<Point>(model.centers().begin(), model.centers().end());
    j["training_meta"] = {
        {"iterations", meta.iterations},
        {"final_objective", meta.final_objective},
        {"seed", meta.seed},
        {"converged", meta.converged},
        {"objective_history", meta.objective_history},
    };
    return j.dump(2) + "\n";
}

void save_model(const ClusterModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoFailure, "cannot open " + path.string() + " for writing");
    out << model_to_json(model);
    out.flush();
    if (!out) throw Error(Errc::IoFailure, "failed writing " + path.string());
}

ClusterModel model_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(Errc::IoFailure, std::string("model file does not parse: ") + e.what());
    }
    if (!j.is_object() || !j.contains("format_version")) {
        throw Error(Errc::IoFailure, "model file has no format_version");
    }
    const auto& version = j.at("format_version");
    if (!version.is_number_integer() || version.get<long long>() != kModelFormatVersion) {
        throw Error(Errc::SchemaVersionMismatch, "unsupported model format_version " + version.dump());
    }
    try {
        auto centers = j.at("centers").get<std::vector<Point>>();
        const auto k = j.at("cluster_count").get<std::size_t>();
        const auto d = j.at("dimension").get<std::size_t>();
        if (centers.size() != k || (k > 0 && centers.front().size() != d)) {
            throw Error(Errc::IoFailure, "model file centers disagree with cluster_count/dimension");
        }
        const auto& m = j.at("training_meta");
        TrainingMeta meta;
        meta.iterations = m.at("iterations").get<std::size_t>();
        meta.final_objective = m.at("final_objective").get<double>();
        meta.seed = m.at("seed").get<std::uint64_t>();
        meta.converged = m.value("converged", false);
        meta.objective_history = m.value("objective_history", std::vector<double>{});
        return ClusterModel(std::move(centers), j.at("fuzziness").get<double>(), j.at("epsilon").get<double>(),
                            j.at("embedder_identity").get<std::string>(), std::move(meta));
    } catch (const json::exception& e) {
        throw Error(Errc::IoFailure, std::string("model file is missing fields: ") + e.what());
    }
}

ClusterModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoFailure, "cannot open model file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

}  // namespace cohemark
