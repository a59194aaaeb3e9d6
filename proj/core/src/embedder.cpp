#include "cohemark/embedder.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <cmath>

#include "cohemark/error.hpp"
#include "cohemark/rng.hpp"

namespace cohemark {

using nlohmann::json;

EmbeddingVector Embedder::embed_text(std::string_view text) const {
    const Sentence s(std::string(text), 0);
    return std::move(embed(std::span<const Sentence>(&s, 1)).front());
}

std::vector<EmbeddingVector> Embedder::embed_texts(std::span<const std::string> texts) const {
    std::vector<Sentence> sentences;
    sentences.reserve(texts.size());
    for (const auto& t : texts) sentences.emplace_back(t, sentences.size());
    return embed(sentences);
}

// --- hash embedder ---

namespace {

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

bool is_token_byte(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

}  // namespace

HashEmbedder::HashEmbedder(std::size_t dimension, std::uint64_t seed) : seed_(seed) {
    if (dimension == 0) {
        throw Error(Errc::InvalidArgument, "hash embedder dimension must be positive");
    }
    spec_.kind = EmbedderKind::Hash;
    spec_.dimension = dimension;
    spec_.identity = "hash:d=" + std::to_string(dimension) + ":seed=" + std::to_string(seed);
}

EmbeddingVector HashEmbedder::embed_one(std::string_view text) const {
    std::vector<double> counts(spec_.dimension, 0.0);
    std::string token;
    bool any = false;
    const auto flush = [&] {
        if (token.empty()) return;
        const std::uint64_t h = mix64(fnv1a(token) ^ seed_);
        counts[h % spec_.dimension] += 1.0;
        any = true;
        token.clear();
    };
    for (unsigned char c : text) {
        if (is_token_byte(c)) {
            token.push_back(static_cast<char>(std::tolower(c)));
        } else {
            flush();
        }
    }
    flush();
    if (!any) std::fill(counts.begin(), counts.end(), 1.0);
    return EmbeddingVector::normalized(std::move(counts));
}

std::vector<EmbeddingVector> HashEmbedder::embed(std::span<const Sentence> sentences) const {
    std::vector<EmbeddingVector> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) out.push_back(embed_one(s.text()));
    return out;
}

// --- remote embedder ---

RemoteEmbedder::RemoteEmbedder(std::unique_ptr<JsonHttpClient> client, std::string model, std::size_t dimension)
    : client_(std::move(client)), model_(std::move(model)) {
    spec_.kind = EmbedderKind::Remote;
    spec_.dimension = dimension;
    // Width first: the model name runs to the end and may contain separators.
    spec_.identity = "remote:d=" + std::to_string(dimension) + ":model=" + model_;
}

namespace {

EmbeddingVector checked_vector(std::vector<double> v, std::size_t dimension) {
    if (v.size() != dimension) {
        throw Error(Errc::DimensionMismatch, "/embed returned a vector of width " + std::to_string(v.size()) +
                                                 ", expected " + std::to_string(dimension));
    }
    const double norm = std::sqrt(dot(v, v));
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > RemoteEmbedder::kRemoteNormTolerance) {
        throw Error(Errc::RemoteUnavailable, "/embed returned a vector that is not unit norm");
    }
    // Within the sidecar tolerance; tighten to the in-process invariant.
    return EmbeddingVector::normalized(std::move(v));
}

}  // namespace

RemoteEmbedder::Batch RemoteEmbedder::request(const JsonHttpClient& client, std::span<const std::string> texts) {
    const json body = {{"texts", texts}};
    const auto res = client.post_json("/embed", body.dump());
    if (res.status != 200) {
        throw Error(Errc::RemoteUnavailable, "/embed returned HTTP " + std::to_string(res.status));
    }
    Batch batch;
    try {
        const auto parsed = json::parse(res.body);
        batch.dimension = parsed.at("dimension").get<std::size_t>();
        batch.model = parsed.at("model").get<std::string>();
        batch.vectors = parsed.at("embeddings").get<std::vector<std::vector<double>>>();
    } catch (const json::exception& e) {
        throw Error(Errc::RemoteUnavailable, std::string("malformed /embed response: ") + e.what());
    }
    if (batch.vectors.size() != texts.size()) {
        throw Error(Errc::RemoteUnavailable, "/embed returned " + std::to_string(batch.vectors.size()) +
                                                 " vectors for " + std::to_string(texts.size()) + " texts");
    }
    return batch;
}

std::unique_ptr<RemoteEmbedder> RemoteEmbedder::connect(const std::string& base_url,
                                                        std::optional<std::size_t> expected_dimension,
                                                        RetryPolicy retry) {
    auto client = std::make_unique<JsonHttpClient>(base_url, retry);
    const std::vector<std::string> probe = {"probe"};
    const auto batch = request(*client, probe);
    if (batch.dimension == 0) {
        throw Error(Errc::RemoteUnavailable, "/embed reported dimension 0");
    }
    if (expected_dimension && *expected_dimension != batch.dimension) {
        throw Error(Errc::DimensionMismatch, "remote embedder serves dimension " + std::to_string(batch.dimension) +
                                                 ", expected " + std::to_string(*expected_dimension));
    }
    (void)checked_vector(batch.vectors.front(), batch.dimension);
    return std::unique_ptr<RemoteEmbedder>(new RemoteEmbedder(std::move(client), batch.model, batch.dimension));
}

std::vector<EmbeddingVector> RemoteEmbedder::embed(std::span<const Sentence> sentences) const {
    std::vector<EmbeddingVector> out;
    out.reserve(sentences.size());
    for (std::size_t begin = 0; begin < sentences.size(); begin += kMaxBatch) {
        const auto end = std::min(sentences.size(), begin + kMaxBatch);
        std::vector<std::string> texts;
        texts.reserve(end - begin);
        for (auto i = begin; i < end; ++i) texts.push_back(sentences[i].text());

        auto batch = request(*client_, texts);
        if (batch.dimension != spec_.dimension) {
            throw Error(Errc::DimensionMismatch, "/embed dimension changed from " + std::to_string(spec_.dimension) +
                                                     " to " + std::to_string(batch.dimension));
        }
        if (batch.model != model_) {
            throw Error(Errc::EmbedderMismatch, "/embed model changed from " + model_ + " to " + batch.model);
        }
        for (auto& v : batch.vectors) out.push_back(checked_vector(std::move(v), spec_.dimension));
    }
    return out;
}

std::unique_ptr<Embedder> make_embedder(const EmbedderOptions& options) {
    switch (options.kind) {
        case EmbedderKind::Hash:
            return std::make_unique<HashEmbedder>(options.dimension, options.hash_seed);
        case EmbedderKind::Remote:
            return RemoteEmbedder::connect(options.url, std::nullopt);
    }
    throw Error(Errc::InvalidArgument, "unknown embedder kind");
}

std::unique_ptr<Embedder> embedder_for_identity(const std::string& identity, const std::string& remote_url) {
    const auto field = [&](std::string_view key) -> std::optional<std::string> {
        const auto pos = identity.find(std::string(key) + "=");
        if (pos == std::string::npos) return std::nullopt;
        const auto begin = pos + key.size() + 1;
        const auto end = identity.find(':', begin);
        return identity.substr(begin, end == std::string::npos ? std::string::npos : end - begin);
    };
    try {
        if (identity.rfind("hash:", 0) == 0) {
            const auto d = field("d");
            const auto seed = field("seed");
            if (d && seed) {
                auto embedder = std::make_unique<HashEmbedder>(std::stoull(*d), std::stoull(*seed));
                if (embedder->spec().identity == identity) return embedder;
            }
        } else if (identity.rfind("remote:", 0) == 0) {
            const auto d = field("d");
            if (d) {
                if (remote_url.empty()) {
                    throw Error(Errc::InvalidArgument,
                                "model was trained with a remote embedder; an embedding endpoint URL is required");
                }
                auto embedder = RemoteEmbedder::connect(remote_url, std::stoull(*d));
                if (embedder->spec().identity != identity) {
                    throw Error(Errc::EmbedderMismatch, "endpoint serves '" + embedder->spec().identity +
                                                            "' but the model needs '" + identity + "'");
                }
                return embedder;
            }
        }
    } catch (const std::logic_error&) {
        // stoull failures fall through to the generic message
    }
    throw Error(Errc::EmbedderMismatch, "unrecognized embedder identity '" + identity + "'");
}

}  // namespace cohemark
