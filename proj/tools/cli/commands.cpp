#include <charconv>
#include <cstdlib>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "cohemark/attack.hpp"
#include "cohemark/cohe_sampler.hpp"
#include "cohemark/detector.hpp"
#include "cohemark/embedder.hpp"
#include "cohemark/error.hpp"
#include "cohemark/fuzzy_cmeans.hpp"
#include "cohemark/json_io.hpp"
#include "cohemark/language_model.hpp"
#include "cohemark/nssc.hpp"
#include "cohemark/rng.hpp"
#include "cohemark/segmenter.hpp"
#include "cohemark/synthetic.hpp"
#include "command.hpp"
#include "io.hpp"
#include "parallel.hpp"

namespace cohemark::cli {
namespace {

using Role = OptionTable::Role;
using nlohmann::json;

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            parts.emplace_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.emplace_back(trim(cur));
    return parts;
}

std::vector<std::size_t> parse_ranks(const std::string& s, const char* flag) {
    std::vector<std::size_t> ranks;
    for (const auto& part : split_list(s)) {
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size())
            throw Error(Errc::InvalidArgument, std::string("--") + flag + ": '" + s + "' is not a list of ranks");
        ranks.push_back(v);
    }
    return ranks;
}

std::vector<double> parse_doubles(const std::string& s, const char* flag) {
    std::vector<double> values;
    for (const auto& part : split_list(s)) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(part, &used));
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw Error(Errc::InvalidArgument, std::string("--") + flag + ": '" + s + "' is not a list of numbers");
        }
    }
    return values;
}

PromptAnchor parse_anchor(const std::string& s) {
    return s == "last" ? PromptAnchor::LastSentence : PromptAnchor::WholePrompt;
}

struct NsscOptions {
    std::string v1 = "0,2";
    std::string v2 = "1,3,4,5";
    std::size_t match_budget = 5;

    void declare(OptionTable& t) {
        t.option("v1-ranks", v1, "membership ranks that are green in mode v1");
        t.option("v2-ranks", v2, "membership ranks that are green in mode v2");
        t.option("match-budget", match_budget, "primary-cluster matches before switching to v2");
    }

    [[nodiscard]] NsscConfig build() const {
        NsscConfig c;
        c.v1_green_ranks = parse_ranks(v1, "v1-ranks");
        c.v2_green_ranks = parse_ranks(v2, "v2-ranks");
        c.match_budget = match_budget;
        c.validate();
        return c;
    }
};

struct ModelBundle {
    ClusterModel model;
    std::shared_ptr<const Embedder> embedder;
};

ModelBundle open_model(const std::string& path, const std::string& embed_url) {
    auto model = load_model(path);
    std::shared_ptr<const Embedder> embedder = embedder_for_identity(model.embedder_identity(), embed_url);
    model.require_embedder(embedder->spec());
    return {std::move(model), std::move(embedder)};
}

void declare_embed_url(OptionTable& t, std::string& url) {
    t.option("embed-url", url, "embedding service base URL (remote embedders only)")->envname("COHEMARK_EMBED_URL");
}

void declare_jobs(OptionTable& t, std::size_t& jobs) {
    t.option("jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
}

void require(bool ok, const std::string& message) {
    if (!ok) throw Error(Errc::InvalidArgument, message);
}

struct TextItem {
    json id;
    std::string text;
    std::optional<std::string> prompt;
    bool failed = false;
};

// Either JSONL records with a "text" field or one plain text per line.
std::vector<TextItem> load_texts(const std::string& path) {
    const auto lines = read_lines(path);
    std::vector<TextItem> items;
    if (lines.empty()) return items;
    if (lines.front().front() != '{') {
        for (std::size_t i = 0; i < lines.size(); ++i) items.push_back({json(i), lines[i], std::nullopt, false});
        return items;
    }
    const auto records = read_jsonl(path);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (!r.is_object() || !r.contains("text") || !r["text"].is_string())
            throw Error(Errc::InvalidArgument, path + ": record " + std::to_string(i + 1) + " has no \"text\" field");
        TextItem item{r.value("id", json(i)), r["text"].get<std::string>(), std::nullopt, false};
        if (r.contains("prompt") && r["prompt"].is_string()) item.prompt = r["prompt"].get<std::string>();
        if (r.contains("outcome") && r["outcome"] == "failed") item.failed = true;
        items.push_back(std::move(item));
    }
    return items;
}

void attach_prompts(std::vector<TextItem>& items, const std::string& prompt_file, bool record_prompts) {
    require(prompt_file.empty() || !record_prompts, "--prompt-file and --record-prompts are mutually exclusive");
    if (!prompt_file.empty()) {
        const auto prompts = read_lines(prompt_file);
        if (prompts.size() != items.size())
            throw Error(Errc::InvalidArgument, "--prompt-file has " + std::to_string(prompts.size()) +
                                                   " prompts for " + std::to_string(items.size()) + " texts");
        for (std::size_t i = 0; i < items.size(); ++i) items[i].prompt = prompts[i];
    } else if (!record_prompts) {
        for (auto& item : items) item.prompt.reset();
    } else {
        for (const auto& item : items)
            if (!item.prompt) throw Error(Errc::InvalidArgument, "--record-prompts: a record has no \"prompt\" field");
    }
}

struct ScoringOptions {
    std::string model;
    std::string embed_url;
    std::size_t min_scored = 3;
    NsscOptions nssc;

    void declare(OptionTable& t) {
        t.option("model", model, "cluster model (needed when scoring raw texts)", Role::Input);
        t.option("min-scored", min_scored, "fewest scored sentences for a decision");
        nssc.declare(t);
        declare_embed_url(t, embed_url);
    }
};

struct ScoreSet {
    std::vector<double> ratios;
    std::size_t undecidable = 0;
    std::size_t green = 0;
    std::size_t scored = 0;
    bool have_counts = false;
};

// Accepts bare numbers, detection records (with "ratio") or texts to be scored with --model.
ScoreSet load_scores(const std::string& path, const ScoringOptions& opts, std::size_t jobs) {
    const auto lines = read_lines(path);
    ScoreSet set;
    if (lines.empty()) return set;
    std::vector<json> values;
    if (lines.front().front() == '{') {
        values = read_jsonl(path);
    } else {
        bool numeric = true;
        for (const auto& l : lines) {
            double v = 0;
            const auto [ptr, ec] = std::from_chars(l.data(), l.data() + l.size(), v);
            if (ec != std::errc{} || ptr != l.data() + l.size()) {
                numeric = false;
                break;
            }
            values.emplace_back(v);
        }
        if (!numeric) {
            values.clear();
            for (const auto& l : lines) values.push_back(json{{"text", l}});
        }
    }

    std::vector<std::string> texts;
    for (const auto& v : values) {
        if (v.is_number()) {
            set.ratios.push_back(v.get<double>());
        } else if (v.is_object() && v.contains("ratio")) {
            if (v.value("verdict", "") == "undecidable") {
                ++set.undecidable;
                continue;
            }
            set.ratios.push_back(v["ratio"].get<double>());
            if (v.contains("s_v") && v.contains("s_t")) {
                set.green += v["s_v"].get<std::size_t>();
                set.scored += v["s_t"].get<std::size_t>();
                set.have_counts = true;
            }
        } else if (v.is_object() && v.contains("text") && v["text"].is_string()) {
            if (v.value("outcome", "") == "failed") continue;
            texts.push_back(v["text"].get<std::string>());
        } else {
            throw Error(Errc::InvalidArgument, path + ": expected scores, detection records or texts");
        }
    }
    if (!texts.empty()) {
        require(!opts.model.empty(), path + " contains texts; --model is required to score them");
        const auto bundle = open_model(opts.model, opts.embed_url);
        const auto nssc = opts.nssc.build();
        DetectOptions d;
        d.min_scored = opts.min_scored;
        const auto results = parallel_map(texts.size(), jobs, [&](std::size_t i) {
            return detect(texts[i], bundle.model, *bundle.embedder, nssc, 1.0, d);
        });
        for (const auto& r : results) {
            if (r.verdict == Verdict::Undecidable) {
                ++set.undecidable;
                continue;
            }
            set.ratios.push_back(r.ratio);
            set.green += r.green_count;
            set.scored += r.scored_count;
            set.have_counts = true;
        }
    }
    return set;
}

std::string to_jsonl(const std::vector<json>& rows) {
    std::string s;
    for (const auto& r : rows) {
        s += r.dump();
        s += '\n';
    }
    return s;
}

// ---------------------------------------------------------------------------

class TrainClusters final : public Command {
  public:
    std::string name() const override { return "train-clusters"; }
    std::string description() const override { return "fit fuzzy c-means clusters over sentence embeddings"; }

    void declare(OptionTable& t) override {
        t.option("corpus", corpus_, "sentence corpus, one sentence per line", Role::Input)->required();
        t.option("k", fcm_.cluster_count, "number of clusters");
        t.option("m", fcm_.fuzziness, "fuzziness exponent (> 1)");
        t.option("epsilon", fcm_.epsilon, "convergence tolerance on the membership matrix");
        t.option("max-iterations", fcm_.max_iterations, "iteration cap");
        t.option("seed", fcm_.seed, "initialisation seed");
        t.option("embedder", embedder_, "embedding backend")->check(CLI::IsMember({"hash", "remote"}));
        t.option("dim", dim_, "embedding width (hash) or expected width (remote, 0 = any)");
        t.option("hash-seed", hash_seed_, "hash embedder seed");
        declare_embed_url(t, embed_url_);
        t.option("out", out_, "model file to write", Role::Output)->required();
    }

    int execute(Context& ctx) override {
        const auto lines = read_lines(corpus_);
        fcm_.validate();
        if (lines.size() < fcm_.cluster_count)
            throw Error(Errc::InsufficientData, "need at least K points: corpus has " + std::to_string(lines.size()) +
                                                    " sentences, K = " + std::to_string(fcm_.cluster_count));
        EmbedderOptions eo;
        eo.kind = embedder_ == "remote" ? EmbedderKind::Remote : EmbedderKind::Hash;
        eo.dimension = dim_;
        eo.hash_seed = hash_seed_;
        eo.url = embed_url_;
        const auto embedder = make_embedder(eo);
        const auto points = embedder->embed_texts(lines);
        const auto model = train(points, fcm_, embedder->spec().identity);
        save_model(model, out_);

        std::vector<std::size_t> sizes(model.cluster_count(), 0);
        double primary_mass = 0.0;
        for (const auto& p : points) {
            const auto mv = predict_membership(model, p);
            const auto mi = membership_index(mv);
            ++sizes[primary_cluster(mi)];
            primary_mass += mv[primary_cluster(mi)];
        }
        const auto& meta = model.training_meta();
        ctx.out << "trained " << model.cluster_count() << " clusters on " << lines.size() << " sentences ("
                << embedder->spec().identity << ")\n"
                << "iterations " << meta.iterations << (meta.converged ? " (converged)" : " (iteration cap reached)")
                << ", objective " << format_double(meta.final_objective) << "\n"
                << "primary cluster sizes:";
        for (auto s : sizes) ctx.out << ' ' << s;
        const double mean_primary = primary_mass / static_cast<double>(points.size());
        ctx.out << "\nmean primary membership " << format_double(mean_primary) << "\n";
        if (mean_primary < 1.25 / static_cast<double>(model.cluster_count()))
            ctx.err << "warning: memberships are close to uniform; the ranking carries little signal. "
                       "Try a smaller --m.\n";
        return kExitOk;
    }

  private:
    std::string corpus_;
    std::string out_;
    FcmConfig fcm_;
    std::string embedder_ = "hash";
    std::size_t dim_ = HashEmbedder::kDefaultDimension;
    std::uint64_t hash_seed_ = HashEmbedder::kDefaultSeed;
    std::string embed_url_;
};

class Generate final : public Command {
  public:
    std::string name() const override { return "generate"; }
    std::string description() const override { return "generate watermarked texts by rejection sampling"; }

    void declare(OptionTable& t) override {
        t.option("prompt-file", prompt_file_, "prompts, one per line", Role::Input)->required();
        t.option("model", model_, "cluster model", Role::Input)->required();
        t.option("backend", backend_, "sentence source")->check(CLI::IsMember({"mock", "remote"}));
        t.option("corpus", corpus_, "sentence pool for the mock backend", Role::Input);
        t.option("mock-weighting", weighting_, "mock backend candidate weighting")
            ->check(CLI::IsMember({"similarity", "uniform"}));
        t.option("lm-url", lm_url_, "language model service base URL")->envname("COHEMARK_LM_URL");
        t.option("max-tokens", max_tokens_, "token cap per remote candidate");
        t.option("sentences", cfg_.max_sentences, "sentences per text");
        t.option("trials", cfg_.max_trials_per_sentence, "candidate cap per sentence");
        t.option("max-total-trials", cfg_.max_total_trials, "candidate cap per text (0 = 16 x sentences)");
        t.option("temperature", cfg_.temperature, "sampling temperature");
        t.option("repetition-penalty", cfg_.repetition_penalty, "repetition penalty");
        t.option("prompt-anchor", anchor_, "prompt text used as the first predecessor")
            ->check(CLI::IsMember({"whole", "last"}));
        nssc_.declare(t);
        declare_embed_url(t, embed_url_);
        t.option("seed", seed_, "master seed");
        declare_jobs(t, jobs_);
        t.option("out", out_, "JSONL output", Role::Output)->required();
    }

    int execute(Context& ctx) override {
        const auto prompts = read_lines(prompt_file_);
        if (prompts.empty()) throw Error(Errc::IoFailure, prompt_file_ + " contains no prompts");
        const auto nssc = nssc_.build();
        cfg_.prompt_anchor = parse_anchor(anchor_);
        cfg_.validate();
        const auto bundle = open_model(model_, embed_url_);

        std::shared_ptr<const LanguageModel> lm;
        if (backend_ == "mock") {
            require(!corpus_.empty(), "--corpus is required with --backend mock");
            auto pool = read_lines(corpus_);
            if (pool.empty()) throw Error(Errc::IoFailure, corpus_ + " contains no sentences");
            lm = std::make_shared<CorpusLm>(std::move(pool),
                                            weighting_ == "similarity" ? bundle.embedder : nullptr);
        } else {
            require(!lm_url_.empty(), "--lm-url (or COHEMARK_LM_URL) is required with --backend remote");
            auto client = std::make_shared<const CompletionClient>(lm_url_, RetryPolicy{},
                                                                   static_cast<int>(jobs_));
            lm = std::make_shared<RemoteLm>(std::move(client), max_tokens_);
        }

        const auto records = parallel_map(prompts.size(), jobs_, [&](std::size_t i) {
            auto cfg = cfg_;
            cfg.seed = derive_seed(seed_, {i});
            return generate(prompts[i], bundle.model, nssc, cfg, *lm, *bundle.embedder);
        });

        std::vector<json> rows;
        std::size_t failed = 0;
        std::size_t trials = 0;
        for (std::size_t i = 0; i < records.size(); ++i) {
            json j = records[i];
            j["id"] = i;
            rows.push_back(std::move(j));
            failed += records[i].outcome == GenerationOutcome::Failed ? 1 : 0;
            trials += records[i].total_trials;
        }
        write_file(out_, to_jsonl(rows));
        const auto n = records.size();
        ctx.out << "generated " << n << " texts: " << n - failed << " completed, " << failed << " failed"
                << " (failure rate " << format_double(static_cast<double>(failed) / static_cast<double>(n))
                << "), " << trials << " candidates sampled\n";
        return failed == n ? kExitAllFailed : kExitOk;
    }

  private:
    std::string prompt_file_;
    std::string model_;
    std::string backend_ = "mock";
    std::string corpus_;
    std::string weighting_ = "similarity";
    std::string lm_url_;
    int max_tokens_ = 128;
    GenerationConfig cfg_;
    std::string anchor_ = "whole";
    NsscOptions nssc_;
    std::string embed_url_;
    std::uint64_t seed_ = 0;
    std::size_t jobs_ = default_jobs();
    std::string out_;
};

class Detect final : public Command {
  public:
    std::string name() const override { return "detect"; }
    std::string description() const override { return "score texts for the watermark"; }

    void declare(OptionTable& t) override {
        t.option("input", input_, "JSONL records with a \"text\" field, or one text per line", Role::Input)
            ->required();
        t.option("model", model_, "cluster model", Role::Input)->required();
        t.option("prompt-file", prompt_file_, "prompts aligned with the inputs, one per line", Role::Input);
        t.flag("record-prompts", record_prompts_, "score the first sentence against each record's \"prompt\"");
        t.option("prompt-anchor", anchor_, "prompt text used as the first predecessor")
            ->check(CLI::IsMember({"whole", "last"}));
        t.option("threshold", threshold_, "decision threshold on the green ratio");
        t.option("calibration", calibration_, "calibration report; overrides --threshold", Role::Input);
        t.option("min-scored", min_scored_, "fewest scored sentences for a decision");
        t.flag("include-failed", include_failed_, "also score records whose generation failed");
        nssc_.declare(t);
        declare_embed_url(t, embed_url_);
        declare_jobs(t, jobs_);
        t.option("out", out_, "JSONL detection results", Role::Output)->required();
    }

    int execute(Context& ctx) override {
        auto items = load_texts(input_);
        attach_prompts(items, prompt_file_, record_prompts_);
        const auto nssc = nssc_.build();
        DetectOptions opts;
        opts.min_scored = min_scored_;
        opts.prompt_anchor = parse_anchor(anchor_);
        double threshold = threshold_;
        if (!calibration_.empty()) {
            CalibrationReport report;
            try {
                report = json::parse(read_file(calibration_)).get<CalibrationReport>();
            } catch (const json::exception& e) {
                throw Error(Errc::InvalidArgument, calibration_ + ": not a calibration report: " + e.what());
            }
            threshold = report.threshold;
            opts.null_hit_rate = report.null_hit_rate;
        }
        const auto bundle = open_model(model_, embed_url_);

        std::vector<std::size_t> selected;
        for (std::size_t i = 0; i < items.size(); ++i)
            if (include_failed_ || !items[i].failed) selected.push_back(i);

        const auto results = parallel_map(selected.size(), jobs_, [&](std::size_t k) {
            const auto& item = items[selected[k]];
            auto o = opts;
            o.prompt = item.prompt;
            return detect(item.text, bundle.model, *bundle.embedder, nssc, threshold, o);
        });

        std::vector<json> rows;
        std::size_t counts[3] = {0, 0, 0};
        for (std::size_t k = 0; k < results.size(); ++k) {
            json j = results[k];
            j["id"] = items[selected[k]].id;
            rows.push_back(std::move(j));
            ++counts[static_cast<int>(results[k].verdict)];
        }
        write_file(out_, to_jsonl(rows));
        ctx.out << "scored " << results.size() << " texts at threshold " << format_double(threshold) << ": "
                << counts[static_cast<int>(Verdict::Watermarked)] << " watermarked, "
                << counts[static_cast<int>(Verdict::Clean)] << " clean, "
                << counts[static_cast<int>(Verdict::Undecidable)] << " undecidable";
        if (items.size() != selected.size()) ctx.out << ", " << items.size() - selected.size() << " failed skipped";
        ctx.out << "\n";
        return kExitOk;
    }

  private:
    std::string input_;
    std::string model_;
    std::string prompt_file_;
    bool record_prompts_ = false;
    std::string anchor_ = "whole";
    double threshold_ = 0.6;
    std::string calibration_;
    std::size_t min_scored_ = 3;
    bool include_failed_ = false;
    NsscOptions nssc_;
    std::string embed_url_;
    std::size_t jobs_ = default_jobs();
    std::string out_;
};

class Calibrate final : public Command {
  public:
    std::string name() const override { return "calibrate"; }
    std::string description() const override { return "pick a threshold from unwatermarked texts"; }

    void declare(OptionTable& t) override {
        t.option("input", input_, "null texts, detection results or bare scores", Role::Input)->required();
        t.option("fpr", fpr_, "target false positive rate");
        scoring_.declare(t);
        declare_jobs(t, jobs_);
        t.option("out", out_, "calibration report (JSON)", Role::Output)->required();
    }

    int execute(Context& ctx) override {
        const auto set = load_scores(input_, scoring_, jobs_);
        if (set.ratios.empty()) throw Error(Errc::EmptyInput, input_ + " yields no decidable scores");
        auto report = calibrate_threshold(set.ratios, fpr_);
        if (set.have_counts && set.scored > 0)
            report.null_hit_rate = static_cast<double>(set.green) / static_cast<double>(set.scored);
        write_file(out_, json(report).dump(2) + "\n");
        ctx.out << "threshold " << format_double(report.threshold) << " for target FPR " << format_double(fpr_)
                << " from " << report.null_sample_size << " null scores (mean "
                << format_double(report.summary.mean) << ", p99 " << format_double(report.summary.p99) << ")";
        if (set.undecidable > 0) ctx.out << "; " << set.undecidable << " undecidable texts excluded";
        ctx.out << "\n";
        if (report.small_sample)
            ctx.err << "warning: fewer than " << CalibrationReport::kRecommendedSampleSize
                    << " null scores; the threshold is unreliable\n";
        return kExitOk;
    }

  private:
    std::string input_;
    double fpr_ = 0.01;
    ScoringOptions scoring_;
    std::size_t jobs_ = default_jobs();
    std::string out_;
};

class Evaluate final : public Command {
  public:
    std::string name() const override { return "evaluate"; }
    std::string description() const override { return "true positive rate at a target false positive rate"; }

    void declare(OptionTable& t) override {
        t.option("watermarked", watermarked_, "watermarked texts, detection results or scores", Role::Input)
            ->required();
        t.option("null", null_, "unwatermarked texts, detection results or scores", Role::Input)->required();
        t.option("fpr", fpr_, "target false positive rate");
        t.option("calibration", calibration_, "use this report's threshold instead of fitting on --null",
                 Role::Input);
        scoring_.declare(t);
        declare_jobs(t, jobs_);
        t.option("out", out_, "evaluation summary (JSON)", Role::Output)->required();
        t.option("roc-out", roc_out_, "ROC curve (CSV)", Role::Output);
    }

    int execute(Context& ctx) override {
        const auto wm = load_scores(watermarked_, scoring_, jobs_);
        const auto nul = load_scores(null_, scoring_, jobs_);
        if (wm.ratios.empty()) throw Error(Errc::EmptyInput, watermarked_ + " yields no decidable scores");
        if (nul.ratios.empty()) throw Error(Errc::EmptyInput, null_ + " yields no decidable scores");

        Evaluation ev;
        std::string source = "fitted on null";
        if (!calibration_.empty()) {
            CalibrationReport report;
            try {
                report = json::parse(read_file(calibration_)).get<CalibrationReport>();
            } catch (const json::exception& e) {
                throw Error(Errc::InvalidArgument, calibration_ + ": not a calibration report: " + e.what());
            }
            ev.target_fpr = report.target_fpr;
            ev.threshold = report.threshold;
            ev.tpr_at_fpr = fraction_at_or_above(wm.ratios, report.threshold);
            ev.empirical_fpr = fraction_at_or_above(nul.ratios, report.threshold);
            ev.roc = roc_curve(wm.ratios, nul.ratios);
            source = "calibration report";
        } else {
            ev = evaluate(wm.ratios, nul.ratios, fpr_);
        }

        json j{{"target_fpr", ev.target_fpr},
               {"threshold", ev.threshold},
               {"threshold_source", source},
               {"tpr_at_fpr", ev.tpr_at_fpr},
               {"empirical_fpr", ev.empirical_fpr},
               {"watermarked_count", wm.ratios.size()},
               {"null_count", nul.ratios.size()},
               {"undecidable_excluded", wm.undecidable + nul.undecidable}};
        write_file(out_, j.dump(2) + "\n");
        if (!roc_out_.empty()) write_file(roc_out_, roc_to_csv(ev.roc));
        ctx.out << "TPR " << format_double(ev.tpr_at_fpr) << " at threshold " << format_double(ev.threshold)
                << " (" << source << "), FPR " << format_double(ev.empirical_fpr) << " on "
                << nul.ratios.size() << " null texts\n";
        return kExitOk;
    }

  private:
    std::string watermarked_;
    std::string null_;
    double fpr_ = 0.01;
    std::string calibration_;
    ScoringOptions scoring_;
    std::size_t jobs_ = default_jobs();
    std::string out_;
    std::string roc_out_;
};

class Attack final : public Command {
  public:
    std::string name() const override { return "attack"; }
    std::string description() const override { return "measure detection under embedding noise or paraphrase"; }

    void declare(OptionTable& t) override {
        t.option("kind", kind_, "attack type")->check(CLI::IsMember({"embedding_noise", "paraphrase_remote"}));
        t.option("input", input_, "JSONL records with a \"text\" field, or one text per line", Role::Input)
            ->required();
        t.option("model", model_, "cluster model", Role::Input)->required();
        t.option("prompt-file", prompt_file_, "prompts aligned with the inputs", Role::Input);
        t.flag("record-prompts", record_prompts_, "use each record's \"prompt\"");
        t.option("prompt-anchor", anchor_, "prompt text used as the first predecessor")
            ->check(CLI::IsMember({"whole", "last"}));
        t.option("sigma", sigma_, "comma-separated noise scales");
        t.option("threshold", threshold_, "decision threshold on the green ratio");
        t.option("min-scored", min_scored_, "fewest scored sentences for a decision");
        t.option("lm-url", lm_url_, "paraphrase service base URL")->envname("COHEMARK_LM_URL");
        t.option("temperature", para_.temperature, "paraphrase temperature");
        t.option("repetition-penalty", para_.repetition_penalty, "paraphrase repetition penalty");
        t.option("max-tokens", para_.max_tokens, "paraphrase token cap");
        nssc_.declare(t);
        declare_embed_url(t, embed_url_);
        t.option("seed", seed_, "noise seed");
        declare_jobs(t, jobs_);
        t.option("out", out_, "CSV: text_id,kind,sigma_or_model,r_before,r_after", Role::Output)->required();
        t.option("texts-out", texts_out_, "paraphrased texts (JSONL)", Role::Output);
    }

    int execute(Context& ctx) override {
        auto items = load_texts(input_);
        attach_prompts(items, prompt_file_, record_prompts_);
        std::erase_if(items, [](const TextItem& i) { return i.failed; });
        if (items.empty()) throw Error(Errc::EmptyInput, input_ + " contains no texts");
        const auto nssc = nssc_.build();
        DetectOptions opts;
        opts.min_scored = min_scored_;
        opts.prompt_anchor = parse_anchor(anchor_);
        const auto bundle = open_model(model_, embed_url_);
        return kind_ == "embedding_noise" ? noise(ctx, items, nssc, opts, bundle)
                                          : paraphrase(ctx, items, nssc, opts, bundle);
    }

  private:
    static std::string id_text(const json& id) { return id.is_string() ? id.get<std::string>() : id.dump(); }

    int noise(Context& ctx, const std::vector<TextItem>& items, const NsscConfig& nssc, const DetectOptions& opts,
              const ModelBundle& bundle) {
        require(texts_out_.empty(), "--texts-out applies to paraphrase_remote only");
        const auto sigmas = parse_doubles(sigma_, "sigma");
        for (double s : sigmas) require(s >= 0.0, "--sigma values must be non-negative");

        const auto rows = parallel_map(items.size(), jobs_, [&](std::size_t i) {
            const auto& item = items[i];
            const auto sentences = segment_sentences(item.text);
            const auto emb = bundle.embedder->embed(sentences);
            std::optional<EmbeddingVector> prompt;
            if (item.prompt) prompt = bundle.embedder->embed_text(prompt_anchor_text(*item.prompt, opts.prompt_anchor));
            const auto before = detect_embeddings(prompt, emb, bundle.model, nssc, threshold_, opts);
            std::vector<double> after;
            for (double s : sigmas) {
                after.push_back(embedding_noise_attack(prompt, emb, s, derive_seed(seed_, {i}), bundle.model, nssc,
                                                       threshold_, opts)
                                    .detection.ratio);
            }
            return std::pair{before.ratio, after};
        });

        std::string csv = "text_id,kind,sigma_or_model,r_before,r_after\n";
        std::vector<double> mean(sigmas.size(), 0.0);
        for (std::size_t i = 0; i < items.size(); ++i) {
            for (std::size_t s = 0; s < sigmas.size(); ++s) {
                csv += id_text(items[i].id) + ",embedding_noise," + format_double(sigmas[s]) + "," +
                       format_double(rows[i].first) + "," + format_double(rows[i].second[s]) + "\n";
                mean[s] += rows[i].second[s] / static_cast<double>(items.size());
            }
        }
        write_file(out_, csv);
        ctx.out << "embedding noise over " << items.size() << " texts, mean ratio by sigma:";
        for (std::size_t s = 0; s < sigmas.size(); ++s)
            ctx.out << ' ' << format_double(sigmas[s]) << '=' << format_double(mean[s]);
        ctx.out << "\n";
        return kExitOk;
    }

    int paraphrase(Context& ctx, const std::vector<TextItem>& items, const NsscConfig& nssc,
                   const DetectOptions& opts, const ModelBundle& bundle) {
        require(!lm_url_.empty(), "--lm-url (or COHEMARK_LM_URL) is required for paraphrase_remote");
        require(items.front().prompt.has_value(),
                "paraphrase_remote needs each text's prefix: pass --prompt-file or --record-prompts");
        const CompletionClient client(lm_url_, RetryPolicy{}, static_cast<int>(jobs_));
        const auto rows = parallel_map(items.size(), jobs_, [&](std::size_t i) {
            const auto& item = items[i];
            auto o = opts;
            o.prompt = item.prompt;
            const auto before = detect(item.text, bundle.model, *bundle.embedder, nssc, threshold_, o);
            auto para = paraphrase_attack(*item.prompt, item.text, client, para_);
            const auto after = detect(para.text, bundle.model, *bundle.embedder, nssc, threshold_, o);
            return std::tuple{before.ratio, after.ratio, std::move(para)};
        });

        std::string csv = "text_id,kind,sigma_or_model,r_before,r_after\n";
        std::vector<json> texts;
        double before_sum = 0.0;
        double after_sum = 0.0;
        for (std::size_t i = 0; i < items.size(); ++i) {
            const auto& [before, after, para] = rows[i];
            csv += id_text(items[i].id) + ",paraphrase_remote," + lm_url_ + "," + format_double(before) + "," +
                   format_double(after) + "\n";
            texts.push_back({{"id", items[i].id},
                             {"text", para.text},
                             {"sentences_before", para.sentences_before},
                             {"sentences_after", para.sentences_after}});
            before_sum += before;
            after_sum += after;
        }
        write_file(out_, csv);
        if (!texts_out_.empty()) write_file(texts_out_, to_jsonl(texts));
        const auto n = static_cast<double>(items.size());
        ctx.out << "paraphrased " << items.size() << " texts: mean ratio " << format_double(before_sum / n)
                << " before, " << format_double(after_sum / n) << " after\n";
        return kExitOk;
    }

    std::string kind_ = "embedding_noise";
    std::string input_;
    std::string model_;
    std::string prompt_file_;
    bool record_prompts_ = false;
    std::string anchor_ = "whole";
    std::string sigma_ = "0";
    double threshold_ = 0.6;
    std::size_t min_scored_ = 3;
    std::string lm_url_;
    CompletionParams para_{0.7, 1.0, 1024};
    NsscOptions nssc_;
    std::string embed_url_;
    std::uint64_t seed_ = 0;
    std::size_t jobs_ = default_jobs();
    std::string out_;
    std::string texts_out_;
};

class SynthCorpus final : public Command {
  public:
    std::string name() const override { return "synth-corpus"; }
    std::string description() const override { return "write a synthetic topical sentence corpus and prompts"; }

    void declare(OptionTable& t) override {
        t.option("sentences", sentences_, "corpus size");
        t.option("prompts", prompts_, "prompt count");
        t.option("seed", seed_, "seed");
        t.option("out-corpus", out_corpus_, "corpus file", Role::Output)->required();
        t.option("out-prompts", out_prompts_, "prompt file", Role::Output);
    }

    int execute(Context& ctx) override {
        require(sentences_ > 0, "--sentences must be positive");
        write_lines(out_corpus_, synthetic_sentences(sentences_, seed_));
        if (!out_prompts_.empty()) write_lines(out_prompts_, synthetic_prompts(prompts_, seed_));
        ctx.out << "wrote " << sentences_ << " sentences over " << synthetic_topic_count() << " topics";
        if (!out_prompts_.empty()) ctx.out << " and " << prompts_ << " prompts";
        ctx.out << "\n";
        return kExitOk;
    }

    static void write_lines(const std::string& path, const std::vector<std::string>& lines) {
        std::string s;
        for (const auto& l : lines) s += l + "\n";
        write_file(path, s);
    }

  private:
    std::size_t sentences_ = 2000;
    std::size_t prompts_ = 200;
    std::uint64_t seed_ = 0;
    std::string out_corpus_;
    std::string out_prompts_;
};

class NullTexts final : public Command {
  public:
    std::string name() const override { return "null-texts"; }
    std::string description() const override { return "sample unwatermarked texts from a sentence corpus"; }

    void declare(OptionTable& t) override {
        t.option("corpus", corpus_, "sentence corpus", Role::Input)->required();
        t.option("count", count_, "number of texts");
        t.option("sentences-per-text", per_text_, "sentences per text");
        t.option("seed", seed_, "seed");
        t.option("out", out_, "one text per line", Role::Output)->required();
    }

    int execute(Context& ctx) override {
        const auto pool = read_lines(corpus_);
        if (pool.empty()) throw Error(Errc::IoFailure, corpus_ + " contains no sentences");
        SynthCorpus::write_lines(out_, null_texts(pool, count_, per_text_, seed_));
        ctx.out << "wrote " << count_ << " null texts of " << per_text_ << " sentences\n";
        return kExitOk;
    }

  private:
    std::string corpus_;
    std::size_t count_ = 1000;
    std::size_t per_text_ = 15;
    std::uint64_t seed_ = 0;
    std::string out_;
};

}  // namespace

std::vector<std::unique_ptr<Command>> make_commands() {
    std::vector<std::unique_ptr<Command>> cmds;
    cmds.push_back(std::make_unique<TrainClusters>());
    cmds.push_back(std::make_unique<Generate>());
    cmds.push_back(std::make_unique<Detect>());
    cmds.push_back(std::make_unique<Calibrate>());
    cmds.push_back(std::make_unique<Evaluate>());
    cmds.push_back(std::make_unique<Attack>());
    cmds.push_back(std::make_unique<SynthCorpus>());
    cmds.push_back(std::make_unique<NullTexts>());
    return cmds;
}

}  // namespace cohemark::cli
