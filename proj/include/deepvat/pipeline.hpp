#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <type_traits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "data_io.hpp"
#include "dissimilarity.hpp"
#include "evaluation.hpp"
#include "matrix.hpp"
#include "mmrs.hpp"
#include "projection.hpp"
#include "render.hpp"
#include "rng.hpp"
#include "spectral.hpp"
#include "tsne.hpp"
#include "vat.hpp"

namespace deepvat {

enum class ReduceStage { none, tsne, random_projection, spectral };
enum class StageOrder { reduce_first, sample_first };

struct PipelineConfig {
    std::string input;
    std::optional<Format> format;
    std::string labels;

    Metric metric = Metric::euclidean;
    ReduceStage reduce = ReduceStage::none;
    StageOrder order = StageOrder::reduce_first;
    double perplexity = 30.0;
    std::size_t tsne_iterations = 1000;
    std::size_t target_dim = 100;
    std::size_t spectral_r_min = 2;
    std::size_t spectral_r_max = 2;
    std::optional<double> spectral_gamma;

    bool sample = false;
    std::size_t kprime = 15;
    std::size_t sample_n = 4000;

    std::optional<double> kernel_gamma;
    Transform transform = Transform::ivat;
    std::optional<std::size_t> kp;  // nullopt: estimate
    std::size_t kmax = kDefaultKMax;
    std::uint64_t seed = 0;

    std::string out_image;
    std::size_t image_scale = 1;
    std::string out_labels;
    std::string out_report;
    std::string out_matrix;
    std::string out_ordering;
    std::string out_indices;
};

namespace pipeline_detail {

inline std::size_t to_size(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != value.size() || value.empty() || value[0] == '-') {
        throw Error("config: '" + key + "' expects a nonnegative integer, got '" + value + "'");
    }
    return static_cast<std::size_t>(v);
}

inline double to_double(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != value.size() || value.empty()) {
        throw Error("config: '" + key + "' expects a number, got '" + value + "'");
    }
    return v;
}

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace pipeline_detail

/// Named stage combinations. Each is only a set of config keys, so an
/// ablation or baseline is a config diff against `deepvat`.
inline const std::map<std::string, std::vector<std::pair<std::string, std::string>>>& presets() {
    static const std::map<std::string, std::vector<std::pair<std::string, std::string>>> table = {
        {"deepvat",
         {{"reduce", "tsne"}, {"sample", "mmrs"}, {"kprime", "15"}, {"sample-n", "4000"}, {"metric", "cosine"},
          {"transform", "ivat"}, {"order", "reduce-first"}}},
        // Same stages as deepvat; the difference is that the input file holds
        // flattened raw images rather than learned embeddings.
        {"deepvat-minus-simclr",
         {{"reduce", "tsne"}, {"sample", "mmrs"}, {"kprime", "15"}, {"sample-n", "4000"}, {"metric", "euclidean"},
          {"transform", "ivat"}, {"order", "reduce-first"}}},
        {"deepvat-minus-tsne",
         {{"reduce", "none"}, {"sample", "mmrs"}, {"kprime", "15"}, {"sample-n", "4000"}, {"metric", "cosine"},
          {"transform", "ivat"}}},
        {"deepvat-minus-tsne-minus-simclr",
         {{"reduce", "none"}, {"sample", "mmrs"}, {"kprime", "15"}, {"sample-n", "4000"}, {"metric", "euclidean"},
          {"transform", "ivat"}}},
        {"fensivat",
         {{"reduce", "random_projection"}, {"target-dim", "100"}, {"sample", "mmrs"}, {"kprime", "15"},
          {"sample-n", "4000"}, {"metric", "cosine"}, {"transform", "ivat"}, {"order", "sample-first"}}},
        {"kernelvat",
         {{"reduce", "none"}, {"kernel-gamma", "0.05"}, {"sample", "mmrs"}, {"kprime", "15"}, {"sample-n", "4000"},
          {"metric", "cosine"}, {"transform", "ivat"}}},
        {"specvat",
         {{"reduce", "spectral"}, {"spectral-r", "1-10"}, {"sample", "mmrs"}, {"kprime", "15"}, {"sample-n", "4000"},
          {"metric", "cosine"}, {"transform", "vat"}, {"order", "sample-first"}}},
        {"ivat", {{"reduce", "none"}, {"sample", "none"}, {"metric", "euclidean"}, {"transform", "ivat"}}},
    };
    return table;
}

/// Apply one `key=value` setting. Keys are the long CLI flag names without
/// the leading dashes.
inline void apply_setting(PipelineConfig& c, const std::string& key, const std::string& value) {
    using namespace pipeline_detail;
    if (key == "preset") {
        const auto it = presets().find(value);
        if (it == presets().end()) throw Error("config: unknown preset '" + value + "'");
        for (const auto& [k, v] : it->second) apply_setting(c, k, v);
    } else if (key == "input") {
        c.input = value;
    } else if (key == "format") {
        c.format = format_from_name(value);
    } else if (key == "labels") {
        c.labels = value;
    } else if (key == "metric") {
        c.metric = metric_from_name(value);
    } else if (key == "reduce") {
        if (value == "none") c.reduce = ReduceStage::none;
        else if (value == "tsne") c.reduce = ReduceStage::tsne;
        else if (value == "random_projection" || value == "random-projection") c.reduce = ReduceStage::random_projection;
        else if (value == "spectral") c.reduce = ReduceStage::spectral;
        else throw Error("config: unknown reduce stage '" + value + "'");
    } else if (key == "order") {
        if (value == "reduce-first") c.order = StageOrder::reduce_first;
        else if (value == "sample-first") c.order = StageOrder::sample_first;
        else throw Error("config: order must be reduce-first or sample-first");
    } else if (key == "perplexity") {
        c.perplexity = to_double(key, value);
    } else if (key == "tsne-iterations") {
        c.tsne_iterations = to_size(key, value);
    } else if (key == "target-dim") {
        c.target_dim = to_size(key, value);
    } else if (key == "spectral-r") {
        const auto dash = value.find('-');
        if (dash == std::string::npos) {
            c.spectral_r_min = c.spectral_r_max = to_size(key, value);
        } else {
            c.spectral_r_min = to_size(key, value.substr(0, dash));
            c.spectral_r_max = to_size(key, value.substr(dash + 1));
        }
    } else if (key == "spectral-gamma") {
        if (value == "auto") c.spectral_gamma.reset();
        else c.spectral_gamma = to_double(key, value);
    } else if (key == "sample") {
        if (value == "mmrs") c.sample = true;
        else if (value == "none") c.sample = false;
        else throw Error("config: sample must be mmrs or none");
    } else if (key == "kprime") {
        c.kprime = to_size(key, value);
    } else if (key == "sample-n") {
        c.sample_n = to_size(key, value);
    } else if (key == "kernel-gamma") {
        if (value == "none") c.kernel_gamma.reset();
        else c.kernel_gamma = to_double(key, value);
    } else if (key == "transform") {
        if (value == "vat") c.transform = Transform::vat;
        else if (value == "ivat") c.transform = Transform::ivat;
        else throw Error("config: transform must be vat or ivat");
    } else if (key == "kp") {
        if (value == "auto") c.kp.reset();
        else c.kp = to_size(key, value);
    } else if (key == "kmax") {
        c.kmax = to_size(key, value);
    } else if (key == "seed") {
        c.seed = static_cast<std::uint64_t>(to_size(key, value));
    } else if (key == "out-image") {
        c.out_image = value;
    } else if (key == "image-scale") {
        c.image_scale = to_size(key, value);
    } else if (key == "out-labels") {
        c.out_labels = value;
    } else if (key == "out-report") {
        c.out_report = value;
    } else if (key == "out-matrix") {
        c.out_matrix = value;
    } else if (key == "out-ordering") {
        c.out_ordering = value;
    } else if (key == "out-indices") {
        c.out_indices = value;
    } else {
        throw Error("config: unknown key '" + key + "'");
    }
}

/// Flat `key=value` lines; blank lines and lines starting with '#' ignored.
/// Order is preserved so a `preset` line can be overridden by later keys.
inline std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const auto line = detail::trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error("config: line " + std::to_string(line_no) + " is not key=value");
        }
        out.emplace_back(std::string(detail::trim(line.substr(0, eq))), std::string(detail::trim(line.substr(eq + 1))));
    }
    return out;
}

/// Ordered key=value report.
struct PipelineReport {
    std::vector<std::pair<std::string, std::string>> entries;

    void set(const std::string& key, std::string value) {
        for (auto& [k, v] : entries) {
            if (k == key) {
                v = std::move(value);
                return;
            }
        }
        entries.emplace_back(key, std::move(value));
    }
    std::optional<std::string> get(const std::string& key) const {
        for (const auto& [k, v] : entries) {
            if (k == key) return v;
        }
        return std::nullopt;
    }
    std::string text() const {
        std::string out;
        for (const auto& [k, v] : entries) out += k + "=" + v + "\n";
        return out;
    }
};

struct PipelineResult {
    PipelineReport report;
    ReorderedMatrix reordered;
    ClusterEstimate estimate;
    std::vector<std::size_t> analyzed_indices;  // rows of the input that reached VAT
    std::optional<Labels> truth;                // labels of the analysed rows
};

namespace pipeline_detail {

inline void validate(const PipelineConfig& c, std::size_t n_input) {
    const std::size_t n = c.sample ? c.sample_n : n_input;
    if (c.sample) {
        if (c.sample_n < 1 || c.sample_n > n_input) {
            throw Error("config: sample-n = " + std::to_string(c.sample_n) + " outside [1, " +
                        std::to_string(n_input) + "]");
        }
        if (c.kprime < 1 || c.kprime > n_input) {
            throw Error("config: kprime = " + std::to_string(c.kprime) + " outside [1, " + std::to_string(n_input) + "]");
        }
    }
    if (c.reduce == ReduceStage::tsne) {
        TsneConfig t;
        t.perplexity = c.perplexity;
        t.iterations = c.tsne_iterations;
        validate(t, c.order == StageOrder::sample_first ? n : n_input);
    }
    if (c.reduce == ReduceStage::spectral &&
        (c.spectral_r_min < 1 || c.spectral_r_min > c.spectral_r_max || c.spectral_r_max > n)) {
        throw Error("config: spectral-r range invalid for " + std::to_string(n) + " objects");
    }
    if (c.kernel_gamma && !(*c.kernel_gamma > 0.0)) throw Error("config: kernel-gamma must be positive");
    if (c.kp && (*c.kp < 1 || *c.kp > n)) {
        throw Error("config: kp = " + std::to_string(*c.kp) + " outside [1, " + std::to_string(n) + "]");
    }
    if (!c.kp && c.kmax < 2) throw Error("config: kmax must be >= 2");
    if (c.image_scale < 1) throw Error("config: image-scale must be >= 1");
}

class StageTimer {
public:
    explicit StageTimer(PipelineReport& report) : report_(report) {}

    template <typename F>
    auto run(const std::string& name, F&& body) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            if constexpr (std::is_void_v<std::invoke_result_t<F>>) {
                body();
                record(name, t0);
            } else {
                auto value = body();
                record(name, t0);
                return value;
            }
        } catch (const Error& e) {
            throw Error("stage " + name + ": " + e.what());
        }
    }

private:
    void record(const std::string& name, std::chrono::steady_clock::time_point t0) {
        const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        report_.set("stage_ms_" + name, format_number(ms));
    }
    PipelineReport& report_;
};

inline TsneConfig tsne_config(const PipelineConfig& c) {
    TsneConfig t;
    t.perplexity = c.perplexity;
    t.iterations = c.tsne_iterations;
    t.seed = stage_seed(c.seed, Stage::reduce);
    return t;
}

}  // namespace pipeline_detail

/// Point-wise reduction stage (t-SNE or random projection) as run by the
/// pipeline and the `reduce` subcommand.
inline Matrix reduce_points(const Matrix& x, const PipelineConfig& c) {
    switch (c.reduce) {
        case ReduceStage::tsne: return run_tsne(x, pipeline_detail::tsne_config(c)).embedding;
        case ReduceStage::random_projection: return random_project(x, c.target_dim, stage_seed(c.seed, Stage::reduce));
        case ReduceStage::none: return x;
        case ReduceStage::spectral: break;
    }
    throw Error("spectral reduction operates on a dissimilarity matrix, not on points");
}

/// MMRS stage as run by the pipeline and the `sample` subcommand.
inline MmrsResult sample_points(const Matrix& x, const PipelineConfig& c) {
    return mmrs_sample(x, c.metric, c.kprime, c.sample_n, stage_seed(c.seed, Stage::sample));
}

/// Dissimilarity stage including the optional kernel transform.
inline DissimilarityMatrix dissimilarity_stage(const Matrix& x, const PipelineConfig& c) {
    auto d = pairwise_dissimilarity(x, c.metric);
    if (c.kernel_gamma) d = rbf_kernel_transform(d, *c.kernel_gamma);
    return d;
}

inline ReorderedMatrix reorder_stage(const DissimilarityMatrix& d, Transform transform) {
    const auto ordering = vat_reorder(d);
    return transform == Transform::ivat ? ivat_transform(d, ordering) : vat_matrix(d, ordering);
}

inline ClusterEstimate cluster_stage(const VatOrdering& ordering, const PipelineConfig& c) {
    std::size_t k = 1;
    if (c.kp) k = *c.kp;
    else if (ordering.size() >= 2) k = estimate_k(ordering, c.kmax);
    return mst_cut_partition(ordering, k);
}

/// Runs load-independent stages on an in-memory data set:
/// [reduce] -> [sample] -> dissimilarity -> [kernel] -> vat -> [ivat] ->
/// k_p / partition -> [evaluate] (reduce and sample swap under sample-first).
inline PipelineResult run_pipeline(const PipelineConfig& c, const EmbeddingSet& input) {
    using namespace pipeline_detail;
    PipelineResult result;
    auto& report = result.report;
    StageTimer timer(report);
    validate(c, input.n_objects());

    Matrix x = input.data;
    std::vector<std::size_t> indices(input.n_objects());
    std::iota(indices.begin(), indices.end(), std::size_t{0});
    const bool point_reduce = c.reduce == ReduceStage::tsne || c.reduce == ReduceStage::random_projection;

    auto do_reduce = [&] { x = timer.run("reduce", [&] { return reduce_points(x, c); }); };
    auto do_sample = [&] {
        const auto mmrs = timer.run("sample", [&] { return sample_points(x, c); });
        x = select_rows(EmbeddingSet{x, std::nullopt}, mmrs.sample).data;
        indices = mmrs.sample;
    };
    if (c.order == StageOrder::reduce_first) {
        if (point_reduce) do_reduce();
        if (c.sample) do_sample();
    } else {
        if (c.sample) do_sample();
        if (point_reduce) do_reduce();
    }

    if (input.labels) {
        Labels truth;
        truth.reserve(indices.size());
        for (auto i : indices) truth.push_back((*input.labels)[i]);
        result.truth = relabel_contiguous(std::span<const int>(truth));
    }

    auto d = timer.run("dissimilarity", [&] { return dissimilarity_stage(x, c); });

    if (c.reduce == ReduceStage::spectral) {
        // Sweep r; keep the best partition accuracy when labels exist,
        // otherwise the smallest r.
        std::optional<std::size_t> best_r;
        double best_pa = -1.0;
        DissimilarityMatrix best_d;
        for (std::size_t r = c.spectral_r_min; r <= c.spectral_r_max; ++r) {
            SpectralConfig sc{r, c.spectral_gamma};
            auto embedded = timer.run("spectral_r" + std::to_string(r), [&] {
                return pairwise_dissimilarity(spectral_embed(d, sc), Metric::euclidean);
            });
            const auto reordered = reorder_stage(embedded, c.transform);
            const auto est = cluster_stage(reordered.ordering, c);
            report.set("sweep_r" + std::to_string(r) + "_kp", std::to_string(est.k_p));
            double pa = 0.0;
            if (result.truth) {
                pa = partition_accuracy(est.labels, *result.truth);
                report.set("sweep_r" + std::to_string(r) + "_pa", format_number(pa));
                report.set("sweep_r" + std::to_string(r) + "_nmi", format_number(nmi(est.labels, *result.truth)));
            }
            if (!best_r || pa > best_pa) {
                best_r = r;
                best_pa = pa;
                best_d = std::move(embedded);
            }
        }
        report.set("spectral_r", std::to_string(*best_r));
        d = std::move(best_d);
    }

    result.reordered = timer.run("reorder", [&] { return reorder_stage(d, c.transform); });
    result.estimate = timer.run("cluster", [&] { return cluster_stage(result.reordered.ordering, c); });
    result.analyzed_indices = std::move(indices);

    report.set("kp", std::to_string(result.estimate.k_p));
    if (result.truth) {
        timer.run("evaluate", [&] {
            report.set("pa", format_number(partition_accuracy(result.estimate.labels, *result.truth)));
            report.set("nmi", format_number(nmi(result.estimate.labels, *result.truth)));
        });
    }
    report.set("seed", std::to_string(c.seed));
    report.set("n_input", std::to_string(input.n_objects()));
    report.set("n_analyzed", std::to_string(result.analyzed_indices.size()));
    report.set("transform", c.transform == Transform::ivat ? "ivat" : "vat");
    report.set("metric", std::string(metric_name(c.metric)));
    return result;
}

/// Writes every output path set in the config.
inline void write_outputs(const PipelineConfig& c, const PipelineResult& result) {
    if (!c.out_image.empty()) render_rdi(result.reordered.values, c.out_image, c.image_scale);
    if (!c.out_labels.empty()) save_labels(c.out_labels, result.estimate.labels);
    if (!c.out_matrix.empty()) save_matrix(c.out_matrix, result.reordered.values, Format::dvm);
    if (!c.out_ordering.empty()) save_ordering(c.out_ordering, result.reordered.ordering);
    if (!c.out_indices.empty()) save_integers<std::size_t>(c.out_indices, result.analyzed_indices);
    if (!c.out_report.empty()) {
        std::ofstream out(c.out_report, std::ios::binary);
        if (!out) throw Error("cannot write '" + c.out_report + "'");
        out << result.report.text();
    }
}

/// File-driven pipeline: load, run every stage, write outputs.
inline PipelineResult run_pipeline(const PipelineConfig& c) {
    if (c.input.empty()) throw Error("config: no input path");
    PipelineReport load_times;
    pipeline_detail::StageTimer timer(load_times);
    auto input = timer.run("load", [&] {
        EmbeddingSet set = load_embeddings(c.input, c.format ? *c.format : format_from_path(c.input));
        if (!c.labels.empty()) {
            set.labels = load_labels(c.labels);
            if (set.labels->size() != set.n_objects()) {
                throw Error("labels file has " + std::to_string(set.labels->size()) + " entries for " +
                            std::to_string(set.n_objects()) + " objects");
            }
        }
        return set;
    });
    auto result = run_pipeline(c, input);
    result.report.entries.insert(result.report.entries.begin(), load_times.entries.begin(), load_times.entries.end());
    write_outputs(c, result);
    return result;
}

}  // namespace deepvat
