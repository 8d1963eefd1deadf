// Command-line front end: the full pipeline (`run`) plus one subcommand per
// stage so intermediate artifacts can be produced and inspected separately.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "deepvat/deepvat.hpp"

namespace {

using namespace deepvat;

/// Pipeline keys registered on a subcommand, in registration order.
struct KeyOptions {
    std::vector<std::string> keys;
    std::map<std::string, std::string> values;

    void add(CLI::App* app, const std::string& key, const std::string& help) {
        keys.push_back(key);
        app->add_option("--" + key, values[key], help);
    }

    void apply(PipelineConfig& config) const {
        // A preset only supplies defaults, so it goes first.
        if (const auto it = values.find("preset"); it != values.end() && !it->second.empty()) {
            apply_setting(config, "preset", it->second);
        }
        for (const auto& key : keys) {
            if (key == "preset") continue;
            const auto& value = values.at(key);
            if (!value.empty()) apply_setting(config, key, value);
        }
    }
};

void add_stage_keys(CLI::App* app, KeyOptions& opts, const std::vector<std::string>& keys) {
    static const std::map<std::string, std::string> help = {
        {"input", "embedding matrix (csv or dvm)"},
        {"format", "input format: csv | dvm (default: from extension)"},
        {"labels", "ground-truth label file"},
        {"metric", "euclidean | cosine"},
        {"reduce", "none | tsne | random_projection | spectral"},
        {"order", "reduce-first | sample-first"},
        {"perplexity", "t-SNE perplexity"},
        {"tsne-iterations", "t-SNE iterations"},
        {"target-dim", "random projection dimension"},
        {"spectral-r", "spectral eigenvector count, or a range a-b to sweep"},
        {"spectral-gamma", "spectral affinity gamma (default: median heuristic)"},
        {"sample", "mmrs | none"},
        {"kprime", "number of maximin prototypes"},
        {"sample-n", "target sample size"},
        {"kernel-gamma", "RBF kernel gamma applied to the dissimilarities"},
        {"transform", "vat | ivat"},
        {"kp", "auto | <int>"},
        {"kmax", "largest k considered by the estimator"},
        {"seed", "master seed"},
        {"out-image", "RDI output (binary PGM)"},
        {"image-scale", "pixel replication factor"},
        {"out-labels", "predicted label output"},
        {"out-report", "key=value report output"},
        {"out-matrix", "reordered matrix output (dvm)"},
        {"out-ordering", "VAT ordering output"},
        {"out-indices", "indices of the analysed rows"},
        {"preset", "deepvat | deepvat-minus-tsne | deepvat-minus-simclr | deepvat-minus-tsne-minus-simclr | "
                   "fensivat | kernelvat | specvat | ivat"},
    };
    for (const auto& key : keys) opts.add(app, key, help.at(key));
}

EmbeddingSet load_input(const PipelineConfig& config) {
    if (config.input.empty()) throw Error("--input is required");
    auto set = load_embeddings(config.input, config.format ? *config.format : format_from_path(config.input));
    if (!config.labels.empty()) set.labels = load_labels(config.labels);
    return set;
}

void write_matrix(const std::string& path, const Matrix& m) { save_matrix(path, m, format_from_path(path)); }

std::string format_metric(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cluster tendency assessment with VAT/iVAT over precomputed embeddings"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "full pipeline");
    std::string config_path;
    run->add_option("--config", config_path, "key=value config file (flags win)");
    KeyOptions run_opts;
    add_stage_keys(run, run_opts,
                   {"preset", "input", "format", "labels", "metric", "reduce", "order", "perplexity", "tsne-iterations",
                    "target-dim", "spectral-r", "spectral-gamma", "sample", "kprime", "sample-n", "kernel-gamma",
                    "transform", "kp", "kmax", "seed", "out-image", "image-scale", "out-labels", "out-report",
                    "out-matrix", "out-ordering", "out-indices"});
    run->callback([&] {
        PipelineConfig config;
        if (const auto& preset = run_opts.values["preset"]; !preset.empty()) apply_setting(config, "preset", preset);
        if (!config_path.empty()) {
            for (const auto& [k, v] : parse_config_text(detail::read_file(config_path))) apply_setting(config, k, v);
        }
        KeyOptions flags = run_opts;
        flags.values["preset"].clear();
        flags.apply(config);
        const auto result = run_pipeline(config);
        std::cout << result.report.text();
    });

    // generate
    auto* gen = app.add_subcommand("generate", "synthetic well-separated Gaussian mixture");
    MixtureSpec spec;
    std::string gen_out, gen_labels;
    gen->add_option("--k", spec.k, "components")->capture_default_str();
    gen->add_option("--dims", spec.dims, "dimension")->capture_default_str();
    gen->add_option("--n-per", spec.n_per, "objects per component")->capture_default_str();
    gen->add_option("--separation", spec.separation, "center spacing")->capture_default_str();
    gen->add_option("--seed", spec.seed, "seed")->capture_default_str();
    gen->add_option("--out", gen_out, "matrix output (csv or dvm)")->required();
    gen->add_option("--out-labels", gen_labels, "label output");
    gen->callback([&] {
        const auto set = generate_gaussian_mixture(spec);
        write_matrix(gen_out, set.data);
        if (!gen_labels.empty()) save_labels(gen_labels, *set.labels);
    });

    // dissim
    auto* dis = app.add_subcommand("dissim", "pairwise dissimilarity matrix");
    KeyOptions dis_opts;
    add_stage_keys(dis, dis_opts, {"input", "format", "metric", "kernel-gamma"});
    std::string dis_out;
    dis->add_option("--out", dis_out, "dissimilarity output (dvm)")->required();
    dis->callback([&] {
        PipelineConfig config;
        dis_opts.apply(config);
        save_matrix(dis_out, dissimilarity_stage(load_input(config).data, config).values, Format::dvm);
    });

    // reduce
    auto* red = app.add_subcommand("reduce", "dimensionality reduction");
    KeyOptions red_opts;
    add_stage_keys(red, red_opts,
                   {"input", "format", "reduce", "metric", "perplexity", "tsne-iterations", "target-dim", "spectral-r",
                    "spectral-gamma", "seed"});
    std::string red_out;
    red->add_option("--out", red_out, "reduced embedding output")->required();
    red->callback([&] {
        PipelineConfig config;
        red_opts.apply(config);
        const auto set = load_input(config);
        if (config.reduce == ReduceStage::spectral) {
            if (config.spectral_r_min != config.spectral_r_max) throw Error("reduce: spectral-r must be a single value");
            const auto d = pairwise_dissimilarity(set.data, config.metric);
            write_matrix(red_out, spectral_embed(d, SpectralConfig{config.spectral_r_min, config.spectral_gamma}));
        } else {
            write_matrix(red_out, reduce_points(set.data, config));
        }
    });

    // sample
    auto* smp = app.add_subcommand("sample", "maximin and random sampling");
    KeyOptions smp_opts;
    add_stage_keys(smp, smp_opts, {"input", "format", "labels", "metric", "kprime", "sample-n", "seed", "out-indices",
                                   "out-labels"});
    std::string smp_out;
    smp->add_option("--out", smp_out, "sampled rows output")->required();
    smp->callback([&] {
        PipelineConfig config;
        smp_opts.apply(config);
        const auto set = load_input(config);
        const auto mmrs = sample_points(set.data, config);
        const auto sub = select_rows(set, mmrs.sample);
        write_matrix(smp_out, sub.data);
        if (!config.out_indices.empty()) save_integers<std::size_t>(config.out_indices, mmrs.sample);
        if (!config.out_labels.empty()) {
            if (!sub.labels) throw Error("sample: --out-labels needs --labels");
            save_labels(config.out_labels, *sub.labels);
        }
    });

    // vat / ivat
    auto add_reorder = [&](const std::string& name, Transform transform) {
        auto* cmd = app.add_subcommand(name, name == "vat" ? "VAT reordering" : "iVAT minimax transform");
        auto opts = std::make_shared<KeyOptions>();
        add_stage_keys(cmd, *opts, {"input", "format", "metric", "kernel-gamma", "out-ordering", "out-image",
                                    "image-scale"});
        auto dissim_in = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        cmd->add_option("--dissim", *dissim_in, "precomputed dissimilarity matrix (dvm) instead of --input");
        cmd->add_option("--out", *out, "reordered matrix output (dvm)");
        cmd->callback([=] {
            PipelineConfig config;
            opts->apply(config);
            DissimilarityMatrix d;
            if (!dissim_in->empty()) {
                d = as_dissimilarity(load_matrix(*dissim_in, Format::dvm));
                if (config.kernel_gamma) d = rbf_kernel_transform(d, *config.kernel_gamma);
            } else {
                d = dissimilarity_stage(load_input(config).data, config);
            }
            const auto m = reorder_stage(d, transform);
            if (!out->empty()) save_matrix(*out, m.values, Format::dvm);
            if (!config.out_ordering.empty()) save_ordering(config.out_ordering, m.ordering);
            if (!config.out_image.empty()) render_rdi(m.values, config.out_image, config.image_scale);
        });
    };
    add_reorder("vat", Transform::vat);
    add_reorder("ivat", Transform::ivat);

    // estimate
    auto* est = app.add_subcommand("estimate", "estimate k_p from a VAT ordering");
    std::string est_ordering;
    std::size_t est_kmax = kDefaultKMax;
    est->add_option("--ordering", est_ordering, "ordering file")->required();
    est->add_option("--kmax", est_kmax, "largest k considered")->capture_default_str();
    est->callback([&] { std::cout << "kp=" << estimate_k(load_ordering(est_ordering), est_kmax) << "\n"; });

    // cluster
    auto* clu = app.add_subcommand("cluster", "MST-cut partition from a VAT ordering");
    std::string clu_ordering, clu_out;
    KeyOptions clu_opts;
    clu->add_option("--ordering", clu_ordering, "ordering file")->required();
    add_stage_keys(clu, clu_opts, {"kp", "kmax"});
    clu->add_option("--out", clu_out, "label output")->required();
    clu->callback([&] {
        PipelineConfig config;
        clu_opts.apply(config);
        const auto ordering = load_ordering(clu_ordering);
        if (config.kp && *config.kp > ordering.size()) throw Error("cluster: kp exceeds object count");
        const auto estimate = cluster_stage(ordering, config);
        save_labels(clu_out, estimate.labels);
        std::cout << "kp=" << estimate.k_p << "\n";
    });

    // eval
    auto* ev = app.add_subcommand("eval", "partition accuracy and NMI");
    std::string pred_path, truth_path;
    ev->add_option("--pred", pred_path, "predicted labels")->required();
    ev->add_option("--truth", truth_path, "ground-truth labels")->required();
    ev->callback([&] {
        const auto pred = load_labels(pred_path);
        const auto truth = load_labels(truth_path);
        std::cout << "pa=" << format_metric(partition_accuracy(pred, truth))
                  << " nmi=" << format_metric(nmi(pred, truth)) << "\n";
    });

    // render
    auto* ren = app.add_subcommand("render", "render a matrix as a P5 graymap");
    std::string ren_in, ren_out;
    std::size_t ren_scale = 1;
    ren->add_option("--in", ren_in, "matrix (csv or dvm)")->required();
    ren->add_option("--out", ren_out, "PGM output")->required();
    ren->add_option("--scale", ren_scale, "pixel replication factor")->capture_default_str();
    ren->callback([&] { render_rdi(load_matrix(ren_in, format_from_path(ren_in)), ren_out, ren_scale); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
