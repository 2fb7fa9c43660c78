#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cte/config.hpp"
#include "cte/dataset.hpp"
#include "cte/encode2d.hpp"
#include "cte/encode3d.hpp"
#include "cte/ingest.hpp"
#include "cte/metrics.hpp"
#include "cte/snn.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitIo = 2;
constexpr int kExitConfig = 3;
constexpr int kExitDivergence = 4;

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    int jobs = 0;
    std::string out;
};

void apply_jobs(int jobs) {
#ifdef _OPENMP
    if (jobs > 0) omp_set_num_threads(jobs);
#else
    (void)jobs;
#endif
}

cte::RunConfig load_config(const CommonOpts& opts) {
    if (opts.config_path.empty()) throw cte::ConfigError("missing --config");
    auto cfg = cte::load_run_config(opts.config_path);
    if (opts.seed) {
        cfg.seed = *opts.seed;
        cfg.train.seed = *opts.seed;
    }
    if (!opts.out.empty()) cfg.out_dir = opts.out;
    return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

cte::SpikeArchive encode_with_config(const cte::RunConfig& cfg,
                                     const cte::Encode2DAblation& ab2 = {},
                                     std::optional<cte::Ablation3D> ab3 = {}) {
    if (cfg.encoder == "2d") {
        if (cfg.mnist_images.empty() || cfg.mnist_labels.empty())
            throw cte::ConfigError("2d encoder needs mnist_images and mnist_labels");
        auto data = cte::load_mnist(cfg.mnist_images, cfg.mnist_labels, cfg.limit);
        return cte::encode_mnist(data, cfg.enc2d, ab2);
    }
    if (cfg.nmnist_dir.empty()) throw cte::ConfigError("3d encoder needs nmnist_dir");
    auto data = cte::load_nmnist(cfg.nmnist_dir, cfg.limit);
    auto enc = cfg.enc3d;
    if (ab3) enc.ablation = *ab3;
    return cte::encode_nmnist(data, enc);
}

int cmd_encode(const CommonOpts& opts) {
    auto cfg = load_config(opts);
    auto archive = encode_with_config(cfg);
    fs::create_directories(cfg.out_dir);
    cte::write_file(fs::path(cfg.out_dir) / "spikes.ctp", cte::write_spike_archive(archive));
    write_text(fs::path(cfg.out_dir) / "report.csv", cte::report_csv(archive.tensors));
    auto stats = cte::spike_stats(archive.tensors);
    std::cout << "encoded " << stats.samples << " samples, mean spikes " << stats.mean_spikes
              << ", sparsity " << stats.sparsity << "\n";
    return 0;
}

std::string metrics_csv(const std::vector<cte::EpochMetrics>& metrics, double mean_spikes) {
    std::ostringstream out;
    out << "epoch,train_loss,train_acc,val_acc,mean_spikes\n";
    for (const auto& m : metrics)
        out << m.epoch << ',' << m.train_loss << ',' << m.train_acc << ',' << m.val_acc << ','
            << mean_spikes << '\n';
    return out.str();
}

int cmd_train(const CommonOpts& opts) {
    auto cfg = load_config(opts);
    cte::SpikeArchive data;
    if (!cfg.archive.empty())
        data = cte::read_spike_archive(cte::read_file(cfg.archive));
    else
        data = encode_with_config(cfg);
    if (data.tensors.empty()) throw std::runtime_error("train: no samples");

    std::size_t n_train = data.tensors.size();
    cte::SpikeArchive val;
    if (!cfg.val_archive.empty()) {
        val = cte::read_spike_archive(cte::read_file(cfg.val_archive));
    } else if (cfg.val_fraction > 0.0) {
        n_train = data.tensors.size() -
                  static_cast<std::size_t>(cfg.val_fraction * data.tensors.size());
        val.tensors.assign(data.tensors.begin() + n_train, data.tensors.end());
        val.labels.assign(data.labels.begin() + n_train, data.labels.end());
    }

    cte::NetworkShape shape;
    shape.in_channels = data.tensors.front().channels;
    shape.height = data.tensors.front().height;
    shape.width = data.tensors.front().width;

    auto result = cte::train({data.tensors.data(), n_train}, {data.labels.data(), n_train},
                             val.tensors, val.labels, shape, cfg.train);

    fs::create_directories(cfg.out_dir);
    cte::write_file(fs::path(cfg.out_dir) / "checkpoint.ctn",
                    cte::write_checkpoint(result.params, cfg.train.lif));
    const double mean_spikes =
        cte::spike_stats({data.tensors.data(), n_train}).mean_spikes;
    write_text(fs::path(cfg.out_dir) / "metrics.csv", metrics_csv(result.metrics, mean_spikes));
    if (!result.metrics.empty()) {
        const auto& last = result.metrics.back();
        std::cout << "epoch " << last.epoch << ": train_acc " << last.train_acc << ", val_acc "
                  << last.val_acc << "\n";
    }
    return 0;
}

int cmd_eval(const CommonOpts& opts) {
    auto cfg = load_config(opts);
    if (cfg.checkpoint.empty()) throw cte::ConfigError("eval needs checkpoint");
    auto ck = cte::read_checkpoint(cte::read_file(cfg.checkpoint));
    cte::SpikeArchive data;
    if (!cfg.archive.empty())
        data = cte::read_spike_archive(cte::read_file(cfg.archive));
    else
        data = encode_with_config(cfg);
    auto r = cte::evaluate(ck.params, data.tensors, data.labels, ck.lif);
    std::cout << "accuracy " << r.accuracy << ", mean spikes " << r.mean_spikes << "\n";
    return 0;
}

int cmd_ablate(const CommonOpts& opts, const std::vector<std::string>& variants) {
    auto cfg = load_config(opts);
    std::ostringstream table;
    table << "variant,samples,mean_spikes,sparsity,flicker\n";
    for (const auto& name : variants) {
        cte::Encode2DAblation ab2;
        std::optional<cte::Ablation3D> ab3;
        if (name == "default" || name == "full") {
            // base config as-is
        } else if (name == "no_cc") {
            ab2.no_cc = true;
        } else if (name == "no_cluster") {
            ab2.no_cluster = true;
        } else if (name == "per_frame") {
            ab3 = cte::Ablation3D::PerFrame2D;
        } else if (name == "no_st3d") {
            ab3 = cte::Ablation3D::NoST3D;
        } else if (name == "spatial2d") {
            ab3 = cte::Ablation3D::SpatialOnly2D;
        } else {
            throw cte::ConfigError("unknown ablation variant '" + name + "'");
        }
        if ((ab2.no_cc || ab2.no_cluster) && cfg.encoder != "2d")
            throw cte::ConfigError("variant '" + name + "' applies to the 2d encoder");
        if (ab3 && cfg.encoder != "3d")
            throw cte::ConfigError("variant '" + name + "' applies to the 3d encoder");

        auto archive = encode_with_config(cfg, ab2, ab3);
        auto stats = cte::spike_stats(archive.tensors);
        table << name << ',' << stats.samples << ',' << stats.mean_spikes << ','
              << stats.sparsity << ',';
        if (stats.flicker) table << *stats.flicker;
        table << '\n';
    }
    fs::create_directories(cfg.out_dir);
    write_text(fs::path(cfg.out_dir) / "ablation.csv", table.str());
    std::cout << table.str();
    return 0;
}

int cmd_render(const std::string& in_path, const std::string& out_dir) {
    auto tensor = cte::read_spike_file(cte::read_file(in_path));
    fs::create_directories(out_dir);
    for (int t = 0; t < tensor.t_bins; ++t) {
        std::ostringstream pgm;
        pgm << "P5\n" << tensor.width << ' ' << tensor.height << "\n255\n";
        std::string body(static_cast<std::size_t>(tensor.height) * tensor.width, '\0');
        for (int y = 0; y < tensor.height; ++y)
            for (int x = 0; x < tensor.width; ++x) {
                int v = 0;
                for (int c = 0; c < tensor.channels; ++c)
                    if (tensor.at(c, t, y, x)) v = 255;  // channel-summed, clipped
                body[static_cast<std::size_t>(y) * tensor.width + x] = static_cast<char>(v);
            }
        pgm << body;
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%03d.pgm", t);
        const std::string text = pgm.str();
        cte::write_file(fs::path(out_dir) / name,
                        {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
    }
    std::cout << "wrote " << tensor.t_bins << " frames to " << out_dir << "\n";
    return 0;
}

int cmd_stats(const std::string& in_path, const std::string& out_path) {
    auto bytes = cte::read_file(in_path);
    std::vector<cte::SpikeTensor> tensors;
    if (bytes.size() >= 4 && bytes[0] == 'C' && bytes[1] == 'T' && bytes[2] == 'P') {
        tensors = cte::read_spike_archive(bytes).tensors;
    } else {
        tensors.push_back(cte::read_spike_file(bytes));
    }
    auto csv = cte::report_csv(tensors);
    if (out_path.empty())
        std::cout << csv;
    else
        write_text(out_path, csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cluster-triggered spike encoding toolkit"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::vector<std::string> variants;
    std::string in_path, out_path;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* c = cmd->add_option("--config", opts.config_path, "run configuration file");
        if (needs_config) c->required();
        cmd->add_option("--seed", [&opts](const std::vector<std::string>& v) {
            opts.seed = std::stoull(v[0]);
            return true;
        }, "override config seed");
        cmd->add_option("--jobs", opts.jobs, "worker pool size (0 = all cores)");
        cmd->add_option("--out", opts.out, "output directory override");
    };

    auto* encode = app.add_subcommand("encode", "encode a dataset into spike tensors");
    add_common(encode, true);
    auto* train = app.add_subcommand("train", "train the classifier on encoded spikes");
    add_common(train, true);
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
    add_common(eval, true);
    auto* ablate = app.add_subcommand("ablate", "encode a variant set and tabulate stats");
    add_common(ablate, true);
    ablate->add_option("--variants", variants, "comma-separated variant names")
        ->delimiter(',')
        ->required();
    auto* render = app.add_subcommand("render", "render a CTE1 file as per-bin PGM images");
    render->add_option("--in", in_path, "CTE1 spike file")->required();
    render->add_option("--out", out_path, "output directory")->required();
    auto* stats = app.add_subcommand("stats", "spike statistics for a CTE1/CTP1 file");
    stats->add_option("--in", in_path, "spike file or archive")->required();
    stats->add_option("--out", out_path, "CSV output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;  // flag mistakes are config errors
    }
    apply_jobs(opts.jobs);

    try {
        if (encode->parsed()) return cmd_encode(opts);
        if (train->parsed()) return cmd_train(opts);
        if (eval->parsed()) return cmd_eval(opts);
        if (ablate->parsed()) return cmd_ablate(opts, variants);
        if (render->parsed()) return cmd_render(in_path, out_path);
        if (stats->parsed()) return cmd_stats(in_path, out_path);
    } catch (const cte::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const cte::DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return 0;
}
