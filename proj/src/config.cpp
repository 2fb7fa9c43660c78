#include "cte/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace cte {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: bad boolean for key '" + key + "': " + v);
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        int r = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return r;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer for key '" + key + "': " + v);
    }
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double r = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return r;
    } catch (const std::exception&) {
        throw ConfigError("config: bad number for key '" + key + "': " + v);
    }
}

}  // namespace

void RunConfig::validate() const {
    if (encoder != "2d" && encoder != "3d")
        throw ConfigError("config: encoder must be '2d' or '3d'");
    enc2d.validate();
    enc3d.validate();
    if (limit < 0) throw ConfigError("config: limit must be >= 0");
    if (val_fraction < 0.0 || val_fraction >= 1.0)
        throw ConfigError("config: val_fraction must be in [0,1)");
}

RunConfig parse_run_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));

        if (key == "encoder") cfg.encoder = val;
        // 2D encoder
        else if (key == "tau_clu") cfg.enc2d.tau_clu = parse_double(key, val);
        else if (key == "time_steps") cfg.enc2d.time_steps = parse_int(key, val);
        else if (key == "mode") {
            if (val == "ttfs") cfg.enc2d.mode = EncodeMode::TTFS;
            else if (val == "burst") cfg.enc2d.mode = EncodeMode::Burst;
            else throw ConfigError("config: mode must be ttfs|burst, got '" + val + "'");
        }
        else if (key == "burst_max") cfg.enc2d.burst_max = parse_int(key, val);
        else if (key == "dt") cfg.enc2d.dt = parse_int(key, val);
        else if (key == "refrac") cfg.enc2d.refrac = parse_int(key, val);
        else if (key == "window") {
            if (val == "anchored") cfg.enc2d.window = WindowAnchor::Anchored;
            else if (val == "centered") cfg.enc2d.window = WindowAnchor::Centered;
            else throw ConfigError("config: window must be anchored|centered, got '" + val + "'");
        }
        else if (key == "k_components") cfg.enc2d.k_components = parse_int(key, val);
        else if (key == "remove_border") cfg.enc2d.remove_border = parse_bool(key, val);
        else if (key == "target_ratio") cfg.enc2d.target_ratio = parse_double(key, val);
        // 3D encoder
        else if (key == "t_bins") cfg.enc3d.t_bins = parse_int(key, val);
        else if (key == "k_t") cfg.enc3d.k_t = parse_int(key, val);
        else if (key == "k_h") cfg.enc3d.k_h = parse_int(key, val);
        else if (key == "k_w") cfg.enc3d.k_w = parse_int(key, val);
        else if (key == "tau_st") cfg.enc3d.tau_st = parse_double(key, val);
        else if (key == "merge_polarity") cfg.enc3d.merge_polarity = parse_bool(key, val);
        else if (key == "ablation") {
            if (val == "full") cfg.enc3d.ablation = Ablation3D::Full;
            else if (val == "no_st3d") cfg.enc3d.ablation = Ablation3D::NoST3D;
            else if (val == "spatial2d") cfg.enc3d.ablation = Ablation3D::SpatialOnly2D;
            else if (val == "per_frame") cfg.enc3d.ablation = Ablation3D::PerFrame2D;
            else throw ConfigError("config: unknown ablation '" + val + "'");
        }
        // training
        else if (key == "lr") cfg.train.lr = static_cast<float>(parse_double(key, val));
        else if (key == "weight_decay") cfg.train.weight_decay = static_cast<float>(parse_double(key, val));
        else if (key == "batch_size") cfg.train.batch_size = parse_int(key, val);
        else if (key == "epochs") cfg.train.epochs = parse_int(key, val);
        else if (key == "v_th") cfg.train.lif.v_th = static_cast<float>(parse_double(key, val));
        else if (key == "decay") cfg.train.lif.decay = static_cast<float>(parse_double(key, val));
        // datasets and files
        else if (key == "mnist_images") cfg.mnist_images = val;
        else if (key == "mnist_labels") cfg.mnist_labels = val;
        else if (key == "nmnist_dir") cfg.nmnist_dir = val;
        else if (key == "archive") cfg.archive = val;
        else if (key == "val_archive") cfg.val_archive = val;
        else if (key == "checkpoint") cfg.checkpoint = val;
        // run control
        else if (key == "limit") cfg.limit = parse_int(key, val);
        else if (key == "val_fraction") cfg.val_fraction = parse_double(key, val);
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(std::stoull(val));
        else if (key == "out_dir") cfg.out_dir = val;
        else throw ConfigError("config: unknown key '" + key + "'");
    }
    cfg.train.seed = cfg.seed;
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

}  // namespace cte
