#include "cte/dataset.hpp"

#include <algorithm>
#include <filesystem>

namespace cte {

namespace fs = std::filesystem;

MnistData load_mnist(const std::string& images_path, const std::string& labels_path, int limit) {
    MnistData out;
    out.frames = read_idx_images(read_file(images_path));
    out.labels = read_idx_labels(read_file(labels_path));
    if (out.frames.size() != out.labels.size())
        throw DataError("mnist: image/label count mismatch");
    if (limit > 0 && out.frames.size() > static_cast<std::size_t>(limit)) {
        out.frames.resize(limit);
        out.labels.resize(limit);
    }
    return out;
}

NmnistData load_nmnist(const std::string& split_dir, int limit) {
    std::vector<std::vector<fs::path>> per_class(10);
    for (int c = 0; c < 10; ++c) {
        fs::path dir = fs::path(split_dir) / std::to_string(c);
        if (!fs::is_directory(dir)) continue;
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_regular_file() && entry.path().extension() == ".bin")
                per_class[c].push_back(entry.path());
        std::sort(per_class[c].begin(), per_class[c].end());
    }

    std::vector<std::pair<fs::path, std::uint8_t>> files;
    for (std::size_t i = 0;; ++i) {  // round-robin over classes
        bool any = false;
        for (int c = 0; c < 10; ++c)
            if (i < per_class[c].size()) {
                files.emplace_back(per_class[c][i], static_cast<std::uint8_t>(c));
                any = true;
            }
        if (!any) break;
    }
    if (files.empty()) throw std::runtime_error("nmnist: no .bin files under " + split_dir);
    if (limit > 0 && files.size() > static_cast<std::size_t>(limit)) files.resize(limit);

    NmnistData out;
    out.streams.resize(files.size());
    out.labels.resize(files.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < files.size(); ++i) {
        out.streams[i] = crop_events(read_nmnist_events(read_file(files[i].first)));
        out.labels[i] = files[i].second;
    }
    return out;
}

SpikeArchive encode_mnist(const MnistData& data, const Encoder2DConfig& cfg,
                          const Encode2DAblation& ablation) {
    SpikeArchive out;
    out.tensors.resize(data.frames.size());
    out.labels = data.labels;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < data.frames.size(); ++i)
        out.tensors[i] = encode2d_pipeline(data.frames[i], cfg, ablation).spikes;
    return out;
}

SpikeArchive encode_nmnist(const NmnistData& data, const Encoder3DConfig& cfg) {
    SpikeArchive out;
    out.tensors.resize(data.streams.size());
    out.labels = data.labels;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < data.streams.size(); ++i)
        out.tensors[i] = encode3d_pipeline(data.streams[i], cfg, 28, 28);
    return out;
}

}  // namespace cte
