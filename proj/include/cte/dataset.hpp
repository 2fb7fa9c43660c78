#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cte/config.hpp"
#include "cte/core_types.hpp"
#include "cte/ingest.hpp"

namespace cte {

struct MnistData {
    std::vector<Frame> frames;
    std::vector<std::uint8_t> labels;
};

MnistData load_mnist(const std::string& images_path, const std::string& labels_path,
                     int limit = 0);

struct NmnistData {
    std::vector<EventStream> streams;  // cropped to 28×28
    std::vector<std::uint8_t> labels;
};

// Expects a split directory with class subdirectories "0".."9" holding
// per-sample .bin files. Files are visited in sorted order per class,
// classes interleaved round-robin so a limit still samples every digit.
NmnistData load_nmnist(const std::string& split_dir, int limit = 0);

// Batch encoding over a worker pool; order of results matches inputs.
SpikeArchive encode_mnist(const MnistData& data, const Encoder2DConfig& cfg,
                          const Encode2DAblation& ablation = {});
SpikeArchive encode_nmnist(const NmnistData& data, const Encoder3DConfig& cfg);

}  // namespace cte
