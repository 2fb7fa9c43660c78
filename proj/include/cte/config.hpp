#pragma once

#include <string>

#include "cte/encode2d.hpp"
#include "cte/encode3d.hpp"
#include "cte/snn.hpp"

namespace cte {

// Flat key=value run configuration. Unknown keys are errors so a typo
// cannot silently fall back to a default mid-ablation.
struct RunConfig {
    std::string encoder = "2d";  // "2d" | "3d"
    Encoder2DConfig enc2d;
    Encoder3DConfig enc3d;
    TrainConfig train;

    // dataset inputs
    std::string mnist_images;
    std::string mnist_labels;
    std::string nmnist_dir;      // split directory with class subdirs 0..9

    // pre-encoded inputs / outputs
    std::string archive;         // CTP1 file for train/eval
    std::string val_archive;
    std::string checkpoint;

    int limit = 0;               // 0 = no cap on samples
    double val_fraction = 0.0;   // tail fraction of the archive held out
    std::uint64_t seed = 0;
    std::string out_dir = ".";

    void validate() const;
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

}  // namespace cte
