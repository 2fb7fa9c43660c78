#pragma once

#include "cte/core_types.hpp"
#include "cte/preprocess.hpp"

namespace cte {

enum class EncodeMode { TTFS, Burst };
enum class WindowAnchor { Anchored, Centered };

struct Encoder2DConfig {
    double tau_clu = 0.25;     // density threshold
    int time_steps = 12;       // T
    EncodeMode mode = EncodeMode::TTFS;
    int burst_max = 4;         // M
    int dt = 1;
    int refrac = 1;            // burst interval = dt + refrac
    WindowAnchor window = WindowAnchor::Anchored;
    int k_components = 2;
    bool remove_border = false;
    double target_ratio = 0.15;

    void validate() const;
};

struct Encode2DAblation {
    bool no_cc = false;        // skip connected component filtering
    bool no_cluster = false;   // skip density masking, trigger == B'
};

// 4x4 window counts for the configured anchor. Anchored windows extend
// forward (+i,+j); centered windows cover offsets [-2,1].
std::vector<int> window_counts_2d(const BinaryMask& mask, WindowAnchor anchor);

// d(y,x) = count/16 on foreground pixels, exactly 0 on background.
DensityMap2D density_2d(const BinaryMask& foreground,
                        WindowAnchor anchor = WindowAnchor::Anchored);

// Trigger: foreground and window count >= ceil(tau_clu * 16). The density
// map carries exact k/16 values so the count is recoverable bit-stably.
BinaryMask cluster_trigger(const BinaryMask& foreground, const DensityMap2D& density,
                           double tau_clu);

// One spike per triggered pixel at t = floor((1 - d) * (T - 1)).
SpikeTensor encode_ttfs(const DensityMap2D& density, const BinaryMask& trigger, int time_steps);

// floor(M*d) spikes per triggered pixel at t = 0, dt+refrac, 2(dt+refrac), ...
// Spikes that land at t >= T are dropped.
SpikeTensor encode_burst(const DensityMap2D& density, const BinaryMask& trigger,
                         const Encoder2DConfig& cfg);

struct Encode2DResult {
    SpikeTensor spikes;
    bool degenerate = false;   // constant input, empty encoding
};

// binarize -> components -> density -> trigger -> TTFS/burst.
Encode2DResult encode2d_pipeline(const Frame& frame, const Encoder2DConfig& cfg,
                                 const Encode2DAblation& ablation = {});

}  // namespace cte
