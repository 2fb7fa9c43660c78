#pragma once

#include "cte/core_types.hpp"

namespace cte {

enum class Polarity { Dark, Light };

struct PolarityChoice {
    Polarity polarity = Polarity::Light;
    double chosen_ratio = 0.0;   // mean of the selected mask
    bool degenerate = false;     // constant input, both candidate masks empty
};

struct OtsuResult {
    int threshold = 0;
    bool degenerate = false;     // single-intensity image
};

// Maximizes the between-class variance w0*w1*(mu0-mu1)^2 over the 256-bin
// histogram; classes are {v < t} and {v >= t}. Smallest maximizing t wins.
// A constant image returns its value with the degenerate flag set.
OtsuResult otsu_threshold(const Frame& frame);

struct BinarizeResult {
    BinaryMask mask;
    PolarityChoice choice;
};

// Builds B_dark = [I < T] and B_light = [I > T] and keeps whichever
// foreground ratio lands closer to target_ratio. Ties pick Light.
BinarizeResult binarize_with_polarity(const Frame& frame, double target_ratio = 0.15);

// 8-connected labeling via two-pass union-find. Component ids are assigned
// in raster order of each component's first pixel, matching flood fill.
ComponentLabeling label_components(const BinaryMask& mask);

// Keeps the K largest components by area (ties: smaller id). With
// remove_border, components touching the image border are dropped first.
BinaryMask filter_components(const ComponentLabeling& labeling, int k, bool remove_border);

}  // namespace cte
