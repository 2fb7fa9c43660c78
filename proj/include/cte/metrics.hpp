#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cte/core_types.hpp"

namespace cte {

struct EncodingReport {
    double mean_spikes = 0.0;
    double median_spikes = 0.0;
    std::size_t min_spikes = 0;
    std::size_t max_spikes = 0;
    double sparsity = 0.0;          // spikes / total cells
    std::optional<double> flicker;  // artifact metric; absent when T < 3
    std::size_t samples = 0;
};

EncodingReport spike_stats(std::span<const SpikeTensor> tensors);

// Artifact metric, not from any publication: the fraction of interior-time
// spikes (t in [1, T-2]) with no spike at the same (c,y,x) in bin t-1 or
// t+1. Lower means temporally smoother. Undefined for T < 3 or when there
// are no interior spikes.
std::optional<double> flicker_rate(const SpikeTensor& tensor);

// One row per sample (sample,spikes,sparsity,flicker) plus an aggregate row.
std::string report_csv(std::span<const SpikeTensor> tensors);

}  // namespace cte
