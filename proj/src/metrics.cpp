#include "cte/metrics.hpp"

#include <algorithm>
#include <sstream>

namespace cte {

std::optional<double> flicker_rate(const SpikeTensor& tensor) {
    if (tensor.t_bins < 3) return std::nullopt;
    std::size_t interior = 0, isolated = 0;
    for (int c = 0; c < tensor.channels; ++c)
        for (int t = 1; t < tensor.t_bins - 1; ++t)
            for (int y = 0; y < tensor.height; ++y)
                for (int x = 0; x < tensor.width; ++x) {
                    if (!tensor.at(c, t, y, x)) continue;
                    ++interior;
                    if (!tensor.at(c, t - 1, y, x) && !tensor.at(c, t + 1, y, x)) ++isolated;
                }
    if (interior == 0) return std::nullopt;
    return static_cast<double>(isolated) / static_cast<double>(interior);
}

EncodingReport spike_stats(std::span<const SpikeTensor> tensors) {
    if (tensors.empty()) throw DimensionError("spike_stats: empty batch");
    EncodingReport r;
    r.samples = tensors.size();
    std::vector<std::size_t> counts;
    counts.reserve(tensors.size());
    std::size_t total = 0, cells = 0;
    double flick_sum = 0.0;
    std::size_t flick_n = 0;
    for (const auto& t : tensors) {
        const std::size_t n = t.count();
        counts.push_back(n);
        total += n;
        cells += t.cells();
        if (auto f = flicker_rate(t)) {
            flick_sum += *f;
            ++flick_n;
        }
    }
    std::sort(counts.begin(), counts.end());
    r.min_spikes = counts.front();
    r.max_spikes = counts.back();
    r.mean_spikes = static_cast<double>(total) / tensors.size();
    const std::size_t mid = counts.size() / 2;
    r.median_spikes = counts.size() % 2 ? static_cast<double>(counts[mid])
                                        : 0.5 * (counts[mid - 1] + counts[mid]);
    r.sparsity = cells ? static_cast<double>(total) / cells : 0.0;
    if (flick_n) r.flicker = flick_sum / flick_n;
    return r;
}

std::string report_csv(std::span<const SpikeTensor> tensors) {
    std::ostringstream out;
    out << "sample,spikes,sparsity,flicker\n";
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        const auto& t = tensors[i];
        out << i << ',' << t.count() << ','
            << (t.cells() ? static_cast<double>(t.count()) / t.cells() : 0.0) << ',';
        if (auto f = flicker_rate(t)) out << *f;
        out << '\n';
    }
    auto agg = spike_stats(tensors);
    out << "aggregate," << agg.mean_spikes << ',' << agg.sparsity << ',';
    if (agg.flicker) out << *agg.flicker;
    out << '\n';
    return out.str();
}

}  // namespace cte
