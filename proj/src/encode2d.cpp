#include "cte/encode2d.hpp"

#include <cmath>

namespace cte {

void Encoder2DConfig::validate() const {
    if (tau_clu < 0.0 || tau_clu > 1.0) throw ConfigError("tau_clu must be in [0,1]");
    if (time_steps < 2) throw ConfigError("time_steps must be >= 2");
    if (burst_max < 1) throw ConfigError("burst_max must be >= 1");
    if (dt < 1) throw ConfigError("dt must be >= 1");
    if (refrac < 0) throw ConfigError("refrac must be >= 0");
    if (k_components < 1) throw ConfigError("k_components must be >= 1");
    if (target_ratio <= 0.0 || target_ratio >= 1.0) throw ConfigError("target_ratio must be in (0,1)");
}

std::vector<int> window_counts_2d(const BinaryMask& mask, WindowAnchor anchor) {
    if (anchor == WindowAnchor::Anchored) return box_sum_2d(mask);
    // Centered: offsets [-2,1] in both axes, i.e. the anchored window of the
    // mask shifted by (+2,+2). Reindex instead of recomputing.
    const int h = mask.height, w = mask.width;
    std::vector<int> out(static_cast<std::size_t>(h) * w, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            int s = 0;
            for (int i = -2; i <= 1; ++i)
                for (int j = -2; j <= 1; ++j) {
                    int yy = y + i, xx = x + j;
                    if (yy >= 0 && yy < h && xx >= 0 && xx < w) s += mask.at(yy, xx);
                }
            out[static_cast<std::size_t>(y) * w + x] = s;
        }
    return out;
}

DensityMap2D density_2d(const BinaryMask& foreground, WindowAnchor anchor) {
    auto counts = window_counts_2d(foreground, anchor);
    std::vector<float> d(counts.size(), 0.0f);
    for (std::size_t i = 0; i < counts.size(); ++i)
        if (foreground.data[i]) d[i] = static_cast<float>(counts[i]) / 16.0f;
    return DensityMap2D(foreground.height, foreground.width, std::move(d));
}

BinaryMask cluster_trigger(const BinaryMask& foreground, const DensityMap2D& density,
                           double tau_clu) {
    if (foreground.height != density.height || foreground.width != density.width)
        throw DimensionError("cluster_trigger: shape mismatch");
    // integer comparison: k/16 >= tau  <=>  k >= ceil(tau*16)
    const int min_count = static_cast<int>(std::ceil(tau_clu * 16.0 - 1e-12));
    std::vector<std::uint8_t> out(foreground.data.size(), 0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int k = static_cast<int>(std::lround(density.data[i] * 16.0f));
        out[i] = (foreground.data[i] && k >= min_count) ? 1 : 0;
    }
    return BinaryMask(foreground.height, foreground.width, std::move(out));
}

SpikeTensor encode_ttfs(const DensityMap2D& density, const BinaryMask& trigger, int time_steps) {
    if (time_steps < 2) throw ConfigError("encode_ttfs: time_steps must be >= 2");
    SpikeTensor out(1, time_steps, trigger.height, trigger.width);
    for (int y = 0; y < trigger.height; ++y)
        for (int x = 0; x < trigger.width; ++x) {
            if (!trigger.at(y, x)) continue;
            double d = density.at(y, x);
            int t = static_cast<int>(std::floor((1.0 - d) * (time_steps - 1)));
            if (t >= time_steps) t = time_steps - 1;
            out.at(0, t, y, x) = 1;
        }
    return out;
}

SpikeTensor encode_burst(const DensityMap2D& density, const BinaryMask& trigger,
                         const Encoder2DConfig& cfg) {
    cfg.validate();
    const int T = cfg.time_steps;
    const int interval = cfg.dt + cfg.refrac;
    SpikeTensor out(1, T, trigger.height, trigger.width);
    for (int y = 0; y < trigger.height; ++y)
        for (int x = 0; x < trigger.width; ++x) {
            if (!trigger.at(y, x)) continue;
            int m = static_cast<int>(std::floor(cfg.burst_max * static_cast<double>(density.at(y, x))));
            for (int k = 0; k < m; ++k) {
                int t = k * interval;
                if (t >= T) break;
                out.at(0, t, y, x) = 1;
            }
        }
    return out;
}

Encode2DResult encode2d_pipeline(const Frame& frame, const Encoder2DConfig& cfg,
                                 const Encode2DAblation& ablation) {
    cfg.validate();
    auto bin = binarize_with_polarity(frame, cfg.target_ratio);
    if (bin.choice.degenerate)
        return {SpikeTensor(1, cfg.time_steps, frame.height, frame.width), true};

    BinaryMask refined = bin.mask;
    if (!ablation.no_cc) {
        auto labeling = label_components(bin.mask);
        refined = filter_components(labeling, cfg.k_components, cfg.remove_border);
    }
    auto density = density_2d(refined, cfg.window);
    BinaryMask trigger =
        ablation.no_cluster ? refined : cluster_trigger(refined, density, cfg.tau_clu);
    if (cfg.mode == EncodeMode::TTFS)
        return {encode_ttfs(density, trigger, cfg.time_steps), false};
    return {encode_burst(density, trigger, cfg), false};
}

}  // namespace cte
