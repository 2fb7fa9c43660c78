#include "cte/encode3d.hpp"

#include <algorithm>
#include <cmath>

#include "cte/encode2d.hpp"

namespace cte {

void Encoder3DConfig::validate() const {
    if (k_t % 2 == 0 || k_h % 2 == 0 || k_w % 2 == 0)
        throw ConfigError("3D kernel dims must be odd");
    if (k_t < 1 || k_h < 1 || k_w < 1) throw ConfigError("3D kernel dims must be >= 1");
    if (tau_st < 0.0 || tau_st > 1.0) throw ConfigError("tau_st must be in [0,1]");
    if (t_bins < k_t) throw ConfigError("t_bins must be >= k_t");
    if (per_frame_tau_clu < 0.0 || per_frame_tau_clu > 1.0)
        throw ConfigError("per_frame_tau_clu must be in [0,1]");
}

VoxelTensor voxelize(const EventStream& events, int t_bins, int height, int width) {
    if (t_bins < 1) throw ConfigError("voxelize: t_bins must be >= 1");
    VoxelTensor out(2, t_bins, height, width);
    if (events.events.empty()) return out;
    const std::int64_t t_min = events.events.front().t;
    const std::int64_t t_max = events.events.back().t;
    const std::int64_t span = t_max - t_min + 1;
    for (const auto& e : events.events) {
        if (e.x >= width || e.y >= height) continue;  // already cropped upstream
        auto b = static_cast<int>((e.t - t_min) * t_bins / span);
        if (b > t_bins - 1) b = t_bins - 1;
        out.at(e.p, b, e.y, e.x) = 1;
    }
    return out;
}

VoxelTensor merge_polarity(const VoxelTensor& voxel) {
    if (voxel.channels == 1) return voxel;
    if (voxel.channels != 2) throw DimensionError("merge_polarity: expected 1 or 2 channels");
    VoxelTensor out(1, voxel.t_bins, voxel.height, voxel.width);
    const std::size_t plane = out.cells();
    for (std::size_t i = 0; i < plane; ++i)
        out.data[i] = voxel.data[i] | voxel.data[plane + i];
    return out;
}

namespace {

// Centered sliding-window sum of radius r along a strided line.
void line_window_sum(const int* in, int* out, int n, std::size_t stride, int r) {
    int acc = 0;
    for (int i = 0; i < std::min(r, n); ++i) acc += in[static_cast<std::size_t>(i) * stride];
    for (int i = 0; i < n; ++i) {
        if (i + r < n) acc += in[static_cast<std::size_t>(i + r) * stride];
        out[static_cast<std::size_t>(i) * stride] = acc;
        if (i - r >= 0) acc -= in[static_cast<std::size_t>(i - r) * stride];
    }
}

}  // namespace

std::vector<int> window_counts_3d(const VoxelTensor& merged, int kt, int kh, int kw) {
    if (merged.channels != 1) throw DimensionError("window_counts_3d: expected merged tensor");
    const int T = merged.t_bins, h = merged.height, w = merged.width;
    const std::size_t n = static_cast<std::size_t>(T) * h * w;
    std::vector<int> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = merged.data[i];

    // x pass (contiguous)
#pragma omp parallel for schedule(static)
    for (int line = 0; line < T * h; ++line)
        line_window_sum(a.data() + static_cast<std::size_t>(line) * w,
                        b.data() + static_cast<std::size_t>(line) * w, w, 1, kw / 2);
    // y pass (stride w within each time slice)
#pragma omp parallel for schedule(static)
    for (int t = 0; t < T; ++t) {
        const std::size_t base = static_cast<std::size_t>(t) * h * w;
        for (int x = 0; x < w; ++x)
            line_window_sum(b.data() + base + x, a.data() + base + x, h, w, kh / 2);
    }
    // t pass (stride h*w)
    const std::size_t plane = static_cast<std::size_t>(h) * w;
#pragma omp parallel for schedule(static)
    for (int px = 0; px < h * w; ++px)
        line_window_sum(a.data() + px, b.data() + px, T, plane, kt / 2);
    return b;
}

DensityMap3D density_3d(const VoxelTensor& merged, const Encoder3DConfig& cfg) {
    cfg.validate();
    auto counts = window_counts_3d(merged, cfg.k_t, cfg.k_h, cfg.k_w);
    const float volume = static_cast<float>(cfg.k_t) * cfg.k_h * cfg.k_w;
    std::vector<float> d(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) d[i] = counts[i] / volume;
    return DensityMap3D(merged.t_bins, merged.height, merged.width, std::move(d));
}

SpikeTensor st_gate(const VoxelTensor& voxel, const DensityMap3D& density, double tau_st,
                    int kernel_volume) {
    if (voxel.t_bins != density.t_bins || voxel.height != density.height ||
        voxel.width != density.width)
        throw DimensionError("st_gate: shape mismatch");
    const int min_count = static_cast<int>(std::ceil(tau_st * kernel_volume - 1e-9));
    const std::size_t plane = density.data.size();
    SpikeTensor out(voxel.channels, voxel.t_bins, voxel.height, voxel.width);
    for (int c = 0; c < voxel.channels; ++c)
        for (std::size_t i = 0; i < plane; ++i) {
            int k = static_cast<int>(std::lround(density.data[i] * static_cast<double>(kernel_volume)));
            out.data[static_cast<std::size_t>(c) * plane + i] =
                (voxel.data[static_cast<std::size_t>(c) * plane + i] && k >= min_count) ? 1 : 0;
        }
    return out;
}

namespace {

// PerFrame2D ablation: the 2D cluster trigger on each time bin of the
// merged occupancy, applied to both channels.
SpikeTensor gate_per_frame(const VoxelTensor& voxel, const VoxelTensor& merged, double tau_clu) {
    const int T = voxel.t_bins, h = voxel.height, w = voxel.width;
    SpikeTensor out(voxel.channels, T, h, w);
    const std::size_t frame = static_cast<std::size_t>(h) * w;
    const std::size_t plane = static_cast<std::size_t>(T) * frame;
    for (int t = 0; t < T; ++t) {
        std::vector<std::uint8_t> bin(merged.data.begin() + t * frame,
                                      merged.data.begin() + (t + 1) * frame);
        BinaryMask mask(h, w, std::move(bin));
        auto density = density_2d(mask);
        auto trig = cluster_trigger(mask, density, tau_clu);
        for (int c = 0; c < voxel.channels; ++c)
            for (std::size_t i = 0; i < frame; ++i)
                out.data[c * plane + t * frame + i] =
                    voxel.data[c * plane + t * frame + i] & trig.data[i];
    }
    return out;
}

}  // namespace

SpikeTensor encode3d_pipeline(const EventStream& events, const Encoder3DConfig& cfg,
                              int height, int width) {
    cfg.validate();
    auto voxel = voxelize(events, cfg.t_bins, height, width);
    if (cfg.ablation == Ablation3D::NoST3D) return SpikeTensor(voxel);

    auto merged = merge_polarity(voxel);
    if (cfg.ablation == Ablation3D::PerFrame2D)
        return gate_per_frame(voxel, merged, cfg.per_frame_tau_clu);

    Encoder3DConfig eff = cfg;
    if (cfg.ablation == Ablation3D::SpatialOnly2D) eff.k_t = 1;
    const int volume = eff.k_t * eff.k_h * eff.k_w;

    if (cfg.merge_polarity) {
        auto density = density_3d(merged, eff);
        return st_gate(voxel, density, eff.tau_st, volume);
    }
    // Unmerged: each channel gated by its own density.
    SpikeTensor out(voxel.channels, voxel.t_bins, voxel.height, voxel.width);
    const std::size_t plane = static_cast<std::size_t>(voxel.t_bins) * voxel.height * voxel.width;
    for (int c = 0; c < voxel.channels; ++c) {
        VoxelTensor one(1, voxel.t_bins, voxel.height, voxel.width,
                        {voxel.data.begin() + c * plane, voxel.data.begin() + (c + 1) * plane});
        auto density = density_3d(one, eff);
        auto gated = st_gate(one, density, eff.tau_st, volume);
        std::copy(gated.data.begin(), gated.data.end(), out.data.begin() + c * plane);
    }
    return out;
}

}  // namespace cte
