#pragma once

#include "cte/core_types.hpp"

namespace cte {

enum class Ablation3D { Full, NoST3D, SpatialOnly2D, PerFrame2D };

struct Encoder3DConfig {
    int t_bins = 32;           // T
    int k_t = 7;               // temporal kernel (odd)
    int k_h = 17;              // spatial kernel (odd)
    int k_w = 17;
    double tau_st = 0.10;      // density threshold
    bool merge_polarity = true;
    Ablation3D ablation = Ablation3D::Full;
    double per_frame_tau_clu = 0.25;  // PerFrame2D only

    void validate() const;
};

// Occupancy voxelization: bin = min(floor((t - t_min) * T / (t_max - t_min + 1)), T-1).
// Output is 2×T×H×W, one channel per polarity. Empty streams give zeros.
VoxelTensor voxelize(const EventStream& events, int t_bins, int height, int width);

// Logical OR of the polarity channels; identity on single-channel input.
VoxelTensor merge_polarity(const VoxelTensor& voxel);

// Centered kt×kh×kw occupancy counts with zero padding on every axis,
// computed as three separable 1D running sums (O(THW) regardless of kernel
// size). reference::box_sum_3d is the brute-force counterpart.
std::vector<int> window_counts_3d(const VoxelTensor& merged, int kt, int kh, int kw);

// d(t,y,x) = count / (kt*kh*kw).
DensityMap3D density_3d(const VoxelTensor& merged, const Encoder3DConfig& cfg);

// Keeps a spike iff occupied-neighbor count >= ceil(tau_st * kernel volume).
// For two-channel input the merged-density mask gates both channels.
SpikeTensor st_gate(const VoxelTensor& voxel, const DensityMap3D& density, double tau_st,
                    int kernel_volume);

// voxelize -> merge -> density -> gate, with the ablation variants.
SpikeTensor encode3d_pipeline(const EventStream& events, const Encoder3DConfig& cfg,
                              int height, int width);

}  // namespace cte
