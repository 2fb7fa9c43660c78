#pragma once

#include <vector>

#include "cte/core_types.hpp"

// Serial brute-force kernels. These are the slow, obviously-correct
// counterparts of the production implementations; the test suite compares
// the two routes exactly and the benchmark target measures the gap.
namespace cte::reference {

// Forward-anchored 4x4 window sum by four nested loops.
std::vector<int> box_sum_2d(const BinaryMask& mask);

// Centered 3D window sum (kt×kh×kw, odd dims) by six nested loops.
std::vector<int> box_sum_3d(const VoxelTensor& voxel, int kt, int kh, int kw);

// Exhaustive Otsu: evaluates the between-class variance for every
// candidate threshold directly from the pixel list.
int otsu_threshold(const Frame& frame);

// BFS flood fill, 8-connectivity. Label ids follow raster order of the
// first-seen pixel.
ComponentLabeling label_components(const BinaryMask& mask);

}  // namespace cte::reference
