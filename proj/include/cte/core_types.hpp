#pragma once

#include <cstdint>
#include <vector>

#include "cte/errors.hpp"

namespace cte {

// Grayscale image, row-major, values 0..255.
struct Frame {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> data;

    Frame() = default;
    Frame(int h, int w, std::vector<std::uint8_t> d);
    static Frame constant(int h, int w, std::uint8_t value);

    std::uint8_t at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return data.size(); }
};

// Row-major {0,1} grid.
struct BinaryMask {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> data;

    BinaryMask() = default;
    BinaryMask(int h, int w, std::vector<std::uint8_t> d);
    static BinaryMask zeros(int h, int w);

    std::uint8_t at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int y, int x) { return data[static_cast<std::size_t>(y) * width + x]; }
    std::size_t count() const;                 // number of set cells
    double mean() const;                       // foreground ratio
    bool same_shape(const BinaryMask& o) const { return height == o.height && width == o.width; }
};

struct Component {
    int id = 0;
    int area = 0;
    bool touches_border = false;
};

// Label grid (0 = background) plus per-component records.
struct ComponentLabeling {
    int height = 0;
    int width = 0;
    std::vector<int> labels;
    std::vector<Component> components;

    int label_at(int y, int x) const { return labels[static_cast<std::size_t>(y) * width + x]; }
};

struct Event {
    std::uint16_t x = 0;
    std::uint16_t y = 0;
    std::int64_t t = 0;        // microseconds
    std::uint8_t p = 0;        // polarity, 0 or 1
};

// Time-sorted event record list with sensor geometry.
struct EventStream {
    int sensor_width = 0;
    int sensor_height = 0;
    std::vector<Event> events;

    EventStream() = default;
    EventStream(int w, int h, std::vector<Event> ev);  // validates order and bounds
};

namespace detail {

// Shared storage for the C×T×H×W binary tensors.
struct BinaryTensor4 {
    int channels = 0;
    int t_bins = 0;
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> data;

    BinaryTensor4() = default;
    BinaryTensor4(int c, int t, int h, int w, std::vector<std::uint8_t> d);
    BinaryTensor4(int c, int t, int h, int w);  // zero-filled

    std::size_t index(int c, int t, int y, int x) const {
        return ((static_cast<std::size_t>(c) * t_bins + t) * height + y) * width + x;
    }
    std::uint8_t at(int c, int t, int y, int x) const { return data[index(c, t, y, x)]; }
    std::uint8_t& at(int c, int t, int y, int x) { return data[index(c, t, y, x)]; }
    std::size_t cells() const { return data.size(); }
    std::size_t count() const;  // number of set cells

    bool same_shape(const BinaryTensor4& o) const {
        return channels == o.channels && t_bins == o.t_bins && height == o.height && width == o.width;
    }
    bool operator==(const BinaryTensor4& o) const = default;
};

}  // namespace detail

// Voxelized events (occupancy, not counts).
struct VoxelTensor : detail::BinaryTensor4 {
    using detail::BinaryTensor4::BinaryTensor4;
};

// Encoded spikes fed to the classifier.
struct SpikeTensor : detail::BinaryTensor4 {
    using detail::BinaryTensor4::BinaryTensor4;
    explicit SpikeTensor(const detail::BinaryTensor4& b) : detail::BinaryTensor4(b) {}
};

// H×W density fractions in [0,1], stored as k/window_volume.
struct DensityMap2D {
    int height = 0;
    int width = 0;
    std::vector<float> data;

    DensityMap2D() = default;
    DensityMap2D(int h, int w, std::vector<float> d);

    float at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

// T×H×W density fractions in [0,1].
struct DensityMap3D {
    int t_bins = 0;
    int height = 0;
    int width = 0;
    std::vector<float> data;

    DensityMap3D() = default;
    DensityMap3D(int t, int h, int w, std::vector<float> d);

    float at(int t, int y, int x) const {
        return data[(static_cast<std::size_t>(t) * height + y) * width + x];
    }
};

// Forward-anchored 4x4 window sum, zero padding past the borders:
// out(y,x) = sum of mask(y+i, x+j) for i,j in [0,3].
// Implemented with separable running sums; see reference.hpp for the
// brute-force check.
std::vector<int> box_sum_2d(const BinaryMask& mask);

BinaryMask elementwise_and(const BinaryMask& a, const BinaryMask& b);

}  // namespace cte
