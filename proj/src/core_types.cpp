#include "cte/core_types.hpp"

#include <algorithm>
#include <numeric>

namespace cte {

static void check_size(std::size_t got, std::size_t want, const char* what) {
    if (got != want)
        throw DimensionError(std::string(what) + ": data length " + std::to_string(got) +
                             " does not match shape " + std::to_string(want));
}

Frame::Frame(int h, int w, std::vector<std::uint8_t> d) : height(h), width(w), data(std::move(d)) {
    if (h <= 0 || w <= 0) throw DimensionError("Frame: non-positive shape");
    check_size(data.size(), static_cast<std::size_t>(h) * w, "Frame");
}

Frame Frame::constant(int h, int w, std::uint8_t value) {
    return Frame(h, w, std::vector<std::uint8_t>(static_cast<std::size_t>(h) * w, value));
}

BinaryMask::BinaryMask(int h, int w, std::vector<std::uint8_t> d)
    : height(h), width(w), data(std::move(d)) {
    if (h <= 0 || w <= 0) throw DimensionError("BinaryMask: non-positive shape");
    check_size(data.size(), static_cast<std::size_t>(h) * w, "BinaryMask");
    for (auto v : data)
        if (v > 1) throw DataError("BinaryMask: value not in {0,1}");
}

BinaryMask BinaryMask::zeros(int h, int w) {
    return BinaryMask(h, w, std::vector<std::uint8_t>(static_cast<std::size_t>(h) * w, 0));
}

std::size_t BinaryMask::count() const {
    return std::accumulate(data.begin(), data.end(), std::size_t{0});
}

double BinaryMask::mean() const {
    return data.empty() ? 0.0 : static_cast<double>(count()) / data.size();
}

EventStream::EventStream(int w, int h, std::vector<Event> ev)
    : sensor_width(w), sensor_height(h), events(std::move(ev)) {
    if (w <= 0 || h <= 0) throw DimensionError("EventStream: non-positive sensor shape");
    std::int64_t prev = 0;
    bool first = true;
    for (const auto& e : events) {
        if (e.x >= w || e.y >= h)
            throw DataError("EventStream: event outside sensor bounds");
        if (e.p > 1) throw DataError("EventStream: polarity not in {0,1}");
        if (!first && e.t < prev) throw DataError("EventStream: events not time-sorted");
        prev = e.t;
        first = false;
    }
}

namespace detail {

BinaryTensor4::BinaryTensor4(int c, int t, int h, int w, std::vector<std::uint8_t> d)
    : channels(c), t_bins(t), height(h), width(w), data(std::move(d)) {
    if (c <= 0 || t <= 0 || h <= 0 || w <= 0)
        throw DimensionError("BinaryTensor4: non-positive shape");
    check_size(data.size(), static_cast<std::size_t>(c) * t * h * w, "BinaryTensor4");
    for (auto v : data)
        if (v > 1) throw DataError("BinaryTensor4: value not in {0,1}");
}

BinaryTensor4::BinaryTensor4(int c, int t, int h, int w)
    : channels(c), t_bins(t), height(h), width(w),
      data(static_cast<std::size_t>(c) * t * h * w, 0) {
    if (c <= 0 || t <= 0 || h <= 0 || w <= 0)
        throw DimensionError("BinaryTensor4: non-positive shape");
}

std::size_t BinaryTensor4::count() const {
    return std::accumulate(data.begin(), data.end(), std::size_t{0});
}

}  // namespace detail

DensityMap2D::DensityMap2D(int h, int w, std::vector<float> d)
    : height(h), width(w), data(std::move(d)) {
    check_size(data.size(), static_cast<std::size_t>(h) * w, "DensityMap2D");
    for (float v : data)
        if (!(v >= 0.0f && v <= 1.0f)) throw DataError("DensityMap2D: value outside [0,1]");
}

DensityMap3D::DensityMap3D(int t, int h, int w, std::vector<float> d)
    : t_bins(t), height(h), width(w), data(std::move(d)) {
    check_size(data.size(), static_cast<std::size_t>(t) * h * w, "DensityMap3D");
    for (float v : data)
        if (!(v >= 0.0f && v <= 1.0f)) throw DataError("DensityMap3D: value outside [0,1]");
}

std::vector<int> box_sum_2d(const BinaryMask& mask) {
    const int h = mask.height, w = mask.width;
    // Horizontal pass: row(y,x) = sum of mask(y, x..x+3).
    std::vector<int> row(static_cast<std::size_t>(h) * w, 0);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        int acc = 0;
        // running window entering from the right edge
        for (int x = w - 1; x >= 0; --x) {
            acc += mask.at(y, x);
            if (x + 4 < w) acc -= mask.at(y, x + 4);
            row[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    // Vertical pass: out(y,x) = sum of row(y..y+3, x).
    std::vector<int> out(static_cast<std::size_t>(h) * w, 0);
#pragma omp parallel for schedule(static)
    for (int x = 0; x < w; ++x) {
        int acc = 0;
        for (int y = h - 1; y >= 0; --y) {
            acc += row[static_cast<std::size_t>(y) * w + x];
            if (y + 4 < h) acc -= row[static_cast<std::size_t>(y + 4) * w + x];
            out[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    return out;
}

BinaryMask elementwise_and(const BinaryMask& a, const BinaryMask& b) {
    if (!a.same_shape(b)) throw DimensionError("elementwise_and: shape mismatch");
    std::vector<std::uint8_t> out(a.data.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data[i] & b.data[i];
    return BinaryMask(a.height, a.width, std::move(out));
}

}  // namespace cte
