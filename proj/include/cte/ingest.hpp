#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cte/core_types.hpp"

namespace cte {

enum class Split { Train, Test };

struct DatasetManifest {
    std::filesystem::path root;
    Split split = Split::Test;
    std::size_t sample_count = 0;
    int class_count = 10;
};

// MNIST IDX image file: big-endian magic 0x00000803, then n, rows, cols,
// then n*rows*cols unsigned bytes.
std::vector<Frame> read_idx_images(std::span<const std::uint8_t> bytes);

// IDX label file: magic 0x00000801, count, then one byte per label in [0,9].
std::vector<std::uint8_t> read_idx_labels(std::span<const std::uint8_t> bytes);

// N-MNIST AER: 5-byte records. byte0 = x, byte1 = y, byte2 bit7 = polarity,
// remaining 23 bits big-endian = timestamp in microseconds. Sensor is 34×34.
// Output is sorted by timestamp (stable, so same-t order is preserved).
EventStream read_nmnist_events(std::span<const std::uint8_t> bytes);

// Center crop 34×34 -> 28×28: keep x,y in [3,30], shift by -3.
EventStream crop_events(const EventStream& events);

// CTE1 spike file: "CTE1", LE u16 {channels, T, height, width}, LE u32
// spike count N, then N records of four LE u16 (c,t,y,x), lexicographically
// sorted.
std::vector<std::uint8_t> write_spike_file(const SpikeTensor& tensor);
SpikeTensor read_spike_file(std::span<const std::uint8_t> bytes);

// Packed split archive: "CTP1", LE u32 sample count, then per sample a u8
// label and a LE u32 byte length followed by that sample's CTE1 blob.
struct SpikeArchive {
    std::vector<SpikeTensor> tensors;
    std::vector<std::uint8_t> labels;
};
std::vector<std::uint8_t> write_spike_archive(const SpikeArchive& archive);
SpikeArchive read_spike_archive(std::span<const std::uint8_t> bytes);

// Whole-file helpers.
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace cte
