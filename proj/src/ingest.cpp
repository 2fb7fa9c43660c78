#include "cte/ingest.hpp"

#include <algorithm>
#include <fstream>

namespace cte {

namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> b, std::size_t off) {
    return (std::uint32_t(b[off]) << 24) | (std::uint32_t(b[off + 1]) << 16) |
           (std::uint32_t(b[off + 2]) << 8) | std::uint32_t(b[off + 3]);
}

std::uint16_t read_le16(std::span<const std::uint8_t> b, std::size_t off) {
    return static_cast<std::uint16_t>(b[off] | (std::uint16_t(b[off + 1]) << 8));
}

std::uint32_t read_le32(std::span<const std::uint8_t> b, std::size_t off) {
    return b[off] | (std::uint32_t(b[off + 1]) << 8) | (std::uint32_t(b[off + 2]) << 16) |
           (std::uint32_t(b[off + 3]) << 24);
}

void put_le16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(v & 0xff);
    out.push_back(v >> 8);
}

void put_le32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(v & 0xff);
    out.push_back((v >> 8) & 0xff);
    out.push_back((v >> 16) & 0xff);
    out.push_back((v >> 24) & 0xff);
}

}  // namespace

std::vector<Frame> read_idx_images(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 16) throw LengthError("idx images: truncated header");
    if (read_be32(bytes, 0) != 0x00000803)
        throw FormatError("idx images: bad magic (expected 0x00000803)");
    const std::uint32_t n = read_be32(bytes, 4);
    const std::uint32_t rows = read_be32(bytes, 8);
    const std::uint32_t cols = read_be32(bytes, 12);
    const std::size_t need = 16 + static_cast<std::size_t>(n) * rows * cols;
    if (bytes.size() < need) throw LengthError("idx images: truncated payload");
    if (bytes.size() > need) throw FormatError("idx images: trailing bytes");
    std::vector<Frame> out;
    out.reserve(n);
    std::size_t off = 16;
    for (std::uint32_t i = 0; i < n; ++i) {
        std::vector<std::uint8_t> px(bytes.begin() + off, bytes.begin() + off + rows * cols);
        out.emplace_back(static_cast<int>(rows), static_cast<int>(cols), std::move(px));
        off += static_cast<std::size_t>(rows) * cols;
    }
    return out;
}

std::vector<std::uint8_t> read_idx_labels(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8) throw LengthError("idx labels: truncated header");
    if (read_be32(bytes, 0) != 0x00000801)
        throw FormatError("idx labels: bad magic (expected 0x00000801)");
    const std::uint32_t n = read_be32(bytes, 4);
    if (bytes.size() < 8 + n) throw LengthError("idx labels: truncated payload");
    if (bytes.size() > 8 + static_cast<std::size_t>(n)) throw FormatError("idx labels: trailing bytes");
    std::vector<std::uint8_t> out(bytes.begin() + 8, bytes.end());
    for (auto v : out)
        if (v > 9) throw DataError("idx labels: label out of range [0,9]");
    return out;
}

EventStream read_nmnist_events(std::span<const std::uint8_t> bytes) {
    if (bytes.size() % 5 != 0) throw FormatError("nmnist: length not divisible by 5");
    std::vector<Event> events;
    events.reserve(bytes.size() / 5);
    for (std::size_t off = 0; off < bytes.size(); off += 5) {
        Event e;
        e.x = bytes[off];
        e.y = bytes[off + 1];
        e.p = (bytes[off + 2] >> 7) & 1;
        e.t = (std::int64_t(bytes[off + 2] & 0x7f) << 16) | (std::int64_t(bytes[off + 3]) << 8) |
              bytes[off + 4];
        if (e.x >= 34 || e.y >= 34) throw DataError("nmnist: coordinate out of 34x34 sensor");
        events.push_back(e);
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
    return EventStream(34, 34, std::move(events));
}

EventStream crop_events(const EventStream& events) {
    if (events.sensor_width != 34 || events.sensor_height != 34)
        throw DimensionError("crop_events: expected 34x34 sensor");
    std::vector<Event> kept;
    kept.reserve(events.events.size());
    for (auto e : events.events) {
        if (e.x < 3 || e.x > 30 || e.y < 3 || e.y > 30) continue;
        e.x -= 3;
        e.y -= 3;
        kept.push_back(e);
    }
    return EventStream(28, 28, std::move(kept));
}

std::vector<std::uint8_t> write_spike_file(const SpikeTensor& tensor) {
    std::vector<std::uint8_t> out = {'C', 'T', 'E', '1'};
    put_le16(out, static_cast<std::uint16_t>(tensor.channels));
    put_le16(out, static_cast<std::uint16_t>(tensor.t_bins));
    put_le16(out, static_cast<std::uint16_t>(tensor.height));
    put_le16(out, static_cast<std::uint16_t>(tensor.width));
    put_le32(out, static_cast<std::uint32_t>(tensor.count()));
    // data is already in (c,t,y,x) lexicographic order
    for (int c = 0; c < tensor.channels; ++c)
        for (int t = 0; t < tensor.t_bins; ++t)
            for (int y = 0; y < tensor.height; ++y)
                for (int x = 0; x < tensor.width; ++x)
                    if (tensor.at(c, t, y, x)) {
                        put_le16(out, static_cast<std::uint16_t>(c));
                        put_le16(out, static_cast<std::uint16_t>(t));
                        put_le16(out, static_cast<std::uint16_t>(y));
                        put_le16(out, static_cast<std::uint16_t>(x));
                    }
    return out;
}

SpikeTensor read_spike_file(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 16) throw LengthError("cte1: truncated header");
    if (!(bytes[0] == 'C' && bytes[1] == 'T' && bytes[2] == 'E' && bytes[3] == '1'))
        throw FormatError("cte1: bad magic");
    const int channels = read_le16(bytes, 4);
    const int t_bins = read_le16(bytes, 6);
    const int height = read_le16(bytes, 8);
    const int width = read_le16(bytes, 10);
    const std::uint32_t n = read_le32(bytes, 12);
    if (channels < 1 || t_bins < 1 || height < 1 || width < 1)
        throw FormatError("cte1: zero dimension");
    if (bytes.size() < 16 + static_cast<std::size_t>(n) * 8)
        throw LengthError("cte1: truncated records");
    if (bytes.size() > 16 + static_cast<std::size_t>(n) * 8)
        throw FormatError("cte1: trailing bytes");
    SpikeTensor out(channels, t_bins, height, width);
    std::uint64_t prev_key = 0;
    for (std::uint32_t i = 0; i < n; ++i) {
        std::size_t off = 16 + static_cast<std::size_t>(i) * 8;
        const int c = read_le16(bytes, off), t = read_le16(bytes, off + 2);
        const int y = read_le16(bytes, off + 4), x = read_le16(bytes, off + 6);
        if (c >= channels || t >= t_bins || y >= height || x >= width)
            throw FormatError("cte1: spike index out of range");
        std::uint64_t key = (std::uint64_t(c) << 48) | (std::uint64_t(t) << 32) |
                            (std::uint64_t(y) << 16) | std::uint64_t(x);
        if (i > 0 && key <= prev_key) throw FormatError("cte1: records not sorted");
        prev_key = key;
        out.at(c, t, y, x) = 1;
    }
    return out;
}

std::vector<std::uint8_t> write_spike_archive(const SpikeArchive& archive) {
    if (archive.tensors.size() != archive.labels.size())
        throw DimensionError("spike archive: tensor/label count mismatch");
    std::vector<std::uint8_t> out = {'C', 'T', 'P', '1'};
    put_le32(out, static_cast<std::uint32_t>(archive.tensors.size()));
    for (std::size_t i = 0; i < archive.tensors.size(); ++i) {
        auto blob = write_spike_file(archive.tensors[i]);
        out.push_back(archive.labels[i]);
        put_le32(out, static_cast<std::uint32_t>(blob.size()));
        out.insert(out.end(), blob.begin(), blob.end());
    }
    return out;
}

SpikeArchive read_spike_archive(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8) throw LengthError("ctp1: truncated header");
    if (!(bytes[0] == 'C' && bytes[1] == 'T' && bytes[2] == 'P' && bytes[3] == '1'))
        throw FormatError("ctp1: bad magic");
    const std::uint32_t n = read_le32(bytes, 4);
    SpikeArchive out;
    out.tensors.reserve(n);
    out.labels.reserve(n);
    std::size_t off = 8;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (off + 5 > bytes.size()) throw LengthError("ctp1: truncated sample header");
        const std::uint8_t label = bytes[off];
        const std::uint32_t len = read_le32(bytes, off + 1);
        off += 5;
        if (off + len > bytes.size()) throw LengthError("ctp1: truncated sample blob");
        out.tensors.push_back(read_spike_file(bytes.subspan(off, len)));
        out.labels.push_back(label);
        off += len;
    }
    if (off != bytes.size()) throw FormatError("ctp1: trailing bytes");
    return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace cte
