#include "cte/preprocess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace cte {

OtsuResult otsu_threshold(const Frame& frame) {
    if (frame.data.empty()) throw DimensionError("otsu_threshold: empty frame");
    std::array<std::int64_t, 256> hist{};
    for (auto v : frame.data) ++hist[v];

    int distinct = 0, only = 0;
    for (int v = 0; v < 256; ++v)
        if (hist[v]) {
            ++distinct;
            only = v;
        }
    if (distinct == 1) return {only, true};

    const auto n = static_cast<std::int64_t>(frame.data.size());
    std::int64_t total_sum = 0;
    for (int v = 0; v < 256; ++v) total_sum += static_cast<std::int64_t>(v) * hist[v];

    // cumulative counts/sums of the {v < t} class
    std::int64_t n0 = 0, sum0 = 0;
    double best = -1.0;
    int best_t = 0;
    for (int t = 0; t < 256; ++t) {
        if (t > 0) {
            n0 += hist[t - 1];
            sum0 += static_cast<std::int64_t>(t - 1) * hist[t - 1];
        }
        std::int64_t n1 = n - n0;
        if (n0 == 0 || n1 == 0) continue;
        double w0 = static_cast<double>(n0) / n;
        double w1 = static_cast<double>(n1) / n;
        double mu0 = static_cast<double>(sum0) / n0;
        double mu1 = static_cast<double>(total_sum - sum0) / n1;
        double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (var > best) {
            best = var;
            best_t = t;
        }
    }
    return {best_t, false};
}

BinarizeResult binarize_with_polarity(const Frame& frame, double target_ratio) {
    auto otsu = otsu_threshold(frame);
    const int T = otsu.threshold;
    const std::size_t n = frame.data.size();

    std::vector<std::uint8_t> dark(n), light(n);
    std::size_t n_dark = 0, n_light = 0;
    for (std::size_t i = 0; i < n; ++i) {
        dark[i] = frame.data[i] < T ? 1 : 0;
        light[i] = frame.data[i] > T ? 1 : 0;
        n_dark += dark[i];
        n_light += light[i];
    }
    double r_dark = static_cast<double>(n_dark) / n;
    double r_light = static_cast<double>(n_light) / n;

    BinarizeResult out{BinaryMask::zeros(frame.height, frame.width), {}};
    if (otsu.degenerate) {
        out.mask = BinaryMask(frame.height, frame.width, std::move(light));  // empty
        out.choice = {Polarity::Light, 0.0, true};
        return out;
    }
    if (std::abs(r_dark - target_ratio) < std::abs(r_light - target_ratio)) {
        out.mask = BinaryMask(frame.height, frame.width, std::move(dark));
        out.choice = {Polarity::Dark, r_dark, false};
    } else {
        out.mask = BinaryMask(frame.height, frame.width, std::move(light));
        out.choice = {Polarity::Light, r_light, false};
    }
    return out;
}

namespace {

int find_root(std::vector<int>& parent, int i) {
    while (parent[i] != i) {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    return i;
}

}  // namespace

ComponentLabeling label_components(const BinaryMask& mask) {
    const int h = mask.height, w = mask.width;
    std::vector<int> raw(static_cast<std::size_t>(h) * w, 0);
    std::vector<int> parent(1, 0);  // parent[0] unused

    // First pass: provisional labels, union with the four already-visited
    // 8-neighbors (W, NW, N, NE).
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            std::size_t idx = static_cast<std::size_t>(y) * w + x;
            if (!mask.data[idx]) continue;
            int neighbors[4];
            int nn = 0;
            if (x > 0 && raw[idx - 1]) neighbors[nn++] = raw[idx - 1];
            if (y > 0) {
                std::size_t up = idx - w;
                if (x > 0 && raw[up - 1]) neighbors[nn++] = raw[up - 1];
                if (raw[up]) neighbors[nn++] = raw[up];
                if (x < w - 1 && raw[up + 1]) neighbors[nn++] = raw[up + 1];
            }
            if (nn == 0) {
                int lab = static_cast<int>(parent.size());
                parent.push_back(lab);
                raw[idx] = lab;
            } else {
                int mn = neighbors[0];
                for (int i = 1; i < nn; ++i) mn = std::min(mn, neighbors[i]);
                raw[idx] = mn;
                for (int i = 0; i < nn; ++i) {
                    int a = find_root(parent, mn), b = find_root(parent, neighbors[i]);
                    if (a != b) parent[std::max(a, b)] = std::min(a, b);
                }
            }
        }

    // Second pass: compact to dense ids in raster-first-seen order.
    ComponentLabeling out;
    out.height = h;
    out.width = w;
    out.labels.assign(raw.size(), 0);
    std::vector<int> dense(parent.size(), 0);
    int next = 1;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            std::size_t idx = static_cast<std::size_t>(y) * w + x;
            if (!raw[idx]) continue;
            int root = find_root(parent, raw[idx]);
            if (!dense[root]) {
                dense[root] = next++;
                out.components.push_back({dense[root], 0, false});
            }
            int id = dense[root];
            out.labels[idx] = id;
            auto& comp = out.components[id - 1];
            ++comp.area;
            if (y == 0 || x == 0 || y == h - 1 || x == w - 1) comp.touches_border = true;
        }
    return out;
}

BinaryMask filter_components(const ComponentLabeling& labeling, int k, bool remove_border) {
    if (k < 1) throw ConfigError("filter_components: K must be >= 1");
    std::vector<Component> pool;
    for (const auto& c : labeling.components)
        if (!remove_border || !c.touches_border) pool.push_back(c);

    std::stable_sort(pool.begin(), pool.end(), [](const Component& a, const Component& b) {
        if (a.area != b.area) return a.area > b.area;
        return a.id < b.id;  // ties keep the smaller id
    });
    if (static_cast<int>(pool.size()) > k) pool.resize(k);

    std::vector<std::uint8_t> keep(labeling.components.size() + 1, 0);
    for (const auto& c : pool) keep[c.id] = 1;

    std::vector<std::uint8_t> data(labeling.labels.size(), 0);
    for (std::size_t i = 0; i < data.size(); ++i)
        if (labeling.labels[i] && keep[labeling.labels[i]]) data[i] = 1;
    return BinaryMask(labeling.height, labeling.width, std::move(data));
}

}  // namespace cte
