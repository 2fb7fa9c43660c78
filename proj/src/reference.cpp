#include "cte/reference.hpp"

#include <queue>

namespace cte::reference {

std::vector<int> box_sum_2d(const BinaryMask& mask) {
    const int h = mask.height, w = mask.width;
    std::vector<int> out(static_cast<std::size_t>(h) * w, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            int s = 0;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    int yy = y + i, xx = x + j;
                    if (yy < h && xx < w) s += mask.at(yy, xx);
                }
            out[static_cast<std::size_t>(y) * w + x] = s;
        }
    return out;
}

std::vector<int> box_sum_3d(const VoxelTensor& voxel, int kt, int kh, int kw) {
    const int T = voxel.t_bins, h = voxel.height, w = voxel.width;
    const int rt = kt / 2, rh = kh / 2, rw = kw / 2;
    std::vector<int> out(static_cast<std::size_t>(T) * h * w, 0);
    for (int t = 0; t < T; ++t)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                int s = 0;
                for (int dt = -rt; dt <= rt; ++dt)
                    for (int dy = -rh; dy <= rh; ++dy)
                        for (int dx = -rw; dx <= rw; ++dx) {
                            int tt = t + dt, yy = y + dy, xx = x + dx;
                            if (tt >= 0 && tt < T && yy >= 0 && yy < h && xx >= 0 && xx < w)
                                s += voxel.at(0, tt, yy, xx);
                        }
                out[(static_cast<std::size_t>(t) * h + y) * w + x] = s;
            }
    return out;
}

int otsu_threshold(const Frame& frame) {
    const std::size_t n = frame.data.size();
    double best = -1.0;
    int best_t = 0;
    for (int t = 0; t < 256; ++t) {
        std::size_t n0 = 0;
        double sum0 = 0.0, sum1 = 0.0;
        for (auto v : frame.data) {
            if (v < t) {
                ++n0;
                sum0 += v;
            } else {
                sum1 += v;
            }
        }
        std::size_t n1 = n - n0;
        if (n0 == 0 || n1 == 0) continue;
        double w0 = static_cast<double>(n0) / n;
        double w1 = static_cast<double>(n1) / n;
        double mu0 = sum0 / n0, mu1 = sum1 / n1;
        double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (var > best) {
            best = var;
            best_t = t;
        }
    }
    return best_t;
}

ComponentLabeling label_components(const BinaryMask& mask) {
    const int h = mask.height, w = mask.width;
    ComponentLabeling out;
    out.height = h;
    out.width = w;
    out.labels.assign(static_cast<std::size_t>(h) * w, 0);
    int next = 1;
    for (int y0 = 0; y0 < h; ++y0)
        for (int x0 = 0; x0 < w; ++x0) {
            if (!mask.at(y0, x0) || out.labels[static_cast<std::size_t>(y0) * w + x0]) continue;
            Component comp;
            comp.id = next;
            std::queue<std::pair<int, int>> q;
            q.emplace(y0, x0);
            out.labels[static_cast<std::size_t>(y0) * w + x0] = next;
            while (!q.empty()) {
                auto [y, x] = q.front();
                q.pop();
                ++comp.area;
                if (y == 0 || x == 0 || y == h - 1 || x == w - 1) comp.touches_border = true;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        int yy = y + dy, xx = x + dx;
                        if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
                        std::size_t idx = static_cast<std::size_t>(yy) * w + xx;
                        if (mask.data[idx] && !out.labels[idx]) {
                            out.labels[idx] = next;
                            q.emplace(yy, xx);
                        }
                    }
            }
            out.components.push_back(comp);
            ++next;
        }
    return out;
}

}  // namespace cte::reference
