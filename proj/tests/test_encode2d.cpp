#include <doctest.h>

#include <cmath>

#include "cte/encode2d.hpp"
#include "cte/reference.hpp"
#include "test_util.hpp"

using namespace cte;

TEST_CASE("density_2d: isolated pixel has density 1/16") {
    BinaryMask m = BinaryMask::zeros(8, 8);
    m.at(3, 3) = 1;
    auto d = density_2d(m);
    CHECK(d.at(3, 3) == doctest::Approx(1.0 / 16.0));
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
            if (y != 3 || x != 3) CHECK(d.at(y, x) == 0.0f);
}

TEST_CASE("density_2d: saturated window gives density 1") {
    BinaryMask m(8, 8, std::vector<std::uint8_t>(64, 1));
    auto d = density_2d(m);
    CHECK(d.at(0, 0) == 1.0f);   // forward window fully inside
    CHECK(d.at(4, 4) == 1.0f);
    CHECK(d.at(7, 7) == doctest::Approx(1.0 / 16.0));
}

TEST_CASE("density_2d matches brute force and is zero on background") {
    std::mt19937_64 rng(31);
    for (int it = 0; it < 50; ++it) {
        auto m = testutil::random_mask(rng, 28, 28, 0.35);
        auto d = density_2d(m);
        auto counts = reference::box_sum_2d(m);
        for (std::size_t i = 0; i < d.data.size(); ++i) {
            if (m.data[i])
                CHECK(d.data[i] == static_cast<float>(counts[i]) / 16.0f);
            else
                CHECK(d.data[i] == 0.0f);
        }
    }
}

TEST_CASE("cluster_trigger boundary: 4 of 16 neighbors at tau 0.25") {
    BinaryMask m = BinaryMask::zeros(10, 10);
    // anchor pixel plus 3 more inside its forward window: count 4, d = 0.25
    m.at(2, 2) = 1;
    m.at(2, 3) = 1;
    m.at(3, 2) = 1;
    m.at(3, 3) = 1;
    auto d = density_2d(m);
    auto trig = cluster_trigger(m, d, 0.25);
    CHECK(trig.at(2, 2) == 1);
}

TEST_CASE("cluster_trigger: isolated pixel not triggered at tau 0.25") {
    BinaryMask m = BinaryMask::zeros(10, 10);
    m.at(5, 5) = 1;
    auto trig = cluster_trigger(m, density_2d(m), 0.25);
    CHECK(trig.count() == 0);
}

TEST_CASE("cluster_trigger: tau 0 equals the foreground mask") {
    std::mt19937_64 rng(37);
    auto m = testutil::random_mask(rng, 20, 20, 0.3);
    auto trig = cluster_trigger(m, density_2d(m), 0.0);
    CHECK(trig.data == m.data);
}

TEST_CASE("encode_ttfs timing") {
    BinaryMask trig = BinaryMask::zeros(4, 4);
    trig.at(0, 0) = trig.at(1, 1) = 1;
    std::vector<float> d(16, 0.0f);
    d[0] = 1.0f;          // fires at t = 0
    d[5] = 0.25f;         // floor(0.75 * 11) = 8
    auto s = encode_ttfs(DensityMap2D(4, 4, d), trig, 12);
    CHECK(s.at(0, 0, 0, 0) == 1);
    CHECK(s.at(0, 8, 1, 1) == 1);
    CHECK(s.count() == trig.count());
}

TEST_CASE("encode_ttfs: at most one spike per pixel, spikes only on trigger") {
    std::mt19937_64 rng(41);
    for (int it = 0; it < 50; ++it) {
        auto m = testutil::random_mask(rng, 16, 16, 0.4);
        auto d = density_2d(m);
        auto trig = cluster_trigger(m, d, 0.25);
        auto s = encode_ttfs(d, trig, 12);
        for (int y = 0; y < 16; ++y)
            for (int x = 0; x < 16; ++x) {
                int fired = 0;
                for (int t = 0; t < 12; ++t) fired += s.at(0, t, y, x);
                CHECK(fired <= 1);
                if (fired) CHECK(trig.at(y, x) == 1);
            }
    }
}

TEST_CASE("encode_ttfs: denser pixels never fire later") {
    std::mt19937_64 rng(43);
    auto m = testutil::random_mask(rng, 16, 16, 0.5);
    auto d = density_2d(m);
    auto trig = cluster_trigger(m, d, 0.25);
    auto s = encode_ttfs(d, trig, 12);
    auto fire_time = [&](int y, int x) {
        for (int t = 0; t < 12; ++t)
            if (s.at(0, t, y, x)) return t;
        return -1;
    };
    for (int i = 0; i < 256; ++i)
        for (int j = 0; j < 256; ++j) {
            int y1 = i / 16, x1 = i % 16, y2 = j / 16, x2 = j % 16;
            if (!trig.at(y1, x1) || !trig.at(y2, x2)) continue;
            if (d.at(y1, x1) > d.at(y2, x2)) CHECK(fire_time(y1, x1) <= fire_time(y2, x2));
        }
}

TEST_CASE("encode_burst examples") {
    Encoder2DConfig cfg;  // M=4, dt=1, refrac=1 -> interval 2, T=12
    BinaryMask trig = BinaryMask::zeros(2, 2);
    trig.at(0, 0) = trig.at(0, 1) = trig.at(1, 0) = 1;
    std::vector<float> d = {0.5f, 1.0f, 0.2f, 0.0f};
    auto s = encode_burst(DensityMap2D(2, 2, d), trig, cfg);

    // d=0.5 -> m=2, spikes at 0 and 2
    CHECK(s.at(0, 0, 0, 0) == 1);
    CHECK(s.at(0, 2, 0, 0) == 1);
    CHECK(s.at(0, 4, 0, 0) == 0);
    // d=1 -> m=4, spikes at 0,2,4,6
    for (int t : {0, 2, 4, 6}) CHECK(s.at(0, t, 0, 1) == 1);
    CHECK(s.at(0, 8, 0, 1) == 0);
    // d=0.2 -> m=0, no spikes despite trigger
    for (int t = 0; t < 12; ++t) CHECK(s.at(0, t, 1, 0) == 0);
}

TEST_CASE("encode_burst: per-pixel count bounded by min(M, ceil(T/interval))") {
    std::mt19937_64 rng(47);
    Encoder2DConfig cfg;
    cfg.time_steps = 6;
    cfg.burst_max = 7;
    const int interval = cfg.dt + cfg.refrac;
    const int bound = std::min(cfg.burst_max,
                               (cfg.time_steps + interval - 1) / interval);
    for (int it = 0; it < 50; ++it) {
        auto m = testutil::random_mask(rng, 12, 12, 0.5);
        auto d = density_2d(m);
        auto s = encode_burst(d, m, cfg);
        for (int y = 0; y < 12; ++y)
            for (int x = 0; x < 12; ++x) {
                int n = 0;
                for (int t = 0; t < cfg.time_steps; ++t) n += s.at(0, t, y, x);
                CHECK(n <= bound);
            }
    }
}

TEST_CASE("pipeline: all-black frame encodes to zero spikes") {
    auto r = encode2d_pipeline(Frame::constant(28, 28, 0), Encoder2DConfig{});
    CHECK(r.degenerate);
    CHECK(r.spikes.count() == 0);
    CHECK(r.spikes.t_bins == 12);
}

TEST_CASE("pipeline: no_cluster ablation never reduces spikes") {
    std::mt19937_64 rng(53);
    Encoder2DConfig cfg;
    for (int it = 0; it < 20; ++it) {
        auto frame = testutil::random_frame(rng, 28, 28);
        auto base = encode2d_pipeline(frame, cfg);
        auto ab = encode2d_pipeline(frame, cfg, {.no_cc = false, .no_cluster = true});
        CHECK(ab.spikes.count() >= base.spikes.count());
    }
}

TEST_CASE("pipeline: spike count is non-increasing in tau_clu") {
    std::mt19937_64 rng(59);
    for (int it = 0; it < 20; ++it) {
        auto frame = testutil::random_frame(rng, 20, 20);
        std::size_t prev = SIZE_MAX;
        for (double tau : {0.0, 0.1, 0.25, 0.5, 0.8, 1.0}) {
            Encoder2DConfig cfg;
            cfg.tau_clu = tau;
            auto r = encode2d_pipeline(frame, cfg);
            CHECK(r.spikes.count() <= prev);
            prev = r.spikes.count();
        }
    }
}

TEST_CASE("centered window variant stays consistent with its own brute force") {
    std::mt19937_64 rng(61);
    auto m = testutil::random_mask(rng, 12, 12, 0.4);
    auto counts = window_counts_2d(m, WindowAnchor::Centered);
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 12; ++x) {
            int s = 0;
            for (int i = -2; i <= 1; ++i)
                for (int j = -2; j <= 1; ++j) {
                    int yy = y + i, xx = x + j;
                    if (yy >= 0 && yy < 12 && xx >= 0 && xx < 12) s += m.at(yy, xx);
                }
            CHECK(counts[static_cast<std::size_t>(y) * 12 + x] == s);
        }
}
