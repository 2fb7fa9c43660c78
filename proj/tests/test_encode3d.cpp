#include <doctest.h>

#include <algorithm>

#include "cte/encode3d.hpp"
#include "cte/reference.hpp"
#include "test_util.hpp"

using namespace cte;

namespace {

EventStream single_event_stream() {
    return EventStream(28, 28, {{14, 14, 1000, 1}});
}

// Dense vertical bar sweeping left to right, one column per time bin.
// Interior bar voxels sit in a solid 3-column, full-height slab across
// adjacent bins, comfortably above the 10% occupancy gate.
EventStream moving_bar_stream(int t_bins) {
    std::vector<Event> events;
    for (int b = 0; b < t_bins; ++b)
        for (int dx = 0; dx < 3; ++dx)
            for (int y = 0; y < 28; ++y) {
                int x = (b + dx) % 28;
                events.push_back({static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y),
                                  static_cast<std::int64_t>(b) * 100, 1});
            }
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
    return EventStream(28, 28, std::move(events));
}

}  // namespace

TEST_CASE("voxelize: single event occupies exactly one cell") {
    auto v = voxelize(single_event_stream(), 32, 28, 28);
    CHECK(v.count() == 1);
    CHECK(v.at(1, 0, 14, 14) == 1);
}

TEST_CASE("voxelize: duplicate events stay binary") {
    EventStream es(28, 28, {{5, 5, 10, 0}, {5, 5, 10, 0}});
    auto v = voxelize(es, 4, 28, 28);
    CHECK(v.count() == 1);
}

TEST_CASE("voxelize: constructed full-coverage stream fills the tensor") {
    const int T = 4, H = 6, W = 6;
    std::vector<Event> events;
    // span of timestamps [0, T*10-1]; bin b covers t in [b*10, b*10+9]
    for (int p = 0; p < 2; ++p)
        for (int b = 0; b < T; ++b)
            for (int y = 0; y < H; ++y)
                for (int x = 0; x < W; ++x)
                    events.push_back({static_cast<std::uint16_t>(x),
                                      static_cast<std::uint16_t>(y),
                                      static_cast<std::int64_t>(b) * 10,
                                      static_cast<std::uint8_t>(p)});
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
    // pin the full span so the last bin is reached
    events.back().t = T * 10 - 1;
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
    auto v = voxelize(EventStream(W, H, std::move(events)), T, H, W);
    CHECK(v.count() == v.cells());
}

TEST_CASE("voxelize: empty stream is all zeros") {
    auto v = voxelize(EventStream(28, 28, {}), 32, 28, 28);
    CHECK(v.count() == 0);
}

TEST_CASE("merge_polarity is the per-cell OR") {
    std::mt19937_64 rng(67);
    auto v = testutil::random_voxel(rng, 2, 4, 8, 8);
    auto m = merge_polarity(v);
    CHECK(m.channels == 1);
    for (int t = 0; t < 4; ++t)
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x)
                CHECK(m.at(0, t, y, x) == std::max(v.at(0, t, y, x), v.at(1, t, y, x)));

    SUBCASE("single channel is identity") {
        auto one = testutil::random_voxel(rng, 1, 4, 8, 8);
        CHECK(merge_polarity(one).data == one.data);
    }
}

TEST_CASE("density_3d: single event at defaults peaks at 1/2023") {
    auto v = merge_polarity(voxelize(single_event_stream(), 32, 28, 28));
    Encoder3DConfig cfg;
    auto d = density_3d(v, cfg);
    CHECK(d.at(0, 14, 14) == doctest::Approx(1.0 / 2023.0));
}

TEST_CASE("density_3d: saturated interior voxel reaches 1") {
    VoxelTensor v(1, 32, 28, 28);
    std::fill(v.data.begin(), v.data.end(), 1);
    Encoder3DConfig cfg;
    auto d = density_3d(v, cfg);
    CHECK(d.at(16, 14, 14) == 1.0f);
    CHECK(d.at(0, 0, 0) < 1.0f);  // corner window mostly padded
}

TEST_CASE("window_counts_3d matches brute force") {
    std::mt19937_64 rng(71);
    for (auto [kt, kh, kw] : {std::tuple{3, 5, 5}, std::tuple{7, 17, 17}}) {
        for (int it = 0; it < 10; ++it) {
            auto v = testutil::random_voxel(rng, 1, 8 + kt, 20, 20);
            CHECK(window_counts_3d(v, kt, kh, kw) == reference::box_sum_3d(v, kt, kh, kw));
        }
    }
}

TEST_CASE("st_gate: isolated event removed at defaults") {
    Encoder3DConfig cfg;
    auto voxel = voxelize(single_event_stream(), 32, 28, 28);
    auto d = density_3d(merge_polarity(voxel), cfg);
    auto s = st_gate(voxel, d, cfg.tau_st, 2023);
    CHECK(s.count() == 0);
}

TEST_CASE("st_gate: tau 0 is the identity") {
    std::mt19937_64 rng(73);
    Encoder3DConfig cfg;
    cfg.t_bins = 8;
    cfg.k_t = 3;
    cfg.k_h = cfg.k_w = 5;
    auto voxel = testutil::random_voxel(rng, 2, 8, 12, 12);
    auto d = density_3d(merge_polarity(voxel), cfg);
    auto s = st_gate(voxel, d, 0.0, 75);
    CHECK(s.data == voxel.data);
}

TEST_CASE("st_gate: output is a subset, monotone in tau") {
    std::mt19937_64 rng(79);
    Encoder3DConfig cfg;
    cfg.t_bins = 8;
    cfg.k_t = 3;
    cfg.k_h = cfg.k_w = 5;
    for (int it = 0; it < 20; ++it) {
        auto voxel = testutil::random_voxel(rng, 2, 8, 12, 12, 0.2);
        auto d = density_3d(merge_polarity(voxel), cfg);
        std::size_t prev = SIZE_MAX;
        for (double tau : {0.0, 0.05, 0.1, 0.3, 0.6, 1.0}) {
            auto s = st_gate(voxel, d, tau, 75);
            for (std::size_t i = 0; i < s.data.size(); ++i) CHECK(s.data[i] <= voxel.data[i]);
            CHECK(s.count() <= prev);
            prev = s.count();
        }
    }
}

TEST_CASE("st_gate: polarity equity under the shared mask") {
    std::mt19937_64 rng(83);
    Encoder3DConfig cfg;
    cfg.t_bins = 8;
    cfg.k_t = 3;
    cfg.k_h = cfg.k_w = 5;
    auto voxel = testutil::random_voxel(rng, 2, 8, 12, 12, 0.4);
    auto d = density_3d(merge_polarity(voxel), cfg);
    auto s = st_gate(voxel, d, 0.15, 75);
    const std::size_t plane = d.data.size();
    for (std::size_t i = 0; i < plane; ++i)
        if (voxel.data[i] && voxel.data[plane + i])
            CHECK(s.data[i] == s.data[plane + i]);
}

TEST_CASE("st_gate: dense moving bar keeps its interior trajectory") {
    Encoder3DConfig cfg;
    auto events = moving_bar_stream(32);
    auto voxel = voxelize(events, 32, 28, 28);
    auto d = density_3d(merge_polarity(voxel), cfg);
    auto s = st_gate(voxel, d, cfg.tau_st, 2023);
    // the bar occupies 3 of 28 columns full-height each bin; its interior
    // neighborhoods clear 10% occupancy by construction
    CHECK(s.count() > 0);
    CHECK(s.at(1, 16, 14, 17) == voxel.at(1, 16, 14, 17));
}

TEST_CASE("encode3d_pipeline ablations") {
    auto events = moving_bar_stream(32);
    Encoder3DConfig cfg;

    auto full = encode3d_pipeline(events, cfg, 28, 28);
    cfg.ablation = Ablation3D::NoST3D;
    auto raw = encode3d_pipeline(events, cfg, 28, 28);
    CHECK(raw.data == voxelize(events, 32, 28, 28).data);
    CHECK(full.count() <= raw.count());

    cfg.ablation = Ablation3D::SpatialOnly2D;
    auto spatial = encode3d_pipeline(events, cfg, 28, 28);
    CHECK(spatial.channels == 2);

    cfg.ablation = Ablation3D::PerFrame2D;
    auto per_frame = encode3d_pipeline(events, cfg, 28, 28);
    for (std::size_t i = 0; i < per_frame.data.size(); ++i)
        CHECK(per_frame.data[i] <= raw.data[i]);
}

TEST_CASE("encode3d_pipeline: empty stream gives zeros") {
    auto s = encode3d_pipeline(EventStream(28, 28, {}), Encoder3DConfig{}, 28, 28);
    CHECK(s.count() == 0);
    CHECK(s.channels == 2);
    CHECK(s.t_bins == 32);
}

TEST_CASE("config validation rejects even kernels") {
    Encoder3DConfig cfg;
    cfg.k_t = 4;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
