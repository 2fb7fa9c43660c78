#include <doctest.h>

#include <sstream>

#include "cte/metrics.hpp"
#include "test_util.hpp"

using namespace cte;

TEST_CASE("spike_stats on hand-built tensors") {
    SpikeTensor a(1, 4, 2, 2);  // 16 cells
    a.at(0, 0, 0, 0) = a.at(0, 1, 1, 1) = 1;  // 2 spikes
    SpikeTensor b(1, 4, 2, 2);
    for (int t = 0; t < 4; ++t) b.at(0, t, 0, 0) = 1;  // 4 spikes
    std::vector<SpikeTensor> batch = {a, b};

    auto r = spike_stats(batch);
    CHECK(r.samples == 2);
    CHECK(r.mean_spikes == doctest::Approx(3.0));
    CHECK(r.median_spikes == doctest::Approx(3.0));
    CHECK(r.min_spikes == 2);
    CHECK(r.max_spikes == 4);
    CHECK(r.sparsity == doctest::Approx(6.0 / 32.0));
}

TEST_CASE("spike_stats median with odd sample count") {
    std::vector<SpikeTensor> batch;
    for (int n : {5, 1, 3}) {
        SpikeTensor s(1, 2, 4, 4);
        for (int i = 0; i < n; ++i) s.data[static_cast<std::size_t>(i)] = 1;
        batch.push_back(std::move(s));
    }
    CHECK(spike_stats(batch).median_spikes == doctest::Approx(3.0));
}

TEST_CASE("spike_stats rejects an empty batch") {
    CHECK_THROWS_AS(spike_stats({}), DimensionError);
}

TEST_CASE("flicker_rate examples") {
    SUBCASE("persistent spike train has no flicker") {
        SpikeTensor s(1, 5, 1, 1);
        for (int t = 0; t < 5; ++t) s.at(0, t, 0, 0) = 1;
        auto f = flicker_rate(s);
        REQUIRE(f.has_value());
        CHECK(*f == 0.0);
    }
    SUBCASE("lone interior spike flickers") {
        SpikeTensor s(1, 5, 1, 1);
        s.at(0, 2, 0, 0) = 1;
        auto f = flicker_rate(s);
        REQUIRE(f.has_value());
        CHECK(*f == 1.0);
    }
    SUBCASE("mixed") {
        SpikeTensor s(1, 5, 1, 2);
        s.at(0, 1, 0, 0) = s.at(0, 2, 0, 0) = 1;  // supported pair
        s.at(0, 2, 0, 1) = 1;                     // isolated
        auto f = flicker_rate(s);
        REQUIRE(f.has_value());
        CHECK(*f == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("undefined for short horizons or empty interiors") {
        CHECK(!flicker_rate(SpikeTensor(1, 2, 4, 4)).has_value());
        SpikeTensor edge_only(1, 5, 1, 1);
        edge_only.at(0, 0, 0, 0) = edge_only.at(0, 4, 0, 0) = 1;
        CHECK(!flicker_rate(edge_only).has_value());
    }
}

TEST_CASE("report_csv has one row per sample plus header and aggregate") {
    std::mt19937_64 rng(211);
    std::vector<SpikeTensor> batch;
    for (int i = 0; i < 3; ++i) batch.push_back(testutil::random_spikes(rng, 1, 6, 8, 8));
    auto csv = report_csv(batch);
    int lines = 0;
    std::istringstream is(csv);
    std::string line;
    while (std::getline(is, line))
        if (!line.empty()) ++lines;
    CHECK(lines == 5);
    CHECK(csv.rfind("sample,", 0) == 0);
}
