#include <doctest.h>

#include "cte/config.hpp"

using namespace cte;

TEST_CASE("parse_run_config reads keys, comments, blanks") {
    auto cfg = parse_run_config(
        "# comment\n"
        "encoder = 3d\n"
        "\n"
        "tau_st=0.2\n"
        "k_t = 5\n"
        "mode = burst\n"
        "lr = 0.001\n"
        "epochs = 3\n"
        "seed = 9\n"
        "ablation = per_frame\n");
    CHECK(cfg.encoder == "3d");
    CHECK(cfg.enc3d.tau_st == doctest::Approx(0.2));
    CHECK(cfg.enc3d.k_t == 5);
    CHECK(cfg.enc3d.ablation == Ablation3D::PerFrame2D);
    CHECK(cfg.enc2d.mode == EncodeMode::Burst);
    CHECK(cfg.train.lr == doctest::Approx(0.001f));
    CHECK(cfg.train.epochs == 3);
    CHECK(cfg.seed == 9);
    CHECK(cfg.train.seed == 9);
}

TEST_CASE("parse_run_config defaults match the encoder defaults") {
    auto cfg = parse_run_config("");
    CHECK(cfg.encoder == "2d");
    CHECK(cfg.enc2d.tau_clu == doctest::Approx(0.25));
    CHECK(cfg.enc2d.time_steps == 12);
    CHECK(cfg.enc3d.t_bins == 32);
    CHECK(cfg.enc3d.k_h == 17);
    CHECK(cfg.train.lr == doctest::Approx(0.0015f));
    CHECK(cfg.train.weight_decay == doctest::Approx(5e-5f));
}

TEST_CASE("parse_run_config rejects bad input") {
    CHECK_THROWS_AS(parse_run_config("taau_clu = 0.3\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("mode = ramp\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("encoder = 4d\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("no equals sign\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("tau_clu = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("k_t = 4\n"), ConfigError);
}

TEST_CASE("unknown key message names the offender") {
    try {
        parse_run_config("thresh = 1\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("thresh") != std::string::npos);
    }
}
