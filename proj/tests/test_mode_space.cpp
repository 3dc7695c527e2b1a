#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "test_util.hpp"
#include "uqi/mode_space.hpp"
#include "uqi/optics.hpp"

using namespace uqi;
using test::Rng;

TEST_CASE("optical config validation") {
    OpticalConfig cfg = test::reference_config();
    CHECK_NOTHROW(cfg.validate());

    SUBCASE("derived pump satisfies energy matching exactly") {
        CHECK(cfg.lambda_p > 0.0);
        const double lhs = 1.0 / cfg.lambda_p;
        const double rhs = 1.0 / cfg.lambda_s + 1.0 / cfg.lambda_i;
        CHECK(std::abs(lhs - rhs) <= 1e-12 * lhs);
    }
    SUBCASE("mismatched pump wavelength is rejected") {
        cfg.lambda_p *= 1.0 + 1e-6;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
    SUBCASE("non-positive lengths are rejected") {
        cfg.f_i = 0.0;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
    SUBCASE("indices below one are rejected") {
        cfg.n_s = 0.9;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
    SUBCASE("non-positive crystal side is rejected") {
        cfg.crystal_dims[2] = -1e-3;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }
}

TEST_CASE("mirror flips transverse components only") {
    const OpticalConfig cfg = test::reference_config();
    const WaveVector on_axis = WaveVector::from_transverse(0.0, 0.0, cfg.omega_s(), 1.0);
    const WaveVector m = mirror(on_axis);
    CHECK(m.qx == 0.0);
    CHECK(m.qy == 0.0);

    const WaveVector k = WaveVector::from_transverse(1e5, -2e5, cfg.omega_s(), 1.0);
    const WaveVector mk = mirror(k);
    CHECK(mk.qx == -1e5);
    CHECK(mk.qy == 2e5);
    CHECK(mk.omega == k.omega);
    CHECK(mk.kz == k.kz);

    Rng rng;
    for (int i = 0; i < 200; ++i) {
        const double q = 0.3 * cfg.omega_s() / kSpeedOfLight;
        const WaveVector v = WaveVector::from_transverse(rng.uniform(-q, q), rng.uniform(-q, q),
                                                         cfg.omega_s(), 1.0);
        const WaveVector mm = mirror(mirror(v));
        CHECK(mm.qx == v.qx);
        CHECK(mm.qy == v.qy);
        CHECK(mm.kz == v.kz);
        CHECK(mm.omega == v.omega);
    }
}

TEST_CASE("phase matched partner") {
    const OpticalConfig cfg = test::reference_config();

    SUBCASE("on-axis signal pairs with on-axis idler") {
        const WaveVector ks = WaveVector::from_transverse(0.0, 0.0, cfg.omega_s(), cfg.n_0);
        const WaveVector ki = phase_match_partner(ks, cfg);
        CHECK(ki.qx == 0.0);
        CHECK(ki.qy == 0.0);
        CHECK(ki.omega == doctest::Approx(cfg.omega_i()).epsilon(1e-12));
    }
    SUBCASE("transverse momentum balances the axial pump") {
        const WaveVector ks = WaveVector::from_transverse(2e4, 0.0, cfg.omega_s(), cfg.n_0);
        const WaveVector ki = phase_match_partner(ks, cfg);
        CHECK(ki.qx == -2e4);
        CHECK(ki.qy == 0.0);
    }
    SUBCASE("idler beyond its light cone is evanescent") {
        // Signal propagates but the lower-frequency idler cannot match.
        const double q = 0.8 * cfg.omega_s() / kSpeedOfLight;
        const WaveVector ks = WaveVector::from_transverse(q, 0.0, cfg.omega_s(), cfg.n_0);
        CHECK_THROWS_AS(phase_match_partner(ks, cfg), EvanescentMode);
    }
}

TEST_CASE("sinc envelope") {
    const OpticalConfig cfg = test::reference_config();
    const double l3 = cfg.crystal_dims[2];

    CHECK(sinc_envelope({0.0, 0.0, 0.0}, cfg) == 1.0);
    CHECK(sinc_envelope({0.0, 0.0, 2.0 * std::numbers::pi / l3}, cfg) ==
          doctest::Approx(0.0).epsilon(1e-15));
    CHECK(sinc_envelope({0.0, 0.0, std::numbers::pi / l3}, cfg) ==
          doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-12));

    SUBCASE("even in every component and bounded by one") {
        Rng rng;
        for (int i = 0; i < 500; ++i) {
            const std::array<double, 3> dk = {rng.uniform(-1e4, 1e4), rng.uniform(-1e4, 1e4),
                                              rng.uniform(-1e4, 1e4)};
            const double w = sinc_envelope(dk, cfg);
            CHECK(std::abs(w) <= 1.0 + 1e-15);
            for (int axis = 0; axis < 3; ++axis) {
                std::array<double, 3> flipped = dk;
                flipped[axis] = -flipped[axis];
                CHECK(sinc_envelope(flipped, cfg) == doctest::Approx(w).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("mode grid construction") {
    const OpticalConfig cfg = test::reference_config();

    SUBCASE("single on-axis pixel") {
        const ModeGrid grid = build_mode_grid(cfg, CameraGeometry{1, 1, 50e-6});
        REQUIRE(grid.entries.size() == 1);
        const auto& e = grid.entries[0];
        CHECK(e.signal.qx == 0.0);
        CHECK(e.signal.qy == 0.0);
        CHECK(e.object_point.x == 0.0);
        CHECK(e.object_point.y == 0.0);
        CHECK(e.weight == 1.0);
    }

    const ModeGrid grid = build_mode_grid(cfg, CameraGeometry{9, 7, 100e-6});

    SUBCASE("transverse matching holds exactly, energy within 1e-12") {
        for (const auto& e : grid.entries) {
            CHECK(e.signal.qx + e.idler.qx == 0.0);
            CHECK(e.signal.qy + e.idler.qy == 0.0);
            const double sum = e.signal.omega + e.idler.omega;
            CHECK(std::abs(sum - cfg.omega_p()) <= 1e-12 * cfg.omega_p());
        }
    }
    SUBCASE("grid vectors satisfy the dispersion relation with kz > 0") {
        for (const auto& e : grid.entries) {
            for (const WaveVector* k : {&e.signal, &e.idler, &e.idler_mirrored}) {
                const double expected = cfg.n_0 * k->omega / kSpeedOfLight;
                const double norm = std::sqrt(k->qx * k->qx + k->qy * k->qy + k->kz * k->kz);
                CHECK(norm == doctest::Approx(expected).epsilon(1e-14));
                CHECK(k->kz > 0.0);
            }
        }
    }
    SUBCASE("mirror is an involution preserving omega and kz on grid vectors") {
        for (const auto& e : grid.entries) {
            const WaveVector mm = mirror(mirror(e.idler));
            CHECK(mm.qx == e.idler.qx);
            CHECK(mm.qy == e.idler.qy);
            CHECK(e.idler_mirrored.omega == e.idler.omega);
            CHECK(e.idler_mirrored.kz == e.idler.kz);
        }
    }
    SUBCASE("left-right mirror symmetry of a symmetric camera") {
        for (int iy = 0; iy < 7; ++iy) {
            for (int ix = 0; ix < 9; ++ix) {
                const auto& a = grid.at(ix, iy);
                const auto& b = grid.at(8 - ix, iy);
                CHECK(a.signal.qx == -b.signal.qx);
                CHECK(a.signal.qy == b.signal.qy);
                CHECK(a.object_point.x == -b.object_point.x);
            }
        }
    }
    SUBCASE("strict mode gives unit weights") {
        for (const auto& e : grid.entries) {
            CHECK(e.weight == 1.0);
        }
    }
    SUBCASE("object point signs follow the pixel signs (non-inverted image)") {
        for (int iy = 0; iy < 7; ++iy) {
            for (int ix = 0; ix < 9; ++ix) {
                const Vec2 rho = grid.camera.pixel_position(ix, iy);
                const auto& e = grid.at(ix, iy);
                CHECK(e.object_point.x * rho.x >= 0.0);
                CHECK(e.object_point.y * rho.y >= 0.0);
            }
        }
    }
}

TEST_CASE("sinc weights differ from one off axis in sinc mode") {
    OpticalConfig cfg = test::reference_config();
    cfg.use_sinc_envelope = true;
    cfg.n_s = 1.6;
    cfg.n_i = 1.6;
    cfg.crystal_dims = {1e-3, 1e-3, 5e-3};
    const ModeGrid grid = build_mode_grid(cfg, CameraGeometry{31, 1, 1e-3});
    const auto& center = grid.at(15, 0);
    const auto& edge = grid.at(30, 0);
    CHECK(center.weight == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(edge.weight) < 1.0);
}

TEST_CASE("evanescent pixels propagate from grid construction") {
    const OpticalConfig cfg = test::reference_config();
    // 45 degree camera corner: idler arcsine argument > 1.
    CHECK_THROWS_AS(build_mode_grid(cfg, CameraGeometry{3, 3, 200e-3}), EvanescentMode);
}
