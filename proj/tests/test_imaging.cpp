#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "test_util.hpp"
#include "uqi/imaging.hpp"

using namespace uqi;
using test::Rng;

namespace {

const CameraGeometry kSmallCam{9, 9, 50e-6};

} // namespace

TEST_CASE("counting rate examples") {
    const OpticalConfig cfg = test::reference_config();
    const ModeGrid grid = build_mode_grid(cfg, kSmallCam);
    const ModeGridEntry& center = grid.at(4, 4);

    SUBCASE("empty object, zero constants, constructive") {
        const ObjectMap obj = test::uniform_object({1.0, 0.0});
        CHECK(counting_rate(center, 0.0, obj, cfg) == doctest::Approx(4.0).epsilon(1e-15));
    }
    SUBCASE("opaque point kills the interference for every phase") {
        const ObjectMap obj = test::uniform_object({0.0, 0.0});
        for (int k = 0; k < 16; ++k) {
            const double phi = 2.0 * std::numbers::pi * k / 16.0;
            CHECK(counting_rate(center, phi, obj, cfg) == doctest::Approx(2.0).epsilon(1e-15));
        }
    }
    SUBCASE("pi phase object at the constructive setting gives zero") {
        const ObjectMap obj = test::uniform_object(std::polar(1.0, std::numbers::pi));
        const ImagingEngine engine(cfg, kSmallCam);
        const PhaseCalibration cal = engine.calibrate();
        CHECK(counting_rate(center, cal.phi_pc, obj, cfg) ==
              doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("rate bounds for arbitrary objects and pumps") {
    Rng rng;
    for (int trial = 0; trial < 40; ++trial) {
        OpticalConfig cfg = test::reference_config();
        cfg.v_p1 = std::polar(rng.uniform(0.2, 2.0), rng.uniform(0.0, 6.28));
        cfg.v_p2 = std::polar(rng.uniform(0.2, 2.0), rng.uniform(0.0, 6.28));
        cfg.delta_s0 = rng.uniform(0.0, 6.28);
        cfg.phi_i0 = rng.uniform(0.0, 6.28);
        cfg.c0 = rng.uniform(0.0, 6.28);
        const ModeGrid grid = build_mode_grid(cfg, kSmallCam);
        const ObjectMap obj = test::random_object(rng);
        const double v1 = std::abs(cfg.v_p1);
        const double v2 = std::abs(cfg.v_p2);
        for (const auto& entry : grid.entries) {
            const double r = counting_rate(entry, rng.uniform(0.0, 6.28), obj, cfg);
            CHECK(r >= (v1 - v2) * (v1 - v2) - 1e-12);
            CHECK(r <= (v1 + v2) * (v1 + v2) + 1e-12);
        }
    }
}

TEST_CASE("calibration") {
    SUBCASE("zero constants give phi_pc = 0, phi_pd = pi") {
        const ImagingEngine engine(test::reference_config(), kSmallCam);
        const PhaseCalibration cal = engine.calibrate();
        CHECK(cal.phi_pc == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(cal.phi_pd == doctest::Approx(std::numbers::pi).epsilon(1e-12));
    }
    SUBCASE("constants shift the constructive phase to their negative sum") {
        OpticalConfig cfg = test::reference_config();
        cfg.delta_s0 = 0.3;
        cfg.phi_i0 = 0.1;
        cfg.c0 = 0.05;
        const PhaseCalibration cal = ImagingEngine(cfg, kSmallCam).calibrate();
        CHECK(cal.phi_pc == doctest::Approx(6.033185307179586).epsilon(1e-10));
    }
    SUBCASE("half-period split for random constants") {
        Rng rng;
        for (int trial = 0; trial < 25; ++trial) {
            OpticalConfig cfg = test::reference_config();
            cfg.delta_s0 = rng.uniform(0.0, 6.28);
            cfg.phi_i0 = rng.uniform(0.0, 6.28);
            cfg.c0 = rng.uniform(0.0, 6.28);
            cfg.phi_p = rng.uniform(0.0, 6.28);
            const PhaseCalibration cal = ImagingEngine(cfg, kSmallCam).calibrate();
            double gap = std::fmod(cal.phi_pd - cal.phi_pc + 4.0 * std::numbers::pi,
                                   2.0 * std::numbers::pi);
            CHECK(gap == doctest::Approx(std::numbers::pi).epsilon(1e-9));
            CHECK(cal.phi_pc >= 0.0);
            CHECK(cal.phi_pc < 2.0 * std::numbers::pi);
        }
    }
    SUBCASE("one pump off degenerates the fringe") {
        OpticalConfig cfg = test::reference_config();
        cfg.v_p2 = {0.0, 0.0};
        CHECK_THROWS_AS(ImagingEngine(cfg, kSmallCam).calibrate(), DegenerateFringe);
        cfg.v_p1 = {0.0, 0.0}; // both off: flat zero sweep
        CHECK_THROWS_AS(ImagingEngine(cfg, kSmallCam).calibrate(), DegenerateFringe);
    }
    SUBCASE("calibration is scale invariant") {
        OpticalConfig cfg = test::reference_config();
        cfg.delta_s0 = 1.1;
        const PhaseCalibration base = ImagingEngine(cfg, kSmallCam).calibrate();
        cfg.v_p1 *= 3.7;
        cfg.v_p2 *= 3.7;
        const PhaseCalibration scaled = ImagingEngine(cfg, kSmallCam).calibrate();
        CHECK(scaled.phi_pc == doctest::Approx(base.phi_pc).epsilon(1e-12));
        CHECK(scaled.phi_pd == doctest::Approx(base.phi_pd).epsilon(1e-12));
    }
}

TEST_CASE("rendered images") {
    const OpticalConfig cfg = test::reference_config();
    const ImagingEngine engine(cfg, kSmallCam);

    SUBCASE("no object renders flat 4s") {
        const CameraImage img = engine.render(0.0, test::uniform_object({1.0, 0.0}));
        for (double r : img.rates) {
            CHECK(r == doctest::Approx(4.0).epsilon(1e-15));
        }
    }
    SUBCASE("single pump sees no object at all") {
        OpticalConfig solo = cfg;
        solo.v_p1 = {1.3, 0.0};
        solo.v_p2 = {0.0, 0.0};
        const ImagingEngine eng(solo, kSmallCam);
        Rng rng;
        for (int trial = 0; trial < 5; ++trial) {
            const CameraImage img = eng.render(0.4, test::random_object(rng));
            for (double r : img.rates) {
                CHECK(r == doctest::Approx(1.3 * 1.3).epsilon(1e-15));
            }
        }
    }
    SUBCASE("rate floor of a rendered image") {
        OpticalConfig unb = cfg;
        unb.v_p1 = {1.0, 0.0};
        unb.v_p2 = {0.4, 0.0};
        const ImagingEngine eng(unb, kSmallCam);
        Rng rng;
        const CameraImage img = eng.render(1.0, test::random_object(rng));
        for (double r : img.rates) {
            CHECK(r >= 0.36 - 1e-12);
        }
    }
}

TEST_CASE("checkerboard object at the constructive phase") {
    // Degenerate layout: the object lattice lands exactly on the camera
    // lattice, one sample per pixel, so rates are exactly 2 or 4.
    const OpticalConfig cfg = test::degenerate_config();
    const CameraGeometry cam{8, 8, 100e-6};
    ObjectMap obj;
    obj.width = 8;
    obj.height = 8;
    obj.pitch = cam.pitch;
    obj.values.resize(64);
    for (int iy = 0; iy < 8; ++iy) {
        for (int ix = 0; ix < 8; ++ix) {
            obj.values[iy * 8 + ix] = ((ix + iy) % 2 == 0) ? 1.0 : 0.0;
        }
    }
    const ImagingEngine engine(cfg, cam);
    const PhaseCalibration cal = engine.calibrate();
    const CameraImage img = engine.render(cal.phi_pc, obj);
    for (int iy = 0; iy < 8; ++iy) {
        for (int ix = 0; ix < 8; ++ix) {
            const double expected = ((ix + iy) % 2 == 0) ? 4.0 : 2.0;
            CHECK(img.at(ix, iy) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("difference image") {
    const OpticalConfig cfg = test::reference_config();
    const ImagingEngine engine(cfg, kSmallCam);
    const PhaseCalibration cal = engine.calibrate();

    SUBCASE("empty object: flat 4") {
        const CameraImage d = engine.difference_image(test::uniform_object({1.0, 0.0}), cal);
        for (double r : d.rates) {
            CHECK(r == doctest::Approx(4.0).epsilon(1e-12));
        }
    }
    SUBCASE("opaque object: flat 0") {
        const CameraImage d = engine.difference_image(test::uniform_object({0.0, 0.0}), cal);
        for (double r : d.rates) {
            CHECK(r == doctest::Approx(0.0).epsilon(1e-12));
        }
    }
    SUBCASE("quarter-wave phase object is invisible in the difference") {
        const ObjectMap obj = test::uniform_object(std::polar(1.0, std::numbers::pi / 2.0));
        const CameraImage d = engine.difference_image(obj, cal);
        for (double r : d.rates) {
            CHECK(r == doctest::Approx(0.0).epsilon(1e-12));
        }
        // ... while the single calibrated images still carry it.
        const CameraImage plus = engine.render(cal.phi_pc, obj);
        CHECK(plus.rates[0] == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("content outside the field of view cannot matter") {
        Rng rng;
        ObjectMap obj = test::random_object(rng, 21, 20e-3);
        const CameraImage before = engine.difference_image(obj, cal);
        // The 9x9 x 50um camera maps well inside +-0.3 mm of the object
        // plane; the bilinear support of that region stops at the +-2 mm
        // sample ring. Rewrite everything strictly beyond it.
        for (int iy = 0; iy < obj.height; ++iy) {
            for (int ix = 0; ix < obj.width; ++ix) {
                const Vec2 p = obj.sample_position(ix, iy);
                if (std::max(std::abs(p.x), std::abs(p.y)) > 2.2e-3) {
                    obj.at(ix, iy) = rng.unit_disk();
                }
            }
        }
        const CameraImage after = engine.difference_image(obj, cal);
        for (std::size_t i = 0; i < before.rates.size(); ++i) {
            CHECK(before.rates[i] == after.rates[i]);
        }
    }
}

TEST_CASE("sum image is object independent") {
    const OpticalConfig cfg = test::reference_config();
    const ImagingEngine engine(cfg, kSmallCam);
    const PhaseCalibration cal = engine.calibrate();

    SUBCASE("flat 4 for any object, balanced pumps") {
        Rng rng;
        const ObjectMap objs[] = {test::uniform_object({1.0, 0.0}),
                                  test::uniform_object({0.0, 0.0}), test::random_object(rng)};
        for (const auto& obj : objs) {
            const CameraImage s = engine.sum_image(obj, cal);
            for (double r : s.rates) {
                CHECK(r == doctest::Approx(4.0).epsilon(1e-12));
            }
        }
    }
    SUBCASE("full block and no object give identical sums") {
        const CameraImage a = engine.sum_image(test::uniform_object({1.0, 0.0}), cal);
        const CameraImage b = engine.sum_image(test::uniform_object({0.0, 0.0}), cal);
        for (std::size_t i = 0; i < a.rates.size(); ++i) {
            CHECK(a.rates[i] == doctest::Approx(b.rates[i]).epsilon(1e-14));
        }
    }
    SUBCASE("unbalanced pumps: flat 2(|V1|^2+|V2|^2)") {
        OpticalConfig unb = cfg;
        unb.v_p1 = {1.0, 0.0};
        unb.v_p2 = {0.5, 0.0};
        const ImagingEngine eng(unb, kSmallCam);
        const PhaseCalibration c = eng.calibrate();
        const CameraImage s = eng.sum_image(test::uniform_object({1.0, 0.0}), c);
        for (double r : s.rates) {
            CHECK(r == doctest::Approx(2.5).epsilon(1e-12));
        }
    }
}

TEST_CASE("visibility") {
    const OpticalConfig cfg = test::reference_config();
    const ImagingEngine engine(cfg, kSmallCam);

    CHECK(engine.visibility(test::uniform_object({1.0, 0.0}), 4, 4) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(engine.visibility(test::uniform_object({0.5, 0.0}), 4, 4) ==
          doctest::Approx(0.5).epsilon(1e-12));

    OpticalConfig unb = cfg;
    unb.v_p1 = {1.0, 0.0};
    unb.v_p2 = {0.5, 0.0};
    CHECK(ImagingEngine(unb, kSmallCam).visibility(test::uniform_object({1.0, 0.0}), 4, 4) ==
          doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("phase sweep at a pixel fits a pure cosine") {
    Rng rng;
    OpticalConfig cfg = test::reference_config();
    cfg.delta_s0 = 0.77;
    cfg.c0 = -0.2;
    cfg.tilt = 1e-7;
    const ModeGrid grid = build_mode_grid(cfg, kSmallCam);
    const ObjectMap obj = test::random_object(rng);
    const ModeGridEntry& entry = grid.at(7, 2);

    std::vector<double> phis(64), rates(64);
    for (int k = 0; k < 64; ++k) {
        phis[k] = 2.0 * std::numbers::pi * k / 64.0;
        rates[k] = counting_rate(entry, phis[k], obj, cfg);
    }
    const CosineFit fit = fit_cosine(phis, rates);
    for (int k = 0; k < 64; ++k) {
        const double model = fit.offset + fit.amplitude * std::cos(phis[k] + fit.phase);
        CHECK(std::abs(rates[k] - model) < 1e-10);
    }
}

TEST_CASE("global pump scaling moves rates quadratically and calibration not at all") {
    Rng rng;
    OpticalConfig cfg = test::reference_config();
    cfg.delta_s0 = 0.9;
    const ObjectMap obj = test::random_object(rng);
    const ImagingEngine base(cfg, kSmallCam);
    const double s = 2.3;
    OpticalConfig scaled_cfg = cfg;
    scaled_cfg.v_p1 *= s;
    scaled_cfg.v_p2 *= s;
    const ImagingEngine scaled(scaled_cfg, kSmallCam);

    const CameraImage img = base.render(0.31, obj);
    const CameraImage img_scaled = scaled.render(0.31, obj);
    for (std::size_t i = 0; i < img.rates.size(); ++i) {
        CHECK(img_scaled.rates[i] == doctest::Approx(s * s * img.rates[i]).epsilon(1e-12));
    }
}

TEST_CASE("parallel rendering is bit-identical to sequential") {
    Rng rng;
    const OpticalConfig cfg = test::reference_config();
    const ImagingEngine engine(cfg, CameraGeometry{64, 48, 20e-6});
    const ObjectMap obj = test::random_object(rng, 15, 2e-3);
    const CameraImage seq = engine.render(0.7, obj, 1);
    const CameraImage par = engine.render(0.7, obj, 5);
    REQUIRE(seq.rates.size() == par.rates.size());
    for (std::size_t i = 0; i < seq.rates.size(); ++i) {
        CHECK(seq.rates[i] == par.rates[i]);
    }
}

TEST_CASE("tilt adds a linear fringe without breaking calibration") {
    OpticalConfig cfg = test::reference_config();
    cfg.tilt = 2e-5; // rad per rad/m
    const ImagingEngine engine(cfg, CameraGeometry{33, 1, 200e-6});
    const PhaseCalibration cal = engine.calibrate();
    const CameraImage img = engine.render(cal.phi_pc, test::uniform_object({1.0, 0.0}));
    // Center pixel sits at the fringe maximum; edges fall off it.
    CHECK(img.at(16, 0) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(img.at(32, 0) < 4.0 - 1e-3);
    CHECK(std::abs(img.at(0, 0) - img.at(32, 0)) < 1e-9); // symmetric fringe
}
