#include "uqi/imaging.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <thread>

namespace uqi {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double phi) {
    double w = std::fmod(phi, kTwoPi);
    if (w < 0.0) {
        w += kTwoPi;
    }
    // Snap the representative just below 2pi back to 0.
    if (kTwoPi - w < 1e-9) {
        w = 0.0;
    }
    return w;
}

// Splits [0, n) into contiguous chunks, one thread each. Each index writes
// its own slot, so the result does not depend on the thread count.
void parallel_for(std::size_t n, unsigned max_threads, const std::function<void(std::size_t)>& fn) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) {
        hw = 1;
    }
    unsigned workers = max_threads == 0 ? hw : max_threads;
    if (workers > n) {
        workers = static_cast<unsigned>(n == 0 ? 1 : n);
    }
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(begin + chunk, n);
        if (begin >= end) {
            break;
        }
        pool.emplace_back([begin, end, &fn] {
            for (std::size_t i = begin; i < end; ++i) {
                fn(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

} // namespace

double interference_phase(const ModeGridEntry& entry, double phi_p, const OpticalConfig& cfg) {
    return cfg.delta_s0 - cfg.phi_i0 + phi_p + cfg.phi_p + std::arg(cfg.v_p2) -
           std::arg(cfg.v_p1) + cfg.c0 + cfg.tilt * entry.signal.qx;
}

double counting_rate(const ModeGridEntry& entry, double phi_p, const ObjectMap& obj,
                     const OpticalConfig& cfg) {
    const double v1 = std::abs(cfg.v_p1);
    const double v2 = std::abs(cfg.v_p2);
    const ObjectSample s = sample_object(obj, entry.object_point);
    const double phase = interference_phase(entry, phi_p, cfg) - std::arg(s.t);
    return v1 * v1 + v2 * v2 +
           2.0 * v1 * v2 * entry.weight * std::abs(s.t) * std::cos(phase);
}

ImagingEngine::ImagingEngine(const OpticalConfig& cfg, const CameraGeometry& camera)
    : cfg_(OpticalConfig::with_derived_pump(cfg)) {
    cfg_.validate();
    grid_ = build_mode_grid(cfg_, camera);
    config_hash_ = engine_config_hash(cfg_, camera);
}

CameraImage ImagingEngine::render(double phi_p, const ObjectMap& obj, unsigned max_threads) const {
    CameraImage img;
    img.width = grid_.camera.width;
    img.height = grid_.camera.height;
    img.pitch = grid_.camera.pitch;
    img.phi_p_used = phi_p;
    img.config_hash = config_hash_;
    img.rates.resize(grid_.entries.size());
    parallel_for(grid_.entries.size(), max_threads, [&](std::size_t i) {
        img.rates[i] = counting_rate(grid_.entries[i], phi_p, obj, cfg_);
    });
    return img;
}

CosineFit fit_cosine(const std::vector<double>& phi, const std::vector<double>& values) {
    // Linear least squares on {1, cos, sin}; for uniform phases over a full
    // period the normal equations are diagonal up to rounding, but solve the
    // 3x3 system anyway so irregular sweeps stay exact.
    double s1 = 0, sc = 0, ss = 0, scc = 0, sss = 0, scs = 0, sv = 0, svc = 0, svs = 0;
    const std::size_t n = phi.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double c = std::cos(phi[i]);
        const double s = std::sin(phi[i]);
        s1 += 1.0;
        sc += c;
        ss += s;
        scc += c * c;
        sss += s * s;
        scs += c * s;
        sv += values[i];
        svc += values[i] * c;
        svs += values[i] * s;
    }
    // Solve [s1 sc ss; sc scc scs; ss scs sss] [a;b;c] = [sv;svc;svs].
    const double m[3][3] = {{s1, sc, ss}, {sc, scc, scs}, {ss, scs, sss}};
    double rhs[3] = {sv, svc, svs};
    double a[3][4];
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            a[r][c] = m[r][c];
        }
        a[r][3] = rhs[r];
    }
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) {
                pivot = r;
            }
        }
        std::swap(a[col], a[pivot]);
        for (int r = 0; r < 3; ++r) {
            if (r == col || a[col][col] == 0.0) {
                continue;
            }
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < 4; ++c) {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    const double offset = a[0][3] / a[0][0];
    const double cos_coef = a[1][3] / a[1][1];
    const double sin_coef = a[2][3] / a[2][2];

    CosineFit fit;
    fit.offset = offset;
    fit.amplitude = std::hypot(cos_coef, sin_coef);
    // values = A + B cos(phi + phi0): cos coefficient B cos(phi0), sin
    // coefficient -B sin(phi0).
    fit.phase = std::atan2(-sin_coef, cos_coef);
    return fit;
}

PhaseCalibration ImagingEngine::calibrate(int sweep_steps) const {
    if (sweep_steps < 8) {
        throw ConfigError("calibration_steps must be at least 8");
    }
    // No-object sweep at the central (reference) pixel.
    const ObjectMap empty = ObjectMap::uniform({1.0, 0.0});
    const ModeGridEntry& ref =
        grid_.at(grid_.camera.width / 2, grid_.camera.height / 2);

    std::vector<double> phis(sweep_steps);
    std::vector<double> rates(sweep_steps);
    for (int k = 0; k < sweep_steps; ++k) {
        phis[k] = kTwoPi * k / sweep_steps;
        rates[k] = counting_rate(ref, phis[k], empty, cfg_);
    }
    const CosineFit fit = fit_cosine(phis, rates);
    if (!(fit.amplitude > 1e-12 * std::abs(fit.offset))) {
        throw DegenerateFringe("no usable fringe: pump amplitudes give a flat sweep");
    }
    PhaseCalibration cal;
    cal.phi_pc = wrap_angle(-fit.phase);
    cal.phi_pd = wrap_angle(cal.phi_pc + std::numbers::pi);
    return cal;
}

CameraImage ImagingEngine::difference_image(const ObjectMap& obj, const PhaseCalibration& cal,
                                            unsigned max_threads) const {
    CameraImage plus = render(cal.phi_pc, obj, max_threads);
    const CameraImage minus = render(cal.phi_pd, obj, max_threads);
    for (std::size_t i = 0; i < plus.rates.size(); ++i) {
        plus.rates[i] -= minus.rates[i];
    }
    return plus;
}

CameraImage ImagingEngine::sum_image(const ObjectMap& obj, const PhaseCalibration& cal,
                                     unsigned max_threads) const {
    CameraImage plus = render(cal.phi_pc, obj, max_threads);
    const CameraImage minus = render(cal.phi_pd, obj, max_threads);
    for (std::size_t i = 0; i < plus.rates.size(); ++i) {
        plus.rates[i] += minus.rates[i];
    }
    return plus;
}

double ImagingEngine::visibility(const ObjectMap& obj, int ix, int iy, int sweep_steps) const {
    const ModeGridEntry& entry = grid_.at(ix, iy);
    std::vector<double> phis(sweep_steps);
    std::vector<double> rates(sweep_steps);
    for (int k = 0; k < sweep_steps; ++k) {
        phis[k] = kTwoPi * k / sweep_steps;
        rates[k] = counting_rate(entry, phis[k], obj, cfg_);
    }
    const CosineFit fit = fit_cosine(phis, rates);
    // (max-min)/(max+min) of A + B cos is B/A.
    return fit.amplitude / fit.offset;
}

CameraImage render_image(double phi_p, const ObjectMap& obj, const OpticalConfig& cfg,
                         const CameraGeometry& camera, unsigned max_threads) {
    return ImagingEngine(cfg, camera).render(phi_p, obj, max_threads);
}

PhaseCalibration calibrate(const OpticalConfig& cfg, int sweep_steps) {
    return ImagingEngine(cfg, CameraGeometry{1, 1, 1e-5}).calibrate(sweep_steps);
}

std::uint64_t engine_config_hash(const OpticalConfig& cfg, const CameraGeometry& camera) {
    char buf[1024];
    std::snprintf(buf, sizeof buf,
                  "lambda_s=%.17g\nlambda_i=%.17g\nlambda_p=%.17g\nf_i=%.17g\nf_0=%.17g\n"
                  "n_s=%.17g\nn_i=%.17g\nn_0=%.17g\nl1=%.17g\nl2=%.17g\nl3=%.17g\n"
                  "v1=%.17g,%.17g\nv2=%.17g,%.17g\nphi_p=%.17g\ndelta_s0=%.17g\n"
                  "phi_i0=%.17g\nc0=%.17g\ntilt=%.17g\nsinc=%d\ncam=%d,%d,%.17g\n",
                  cfg.lambda_s, cfg.lambda_i, cfg.lambda_p, cfg.f_i, cfg.f_0, cfg.n_s, cfg.n_i,
                  cfg.n_0, cfg.crystal_dims[0], cfg.crystal_dims[1], cfg.crystal_dims[2],
                  cfg.v_p1.real(), cfg.v_p1.imag(), cfg.v_p2.real(), cfg.v_p2.imag(), cfg.phi_p,
                  cfg.delta_s0, cfg.phi_i0, cfg.c0, cfg.tilt, cfg.use_sinc_envelope ? 1 : 0,
                  camera.width, camera.height, camera.pitch);
    std::uint64_t h = 1469598103934665603ull;
    for (const char* p = buf; *p; ++p) {
        h ^= static_cast<unsigned char>(*p);
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace uqi
