#include "uqi/mode_space.hpp"

#include <cmath>
#include <numbers>

#include "uqi/optics.hpp"

namespace uqi {

namespace {

double vacuum_omega(double lambda) { return 2.0 * std::numbers::pi * kSpeedOfLight / lambda; }

double sinc(double x) {
    if (std::abs(x) < 1e-8) {
        return 1.0 - x * x / 6.0;
    }
    return std::sin(x) / x;
}

} // namespace

double OpticalConfig::omega_s() const { return vacuum_omega(lambda_s); }
double OpticalConfig::omega_i() const { return vacuum_omega(lambda_i); }

double OpticalConfig::omega_p() const {
    if (lambda_p > 0.0) {
        return vacuum_omega(lambda_p);
    }
    return omega_s() + omega_i();
}

OpticalConfig OpticalConfig::with_derived_pump(OpticalConfig cfg) {
    if (cfg.lambda_p <= 0.0 && cfg.lambda_s > 0.0 && cfg.lambda_i > 0.0) {
        cfg.lambda_p = 1.0 / (1.0 / cfg.lambda_s + 1.0 / cfg.lambda_i);
    }
    return cfg;
}

void OpticalConfig::validate() const {
    if (lambda_s <= 0.0 || lambda_i <= 0.0) {
        throw ConfigError("lambda_s and lambda_i must be positive");
    }
    if (f_i <= 0.0 || f_0 <= 0.0) {
        throw ConfigError("focal lengths f_i and f_0 must be positive");
    }
    if (n_s < 1.0 || n_i < 1.0 || n_0 < 1.0) {
        throw ConfigError("refractive indices must be >= 1");
    }
    for (double l : crystal_dims) {
        if (l <= 0.0) {
            throw ConfigError("crystal_dims must be positive");
        }
    }
    if (lambda_p > 0.0) {
        // Energy matching: 1/lambda_p = 1/lambda_s + 1/lambda_i.
        const double lhs = 1.0 / lambda_p;
        const double rhs = 1.0 / lambda_s + 1.0 / lambda_i;
        if (std::abs(lhs - rhs) > 1e-9 * lhs) {
            throw ConfigError("lambda_p violates energy matching with lambda_s, lambda_i");
        }
    }
}

WaveVector WaveVector::from_transverse(double qx, double qy, double omega, double n) {
    const double k = n * omega / kSpeedOfLight;
    const double kz_sq = k * k - qx * qx - qy * qy;
    if (kz_sq <= 0.0) {
        throw EvanescentMode("transverse wavenumber exceeds the light cone");
    }
    return WaveVector{qx, qy, omega, std::sqrt(kz_sq)};
}

WaveVector mirror(const WaveVector& k) { return WaveVector{-k.qx, -k.qy, k.omega, k.kz}; }

WaveVector phase_match_partner(const WaveVector& k_s, const OpticalConfig& cfg) {
    const double omega_i = cfg.omega_p() - k_s.omega;
    return WaveVector::from_transverse(-k_s.qx, -k_s.qy, omega_i, cfg.n_0);
}

double sinc_envelope(const std::array<double, 3>& delta_k, const OpticalConfig& cfg) {
    double w = 1.0;
    for (int n = 0; n < 3; ++n) {
        w *= sinc(delta_k[n] * cfg.crystal_dims[n] / 2.0);
    }
    return w;
}

Vec2 CameraGeometry::pixel_position(int ix, int iy) const {
    return Vec2{(ix - 0.5 * (width - 1)) * pitch, (iy - 0.5 * (height - 1)) * pitch};
}

void CameraGeometry::validate() const {
    if (width <= 0 || height <= 0) {
        throw ConfigError("camera_width and camera_height must be positive");
    }
    if (width > 4096 || height > 4096) {
        throw ConfigError("camera pixel count is limited to 4096 per axis");
    }
    if (pitch <= 0.0) {
        throw ConfigError("camera_pitch must be positive");
    }
}

namespace {

// Axial phase mismatch inside the crystal, referenced to the on-axis
// matched condition (the config carries no pump index, so the absolute
// collinear mismatch is taken as zero).
double axial_mismatch(double q_sq, const OpticalConfig& cfg) {
    const double ks = cfg.n_s * cfg.omega_s() / kSpeedOfLight;
    const double ki = cfg.n_i * cfg.omega_i() / kSpeedOfLight;
    const double ksz = std::sqrt(std::max(ks * ks - q_sq, 0.0));
    const double kiz = std::sqrt(std::max(ki * ki - q_sq, 0.0));
    return (ks - ksz) + (ki - kiz);
}

} // namespace

ModeGrid build_mode_grid(const OpticalConfig& cfg, const CameraGeometry& camera) {
    camera.validate();
    ModeGrid grid;
    grid.camera = camera;
    grid.entries.reserve(camera.pixel_count());

    const double k_signal = cfg.n_0 * cfg.omega_s() / kSpeedOfLight;
    for (int iy = 0; iy < camera.height; ++iy) {
        for (int ix = 0; ix < camera.width; ++ix) {
            const Vec2 rho_s = camera.pixel_position(ix, iy);
            const Vec2 theta = pixel_to_signal_angle(rho_s, cfg);
            // tan(theta) = q/kz per axis fixes the direction; the dispersion
            // relation fixes the length.
            const double tx = std::tan(theta.x);
            const double ty = std::tan(theta.y);
            const double kz = k_signal / std::sqrt(1.0 + tx * tx + ty * ty);

            ModeGridEntry entry;
            entry.pixel_index = static_cast<std::size_t>(iy) * camera.width + ix;
            entry.signal = WaveVector{kz * tx, kz * ty, cfg.omega_s(), kz};
            entry.idler = phase_match_partner(entry.signal, cfg);
            entry.idler_mirrored = mirror(entry.idler);
            entry.object_point = object_point_for_pixel(rho_s, cfg);
            if (cfg.use_sinc_envelope) {
                const double q_sq = entry.signal.qx * entry.signal.qx +
                                    entry.signal.qy * entry.signal.qy;
                entry.weight = sinc_envelope({0.0, 0.0, axial_mismatch(q_sq, cfg)}, cfg);
            } else {
                entry.weight = 1.0;
            }
            grid.entries.push_back(entry);
        }
    }
    return grid;
}

} // namespace uqi
