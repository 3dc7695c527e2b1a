#include "uqi/optics.hpp"

#include <algorithm>
#include <cmath>

namespace uqi {

ObjectMap ObjectMap::uniform(std::complex<double> t, int width, int height, double pitch) {
    ObjectMap map;
    map.width = width;
    map.height = height;
    map.pitch = pitch;
    map.values.assign(static_cast<std::size_t>(width) * height, t);
    return map;
}

Vec2 ObjectMap::sample_position(int ix, int iy) const {
    return Vec2{(ix - 0.5 * (width - 1)) * pitch, (iy - 0.5 * (height - 1)) * pitch};
}

void ObjectMap::validate() const {
    if (width <= 0 || height <= 0 || pitch <= 0.0) {
        throw ConfigError("object map needs positive dimensions and pitch");
    }
    if (values.size() != static_cast<std::size_t>(width) * height) {
        throw ConfigError("object map value count does not match its dimensions");
    }
    for (const auto& t : values) {
        if (std::abs(t) > 1.0 + 1e-9) {
            throw UnitarityViolation("object transmission |T| exceeds 1");
        }
    }
}

Vec2 pixel_to_signal_angle(Vec2 rho_s, const OpticalConfig& cfg) {
    return Vec2{std::atan(rho_s.x / cfg.f_0), std::atan(rho_s.y / cfg.f_0)};
}

double refract_out(double theta_internal, double n_medium, const OpticalConfig& cfg) {
    const double s = n_medium * std::sin(theta_internal) / cfg.n_0;
    if (std::abs(s) > 1.0) {
        throw TotalInternalReflection("internal angle beyond the critical angle");
    }
    return std::asin(s);
}

double refract_in(double theta_external, double n_medium, const OpticalConfig& cfg) {
    return std::asin(cfg.n_0 * std::sin(theta_external) / n_medium);
}

double idler_angle_for_signal(double theta_s, const OpticalConfig& cfg) {
    // omega_s/omega_i = lambda_i/lambda_s.
    const double s = (cfg.lambda_i / cfg.lambda_s) * std::sin(theta_s);
    if (std::abs(s) > 1.0) {
        throw EvanescentMode("no propagating idler for this signal angle");
    }
    return std::asin(s);
}

Vec2 object_point_for_pixel(Vec2 rho_s, const OpticalConfig& cfg) {
    const Vec2 theta_s = pixel_to_signal_angle(rho_s, cfg);
    const double theta_ix = idler_angle_for_signal(theta_s.x, cfg);
    const double theta_iy = idler_angle_for_signal(theta_s.y, cfg);
    return Vec2{cfg.f_i * std::tan(theta_ix), cfg.f_i * std::tan(theta_iy)};
}

namespace {

std::complex<double> boundary_value(const ObjectMap& obj) {
    return obj.boundary == BoundaryPolicy::Transparent ? std::complex<double>{1.0, 0.0}
                                                       : std::complex<double>{0.0, 0.0};
}

} // namespace

ObjectSample sample_object(const ObjectMap& obj, Vec2 rho) {
    const double half_w = 0.5 * (obj.width - 1) * obj.pitch;
    const double half_h = 0.5 * (obj.height - 1) * obj.pitch;

    std::complex<double> t;
    if (rho.x < -half_w || rho.x > half_w || rho.y < -half_h || rho.y > half_h) {
        t = boundary_value(obj);
    } else {
        const double fx = (rho.x + half_w) / obj.pitch;
        const double fy = (rho.y + half_h) / obj.pitch;
        const int ix = std::clamp(static_cast<int>(fx), 0, std::max(obj.width - 2, 0));
        const int iy = std::clamp(static_cast<int>(fy), 0, std::max(obj.height - 2, 0));
        const double ux = fx - ix;
        const double uy = fy - iy;
        const int ix1 = std::min(ix + 1, obj.width - 1);
        const int iy1 = std::min(iy + 1, obj.height - 1);
        // Real and imaginary parts interpolate independently; a convex
        // combination of unit-disk values stays in the unit disk.
        t = (1.0 - ux) * (1.0 - uy) * obj.at(ix, iy) + ux * (1.0 - uy) * obj.at(ix1, iy) +
            (1.0 - ux) * uy * obj.at(ix, iy1) + ux * uy * obj.at(ix1, iy1);
    }

    const double mag_sq = std::min(std::norm(t), 1.0);
    return ObjectSample{t, std::sqrt(1.0 - mag_sq)};
}

} // namespace uqi
