#include "uqi/magnification.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace uqi {

namespace {

constexpr int kWindowRadiusPx = 3;

// Opaque core with a raised-cosine ramp to full transmission. Radially
// symmetric, so a lattice-centered dot yields a quantization-free centroid.
double dot_transmission(double r, double r_core, double r_edge) {
    if (r <= r_core) {
        return 0.0;
    }
    if (r >= r_edge) {
        return 1.0;
    }
    const double u = (r - r_core) / (r_edge - r_core);
    const double s = std::sin(0.5 * std::numbers::pi * u);
    return s * s;
}

struct Centroid {
    double x = 0.0;
    double y = 0.0;
};

// Intensity-weighted centroid of the dip inside a disk window; weights are
// (background - value), zero outside the dip by construction.
Centroid dip_centroid(const CameraImage& img, int cx, int cy, double background) {
    double wsum = 0.0, xsum = 0.0, ysum = 0.0;
    for (int dy = -kWindowRadiusPx; dy <= kWindowRadiusPx; ++dy) {
        for (int dx = -kWindowRadiusPx; dx <= kWindowRadiusPx; ++dx) {
            if (dx * dx + dy * dy > kWindowRadiusPx * kWindowRadiusPx) {
                continue;
            }
            const int ix = cx + dx;
            const int iy = cy + dy;
            if (ix < 0 || ix >= img.width || iy < 0 || iy >= img.height) {
                continue;
            }
            const double w = std::max(0.0, background - img.at(ix, iy));
            wsum += w;
            xsum += w * ix;
            ysum += w * iy;
        }
    }
    if (wsum <= 0.0) {
        throw DotsUnresolved("window contains no dip signal");
    }
    return Centroid{xsum / wsum, ysum / wsum};
}

} // namespace

double magnification_theory(const OpticalConfig& cfg) {
    return (cfg.f_0 / cfg.f_i) * (cfg.lambda_s / cfg.lambda_i);
}

TwoDotObject make_two_dot_object(const OpticalConfig& cfg, const CameraGeometry& camera,
                                 int outer_pixel) {
    camera.validate();
    const int half_px = (camera.width - 1) / 2;
    const int min_outer = 2 * kWindowRadiusPx + 1;
    const int max_outer = half_px - kWindowRadiusPx;
    if (min_outer > max_outer) {
        throw ConfigError("camera too small for the two-dot probe (needs >= 21 columns)");
    }
    if (outer_pixel < 0) {
        outer_pixel = std::clamp(static_cast<int>(std::floor(0.85 * half_px)), min_outer,
                                 max_outer);
    }
    if (outer_pixel < min_outer || outer_pixel > max_outer) {
        throw ConfigError("magnify_outer_pixel must keep the dot windows separated and on camera");
    }

    // Place the outer dot exactly on the object point of a pixel center, and
    // align the object lattice so both dot centers are lattice points.
    const Vec2 rho_s = Vec2{outer_pixel * camera.pitch, 0.0};
    const Vec2 rho_o = object_point_for_pixel(rho_s, cfg);
    const double m_nominal = magnification_theory(cfg);
    const int steps = std::max(1, static_cast<int>(std::lround(rho_o.x / (camera.pitch / m_nominal))));
    const double obj_pitch = rho_o.x / steps;

    // One image pixel expressed in object units sets the dot size; the dip
    // must fit inside the fixed window.
    const double px = camera.pitch / m_nominal;
    const double r_core = 1.0 * px;
    const double r_edge = 2.4 * px;

    const int margin = static_cast<int>(std::ceil((r_edge + 2.0 * obj_pitch) / obj_pitch)) + 2;
    const int half_w = steps + margin;
    const int half_h = margin;

    ObjectMap map;
    map.width = 2 * half_w + 1;
    map.height = 2 * half_h + 1;
    map.pitch = obj_pitch;
    map.boundary = BoundaryPolicy::Transparent;
    map.values.assign(static_cast<std::size_t>(map.width) * map.height, {1.0, 0.0});

    const Vec2 dot_a{0.0, 0.0};
    const Vec2 dot_b{steps * obj_pitch, 0.0};
    for (int iy = 0; iy < map.height; ++iy) {
        for (int ix = 0; ix < map.width; ++ix) {
            const Vec2 p = map.sample_position(ix, iy);
            const double ra = std::hypot(p.x - dot_a.x, p.y - dot_a.y);
            const double rb = std::hypot(p.x - dot_b.x, p.y - dot_b.y);
            const double t = std::min(dot_transmission(ra, r_core, r_edge),
                                      dot_transmission(rb, r_core, r_edge));
            map.at(ix, iy) = {t, 0.0};
        }
    }
    return TwoDotObject{std::move(map), dot_a, dot_b};
}

MagnificationReport magnification_measured(const TwoDotObject& obj, const OpticalConfig& cfg,
                                           const CameraGeometry& camera) {
    const ImagingEngine engine(cfg, camera);
    const PhaseCalibration cal = engine.calibrate();
    const CameraImage diff = engine.difference_image(obj.map, cal);

    const double background = *std::max_element(diff.rates.begin(), diff.rates.end());

    // Two deepest local minima, at least a window apart.
    int min1 = -1, min2 = -1;
    double v1 = background, v2 = background;
    for (std::size_t i = 0; i < diff.rates.size(); ++i) {
        if (diff.rates[i] < v1) {
            v1 = diff.rates[i];
            min1 = static_cast<int>(i);
        }
    }
    if (min1 < 0) {
        throw DotsUnresolved("difference image is flat; no dots found");
    }
    const int x1 = min1 % diff.width, y1 = min1 / diff.width;
    for (std::size_t i = 0; i < diff.rates.size(); ++i) {
        const int x = static_cast<int>(i) % diff.width;
        const int y = static_cast<int>(i) / diff.width;
        const double d = std::hypot(double(x - x1), double(y - y1));
        if (d <= 2.0 * kWindowRadiusPx) {
            continue;
        }
        if (diff.rates[i] < v2) {
            v2 = diff.rates[i];
            min2 = static_cast<int>(i);
        }
    }
    if (min2 < 0) {
        throw DotsUnresolved("second dot overlaps the first dip window");
    }
    const int x2 = min2 % diff.width, y2 = min2 / diff.width;

    Centroid c1 = dip_centroid(diff, x1, y1, background);
    Centroid c2 = dip_centroid(diff, x2, y2, background);

    // The reference dot at the object origin images onto the camera center;
    // pair the centroids with the dots accordingly.
    const double cx = 0.5 * (diff.width - 1);
    const double cy = 0.5 * (diff.height - 1);
    const bool a_is_reference = std::hypot(obj.dot_a.x, obj.dot_a.y) <=
                                std::hypot(obj.dot_b.x, obj.dot_b.y);
    if (std::hypot(c1.x - cx, c1.y - cy) > std::hypot(c2.x - cx, c2.y - cy)) {
        std::swap(c1, c2);
    }
    const Vec2 ref_dot = a_is_reference ? obj.dot_a : obj.dot_b;
    const Vec2 outer_dot = a_is_reference ? obj.dot_b : obj.dot_a;

    const double image_sep = std::hypot(c2.x - c1.x, c2.y - c1.y) * camera.pitch;
    const double object_sep = std::hypot(outer_dot.x - ref_dot.x, outer_dot.y - ref_dot.y);
    if (object_sep <= 0.0) {
        throw ConfigError("two-dot object has coincident dots");
    }

    // Non-inversion check: camera displacement and object displacement point
    // the same way (positive magnification).
    const double proj = (c2.x - c1.x) * (outer_dot.x - ref_dot.x) +
                        (c2.y - c1.y) * (outer_dot.y - ref_dot.y);

    MagnificationReport report;
    report.m_theory = magnification_theory(cfg);
    report.m_measured = (proj >= 0.0 ? 1.0 : -1.0) * image_sep / object_sep;
    report.relative_error = std::abs(report.m_measured - report.m_theory) / report.m_theory;
    const double outer_px = std::max({std::hypot(c1.x - 0.5 * (diff.width - 1),
                                                 c1.y - 0.5 * (diff.height - 1)),
                                      std::hypot(c2.x - 0.5 * (diff.width - 1),
                                                 c2.y - 0.5 * (diff.height - 1))});
    report.max_angle_used =
        std::atan(((outer_px + kWindowRadiusPx) * camera.pitch) / cfg.f_0);
    return report;
}

double angle_relation_residual(double theta_s, const OpticalConfig& cfg) {
    const double theta_i = idler_angle_for_signal(theta_s, cfg);
    const double ws = cfg.omega_s();
    const double wi = cfg.omega_i();
    return std::abs(ws * theta_s - wi * theta_i) / (ws * theta_s);
}

} // namespace uqi
