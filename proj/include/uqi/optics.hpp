#ifndef UQI_OPTICS_HPP
#define UQI_OPTICS_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include "uqi/mode_space.hpp"

namespace uqi {

enum class BoundaryPolicy {
    Transparent, // T = 1 outside the sampled rectangle
    Opaque,      // T = 0 outside the sampled rectangle
};

/// Complex transmission field T on a regular 2-D grid centered on the
/// optical axis. Column j maps to x = (j - (width-1)/2) * pitch, row i to
/// y = (i - (height-1)/2) * pitch. |T| <= 1 everywhere.
struct ObjectMap {
    int width = 0;
    int height = 0;
    double pitch = 0.0; // m between samples
    std::vector<std::complex<double>> values; // row-major, width*height
    BoundaryPolicy boundary = BoundaryPolicy::Transparent;

    static ObjectMap uniform(std::complex<double> t, int width = 1, int height = 1,
                             double pitch = 1e-4);

    std::complex<double>& at(int ix, int iy) {
        return values[static_cast<std::size_t>(iy) * width + ix];
    }
    std::complex<double> at(int ix, int iy) const {
        return values[static_cast<std::size_t>(iy) * width + ix];
    }
    Vec2 sample_position(int ix, int iy) const;

    /// Throws UnitarityViolation if any |T| > 1 + 1e-9.
    void validate() const;
};

/// Beamsplitter coefficients at one object point.
struct ObjectSample {
    std::complex<double> t;   // transmission
    double r_prime_mag = 0.0; // sqrt(1 - |T|^2)
};

/// Per-axis angle of the plane wave that the camera lens focuses at rho_s:
/// theta = atan(rho_component / f_0). Exact tangent, no small-angle cut.
Vec2 pixel_to_signal_angle(Vec2 rho_s, const OpticalConfig& cfg);

/// Snell refraction out of the crystal: asin(n_medium*sin(theta)/n_0),
/// sign preserving. Throws TotalInternalReflection.
double refract_out(double theta_internal, double n_medium, const OpticalConfig& cfg);

/// Inverse of refract_out.
double refract_in(double theta_external, double n_medium, const OpticalConfig& cfg);

/// External idler angle paired with an external signal angle. Snell at the
/// crystal faces cancels the crystal indices, leaving
/// sin(theta_i) = (omega_s/omega_i) * sin(theta_s) = (lambda_i/lambda_s) * sin(theta_s).
/// Sign preserving; throws EvanescentMode when the arcsine argument
/// exceeds 1.
double idler_angle_for_signal(double theta_s, const OpticalConfig& cfg);

/// Object-plane point probed by the pixel at rho_s, applied per axis:
/// rho_o = f_i * tan(idler_angle(atan(rho/f_0))). Same sign as rho_s on
/// each axis (the image is not inverted).
Vec2 object_point_for_pixel(Vec2 rho_s, const OpticalConfig& cfg);

/// Bilinear interpolation of T at a physical position; boundary policy
/// applies outside the sampled rectangle. The interpolated value stays in
/// the unit disk, so r_prime_mag is always real.
ObjectSample sample_object(const ObjectMap& obj, Vec2 rho);

} // namespace uqi

#endif
