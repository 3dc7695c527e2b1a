#ifndef UQI_MODE_SPACE_HPP
#define UQI_MODE_SPACE_HPP

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "uqi/errors.hpp"

namespace uqi {

inline constexpr double kSpeedOfLight = 299792458.0; // m/s

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }

/// All physical parameters of the two-crystal interferometer.
///
/// The wavelengths are mean (filter-center) values in meters. phi_p is a
/// static phase offset on the pump feeding the second crystal; the
/// calibration sweep turns the knob on top of it. delta_s0, phi_i0 and c0
/// are the folded propagation-phase constants; tilt re-exposes a linear
/// in-k phase (rad per rad/m of signal transverse wavenumber, along x) for
/// fringe visualisation.
struct OpticalConfig {
    double lambda_s = 0.0;  // signal mean wavelength (m)
    double lambda_i = 0.0;  // idler mean wavelength (m)
    double lambda_p = 0.0;  // pump mean wavelength (m); 0 means "derive"
    double f_i = 0.0;       // 4-f lens focal length (m)
    double f_0 = 0.0;       // camera lens focal length (m)
    double n_s = 1.0;       // crystal index at the signal wavelength
    double n_i = 1.0;       // crystal index at the idler wavelength
    double n_0 = 1.0;       // ambient index
    std::array<double, 3> crystal_dims = {1e-3, 1e-3, 1e-3}; // (l1,l2,l3) m
    std::complex<double> v_p1 = {1.0, 0.0}; // pump amplitude at crystal 1
    std::complex<double> v_p2 = {1.0, 0.0}; // pump amplitude at crystal 2
    double phi_p = 0.0;     // static pump-2 phase offset (rad)
    double delta_s0 = 0.0;  // signal path phase difference (rad)
    double phi_i0 = 0.0;    // idler propagation phase (rad)
    double c0 = 0.0;        // remaining folded constants (rad)
    double tilt = 0.0;      // rad per (rad/m), couples to signal qx
    bool use_sinc_envelope = false; // strict matching when false

    double omega_s() const;
    double omega_i() const;
    double omega_p() const; // omega_s + omega_i when lambda_p is derived

    /// Checks energy matching and positivity; throws ConfigError.
    void validate() const;

    /// lambda_p filled in from 1/lambda_p = 1/lambda_s + 1/lambda_i if zero.
    static OpticalConfig with_derived_pump(OpticalConfig cfg);
};

/// Plane-wave mode: transverse components, frequency, derived axial part.
/// The stored kz always satisfies qx^2+qy^2+kz^2 = (n*omega/c)^2 for the
/// medium the vector was built in, with kz > 0.
struct WaveVector {
    double qx = 0.0;    // rad/m
    double qy = 0.0;    // rad/m
    double omega = 0.0; // rad/s
    double kz = 0.0;    // rad/m

    /// Builds a forward-propagating vector in a medium of index n.
    /// Throws EvanescentMode when qx^2+qy^2 exceeds (n*omega/c)^2.
    static WaveVector from_transverse(double qx, double qy, double omega, double n);
};

/// (-qx, -qy, kz, omega): reflection about the optical axis.
WaveVector mirror(const WaveVector& k);

/// Idler partner of a signal mode under strict phase matching with an
/// axial pump: transverse components negated, omega = omega_p - omega_s,
/// kz from the ambient dispersion relation.
WaveVector phase_match_partner(const WaveVector& k_s, const OpticalConfig& cfg);

/// prod_n sinc(delta_k_n * l_n / 2); sinc(0) = 1.
double sinc_envelope(const std::array<double, 3>& delta_k, const OpticalConfig& cfg);

struct CameraGeometry {
    int width = 0;      // pixels
    int height = 0;     // pixels
    double pitch = 0.0; // m per pixel

    /// Center of pixel (ix, iy) relative to the optical axis; the axis
    /// pierces the grid center, so odd dimensions have an on-axis pixel.
    Vec2 pixel_position(int ix, int iy) const;
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    void validate() const;
};

struct ModeGridEntry {
    std::size_t pixel_index = 0;
    WaveVector signal;         // detected mode, labelled at the camera
    WaveVector idler;          // phase-matched partner (transverse = -q_s)
    WaveVector idler_mirrored; // mode illuminating the object (transverse = +q_s)
    Vec2 object_point;         // point on the object plane it probes (m)
    double weight = 1.0;       // phase-matching envelope, 1 in strict mode
};

/// One entry per camera pixel, row-major.
struct ModeGrid {
    CameraGeometry camera;
    std::vector<ModeGridEntry> entries;

    const ModeGridEntry& at(int ix, int iy) const {
        return entries[static_cast<std::size_t>(iy) * camera.width + ix];
    }
};

/// Assembles the pixel -> (signal, idler, object point) correspondence.
/// Throws EvanescentMode if any pixel angle puts the idler beyond its
/// light cone.
ModeGrid build_mode_grid(const OpticalConfig& cfg, const CameraGeometry& camera);

} // namespace uqi

#endif
