#ifndef UQI_MAGNIFICATION_HPP
#define UQI_MAGNIFICATION_HPP

#include "uqi/imaging.hpp"
#include "uqi/mode_space.hpp"
#include "uqi/optics.hpp"

namespace uqi {

struct MagnificationReport {
    double m_theory = 0.0;
    double m_measured = 0.0;
    double relative_error = 0.0;
    double max_angle_used = 0.0; // rad
};

/// Small-angle prediction M = (f_0/f_i) * (lambda_s/lambda_i).
double magnification_theory(const OpticalConfig& cfg);

/// Calibration target for image-based measurement: two opaque dots with a
/// smooth edge, one at the origin, one centered exactly on the object point
/// of a chosen camera pixel so centroid quantization cancels by symmetry.
struct TwoDotObject {
    ObjectMap map;
    Vec2 dot_a; // reference dot center (origin)
    Vec2 dot_b; // outer dot center (m)
};

/// Builds the probe object for a camera. outer_pixel picks the x-axis pixel
/// column holding the outer dot (defaults to ~85% of the half width).
TwoDotObject make_two_dot_object(const OpticalConfig& cfg, const CameraGeometry& camera,
                                 int outer_pixel = -1);

/// Renders the difference image of the two-dot probe, locates the two
/// deepest dips, and returns centroid separation / object separation.
/// Windows are fixed disks of radius 3 pixels; overlapping windows throw
/// DotsUnresolved.
MagnificationReport magnification_measured(const TwoDotObject& obj, const OpticalConfig& cfg,
                                           const CameraGeometry& camera);

/// Relative residual of the small-angle relation
/// |omega_s*theta_s - omega_i*theta_i| / (omega_s*theta_s), with theta_i
/// from the exact sine mapping. Grows monotonically with theta_s.
double angle_relation_residual(double theta_s, const OpticalConfig& cfg);

} // namespace uqi

#endif
