#ifndef UQI_IMAGING_HPP
#define UQI_IMAGING_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "uqi/mode_space.hpp"
#include "uqi/optics.hpp"

namespace uqi {

/// Counting-rate image in the normalized units where the background term
/// is exactly |V1|^2 + |V2|^2. The rates of a rendered image are bounded
/// below by (|V1|-|V2|)^2; difference images reuse the container and may
/// go negative.
struct CameraImage {
    int width = 0;
    int height = 0;
    double pitch = 0.0;
    std::vector<double> rates; // row-major
    double phi_p_used = 0.0;
    std::uint64_t config_hash = 0;

    double& at(int ix, int iy) { return rates[static_cast<std::size_t>(iy) * width + ix]; }
    double at(int ix, int iy) const { return rates[static_cast<std::size_t>(iy) * width + ix]; }
};

struct PhaseCalibration {
    double phi_pc = 0.0; // constructive pump phase, [0, 2pi)
    double phi_pd = 0.0; // destructive pump phase = phi_pc + pi (mod 2pi)
};

/// Total interference phase at a grid entry, minus the -arg T term:
/// delta_s0 - phi_i0 + phi_p_knob + cfg.phi_p + arg V2 - arg V1 + c0 + tilt*qx.
double interference_phase(const ModeGridEntry& entry, double phi_p, const OpticalConfig& cfg);

/// Single-pixel counting rate:
///   |V1|^2 + |V2|^2 + 2 |V1||V2| w |T| cos(phase - arg T).
double counting_rate(const ModeGridEntry& entry, double phi_p, const ObjectMap& obj,
                     const OpticalConfig& cfg);

/// Holds a prebuilt grid so repeated renders reuse the mode geometry.
/// Pure per-pixel map; pixels are distributed over threads and the result
/// is bit-identical for any thread count.
class ImagingEngine {
  public:
    ImagingEngine(const OpticalConfig& cfg, const CameraGeometry& camera);

    const ModeGrid& grid() const { return grid_; }
    const OpticalConfig& config() const { return cfg_; }

    /// max_threads = 0 picks hardware concurrency.
    CameraImage render(double phi_p, const ObjectMap& obj, unsigned max_threads = 0) const;

    /// Sweeps the pump phase knob with no object and fits A + B cos(phi + phi0)
    /// at the central pixel. Throws DegenerateFringe when B < 1e-12 * A.
    PhaseCalibration calibrate(int sweep_steps = 64) const;

    CameraImage difference_image(const ObjectMap& obj, const PhaseCalibration& cal,
                                 unsigned max_threads = 0) const;
    CameraImage sum_image(const ObjectMap& obj, const PhaseCalibration& cal,
                          unsigned max_threads = 0) const;

    /// Fringe contrast (max-min)/(max+min) of the pump-phase sweep at one
    /// pixel, computed from the cosine fit: B/A.
    double visibility(const ObjectMap& obj, int ix, int iy, int sweep_steps = 64) const;

  private:
    OpticalConfig cfg_;
    ModeGrid grid_;
    std::uint64_t config_hash_ = 0;
};

/// One-shot wrappers.
CameraImage render_image(double phi_p, const ObjectMap& obj, const OpticalConfig& cfg,
                         const CameraGeometry& camera, unsigned max_threads = 0);
PhaseCalibration calibrate(const OpticalConfig& cfg, int sweep_steps = 64);

/// Least-squares fit of samples r_k = A + B cos(phi_k + phi0) taken at
/// uniformly spaced phases covering [0, 2pi). Returns (A, B, phi0), B >= 0.
struct CosineFit {
    double offset = 0.0;
    double amplitude = 0.0;
    double phase = 0.0;
};
CosineFit fit_cosine(const std::vector<double>& phi, const std::vector<double>& values);

/// FNV-1a over the canonical engine parameter text (optics + camera).
std::uint64_t engine_config_hash(const OpticalConfig& cfg, const CameraGeometry& camera);

} // namespace uqi

#endif
