#ifndef UQI_IO_HPP
#define UQI_IO_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uqi/imaging.hpp"
#include "uqi/mode_space.hpp"
#include "uqi/optics.hpp"

namespace uqi {

enum class ObjectFormat { Pgm, Csv };
enum class ImageFormat { Pgm, Csv };

/// Fully parsed run description: optics + camera + object source + output
/// knobs. Built from a flat `key = value` config file; unknown keys are
/// hard errors.
struct RunConfig {
    OpticalConfig optics;
    CameraGeometry camera;
    std::optional<std::string> object_path; // empty: uniform transparent object
    ObjectFormat object_format = ObjectFormat::Pgm;
    double object_pitch = 0.0; // m, required when object_path is set
    BoundaryPolicy object_boundary = BoundaryPolicy::Transparent;
    int oracle_grid = 4;       // modes per axis for oracle-check
    double oracle_scale = 1e-3;
    std::uint64_t seed = 12345;
    int calibration_steps = 64;
    int magnify_outer_pixel = -1; // -1: auto placement

    void validate() const;
};

/// Parses flat `key = value` text ('#' comments, blank lines allowed).
/// Unknown keys, unreadable values and unresolvable paths throw
/// ConfigError naming the key.
RunConfig parse_config_text(const std::string& text,
                            const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

/// Canonical serialization: sorted keys, one per line, %.17g numbers.
/// Reparsing the output reproduces the config and therefore its hash.
std::string serialize_config(const RunConfig& cfg);

/// FNV-1a 64 over the canonical serialization.
std::uint64_t config_hash(const RunConfig& cfg);
std::uint64_t fnv1a64(const std::string& text);

/// PGM (P2/P5, maxval 255): |T| = value/255, arg T = 0.
/// CSV: header `x,y,mag,phase_rad`, integer sample coordinates, complete
/// grid coverage required. Magnitudes above 1 + 1e-9 throw
/// UnitarityViolation; malformed input throws ParseError with a location.
ObjectMap load_object(const std::filesystem::path& path, ObjectFormat format,
                      double pitch, BoundaryPolicy boundary = BoundaryPolicy::Transparent);

/// CSV: raw rates, row-major, %.17g (bit-exact round trip).
/// PGM: affine map to 0..255 plus a `<path>.range.txt` sidecar holding
/// "min max"; a flat image maps to 255 with the degenerate range recorded.
void save_image(const CameraImage& img, const std::filesystem::path& path, ImageFormat format);

/// Reads back a CSV written by save_image.
CameraImage load_image_csv(const std::filesystem::path& path);

/// Writes via a temp file and rename, so readers never see partial content.
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Entry point behind the `imager` binary. args excludes argv[0].
/// Returns 0 on success, 1 on validation/config failure, 2 on internal
/// error. Never leaves partial outputs behind on failure.
int run_cli(const std::vector<std::string>& args);

} // namespace uqi

#endif
