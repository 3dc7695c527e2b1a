#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "uqi/fock.hpp"
#include "uqi/imaging.hpp"
#include "uqi/io.hpp"
#include "uqi/magnification.hpp"
#include "uqi/mode_space.hpp"

namespace uqi {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

unsigned thread_cap_from_env() {
    const char* env = std::getenv("IMAGER_THREADS");
    if (!env || !*env) {
        return 0; // auto
    }
    const long v = std::strtol(env, nullptr, 10);
    return v > 0 ? static_cast<unsigned>(v) : 0;
}

std::string hash_hex(std::uint64_t h) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// splitmix64; hand rolled so outputs are identical on every platform.
struct Rng {
    std::uint64_t state;
    std::uint64_t next_u64() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
};

ObjectMap load_or_default_object(const RunConfig& cfg) {
    if (!cfg.object_path) {
        return ObjectMap::uniform({1.0, 0.0});
    }
    return load_object(*cfg.object_path, cfg.object_format, cfg.object_pitch,
                       cfg.object_boundary);
}

// Random complex object covering the mapped field of view of a grid.
ObjectMap random_object(Rng& rng, const ModeGrid& grid, int size = 9) {
    double extent = 0.0;
    for (const auto& e : grid.entries) {
        extent = std::max({extent, std::abs(e.object_point.x), std::abs(e.object_point.y)});
    }
    ObjectMap obj;
    obj.width = size;
    obj.height = size;
    obj.pitch = extent > 0.0 ? 2.4 * extent / (size - 1) : 1e-4;
    obj.values.resize(static_cast<std::size_t>(size) * size);
    for (auto& t : obj.values) {
        t = std::polar(rng.uniform(), 2.0 * std::numbers::pi * rng.uniform());
    }
    return obj;
}

int cmd_simulate(const RunConfig& cfg, const fs::path& out_dir) {
    const ObjectMap obj = load_or_default_object(cfg);
    const unsigned threads = thread_cap_from_env();

    const ImagingEngine engine(cfg.optics, cfg.camera);
    const PhaseCalibration cal = engine.calibrate(cfg.calibration_steps);
    const CameraImage constructive = engine.render(cal.phi_pc, obj, threads);
    const CameraImage destructive = engine.render(cal.phi_pd, obj, threads);
    const CameraImage difference = engine.difference_image(obj, cal, threads);
    const CameraImage sum = engine.sum_image(obj, cal, threads);
    const double vis = engine.visibility(obj, cfg.camera.width / 2, cfg.camera.height / 2,
                                         cfg.calibration_steps);

    fs::create_directories(out_dir);
    const struct {
        const char* stem;
        const CameraImage* img;
    } outputs[] = {{"constructive", &constructive},
                   {"destructive", &destructive},
                   {"difference", &difference},
                   {"sum", &sum}};
    json files = json::object();
    for (const auto& o : outputs) {
        save_image(*o.img, out_dir / (std::string(o.stem) + ".csv"), ImageFormat::Csv);
        save_image(*o.img, out_dir / (std::string(o.stem) + ".pgm"), ImageFormat::Pgm);
        files[o.stem] = {std::string(o.stem) + ".csv", std::string(o.stem) + ".pgm"};
    }

    json summary;
    summary["command"] = "simulate";
    summary["config_hash"] = hash_hex(config_hash(cfg));
    summary["phi_pc"] = cal.phi_pc;
    summary["phi_pd"] = cal.phi_pd;
    summary["visibility_center"] = vis;
    summary["files"] = files;
    write_text_file(out_dir / "summary.json", summary.dump(2) + "\n");
    write_text_file(out_dir / "config_used.txt", serialize_config(cfg));
    return 0;
}

int cmd_calibrate(const RunConfig& cfg, const fs::path& out_dir) {
    const ImagingEngine engine(cfg.optics, cfg.camera);
    const PhaseCalibration cal = engine.calibrate(cfg.calibration_steps);

    fs::create_directories(out_dir);
    json out;
    out["command"] = "calibrate";
    out["config_hash"] = hash_hex(config_hash(cfg));
    out["phi_pc"] = cal.phi_pc;
    out["phi_pd"] = cal.phi_pd;
    write_text_file(out_dir / "calibration.json", out.dump(2) + "\n");
    write_text_file(out_dir / "config_used.txt", serialize_config(cfg));
    return 0;
}

int cmd_magnify(const RunConfig& cfg, const fs::path& out_dir) {
    const TwoDotObject probe =
        make_two_dot_object(cfg.optics, cfg.camera, cfg.magnify_outer_pixel);
    const MagnificationReport report = magnification_measured(probe, cfg.optics, cfg.camera);

    fs::create_directories(out_dir);
    json out;
    out["command"] = "magnify";
    out["config_hash"] = hash_hex(config_hash(cfg));
    out["m_theory"] = report.m_theory;
    out["m_measured"] = report.m_measured;
    out["relative_error"] = report.relative_error;
    out["max_angle_used"] = report.max_angle_used;
    write_text_file(out_dir / "magnification.json", out.dump(2) + "\n");
    write_text_file(out_dir / "config_used.txt", serialize_config(cfg));
    return 0;
}

int cmd_oracle_check(const RunConfig& cfg, const fs::path& out_dir) {
    const CameraGeometry small{cfg.oracle_grid, cfg.oracle_grid, cfg.camera.pitch};
    OpticalConfig optics = OpticalConfig::with_derived_pump(cfg.optics);
    optics.validate();
    const ModeGrid grid = build_mode_grid(optics, small);
    const ModeRegistry registry(grid.entries.size());
    const OracleSettings settings{cfg.oracle_scale, 2};

    Rng rng{cfg.seed};
    double max_dev = 0.0;
    const std::complex<double> pump_pairs[][2] = {
        {{1.0, 0.0}, {1.0, 0.0}},
        {{1.0, 0.0}, std::polar(0.37, 0.4)},
    };
    for (int o = 0; o < 5; ++o) {
        const ObjectMap obj = random_object(rng, grid);
        for (const auto& pumps : pump_pairs) {
            OpticalConfig run = optics;
            run.v_p1 = pumps[0];
            run.v_p2 = pumps[1];
            for (int p = 0; p < 8; ++p) {
                const double phi_p = 2.0 * std::numbers::pi * p / 8.0;
                const FockState state =
                    build_superposition_state(obj, run, grid, phi_p, settings);
                for (const auto& entry : grid.entries) {
                    const double analytic = counting_rate(entry, phi_p, obj, run);
                    const double oracle = oracle_rate(state, entry, registry, run, settings);
                    const double dev = std::abs(oracle - analytic) / std::abs(analytic);
                    max_dev = std::max(max_dev, dev);
                }
            }
        }
    }

    const ObjectMap empty = ObjectMap::uniform({1.0, 0.0});
    const double exponent = product_state_scaling_exponent(
        optics, empty, grid, {1e-4, 3e-4, 1e-3, 3e-3, 1e-2});

    const bool pass = max_dev < 1e-10 && exponent > 1.9 && exponent < 2.1;

    fs::create_directories(out_dir);
    json out;
    out["command"] = "oracle-check";
    out["config_hash"] = hash_hex(config_hash(cfg));
    out["grid"] = cfg.oracle_grid;
    out["max_rel_deviation"] = max_dev;
    out["fitted_exponent"] = exponent;
    out["pass"] = pass;
    write_text_file(out_dir / "oracle_check.json", out.dump(2) + "\n");
    write_text_file(out_dir / "config_used.txt", serialize_config(cfg));
    return pass ? 0 : 1;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Counting-rate image simulator for a two-crystal nonlinear interferometer"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::optional<double> phi_p_override;
    std::optional<int> oracle_grid_override;

    const char* names[] = {"simulate", "calibrate", "magnify", "oracle-check"};
    const char* descs[] = {
        "Render calibrated, difference and sum images of the configured object",
        "Find the constructive/destructive pump phases",
        "Measure image magnification with a two-dot probe",
        "Compare the analytic rate against the Fock-space oracle",
    };
    std::vector<CLI::App*> subs;
    for (int i = 0; i < 4; ++i) {
        CLI::App* sub = app.add_subcommand(names[i], descs[i]);
        sub->add_option("--config", config_path, "Path to key = value config file")->required();
        sub->add_option("--out", out_dir, "Output directory (default: current)");
        sub->add_option("--phi-p", phi_p_override, "Override the static pump phase (rad)");
        sub->add_option("--oracle-grid", oracle_grid_override,
                        "Override the oracle mode grid size per axis");
        subs.push_back(sub);
    }

    std::vector<const char*> argv;
    argv.push_back("imager");
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        RunConfig cfg = load_config(config_path);
        if (phi_p_override) {
            cfg.optics.phi_p = *phi_p_override;
        }
        if (oracle_grid_override) {
            cfg.oracle_grid = *oracle_grid_override;
        }
        cfg.validate();

        if (subs[0]->parsed()) {
            return cmd_simulate(cfg, out_dir);
        }
        if (subs[1]->parsed()) {
            return cmd_calibrate(cfg, out_dir);
        }
        if (subs[2]->parsed()) {
            return cmd_magnify(cfg, out_dir);
        }
        return cmd_oracle_check(cfg, out_dir);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 2;
    }
}

} // namespace uqi
