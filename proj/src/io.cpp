#include "uqi/io.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace uqi {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse number from '" + value + "'");
    }
}

long parse_long(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse integer from '" + value + "'");
    }
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void RunConfig::validate() const {
    OpticalConfig::with_derived_pump(optics).validate();
    camera.validate();
    if (object_path) {
        if (object_pitch <= 0.0) {
            throw ConfigError("object_pitch must be positive when object_path is set");
        }
        if (!fs::exists(*object_path)) {
            throw ConfigError("object_path does not exist: " + *object_path);
        }
    }
    if (oracle_grid < 1 || oracle_grid > 16) {
        throw ConfigError("oracle_grid must be between 1 and 16");
    }
    if (oracle_scale <= 0.0 || oracle_scale > 0.1) {
        throw ConfigError("oracle_scale must be in (0, 0.1]");
    }
    if (calibration_steps < 8) {
        throw ConfigError("calibration_steps must be at least 8");
    }
}

RunConfig parse_config_text(const std::string& text, const fs::path& base_dir) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') {
            continue;
        }
        const auto pos = stripped.find('=');
        if (pos == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected 'key = value', got '" + stripped + "'");
        }
        const std::string key = trim(stripped.substr(0, pos));
        const std::string value = trim(stripped.substr(pos + 1));
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        }
        if (kv.count(key)) {
            throw ConfigError("config key '" + key + "' given twice");
        }
        kv[key] = value;
    }

    RunConfig cfg;
    double pump1_amp = 1.0, pump1_phase = 0.0, pump2_amp = 1.0, pump2_phase = 0.0;

    auto take = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) {
            return std::nullopt;
        }
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto take_double = [&](const char* key, double& target) {
        if (auto v = take(key)) {
            target = parse_double(key, *v);
        }
    };
    auto take_int = [&](const char* key, int& target) {
        if (auto v = take(key)) {
            target = static_cast<int>(parse_long(key, *v));
        }
    };

    take_double("lambda_s", cfg.optics.lambda_s);
    take_double("lambda_i", cfg.optics.lambda_i);
    take_double("lambda_p", cfg.optics.lambda_p);
    take_double("f_i", cfg.optics.f_i);
    take_double("f_0", cfg.optics.f_0);
    take_double("n_s", cfg.optics.n_s);
    take_double("n_i", cfg.optics.n_i);
    take_double("n_0", cfg.optics.n_0);
    take_double("crystal_l1", cfg.optics.crystal_dims[0]);
    take_double("crystal_l2", cfg.optics.crystal_dims[1]);
    take_double("crystal_l3", cfg.optics.crystal_dims[2]);
    take_double("pump1_amp", pump1_amp);
    take_double("pump1_phase", pump1_phase);
    take_double("pump2_amp", pump2_amp);
    take_double("pump2_phase", pump2_phase);
    take_double("phi_p", cfg.optics.phi_p);
    take_double("delta_s0", cfg.optics.delta_s0);
    take_double("phi_i0", cfg.optics.phi_i0);
    take_double("c0", cfg.optics.c0);
    take_double("tilt", cfg.optics.tilt);
    if (auto v = take("envelope")) {
        if (*v == "strict") {
            cfg.optics.use_sinc_envelope = false;
        } else if (*v == "sinc") {
            cfg.optics.use_sinc_envelope = true;
        } else {
            throw ConfigError("config key 'envelope': expected 'strict' or 'sinc'");
        }
    }
    take_int("camera_width", cfg.camera.width);
    take_int("camera_height", cfg.camera.height);
    take_double("camera_pitch", cfg.camera.pitch);
    if (auto v = take("object_path")) {
        fs::path p = *v;
        if (p.is_relative()) {
            p = base_dir / p;
        }
        cfg.object_path = fs::weakly_canonical(p).string();
        const std::string ext = p.extension().string();
        cfg.object_format = (ext == ".csv") ? ObjectFormat::Csv : ObjectFormat::Pgm;
    }
    if (auto v = take("object_format")) {
        if (*v == "pgm") {
            cfg.object_format = ObjectFormat::Pgm;
        } else if (*v == "csv") {
            cfg.object_format = ObjectFormat::Csv;
        } else {
            throw ConfigError("config key 'object_format': expected 'pgm' or 'csv'");
        }
    }
    take_double("object_pitch", cfg.object_pitch);
    if (auto v = take("object_boundary")) {
        if (*v == "transparent") {
            cfg.object_boundary = BoundaryPolicy::Transparent;
        } else if (*v == "opaque") {
            cfg.object_boundary = BoundaryPolicy::Opaque;
        } else {
            throw ConfigError("config key 'object_boundary': expected 'transparent' or 'opaque'");
        }
    }
    take_int("oracle_grid", cfg.oracle_grid);
    take_double("oracle_scale", cfg.oracle_scale);
    if (auto v = take("seed")) {
        cfg.seed = static_cast<std::uint64_t>(parse_long("seed", *v));
    }
    take_int("calibration_steps", cfg.calibration_steps);
    take_int("magnify_outer_pixel", cfg.magnify_outer_pixel);

    if (!kv.empty()) {
        throw ConfigError("unknown config key '" + kv.begin()->first + "'");
    }

    cfg.optics.v_p1 = std::polar(pump1_amp, pump1_phase);
    cfg.optics.v_p2 = std::polar(pump2_amp, pump2_phase);
    cfg.optics = OpticalConfig::with_derived_pump(cfg.optics);
    return cfg;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path.parent_path());
}

std::string serialize_config(const RunConfig& cfg) {
    // Keys in alphabetical order; reparsing this text reproduces the config.
    std::map<std::string, std::string> kv;
    kv["c0"] = format_double(cfg.optics.c0);
    kv["calibration_steps"] = std::to_string(cfg.calibration_steps);
    kv["camera_height"] = std::to_string(cfg.camera.height);
    kv["camera_pitch"] = format_double(cfg.camera.pitch);
    kv["camera_width"] = std::to_string(cfg.camera.width);
    kv["crystal_l1"] = format_double(cfg.optics.crystal_dims[0]);
    kv["crystal_l2"] = format_double(cfg.optics.crystal_dims[1]);
    kv["crystal_l3"] = format_double(cfg.optics.crystal_dims[2]);
    kv["delta_s0"] = format_double(cfg.optics.delta_s0);
    kv["envelope"] = cfg.optics.use_sinc_envelope ? "sinc" : "strict";
    kv["f_0"] = format_double(cfg.optics.f_0);
    kv["f_i"] = format_double(cfg.optics.f_i);
    kv["lambda_i"] = format_double(cfg.optics.lambda_i);
    kv["lambda_p"] = format_double(cfg.optics.lambda_p);
    kv["lambda_s"] = format_double(cfg.optics.lambda_s);
    kv["magnify_outer_pixel"] = std::to_string(cfg.magnify_outer_pixel);
    kv["n_0"] = format_double(cfg.optics.n_0);
    kv["n_i"] = format_double(cfg.optics.n_i);
    kv["n_s"] = format_double(cfg.optics.n_s);
    if (cfg.object_path) {
        kv["object_boundary"] =
            cfg.object_boundary == BoundaryPolicy::Transparent ? "transparent" : "opaque";
        kv["object_format"] = cfg.object_format == ObjectFormat::Pgm ? "pgm" : "csv";
        kv["object_path"] = *cfg.object_path;
        kv["object_pitch"] = format_double(cfg.object_pitch);
    }
    kv["oracle_grid"] = std::to_string(cfg.oracle_grid);
    kv["oracle_scale"] = format_double(cfg.oracle_scale);
    kv["phi_p"] = format_double(cfg.optics.phi_p);
    kv["pump1_amp"] = format_double(std::abs(cfg.optics.v_p1));
    kv["pump1_phase"] = format_double(std::arg(cfg.optics.v_p1));
    kv["pump2_amp"] = format_double(std::abs(cfg.optics.v_p2));
    kv["pump2_phase"] = format_double(std::arg(cfg.optics.v_p2));
    kv["seed"] = std::to_string(cfg.seed);
    kv["tilt"] = format_double(cfg.optics.tilt);

    std::string out;
    for (const auto& [k, v] : kv) {
        out += k;
        out += " = ";
        out += v;
        out += "\n";
    }
    return out;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t config_hash(const RunConfig& cfg) { return fnv1a64(serialize_config(cfg)); }

namespace {

// Reads one PGM header token, skipping whitespace and '#' comments.
std::string pgm_token(std::istream& in, const fs::path& path) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) {
                break;
            }
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    if (tok.empty()) {
        throw ParseError("unexpected end of PGM header in " + path.string());
    }
    return tok;
}

int pgm_int(std::istream& in, const fs::path& path, const char* what) {
    const std::string tok = pgm_token(in, path);
    try {
        return std::stoi(tok);
    } catch (const std::exception&) {
        throw ParseError(std::string("bad PGM ") + what + " '" + tok + "' in " + path.string());
    }
}

ObjectMap load_object_pgm(const fs::path& path, double pitch, BoundaryPolicy boundary) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    const std::string magic = pgm_token(in, path);
    if (magic != "P2" && magic != "P5") {
        throw ParseError("not a P2/P5 PGM file: " + path.string());
    }
    const int width = pgm_int(in, path, "width");
    const int height = pgm_int(in, path, "height");
    const int maxval = pgm_int(in, path, "maxval");
    if (width <= 0 || height <= 0) {
        throw ParseError("non-positive PGM dimensions in " + path.string());
    }
    if (maxval != 255) {
        throw ParseError("only 8-bit PGM (maxval 255) is supported: " + path.string());
    }

    ObjectMap map;
    map.width = width;
    map.height = height;
    map.pitch = pitch;
    map.boundary = boundary;
    map.values.resize(static_cast<std::size_t>(width) * height);

    if (magic == "P2") {
        for (std::size_t i = 0; i < map.values.size(); ++i) {
            int v = 0;
            if (!(in >> v)) {
                throw ParseError("PGM pixel " + std::to_string(i) + " missing in " + path.string());
            }
            if (v < 0 || v > 255) {
                throw ParseError("PGM pixel " + std::to_string(i) + " out of range in " +
                                 path.string());
            }
            map.values[i] = {v / 255.0, 0.0};
        }
    } else {
        // P5: exactly one whitespace after maxval, then raw bytes.
        std::vector<unsigned char> bytes(map.values.size());
        in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (static_cast<std::size_t>(in.gcount()) != bytes.size()) {
            throw ParseError("PGM data truncated at byte " + std::to_string(in.gcount()) +
                             " in " + path.string());
        }
        for (std::size_t i = 0; i < bytes.size(); ++i) {
            map.values[i] = {bytes[i] / 255.0, 0.0};
        }
    }
    return map;
}

ObjectMap load_object_csv(const fs::path& path, double pitch, BoundaryPolicy boundary) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("empty object CSV: " + path.string());
    }
    if (trim(line) != "x,y,mag,phase_rad") {
        throw ParseError("object CSV line 1: expected header 'x,y,mag,phase_rad' in " +
                         path.string());
    }

    struct Sample {
        int x;
        int y;
        std::complex<double> t;
    };
    std::vector<Sample> samples;
    int max_x = -1, max_y = -1;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty()) {
            continue;
        }
        std::istringstream row(stripped);
        std::string field;
        double vals[4];
        for (int f = 0; f < 4; ++f) {
            if (!std::getline(row, field, ',')) {
                throw ParseError("object CSV line " + std::to_string(line_no) +
                                 ": expected 4 fields");
            }
            try {
                std::size_t pos = 0;
                vals[f] = std::stod(trim(field), &pos);
            } catch (const std::exception&) {
                throw ParseError("object CSV line " + std::to_string(line_no) + ": bad number '" +
                                 trim(field) + "'");
            }
        }
        if (std::getline(row, field, ',')) {
            throw ParseError("object CSV line " + std::to_string(line_no) + ": too many fields");
        }
        const int x = static_cast<int>(vals[0]);
        const int y = static_cast<int>(vals[1]);
        if (x < 0 || y < 0 || vals[0] != x || vals[1] != y) {
            throw ParseError("object CSV line " + std::to_string(line_no) +
                             ": x,y must be nonnegative integers");
        }
        if (vals[2] > 1.0 + 1e-9) {
            throw UnitarityViolation("object CSV line " + std::to_string(line_no) + ": |T| = " +
                                     format_double(vals[2]) + " exceeds 1");
        }
        samples.push_back({x, y, std::polar(vals[2], vals[3])});
        max_x = std::max(max_x, x);
        max_y = std::max(max_y, y);
    }
    if (samples.empty()) {
        throw ParseError("object CSV has no samples: " + path.string());
    }

    ObjectMap map;
    map.width = max_x + 1;
    map.height = max_y + 1;
    map.pitch = pitch;
    map.boundary = boundary;
    map.values.assign(static_cast<std::size_t>(map.width) * map.height, {0.0, 0.0});
    std::vector<bool> seen(map.values.size(), false);
    for (const auto& s : samples) {
        const std::size_t i = static_cast<std::size_t>(s.y) * map.width + s.x;
        if (seen[i]) {
            throw ParseError("object CSV: duplicate sample (" + std::to_string(s.x) + "," +
                             std::to_string(s.y) + ")");
        }
        seen[i] = true;
        map.values[i] = s.t;
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) {
            throw ParseError("object CSV: missing sample (" + std::to_string(i % map.width) + "," +
                             std::to_string(i / map.width) + ")");
        }
    }
    return map;
}

} // namespace

void write_text_file(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) {
            throw IoError("cannot write " + tmp.string());
        }
        out << content;
        if (!out) {
            throw IoError("write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, path);
}

ObjectMap load_object(const fs::path& path, ObjectFormat format, double pitch,
                      BoundaryPolicy boundary) {
    if (pitch <= 0.0) {
        throw ConfigError("object_pitch must be positive");
    }
    ObjectMap map = format == ObjectFormat::Pgm ? load_object_pgm(path, pitch, boundary)
                                                : load_object_csv(path, pitch, boundary);
    map.validate();
    return map;
}

void save_image(const CameraImage& img, const fs::path& path, ImageFormat format) {
    if (format == ImageFormat::Csv) {
        std::string out;
        out.reserve(img.rates.size() * 20);
        for (int iy = 0; iy < img.height; ++iy) {
            for (int ix = 0; ix < img.width; ++ix) {
                if (ix) {
                    out += ',';
                }
                out += format_double(img.at(ix, iy));
            }
            out += '\n';
        }
        write_text_file(path, out);
        return;
    }

    // PGM P2 with the affine rate->gray map recorded in a sidecar.
    const auto [lo_it, hi_it] = std::minmax_element(img.rates.begin(), img.rates.end());
    const double lo = img.rates.empty() ? 0.0 : *lo_it;
    const double hi = img.rates.empty() ? 0.0 : *hi_it;

    std::string out = "P2\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                      "\n255\n";
    for (int iy = 0; iy < img.height; ++iy) {
        for (int ix = 0; ix < img.width; ++ix) {
            int gray = 255;
            if (hi > lo) {
                gray = static_cast<int>(std::lround((img.at(ix, iy) - lo) / (hi - lo) * 255.0));
            }
            out += std::to_string(gray);
            out += (ix + 1 == img.width) ? '\n' : ' ';
        }
    }
    write_text_file(path, out);
    write_text_file(path.string() + ".range.txt", format_double(lo) + " " + format_double(hi) + "\n");
}

CameraImage load_image_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    CameraImage img;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        std::istringstream row(line);
        std::string field;
        int count = 0;
        while (std::getline(row, field, ',')) {
            try {
                img.rates.push_back(std::stod(field));
            } catch (const std::exception&) {
                throw ParseError("image CSV line " + std::to_string(line_no) + ": bad number '" +
                                 field + "'");
            }
            ++count;
        }
        if (img.width == 0) {
            img.width = count;
        } else if (count != img.width) {
            throw ParseError("image CSV line " + std::to_string(line_no) + ": ragged row");
        }
        ++img.height;
    }
    return img;
}

} // namespace uqi
