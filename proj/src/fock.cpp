#include "uqi/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace uqi {

namespace {

constexpr double kPruneThreshold = 1e-15;

// Occupation keys keep only nonzero counts, sorted by mode index.
int occupation_of(const OccKey& occ, std::size_t mode) {
    for (const auto& [m, c] : occ) {
        if (m == mode) {
            return c;
        }
    }
    return 0;
}

OccKey with_occupation(OccKey occ, std::size_t mode, int count) {
    auto it = std::find_if(occ.begin(), occ.end(), [&](const auto& p) { return p.first == mode; });
    if (count == 0) {
        if (it != occ.end()) {
            occ.erase(it);
        }
        return occ;
    }
    if (it != occ.end()) {
        it->second = static_cast<std::uint8_t>(count);
        return occ;
    }
    occ.emplace_back(mode, static_cast<std::uint8_t>(count));
    std::sort(occ.begin(), occ.end());
    return occ;
}

int total_occupation(const OccKey& occ) {
    int n = 0;
    for (const auto& [m, c] : occ) {
        n += c;
    }
    return n;
}

} // namespace

ModeRegistry::ModeRegistry(std::size_t grid_entries) : grid_entries_(grid_entries) {}

std::size_t ModeRegistry::index(ModeKind kind, std::size_t grid_index) const {
    return grid_index * 4 + static_cast<std::size_t>(kind);
}

ModeLabel ModeRegistry::label(std::size_t mode_index) const {
    return ModeLabel{static_cast<ModeKind>(mode_index % 4), mode_index / 4};
}

FockState FockState::vacuum(int n_max) {
    FockState state(n_max);
    state.add_term({}, {1.0, 0.0});
    return state;
}

void FockState::add_term(const OccKey& occ, std::complex<double> amplitude) {
    for (const auto& [m, c] : occ) {
        if (c > n_max_) {
            throw TruncationOverflow("occupation above n_max");
        }
    }
    auto [it, inserted] = terms_.try_emplace(occ, amplitude);
    if (!inserted) {
        it->second += amplitude;
    }
    if (std::abs(it->second) < kPruneThreshold) {
        terms_.erase(it);
    }
}

FockState FockState::apply_creation(std::size_t mode) const {
    FockState out(n_max_);
    for (const auto& [occ, amp] : terms_) {
        const int n = occupation_of(occ, mode);
        if (n + 1 > n_max_) {
            throw TruncationOverflow("creation operator would exceed n_max");
        }
        out.add_term(with_occupation(occ, mode, n + 1), amp * std::sqrt(n + 1.0));
    }
    return out;
}

FockState FockState::apply_annihilation(std::size_t mode) const {
    FockState out(n_max_);
    for (const auto& [occ, amp] : terms_) {
        const int n = occupation_of(occ, mode);
        if (n == 0) {
            continue; // a|0> = 0
        }
        out.add_term(with_occupation(occ, mode, n - 1), amp * std::sqrt(static_cast<double>(n)));
    }
    return out;
}

FockState& FockState::operator+=(const FockState& other) {
    for (const auto& [occ, amp] : other.terms_) {
        add_term(occ, amp);
    }
    return *this;
}

FockState& FockState::operator*=(std::complex<double> scale) {
    for (auto& [occ, amp] : terms_) {
        amp *= scale;
    }
    return *this;
}

double FockState::squared_norm() const {
    double n = 0.0;
    for (const auto& [occ, amp] : terms_) {
        n += std::norm(amp);
    }
    return n;
}

std::complex<double> FockState::amplitude(const OccKey& occ) const {
    auto it = terms_.find(occ);
    return it == terms_.end() ? std::complex<double>{0.0, 0.0} : it->second;
}

int FockState::max_total_occupation() const {
    int n = 0;
    for (const auto& [occ, amp] : terms_) {
        n = std::max(n, total_occupation(occ));
    }
    return n;
}

namespace {

struct PairAmplitudes {
    std::complex<double> g1; // pair_scale * V_P1
    std::complex<double> g2; // pair_scale * V_P2 * e^{i(phi_knob + cfg.phi_p)}
};

PairAmplitudes pair_amplitudes(const OpticalConfig& cfg, double phi_p,
                               const OracleSettings& settings) {
    const std::complex<double> knob = std::polar(1.0, phi_p + cfg.phi_p);
    return PairAmplitudes{settings.pair_scale * cfg.v_p1, settings.pair_scale * cfg.v_p2 * knob};
}

// First-crystal pair term for grid entry k: G1 w_k |1_S1k 1_I1k>.
// The detected S1 label and the object-side I1 label both live on entry k;
// the 4-f relays on the two arms map the emitted pair onto exactly this
// labelled pair, with the relay phases folded into the config constants.
void add_crystal1_terms(FockState& state, const ModeGrid& grid, const ModeRegistry& reg,
                        std::complex<double> g1) {
    for (std::size_t k = 0; k < grid.entries.size(); ++k) {
        const auto& entry = grid.entries[k];
        OccKey occ;
        occ = with_occupation(occ, reg.index(ModeKind::S1, k), 1);
        occ = with_occupation(occ, reg.index(ModeKind::I1, k), 1);
        state.add_term(occ, g1 * entry.weight);
    }
}

// Second-crystal branch for entry k, split by the object beamsplitter:
// G2 w_k e^{-i phi_i0} [ T*(rho_O) |1_I1k 1_S2k> + R'*(rho_O) |1_S2k 1_Envk> ].
void add_crystal2_terms(FockState& state, const ObjectMap& obj, const OpticalConfig& cfg,
                        const ModeGrid& grid, const ModeRegistry& reg, std::complex<double> g2) {
    const std::complex<double> prop = std::polar(1.0, -cfg.phi_i0);
    for (std::size_t k = 0; k < grid.entries.size(); ++k) {
        const auto& entry = grid.entries[k];
        const ObjectSample s = sample_object(obj, entry.object_point);
        const std::complex<double> base = g2 * entry.weight * prop;

        OccKey transmitted;
        transmitted = with_occupation(transmitted, reg.index(ModeKind::I1, k), 1);
        transmitted = with_occupation(transmitted, reg.index(ModeKind::S2, k), 1);
        state.add_term(transmitted, base * std::conj(s.t));

        if (s.r_prime_mag != 0.0) {
            OccKey reflected;
            reflected = with_occupation(reflected, reg.index(ModeKind::S2, k), 1);
            reflected = with_occupation(reflected, reg.index(ModeKind::Env, k), 1);
            state.add_term(reflected, base * s.r_prime_mag);
        }
    }
}

} // namespace

FockState build_superposition_state(const ObjectMap& obj, const OpticalConfig& cfg,
                                    const ModeGrid& grid, double phi_p,
                                    const OracleSettings& settings) {
    const ModeRegistry reg(grid.entries.size());
    const PairAmplitudes g = pair_amplitudes(cfg, phi_p, settings);

    FockState state = FockState::vacuum(settings.n_max);
    add_crystal1_terms(state, grid, reg, g.g1);
    add_crystal2_terms(state, obj, cfg, grid, reg, g.g2);
    return state;
}

FockState build_product_state(const ObjectMap& obj, const OpticalConfig& cfg,
                              const ModeGrid& grid, double phi_p,
                              const OracleSettings& settings) {
    if (settings.n_max < 2) {
        throw ConfigError("product state needs n_max >= 2");
    }
    const ModeRegistry reg(grid.entries.size());
    const PairAmplitudes g = pair_amplitudes(cfg, phi_p, settings);

    FockState psi1 = FockState::vacuum(settings.n_max);
    add_crystal1_terms(psi1, grid, reg, g.g1);

    FockState psi2 = FockState::vacuum(settings.n_max);
    add_crystal2_terms(psi2, obj, cfg, grid, reg, g.g2);

    // |psi1>|psi2>: apply psi2's creation-operator polynomial to each term
    // of psi1 (the vac x vac product supplies the vacuum term). Raising an
    // already occupied mode picks up the bosonic sqrt(n+1).
    FockState product(settings.n_max);
    for (const auto& [occ1, amp1] : psi1.terms()) {
        for (const auto& [occ2, amp2] : psi2.terms()) {
            // Build occ1 with occ2's quanta added on top.
            std::complex<double> amp = amp1 * amp2;
            OccKey merged = occ1;
            for (const auto& [mode, count] : occ2) {
                for (int q = 0; q < count; ++q) {
                    const int n = occupation_of(merged, mode);
                    if (n + 1 > settings.n_max) {
                        throw TruncationOverflow("product state exceeds n_max");
                    }
                    amp *= std::sqrt(n + 1.0);
                    merged = with_occupation(merged, mode, n + 1);
                }
            }
            product.add_term(merged, amp);
        }
    }
    return product;
}

FockState apply_detector_field(const FockState& state, const ModeGridEntry& entry,
                               const ModeRegistry& registry, const OpticalConfig& cfg) {
    const std::size_t s1 = registry.index(ModeKind::S1, entry.pixel_index);
    const std::size_t s2 = registry.index(ModeKind::S2, entry.pixel_index);

    // E(+) = a_S1 + i e^{i Phi} a_S2. The engine folds the beamsplitter's i
    // into its constant, so Phi carries a compensating -pi/2.
    const double phi = cfg.delta_s0 + cfg.c0 + cfg.tilt * entry.signal.qx - std::numbers::pi / 2.0;
    const std::complex<double> c2 = std::complex<double>{0.0, 1.0} * std::polar(1.0, phi);

    FockState out = state.apply_annihilation(s1);
    FockState branch2 = state.apply_annihilation(s2);
    branch2 *= c2;
    out += branch2;
    return out;
}

double oracle_rate(const FockState& state, const ModeGridEntry& entry,
                   const ModeRegistry& registry, const OpticalConfig& cfg,
                   const OracleSettings& settings) {
    const FockState detected = apply_detector_field(state, entry, registry, cfg);
    return detected.squared_norm() / (settings.pair_scale * settings.pair_scale);
}

double product_state_scaling_exponent(const OpticalConfig& cfg, const ObjectMap& obj,
                                 const ModeGrid& grid, const std::vector<double>& g_values,
                                 double phi_p, int n_max) {
    if (g_values.size() < 2) {
        throw ConfigError("need at least two g values for the scaling fit");
    }
    const ModeRegistry reg(grid.entries.size());
    const auto& ref = grid.entries[grid.entries.size() / 2];

    // Balanced pumps with unit magnitude: G1 = G2 = g.
    OpticalConfig balanced = cfg;
    balanced.v_p1 = {1.0, 0.0};
    balanced.v_p2 = {1.0, 0.0};

    std::vector<double> log_g;
    std::vector<double> log_diff;
    for (double g : g_values) {
        OracleSettings settings{g, n_max};
        const FockState sup = build_superposition_state(obj, balanced, grid, phi_p, settings);
        const FockState prod = build_product_state(obj, balanced, grid, phi_p, settings);
        const double r_sup = oracle_rate(sup, ref, reg, balanced, settings);
        const double r_prod = oracle_rate(prod, ref, reg, balanced, settings);
        const double rel = std::abs(r_prod - r_sup) / r_sup;
        if (rel <= 0.0 || !std::isfinite(rel)) {
            throw DegenerateFit("product and superposition rates coincide");
        }
        log_g.push_back(std::log(g));
        log_diff.push_back(std::log(rel));
    }

    // Least-squares slope of log(diff) vs log(g).
    const double n = static_cast<double>(log_g.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < log_g.size(); ++i) {
        sx += log_g[i];
        sy += log_diff[i];
        sxx += log_g[i] * log_g[i];
        sxy += log_g[i] * log_diff[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace uqi
