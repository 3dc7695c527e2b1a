#ifndef UQI_FOCK_HPP
#define UQI_FOCK_HPP

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "uqi/imaging.hpp"
#include "uqi/mode_space.hpp"
#include "uqi/optics.hpp"

namespace uqi {

/// Field labels. The second crystal's idler modes are never registered:
/// after alignment through the object they are linear combinations of the
/// first crystal's idler (S-branch transmitted) and the environment mode at
/// the unused beamsplitter port.
enum class ModeKind : std::uint8_t { S1 = 0, S2 = 1, I1 = 2, Env = 3 };

struct ModeLabel {
    ModeKind kind;
    std::size_t grid_index;
    bool operator==(const ModeLabel&) const = default;
    auto operator<=>(const ModeLabel&) const = default;
};

/// Ordered mode list: (S1,k),(S2,k),(I1,k),(Env,k) for each grid entry k.
class ModeRegistry {
  public:
    explicit ModeRegistry(std::size_t grid_entries);

    std::size_t size() const { return 4 * grid_entries_; }
    std::size_t index(ModeKind kind, std::size_t grid_index) const;
    ModeLabel label(std::size_t mode_index) const;

  private:
    std::size_t grid_entries_;
};

/// Occupation vector stored sparsely as sorted (mode, count) pairs.
using OccKey = std::vector<std::pair<std::size_t, std::uint8_t>>;

/// Sparse multimode Fock state: occupation vector -> complex amplitude.
/// Amplitudes below 1e-15 in magnitude are pruned (numerical cutoff, not a
/// physical one). Occupations never exceed n_max.
class FockState {
  public:
    explicit FockState(int n_max = 2) : n_max_(n_max) {}

    static FockState vacuum(int n_max = 2);

    int n_max() const { return n_max_; }
    const std::map<OccKey, std::complex<double>>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    void add_term(const OccKey& occ, std::complex<double> amplitude);

    /// a^dag(mode) applied to every term; sqrt(n+1) factors included.
    /// Throws TruncationOverflow past n_max.
    FockState apply_creation(std::size_t mode) const;

    /// a(mode); terms without occupation are annihilated. sqrt(n) factors.
    FockState apply_annihilation(std::size_t mode) const;

    FockState& operator+=(const FockState& other);
    FockState& operator*=(std::complex<double> scale);

    double squared_norm() const;
    std::complex<double> amplitude(const OccKey& occ) const;

    /// Largest total photon number over the stored terms.
    int max_total_occupation() const;

  private:
    int n_max_;
    std::map<OccKey, std::complex<double>> terms_;
};

/// Pair-generation amplitudes G_j = pair_scale * V_Pj (knob and static
/// pump-2 phases folded into G_2). Only ratios and phases of the G are
/// observable in the counting rate.
struct OracleSettings {
    double pair_scale = 1e-3;
    int n_max = 2;
};

/// First-order superposition state: vacuum plus one pair term per grid
/// entry and crystal, the second-crystal branch split through the object
/// beamsplitter. Amplitudes carry the per-entry envelope weight.
FockState build_superposition_state(const ObjectMap& obj, const OpticalConfig& cfg,
                                    const ModeGrid& grid, double phi_p,
                                    const OracleSettings& settings = {});

/// Tensor product of the per-crystal states expanded through second order
/// in G: includes every cross pair-pair term, with sqrt(2) bookkeeping when
/// the same idler mode is raised twice.
FockState build_product_state(const ObjectMap& obj, const OpticalConfig& cfg,
                              const ModeGrid& grid, double phi_p,
                              const OracleSettings& settings = {});

/// Detector field at one pixel: a_S1 + i e^{i Phi} a_S2 with Phi folded so
/// the oracle and the analytic engine share one phase convention
/// (Phi = delta_s0 + c0 + tilt*qx - pi/2; the -pi/2 cancels the reflected
/// port's i).
FockState apply_detector_field(const FockState& state, const ModeGridEntry& entry,
                               const ModeRegistry& registry, const OpticalConfig& cfg);

/// <Psi| E(-) E(+) |Psi> rescaled by 1/pair_scale^2 so a unit-weight
/// background reads |V1|^2 + |V2|^2, matching the analytic engine.
double oracle_rate(const FockState& state, const ModeGridEntry& entry,
                   const ModeRegistry& registry, const OpticalConfig& cfg,
                   const OracleSettings& settings = {});

/// Log-log fit of the relative product-vs-superposition rate difference
/// against g, at the central pixel with G1 = G2 = g. The neglected terms
/// carry second or higher powers of G, so the expected exponent is 2.
/// Throws DegenerateFit when any difference vanishes.
double product_state_scaling_exponent(const OpticalConfig& cfg, const ObjectMap& obj,
                                 const ModeGrid& grid, const std::vector<double>& g_values,
                                 double phi_p = 0.0, int n_max = 2);

} // namespace uqi

#endif
