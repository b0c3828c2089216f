#pragma once

// Closed-form evaluators for the first moment landscape: the binary entropy
// toolkit, the first moment curve Gamma and its two approximations, the T_n
// statistic, and the monotonicity classifiers.
//
// Entropy convention: h(x) = -x ln x - (1-x) ln(1-x) on [1/2, 1], natural log,
// h(1) = 0. h is strictly decreasing there, from ln 2 to 0, so h^{-1} maps
// [0, ln 2] onto [1/2, 1].
//
// Everything is evaluated in long double. Near-half quantities are carried as
// excesses d = x - 1/2 so that values like Gamma(z) - C(kbar,2)/2 never come
// from subtracting two numbers of size 10^13.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plandscape/model.hpp"

namespace plandscape {

using Real = long double;

// ---- entropy toolkit ----

/// h(x) for x in [1/2, 1].
Real entropy(Real x);
/// r(gamma) = ln 2 - h(gamma) for gamma in [1/2, 1].
Real rate(Real gamma);
/// ln 2 - h(1/2 + d) for d in [0, 1/2], accurate to relative precision for tiny d.
Real rate_at_excess(Real d);
/// h^{-1}(y) on the branch >= 1/2, for y in [0, ln 2] (1e-12 slack at both ends).
Real entropy_inverse(Real y);
/// h^{-1}(ln 2 - eps) - 1/2 for eps in [0, ln 2]. Bisection to a 1e-13 bracket,
/// then two Newton polish steps.
Real entropy_inverse_excess(Real eps);
/// 1/2 + sqrt(eps/2) - eps^{3/2} / (6 sqrt 2); approximates
/// entropy_inverse(ln 2 - eps) with O(eps^{5/2}) error. Useful for eps below ~0.1.
Real entropy_inverse_taylor(Real eps);

// ---- combinatorics ----

/// ln C(n, k).
Real log_binomial(std::uint64_t n, std::uint64_t k);
/// C(z, 2) as a real.
inline Real pairs(Real z) { return z * (z - 1) / 2; }
/// floor(kbar * k / n), the overlap of a uniformly random kbar-subset.
std::int64_t trivial_overlap(const ModelParams& p);
/// Overlaps z with a kbar-subset of this overlap existing: max(0, kbar-(n-k)) .. min(k, kbar).
bool overlap_feasible(const ModelParams& p, std::int64_t z);

/// A(z) = ln(C(k, z) C(n-k, kbar-z)).
Real a_func(const ModelParams& p, std::int64_t z);

// ---- curves ----

/// Gamma_{kbar,k}(z). Throws CurveUndefined when A(z) exceeds ln 2 times
/// C(kbar,2) - C(z,2).
Real gamma_curve(const ModelParams& p, std::int64_t z);
/// Gamma(z) - C(kbar,2)/2, computed without cancellation.
Real gamma_curve_excess(const ModelParams& p, std::int64_t z);

enum class TildeForm {
    /// C(kbar,2) in both places; consistent with the kbar^{-3/2}(. - C(kbar,2)/2) normalization.
    Overparametrized,
    /// C(k,2) in both places.
    PlantedPairs,
};

/// Gamma-tilde(z): the first moment curve with h^{-1} replaced by its
/// one-term expansion.
Real gamma_tilde(const ModelParams& p, std::int64_t z, TildeForm form = TildeForm::Overparametrized);

/// Phi(z): two-term expansion, within O(1) of Gamma when kbar >= (ln n)^5.
Real phi_curve(const ModelParams& p, std::int64_t z);

/// T_n = s ln(s / (kbar k / n)) with s = sqrt(kbar / ln(n/kbar)).
Real t_statistic(const ModelParams& p);
/// sqrt(kbar / ln(n / kbar)), the overlap scale of the well boundaries.
Real overlap_scale(const ModelParams& p);

// ---- curve containers ----

enum class CurveKind { Gamma, GammaTilde, Phi, Empirical };

struct CurvePoint {
    std::int64_t z = 0;
    Real value = 0;
};

/// One point per integer z in [z_lo, z_hi], sorted.
struct OverlapCurve {
    ModelParams params;
    CurveKind kind = CurveKind::Gamma;
    std::vector<CurvePoint> points;
    std::int64_t z_lo = 0;
    std::int64_t z_hi = 0;

    Real at(std::int64_t z) const;
    std::size_t size() const noexcept { return points.size(); }
};

struct CurveRequest {
    CurveKind kind = CurveKind::Gamma;
    TildeForm tilde_form = TildeForm::Overparametrized;
    std::optional<std::int64_t> z_lo;  ///< default: trivial_overlap(p)
    std::optional<std::int64_t> z_hi;  ///< default: k
    unsigned threads = 1;
};

/// Evaluates Gamma, GammaTilde or Phi on every integer of the domain. Results
/// do not depend on the thread count.
OverlapCurve evaluate_curve(const ModelParams& p, const CurveRequest& req);

/// kbar^{-3/2} (value - C(kbar,2)/2) for every point.
std::vector<Real> renormalized(const OverlapCurve& curve);

// ---- classification ----

enum class Monotonicity { Increasing, Decreasing, NonMonotonic, Indeterminate };

/// Regime constants. They are finite-n calibration knobs with no
/// published values; see README for how the defaults were chosen.
struct ClassifierConfig {
    double epsilon = 0.1;
    double c0 = 1.4;
    double d1 = 0.25;
    double d2 = 1.0;
    double e = 4.0;
    /// Successive differences within this multiple of kbar count as flat.
    double flat_tolerance_per_kbar = 1e-6;

    void validate() const;
};

struct MonotonicityClass {
    Monotonicity label = Monotonicity::Indeterminate;
    /// Well edges, present iff NonMonotonic.
    std::optional<std::int64_t> u1;
    std::optional<std::int64_t> u2;
    /// u1, u2 divided by overlap_scale(p) (for comparison with D1, D2).
    std::optional<Real> u1_scaled;
    std::optional<Real> u2_scaled;
    /// min(curve(lo), curve(hi)) - min over the window; 0 unless NonMonotonic.
    Real depth = 0;
    /// Window actually scanned (empirical classification only).
    std::int64_t window_lo = 0;
    std::int64_t window_hi = 0;
};

/// Finite-n reading of the four asymptotic regimes via T_n:
/// Increasing if margin * T_n < kbar k/n, Decreasing if T_n > margin * k,
/// NonMonotonic if margin * kbar k/n < T_n < k / margin, Indeterminate
/// otherwise and whenever k^2 = n or kbar >= n.
MonotonicityClass classify_asymptotic(const ModelParams& p, double margin = 1.0);

/// Numbers behind classify_asymptotic, for reporting.
struct AsymptoticDetail {
    Real t_n = 0;
    Real lower = 0;  ///< kbar k / n
    Real upper = 0;  ///< k
    /// k^2 / ln(n/k^2) when k^2 < n, n^2 / (k^2 ln(k^2/n)) when k^2 > n.
    std::optional<Real> table_threshold;
};
AsymptoticDetail asymptotic_detail(const ModelParams& p);

/// Scans the curve on [floor(c0 kbar k / n), floor((1 - epsilon) k)] clipped
/// to the curve's domain. Throws ParameterError when fewer than 3 points remain.
MonotonicityClass classify_empirical(const OverlapCurve& curve, const ClassifierConfig& cfg = {});

enum class PhaseLabel { UninformativeNoOgp, Ogp, InformativeNoOgp, BelowDiagonal, Indeterminate };

struct PhaseCell {
    std::uint64_t k = 0;
    std::uint64_t kbar = 0;
    PhaseLabel label = PhaseLabel::Indeterminate;
};

/// Labels every (k, kbar) cell through classify_asymptotic.
std::vector<PhaseCell> phase_diagram(std::uint64_t n, const std::vector<std::uint64_t>& k_grid,
                                     const std::vector<std::uint64_t>& kbar_grid, double margin = 1.0);

std::string to_string(CurveKind kind);
std::string to_string(Monotonicity m);
std::string to_string(PhaseLabel label);
CurveKind parse_curve_kind(const std::string& s);

}  // namespace plandscape
