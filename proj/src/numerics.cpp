#include "plandscape/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "plandscape/errors.hpp"
#include "plandscape/parallel.hpp"

namespace plandscape {

namespace {

constexpr Real kLn2 = std::numbers::ln2_v<Real>;
constexpr Real kSqrt2 = std::numbers::sqrt2_v<Real>;
constexpr Real kDomainSlack = 1e-12L;
constexpr Real kFloorSlack = 1e-9L;

Real lgamma_safe(Real x) {
    int sign = 0;
    return lgammal_r(x, &sign);
}

}  // namespace

Real entropy(Real x) {
    if (!(x >= 0.5L && x <= 1.0L)) throw DomainError("entropy: x must lie in [1/2, 1]");
    if (x == 1.0L) return 0;
    return -x * std::log(x) - (1 - x) * std::log1p(-x);
}

Real rate_at_excess(Real d) {
    if (!(d >= 0 && d <= 0.5L)) throw DomainError("rate_at_excess: d must lie in [0, 1/2]");
    if (d < 0.1L) {
        // sum_{m>=1} (2d)^{2m} / (2m (2m - 1))
        const Real x = 4 * d * d;
        Real power = x;
        Real sum = 0;
        for (int m = 1; m < 200; ++m) {
            const Real term = power / (2.0L * m * (2.0L * m - 1));
            sum += term;
            if (term <= sum * 1e-22L) break;
            power *= x;
        }
        return sum;
    }
    if (d == 0.5L) return kLn2;
    return (0.5L + d) * std::log1p(2 * d) + (0.5L - d) * std::log1p(-2 * d);
}

Real rate(Real gamma) {
    if (!(gamma >= 0.5L && gamma <= 1.0L)) throw DomainError("rate: gamma must lie in [1/2, 1]");
    return rate_at_excess(gamma - 0.5L);
}

Real entropy_inverse_excess(Real eps) {
    if (!(eps >= -kDomainSlack && eps <= kLn2 + kDomainSlack))
        throw DomainError("entropy_inverse: argument outside [0, ln 2]");
    if (eps <= 0) return 0;
    if (eps >= kLn2) return 0.5L;
    Real lo = 0, hi = 0.5L;
    while (hi - lo > 1e-13L) {
        const Real mid = (lo + hi) / 2;
        if (rate_at_excess(mid) < eps) lo = mid;
        else hi = mid;
    }
    Real d = (lo + hi) / 2;
    for (int i = 0; i < 2; ++i) {
        // r'(d) = ln((1 + 2d) / (1 - 2d))
        const Real slope = std::log1p(2 * d) - std::log1p(-2 * d);
        if (!(slope > 0)) break;
        const Real next = d - (rate_at_excess(d) - eps) / slope;
        if (!(next >= lo && next <= hi)) break;
        d = next;
    }
    return d;
}

Real entropy_inverse(Real y) {
    if (!(y >= -kDomainSlack && y <= kLn2 + kDomainSlack))
        throw DomainError("entropy_inverse: y must lie in [0, ln 2]");
    return 0.5L + entropy_inverse_excess(kLn2 - y);
}

Real entropy_inverse_taylor(Real eps) {
    if (!(eps >= 0)) throw DomainError("entropy_inverse_taylor: eps must be nonnegative");
    return 0.5L + std::sqrt(eps / 2) - std::pow(eps, 1.5L) / (6 * kSqrt2);
}

Real log_binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) throw ParameterError("log_binomial: k > n");
    const std::uint64_t m = std::min(k, n - k);
    if (m == 0) return 0;
    if (m <= 1000) {
        Real sum = 0;
        for (std::uint64_t i = 1; i <= m; ++i)
            sum += std::log(static_cast<Real>(n - m + i) / static_cast<Real>(i));
        return sum;
    }
    return lgamma_safe(static_cast<Real>(n) + 1) - lgamma_safe(static_cast<Real>(k) + 1) -
           lgamma_safe(static_cast<Real>(n - k) + 1);
}

std::int64_t trivial_overlap(const ModelParams& p) {
    const unsigned __int128 prod = static_cast<unsigned __int128>(p.kbar) * p.k;
    return static_cast<std::int64_t>(prod / p.n);
}

bool overlap_feasible(const ModelParams& p, std::int64_t z) {
    if (z < 0) return false;
    const auto uz = static_cast<std::uint64_t>(z);
    return uz <= std::min(p.k, p.kbar) && p.kbar - uz <= p.n - p.k;
}

Real a_func(const ModelParams& p, std::int64_t z) {
    p.validate();
    if (!overlap_feasible(p, z))
        throw ParameterError("a_func: overlap z=" + std::to_string(z) + " is infeasible");
    const auto uz = static_cast<std::uint64_t>(z);
    return log_binomial(p.k, uz) + log_binomial(p.n - p.k, p.kbar - uz);
}

Real gamma_curve_excess(const ModelParams& p, std::int64_t z) {
    const Real a = a_func(p, z);
    const Real zr = static_cast<Real>(z);
    if (static_cast<std::uint64_t>(z) == p.kbar) return pairs(zr) / 2;  // z = kbar = k
    const Real free_pairs = pairs(static_cast<Real>(p.kbar)) - pairs(zr);
    const Real eps = a / free_pairs;
    if (eps > kLn2 * (1 + 1e-15L))
        throw CurveUndefined(z, "ln(C(k,z)C(n-k,kbar-z)) / (C(kbar,2)-C(z,2)) exceeds ln 2");
    return pairs(zr) / 2 + free_pairs * entropy_inverse_excess(std::min(eps, kLn2));
}

Real gamma_curve(const ModelParams& p, std::int64_t z) {
    const Real excess = gamma_curve_excess(p, z);
    return pairs(static_cast<Real>(p.kbar)) / 2 + excess;
}

Real gamma_tilde(const ModelParams& p, std::int64_t z, TildeForm form) {
    const Real a = a_func(p, z);
    const Real top = form == TildeForm::Overparametrized ? pairs(static_cast<Real>(p.kbar))
                                                         : pairs(static_cast<Real>(p.k));
    const Real pz = pairs(static_cast<Real>(z));
    return (top + pz) / 2 + std::sqrt((top - pz) * a) / kSqrt2;
}

Real phi_curve(const ModelParams& p, std::int64_t z) {
    const Real a = a_func(p, z);
    const Real top = pairs(static_cast<Real>(p.kbar));
    const Real pz = pairs(static_cast<Real>(z));
    const Real free_pairs = top - pz;
    if (!(free_pairs > 0)) throw DomainError("phi_curve: C(kbar,2) - C(z,2) must be positive");
    return (top + pz) / 2 + std::sqrt(a * free_pairs) / kSqrt2 -
           std::sqrt(a * a * a / free_pairs) / (6 * kSqrt2);
}

Real overlap_scale(const ModelParams& p) {
    if (p.kbar >= p.n) throw ParameterError("overlap scale needs kbar < n");
    const Real kb = static_cast<Real>(p.kbar);
    return std::sqrt(kb / std::log(static_cast<Real>(p.n) / kb));
}

Real t_statistic(const ModelParams& p) {
    p.validate();
    const Real s = overlap_scale(p);
    const Real base = static_cast<Real>(p.kbar) * static_cast<Real>(p.k) / static_cast<Real>(p.n);
    return s * std::log(s / base);
}

Real OverlapCurve::at(std::int64_t z) const {
    if (z < z_lo || z > z_hi) throw ParameterError("curve has no point at z=" + std::to_string(z));
    return points[static_cast<std::size_t>(z - z_lo)].value;
}

OverlapCurve evaluate_curve(const ModelParams& p, const CurveRequest& req) {
    p.validate();
    if (req.kind == CurveKind::Empirical) throw ParameterError("evaluate_curve: empirical curves come from d_curve");
    OverlapCurve curve;
    curve.params = p;
    curve.kind = req.kind;
    curve.z_lo = req.z_lo.value_or(trivial_overlap(p));
    curve.z_hi = req.z_hi.value_or(static_cast<std::int64_t>(p.k));
    if (curve.z_lo > curve.z_hi) throw ParameterError("evaluate_curve: empty domain");
    const auto count = static_cast<std::size_t>(curve.z_hi - curve.z_lo + 1);
    curve.points.resize(count);
    parallel_for(count, resolve_threads(req.threads), [&](std::size_t i) {
        const std::int64_t z = curve.z_lo + static_cast<std::int64_t>(i);
        Real v = 0;
        switch (req.kind) {
            case CurveKind::Gamma: v = gamma_curve(p, z); break;
            case CurveKind::GammaTilde: v = gamma_tilde(p, z, req.tilde_form); break;
            case CurveKind::Phi: v = phi_curve(p, z); break;
            case CurveKind::Empirical: break;
        }
        curve.points[i] = {z, v};
    });
    return curve;
}

std::vector<Real> renormalized(const OverlapCurve& curve) {
    const Real kb = static_cast<Real>(curve.params.kbar);
    const Real half = pairs(kb) / 2;
    const Real scale = std::pow(kb, -1.5L);
    std::vector<Real> out;
    out.reserve(curve.points.size());
    for (const auto& pt : curve.points) out.push_back(scale * (pt.value - half));
    return out;
}

void ClassifierConfig::validate() const {
    if (!(epsilon > 0 && epsilon < 1)) throw ParameterError("classifier: epsilon must lie in (0, 1)");
    if (!(c0 > 0)) throw ParameterError("classifier: C0 must be positive");
    if (!(d1 > 0 && d2 > 0 && e > 0)) throw ParameterError("classifier: D1, D2, E must be positive");
    if (!(d1 < d2)) throw ParameterError("classifier: need D1 < D2");
    if (!(flat_tolerance_per_kbar >= 0)) throw ParameterError("classifier: tolerance must be nonnegative");
}

AsymptoticDetail asymptotic_detail(const ModelParams& p) {
    p.validate();
    AsymptoticDetail d;
    const Real n = static_cast<Real>(p.n);
    const Real k = static_cast<Real>(p.k);
    d.t_n = t_statistic(p);
    d.lower = static_cast<Real>(p.kbar) * k / n;
    d.upper = k;
    const Real k2 = k * k;
    if (k2 < n) d.table_threshold = k2 / std::log(n / k2);
    else if (k2 > n) d.table_threshold = n * n / (k2 * std::log(k2 / n));
    return d;
}

MonotonicityClass classify_asymptotic(const ModelParams& p, double margin) {
    p.validate();
    if (!(margin >= 1.0)) throw ParameterError("classify_asymptotic: margin must be >= 1");
    MonotonicityClass out;
    if (p.kbar >= p.n || p.k * p.k == p.n) return out;
    const AsymptoticDetail d = asymptotic_detail(p);
    const Real m = margin;
    if (d.t_n * m < d.lower) out.label = Monotonicity::Increasing;
    else if (d.t_n > m * d.upper) out.label = Monotonicity::Decreasing;
    else if (d.t_n > m * d.lower && d.t_n < d.upper / m) out.label = Monotonicity::NonMonotonic;
    return out;
}

MonotonicityClass classify_empirical(const OverlapCurve& curve, const ClassifierConfig& cfg) {
    cfg.validate();
    const ModelParams& p = curve.params;
    const Real base = static_cast<Real>(p.kbar) * static_cast<Real>(p.k) / static_cast<Real>(p.n);
    const auto lo = std::max(curve.z_lo, static_cast<std::int64_t>(std::floor(static_cast<Real>(cfg.c0) * base + kFloorSlack)));
    const auto hi = std::min(curve.z_hi, static_cast<std::int64_t>(std::floor((1 - static_cast<Real>(cfg.epsilon)) *
                                                                               static_cast<Real>(p.k) + kFloorSlack)));
    if (hi - lo + 1 < 3)
        throw ParameterError("classify_empirical: window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                             "] has fewer than 3 points");
    MonotonicityClass out;
    out.window_lo = lo;
    out.window_hi = hi;
    const Real tol = static_cast<Real>(cfg.flat_tolerance_per_kbar) * static_cast<Real>(p.kbar);

    bool rises = false, falls = false;
    std::int64_t argmin = lo;
    Real vmin = curve.at(lo);
    for (std::int64_t z = lo; z < hi; ++z) {
        const Real diff = curve.at(z + 1) - curve.at(z);
        rises |= diff > tol;
        falls |= diff < -tol;
        if (curve.at(z + 1) < vmin) {
            vmin = curve.at(z + 1);
            argmin = z + 1;
        }
    }
    if (rises && !falls) {
        out.label = Monotonicity::Increasing;
        return out;
    }
    if (falls && !rises) {
        out.label = Monotonicity::Decreasing;
        return out;
    }
    if (!rises && !falls) return out;

    const Real rim = std::min(curve.at(lo), curve.at(hi));
    const Real depth = rim - vmin;
    if (!(depth > tol)) return out;  // rise-then-fall hump: no well

    std::int64_t u1 = argmin, u2 = argmin;
    while (u1 - 1 > lo && curve.at(u1 - 1) < rim) --u1;
    while (u2 + 1 < hi && curve.at(u2 + 1) < rim) ++u2;
    out.label = Monotonicity::NonMonotonic;
    out.u1 = u1;
    out.u2 = u2;
    out.depth = depth;
    if (p.kbar < p.n) {
        const Real s = overlap_scale(p);
        out.u1_scaled = static_cast<Real>(u1) / s;
        out.u2_scaled = static_cast<Real>(u2) / s;
    }
    return out;
}

std::vector<PhaseCell> phase_diagram(std::uint64_t n, const std::vector<std::uint64_t>& k_grid,
                                     const std::vector<std::uint64_t>& kbar_grid, double margin) {
    if (!std::is_sorted(k_grid.begin(), k_grid.end()) || !std::is_sorted(kbar_grid.begin(), kbar_grid.end()))
        throw ParameterError("phase_diagram: grids must be sorted");
    std::vector<PhaseCell> table;
    table.reserve(k_grid.size() * kbar_grid.size());
    for (auto k : k_grid) {
        for (auto kbar : kbar_grid) {
            PhaseCell cell{k, kbar, PhaseLabel::Indeterminate};
            if (kbar < k) {
                cell.label = PhaseLabel::BelowDiagonal;
            } else if (k >= 1 && kbar <= n) {
                switch (classify_asymptotic({n, k, kbar}, margin).label) {
                    case Monotonicity::Decreasing: cell.label = PhaseLabel::UninformativeNoOgp; break;
                    case Monotonicity::NonMonotonic: cell.label = PhaseLabel::Ogp; break;
                    case Monotonicity::Increasing: cell.label = PhaseLabel::InformativeNoOgp; break;
                    case Monotonicity::Indeterminate: break;
                }
            }
            table.push_back(cell);
        }
    }
    return table;
}

std::string to_string(CurveKind kind) {
    switch (kind) {
        case CurveKind::Gamma: return "gamma";
        case CurveKind::GammaTilde: return "gamma-tilde";
        case CurveKind::Phi: return "phi";
        case CurveKind::Empirical: return "empirical";
    }
    return "?";
}

std::string to_string(Monotonicity m) {
    switch (m) {
        case Monotonicity::Increasing: return "Increasing";
        case Monotonicity::Decreasing: return "Decreasing";
        case Monotonicity::NonMonotonic: return "NonMonotonic";
        case Monotonicity::Indeterminate: return "Indeterminate";
    }
    return "?";
}

std::string to_string(PhaseLabel label) {
    switch (label) {
        case PhaseLabel::UninformativeNoOgp: return "Uninformative-NoOGP";
        case PhaseLabel::Ogp: return "OGP";
        case PhaseLabel::InformativeNoOgp: return "Informative-NoOGP";
        case PhaseLabel::BelowDiagonal: return "BelowDiagonal";
        case PhaseLabel::Indeterminate: return "Indeterminate";
    }
    return "?";
}

CurveKind parse_curve_kind(const std::string& s) {
    if (s == "gamma") return CurveKind::Gamma;
    if (s == "gamma-tilde") return CurveKind::GammaTilde;
    if (s == "phi") return CurveKind::Phi;
    if (s == "empirical") return CurveKind::Empirical;
    throw ParameterError("unknown curve kind '" + s + "'");
}

}  // namespace plandscape
