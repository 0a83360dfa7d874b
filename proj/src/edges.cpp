#include "fmc/edges.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include "fmc/errors.hpp"
#include "fmc/subordination.hpp"

namespace fmc {

namespace {

constexpr double kDetectorAgreement = 1e-6;
constexpr double kDegenerate = 1e-10;
constexpr int kScanPoints = 64;

struct Frame {
    Measure mu, nu;  // mean-1 versions
    double a = 1.0, b = 1.0;
};

Frame normalize(const Measure& mu, const Measure& nu) {
    for (const Measure* m : {&mu, &nu}) {
        const auto r = validate(*m);
        if (!r.edge_machinery) {
            std::string msg =
                "edge solver needs a single Jacobi component on (0, inf) without atoms (the single-interval class)";
            for (const auto& v : r.violations) msg += "; " + v;
            throw StructureError(msg);
        }
    }
    Frame f;
    f.a = mu.mean();
    f.b = nu.mean();
    f.mu = dilate(mu, 1.0 / f.a);
    f.nu = dilate(nu, 1.0 / f.b);
    return f;
}

double Mreal(const Measure& m, double x) { return M_value(m, x).real(); }

// Solves M_m(w) = N for w in (lo, hi) where M_m increases; nullopt when N is
// outside the range attained there.
std::optional<double> invert_M(const Measure& m, double N, double lo, double hi) {
    double flo = Mreal(m, lo) - N;
    double fhi = Mreal(m, hi) - N;
    if (flo > 0.0 || fhi < 0.0) return std::nullopt;
    double w = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const auto v = m_transform(m, w);
        const double g = v.M.real() - N;
        if (g == 0.0) return w;
        if (g < 0.0) lo = w;
        else hi = w;
        double next = w - g / v.Mp.real();
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - w) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(w) || hi - lo <= 0.0) {
            return next;
        }
        w = next;
    }
    return w;
}

struct BranchPoint {
    bool defined = false;
    double a = 0.0, w = 0.0, N = 0.0;
    double E = 0.0;
    double f = std::numeric_limits<double>::infinity();
};

// Edge function along a real branch, parametrized by a = Omega_mu(E).
struct Branch {
    const Measure& mu;
    const Measure& nu;
    bool left;
    double w_lo, w_hi;  // search interval for Omega_nu(E)

    BranchPoint at(double a) const {
        BranchPoint p;
        p.a = a;
        try {
            p.N = Mreal(nu, a);
            double lo = w_lo, hi = w_hi;
            if (!left) {
                // grow the upper end until M_mu exceeds N
                while (Mreal(mu, hi) < p.N && hi < 1e300) hi *= 2.0;
            }
            const auto w = invert_M(mu, p.N, lo, hi);
            if (!w) return p;
            p.w = *w;
            p.E = a * p.w / p.N;
            const double ih_mu = m_transform(mu, p.w).Ihat;
            const double ih_nu = m_transform(nu, a).Ihat;
            p.f = p.E * p.E * ih_mu * ih_nu;
            p.defined = std::isfinite(p.f) && p.E > 0.0;
        } catch (const std::exception&) {
            p.defined = false;
        }
        return p;
    }
};

// Bisection in a between a_small (f < 1) and a_large (f > 1 or undefined).
BranchPoint bisect_branch(const Branch& br, double a_in, double a_edge) {
    auto above = [](const BranchPoint& p) { return !p.defined || p.f > 1.0; };
    double lo = a_in, hi = a_edge;  // lo side has f < 1
    BranchPoint plo = br.at(lo);
    if (above(plo)) throw StructureError("edge bisection: no bracket on the outer side");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const BranchPoint pm = br.at(mid);
        if (above(pm)) {
            hi = mid;
        } else {
            lo = mid;
            plo = pm;
        }
    }
    return plo;
}

bool interior(const Measure& mu, const Measure& nu, double x) {
    const EpsLadder ladder = EpsLadder::halving(1e-2, 24);
    const auto s = solve_boundary(mu, nu, x, ladder);
    return s.omega_mu.imag() > 1e-10;
}

std::pair<double, double> scan_detector(const Measure& mu, const Measure& nu, double E_lo_guess, double E_hi_guess) {
    const double lo = mu.support_lo() * nu.support_lo();
    const double hi = mu.support_hi() * nu.support_hi();
    std::vector<double> xs(kScanPoints);
    std::vector<char> in(kScanPoints);
    int first = -1, last = -1;
    for (int i = 0; i < kScanPoints; ++i) {
        xs[i] = lo + (hi - lo) * (i + 0.5) / kScanPoints;
        in[i] = interior(mu, nu, xs[i]);
        if (in[i]) {
            if (first < 0) first = i;
            last = i;
        }
    }
    if (first < 0) throw StructureError("density scan found no interior point");
    for (int i = first; i <= last; ++i) {
        if (!in[i]) throw StructureError("density scan found a gap in the support");
    }
    auto refine = [&](double out, double inside) {
        for (int it = 0; it < 200 && std::abs(out - inside) > 1e-12 * std::max(1.0, std::abs(inside)); ++it) {
            const double mid = 0.5 * (out + inside);
            if (interior(mu, nu, mid)) inside = mid;
            else out = mid;
        }
        return 0.5 * (out + inside);
    };
    const double left_out = first > 0 ? xs[first - 1] : lo;
    const double right_out = last + 1 < kScanPoints ? xs[last + 1] : hi;
    (void)E_lo_guess;
    (void)E_hi_guess;
    return {refine(left_out, xs[first]), refine(right_out, xs[last])};
}

}  // namespace

double edge_function(const Measure& mu, const Measure& nu, double E) {
    if (!(E > 0.0)) throw DomainError("edge_function: E must be positive");
    const auto s = solve_boundary(mu, nu, E, EpsLadder::halving());
    const double tiny = 1e-10 * (1.0 + std::abs(s.omega_mu));
    if (std::abs(s.omega_mu.imag()) > tiny || std::abs(s.omega_nu.imag()) > tiny) {
        throw DomainError("edge_function: E lies inside the support");
    }
    const double a = s.omega_mu.real();
    const double w = s.omega_nu.real();
    return E * E * m_transform(mu, w).Ihat * m_transform(nu, a).Ihat;
}

SupportInfo find_support(const Measure& mu, const Measure& nu) {
    const Frame fr = normalize(mu, nu);
    const Measure& m = fr.mu;
    const Measure& n = fr.nu;
    const double lo_mu = m.support_lo(), hi_mu = m.support_hi();
    const double lo_nu = n.support_lo(), hi_nu = n.support_hi();

    // left edge: 0 < Omega_mu(E) < lo_nu, 0 < Omega_nu(E) < lo_mu
    const Branch left{m, n, true, 0.0, std::nextafter(lo_mu, 0.0)};
    const BranchPoint pl = bisect_branch(left, lo_nu * 1e-6, lo_nu);
    // right edge: Omega_mu(E) > hi_nu, Omega_nu(E) > hi_mu
    const Branch right{m, n, false, std::nextafter(hi_mu, 2.0 * hi_mu), 2.0 * hi_mu + m.variance() + 1.0};
    double a_far = 2.0 * hi_nu + 1.0;
    while (true) {
        const BranchPoint p = right.at(a_far);
        if (p.defined && p.f < 0.5) break;
        a_far *= 2.0;
        if (a_far > 1e12) throw StructureError("edge solver: right branch never drops below 1");
    }
    const BranchPoint pr = bisect_branch(right, a_far, hi_nu);
    if (!pl.defined || !pr.defined) throw StructureError("edge solver: undefined edge point");

    const double ab = fr.a * fr.b;
    SupportInfo info;
    info.mean_mu = fr.a;
    info.mean_nu = fr.b;
    info.E_minus = ab * pl.E;
    info.E_plus = ab * pr.E;
    info.omega_mu_at = {fr.b * pl.a, fr.b * pr.a};
    info.omega_nu_at = {fr.a * pl.w, fr.a * pr.w};
    info.residuals = {std::abs(pl.f - 1.0), std::abs(pr.f - 1.0)};

    const auto sc = scan_detector(m, n, pl.E, pr.E);
    info.scan_edges = {ab * sc.first, ab * sc.second};
    const double scale = std::max(1.0, info.E_plus);
    if (std::abs(info.scan_edges.first - info.E_minus) > kDetectorAgreement * scale ||
        std::abs(info.scan_edges.second - info.E_plus) > kDetectorAgreement * scale) {
        std::ostringstream os;
        os.precision(17);
        os << "edge detectors disagree: equation (" << info.E_minus << ", " << info.E_plus << "), scan ("
           << info.scan_edges.first << ", " << info.scan_edges.second << ")";
        throw StructureError(os.str());
    }
    return info;
}

namespace {

// Second derivative of the inverse map z(Omega_mu) at an edge where
// a = Omega_mu(E), w = Omega_nu(E), all in the mean-1 frame.
double inverse_second_derivative(const Measure& mu, const Measure& nu, double a, double w) {
    const auto tn = m_transform(nu, a);
    const auto tm = m_transform(mu, w);
    const double N = tn.M.real(), N1 = tn.Mp.real(), N2 = tn.Mpp.real();
    const double P1 = tm.Mp.real(), P2 = tm.Mpp.real();
    return 2.0 * N1 / (N * P1) - w * N2 / (N * N1) - a * N1 * N1 * P2 / (N * P1 * P1 * P1);
}

}  // namespace

SupportInfo sqrt_coefficients(const Measure& mu, const Measure& nu, SupportInfo info) {
    const Frame fr = normalize(mu, nu);
    const double a = fr.a, b = fr.b;
    const double am = info.omega_mu_at.first / b, ap = info.omega_mu_at.second / b;
    const double wm = info.omega_nu_at.first / a, wp = info.omega_nu_at.second / a;

    const double zm = inverse_second_derivative(fr.mu, fr.nu, am, wm);
    const double zp = inverse_second_derivative(fr.mu, fr.nu, ap, wp);
    // roles swapped for Omega_nu
    const double zm_nu = inverse_second_derivative(fr.nu, fr.mu, wm, am);
    const double zp_nu = inverse_second_derivative(fr.nu, fr.mu, wp, ap);
    for (double v : {zm, zp, zm_nu, zp_nu}) {
        if (!(std::abs(v) >= kDegenerate) || !std::isfinite(v)) {
            throw StructureError("degenerate edge: second derivative of the inverse map vanishes");
        }
    }
    if (!(zm < 0.0) || !(zp > 0.0)) throw StructureError("edge curvature has the wrong sign");
    info.z_second = {zm, zp};
    info.gamma_mu = {std::sqrt(2.0 / std::abs(zm)) * std::sqrt(b / a), std::sqrt(2.0 / std::abs(zp)) * std::sqrt(b / a)};
    info.gamma_nu = {std::sqrt(2.0 / std::abs(zm_nu)) * std::sqrt(a / b),
                     std::sqrt(2.0 / std::abs(zp_nu)) * std::sqrt(a / b)};
    return info;
}

SupportInfo analyze_edges(const Measure& mu, const Measure& nu) { return sqrt_coefficients(mu, nu, find_support(mu, nu)); }

double near_edge_window(const SupportInfo& info) { return 1e-3 * (info.E_plus - info.E_minus); }

double near_edge_density(const SupportInfo& info, const Measure& /*mu*/, const Measure& nu, double x) {
    const double win = near_edge_window(info);
    if (x >= info.E_minus - win && x <= info.E_minus + win) {
        if (x <= info.E_minus) return 0.0;
        const double I = m_transform(nu, info.omega_mu_at.first).I;
        return info.gamma_mu.first * I * std::sqrt(x - info.E_minus) / (std::numbers::pi * x);
    }
    if (x >= info.E_plus - win && x <= info.E_plus + win) {
        if (x >= info.E_plus) return 0.0;
        const double I = m_transform(nu, info.omega_mu_at.second).I;
        return info.gamma_mu.second * I * std::sqrt(info.E_plus - x) / (std::numbers::pi * x);
    }
    throw DomainError("near_edge_density: x outside the near-edge windows");
}

}  // namespace fmc
