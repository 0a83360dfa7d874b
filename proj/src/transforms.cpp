#include "fmc/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "fmc/errors.hpp"
#include "fmc/quadrature.hpp"

namespace fmc {

namespace {

constexpr int kMinNodes = 64;
constexpr int kMaxNodes = 4096;
// Gauss error decays like rho^(-2n); 22/ln(rho) leaves a margin over 1e-16.
constexpr double kDigitsBudget = 22.0;
// Depth of the lower half-plane path in reference coordinates.
constexpr double kContourDepth = 1.0;

int nodes_for_rho(double rho) {
    const double lr = std::log(rho);
    if (!(lr > 0.0)) return std::numeric_limits<int>::max();
    const double want = kDigitsBudget / lr;
    if (want > 1e9) return std::numeric_limits<int>::max();
    int n = kMinNodes;
    while (n < want) n *= 2;
    return n;
}

// Pole position in the s variable of the path t(s) = s - i h (1 - s^2).
double contour_rho(cplx tau) {
    const cplx ih(0.0, kContourDepth);
    const cplx disc = std::sqrt(1.0 + 4.0 * ih * (ih + tau));
    const cplx s1 = (-1.0 + disc) / (2.0 * ih);
    const cplx s2 = (-1.0 - disc) / (2.0 * ih);
    return std::min(bernstein_rho(s1), bernstein_rho(s2));
}

// Discretized measure: integrals of g against mu become sum w_i g(x_i).
// Nodes are complex when the contour is deformed.
struct Discretization {
    std::vector<cplx> x;
    std::vector<cplx> w;
    bool deformed = false;
};

void add_component(Discretization& d, const JacobiComponent& c, cplx z, const QuadratureOptions& opt) {
    const double h = c.half_width();
    const cplx tau = (z - c.center()) / h;
    const double scale = c.norm_const * std::pow(h, c.t_lo + c.t_hi + 1.0);

    int n_real = opt.nodes > 0 ? opt.nodes : nodes_for_rho(bernstein_rho(tau));
    bool deform = false;
    int n = n_real;
    if (opt.nodes == 0 && n_real > kMaxNodes && opt.allow_contour && tau.imag() > 0.0) {
        const int n_path = nodes_for_rho(contour_rho(tau));
        if (n_path < n_real) {
            deform = true;
            n = n_path;
        }
    }
    n = std::min(n, kMaxNodes);

    const auto rule = cached_gauss_jacobi(n, c.alpha(), c.beta());
    if (!deform) {
        for (int i = 0; i < n; ++i) {
            d.x.emplace_back(c.center() + h * rule->nodes[i]);
            d.w.emplace_back(scale * rule->weights[i]);
        }
        return;
    }
    d.deformed = true;
    const cplx ih(0.0, kContourDepth);
    for (int i = 0; i < n; ++i) {
        const double s = rule->nodes[i];
        const cplx t = s - ih * (1.0 - s * s);
        const cplx dt = 1.0 + 2.0 * ih * s;
        const cplx rem = std::pow(1.0 + ih * (1.0 + s), c.alpha()) * std::pow(1.0 - ih * (1.0 - s), c.beta()) * dt;
        d.x.push_back(c.center() + h * t);
        d.w.push_back(scale * rule->weights[i] * rem);
    }
}

void check_domain(const Measure& mu, cplx z) {
    if (z.imag() != 0.0) return;
    if (mu.on_support(z.real())) throw SingularityError("transform evaluated on the support of the measure");
}

Discretization discretize(const Measure& mu, cplx z, const QuadratureOptions& opt) {
    Discretization d;
    for (const auto& a : mu.atoms()) {
        d.x.emplace_back(a.location);
        d.w.emplace_back(a.weight);
    }
    for (const auto& c : mu.components()) add_component(d, c, z, opt);
    return d;
}

// Kernel sums for z in the closed upper half-plane.
struct Sums {
    cplx S[3]{};  // integral of 1/(x-z)^(k+1)
    cplx P[3]{};  // integral of x/(x-z)^(k+1)
    double I = 0.0;
    double Ihat = 0.0;
    bool have_I = false;
};

Sums kernel_sums(const Measure& mu, cplx z, int order, const QuadratureOptions& opt, bool want_I = true) {
    const Discretization d = discretize(mu, z, opt);
    Sums s;
    const std::size_t n = d.x.size();
    for (std::size_t i = 0; i < n; ++i) {
        const cplx r = 1.0 / (d.x[i] - z);
        cplx rk = r * d.w[i];
        for (int k = 0; k <= order; ++k) {
            s.S[k] += rk;
            s.P[k] += d.x[i] * rk;
            rk *= r;
        }
    }
    if (want_I && !d.deformed) {
        // variance form of the hat integral; no cancellation between moments
        double I = 0.0, var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double xr = d.x[i].real();
            const double wr = d.w[i].real();
            const cplx q = xr / (xr - z);
            I += wr * xr / std::norm(xr - z);
            var += wr * std::norm(q - s.P[0]);
        }
        s.I = I;
        s.Ihat = var / (std::norm(s.P[0]) * std::norm(z));
        s.have_I = true;
    }
    return s;
}

TransformValue assemble(const Measure& mu, cplx z, const QuadratureOptions& opt) {
    check_domain(mu, z);
    const bool lower = z.imag() < 0.0;
    const cplx zu = lower ? std::conj(z) : z;
    Sums s = kernel_sums(mu, zu, 2, opt);

    TransformValue v;
    v.z = zu;
    v.m = s.S[0];
    v.m1 = s.S[1];
    v.m2 = 2.0 * s.S[2];
    const cplx P = s.P[0];
    const cplx P1 = s.P[1];
    const cplx P2 = 2.0 * s.P[2];
    if (P == 0.0 || !std::isfinite(std::abs(1.0 / P))) throw PoleError("M has a pole: z m(z) + 1 = 0", z);
    v.M = 1.0 - 1.0 / P;
    v.Mp = P1 / (P * P);
    v.Mpp = P2 / (P * P) - 2.0 * P1 * P1 / (P * P * P);
    v.eta = 1.0 / v.M;
    v.psi = -P;
    if (s.have_I) {
        v.I = s.I;
        v.Ihat = s.Ihat;
    } else {
        v.I = P.imag() / zu.imag();
        v.Ihat = (v.M / zu).imag() / zu.imag();
    }
    if (lower) {
        v.z = z;
        for (cplx* p : {&v.m, &v.m1, &v.m2, &v.M, &v.Mp, &v.Mpp, &v.eta, &v.psi}) *p = std::conj(*p);
    }
    return v;
}

}  // namespace

int quadrature_nodes(const JacobiComponent& c, cplx z) {
    const cplx tau = (z - c.center()) / c.half_width();
    return std::min(nodes_for_rho(bernstein_rho(tau)), kMaxNodes);
}

std::array<cplx, 3> stieltjes(const Measure& mu, cplx z, int order, const QuadratureOptions& opt) {
    if (order < 0 || order > 2) throw DomainError("stieltjes: order must be 0, 1 or 2");
    check_domain(mu, z);
    const bool lower = z.imag() < 0.0;
    const Sums s = kernel_sums(mu, lower ? std::conj(z) : z, order, opt, false);
    std::array<cplx, 3> out{s.S[0], s.S[1], 2.0 * s.S[2]};
    if (order < 2) out[2] = 0.0;
    if (order < 1) out[1] = 0.0;
    if (lower)
        for (auto& v : out) v = std::conj(v);
    return out;
}

TransformValue m_transform(const Measure& mu, cplx z, const QuadratureOptions& opt) { return assemble(mu, z, opt); }

cplx M_value(const Measure& mu, cplx z) {
    check_domain(mu, z);
    const bool lower = z.imag() < 0.0;
    const Sums s = kernel_sums(mu, lower ? std::conj(z) : z, 0, {}, false);
    const cplx P = s.P[0];
    if (P == 0.0) throw PoleError("M has a pole: z m(z) + 1 = 0", z);
    const cplx M = 1.0 - 1.0 / P;
    return lower ? std::conj(M) : M;
}

std::pair<cplx, cplx> eta_psi(const Measure& mu, cplx z) {
    if (z == 0.0) throw DomainError("eta_psi: z must be nonzero");
    const TransformValue v = m_transform(mu, 1.0 / z);
    return {v.eta, v.psi};
}

}  // namespace fmc
