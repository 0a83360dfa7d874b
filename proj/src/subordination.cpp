#include "fmc/subordination.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fmc/errors.hpp"

namespace fmc {

namespace {

constexpr double kDamping[] = {1.0, 0.5, 0.25, 0.1};
constexpr double kNewtonSwitch = 1e-6;

struct Defects {
    double r1 = 0.0;
    double r2 = 0.0;
};

bool within(const Defects& d, cplx z, double tol) {
    return d.r1 <= tol * (1.0 + std::abs(z)) && d.r2 <= tol * (1.0 + std::norm(z));
}

double scaled(const Defects& d, cplx z) {
    return std::max(d.r1 / (1.0 + std::abs(z)), d.r2 / (1.0 + std::norm(z)));
}

bool finite(cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

// Candidate (a, b) = (Omega_mu, Omega_nu) with both M values cached.
struct Point {
    cplx a, b;
    cplx Mmu_b, Mnu_a;
    Defects d;
};

std::optional<Point> evaluate(const Measure& mu, const Measure& nu, cplx z, cplx a, cplx b) {
    try {
        Point p{a, b, M_value(mu, b), M_value(nu, a), {}};
        p.d.r1 = std::abs(p.Mmu_b - p.Mnu_a);
        p.d.r2 = std::abs(a * b - z * p.Mnu_a);
        if (!std::isfinite(p.d.r1) || !std::isfinite(p.d.r2)) return std::nullopt;
        return p;
    } catch (const DomainError&) {
        return std::nullopt;
    } catch (const PoleError&) {
        return std::nullopt;
    }
}

// Omega_nu implied by Omega_mu through the product identity.
std::optional<Point> from_omega_mu(const Measure& mu, const Measure& nu, cplx z, cplx a) {
    try {
        const cplx Mn = M_value(nu, a);
        const cplx b = z * Mn / a;
        if (!finite(b)) return std::nullopt;
        return evaluate(mu, nu, z, a, b);
    } catch (const DomainError&) {
        return std::nullopt;
    } catch (const PoleError&) {
        return std::nullopt;
    }
}

bool upper_ok(cplx z, cplx a, cplx b) {
    if (z.imag() > 0.0) return a.imag() > 0.0 && b.imag() > 0.0;
    const double tiny = 1e-13;
    return a.imag() >= -tiny * (1.0 + std::abs(a)) && b.imag() >= -tiny * (1.0 + std::abs(b));
}

struct NewtonOutcome {
    bool ok = false;
    Point p;
    int steps = 0;
};

NewtonOutcome newton(const Measure& mu, const Measure& nu, cplx z, Point p, int max_steps, double tol) {
    NewtonOutcome out{false, p, 0};
    // once inside the tolerance, a few more steps push towards rounding level
    int polish = 2;
    for (int it = 0; it <= max_steps + 2; ++it) {
        out.p = p;
        out.steps = it;
        if (within(p.d, z, tol)) {
            out.ok = true;
            if (polish-- == 0) return out;
        } else if (it >= max_steps) {
            break;
        }
        TransformValue tn, tm;
        try {
            tn = m_transform(nu, p.a);
            tm = m_transform(mu, p.b);
        } catch (const std::exception&) {
            return out;
        }
        const cplx g1 = tm.M - tn.M;
        const cplx g2 = p.a * p.b - z * tn.M;
        const cplx j11 = -tn.Mp, j12 = tm.Mp;
        const cplx j21 = p.b - z * tn.Mp, j22 = p.a;
        const cplx det = j11 * j22 - j12 * j21;
        if (det == 0.0 || !finite(det)) return out;
        const cplx da = (g1 * j22 - j12 * g2) / det;
        const cplx db = (j11 * g2 - j21 * g1) / det;
        bool accepted = false;
        double t = 1.0;
        for (int k = 0; k < 8; ++k, t *= 0.5) {
            const cplx a = p.a - t * da;
            const cplx b = p.b - t * db;
            if (!upper_ok(z, a, b)) continue;
            auto q = evaluate(mu, nu, z, a, b);
            if (!q) continue;
            if (scaled(q->d, z) < scaled(p.d, z)) {
                p = *q;
                accepted = true;
                break;
            }
        }
        if (!accepted) return out;
    }
    out.ok = within(out.p.d, z, tol);
    return out;
}

SubordinationState finish(const Point& p, cplx z, int iters, bool ok, std::string diag) {
    SubordinationState s;
    s.z = z;
    s.omega_mu = p.a;
    s.omega_nu = p.b;
    s.M_rho = p.Mnu_a;
    s.m_rho = m_from_M(z, s.M_rho);
    s.residual = std::max(p.d.r1, p.d.r2);
    s.iters = iters;
    s.converged = ok;
    s.diagnostic = std::move(diag);
    return s;
}

}  // namespace

EpsLadder EpsLadder::halving(double start, int rungs) {
    if (!(start > 0.0) || rungs < 1) throw DomainError("eps ladder: need start > 0 and at least one rung");
    EpsLadder l;
    double e = start;
    for (int k = 0; k < rungs; ++k, e *= 0.5) l.eps.push_back(e);
    return l;
}

cplx m_from_M(cplx z, cplx M) { return M / (z * (1.0 - M)); }

SubordinationState try_solve_point(const Measure& mu, const Measure& nu, cplx z, std::optional<cplx> init,
                                   const SolverOptions& opt) {
    if (mu.is_zero_point_mass() || nu.is_zero_point_mass()) throw DomainError("subordination: point mass at 0");
    if (!(z.imag() > 0.0)) throw DomainError("subordination: z must lie in the upper half-plane");

    int iters = 0;
    std::ostringstream trace;

    if (init && init->imag() > 0.0) {
        if (auto p0 = from_omega_mu(mu, nu, z, *init)) {
            const auto nr = newton(mu, nu, z, *p0, opt.max_newton, opt.tol);
            iters += nr.steps;
            if (nr.ok) return finish(nr.p, z, iters, true, "");
            trace << "warm newton stalled at " << scaled(nr.p.d, z) << "; ";
        }
    }

    auto cur = from_omega_mu(mu, nu, z, z);
    if (!cur) {
        trace << "initial point rejected";
        SubordinationState s;
        s.z = z;
        s.diagnostic = trace.str();
        return s;
    }
    bool tried_newton = false;
    for (int k = 0; k < opt.max_fixed_point; ++k) {
        ++iters;
        if (within(cur->d, z, opt.tol)) {
            const auto nr = newton(mu, nu, z, *cur, 0, opt.tol);
            return finish(nr.ok ? nr.p : *cur, z, iters + nr.steps, true, "");
        }
        if (!tried_newton && scaled(cur->d, z) < kNewtonSwitch) {
            tried_newton = true;
            const auto nr = newton(mu, nu, z, *cur, opt.max_newton, opt.tol);
            iters += nr.steps;
            if (nr.ok) return finish(nr.p, z, iters, true, "");
            if (scaled(nr.p.d, z) < scaled(cur->d, z)) cur = nr.p;
        }
        // T(Omega) = z M_mu(w) / w with w = z M_nu(Omega) / Omega
        const cplx T = z * cur->Mmu_b / cur->b;
        bool moved = false;
        for (double lam : kDamping) {
            const cplx next = (1.0 - lam) * cur->a + lam * T;
            if (!(next.imag() > 0.0) || !finite(next)) continue;
            auto cand = from_omega_mu(mu, nu, z, next);
            if (!cand || !(cand->b.imag() > 0.0)) continue;
            if (cand->d.r1 > 10.0 * cur->d.r1) continue;
            cur = cand;
            moved = true;
            break;
        }
        if (!moved) {
            trace << "fixed point left the half-plane at iteration " << k << "; ";
            break;
        }
    }
    if (within(cur->d, z, opt.tol)) return finish(*cur, z, iters, true, "");
    const auto nr = newton(mu, nu, z, *cur, opt.max_newton, opt.tol);
    iters += nr.steps;
    if (nr.ok) return finish(nr.p, z, iters, true, "");
    const Point& best = scaled(nr.p.d, z) < scaled(cur->d, z) ? nr.p : *cur;
    trace << "residual " << scaled(best.d, z) << " after " << iters << " iterations";
    return finish(best, z, iters, false, trace.str());
}

SubordinationState solve_point(const Measure& mu, const Measure& nu, cplx z, std::optional<cplx> init,
                               const SolverOptions& opt) {
    auto s = try_solve_point(mu, nu, z, init, opt);
    if (!s.converged) {
        std::ostringstream os;
        os.precision(17);
        os << "subordination did not converge at z = " << z << ": " << s.diagnostic;
        throw ConvergenceError(os.str());
    }
    return s;
}

std::vector<SubordinationState> solve_grid(const Measure& mu, const Measure& nu, const std::vector<double>& xs,
                                           double eps) {
    if (!(eps > 0.0)) throw DomainError("solve_grid: eps must be positive");
    std::vector<SubordinationState> out;
    out.reserve(xs.size());
    std::optional<cplx> seed;
    for (double x : xs) {
        auto s = try_solve_point(mu, nu, {x, eps}, seed);
        if (s.converged) seed = s.omega_mu;
        out.push_back(std::move(s));
    }
    return out;
}

namespace {

// Neville evaluation at 0 of the polynomial through (e_i, v_i).
cplx neville_at_zero(const double* e, const cplx* v, int n) {
    std::vector<cplx> p(v, v + n);
    for (int k = 1; k < n; ++k) {
        for (int i = 0; i + k < n; ++i) {
            p[i] = (e[i + k] * p[i] - e[i] * p[i + 1]) / (e[i + k] - e[i]);
        }
    }
    return p[0];
}

}  // namespace

SubordinationState solve_boundary(const Measure& mu, const Measure& nu, double x, const EpsLadder& ladder,
                                  std::optional<cplx> init, double* extrapolation_error) {
    if (!(x > 0.0)) throw DomainError("solve_boundary: x must be positive");
    const auto& eps = ladder.eps;
    if (eps.empty()) throw DomainError("solve_boundary: empty ladder");
    for (std::size_t i = 1; i < eps.size(); ++i) {
        if (!(eps[i] < eps[i - 1]) || !(eps[i] > 0.0)) throw DomainError("solve_boundary: ladder must decrease");
    }

    std::vector<double> e;
    std::vector<cplx> va, vb;
    std::optional<cplx> seed = init;
    int iters = 0;
    for (double ep : eps) {
        auto s = try_solve_point(mu, nu, {x, ep}, seed);
        iters += s.iters;
        if (!s.converged) {
            s.diagnostic = "ladder rung eps=" + std::to_string(ep) + " failed: " + s.diagnostic;
            return s;
        }
        seed = s.omega_mu;
        e.push_back(ep);
        va.push_back(s.omega_mu);
        vb.push_back(s.omega_nu);
    }

    const int n = static_cast<int>(e.size());
    const int k = std::min(ladder.extrapolation_order + 1, n);
    cplx a = neville_at_zero(&e[n - k], &va[n - k], k);
    cplx b = neville_at_zero(&e[n - k], &vb[n - k], k);
    double err = std::abs(va.back() - a) + std::abs(vb.back() - b);
    if (n > k) {
        const cplx a2 = neville_at_zero(&e[n - k - 1], &va[n - k - 1], k);
        const cplx b2 = neville_at_zero(&e[n - k - 1], &vb[n - k - 1], k);
        err = std::abs(a - a2) + std::abs(b - b2);
    }
    if (extrapolation_error) *extrapolation_error = err;

    const cplx z(x, 0.0);
    // real-axis Newton polish; rejected when it wanders off the extrapolated point
    if (auto p0 = evaluate(mu, nu, z, a, b)) {
        const auto nr = newton(mu, nu, z, *p0, 20, 1e-13);
        const double allowed = std::max(1e-8, 10.0 * err) * (1.0 + std::abs(a));
        if (nr.ok && std::abs(nr.p.a - a) + std::abs(nr.p.b - b) <= allowed && upper_ok(z, nr.p.a, nr.p.b)) {
            auto s = finish(nr.p, z, iters + nr.steps, true, "");
            return s;
        }
        auto s = finish(*p0, z, iters, true, "");
        s.residual = err;
        if (err > 1e-6 * (1.0 + std::abs(a))) {
            s.converged = false;
            s.diagnostic = "eps ladder values disagree; possible atom or edge";
        }
        return s;
    }
    // The extrapolated point may sit on a support (atoms, identity factors):
    // only M_nu(Omega_mu) from the last rung is meaningful then.
    SubordinationState s;
    s.z = z;
    s.omega_mu = a;
    s.omega_nu = b;
    const cplx M_last = M_value(nu, va.back());
    const cplx M1 = M_value(nu, va[n - 2]);
    const cplx M2 = n >= 3 ? M_value(nu, va[n - 3]) : M1;
    const cplx Mv[3] = {M2, M1, M_last};
    s.M_rho = n >= 3 ? neville_at_zero(&e[n - 3], Mv, 3) : M_last;
    s.m_rho = m_from_M(z, s.M_rho);
    s.residual = err;
    s.iters = iters;
    s.converged = err <= 1e-6 * (1.0 + std::abs(a));
    if (!s.converged) s.diagnostic = "eps ladder values disagree; possible atom or edge";
    return s;
}

std::pair<double, double> stability_check(const SubordinationState& s, const Measure& mu, const Measure& nu) {
    return {mu.distance_to_support(s.omega_nu), nu.distance_to_support(s.omega_mu)};
}

std::pair<double, double> equation_residuals(const Measure& mu, const Measure& nu, cplx z, cplx omega_mu,
                                             cplx omega_nu) {
    const cplx Mn = M_value(nu, omega_mu);
    const cplx Mm = M_value(mu, omega_nu);
    return {std::abs(Mm - Mn), std::abs(omega_mu * omega_nu - z * Mn)};
}

std::pair<cplx, cplx> omega_reciprocal(const Measure& mu, const Measure& nu, cplx w) {
    if (w == 0.0) throw DomainError("omega_reciprocal: w must be nonzero");
    const cplx z = 1.0 / w;
    // 1/w lies in the lower half-plane when w is in the upper one
    const auto s = solve_point(mu, nu, z.imag() > 0.0 ? z : std::conj(z));
    cplx a = s.omega_mu, b = s.omega_nu;
    if (!(z.imag() > 0.0)) {
        a = std::conj(a);
        b = std::conj(b);
    }
    return {1.0 / a, 1.0 / b};
}

}  // namespace fmc
