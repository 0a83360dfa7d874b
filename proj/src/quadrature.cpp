#include "fmc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <stdexcept>
#include <tuple>

#include "fmc/errors.hpp"

namespace fmc {

double jacobi_weight_mass(double alpha, double beta) {
    return std::exp((alpha + beta + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                    std::lgamma(beta + 1.0) - std::lgamma(alpha + beta + 2.0));
}

namespace {

// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix
// (diag d, subdiag e with e[i] coupling rows i and i+1). On exit d holds the
// eigenvalues and z the first components of the normalized eigenvectors.
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z) {
    const int n = static_cast<int>(d.size());
    e.push_back(0.0);
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        while (true) {
            int m = l;
            for (; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) + dd == dd) break;
            }
            if (m == l) break;
            if (++iter > 60) throw ConvergenceError("gauss_jacobi: QL iteration did not converge");
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            int i = m - 1;
            bool underflow = false;
            for (; i >= l; --i) {
                double f = s * e[i];
                const double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if (underflow) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    e.pop_back();
}

}  // namespace

GaussJacobiRule gauss_jacobi(int n, double alpha, double beta) {
    if (n < 1) throw DomainError("gauss_jacobi: n must be positive");
    if (!(alpha > -1.0) || !(beta > -1.0)) throw DomainError("gauss_jacobi: exponents must exceed -1");

    const double ab = alpha + beta;
    std::vector<double> diag(n), off(n > 1 ? n - 1 : 0);
    for (int k = 0; k < n; ++k) {
        const double s = 2.0 * k + ab;
        if (k == 0) {
            diag[k] = (beta - alpha) / (ab + 2.0);
        } else {
            diag[k] = (beta * beta - alpha * alpha) / (s * (s + 2.0));
        }
    }
    for (int k = 1; k < n; ++k) {
        const double s = 2.0 * k + ab;
        double ratio;  // (k + ab) / (s - 1), which is exactly 1 at k = 1
        if (k == 1) {
            ratio = 1.0;
        } else {
            ratio = (k + ab) / (s - 1.0);
        }
        const double b2 = 4.0 * k * (k + alpha) * (k + beta) * ratio / (s * s * (s + 1.0));
        off[k - 1] = std::sqrt(b2);
    }

    std::vector<double> first(n, 0.0);
    first[0] = 1.0;
    tridiagonal_ql(diag, off, first);

    const double mass = jacobi_weight_mass(alpha, beta);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return diag[a] < diag[b]; });

    GaussJacobiRule rule;
    rule.n = n;
    rule.alpha = alpha;
    rule.beta = beta;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = diag[order[i]];
        rule.weights[i] = mass * first[order[i]] * first[order[i]];
    }
    return rule;
}

std::shared_ptr<const GaussJacobiRule> cached_gauss_jacobi(int n, double alpha, double beta) {
    using Key = std::tuple<int, double, double>;
    static std::shared_mutex mutex;
    static std::map<Key, std::shared_ptr<const GaussJacobiRule>> cache;

    const Key key{n, alpha, beta};
    {
        std::shared_lock lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto rule = std::make_shared<const GaussJacobiRule>(gauss_jacobi(n, alpha, beta));
    std::unique_lock lock(mutex);
    return cache.try_emplace(key, std::move(rule)).first->second;
}

double bernstein_rho(std::complex<double> t) {
    // rho = |t + sqrt(t^2 - 1)| on the branch with modulus >= 1
    const std::complex<double> root = std::sqrt(t - 1.0) * std::sqrt(t + 1.0);
    return std::max(std::abs(t + root), std::abs(t - root));
}

}  // namespace fmc
