#pragma once

#include <array>
#include <complex>
#include <utility>

#include "fmc/measure.hpp"

namespace fmc {

using cplx = std::complex<double>;

/// Transforms of one measure at one point z.
/// eta and psi are stored in the reciprocal convention: eta = eta_mu(1/z) =
/// 1/M(z) and psi = psi_mu(1/z) = -(z m(z) + 1).
struct TransformValue {
    cplx z;
    cplx m, m1, m2;
    cplx M, Mp, Mpp;
    cplx eta, psi;
    double I = 0.0;     // integral of x/|x-z|^2
    double Ihat = 0.0;  // hat-measure integral of 1/|x-z|^2
};

struct QuadratureOptions {
    int nodes = 0;             // 0 selects the count from the pole geometry
    bool allow_contour = true; // deform into the lower half-plane when z is close to the support
};

/// Returns (m, m', m'') with entries above `order` left at zero.
std::array<cplx, 3> stieltjes(const Measure& mu, cplx z, int order = 0, const QuadratureOptions& opt = {});

/// Full bundle. Throws SingularityError on the support and PoleError when
/// z m(z) + 1 vanishes.
TransformValue m_transform(const Measure& mu, cplx z, const QuadratureOptions& opt = {});

/// M alone; cheaper than m_transform when derivatives are not needed.
cplx M_value(const Measure& mu, cplx z);

/// (eta(z), psi(z)) with eta(z) = 1/M(1/z) and psi(z) = -1 - m(1/z)/z.
std::pair<cplx, cplx> eta_psi(const Measure& mu, cplx z);

/// Node count used for a component when evaluating at z (after the cap).
int quadrature_nodes(const JacobiComponent& c, cplx z);

}  // namespace fmc
