// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

#include "fene/histio.hpp"
#include "fene/model.hpp"
#include "fene/observables.hpp"

namespace fene {

// Quasi-equilibrium density: the minimizer of the relative entropy
// H(phi || phi_eq) over densities matching the moment constraints,
//   phi(x) = Z^-1 phi_eq(x) exp(sum_l lambda_l m_l(x)).
// Solved by Newton on the convex dual with the moment covariance as the
// Jacobian. Observables that diverge at |x| -> sqrt(b) admit only
// non-positive multipliers; targets that demand positive ones are refused
// (they correspond to minimizing sequences that pile mass onto the wall).
class QEDensity {
  public:
    QEDensity(std::vector<double> multipliers, const StrategySpec& spec);

    double pdf(double x) const;
    const std::vector<double>& multipliers() const { return multipliers_; }
    const StrategySpec& spec() const { return spec_; }
    // ln of the full normalization (phi_eq taken unnormalized inside)
    double log_norm() const { return log_norm_; }
    double log_z_eq() const { return log_z_eq_; }
    // moments of the constrained observables under this density
    const std::vector<double>& moments() const { return moments_; }
    // smallest pivot of the final dual Hessian factorization (> 0 certifies
    // positive definiteness; 0 when the density was built directly)
    double min_hessian_pivot() const { return min_pivot_; }
    int newton_iterations() const { return newton_iters_; }

    // quadrature of g against the density, relative tolerance ~1e-9
    double moment(const std::function<double(double)>& g) const;

    // H(phi || phi_eq) = sum_l lambda_l M_l - ln(Z / Z_eq) >= 0
    double relative_entropy() const;

    // integration domain [lo, hi] (truncated near the wall when divergent
    // observables are present)
    double domain_lo() const { return -x_max_; }
    double domain_hi() const { return x_max_; }

  private:
    friend QEDensity qe_solve(const MacroState&, const StrategySpec&, const ModelParams&);
    friend QEDensity qe_nearest_feasible(const MacroState&, const StrategySpec&,
                                         const ModelParams&);
    void finalize();

    std::vector<double> multipliers_;
    StrategySpec spec_;
    double x_max_ = 0.0;
    double log_norm_ = 0.0;
    double log_z_eq_ = 0.0;
    std::vector<double> moments_;
    double min_pivot_ = 0.0;
    int newton_iters_ = 0;
};

// Solves the constrained entropy minimization for the given targets.
// Throws InfeasibleMomentsError when Newton cannot meet the constraints
// inside the admissible multiplier region.
QEDensity qe_solve(const MacroState& target, const StrategySpec& spec, const ModelParams& params);

// Information projection onto the feasible set: runs the same dual descent
// with divergent-direction multipliers capped at zero and returns the
// resulting density (its moments are the nearest feasible target). Useful
// because strongly driven kinetic states carry more near-wall mass than any
// admissible quasi-equilibrium density matching them.
QEDensity qe_nearest_feasible(const MacroState& target, const StrategySpec& spec,
                              const ModelParams& params);

// H(phi_hat || phi_eq) for a binned empirical density. Throws
// SupportViolationError if mass lies where phi_eq vanishes.
double relative_entropy(const Histogram& h, double b);

} // namespace fene
