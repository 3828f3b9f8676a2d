// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>

namespace fene {

struct Ensemble;

enum class ForceModel { hookean, fene, fenep };

// Nondimensional dumbbell parameters: maximal-extension parameter b,
// Weissenberg number We, and polymer viscosity ratio eps.
struct ModelParams {
    double b = 49.0;
    double we = 1.0;
    double eps = 1.0;
    ForceModel force_model = ForceModel::fene;

    void validate() const;
    double max_extension() const; // sqrt(b)
};

struct ForceEvaluation {
    double value;       // F(x)
    double denominator; // 1 - x^2/b (FENE), 1 - msq/b (FENE-P), 1 (Hookean)
};

// Spring force. FENE-P callers must pass the ensemble mean-square length msq;
// keeping it an explicit argument keeps evaluation pure.
double force(double x, const ModelParams& params, std::optional<double> msq = std::nullopt);
ForceEvaluation force_eval(double x, const ModelParams& params,
                           std::optional<double> msq = std::nullopt);

// Zero-flow equilibrium density, phi_eq(x) = Z^-1 (1 - x^2/b)^(b/2) on
// (-sqrt(b), sqrt(b)). Z is computed once by quadrature.
class EquilibriumDensity {
  public:
    explicit EquilibriumDensity(double b);
    double operator()(double x) const;
    double b() const { return b_; }
    double normalization() const { return z_; }
    // integral of x^power * phi_eq by quadrature
    double moment(int power) const;

  private:
    double b_;
    double z_;
};

// Convenience wrapper with a small cache keyed on b.
double equilibrium_density(double x, double b);

// n i.i.d. draws from phi_eq via X = sqrt(b) (2 B - 1), B ~ Beta(b/2+1, b/2+1);
// this is the exact law of phi_eq. `stream` separates independent batches
// drawn under the same seed.
Ensemble sample_equilibrium(std::size_t n, const ModelParams& params, std::uint64_t seed,
                            std::uint32_t stream = 0);

} // namespace fene
