// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fene/ensemble.hpp"
#include "fene/model.hpp"

namespace fene {

enum class Strategy { even_moments, even_moments_plus_stress, stress_cascade, custom };

// One macroscopic observable m_l(x). The closed forms share the FENE
// denominator u = 1 - x^2/b:
//   even_power(p):  x^(2p)
//   connector:      x^2/u           (= x F_FENE(x); the Kramers stress moment)
//   cascade_third:  x^2/u^2
//   cascade_fourth: x^4/u^3
// `offset` shifts the reported value only; constant shifts have zero gradient
// and are folded into projection targets.
struct ObservableTerm {
    enum class Kind { even_power, connector, cascade_third, cascade_fourth };
    Kind kind = Kind::even_power;
    int power = 1;       // even_power exponent p (x^(2p)); ignored otherwise
    double offset = 0.0;

    bool divergent() const { return kind != Kind::even_power; }
};

// Callable view of one observable with analytic first/second derivatives.
struct Observable {
    std::function<double(double)> eval;
    std::function<double(double)> deriv;
    std::function<double(double)> second_deriv;
    std::string label;
};

// An ordered set of L macroscopic state variables plus the model parameters
// they refer to. Strategies follow the three standard hierarchies:
//   strategy 1 "even:L"        : x^2, x^4, ..., x^(2L)
//   strategy 2 "even+stress:L" : x^2 ... x^(2(L-1)), then x^2/u
//   strategy 3 "cascade"       : x^2, x^2/u - 1, x^2/u^2, x^4/u^3  (L = 4)
// Strategy 2 constrains C = <x F(x)> rather than tau_p; the two differ by the
// fixed affine map tau_p = (eps/We)(C - 1), so the constraint sets coincide.
class StrategySpec {
  public:
    static StrategySpec even_moments(int num_moments, const ModelParams& params);
    static StrategySpec even_moments_plus_stress(int num_vars, const ModelParams& params);
    static StrategySpec stress_cascade(const ModelParams& params);
    // arbitrary term list (used by tests; duplicates allowed)
    static StrategySpec custom(std::vector<ObservableTerm> terms, const ModelParams& params);
    // "even:L" | "even+stress:L" | "cascade"
    static StrategySpec from_token(const std::string& token, const ModelParams& params);

    Strategy strategy() const { return strategy_; }
    int num_observables() const { return static_cast<int>(terms_.size()); }
    const std::vector<ObservableTerm>& terms() const { return terms_; }
    const ModelParams& params() const { return params_; }
    std::string token() const;
    std::string label(int l) const;
    bool has_divergent_terms() const;
    // true when the Kramers stress moment is among the constraints (the
    // lift monitor then falls back to the first unconstrained even moment)
    bool stress_constrained() const;

    // Evaluates every observable (or its derivative) at x into out[0..L).
    // Returns false when x lies outside the domain of a divergent term
    // (x^2 >= b); out is not written in that case.
    bool eval_all(double x, double* out) const;
    bool deriv_all(double x, double* out) const;

    double eval(int l, double x) const;
    double deriv(int l, double x) const;
    double second_deriv(int l, double x) const;
    Observable observable(int l) const;

  private:
    StrategySpec(Strategy s, std::vector<ObservableTerm> terms, const ModelParams& params);
    Strategy strategy_;
    std::vector<ObservableTerm> terms_;
    ModelParams params_;
    bool divergent_ = false;
};

// Macroscopic state: L observable averages at a given time.
struct MacroState {
    std::vector<double> values;
    StrategySpec spec;
    double time = 0.0;
};

// Empirical restriction, values[l] = (1/N) sum_n m_l(X^n); pairwise-summed in
// fixed blocks so the result is bit-stable for any worker count.
MacroState restrict_ensemble(const Ensemble& ensemble, const StrategySpec& spec);

// Kramers stress tau_p = (eps/We)(<X F(X)> - 1). FENE-P uses the ensemble's
// own <X^2> in the force denominator.
double stress(const Ensemble& ensemble, const ModelParams& params);

// Row-major L x N matrix with entries m_l'(X^n)/N (the restriction gradient).
std::vector<double> gradient_matrix(const Ensemble& ensemble, const StrategySpec& spec);

// Even-moment equation of state: given the current even moments M (strategy 1)
// and the unclosed connector terms M_l^C = <F m_l'> in `extra`, returns
//   dM_l/dt = 2 l kappa M_l - M_l^C/(2 We) + l(2l-1) M_{l-1}/We,  M_0 = 1.
std::vector<double> eos_rhs(const MacroState& m, const std::vector<double>& extra,
                            double kappa_val, const ModelParams& params);

// Connector moments <F(X) m_l'(X)> estimated from an ensemble (the M_l^C
// inputs of eos_rhs). FENE-P uses the ensemble's own <X^2>.
std::vector<double> connector_moments(const Ensemble& ensemble, const StrategySpec& spec);

} // namespace fene
