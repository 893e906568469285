#pragma once

#include <optional>
#include <span>
#include <vector>

#include "robustsum/certificate.hpp"
#include "robustsum/duality.hpp"

namespace robustsum {

// x* ∈ ∂^ε h(x)  ⟺  h(x) + h*(x*) - <x*, x> <= ε
Certificate eps_subdiff_membership(const FunctionAtom& h, std::span<const double> x,
                                   std::span<const double> xstar, double eps, double tol = 1e-9);
Certificate eps_subdiff_membership(const DualityProblem& p, std::span<const double> x,
                                   std::span<const double> xstar, double eps);
// x ∈ M^ε f(x*), the inverse of ∂^ε f.
Certificate M_eps_membership(const DualityProblem& p, std::span<const double> xstar,
                             std::span<const double> x, double eps);

// All J with |J| <= max_card (among the enumerable indices) and f(x) <= Σ_J f_i(x) + α.
std::vector<std::vector<std::size_t>> S_alpha(const DualityProblem& p, std::span<const double> x, double alpha);
bool T_alpha_membership(const DualityProblem& p, std::span<const std::size_t> J, std::span<const double> x,
                        double alpha);

Certificate N_eps_membership(const DualityProblem& p, std::span<const double> xstar, std::span<const double> x,
                             double eps);
Certificate Pi_eps_membership(const DualityProblem& p, std::span<const double> x, std::span<const double> xstar,
                              double eps);

// Exact-sum variant for one fixed decomposition (J, parts) of x*.
Certificate B_eps_membership(const DualityProblem& p, std::span<const double> xstar, const Decomposition& d,
                             std::span<const double> x, double eps);
// x* ∈ Π_s^ε f(x)  ⟺  x ∈ N_s^ε f(x*)
Certificate Ns_Pis_membership(const DualityProblem& p, std::span<const double> x, std::span<const double> xstar,
                              double eps);

// A decomposition of y with Σ f_i*(parts_i) <= target, if one is found.
std::optional<Decomposition> find_decomposition(const DualityProblem& p, std::span<const double> y, double target);

// Re-checks a Member witness for N^ε / Π^ε / B^ε / Π_s^ε with fresh arithmetic.
bool verify_witness(const DualityProblem& p, std::span<const double> x, std::span<const double> xstar, double eps,
                    const Witness& w);

std::vector<double> eta_schedule(double eps, unsigned steps);

}  // namespace robustsum
