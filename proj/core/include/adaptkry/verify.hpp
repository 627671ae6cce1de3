#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace adaptkry {

// One theorem-verification sweep over freshly generated random graphs.
struct TheoremReport {
  std::string theorem;
  int graphs_tested = 0;
  std::vector<std::string> violations;
  double max_residual = 0.0;
  bool passed = true;
  std::map<std::string, double> notes;  // informational extras
};

std::string theorem_report_to_json(const TheoremReport& report);

struct VerifyOptions {
  int graphs = 50;
  std::size_t max_nodes = 50;
  std::vector<double> tau_grid = {0.25, 0.5, 0.75, 1.0, 1.25, 1.5};
  std::vector<double> eps_values = {0.1, 0.01};
  int information_loss_trials = 100;
  int weight_draws = 20;
  int unification_degree = 8;
  int merge_seeds = 10;
  std::uint64_t seed = 1;
};

// lambda_i(tau) monotone in tau and ordered against the tau=1 spectrum.
TheoremReport run_monotonicity_suite(const VerifyOptions& opt);
// P^K within eps of the closed-form stationary matrix at K from the bound.
TheoremReport run_convergence_suite(const VerifyOptions& opt);
// Relative Frobenius loss of a truncated basis within sqrt((t-K)/t).
TheoremReport run_information_loss_suite(const VerifyOptions& opt);
// Chebyshev/Bernstein/Jacobi filtered signals live in the monomial Krylov
// span and match their Phi^T w monomial conversion.
TheoremReport run_basis_unification_suite(const VerifyOptions& opt);
// Merged-basis forward pass equals the explicit multi-basis sum.
TheoremReport run_merge_identity_suite(const VerifyOptions& opt);

// Informational: measured Rayleigh quotient y'Ly / y'Dy on binary planted
// graphs next to the 4(1-h) and 2(1-h) candidates. Never fails.
TheoremReport run_homophily_quotient_probe(const VerifyOptions& opt);

std::vector<TheoremReport> run_all_suites(const VerifyOptions& opt);

}  // namespace adaptkry
