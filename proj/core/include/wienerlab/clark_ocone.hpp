#pragma once

// Representation v = E v + delta(PiPi grad v) for R^d-valued functionals,
// its exactness class on the grid, convergence under refinement, and the
// minimal-energy integrand grad L^{-1}(phi - E phi).
//
// On a grid the adapted integrand reproduces exactly the functionals whose
// monomials all have order 1 at their highest coordinate. Everything else
// leaves a residual, which is reported and shrinks as the grid is refined.

#include <string>
#include <vector>

#include "wienerlab/adapted.hpp"

namespace wienerlab {

struct ClarkResult {
  WeaklyAdaptedOperator integrand;
  VField reconstruction;
  double residual_l2 = 0.0;
  unsigned grid = 0;
};

struct RefinementRow {
  unsigned factor = 1;
  double residual = 0.0;
};

struct EnergyComparison {
  double adapted_energy = 0.0;
  double exact_energy = 0.0;
  /// phi - E phi lies in the first chaos.
  bool coincide = false;
  /// The adapted integrand reproduces phi - E phi on this grid.
  bool adapted_represents = false;
};

/// Every monomial has order 1 at its highest coordinate (constants allowed).
bool is_representable(const ChaosPoly& p);

WeaklyAdaptedOperator clark_integrand(const VField& v);
ClarkResult reconstruct(const VField& v);
std::vector<RefinementRow> refine_and_reconstruct(const VField& v,
                                                  const std::vector<unsigned>& factors);

/// Requires delta(K_alt) = v - E v within 1e-10 (PreconditionError
/// otherwise); true iff K_alt equals the adapted integrand within 1e-10.
bool check_uniqueness(const VField& v, const WeaklyAdaptedOperator& alternate);

HField minimal_energy_integrand(const ChaosPoly& phi);
EnergyComparison compare_energies(const ChaosPoly& phi);

std::string clark_result_to_json(const ClarkResult& result);
std::string refinement_to_csv(const std::vector<RefinementRow>& table);

}  // namespace wienerlab
