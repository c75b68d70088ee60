#include "wienerlab/clark_ocone.hpp"

#include <cmath>

#include <json.hpp>

#include "wienerlab/errors.hpp"

namespace wienerlab {

namespace {

constexpr double kMatchTolerance = 1e-10;

ChaosPoly centered(const ChaosPoly& p) {
  return p - ChaosPoly::constant(p.dim(), expectation(p), p.degree_cap());
}

}  // namespace

bool is_representable(const ChaosPoly& p) {
  for (const auto& [index, coeff] : p.terms()) {
    if (index.empty()) continue;
    if (index.order(index.max_coordinate()) != 1) return false;
  }
  return true;
}

WeaklyAdaptedOperator clark_integrand(const VField& v) {
  return project_operator(gradient_vector(v));
}

ClarkResult reconstruct(const VField& v) {
  WeaklyAdaptedOperator integrand = clark_integrand(v);
  const VField div = divergence_op(integrand.op());
  std::vector<ChaosPoly> recon;
  double residual_sq = 0.0;
  for (unsigned a = 0; a < v.target_dim(); ++a) {
    ChaosPoly r = ChaosPoly::constant(v.ambient_dim(), expectation(v[a]),
                                      v[a].degree_cap()) +
                  div[a];
    const ChaosPoly diff = v[a] - r;
    residual_sq += l2_inner(diff, diff);
    recon.push_back(std::move(r));
  }
  return ClarkResult{std::move(integrand), VField(v.ambient_dim(), std::move(recon)),
                     std::sqrt(residual_sq), v.ambient_dim()};
}

std::vector<RefinementRow> refine_and_reconstruct(const VField& v,
                                                  const std::vector<unsigned>& factors) {
  std::vector<RefinementRow> table;
  for (unsigned m : factors) {
    std::vector<ChaosPoly> comps;
    for (const auto& c : v.components()) comps.push_back(refine(c, m));
    const VField fine(v.ambient_dim() * m, std::move(comps));
    table.push_back({m, reconstruct(fine).residual_l2});
  }
  return table;
}

bool check_uniqueness(const VField& v, const WeaklyAdaptedOperator& alternate) {
  const OperatorField& k = alternate.op();
  if (k.target_dim() != v.target_dim() || k.ambient_dim() != v.ambient_dim()) {
    throw DimensionMismatch("check_uniqueness: alternate integrand has the wrong shape");
  }
  const VField div = divergence_op(k);
  for (unsigned a = 0; a < v.target_dim(); ++a) {
    if (l2_norm(centered(v[a]) - div[a]) > kMatchTolerance) {
      throw PreconditionError(
          "check_uniqueness: alternate integrand does not represent v - E v");
    }
  }
  const WeaklyAdaptedOperator clark_op = clark_integrand(v);
  const OperatorField& clark = clark_op.op();
  for (unsigned a = 0; a < k.target_dim(); ++a) {
    for (unsigned i = 0; i < k.ambient_dim(); ++i) {
      if (l2_norm(k(a, i) - clark(a, i)) > kMatchTolerance) return false;
    }
  }
  return true;
}

HField minimal_energy_integrand(const ChaosPoly& phi) {
  return gradient_scalar(ou_inverse(centered(phi)));
}

EnergyComparison compare_energies(const ChaosPoly& phi) {
  const ChaosPoly c = centered(phi);
  const PredictableHField adapted = project_adapted(gradient_scalar(phi));
  const HField exact = minimal_energy_integrand(phi);

  EnergyComparison cmp;
  cmp.adapted_energy = field_energy(adapted.field());
  cmp.exact_energy = field_energy(exact);
  cmp.coincide = true;
  for (const auto& [index, coeff] : c.terms()) {
    if (index.total_degree() != 1) cmp.coincide = false;
  }
  cmp.adapted_represents =
      l2_norm(c - divergence_h(adapted.field())) <= kMatchTolerance;
  return cmp;
}

std::string clark_result_to_json(const ClarkResult& result) {
  nlohmann::ordered_json j;
  j["n"] = result.grid;
  j["d"] = result.reconstruction.target_dim();
  j["residual_l2"] = result.residual_l2;
  j["integrand"] = nlohmann::ordered_json::parse(operator_to_json(result.integrand.op()));
  auto recon = nlohmann::ordered_json::array();
  for (const auto& c : result.reconstruction.components()) recon.push_back(json_text(c));
  j["reconstruction"] = std::move(recon);
  return j.dump(2);
}

std::string refinement_to_csv(const std::vector<RefinementRow>& table) {
  std::string out = "m,residual\n";
  for (const auto& row : table) {
    out += std::to_string(row.factor) + "," + format_number(row.residual) + "\n";
  }
  return out;
}

}  // namespace wienerlab
