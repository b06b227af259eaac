#include "elfs/verify.hpp"

#include <cmath>
#include <functional>

#include "elfs/electric.hpp"
#include "elfs/elfs.hpp"
#include "elfs/errors.hpp"
#include "elfs/span_program.hpp"
#include "elfs/transducer.hpp"
#include "elfs/walk.hpp"

namespace elfs {

namespace {

struct Named {
  std::string name;
  Graph graph;
};

std::vector<Named> fixture_list() {
  return {{"fixA", fixtures::single_edge()},
          {"fixB", fixtures::path3()},
          {"fixC", fixtures::lower_bound(0.1)},
          {"fixD", fixtures::path4_middle()},
          {"fixE", fixtures::cycle6()}};
}

// Deviation-style check; a thrown tolerance error counts as a failure with infinite deviation.
void add(std::vector<IdentityCheck>& out, const std::string& name, double tol,
         const std::function<double()>& deviation) {
  IdentityCheck c{name, 0.0, tol, false};
  try {
    c.value = deviation();
    c.pass = std::isfinite(c.value) && c.value <= tol;
  } catch (const ToleranceError&) {
    c.value = INFINITY;
  } catch (const BudgetError&) {
    c.value = INFINITY;
  }
  out.push_back(c);
}

}  // namespace

std::vector<IdentityCheck> identity_suite() {
  std::vector<IdentityCheck> out;
  for (const Named& f : fixture_list()) {
    const Graph& g = f.graph;
    const ElectricSolution sol = solve_electric(g);
    const WalkStats ws = walk_quantities(g);
    const double rd = sol.resistance * g.degree(g.source());

    add(out, f.name + "/flow_demand", 1e-10, [&] { return demand_residual(g, sol.flow); });
    add(out, f.name + "/energy_equals_resistance", 1e-10,
        [&] { return std::abs(energy(g, sol) - sol.resistance); });
    add(out, f.name + "/catalyst_identity", 1e-9, [&] {
      const ElfsReflection r = elfs_reflection_certificate(g);
      return std::max({r.certificate.residual, r.output_residual,
                       std::abs(r.certificate.complexity - (ws.escape_time / rd - 1.0))});
    });
    add(out, f.name + "/stub_resistance", 1e-10, [&] {
      const EscapeIdentity e = modified_escape_identity(attach_source_stub(g, 2.0));
      return std::abs(e.resistance_times_degree - e.one_plus_eta_rd);
    });
    add(out, f.name + "/stub_escape_decomposition", 1e-8, [&] {
      const EscapeIdentity e = modified_escape_identity(attach_source_stub(g, 2.0));
      return std::abs(e.escape_time - e.decomposition);
    });
    const ElfsChain chain = elfs_chain(g);
    add(out, f.name + "/elfs_arrival_is_harmonic", 1e-8, [&] {
      const ArrivalDistribution h = harmonic_measure(g);
      double gap = 0.0;
      for (std::size_t j = 0; j < h.sinks.size(); ++j) {
        gap = std::max(gap, std::abs(chain.arrival(g.source(), j) - h.prob[j]));
      }
      return gap;
    });
    add(out, f.name + "/expected_escape_sum", 1e-8, [&] {
      double sum = 0.0;
      for (int y = 0; y < g.num_vertices(); ++y) sum += chain.visits(g.source(), y) * chain.escape_time(y);
      return std::abs(sum - 2.0 * ws.hitting_time) / std::max(1.0, ws.hitting_time);
    });
  }

  for (const Named& f : {fixture_list()[0], fixture_list()[1]}) {
    const double rd = solve_electric(f.graph).resistance * f.graph.degree(f.graph.source());
    add(out, f.name + "/fixed_point_overlap", 1e-4,
        [&] { return 1.0 - fixed_point_prepare(f.graph, 1.0 / rd, 1e-4).overlap; });
    add(out, f.name + "/exact_preparation_fidelity", 1e-9, [&] {
      ExactElfOptions o;
      o.aa.runs = 50;
      const ExactElfResult r = exact_elf_prepare(f.graph, 1, o);
      return std::max(1.0 - r.fidelity, 1.0 - r.aa.las_vegas.min_fidelity);
    });
  }

  const std::vector<std::pair<std::string, SpanProgram>> programs = {{"or2", span_fixtures::or2()},
                                                                     {"two_target", span_fixtures::two_target()}};
  for (const auto& [name, p] : programs) {
    const std::vector<int> x = {1, 0};
    add(out, "span/" + name + "/pseudoinverse_form", 1e-8, [&] { return pseudoinverse_identity(p, x).gap; });
    add(out, "span/" + name + "/positive_overlap", 1e-9, [&] { return positive_witness(p, x).identity_gap; });
    add(out, "span/" + name + "/catalyst_complexity", 1e-8, [&] {
      const ProjectorInstance inst = to_projector_instance(p, x);
      return std::abs(inst.generic_complexity - (inst.negative_size - 1.0));
    });
  }
  return out;
}

nlohmann::json to_json(const std::vector<IdentityCheck>& checks) {
  nlohmann::json arr = nlohmann::json::array();
  bool all = true;
  for (const IdentityCheck& c : checks) {
    arr.push_back({{"name", c.name}, {"deviation", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}});
    all = all && c.pass;
  }
  return {{"checks", arr}, {"all_pass", all}};
}

}  // namespace elfs
