#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "elfs/electric.hpp"
#include "elfs/elfs.hpp"
#include "elfs/errors.hpp"
#include "elfs/expander.hpp"
#include "elfs/resistance.hpp"
#include "elfs/verify.hpp"
#include "elfs/walk.hpp"
#include "json.hpp"

using nlohmann::json;
using namespace elfs;

namespace {

// JSON writer with 17 significant digits for every float.
void write_json(const json& j, std::ostream& os, int indent = 0) {
  const std::string pad(indent + 2, ' '), close(indent, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << json(it.key()).dump() << ": ";
        write_json(it.value(), os, indent + 2);
      }
      os << "\n" << close << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << "[";
      bool first = true;
      for (const auto& v : j) {
        if (!first) os << ", ";
        first = false;
        write_json(v, os, indent + 2);
      }
      os << "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        os << "null";
        return;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << buf;
      return;
    }
    default:
      os << j.dump();
  }
}

struct Output {
  std::string path;
  void emit(const json& j) const {
    std::ostringstream os;
    write_json(j, os);
    os << "\n";
    if (path.empty()) {
      std::cout << os.str();
    } else {
      std::ofstream f(path);
      if (!f) throw ValidationError("cannot write " + path);
      f << os.str();
    }
  }
};

Graph load(const std::string& path, int source) {
  Graph g = load_graph_file(path);
  return source >= 0 ? g.with_source(source) : g;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Runs f(i) for i in [0, count) over `threads` workers; results land by index.
template <class F>
void parallel_for(long count, int threads, F&& f) {
  threads = static_cast<int>(std::max<long>(1, std::min<long>(threads, count)));
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (long i = t; i < count; i += threads) f(i, t);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  // Rethrow on the calling thread so the exit-code mapping applies.
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Electric-flow sampling toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_path;
  int threads = 1;
  std::uint64_t seed = 1;
  app.add_option("--out", out_path, "Write JSON here instead of stdout");
  app.add_option("--threads", threads, "Worker threads for seeded runs")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Master seed");
  bool json_flag = true;
  app.add_flag("--json", json_flag, "JSON output (the only format)");

  std::string graph_path;
  int source = -1;

  auto* analyze = app.add_subcommand("analyze", "Electric and walk quantities of a graph");
  analyze->add_option("--graph", graph_path)->required();
  analyze->add_option("--source", source);

  auto* est = app.add_subcommand("estimate-resistance", "Estimate R_s d_s from walk-operator phase estimation");
  double et_bound = 0.0, eps = 0.1, p_hint = 0.0;
  std::string est_method = "known";
  est->add_option("--graph", graph_path)->required();
  est->add_option("--source", source);
  est->add_option("--et-bound", et_bound, "Upper bound on ET_s (default: exact)");
  est->add_option("--eps", eps);
  est->add_option("--p", p_hint, "Constant-factor estimate of R_s d_s (default: solver value)");
  est->add_option("--method", est_method)->check(CLI::IsMember({"known", "search"}));

  auto* prep = app.add_subcommand("prepare-elf", "Prepare the electric flow state");
  std::string prep_method = "exact";
  double pbar = 0.0, eta = 0.0;
  int runs = 1000;
  prep->add_option("--graph", graph_path)->required();
  prep->add_option("--source", source);
  prep->add_option("--method", prep_method)->check(CLI::IsMember({"exact", "fixed-point"}));
  prep->add_option("--eps", eps);
  prep->add_option("--pbar", pbar, "Lower bound on 1/(R_s d_s) (default: exact)");
  prep->add_option("--eta", eta, "Stub parameter (default: ET / (R_s d_s))");
  prep->add_option("--runs", runs)->check(CLI::PositiveNumber);

  auto* sim = app.add_subcommand("simulate-elfs", "Sample the elfs process and report the exact chain");
  long samples = 10000;
  bool coupled = false;
  std::string traces_csv;
  sim->add_option("--graph", graph_path)->required();
  sim->add_option("--source", source);
  sim->add_option("--samples", samples)->check(CLI::PositiveNumber);
  sim->add_flag("--coupled", coupled);
  sim->add_option("--traces-csv", traces_csv, "Write each trace's source sequence as a CSV row");

  auto* exp = app.add_subcommand("expander-report", "Bound checks on random regular graphs");
  int n = 64, d = 3, m = 4, seeds = 10;
  exp->add_option("--n", n);
  exp->add_option("--d", d);
  exp->add_option("--m", m);
  exp->add_option("--seeds", seeds)->check(CLI::PositiveNumber);

  auto* ssl = app.add_subcommand("ssl", "Label a vertex by absorption");
  std::string labels_path, ssl_method = "exact";
  double budget = 1e9;
  ssl->add_option("--graph", graph_path)->required();
  ssl->add_option("--labels", labels_path)->required();
  ssl->add_option("--source", source);
  ssl->add_option("--method", ssl_method)->check(CLI::IsMember({"exact", "walk-mc", "elfs-mc", "quantum-sim"}));
  ssl->add_option("--samples", samples)->check(CLI::PositiveNumber);
  ssl->add_option("--budget", budget);

  auto* verify = app.add_subcommand("verify", "Run the identity suite on the built-in fixtures");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const Output out{out_path};
  json config = {{"seed", seed}, {"threads", threads}};
  int status = 0;
  try {
    if (*analyze) {
      const Graph g = load(graph_path, source);
      config.update({{"command", "analyze"}, {"graph", graph_path}, {"source", g.source()}});
      json j = to_json(walk_quantities(g));
      const ElfsChain c = elfs_chain(g);
      j["EHT"] = c.eht(g.source());
      const ArrivalDistribution h = harmonic_measure(g);
      json arrival = json::object();
      for (std::size_t k = 0; k < h.sinks.size(); ++k) arrival[std::to_string(h.sinks[k])] = h.prob[k];
      j["arrival"] = arrival;
      j["config"] = config;
      out.emit(j);
    } else if (*est) {
      const Graph g = load(graph_path, source);
      const WalkStats ws = walk_quantities(g);
      const double et = et_bound > 0 ? et_bound : ws.escape_time;
      config.update({{"command", "estimate-resistance"}, {"graph", graph_path}, {"source", g.source()},
                     {"et_bound", et}, {"eps", eps}, {"method", est_method}});
      EstimateRecord r;
      if (est_method == "search") {
        r = binary_search_estimate(g, et, seed);
      } else {
        const double p = p_hint > 0 ? p_hint : ws.resistance * g.degree(g.source());
        config["p"] = p;
        r = estimate_known(g, et, p, eps, seed);
      }
      json j = to_json(r);
      j["config"] = config;
      out.emit(j);
    } else if (*prep) {
      const Graph g = load(graph_path, source);
      const WalkStats ws = walk_quantities(g);
      const double rd = ws.resistance * g.degree(g.source());
      config.update({{"command", "prepare-elf"}, {"graph", graph_path}, {"source", g.source()},
                     {"method", prep_method}});
      json j;
      if (prep_method == "fixed-point") {
        const double pb = pbar > 0 ? pbar : 1.0 / rd;
        config.update({{"pbar", pb}, {"eps", eps}});
        j = to_json(fixed_point_prepare(g, pb, eps));
      } else {
        ExactElfOptions o;
        if (eta > 0) o.eta = eta;
        o.aa.runs = runs;
        config.update({{"runs", runs}, {"eta", eta > 0 ? json(eta) : json("default")}});
        const ExactElfResult r = exact_elf_prepare(g, seed, o);
        j = {{"eta", r.eta},       {"alpha", r.alpha},     {"ET_bar", r.et_bar},
             {"W", r.complexity},  {"W_over_sqrt_ET", r.ratio}, {"fidelity", r.fidelity},
             {"amplification", to_json(r.aa)}};
      }
      j["config"] = config;
      out.emit(j);
    } else if (*sim) {
      const Graph g = load(graph_path, source);
      config.update({{"command", "simulate-elfs"}, {"graph", graph_path}, {"source", g.source()},
                     {"samples", samples}, {"coupled", coupled}});
      const ElfsChain chain = elfs_chain(g);
      std::vector<ElfsTrace> traces(samples);
      std::vector<ElfsSampler> samplers;
      for (int t = 0; t < std::max<long>(1, std::min<long>(threads, samples)); ++t) samplers.emplace_back(g);
      ElfsOptions eo;
      eo.coupled = coupled;
      eo.record_walk = false;
      parallel_for(samples, threads, [&](long i, int t) { traces[i] = simulate_elfs(samplers[t], split_seed(seed, i), eo); });

      std::map<int, long> hits;
      double rho_sum = 0.0, tau_sum = 0.0;
      for (const ElfsTrace& tr : traces) {
        ++hits[tr.sources.back()];
        rho_sum += double(tr.rho);
        if (coupled && !tr.nu.empty()) tau_sum += double(tr.nu.back());
      }
      json freq = json::object();
      for (int s : g.sinks()) freq[std::to_string(s)] = double(hits[s]) / double(samples);
      json j = {{"chain", to_json(chain, g)}, {"arrival_frequency", freq}, {"mean_rho", rho_sum / double(samples)}};
      if (coupled) j["mean_tau"] = tau_sum / double(samples);
      if (!traces_csv.empty()) {
        std::ofstream f(traces_csv);
        if (!f) throw ValidationError("cannot write " + traces_csv);
        for (const ElfsTrace& tr : traces) {
          for (std::size_t k = 0; k < tr.sources.size(); ++k) f << (k ? "," : "") << tr.sources[k];
          f << "\n";
        }
      }
      j["config"] = config;
      out.emit(j);
    } else if (*exp) {
      config.update({{"command", "expander-report"}, {"n", n}, {"d", d}, {"m", m}, {"seeds", seeds}});
      std::vector<std::uint64_t> list;
      for (int s = 0; s < seeds; ++s) list.push_back(split_seed(seed, s));
      std::vector<ExpanderReport> parts(list.size());
      parallel_for(static_cast<long>(list.size()), threads,
                   [&](long i, int) { parts[i] = expander_seed_report(n, d, m, list[i]); });
      json j = to_json(combine_reports(parts));
      j["config"] = config;
      out.emit(j);
    } else if (*ssl) {
      const Graph g = load(graph_path, source);
      config.update({{"command", "ssl"}, {"graph", graph_path}, {"labels", labels_path}, {"source", g.source()},
                     {"method", ssl_method}, {"samples", samples}, {"budget", budget}});
      const LabeledGraph lg = make_labeled_graph(g, load_labels(read_file(labels_path)));
      SslOptions o;
      o.method = parse_ssl_method(ssl_method);
      o.samples = samples;
      o.cost_budget = budget;
      o.seed = seed;
      json j = to_json(ssl_label(lg, o));
      j["config"] = config;
      out.emit(j);
    } else if (*verify) {
      config["command"] = "verify";
      json j = to_json(identity_suite());
      j["config"] = config;
      out.emit(j);
      if (!j["all_pass"].get<bool>()) status = 3;
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ToleranceError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 3;
  }
  return status;
}
