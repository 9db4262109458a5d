#pragma once

// Command-line front end. run() is header-only so tests can drive it with
// captured streams; tools/quni.cpp only forwards argv.

#include "quni/decision.hpp"
#include "quni/gateset.hpp"
#include "quni/hilbert.hpp"
#include "quni/invariants.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace quni::cli {

inline constexpr int kExitDecided = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUndecided = 2;

struct SharedFlags {
  std::string method = "auto";
  double tol = kZeroThreshold;
  std::uint64_t seed = 0;
  std::string format = "json";
  std::size_t mem_budget_mb = 4096;
  bool verbose = false;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::MalformedFile, "cannot open '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline DecisionOptions decision_options(const SharedFlags& f, std::ostream& err) {
  DecisionOptions o;
  o.invariants.method = parse_method(f.method);
  o.invariants.zero_tol = f.tol;
  o.invariants.seed = f.seed;
  o.invariants.mem_budget_bytes = f.mem_budget_mb << 20;
  if (f.verbose) {
    o.invariants.log = [&err](const std::string& s) { err << s << '\n'; };
  }
  return o;
}

inline nlohmann::json report_json(const InvariantReport& r) {
  return {{"k", r.k},
          {"value", r.value},
          {"method", std::string(to_string(r.method))},
          {"gap_ratio", r.gap_ratio},
          {"tolerance", r.tolerance},
          {"certain", r.certain},
          {"lower_bound", r.lower_bound},
          {"iterations", r.iterations},
          {"total_dim", r.total_dim},
          {"note", r.note}};
}

inline nlohmann::json verdict_json(const CompletenessVerdict& v) {
  nlohmann::json j{{"status", std::string(to_string(v.status))},
                   {"k", v.k_used},
                   {"measured", v.measured},
                   {"baseline", v.baseline},
                   {"gap_ratio", v.report.gap_ratio},
                   {"report", report_json(v.report)}};
  if (v.finite_order) j["finite_group_order"] = *v.finite_order;
  if (!v.diagnostics.empty()) j["diagnostics"] = v.diagnostics;
  return j;
}

inline nlohmann::json gateset_echo(const std::string& path, const GateSet& set) {
  nlohmann::json names = nlohmann::json::array();
  for (const auto& g : set.gates) names.push_back(g.name());
  return {{"file", path}, {"d", set.d}, {"arity", set.arity}, {"gates", names}};
}

inline void write_text(std::ostream& out, const nlohmann::json& report) {
  for (const char* key : {"command", "status", "k", "measured", "baseline", "gap_ratio", "bound", "value"}) {
    if (report.contains(key)) {
      out << key << ": " << report[key].dump() << '\n';
    }
  }
  if (report.contains("per_N")) {
    for (const auto& e : report["per_N"]) {
      out << "N=" << e["N"] << ": " << e["status"].get<std::string>() << " measured " << e["measured"] << " baseline "
          << e["baseline"] << " gap_ratio " << e["gap_ratio"] << '\n';
    }
  }
  for (const char* key : {"diagnostics", "reason", "values", "regularity", "dimension", "eventual_polynomial", "lhs",
                          "rhs"}) {
    if (report.contains(key)) {
      out << key << ": " << report[key].dump() << '\n';
    }
  }
}

/// Runs one command. Exit codes: 0 decided, 2 Uncertain/Inconclusive,
/// 1 input or resource error.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Decide completeness and universality of quantum gate sets", "quni"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  SharedFlags flags;
  auto add_shared = [&flags](CLI::App* sub) {
    sub->add_option("--method", flags.method, "auto|dense|iterative")
        ->check(CLI::IsMember({"auto", "dense", "iterative"}));
    sub->add_option("--tol", flags.tol, "relative zero threshold for dense spectra");
    sub->add_option("--seed", flags.seed, "random seed");
    sub->add_option("--format", flags.format, "json|text")->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--mem-budget-mb", flags.mem_budget_mb, "memory budget in MiB");
    sub->add_flag("--verbose", flags.verbose, "progress on stderr");
  };

  std::string gate_file;
  int max_N = 0;
  int k = 0;
  int N = 0;
  int m = 0;
  std::string ideal_file;
  int up_to = 0;
  std::string group_file;

  auto* complete = app.add_subcommand("check-complete", "completeness of a gate file");
  complete->add_option("gates", gate_file, "gate file")->required();
  add_shared(complete);

  auto* universal = app.add_subcommand("check-universal", "universality sweep over N");
  universal->add_option("gates", gate_file, "gate file")->required();
  universal->add_option("--max-N", max_N, "largest N to try (default arity+1)");
  add_shared(universal);

  auto* invdim = app.add_subcommand("invariant-dim", "M_2k of a gate file");
  invdim->add_option("gates", gate_file, "gate file")->required();
  invdim->add_option("--k", k, "k in 1..6")->required();
  invdim->add_option("--N", N, "use the universality generators on N qudits");
  add_shared(invdim);

  auto* baseline = app.add_subcommand("gl-baseline", "M_2k of the full unitary group");
  baseline->add_option("--m", m, "dimension")->required();
  baseline->add_option("--k", k, "k")->required();
  add_shared(baseline);

  auto* hilbert = app.add_subcommand("hilbert", "Hilbert function of an ideal file");
  hilbert->add_option("--ideal", ideal_file, "ideal file")->required();
  hilbert->add_option("--up-to", up_to, "largest degree")->required();
  add_shared(hilbert);

  auto* corr = app.add_subcommand("correspondence", "invariants of G⊗I and S_N against h_J(N)");
  corr->add_option("--group", group_file, "gate file holding the group generators on W^{⊗n}")->required();
  corr->add_option("--N", N, "tensor power")->required();
  add_shared(corr);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitDecided : kExitError;
  }

  const auto start = std::chrono::steady_clock::now();
  nlohmann::json report;
  int code = kExitDecided;
  try {
    const DecisionOptions opts = decision_options(flags, err);
    if (complete->parsed()) {
      const GateSet set = parse_gateset(read_file(gate_file));
      const CompletenessVerdict v = check_complete(set, opts);
      report = verdict_json(v);
      report["command"] = "check-complete";
      report["bound"] = universality_bound(set.d, set.arity);
      report["inputs"] = gateset_echo(gate_file, set);
      code = v.status == CompletenessStatus::Uncertain ? kExitUndecided : kExitDecided;
    } else if (universal->parsed()) {
      const GateSet set = parse_gateset(read_file(gate_file));
      const int cap = max_N > 0 ? max_N : set.arity + 1;
      const UniversalityVerdict v = check_universal(set, cap, opts);
      report["command"] = "check-universal";
      report["status"] = std::string(to_string(v.status));
      if (v.status != UniversalityStatus::NotUniversal) report["N"] = v.N;
      if (!v.reason.empty()) report["reason"] = v.reason;
      report["bound"] = v.theoretical_bound;
      report["per_N"] = nlohmann::json::array();
      for (const auto& [n, verdict] : v.per_N) {
        auto e = verdict_json(verdict);
        e["N"] = n;
        report["per_N"].push_back(e);
      }
      if (!v.per_N.empty()) {
        const auto& lastv = v.per_N.back().second;
        report["k"] = lastv.k_used;
        report["measured"] = lastv.measured;
        report["baseline"] = lastv.baseline;
        report["gap_ratio"] = lastv.report.gap_ratio;
      }
      report["inputs"] = gateset_echo(gate_file, set);
      code = v.status == UniversalityStatus::Inconclusive ? kExitUndecided : kExitDecided;
    } else if (invdim->parsed()) {
      const GateSet set = parse_gateset(read_file(gate_file));
      std::vector<UnitaryGate> gates = N > 0 ? universality_generators(set, N) : set.gates;
      const InvariantReport r = m2k(gates, k, opts.invariants);
      const std::uint64_t D = gates.front().dim();
      report = report_json(r);
      report["command"] = "invariant-dim";
      report["status"] = r.certain ? "Certain" : "Uncertain";
      report["measured"] = r.value;
      report["baseline"] = gl_baseline(static_cast<int>(std::min<std::uint64_t>(D, 64)), k);
      report["bound"] = universality_bound(set.d, set.arity);
      report["inputs"] = gateset_echo(gate_file, set);
      code = r.certain ? kExitDecided : kExitUndecided;
    } else if (baseline->parsed()) {
      report["command"] = "gl-baseline";
      report["status"] = "Exact";
      report["m"] = m;
      report["k"] = k;
      report["value"] = gl_baseline(m, k);
    } else if (hilbert->parsed()) {
      const GradedIdeal J = parse_ideal(read_file(ideal_file));
      HilbertTable t = hilbert_table(J, up_to, HilbertOptions{kDefaultDenseLimit, flags.tol});
      report["command"] = "hilbert";
      report["values"] = t.values;
      report["bound"] = regularity_bound(static_cast<std::uint64_t>(J.m), static_cast<std::uint64_t>(std::max(J.n, 1)));
      report["inputs"] = {{"file", ideal_file}, {"m", J.m}, {"n", J.n}, {"generators", J.generators.size()}};
      try {
        t = with_regularity(std::move(t));
        report["status"] = "Stabilized";
        report["regularity"] = *t.regularity;
        report["dimension"] = *t.dimension;
        report["eventual_polynomial"] = t.eventual_polynomial;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::TailNotStabilized) throw;
        report["status"] = "Uncertain";
        report["diagnostics"] = e.what();
        code = kExitUndecided;
      }
    } else if (corr->parsed()) {
      const GateSet set = parse_gateset(read_file(group_file));
      std::vector<Matrix> ops;
      for (const auto& g : set.gates) ops.push_back(g.matrix());
      InvariantOptions inv = opts.invariants;
      const Correspondence c = correspondence_check(ops, set.d, set.arity, N, inv);
      report["command"] = "correspondence";
      report["status"] = c.lhs == c.rhs ? "Equal" : "Different";
      report["lhs"] = c.lhs;
      report["rhs"] = c.rhs;
      report["N"] = N;
      report["inputs"] = gateset_echo(group_file, set);
    }
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return kExitError;
  } catch (const std::bad_alloc&) {
    err << "error: MemoryBudget: allocation failed\n";
    return kExitError;
  }
  report["seed"] = flags.seed;
  report["version"] = std::string(kVersion);
  report["timings"] = {
      {"total_s", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
  if (flags.format == "text") {
    write_text(out, report);
  } else {
    out << report.dump(2) << '\n';
  }
  return code;
}

}  // namespace quni::cli
