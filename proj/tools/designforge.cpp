// designforge: seed-expanded approximate k-designs over SO/SU/O/U plus the
// numeric verification suite.  See README.md for the subcommand reference.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "designforge/design.hpp"
#include "designforge/expanders.hpp"
#include "designforge/verify.hpp"
#include "designforge/walks.hpp"

namespace {

using namespace designforge;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw std::runtime_error("cannot open output path: " + out_path);
  f << text << "\n";
}

double default_mu_target(std::uint32_t degree) {
  // Achievable for the seeded permutation-sum model: the random-regular
  // second eigenvalue concentrates near 2/sqrt(d).
  return std::min(0.95, 2.0 / std::sqrt(static_cast<double>(degree)) + 0.2);
}

Cascade make_desk_cascade(std::uint64_t c, int stages, std::vector<std::uint32_t> degrees,
                          std::vector<double> mus, std::uint64_t graph_seed) {
  if (degrees.empty()) degrees.assign(static_cast<std::size_t>(stages), 16);
  if (degrees.size() == 1 && stages > 1)
    degrees.assign(static_cast<std::size_t>(stages), degrees[0]);
  if (static_cast<int>(degrees.size()) != stages)
    throw PreconditionError("need one --degree per stage (or one for all)");
  if (mus.empty())
    for (auto d : degrees) mus.push_back(default_mu_target(d));
  if (mus.size() == 1 && stages > 1) mus.assign(static_cast<std::size_t>(stages), mus[0]);
  if (mus.size() != degrees.size())
    throw PreconditionError("need one --mu-target per stage (or one for all)");
  return truncated_cascade(c, degrees, mus, graph_seed);
}

struct VerifyArgs {
  std::string check = "all";
  std::string group = "SO";
  int D = 64;
  int k = 2;
  int m = 4;
  int n = 3;
  int instances = 50;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
};

std::vector<CheckReport> run_checks(const VerifyArgs& a) {
  std::vector<CheckReport> reports;
  const GroupTag grp = parse_group(a.group);
  if (a.check == "kappa" || a.check == "all")
    reports.push_back(check_kappa_gram(a.D, a.k));
  if (a.check == "reptheory" || a.check == "all")
    reports.push_back(check_reptheory_coeffs(grp, a.m, a.trials, a.seed));
  if (a.check == "trace" || a.check == "all")
    reports.push_back(check_trace_lemma(grp, a.m, a.trials, a.seed));
  if (a.check == "projs" || a.check == "all")
    reports.push_back(check_projector_lemma(a.instances, a.seed));
  if (a.check == "tau" || a.check == "all")
    reports.push_back(check_tau_bounds(grp, a.m, std::min(a.k, 2)));
  if (a.check == "permgap" || a.check == "all")
    reports.push_back(check_perm_gap(a.n, std::min(a.k, 2)));
  if (reports.empty()) throw PreconditionError("unknown check: " + a.check);
  return reports;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"designforge: explicit approximate k-designs and their verifier"};
  app.set_config("--config", "", "key=value config file; flags override");

  std::string out_path;
  std::string format = "json";
  bool timings = false;
  int workers = 1;
  app.add_option("--out", out_path, "write output to this path instead of stdout");
  app.add_option("--format", format, "json or table")->check(CLI::IsMember({"json", "table"}));
  app.add_flag("--timings", timings, "include runtime fields in JSON output");
  app.add_option("--workers", workers,
                 "worker count (default 1; kept at 1 for byte-reproducibility)");

  std::string group = "SO";
  int n = 4, k = 1, stages = 2, k_eval = -1;
  double eps = 0.0625, delta = 0.0;
  std::uint64_t seed_value = 0, graph_seed = 0;
  std::vector<std::uint32_t> degrees;
  std::vector<double> mu_targets;

  auto add_design_opts = [&](CLI::App* cmd, bool with_stages) {
    cmd->add_option("--group", group, "SO, SU, O or U");
    cmd->add_option("--n", n, "qubit count (>= 4)");
    cmd->add_option("--k", k, "tensor power");
    cmd->add_option("--eps", eps, "design accuracy target");
    cmd->add_option("--delta", delta, "base gap parameter (0 = default 1/(n k^3))");
    if (with_stages) {
      cmd->add_option("--stages", stages, "cascade depth (desk-scale, materialized)");
      cmd->add_option("--degree", degrees, "per-stage expander degree(s)");
      cmd->add_option("--mu-target", mu_targets, "per-stage certified-mu target(s)");
      cmd->add_option("--graph-seed", graph_seed, "seed base for the expander supply");
    }
  };

  auto* cmd_sample = app.add_subcommand("sample", "expand a seed into a circuit (JSON)");
  add_design_opts(cmd_sample, true);
  cmd_sample->add_option("--seed", seed_value, "design seed value");

  auto* cmd_build = app.add_subcommand("build", "emit a cascade manifest");
  add_design_opts(cmd_build, true);
  bool full_params = false;
  cmd_build->add_flag("--full", full_params,
                      "paper-scale schedule (exact accounting, nothing materialized)");

  auto* cmd_enum = app.add_subcommand("enumerate", "exhaustive design-error report");
  add_design_opts(cmd_enum, true);
  cmd_enum->add_option("--k-eval", k_eval, "moment order to evaluate (default k)");

  VerifyArgs va;
  auto* cmd_verify = app.add_subcommand("verify", "run named numeric checks");
  cmd_verify->add_option("--check", va.check,
                         "kappa, reptheory, trace, projs, tau, permgap or all");
  cmd_verify->add_option("--group", va.group, "SO or SU");
  cmd_verify->add_option("--D", va.D, "local dimension for kappa");
  cmd_verify->add_option("--k", va.k, "tensor power");
  cmd_verify->add_option("--m", va.m, "qubit count for reptheory/trace/tau");
  cmd_verify->add_option("--n", va.n, "bit count for permgap");
  cmd_verify->add_option("--instances", va.instances, "random instances for projs");
  cmd_verify->add_option("--trials", va.trials, "Monte-Carlo sample count");
  cmd_verify->add_option("--seed", va.seed, "Monte-Carlo seed");

  std::string manifest_path;
  std::uint64_t cert_n = 512;
  std::uint32_t cert_d = 32;
  double cert_mu = 0.45;
  auto* cmd_cert = app.add_subcommand("expander-cert", "certify an expander manifest");
  cmd_cert->add_option("--manifest", manifest_path, "graph manifest JSON to re-certify");
  cmd_cert->add_option("--n", cert_n, "vertex count");
  cmd_cert->add_option("--d", cert_d, "degree");
  cmd_cert->add_option("--mu-target", cert_mu, "target two-sided expansion");
  cmd_cert->add_option("--graph-seed", graph_seed, "seed base");

  auto* cmd_permgap = app.add_subcommand("perm-gap", "simple-3-bit permutation gap");
  cmd_permgap->add_option("--n", va.n, "bit count");
  cmd_permgap->add_option("--k", va.k, "tuple order");

  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (k_eval < 0) k_eval = k;
    const double delta_used =
        delta > 0.0 ? delta : 1.0 / (static_cast<double>(n) * std::pow(double(k), 3));

    if (cmd_sample->parsed()) {
      const GroupTag g = parse_group(group);
      Cascade cas =
          make_desk_cascade(design_alphabet_size(g, n), stages, degrees, mu_targets, graph_seed);
      DesignSpec spec = build_design(g, n, k, eps, delta_used, std::move(cas));
      const Circuit c = sample_circuit(spec, Seed{seed_value, spec.seed_bits()});
      emit(circuit_to_json(c).dump(), out_path);
      return 0;
    }

    if (cmd_build->parsed()) {
      const GroupTag g = parse_group(group);
      if (full_params) {
        const DesignAccounting acc =
            design_accounting(g, n, k, eps, delta > 0.0 ? std::optional<double>(delta)
                                                        : std::nullopt);
        nlohmann::ordered_json j = cascade_params_manifest(acc.params);
        j["seed_bits"] = acc.seed_bits;
        j["delta_used"] = acc.delta_used;
        emit(j.dump(), out_path);
      } else {
        Cascade cas = make_desk_cascade(design_alphabet_size(g, n), stages, degrees,
                                        mu_targets, graph_seed);
        emit(cascade_manifest(cas).dump(), out_path);
      }
      return 0;
    }

    if (cmd_enum->parsed()) {
      const GroupTag g = parse_group(group);
      Cascade cas =
          make_desk_cascade(design_alphabet_size(g, n), stages, degrees, mu_targets, graph_seed);
      DesignSpec spec = build_design(g, n, k, eps, delta_used, std::move(cas));
      const DesignReport rep = enumerate_design_moment(spec, k_eval);
      emit(design_report_json(rep).dump(), out_path);
      return rep.design_error_op <= rep.f_bound + 1e-9 ? 0 : 1;
    }

    if (cmd_verify->parsed()) {
      const auto reports = run_checks(va);
      bool all_pass = true;
      std::string text;
      for (const auto& r : reports) {
        all_pass = all_pass && r.pass;
        if (format == "table")
          text += check_report_line(r) + "\n";
        else
          text += r.to_json(timings).dump() + "\n";
      }
      if (!text.empty()) text.pop_back();
      emit(text, out_path);
      return all_pass ? 0 : 1;
    }

    if (cmd_cert->parsed()) {
      RegularGraph g;
      if (!manifest_path.empty()) {
        std::ifstream f(manifest_path);
        if (!f) throw std::runtime_error("cannot read manifest: " + manifest_path);
        nlohmann::json j;
        f >> j;
        g = graph_from_manifest(j);
      } else {
        g = build_expander(cert_n, cert_d, cert_mu, graph_seed);
      }
      emit(graph_manifest(g).dump(), out_path);
      return 0;
    }

    if (cmd_permgap->parsed()) {
      const CheckReport r = check_perm_gap(va.n, va.k);
      emit(format == "table" ? check_report_line(r) : r.to_json(timings).dump(), out_path);
      return r.pass ? 0 : 1;
    }
  } catch (const CLI::Error& e) {
    std::cerr << R"({"error":"usage","message":")" << e.what() << "\"}\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << R"({"error":"runtime","message":")" << e.what() << "\"}\n";
    return 2;
  }
  return 2;
}
