// SPDX-License-Identifier: MIT
#include "degenkernel/cli.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "degenkernel/acceptance.hpp"
#include "degenkernel/boundary.hpp"
#include "degenkernel/closed_forms.hpp"
#include "degenkernel/error.hpp"
#include "degenkernel/expr.hpp"
#include "degenkernel/format.hpp"
#include "degenkernel/general_kernel.hpp"
#include "degenkernel/parallel.hpp"
#include "degenkernel/sde_oracle.hpp"
#include "degenkernel/transform.hpp"

namespace degenkernel {

namespace {

using json = nlohmann::ordered_json;

// JSON config: top-level keys are subcommand names holding flag values,
// e.g. {"simulate": {"paths": 1000, "seed": 42}}.
class ConfigJSON : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}\n"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      input >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    return items(j, "", {});
  }

 private:
  static std::vector<CLI::ConfigItem> items(const nlohmann::json& j, const std::string& name,
                                            std::vector<std::string> prefix) {
    std::vector<CLI::ConfigItem> out;
    if (j.is_object()) {
      if (!name.empty()) prefix.push_back(name);
      for (auto it = j.begin(); it != j.end(); ++it) {
        auto sub = items(*it, it.key(), prefix);
        out.insert(out.end(), sub.begin(), sub.end());
      }
      return out;
    }
    if (name.empty()) throw CLI::ConversionError("config file must hold a JSON object");
    CLI::ConfigItem item;
    item.name = name;
    item.parents = prefix;
    if (j.is_boolean()) {
      item.inputs = {j.get<bool>() ? "true" : "false"};
    } else if (j.is_number_integer()) {
      item.inputs = {std::to_string(j.get<long long>())};
    } else if (j.is_number()) {
      item.inputs = {fmt17(j.get<double>())};
    } else if (j.is_string()) {
      item.inputs = {j.get<std::string>()};
    } else {
      throw CLI::ConversionError("unsupported config value for '" + name + "'");
    }
    out.push_back(item);
    return out;
  }
};

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

struct CoeffArgs {
  std::string a;
  std::string b;
  std::string family;
  std::string phi;
  double alpha = kUnset;
  double beta = kUnset;
};

void add_coeff_options(CLI::App* sub, CoeffArgs& c) {
  sub->add_option("--a", c.a, "diffusion coefficient a(x) as an expression in x");
  sub->add_option("--b", c.b, "drift coefficient b(x) as an expression in x (default 0)");
  sub->add_option("--family", c.family, "preset: power or power+drift")->check(CLI::IsMember({"power", "power+drift"}));
  sub->add_option("--alpha", c.alpha, "preset exponent: a = x^alpha");
  sub->add_option("--beta", c.beta, "preset drift exponent: b = x^beta phi(x)");
  sub->add_option("--phi", c.phi, "preset drift shape phi(x) as an expression in x");
}

Coefficients make_coefficients(const CoeffArgs& c) {
  // a bare --alpha with no --a selects the power preset
  if (!c.family.empty() || (c.a.empty() && !std::isnan(c.alpha))) {
    if (!c.a.empty() || !c.b.empty()) throw UsageError("give either --family or --a/--b, not both");
    if (std::isnan(c.alpha)) throw UsageError("--family needs --alpha");
    const bool drift = c.family == "power+drift" || !c.phi.empty() || !std::isnan(c.beta);
    if (!drift) return power_coefficients(c.alpha);
    if (std::isnan(c.beta) || c.phi.empty()) throw UsageError("a drift preset needs --beta and --phi");
    const auto e = expr::parse(c.phi);
    return power_drift_coefficients(c.alpha, c.beta, [e](double x) { return expr::eval(e, x); });
  }
  if (c.a.empty()) throw UsageError("give --a (with optional --b) or --family");
  return expression_coefficients(c.a, c.b.empty() ? "0" : c.b);
}

struct Grid {
  std::vector<double> values;
};

Grid parse_grid(const std::string& spec, const std::string& flag) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string p;
  while (std::getline(ss, p, ':')) parts.push_back(p);
  const bool log = parts.size() == 4 && parts[3] == "log";
  if (parts.size() != 3 && !log) throw UsageError(flag + " expects lo:hi:n or lo:hi:n:log, got '" + spec + "'");
  double lo = 0.0;
  double hi = 0.0;
  long n = 0;
  try {
    std::size_t used = 0;
    lo = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument(parts[0]);
    hi = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
    n = std::stol(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument(parts[2]);
  } catch (const std::exception&) {
    throw UsageError(flag + ": malformed grid '" + spec + "'");
  }
  if (n < 1) throw UsageError(flag + ": point count must be >= 1");
  if (log && !(lo > 0.0 && hi > 0.0)) throw UsageError(flag + ": log grids need positive bounds");
  Grid g;
  for (long i = 0; i < n; ++i) {
    const double f = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    g.values.push_back(log ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f);
  }
  return g;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json verdict_json(const LimitVerdict& v) {
  json j;
  j["status"] = to_string(v.status);
  j["value"] = num(v.value);
  j["last_ratio"] = num(v.last_ratio);
  j["nodes"] = v.nodes;
  j["evidence"] = v.evidence;
  return j;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open '" + path + "' for writing");
  f << text;
}

int report_error(std::ostream& err, const std::string& kind, const std::string& message, int code) {
  json j;
  j["error"]["kind"] = kind;
  j["error"]["message"] = message;
  j["error"]["exit_code"] = code;
  err << j.dump() << "\n";
  return code;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  apply_thread_limit();
  CLI::App app{"Fundamental solutions of degenerate diffusions on the half-line"};
  app.name("degenkernel");
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<ConfigJSON>());
  app.set_config("--config", "", "JSON file mirroring the flags; flags on the command line win");

  // eval
  CoeffArgs eval_c;
  double ex = kUnset, ey = kUnset, et = kUnset;
  int eval_order = -1;
  bool eval_json = false;
  auto* eval = app.add_subcommand("eval", "evaluate the kernel p(x, y, t)");
  add_coeff_options(eval, eval_c);
  eval->add_option("--x", ex, "source point")->required();
  eval->add_option("--y", ey, "target point")->required();
  eval->add_option("--t", et, "time")->required();
  eval->add_option("--order", eval_order, "Duhamel order (default: chosen from t)");
  eval->add_flag("--json", eval_json, "print a JSON record");

  // table
  CoeffArgs table_c;
  std::string xg, yg, tg, table_format = "csv", table_out;
  int table_order = -1;
  auto* table = app.add_subcommand("table", "tabulate p over a grid");
  add_coeff_options(table, table_c);
  table->add_option("--x-grid", xg, "lo:hi:n[:log]")->required();
  table->add_option("--y-grid", yg, "lo:hi:n[:log]")->required();
  table->add_option("--t-grid", tg, "lo:hi:n[:log]")->required();
  table->add_option("--format", table_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  table->add_option("--out", table_out, "output file (default stdout)");
  table->add_option("--order", table_order, "Duhamel order (default: chosen from t)");

  // classify
  CoeffArgs cls_c;
  double x0_cls = 1.0;
  auto* cls = app.add_subcommand("classify", "Feller classification of the boundary 0");
  add_coeff_options(cls, cls_c);
  cls->add_option("--x0", x0_cls, "anchor point of the scale and speed integrals");

  // simulate
  CoeffArgs sim_c;
  double sim_x0 = kUnset, sim_t = kUnset;
  SimConfig sim_cfg;
  std::string hist_out, scheme = "radial";
  auto* sim = app.add_subcommand("simulate", "Monte Carlo simulation of the absorbed diffusion");
  add_coeff_options(sim, sim_c);
  sim->add_option("--x0", sim_x0, "start point")->required();
  sim->add_option("--t", sim_t, "horizon")->required();
  sim->add_option("--paths", sim_cfg.n_paths, "number of paths");
  sim->add_option("--dt", sim_cfg.dt, "time step");
  sim->add_option("--seed", sim_cfg.seed, "RNG seed");
  sim->add_flag("--bridge", sim_cfg.bridge_correction, "Brownian-bridge crossing correction");
  sim->add_option("--bins", sim_cfg.bins, "histogram bins");
  sim->add_option("--hist-max", sim_cfg.hist_hi, "upper histogram edge in x (default from x0 and t)");
  sim->add_option("--absorb-below", sim_cfg.absorb_below, "absorb once the transformed state drops below this");
  sim->add_option("--scheme", scheme, "radial (default) or direct")->check(CLI::IsMember({"radial", "direct"}));
  sim->add_option("--hist-out", hist_out, "write the histogram as CSV");

  // massloss
  double ml_alpha = kUnset, ml_x = kUnset, ml_t = kUnset;
  bool ml_asym = false;
  auto* ml = app.add_subcommand("massloss", "absorbed mass for a = x^alpha");
  ml->add_option("--alpha", ml_alpha, "exponent in (0, 2)")->required();
  ml->add_option("--x", ml_x, "start point")->required();
  ml->add_option("--t", ml_t, "time")->required();
  ml->add_flag("--asymptotic", ml_asym, "also print the leading asymptotic form");

  // selftest
  AcceptanceOptions acc;
  bool acc_json = false, acc_timings = false, acc_list = false;
  auto* st = app.add_subcommand("selftest", "run the acceptance suite");
  st->add_option("--filter", acc.filter, "comma-separated criterion ids or keys");
  st->add_flag("--json", acc_json, "machine-readable report");
  st->add_flag("--timings", acc_timings, "include wall times (output then varies between runs)");
  st->add_flag("--list", acc_list, "list criteria and exit");
  st->add_option("--seed", acc.seed, "seed for randomized checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    return report_error(err, "usage", e.what(), 1);
  }

  try {
    if (*eval) {
      GeneralKernel gk(TransformBundle::build(make_coefficients(eval_c)), eval_order);
      const auto v = gk.p(ex, ey, et);
      if (eval_json) {
        json j;
        j["x"] = ex;
        j["y"] = ey;
        j["t"] = et;
        j["order"] = eval_order >= 0 ? eval_order : gk.order_for(et);
        j["value"] = v.value;
        j["quadrature_estimate"] = v.quadrature_estimate;
        j["truncation_bound"] = v.truncation_bound;
        out << j.dump(2) << "\n";
      } else {
        out << "value " << fmt17(v.value) << "\n"
            << "quadrature_estimate " << fmt17(v.quadrature_estimate) << "\n"
            << "truncation_bound " << fmt17(v.truncation_bound) << "\n";
      }
      return 0;
    }

    if (*table) {
      const auto X = parse_grid(xg, "--x-grid").values;
      const auto Y = parse_grid(yg, "--y-grid").values;
      const auto T = parse_grid(tg, "--t-grid").values;
      GeneralKernel gk(TransformBundle::build(make_coefficients(table_c)), table_order);
      struct Row {
        double x, y, t;
        KernelValue v;
      };
      std::vector<Row> rows;
      for (double x : X) {
        for (double y : Y) {
          for (double t : T) rows.push_back({x, y, t, {}});
        }
      }
      std::vector<std::string> errors(rows.size());
#pragma omp parallel for schedule(dynamic, 1)
      for (long i = 0; i < static_cast<long>(rows.size()); ++i) {
        try {
          rows[i].v = gk.p(rows[i].x, rows[i].y, rows[i].t);
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      }
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!errors[i].empty()) {
          throw DomainError("at (x, y, t) = (" + fmt17(rows[i].x) + ", " + fmt17(rows[i].y) + ", " +
                            fmt17(rows[i].t) + "): " + errors[i]);
        }
      }
      std::string text;
      if (table_format == "csv") {
        text = csv_line({"x", "y", "t", "p", "quad_err", "trunc_err"});
        for (const auto& r : rows) {
          text += csv_line({fmt17(r.x), fmt17(r.y), fmt17(r.t), fmt17(r.v.value), fmt17(r.v.quadrature_estimate),
                            fmt17(r.v.truncation_bound)});
        }
      } else {
        json arr = json::array();
        for (const auto& r : rows) {
          json j;
          j["x"] = r.x;
          j["y"] = r.y;
          j["t"] = r.t;
          j["p"] = num(r.v.value);
          j["quad_err"] = num(r.v.quadrature_estimate);
          j["trunc_err"] = num(r.v.truncation_bound);
          arr.push_back(j);
        }
        text = arr.dump(2) + "\n";
      }
      write_text(table_out, text, out);
      return 0;
    }

    if (*cls) {
      const auto rep = classify(make_coefficients(cls_c), x0_cls);
      json j;
      j["boundary_type"] = rep.boundary_type;
      j["x0"] = rep.x0;
      j["S0"] = verdict_json(rep.S0);
      j["M0"] = verdict_json(rep.M0);
      j["Sigma"] = verdict_json(rep.Sigma);
      j["N"] = verdict_json(rep.N);
      j["note"] = rep.note;
      out << j.dump(2) << "\n";
      return 0;
    }

    if (*sim) {
      if (sim_cfg.n_paths < 1) throw UsageError("--paths must be at least 1");
      if (!(sim_cfg.dt > 0.0)) throw UsageError("--dt must be positive");
      if (sim_cfg.bins < 1) throw UsageError("--bins must be at least 1");
      sim_cfg.scheme = scheme == "direct" ? Scheme::direct : Scheme::radial;
      const auto bundle = TransformBundle::build(make_coefficients(sim_c));
      const auto res = simulate_general(bundle, sim_x0, sim_t, sim_cfg);
      double mean_hit = 0.0;
      for (double h : res.hitting_times) mean_hit += h;
      json j;
      j["x0"] = sim_x0;
      j["t"] = sim_t;
      j["paths"] = res.n_paths;
      j["dt"] = sim_cfg.dt;
      j["seed"] = sim_cfg.seed;
      j["bridge"] = sim_cfg.bridge_correction;
      j["scheme"] = scheme;
      j["survival"] = res.survival;
      j["survival_se"] = res.survival_se;
      j["n_survived"] = res.n_survived;
      j["n_absorbed"] = res.n_absorbed;
      j["beyond_histogram"] = res.beyond_histogram;
      j["mean_hitting_time"] = res.hitting_times.empty() ? json(nullptr) : json(mean_hit / res.hitting_times.size());
      out << j.dump(2) << "\n";
      if (!hist_out.empty()) {
        const auto& h = res.histogram;
        std::string text = csv_line({"lo", "hi", "mass", "se"});
        for (std::size_t b = 0; b < h.mass.size(); ++b) {
          text += csv_line({fmt17(h.edges[b]), fmt17(h.edges[b + 1]), fmt17(h.mass[b]), fmt17(h.se[b])});
        }
        write_text(hist_out, text, out);
      }
      return 0;
    }

    if (*ml) {
      const double m = mass_loss(ml_alpha, ml_x, ml_t);
      out << "mass_loss " << fmt17(m) << "\n"
          << "exponent_ratio " << fmt17(mass_loss_exponent_ratio(ml_alpha, ml_x, ml_t)) << "\n";
      if (ml_asym) {
        const double la = log_mass_loss_asymptotic(ml_alpha, ml_x, ml_t);
        out << "asymptotic " << fmt17(std::exp(la)) << "\n"
            << "asymptotic_over_exact " << fmt17(std::exp(la - log_mass_loss(ml_alpha, ml_x, ml_t))) << "\n";
      }
      return 0;
    }

    if (*st) {
      if (acc_list) {
        for (const auto& c : acceptance_criteria()) out << c.id << " " << c.key << ": " << c.title << "\n";
        return 0;
      }
      bool any = false;
      for (const auto& c : acceptance_criteria()) any = any || criterion_selected(c, acc.filter);
      if (!any) throw UsageError("--filter '" + acc.filter + "' selects no criteria");
      const auto results = run_acceptance(acc);
      out << (acc_json ? acceptance_json(results, acc_timings) : acceptance_text(results, acc_timings));
      for (const auto& r : results) {
        if (!r.pass) return 3;
      }
      return 0;
    }
  } catch (const UsageError& e) {
    return report_error(err, "usage", e.what(), 1);
  } catch (const DomainError& e) {
    return report_error(err, "domain", e.what(), 2);
  } catch (const ConvergenceError& e) {
    return report_error(err, "convergence", e.what(), 3);
  } catch (const std::exception& e) {
    return report_error(err, "internal", e.what(), 3);
  }
  return 0;
}

}  // namespace degenkernel
