// Command-line front end: simulate, calibrate, fit, disptest, monitor, table, sample.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 convergence or
// calibration failure.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "zinbspc/arl_table.hpp"
#include "zinbspc/calibrate.hpp"
#include "zinbspc/error.hpp"
#include "zinbspc/inference.hpp"
#include "zinbspc/io.hpp"
#include "zinbspc/monitor.hpp"
#include "zinbspc/runlength.hpp"
#include "zinbspc/svg.hpp"

using namespace zinbspc;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kConvergence = 3 };

/// Domain problems discovered in user data rather than in flags.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParamOpts {
  double k = 1.0;
  double p = 0.4;
  double theta = 0.85;
  ZinbParams params() const { return {k, p, theta}; }
};

void add_params(CLI::App* cmd, ParamOpts& o) {
  cmd->add_option("--k", o.k, "In-control size k")->capture_default_str();
  cmd->add_option("--p", o.p, "In-control probability p")->capture_default_str();
  cmd->add_option("--theta", o.theta, "In-control zero inflation")->capture_default_str();
}

const std::map<std::string, PlateauPolicy> kPolicies{
    {"nearest", PlateauPolicy::Nearest}, {"below", PlateauPolicy::Below}, {"above", PlateauPolicy::Above}};

const std::map<std::string, PConvention> kConventions{{"adjusted", PConvention::InflationAdjusted},
                                                      {"component", PConvention::Component}};

std::ostream& fixed4(std::ostream& out) { return out << std::fixed << std::setprecision(4); }

template <class F>
auto on_data(F&& body) {
  try {
    return body();
  } catch (const DomainError& e) {
    throw DataError(e.what());
  }
}

void print_fit(std::ostream& out, const FitResult& f) {
  out << family_name(f.model.family) << ',' << f.model.mu << ',' << f.mean_ci.first << ','
      << f.mean_ci.second << ',';
  if (f.model.has_size()) {
    out << f.model.k;
  }
  out << ',';
  if (f.model.has_inflation()) out << f.model.theta;
  out << ',';
  if (f.p_hat) out << *f.p_hat;
  out << ',' << f.loglik << ',' << f.bic << ',' << (f.converged ? "yes" : "no") << '\n';
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

std::optional<Family> family_option(const std::string& name) {
  if (name == "all") return std::nullopt;
  const auto f = parse_family(name);
  if (!f) throw CLI::ValidationError("--family", "expected all, poisson, nb, zip or zinb");
  return f;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ZINB EWMA and Shewhart control charts"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = all cores)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo ARL/SDRL of one chart");
  ParamOpts sim_p;
  add_params(sim, sim_p);
  double sim_lambda = 0.1, sim_L = 3.0;
  int sim_n = 1;
  std::int64_t sim_reps = 10'000, sim_max_rl = 1'000'000;
  std::uint64_t sim_seed = 20240101;
  std::optional<double> shift_p, shift_theta, shift_k;
  std::string sim_out;
  sim->add_option("--lambda", sim_lambda)->capture_default_str();
  sim->add_option("--L", sim_L)->capture_default_str();
  sim->add_option("--n", sim_n, "Subgroup size")->capture_default_str();
  sim->add_option("--reps", sim_reps)->capture_default_str();
  sim->add_option("--max-rl", sim_max_rl, "Censoring point of each run")->capture_default_str();
  sim->add_option("--seed", sim_seed)->capture_default_str();
  sim->add_option("--shift-p", shift_p, "Out-of-control p");
  sim->add_option("--shift-theta", shift_theta, "Out-of-control theta");
  sim->add_option("--shift-k", shift_k, "Out-of-control k");
  sim->add_option("--out", sim_out, "CSV output (default stdout)");

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "Find L for a target in-control ARL");
  ParamOpts cal_p;
  add_params(cal, cal_p);
  CalibrationSpec cal_spec;
  std::string cal_policy = "nearest";
  bool cal_mc = false;
  cal->add_option("--lambda", cal_spec.lambda)->capture_default_str();
  cal->add_option("--n", cal_spec.n)->capture_default_str();
  cal->add_option("--target-arl0", cal_spec.target_arl0)->capture_default_str();
  cal->add_option("--tol", cal_spec.tol_arl, "ARL tolerance (0 = max(0.5, 1% of target))")->capture_default_str();
  cal->add_option("--reps", cal_spec.reps)->capture_default_str();
  cal->add_option("--seed", cal_spec.master_seed)->capture_default_str();
  cal->add_option("--l-lo", cal_spec.l_lo)->capture_default_str();
  cal->add_option("--l-hi", cal_spec.l_hi)->capture_default_str();
  cal->add_option("--plateau", cal_policy, "nearest, below or above")
      ->check(CLI::IsMember({"nearest", "below", "above"}))
      ->capture_default_str();
  cal->add_flag("--monte-carlo", cal_mc, "Use simulation even for lambda = 1");

  // fit
  auto* fitc = app.add_subcommand("fit", "Fit count models and rank by BIC");
  std::string fit_data, fit_column, fit_family = "all";
  fitc->add_option("--data", fit_data)->required();
  fitc->add_option("--column", fit_column, "Header name or 1-based index");
  fitc->add_option("--family", fit_family)
      ->check(CLI::IsMember({"all", "poisson", "nb", "zip", "zinb"}, CLI::ignore_case))
      ->capture_default_str();

  // disptest
  auto* disp = app.add_subcommand("disptest", "Overdispersion tests");
  std::string disp_data, disp_column;
  disp->add_option("--data", disp_data)->required();
  disp->add_option("--column", disp_column);

  // monitor
  auto* mon = app.add_subcommand("monitor", "Phase I fit and Phase II monitoring");
  std::string mon_data, mon_column, mon_plot, mon_points, mon_family = "all", mon_conv = "adjusted";
  MonitorOptions mon_opt;
  std::optional<double> mon_L;
  std::string mon_policy = "nearest";
  mon->add_option("--data", mon_data)->required();
  mon->add_option("--column", mon_column);
  mon->add_option("--phase1-end", mon_opt.phase1_end, "Last Phase I observation (1-based)")->required();
  mon->add_option("--lambda", mon_opt.lambda)->capture_default_str();
  auto* mon_L_opt = mon->add_option("--L", mon_L, "Fixed limit width");
  mon->add_option("--target-arl0", mon_opt.target_arl0)->excludes(mon_L_opt)->capture_default_str();
  mon->add_option("--family", mon_family)
      ->check(CLI::IsMember({"all", "poisson", "nb", "zip", "zinb"}, CLI::ignore_case))
      ->capture_default_str();
  mon->add_option("--p-convention", mon_conv, "adjusted or component")
      ->check(CLI::IsMember({"adjusted", "component"}))
      ->capture_default_str();
  mon->add_option("--plateau", mon_policy)->check(CLI::IsMember({"nearest", "below", "above"}));
  mon->add_flag("--reset", mon_opt.reset_at_phase2, "Restart the EWMA at Phase II");
  mon->add_option("--reps", mon_opt.calibration_reps)->capture_default_str();
  mon->add_option("--seed", mon_opt.master_seed)->capture_default_str();
  mon->add_option("--plot", mon_plot, "SVG chart output");
  mon->add_option("--points", mon_points, "CSV of index,ybar,z,signal");

  // table
  auto* tab = app.add_subcommand("table", "ARL table over a grid file");
  std::string tab_grid, tab_out, tab_plot;
  TableOptions tab_opt;
  tab->add_option("--grid", tab_grid)->required();
  tab->add_option("--out", tab_out, "CSV output (default stdout)");
  tab->add_option("--plot", tab_plot, "SVG of ARL curves");
  tab->add_option("--reps", tab_opt.reps)->capture_default_str();
  tab->add_option("--max-rl", tab_opt.max_rl)->capture_default_str();
  tab->add_option("--seed", tab_opt.master_seed)->capture_default_str();

  // sample
  auto* smp = app.add_subcommand("sample", "Draw ZINB counts");
  ParamOpts smp_p;
  add_params(smp, smp_p);
  std::int64_t smp_count = 100;
  std::uint64_t smp_seed = 20240101;
  smp->add_option("--count", smp_count)->capture_default_str();
  smp->add_option("--seed", smp_seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*sim) {
      SimulationJob job;
      job.chart = {sim_lambda, sim_L, sim_n, sim_p.params()};
      job.truth = {shift_k.value_or(sim_p.k), shift_p.value_or(sim_p.p), shift_theta.value_or(sim_p.theta)};
      job.reps = sim_reps;
      job.max_rl = sim_max_rl;
      job.master_seed = sim_seed;
      job.threads = threads;
      job.validate();
      const ControlLimits limits = compute_limits(job.chart);
      const RunLengthSummary s = estimate_arl(job);
      const std::vector<ArlTableRow> rows{{sim_lambda, sim_L, limits.ucl, job.truth.p, job.truth.theta,
                                           job.truth.k, s.arl, s.sdrl, s.se_arl}};
      if (sim_out.empty()) {
        write_arl_table(std::cout, rows);
      } else {
        std::ofstream out(sim_out, std::ios::binary);
        write_arl_table(out, rows);
      }
      if (s.censored > 0) std::cerr << "warning: " << s.censored << " runs censored at " << s.max_rl << '\n';
    } else if (*cal) {
      cal_spec.params = cal_p.params();
      cal_spec.threads = threads;
      cal_spec.plateau_policy = kPolicies.at(cal_policy);
      cal_spec.validate();
      const bool exact = cal_spec.lambda == 1.0 && !cal_mc;
      const CalibrationResult r = exact ? calibrate_shewhart_exact(cal_spec) : calibrate_L(cal_spec);
      fixed4(std::cout) << "method," << (exact ? "exact" : "monte-carlo") << '\n'
                        << "L," << r.l_star << '\n'
                        << "ucl," << r.ucl << '\n'
                        << "arl0," << r.achieved_arl << '\n'
                        << "sdrl0," << r.achieved_sdrl << '\n'
                        << "evaluations," << r.evaluations << '\n'
                        << "converged," << (r.converged ? "yes" : "no") << '\n';
      if (r.plateau) {
        std::cout << "plateau_arl_below," << r.plateau->arl_below << '\n'
                  << "plateau_arl_above," << r.plateau->arl_above << '\n'
                  << "plateau_L_below," << r.plateau->l_below << '\n'
                  << "plateau_L_above," << r.plateau->l_above << '\n';
        std::cerr << "warning: target ARL0 " << cal_spec.target_arl0
                  << " is not attainable; nearest steps are reported\n";
      }
    } else if (*fitc) {
      const auto data = ingest_counts(fit_data, fit_column);
      const auto family = family_option(fit_family);
      std::vector<FitResult> fits;
      std::vector<std::string> notes;
      on_data([&] {
        if (family) {
          fits.push_back(fit(*family, data));
        } else {
          auto sel = select_model(data);
          fits = std::move(sel.ranked);
          notes = std::move(sel.notes);
        }
        return 0;
      });
      fixed4(std::cout) << "family,mean,ci_low,ci_high,k,theta,p_hat,loglik,bic,converged\n";
      for (const auto& f : fits) {
        print_fit(std::cout, f);
        print_warnings(f.warnings);
      }
      print_warnings(notes);
    } else if (*disp) {
      const auto data = ingest_counts(disp_data, disp_column);
      const DispersionReport r = on_data([&] { return dispersion_report(data); });
      fixed4(std::cout) << "naive_mean," << r.naive.mean << '\n'
                        << "naive_variance," << r.naive.variance << '\n'
                        << "naive_cv," << r.naive.cv.value_or(std::nan("")) << '\n'
                        << "aux_c_hat," << r.auxiliary.c_hat << '\n'
                        << "aux_t," << r.auxiliary.t_stat << '\n'
                        << std::scientific << std::setprecision(4)
                        << "aux_p_two_sided," << r.auxiliary.p_value << '\n'
                        << "aux_p_greater," << r.auxiliary.p_value_greater << '\n'
                        << std::fixed << "lr_stat," << r.lr.lr_stat << '\n'
                        << std::scientific << "lr_p," << r.lr.p_value << '\n'
                        << std::fixed << "nb_k," << r.lr.size_k << '\n'
                        << "nb_alpha," << r.lr.alpha << '\n';
    } else if (*mon) {
      const auto data = ingest_counts(mon_data, mon_column);
      mon_opt.L = mon_L;
      mon_opt.family = family_option(mon_family);
      mon_opt.convention = kConventions.at(mon_conv);
      mon_opt.plateau_policy = kPolicies.at(mon_policy);
      mon_opt.threads = threads;
      const MonitoringRun run = on_data([&] { return monitor(data, mon_opt); });
      print_warnings(run.warnings);
      fixed4(std::cout) << "family," << family_name(run.fit.model.family) << '\n'
                        << "k," << run.config.params.k << '\n'
                        << "p," << run.config.params.p << '\n'
                        << "theta," << run.config.params.theta << '\n'
                        << "lambda," << run.config.lambda << '\n'
                        << "L," << run.config.L << '\n'
                        << "ucl," << run.limits.ucl << '\n'
                        << "cl," << run.limits.cl << '\n';
      const auto join = [](const std::vector<std::size_t>& v) {
        std::ostringstream s;
        for (std::size_t i = 0; i < v.size(); ++i) s << (i ? " " : "") << v[i];
        return s.str();
      };
      std::cout << "phase1_signals," << join(run.phase1_signals) << '\n'
                << "ooc," << join(run.ooc_indices) << '\n';
      if (!mon_points.empty()) {
        std::ofstream out(mon_points, std::ios::binary);
        fixed4(out) << "index,ybar,z,signal\n";
        for (const auto& p : run.points) {
          out << p.index << ',' << p.ybar << ',' << p.z << ',' << (p.signal ? 1 : 0) << '\n';
        }
      }
      if (!mon_plot.empty()) render_chart(run, mon_plot, run.config.is_shewhart() ? "Shewhart chart" : "EWMA chart");
    } else if (*tab) {
      const auto grid = read_grid(std::filesystem::path(tab_grid));
      tab_opt.threads = threads;
      const auto rows = build_arl_table(grid, tab_opt);
      if (tab_out.empty()) {
        write_arl_table(std::cout, rows);
      } else {
        std::ofstream out(tab_out, std::ios::binary);
        write_arl_table(out, rows);
      }
      if (!tab_plot.empty()) render_arl_curves(rows, tab_plot, "ARL by shift");
    } else if (*smp) {
      const ZinbParams params = smp_p.params();
      params.validate();
      if (smp_count < 0) throw DomainError("--count must be nonnegative");
      RandomStream rng(smp_seed);
      std::cout << "count\n";
      for (std::int64_t i = 0; i < smp_count; ++i) std::cout << zinb_sample(params, rng) << '\n';
    }
  } catch (const ParseError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << '\n';
    return kConvergence;
  } catch (const BracketError& e) {
    std::cerr << "calibration error: " << e.what() << '\n';
    return kConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kOk;
}
