// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit code is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "asymptotics.hpp"
#include "dulac.hpp"
#include "flow/glued.hpp"
#include "flow/saddle.hpp"
#include "models.hpp"

using namespace pcy;

namespace {

constexpr long kBits = 256;

Real r(double x) { return Real(x, kBits); }

LoopReturnMap make_map(double lambda, double c, double p0) {
  return LoopReturnMap(r(lambda), r(c), r(0.0), r(p0), r(1.0));
}

struct Gate {
  int failures = 0;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      ++failures;
      notes.push_back(what);
    }
  }
};

int g_failed_criteria = 0;

void run_criterion(int number, const std::string& title, double time_limit_s,
                   const std::function<void(Gate&)>& body) {
  Gate gate;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(gate);
  } catch (const std::exception& e) {
    gate.expect(false, std::string("exception: ") + e.what());
  }
  double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (time_limit_s > 0.0) {
    gate.expect(elapsed < time_limit_s,
                "runtime " + std::to_string(elapsed) + " s exceeds " +
                    std::to_string(time_limit_s) + " s");
  }
  bool pass = gate.failures == 0;
  if (!pass) ++g_failed_criteria;
  std::printf("[%s] criterion %2d: %s (%.2f s)\n", pass ? "PASS" : "FAIL", number, title.c_str(),
              elapsed);
  for (const auto& n : gate.notes) std::printf("        - %s\n", n.c_str());
  std::fflush(stdout);
}

double ols_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  FitResult fit = linear_fit(xs, ys, 0, xs.size() - 1);
  return fit.slope;
}

// Independent scan-plus-refine sheet oracle in plain arithmetic.
Real oracle_sheet(const LoopReturnMap& g, int n) {
  auto survives = [&](const Real& eps) {
    Real y = g.p0;
    for (int k = 0; k < n; ++k) {
      Real next = g.c * pow(y, g.lambda) - eps;
      if (!(next > 0.0)) return false;
      y = next;
    }
    return true;
  };
  Real lo(kBits), hi(kBits);
  bool bracketed = false;
  Real prev = r(1e-30);
  bool prev_s = survives(prev);
  for (int i = 1; i <= 600; ++i) {
    Real eps = exp(r(std::log(1e-30) * (1.0 - static_cast<double>(i) / 600)));
    bool s = survives(eps);
    if (s != prev_s) {
      lo = prev;
      hi = eps;
      bracketed = true;
      break;
    }
    prev = eps;
    prev_s = s;
  }
  if (!bracketed) throw Error(errc::internal, "oracle: no bracket");
  for (int i = 0; i < 400; ++i) {
    Real mid = (lo + hi) * 0.5;
    (survives(mid) ? lo : hi) = mid;
  }
  return (lo + hi) * 0.5;
}

const double kLambdas[] = {1.5, 2.0, 3.0};
const double kCoeffs[] = {0.5, 1.0, 2.0};
const double kEntries[] = {0.1, 0.3};

std::string combo_name(double l, double c, double p) {
  std::ostringstream o;
  o << "(lambda=" << l << ", c=" << c << ", p0=" << p << ")";
  return o.str();
}

// ----------------------------------------------------------- criteria ---

void criterion1(Gate& gate) {
  for (double l : kLambdas) {
    for (double c : kCoeffs) {
      for (double p : kEntries) {
        auto tbl = sparkling_table(make_map(l, c, p), 40);
        std::vector<double> xs, ys;
        for (int n = 10; n <= 40; ++n) {
          xs.push_back(n);
          ys.push_back(log(tbl.eps_at(n).neg_ln).to_double());
        }
        double slope = ols_slope(xs, ys);
        bool slope_ok = std::abs(slope - std::log(l)) < 0.01 * std::log(l);
        gate.expect(slope_ok, combo_name(l, c, p) + ": slope " + std::to_string(slope) +
                                  " vs ln lambda " + std::to_string(std::log(l)));
        std::vector<double> resid;
        for (int n = 10; n <= 40; ++n) {
          resid.push_back(log(tbl.eps_at(n).neg_ln).to_double() - n * std::log(l));
        }
        double band1 = band_width(resid, 0, 15);   // n in [10, 25]
        double band2 = band_width(resid, 15, 30);  // n in [25, 40]
        gate.expect(band2 <= 1.5 * band1 + 1e-12,
                    combo_name(l, c, p) + ": residual band widened " + std::to_string(band1) +
                        " -> " + std::to_string(band2));
      }
    }
  }
}

void criterion2(Gate& gate) {
  std::mt19937_64 rng(1742);
  for (double l : kLambdas) {
    for (double c : kCoeffs) {
      for (double p : kEntries) {
        auto g = make_map(l, c, p);
        auto tbl = sparkling_table(g, 40);
        std::uniform_real_distribution<double> unif(tbl.eps_at(1).neg_ln.to_double(),
                                                    tbl.eps_at(40).neg_ln.to_double());
        int bad = 0;
        for (int k = 0; k < 100; ++k) {
          Real w = r(unif(rng));
          int n = count_turns(g, LogEps(w));
          if (n < 1 || n > 39 || !(tbl.eps_at(n).neg_ln < w) || !(w <= tbl.eps_at(n + 1).neg_ln)) {
            ++bad;
          }
        }
        gate.expect(bad == 0, combo_name(l, c, p) + ": " + std::to_string(bad) +
                                  " bracket mismatches out of 100");
      }
    }
  }
}

void criterion3(Gate& gate) {
  const std::tuple<double, double, double> models[] = {
      {2.0, 1.0, std::exp(-1.0)}, {1.5, 0.5, 0.3}, {3.0, 2.0, 0.1}};
  for (auto [l, c, p] : models) {
    auto g = make_map(l, c, p);
    for (int n = 1; n <= 3; ++n) {
      Real expect = oracle_sheet(g, n);
      Real got = *solve_sparkling(g, n).eps.value();
      double rel = abs(got / expect - 1.0).to_double();
      gate.expect(rel < 1e-12, combo_name(l, c, p) + " n=" + std::to_string(n) +
                                   ": oracle mismatch rel " + std::to_string(rel));
    }
  }
  // lambda = 2 also has the quadratic closed form for eps_2
  auto g = make_map(2.0, 1.0, std::exp(-1.0));
  double u = 0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * std::exp(-2.0)));
  double closed = std::exp(-2.0) - u;
  double got = solve_sparkling(g, 2).eps.value()->to_double();
  gate.expect(std::abs(got / closed - 1.0) < 1e-12, "quadratic closed form for eps_2");
}

void criterion4(Gate& gate) {
  const std::pair<double, double> pairs[] = {{2.0, 3.0}, {2.0, 4.0}, {1.5, 3.0}};
  for (auto [la, lb] : pairs) {
    auto ta = sparkling_table(make_map(la, 1.0, 0.3), 40);
    auto tb = sparkling_table(make_map(lb, 1.0, 0.3), 40);
    auto cmp = compare_families(ta, r(la), tb, r(lb), 10, 40, 0);
    double target = std::log(lb) / std::log(la);
    gate.expect(std::abs(cmp.ratio_limit.value - target) < 0.02 * target,
                "ratio limit " + std::to_string(cmp.ratio_limit.value) + " vs " +
                    std::to_string(target));
  }
  auto ta = sparkling_table(make_map(2.0, 1.0, 0.3), 40);
  auto tb = sparkling_table(make_map(2.0, 0.5, 0.1), 40);
  auto cmp = compare_families(ta, r(2.0), tb, r(2.0), 10, 40, 0);
  auto verdict = boundedness_check(cmp.differences, cmp.differences.size() / 2);
  gate.expect(verdict.verdict == Verdict::bounded,
              "equal-lambda differences verdict not bounded; factor " +
                  std::to_string(verdict.growth_factor));
}

void criterion5(Gate& gate) {
  auto ta = sparkling_table(make_map(2.0, 1.0, 0.3), 40);
  auto tb = sparkling_table(make_map(3.0, 1.0, 0.3), 40);
  auto kappa = holder_profile(ta, tb, 1, 40, 0);
  double growth = kappa[34] / kappa[19];  // n = 35 over n = 20
  gate.expect(growth >= 10.0, "distinct-lambda kappa growth " + std::to_string(growth));

  auto tc = sparkling_table(make_map(2.0, 0.5, 0.1), 40);
  auto flat = holder_profile(ta, tc, 1, 40, 0);
  double lo = flat[19], hi = flat[19];
  for (int n = 20; n <= 35; ++n) {
    lo = std::min(lo, flat[static_cast<size_t>(n) - 1]);
    hi = std::max(hi, flat[static_cast<size_t>(n) - 1]);
  }
  double mid = 0.5 * (lo + hi);
  gate.expect((hi - lo) / mid <= 0.04,
              "equal-lambda kappa band " + std::to_string((hi - lo) / mid * 100.0) + "%");
}

void criterion6(Gate& gate) {
  const std::pair<double, double> pairs[] = {{2.0, 0.7}, {1.5, 0.6}};
  for (auto variant : {Variant::glasses, Variant::ears}) {
    for (auto [l, rho] : pairs) {
      LoopReturnMap left(r(l), r(1.2), r(0.0), r(0.3), r(1.0));
      PolycycleModel m(variant, left, r(rho), r(1.1), r(0.3), BridgeTransition{r(0.9), r(0.0)});
      for (double e : {1e-8, 1e-10, 1e-12}) {
        LogEps eps = LogEps::from_value(r(e));
        LogEps delta = variant == Variant::glasses ? synchronize_glasses(m, eps)
                                                   : synchronize_ears(m, eps).delta;
        double ratio = delta.neg_ln.to_double() / eps.neg_ln.to_double();
        gate.expect(std::abs(ratio - l * rho) < 0.01 * l * rho,
                    std::string(variant == Variant::glasses ? "glasses" : "ears") +
                        " ln delta / ln eps = " + std::to_string(ratio) + " vs " +
                        std::to_string(l * rho));
      }
    }
  }
}

void criterion7(Gate& gate) {
  const std::pair<double, double> models[] = {{2.0, 0.5}, {2.0, 0.7}, {1.5, 0.6}};
  for (auto [l, rho] : models) {
    LoopReturnMap left(r(l), r(1.0), r(0.0), r(0.3), r(1.0));
    PolycycleModel m(Variant::glasses, left, r(rho), r(1.0), r(0.3),
                     BridgeTransition{r(1.0), r(0.0)});
    auto tbl = sparkling_table(m.left, 51);
    auto pts = staircase(m, bracket_midpoints(tbl, 20, 50));
    auto est = estimate_phi(pts, 0, pts.size() - 1);
    double target = phi(l, rho);
    gate.expect(std::abs(est.phi_hat - target) < 0.03 * target,
                "phi_hat " + std::to_string(est.phi_hat) + " vs " + std::to_string(target));
  }
  // structural instability: phi = 1.0 and phi = 1.3 give disjoint intervals
  LoopReturnMap l1(r(2.0), r(1.0), r(0.0), r(0.3), r(1.0));
  PolycycleModel m1(Variant::glasses, l1, r(0.5), r(1.0), r(0.3),
                    BridgeTransition{r(1.0), r(0.0)});
  LoopReturnMap l2(r(2.0), r(1.0), r(0.0), r(0.3), r(1.0));
  PolycycleModel m2(Variant::glasses, l2, r(std::pow(2.0, -1.3)), r(1.0), r(0.3),
                    BridgeTransition{r(1.0), r(0.0)});
  auto t1 = sparkling_table(m1.left, 56);
  auto t2 = sparkling_table(m2.left, 56);
  auto p1 = staircase(m1, bracket_midpoints(t1, 20, 55));
  auto p2 = staircase(m2, bracket_midpoints(t2, 20, 55));
  auto e1 = estimate_phi(p1, 0, p1.size() - 1);
  auto e2 = estimate_phi(p2, 0, p2.size() - 1);
  gate.expect(std::abs(e1.phi_hat - e2.phi_hat) > e1.residual + e2.residual,
              "phi intervals overlap: " + std::to_string(e1.phi_hat) + "+-" +
                  std::to_string(e1.residual) + " vs " + std::to_string(e2.phi_hat) + "+-" +
                  std::to_string(e2.residual));
}

void criterion8(Gate& gate) {
  auto prob = flow::bt_loop_problem(-0.06, -0.5);
  double beta1 = flow::find_homoclinic(prob, -0.12, -0.02, 1e-10);
  flow::Section sec = flow::make_loop_section(prob, beta1);
  double resid = flow::splitting_at(prob, beta1, sec);
  gate.expect(std::abs(resid) < 1e-8, "homoclinic residual " + std::to_string(resid));

  auto saddle = flow::find_saddle(prob.family.with_param(0, beta1), prob.saddle_seed);
  gate.expect(saddle.nu > 1.0, "lambda " + std::to_string(saddle.nu) + " not above 1");

  auto res = flow::measure_sparkling_flow(prob, beta1, 0.35, 2, 5, 1e-10);
  std::vector<double> ns, lnw, w;
  for (const auto& p : res.points) {
    ns.push_back(p.n);
    w.push_back(-std::log(p.eps));
    lnw.push_back(std::log(-std::log(p.eps)));
  }
  double slope = ols_slope(ns, lnw);
  double lnl = std::log(saddle.nu);
  gate.expect(std::abs(slope - lnl) < 0.10 * lnl,
              "flow slope " + std::to_string(slope) + " vs ln lambda " + std::to_string(lnl));
  gate.notes.push_back("info: slope " + std::to_string(slope) + ", growth exponent " +
                       std::to_string(std::log((w[3] - w[2]) / (w[2] - w[1]))) +
                       ", ln lambda " + std::to_string(lnl));

  // Map-model prediction of eps_4, eps_5 from (c, p0) fitted to the first
  // two measured sheets. The n = 2 sheet of this family sits outside the
  // asymptotic regime at every double-precision-reachable depth, so this
  // sub-check records the honest miss (see the flow report for the
  // asymptotic-window variant).
  auto fit = flow::fit_loop_model(saddle.nu, res.points[0].eps, res.points[1].eps);
  for (size_t i = 2; i < res.points.size(); ++i) {
    int model_index = res.points[i].n - res.points[0].n + 2;
    double pred = flow::predict_sheet(saddle.nu, fit, model_index);
    double rel = std::abs(pred / res.points[i].eps - 1.0);
    gate.expect(rel < 0.10, "map-model prediction of eps_" + std::to_string(res.points[i].n) +
                                " off by " + std::to_string(rel * 100.0) + "%");
  }
  auto fit34 = flow::fit_loop_model(saddle.nu, res.points[1].eps, res.points[2].eps);
  double pred5 = flow::predict_sheet(saddle.nu, fit34, 4);
  gate.notes.push_back("info: asymptotic-window fit (eps_3, eps_4) predicts eps_5 to " +
                       std::to_string(std::abs(pred5 / res.points[3].eps - 1.0) * 100.0) + "%");
}

void criterion9(Gate& gate) {
  flow::GluedSpec spec;
  spec.lambda = 2.0;
  spec.rho = 0.5;
  auto rep = flow::glued_check(spec);
  gate.expect(rep.eig_err_l < 1e-12, "L eigenvalue error " + std::to_string(rep.eig_err_l));
  gate.expect(rep.eig_err_r < 1e-12, "R eigenvalue error " + std::to_string(rep.eig_err_r));
  gate.expect(std::abs(rep.eps_measured) < 1e-6, "eps closure " + std::to_string(rep.eps_measured));
  gate.expect(std::abs(rep.sigma_measured) < 1e-6,
              "sigma closure " + std::to_string(rep.sigma_measured));
  gate.expect(std::abs(rep.delta_measured) < 1e-6,
              "delta closure " + std::to_string(rep.delta_measured));

  for (double sgn : {+1.0, -1.0}) {
    flow::GluedSpec offs = spec;
    offs.eps = sgn * 1e-3;
    offs.sigma = -sgn * 1e-3;
    offs.delta = sgn * 1e-3;
    auto rr = flow::glued_check(offs);
    gate.expect(rr.eps_measured * offs.eps > 0.0, "eps sign mismatch");
    gate.expect(rr.sigma_measured * offs.sigma > 0.0, "sigma sign mismatch");
    gate.expect(rr.delta_measured * offs.delta > 0.0, "delta sign mismatch");
  }
}

void criterion10(Gate& gate) {
  const char* cli = std::getenv("POLYCYCLE_CLI");
  if (!cli) {
    gate.expect(false, "POLYCYCLE_CLI not set (run through ctest)");
    return;
  }
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "polycycle_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);

  auto slurp = [](const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  auto run = [&](const std::string& args, const std::string& tag) {
    std::string cmd = std::string(cli) + " " + args + " > " + (dir / (tag + ".log")).string() +
                      " 2>&1";
    return std::system(cmd.c_str());
  };

  struct Job {
    std::string name;
    std::string args;
    std::vector<std::string> outputs;
  };
  std::vector<Job> jobs = {
      {"sparkling",
       "sparkling --lambda 2 --c 1 --p0 0.3679 --n-max 25 --bits 256 --out %D/tblT.csv "
       "--fit-out %D/fitT.json --threads %T",
       {"tblT.csv", "fitT.json"}},
      {"staircase",
       "staircase --lambda 2 --rho 0.5 --n-lo 3 --n-hi 24 --out %D/stT.csv --phi-out "
       "%D/phiT.json --svg %D/stT.svg --threads %T",
       {"stT.csv", "phiT.json", "stT.svg"}},
      {"compare",
       "compare --lambda 2 --lambda2 3 --n-lo 3 --n-hi 30 --out %D/cmpT.csv --verdicts-out "
       "%D/verT.json --threads %T",
       {"cmpT.csv", "verT.json"}},
  };
  for (const auto& job : jobs) {
    std::vector<std::string> contents[2];
    int runs = 0;
    for (const std::string t : {"1", "4"}) {
      std::string args = job.args;
      for (std::string::size_type p; (p = args.find("%D")) != std::string::npos;) {
        args.replace(p, 2, (dir / t).string());
      }
      for (std::string::size_type p; (p = args.find("%T")) != std::string::npos;) {
        args.replace(p, 2, t);
      }
      fs::create_directories(dir / t);
      int rc = run(args, job.name + "_t" + t);
      gate.expect(rc == 0, job.name + " exited with " + std::to_string(rc));
      if (rc != 0) return;
      for (const auto& out : job.outputs) {
        std::string body = slurp(dir / t / out);
        body = body;  // placeholder to keep the loop simple
        contents[runs].push_back(std::move(body));
      }
      ++runs;
    }
    for (size_t i = 0; i < job.outputs.size(); ++i) {
      gate.expect(contents[0][i] == contents[1][i],
                  job.name + ": " + job.outputs[i] + " differs between --threads 1 and 4");
      gate.expect(!contents[0][i].empty(), job.name + ": " + job.outputs[i] + " is empty");
    }
    // identical rerun: byte-identical files
    std::string args = job.args;
    for (std::string::size_type p; (p = args.find("%D")) != std::string::npos;) {
      args.replace(p, 2, (dir / "1b").string());
    }
    for (std::string::size_type p; (p = args.find("%T")) != std::string::npos;) {
      args.replace(p, 2, "1");
    }
    fs::create_directories(dir / "1b");
    int rc = run(args, job.name + "_rerun");
    gate.expect(rc == 0, job.name + " rerun exited with " + std::to_string(rc));
    for (size_t i = 0; i < job.outputs.size(); ++i) {
      gate.expect(slurp(dir / "1b" / job.outputs[i]) == contents[0][i],
                  job.name + ": rerun of " + job.outputs[i] + " differs");
    }
  }
  // usage error contract
  int rc = run("sparkling --n-max 5", "usage_error");
  gate.expect(WIFEXITED(rc) && WEXITSTATUS(rc) == 2,
              "missing --lambda should exit with code 2");
}

}  // namespace

int main() {
  std::printf("polycycle acceptance suite\n");
  run_criterion(1, "sparkling slope law over the 18-model grid", 10.0, criterion1);
  run_criterion(2, "turn-count bracket consistency (100 samples per model)", 0.0, criterion2);
  run_criterion(3, "closed-form / scan oracle agreement to 12 digits", 0.0, criterion3);
  run_criterion(4, "ratio limits and bounded differences across families", 0.0, criterion4);
  run_criterion(5, "Holder obstruction profile", 0.0, criterion5);
  run_criterion(6, "synchronizing law for glasses and ears", 0.0, criterion6);
  run_criterion(7, "invariant recovery from index staircases", 30.0, criterion7);
  run_criterion(8, "flow validation on the saddle-loop family", 60.0, criterion8);
  run_criterion(9, "glued glasses field closure", 0.0, criterion9);
  run_criterion(10, "CLI determinism across reruns and thread counts", 0.0, criterion10);
  if (g_failed_criteria == 0) {
    std::printf("all criteria passed\n");
  } else {
    std::printf("%d criteria failed\n", g_failed_criteria);
  }
  return g_failed_criteria;
}
