// polycycle: command-line laboratory for saddle-loop and polycycle
// bifurcation experiments. All numerics run behind the C API in
// libpolycycle; this front end handles flags, config files, and the
// CSV/JSON/SVG outputs.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "../include/polycycle.h"
#include "svg.hpp"

using nlohmann::json;

namespace {

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(pcy_status rc) {
  if (rc != PCY_OK) throw CliError(pcy_last_error());
}

std::string take_string(char* s) {
  std::string out(s);
  pcy_string_free(s);
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CliError("cannot open for writing: " + path);
  f << content;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CliError("cannot read: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(17);
  o << v;
  return o.str();
}

std::string fit_json(const pcy_fit& fit) {
  std::ostringstream o;
  o << "{\"slope\":" << fmt(fit.slope) << ",\"intercept\":" << fmt(fit.intercept)
    << ",\"residual\":" << fmt(fit.residual) << ",\"window\":[" << fit.window_lo << ','
    << fit.window_hi << "]}";
  return o.str();
}

long default_bits() {
  if (const char* env = std::getenv("POLYCYCLE_BITS")) {
    long b = std::atol(env);
    if (b >= 53) return b;
  }
  return 256;
}

// Config file values fill in flags the user did not pass.
struct Config {
  json data = json::object();

  void load(const std::string& path) { data = json::parse(read_file(path)); }

  template <typename T>
  void fill(const CLI::Option* opt, T& var, const char* key) const {
    if (opt != nullptr && opt->count() == 0 && data.contains(key)) {
      var = data.at(key).get<T>();
    }
  }
};

// ------------------------------------------------------------ sparkling ---

struct SparklingArgs {
  double lambda = 0.0, c = 1.0, p0 = 0.3, y_max = 1.0, perturb = 0.0, tol = 0.0;
  int n_max = 40;
  long bits = default_bits();
  int fit_lo = 10, fit_hi = 40;
  int threads = 1;
  std::string out = "sparkling.csv";
  std::string fit_out = "sparkling_fit.json";
};

int run_sparkling(const SparklingArgs& a) {
  pcy_set_threads(a.threads);
  pcy_loop_map* map = nullptr;
  check(pcy_loop_map_create(a.lambda, a.c, a.p0, a.y_max, a.perturb, a.bits, &map));
  pcy_table* tbl = nullptr;
  pcy_status rc = pcy_sparkling_table(map, a.n_max, &tbl);
  if (rc != PCY_OK) {
    pcy_loop_map_free(map);
    throw CliError(pcy_last_error());
  }
  char* csv = nullptr;
  check(pcy_table_csv(tbl, &csv));
  write_file(a.out, take_string(csv));

  int size = pcy_table_size(tbl);
  std::vector<double> xs, ys, ws;
  for (int i = 0; i < size; ++i) {
    int n = 0;
    double w = 0.0;
    check(pcy_table_entry(tbl, i, &n, &w));
    xs.push_back(n);
    ys.push_back(std::log(w));
    ws.push_back(w);
  }

  // Bracket re-check at sheet midpoints, split over the worker pool.
  std::vector<int> bad(static_cast<size_t>(std::max(0, size - 1)), 0);
  {
    int k = std::max(1, a.threads);
    std::vector<std::thread> pool;
    for (int t = 0; t < k; ++t) {
      pool.emplace_back([&, t] {
        for (int i = t; i + 1 < size; i += k) {
          double mid = 0.5 * (ws[static_cast<size_t>(i)] + ws[static_cast<size_t>(i) + 1]);
          int n_mid = 0;
          if (pcy_count_turns_log(map, mid, &n_mid) != PCY_OK || n_mid != i + 1) {
            bad[static_cast<size_t>(i)] = 1;
          }
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  for (int i = 0; i + 1 < size; ++i) {
    if (bad[static_cast<size_t>(i)]) {
      throw CliError("bracket re-check failed between sheets " + std::to_string(i + 1) + " and " +
                     std::to_string(i + 2));
    }
  }

  std::size_t lo = static_cast<std::size_t>(std::max(1, a.fit_lo) - 1);
  std::size_t hi = static_cast<std::size_t>(std::min(size, a.fit_hi) - 1);
  pcy_fit fit{};
  check(pcy_linear_fit(xs.data(), ys.data(), xs.size(), lo, hi, &fit));
  write_file(a.fit_out, fit_json(fit));

  std::cout << "sparkling: " << size << " sheets, slope " << fit.slope << " (ln lambda = "
            << std::log(a.lambda) << "), residual " << fit.residual
            << (pcy_table_truncated(tbl) ? ", TRUNCATED" : "") << "\n";
  pcy_table_free(tbl);
  pcy_loop_map_free(map);
  return 0;
}

// ------------------------------------------------------------ staircase ---

struct StaircaseArgs {
  std::string variant = "glasses";
  double lambda = 0.0, rho = 0.0;
  double c_left = 1.0, c_right = 1.0, c_bridge = 1.0, sigma = 0.0;
  double p0 = 0.3, q0 = 0.3, y_max = 1.0;
  std::vector<double> eta;
  int n_lo = 5, n_hi = 40;
  int window_lo = -1, window_hi = -1;
  long bits = default_bits();
  int threads = 1;
  std::string out = "staircase.csv";
  std::string phi_out = "phi.json";
  std::string svg_out;
};

pcy_model* make_model(const StaircaseArgs& a) {
  int variant = a.variant == "ears" ? PCY_EARS : PCY_GLASSES;
  if (a.variant != "ears" && a.variant != "glasses") {
    throw CLI::ValidationError("--variant", "must be glasses or ears");
  }
  pcy_model* model = nullptr;
  check(pcy_model_create(variant, a.lambda, a.rho, a.c_left, a.c_right, a.c_bridge, a.sigma,
                         a.p0, a.q0, a.y_max, a.eta.empty() ? nullptr : a.eta.data(),
                         a.eta.size(), a.bits, &model));
  return model;
}

int run_staircase(const StaircaseArgs& a) {
  pcy_set_threads(a.threads);
  pcy_model* model = make_model(a);
  pcy_staircase* st = nullptr;
  pcy_status rc = pcy_staircase_run(model, a.n_lo, a.n_hi, &st);
  if (rc != PCY_OK) {
    pcy_model_free(model);
    throw CliError(pcy_last_error());
  }
  char* csv = nullptr;
  check(pcy_staircase_csv(st, &csv));
  write_file(a.out, take_string(csv));

  int size = pcy_staircase_size(st);
  int wlo = a.window_lo >= 0 ? a.window_lo : 0;
  int whi = a.window_hi >= 0 ? std::min(a.window_hi, size - 1) : size - 1;
  double phi_hat = 0.0, residual = 0.0;
  check(pcy_estimate_phi(st, wlo, whi, &phi_hat, &residual));
  double phi_target = 0.0;
  check(pcy_phi(a.lambda, a.rho, &phi_target));

  std::vector<double> ms, ns;
  for (int i = 0; i < size; ++i) {
    int nl = 0, mr = 0;
    check(pcy_staircase_point(st, i, nullptr, nullptr, &nl, &mr));
    ms.push_back(mr);
    ns.push_back(nl);
  }
  pcy_fit fit{};
  check(pcy_linear_fit(ms.data(), ns.data(), ms.size(), static_cast<std::size_t>(wlo),
                       static_cast<std::size_t>(whi), &fit));

  std::ostringstream pj;
  pj << "{\"phi_hat\":" << fmt(phi_hat) << ",\"residual\":" << fmt(residual)
     << ",\"phi_target\":" << fmt(phi_target) << ",\"variant\":\"" << a.variant
     << "\",\"window\":[" << wlo << ',' << whi << "],\"fit\":" << fit_json(fit) << "}";
  write_file(a.phi_out, pj.str());

  if (!a.svg_out.empty()) {
    svg::Plot plot("index staircase (phi_hat = " + fmt(phi_hat) + ")", "m_right", "n_left");
    svg::Series pts{"staircase", "#1860c8", {}, true};
    for (int i = 0; i < size; ++i) pts.pts.push_back({ms[static_cast<size_t>(i)], ns[static_cast<size_t>(i)]});
    svg::Series line{"fit", "#c83218", {}, false};
    double m0 = ms[static_cast<size_t>(wlo)], m1 = ms[static_cast<size_t>(whi)];
    line.pts.push_back({m0, fit.intercept + fit.slope * m0});
    line.pts.push_back({m1, fit.intercept + fit.slope * m1});
    plot.add(std::move(pts));
    plot.add(std::move(line));
    write_file(a.svg_out, plot.render());
  }

  std::cout << "staircase: " << size << " points, phi_hat " << phi_hat << " +- " << residual
            << " (target " << phi_target << ")\n";
  pcy_staircase_free(st);
  pcy_model_free(model);
  return 0;
}

// -------------------------------------------------------------- compare ---

struct CompareArgs {
  double lambda = 0.0, lambda2 = 0.0;
  double c = 1.0, c2 = 1.0, p0 = 0.3, p02 = 0.3, y_max = 1.0;
  int n_lo = 5, n_hi = 40, shift = 0;
  long bits = default_bits();
  int threads = 1;
  std::string out = "compare.csv";
  std::string verdicts_out = "verdicts.json";
};

int run_compare(const CompareArgs& a) {
  pcy_set_threads(a.threads);
  pcy_loop_map *ma = nullptr, *mb = nullptr;
  check(pcy_loop_map_create(a.lambda, a.c, a.p0, a.y_max, 0.0, a.bits, &ma));
  check(pcy_loop_map_create(a.lambda2, a.c2, a.p02, a.y_max, 0.0, a.bits, &mb));
  pcy_comparison* cmp = nullptr;
  pcy_status rc = pcy_compare_families(ma, mb, a.n_lo, a.n_hi, a.shift, &cmp);
  if (rc != PCY_OK) {
    pcy_loop_map_free(ma);
    pcy_loop_map_free(mb);
    throw CliError(pcy_last_error());
  }
  char* csv = nullptr;
  check(pcy_comparison_csv(cmp, &csv));
  write_file(a.out, take_string(csv));

  int size = pcy_comparison_size(cmp);
  std::vector<double> diffs, kappas;
  for (int i = 0; i < size; ++i) {
    double d = 0.0, k = 0.0;
    check(pcy_comparison_row(cmp, i, nullptr, nullptr, &d, &k));
    diffs.push_back(d);
    kappas.push_back(k);
  }
  double limit = 0.0, halfwidth = 0.0;
  check(pcy_comparison_ratio_limit(cmp, &limit, &halfwidth));
  int diff_growing = 0, kappa_growing = 0;
  double diff_factor = 0.0, kappa_factor = 0.0;
  check(pcy_boundedness_check(diffs.data(), diffs.size(), diffs.size() / 2, 4.0, &diff_growing,
                              &diff_factor));
  check(pcy_boundedness_check(kappas.data(), kappas.size(), kappas.size() / 2, 4.0,
                              &kappa_growing, &kappa_factor));
  double target = std::log(a.lambda2) / std::log(a.lambda);

  std::ostringstream vj;
  vj << "{\"ratio_limit\":{\"value\":" << fmt(limit) << ",\"halfwidth\":" << fmt(halfwidth)
     << "},\"ratio_target\":" << fmt(target) << ",\"differences\":{\"verdict\":\""
     << (diff_growing ? "growing" : "bounded") << "\",\"growth_factor\":" << fmt(diff_factor)
     << "},\"holder_profile\":{\"verdict\":\"" << (kappa_growing ? "growing" : "bounded")
     << "\",\"growth_factor\":" << fmt(kappa_factor) << "},\"index_shift\":" << a.shift << "}";
  write_file(a.verdicts_out, vj.str());

  std::cout << "compare: ratio limit " << limit << " +- " << halfwidth << " (target " << target
            << "), differences " << (diff_growing ? "growing" : "bounded") << ", kappa "
            << (kappa_growing ? "growing" : "bounded") << "\n";
  pcy_comparison_free(cmp);
  pcy_loop_map_free(ma);
  pcy_loop_map_free(mb);
  return 0;
}

// -------------------------------------------------------------- bifdiag ---

struct BifdiagArgs {
  StaircaseArgs model;  // reuse the model block (variant fixed to glasses)
  int n_max = 6, m_max = 6, samples = 64;
  double eps_min = 1e-12, eps_max = 0.5;
  std::vector<std::string> omit;
  std::string out = "curves.json";
  std::string svg_out;
};

int run_bifdiag(const BifdiagArgs& a) {
  pcy_set_threads(a.model.threads);
  pcy_model* model = make_model(a.model);
  int draw_left = 1, draw_right = 1, draw_synchro = 1;
  for (const auto& o : a.omit) {
    if (o == "left") draw_left = 0;
    else if (o == "right") draw_right = 0;
    else if (o == "synchro") draw_synchro = 0;
    else throw CLI::ValidationError("--omit", "must be left, right or synchro");
  }
  pcy_diagram* d = nullptr;
  pcy_status rc = pcy_bifdiag(model, a.n_max, a.m_max, a.eps_min, a.eps_max, a.samples,
                              draw_left, draw_right, draw_synchro, &d);
  if (rc != PCY_OK) {
    pcy_model_free(model);
    throw CliError(pcy_last_error());
  }
  char* js = nullptr;
  check(pcy_diagram_json(d, &js));
  write_file(a.out, take_string(js));

  if (!a.svg_out.empty()) {
    svg::Plot plot("glasses bifurcation diagram (sigma = 0)", "eps", "delta", true, true);
    const char* colors[3] = {"#1860c8", "#18a028", "#c83218"};
    int count = pcy_diagram_curve_count(d);
    for (int i = 0; i < count; ++i) {
      const char* kind = nullptr;
      int index = 0, npts = 0;
      check(pcy_diagram_curve(d, i, &kind, &index, &npts));
      std::string k(kind);
      svg::Series s{k + (index ? " " + std::to_string(index) : ""),
                    colors[k == "left_sheet" ? 0 : (k == "right_sheet" ? 1 : 2)], {}, false};
      if (index > 1) s.label.clear();  // one legend entry per family
      for (int j = 0; j < npts; ++j) {
        double x = 0.0, y = 0.0;
        check(pcy_diagram_point(d, i, j, &x, &y));
        s.pts.push_back({x, y});
      }
      plot.add(std::move(s));
    }
    write_file(a.svg_out, plot.render());
  }

  std::cout << "bifdiag: " << pcy_diagram_curve_count(d) << " curves\n";
  pcy_diagram_free(d);
  pcy_model_free(model);
  return 0;
}

// ----------------------------------------------------------------- flow ---

struct FlowFieldArgs {
  std::string family = "bt";
  double beta1 = -0.06, beta2 = -0.5;
  double nu = 0.0;
  double a = 1.0, b = -2.0;
  std::string spec_file;
};

pcy_field* make_field(const FlowFieldArgs& f) {
  pcy_field* field = nullptr;
  if (f.family == "bt") {
    check(pcy_field_bt(f.beta1, f.beta2, &field));
  } else if (f.family == "cubic") {
    check(pcy_field_cubic(f.nu, &field));
  } else if (f.family == "linear") {
    check(pcy_field_linear(f.a, f.b, &field));
  } else if (f.family == "glued") {
    if (f.spec_file.empty()) throw CLI::ValidationError("--spec", "required for --family glued");
    check(pcy_field_glued(read_file(f.spec_file).c_str(), &field));
  } else {
    throw CLI::ValidationError("--family", "must be bt, cubic, linear or glued");
  }
  return field;
}

std::string saddle_json(const pcy_saddle_info& s) {
  std::ostringstream o;
  o << "{\"position\":[" << fmt(s.x) << ',' << fmt(s.y) << "],\"eigenvalues\":["
    << fmt(s.mu_unstable) << ',' << fmt(s.mu_stable) << "],\"eigenvector_unstable\":["
    << fmt(s.vux) << ',' << fmt(s.vuy) << "],\"eigenvector_stable\":[" << fmt(s.vsx) << ','
    << fmt(s.vsy) << "],\"nu\":" << fmt(s.nu) << "}";
  return o.str();
}

struct FlowSaddleArgs {
  FlowFieldArgs field;
  double seed_x = 0.6, seed_y = 0.0;
  std::string out = "saddle.json";
};

int run_flow_saddle(const FlowSaddleArgs& a) {
  pcy_field* field = make_field(a.field);
  pcy_saddle_info s{};
  pcy_status rc = pcy_find_saddle(field, a.seed_x, a.seed_y, &s);
  pcy_field_free(field);
  check(rc);
  write_file(a.out, saddle_json(s));
  std::cout << "saddle: (" << s.x << ", " << s.y << "), nu " << s.nu << "\n";
  return 0;
}

struct FlowHomoclinicArgs {
  double beta2 = -0.5;
  double bracket_lo = -0.12, bracket_hi = -0.02;
  double tol = 1e-9;
  std::string out = "homoclinic.json";
  std::string trajectory_out, crossings_out;
};

int run_flow_homoclinic(const FlowHomoclinicArgs& a) {
  double beta1 = 0.0, resid = 0.0;
  pcy_saddle_info s{};
  int reversed = 0;
  check(pcy_bt_homoclinic(a.beta2, a.bracket_lo, a.bracket_hi, a.tol, &beta1, &resid, &s,
                          &reversed));
  std::ostringstream o;
  o << "{\"beta1\":" << fmt(beta1) << ",\"beta2\":" << fmt(a.beta2) << ",\"splitting\":"
    << fmt(resid) << ",\"lambda\":" << fmt(s.nu) << ",\"time_reversed\":"
    << (reversed ? "true" : "false") << ",\"saddle\":" << saddle_json(s) << "}";
  write_file(a.out, o.str());

  if (!a.trajectory_out.empty() || !a.crossings_out.empty()) {
    // One pass around the loop, recorded with the crossings of a vertical
    // section through the interior.
    pcy_field* f = nullptr;
    check(pcy_field_bt(beta1, a.beta2, &f));
    pcy_field* w = nullptr;
    check(pcy_field_reversed(f, &w));
    double sec[5] = {s.x - 0.6, s.y, 0.0, 1.0, 1.5};
    pcy_trajectory* tr = nullptr;
    pcy_status rc = pcy_integrate(w, s.x - 1e-6 * s.vsx, s.y - 1e-6 * s.vsy, 60.0, sec, 1,
                                  1e-10, 1e-12, &tr);
    pcy_field_free(w);
    pcy_field_free(f);
    check(rc);
    if (!a.trajectory_out.empty()) {
      char* csv = nullptr;
      check(pcy_trajectory_csv(tr, &csv));
      write_file(a.trajectory_out, take_string(csv));
    }
    if (!a.crossings_out.empty()) {
      char* csv = nullptr;
      check(pcy_crossings_csv(tr, &csv));
      write_file(a.crossings_out, take_string(csv));
    }
    pcy_trajectory_free(tr);
  }

  std::cout << "homoclinic: beta1 " << beta1 << " (|eps| " << std::abs(resid) << "), lambda "
            << s.nu << (reversed ? " [reversed time]" : "") << "\n";
  return 0;
}

struct FlowSparklingArgs {
  double beta2 = -0.5;
  double beta1 = std::nan("");
  double bracket_lo = -0.12, bracket_hi = -0.02;
  double p0_frac = 0.55;
  int n_lo = 1, n_hi = 5;
  double tol = 1e-10;
  std::string out = "flow_sparkling.csv";
  std::string report_out = "flow_report.json";
};

int run_flow_sparkling(const FlowSparklingArgs& a) {
  double beta1 = a.beta1;
  if (std::isnan(beta1)) {
    double resid = 0.0;
    check(pcy_bt_homoclinic(a.beta2, a.bracket_lo, a.bracket_hi, 1e-9, &beta1, &resid, nullptr,
                            nullptr));
  }
  pcy_flow_sparkling* sp = nullptr;
  check(pcy_bt_sparkling(a.beta2, beta1, a.p0_frac, a.n_lo, a.n_hi, a.tol, &sp));

  int size = pcy_flow_sparkling_size(sp);
  double lambda = 0.0;
  int reversed = 0;
  check(pcy_flow_sparkling_lambda(sp, &lambda, &reversed));

  std::ostringstream csv;
  csv.precision(17);
  csv << "n,param,eps,ln_neg_ln_eps\n";
  std::vector<double> ns, lnw;
  std::vector<double> eps_list(static_cast<size_t>(size), 0.0);
  for (int i = 0; i < size; ++i) {
    int n = 0;
    double param = 0.0, eps = 0.0;
    check(pcy_flow_sparkling_point(sp, i, &n, &param, &eps));
    eps_list[static_cast<size_t>(i)] = eps;
    csv << n << ',' << param << ',' << eps << ',' << std::log(-std::log(eps)) << '\n';
    ns.push_back(n);
    lnw.push_back(std::log(-std::log(eps)));
  }
  write_file(a.out, csv.str());

  pcy_fit fit{};
  check(pcy_linear_fit(ns.data(), lnw.data(), ns.size(), ns.size() >= 2 ? 1 : 0, ns.size() - 1,
                       &fit));

  std::ostringstream rj;
  rj << "{\"beta1\":" << fmt(beta1) << ",\"beta2\":" << fmt(a.beta2) << ",\"lambda\":"
     << fmt(lambda) << ",\"ln_lambda\":" << fmt(std::log(lambda)) << ",\"time_reversed\":"
     << (reversed ? "true" : "false") << ",\"slope_fit\":" << fit_json(fit);
  // Map-model cross-check: constants fitted from the first two measured
  // sheets, deeper sheets predicted by the model recursion.
  if (size >= 3) {
    int n_first = static_cast<int>(ns[0]);
    double c = 0.0, p0 = 0.0;
    check(pcy_fit_loop_model(lambda, eps_list[0], eps_list[1], &c, &p0));
    rj << ",\"map_fit\":{\"c\":" << fmt(c) << ",\"p0\":" << fmt(p0)
       << ",\"fitted_sheets\":[" << n_first << ',' << n_first + 1 << "],\"predictions\":[";
    bool first = true;
    for (int i = 2; i < size; ++i) {
      int n = static_cast<int>(ns[static_cast<size_t>(i)]);
      double pred = 0.0;
      check(pcy_predict_sheet(lambda, c, p0, n - n_first + 2, &pred));
      double flow = eps_list[static_cast<size_t>(i)];
      rj << (first ? "" : ",") << "{\"n\":" << n << ",\"flow\":" << fmt(flow)
         << ",\"model\":" << fmt(pred) << ",\"rel_err\":" << fmt(std::abs(pred / flow - 1.0))
         << "}";
      first = false;
    }
    rj << "]}";
  }
  rj << "}";
  write_file(a.report_out, rj.str());

  std::cout << "flow sparkling: " << size << " sheets, slope " << fit.slope << " vs ln lambda "
            << std::log(lambda) << "\n";
  pcy_flow_sparkling_free(sp);
  return 0;
}

struct GluedCheckArgs {
  std::string spec_file;
  std::string write_default;
  std::string out = "glued_report.json";
};

int run_glued_check(const GluedCheckArgs& a) {
  if (!a.write_default.empty()) {
    char* js = nullptr;
    check(pcy_glued_default_spec(&js));
    write_file(a.write_default, take_string(js));
    std::cout << "wrote default glued spec to " << a.write_default << "\n";
    return 0;
  }
  if (a.spec_file.empty()) throw CLI::ValidationError("--spec", "spec file required");
  std::string spec_text = read_file(a.spec_file);
  pcy_glued_report rep{};
  check(pcy_glued_check(spec_text.c_str(), &rep));
  json spec = json::parse(spec_text);

  std::ostringstream o;
  o << "{\"offsets\":{\"eps\":" << fmt(spec.value("eps", 0.0)) << ",\"sigma\":"
    << fmt(spec.value("sigma", 0.0)) << ",\"delta\":" << fmt(spec.value("delta", 0.0))
    << "},\"measured\":{\"eps\":" << fmt(rep.eps_measured) << ",\"sigma\":"
    << fmt(rep.sigma_measured) << ",\"delta\":" << fmt(rep.delta_measured)
    << "},\"eigenvalue_error\":{\"L\":" << fmt(rep.eig_err_l) << ",\"R\":" << fmt(rep.eig_err_r)
    << "}}";
  write_file(a.out, o.str());

  std::cout << "glued-check: splittings (" << rep.eps_measured << ", " << rep.sigma_measured
            << ", " << rep.delta_measured << "), eig errors (" << rep.eig_err_l << ", "
            << rep.eig_err_r << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polycycle: saddle-loop and polycycle bifurcation laboratory"};
  app.require_subcommand(1);

  Config cfg;
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags override its values)");

  SparklingArgs sp;
  auto* c_sp = app.add_subcommand("sparkling", "solve a sparkling-connection table");
  auto* o_sp_lambda = c_sp->add_option("--lambda", sp.lambda, "characteristic number (> 1)");
  auto* o_sp_c = c_sp->add_option("--c", sp.c, "return-map coefficient");
  auto* o_sp_p0 = c_sp->add_option("--p0", sp.p0, "winding entry coordinate");
  auto* o_sp_ymax = c_sp->add_option("--y-max", sp.y_max, "section halfwidth");
  auto* o_sp_pert = c_sp->add_option("--perturb", sp.perturb, "(1 + a*y) perturbation toggle");
  auto* o_sp_nmax = c_sp->add_option("--n-max", sp.n_max, "deepest sheet index");
  auto* o_sp_bits = c_sp->add_option("--bits", sp.bits, "working precision (mantissa bits)");
  auto* o_sp_flo = c_sp->add_option("--fit-lo", sp.fit_lo, "fit window: first sheet");
  auto* o_sp_fhi = c_sp->add_option("--fit-hi", sp.fit_hi, "fit window: last sheet");
  auto* o_sp_thr = c_sp->add_option("--threads", sp.threads, "worker count");
  auto* o_sp_out = c_sp->add_option("--out", sp.out, "table CSV path");
  auto* o_sp_fout = c_sp->add_option("--fit-out", sp.fit_out, "slope FitResult JSON path");

  StaircaseArgs st;
  auto* c_st = app.add_subcommand("staircase", "index staircase of a glasses/ears model");
  auto* o_st_var = c_st->add_option("--variant", st.variant, "glasses or ears");
  auto* o_st_lambda = c_st->add_option("--lambda", st.lambda, "left characteristic number");
  auto* o_st_rho = c_st->add_option("--rho", st.rho, "right characteristic number (in (0,1))");
  auto* o_st_cl = c_st->add_option("--c-left", st.c_left, "left loop coefficient");
  auto* o_st_cr = c_st->add_option("--c-right", st.c_right, "right loop coefficient");
  auto* o_st_cb = c_st->add_option("--c-bridge", st.c_bridge, "bridge coefficient");
  auto* o_st_sig = c_st->add_option("--sigma", st.sigma, "bridge splitting");
  auto* o_st_p0 = c_st->add_option("--p0", st.p0, "left winding entry");
  auto* o_st_q0 = c_st->add_option("--q0", st.q0, "right winding entry");
  auto* o_st_eta = c_st->add_option("--eta", st.eta, "passive parameters (inert)");
  auto* o_st_nlo = c_st->add_option("--n-lo", st.n_lo, "first left sheet");
  auto* o_st_nhi = c_st->add_option("--n-hi", st.n_hi, "last left sheet");
  auto* o_st_wlo = c_st->add_option("--window-lo", st.window_lo, "fit window start (point index)");
  auto* o_st_whi = c_st->add_option("--window-hi", st.window_hi, "fit window end (point index)");
  auto* o_st_bits = c_st->add_option("--bits", st.bits, "working precision");
  auto* o_st_thr = c_st->add_option("--threads", st.threads, "worker count");
  auto* o_st_out = c_st->add_option("--out", st.out, "staircase CSV path");
  auto* o_st_pout = c_st->add_option("--phi-out", st.phi_out, "phi estimate JSON path");
  auto* o_st_svg = c_st->add_option("--svg", st.svg_out, "staircase SVG path");

  CompareArgs cp;
  auto* c_cp = app.add_subcommand("compare", "compare sparkling tables of two unfoldings");
  auto* o_cp_l1 = c_cp->add_option("--lambda", cp.lambda, "first characteristic number");
  auto* o_cp_l2 = c_cp->add_option("--lambda2", cp.lambda2, "second characteristic number");
  auto* o_cp_c1 = c_cp->add_option("--c", cp.c, "first coefficient");
  auto* o_cp_c2 = c_cp->add_option("--c2", cp.c2, "second coefficient");
  auto* o_cp_p1 = c_cp->add_option("--p0", cp.p0, "first entry coordinate");
  auto* o_cp_p2 = c_cp->add_option("--p02", cp.p02, "second entry coordinate");
  auto* o_cp_nlo = c_cp->add_option("--n-lo", cp.n_lo, "first sheet");
  auto* o_cp_nhi = c_cp->add_option("--n-hi", cp.n_hi, "last sheet");
  auto* o_cp_sh = c_cp->add_option("--index-shift", cp.shift, "index matching shift a");
  auto* o_cp_bits = c_cp->add_option("--bits", cp.bits, "working precision");
  auto* o_cp_thr = c_cp->add_option("--threads", cp.threads, "worker count");
  auto* o_cp_out = c_cp->add_option("--out", cp.out, "comparison CSV path");
  auto* o_cp_vout = c_cp->add_option("--verdicts-out", cp.verdicts_out, "verdicts JSON path");

  BifdiagArgs bd;
  bd.model.n_hi = 12;
  auto* c_bd = app.add_subcommand("bifdiag", "glasses bifurcation diagram on the sigma=0 slice");
  auto* o_bd_lambda = c_bd->add_option("--lambda", bd.model.lambda, "left characteristic number");
  auto* o_bd_rho = c_bd->add_option("--rho", bd.model.rho, "right characteristic number");
  auto* o_bd_cl = c_bd->add_option("--c-left", bd.model.c_left, "left loop coefficient");
  auto* o_bd_cr = c_bd->add_option("--c-right", bd.model.c_right, "right loop coefficient");
  auto* o_bd_cb = c_bd->add_option("--c-bridge", bd.model.c_bridge, "bridge coefficient");
  auto* o_bd_p0 = c_bd->add_option("--p0", bd.model.p0, "left winding entry");
  auto* o_bd_q0 = c_bd->add_option("--q0", bd.model.q0, "right winding entry");
  auto* o_bd_nmax = c_bd->add_option("--n-max", bd.n_max, "left sheets to draw");
  auto* o_bd_mmax = c_bd->add_option("--m-max", bd.m_max, "right sheets to draw");
  auto* o_bd_emin = c_bd->add_option("--eps-min", bd.eps_min, "eps range: low end");
  auto* o_bd_emax = c_bd->add_option("--eps-max", bd.eps_max, "eps range: high end");
  auto* o_bd_samp = c_bd->add_option("--samples", bd.samples, "synchronizing-curve samples");
  auto* o_bd_omit = c_bd->add_option("--omit", bd.omit, "curve families to omit (left|right|synchro)");
  auto* o_bd_bits = c_bd->add_option("--bits", bd.model.bits, "working precision");
  auto* o_bd_thr = c_bd->add_option("--threads", bd.model.threads, "worker count");
  auto* o_bd_out = c_bd->add_option("--out", bd.out, "curve-set JSON path");
  auto* o_bd_svg = c_bd->add_option("--svg", bd.svg_out, "diagram SVG path");

  auto* c_flow = app.add_subcommand("flow", "planar-flow experiments");
  c_flow->require_subcommand(1);

  FlowSaddleArgs fs;
  auto* c_fs = c_flow->add_subcommand("saddle", "locate and classify a saddle");
  c_fs->add_option("--family", fs.field.family, "bt | cubic | linear | glued");
  c_fs->add_option("--beta1", fs.field.beta1, "bt: beta1");
  c_fs->add_option("--beta2", fs.field.beta2, "bt: beta2");
  c_fs->add_option("--nu", fs.field.nu, "cubic: dissipation");
  c_fs->add_option("--a", fs.field.a, "linear: x eigenvalue");
  c_fs->add_option("--b", fs.field.b, "linear: y eigenvalue");
  c_fs->add_option("--spec", fs.field.spec_file, "glued: spec JSON file");
  c_fs->add_option("--seed-x", fs.seed_x, "Newton seed x");
  c_fs->add_option("--seed-y", fs.seed_y, "Newton seed y");
  c_fs->add_option("--out", fs.out, "saddle JSON path");

  FlowHomoclinicArgs fh;
  auto* c_fh = c_flow->add_subcommand("homoclinic", "locate the saddle-loop parameter (bt)");
  c_fh->add_option("--beta2", fh.beta2, "fixed beta2");
  c_fh->add_option("--bracket-lo", fh.bracket_lo, "beta1 bracket low end");
  c_fh->add_option("--bracket-hi", fh.bracket_hi, "beta1 bracket high end");
  c_fh->add_option("--tol", fh.tol, "splitting tolerance");
  c_fh->add_option("--out", fh.out, "result JSON path");
  c_fh->add_option("--trajectory-out", fh.trajectory_out, "loop trajectory CSV path");
  c_fh->add_option("--crossings-out", fh.crossings_out, "loop crossings CSV path");

  FlowSparklingArgs fp;
  auto* c_fp = c_flow->add_subcommand("sparkling", "flow-level sparkling measurement (bt)");
  c_fp->add_option("--beta2", fp.beta2, "fixed beta2");
  c_fp->add_option("--beta1", fp.beta1, "homoclinic beta1 (located when omitted)");
  c_fp->add_option("--bracket-lo", fp.bracket_lo, "beta1 bracket low end");
  c_fp->add_option("--bracket-hi", fp.bracket_hi, "beta1 bracket high end");
  c_fp->add_option("--p0-frac", fp.p0_frac, "marked point, fraction of section halfwidth");
  c_fp->add_option("--n-lo", fp.n_lo, "first sheet");
  c_fp->add_option("--n-hi", fp.n_hi, "last sheet");
  c_fp->add_option("--tol", fp.tol, "sheet parameter tolerance");
  c_fp->add_option("--out", fp.out, "measured sheets CSV path");
  c_fp->add_option("--report", fp.report_out, "map-vs-flow report JSON path");

  GluedCheckArgs gc;
  auto* c_gc = c_flow->add_subcommand("glued-check", "closure report of the glued glasses field");
  c_gc->add_option("--spec", gc.spec_file, "glued spec JSON file");
  c_gc->add_option("--write-default-spec", gc.write_default, "emit the default spec and exit");
  c_gc->add_option("--out", gc.out, "report JSON path");

  try {
    app.parse(argc, argv);

    if (!config_path.empty()) cfg.load(config_path);
    cfg.fill(o_sp_lambda, sp.lambda, "lambda");
    cfg.fill(o_sp_c, sp.c, "c");
    cfg.fill(o_sp_p0, sp.p0, "p0");
    cfg.fill(o_sp_ymax, sp.y_max, "y_max");
    cfg.fill(o_sp_pert, sp.perturb, "perturb");
    cfg.fill(o_sp_nmax, sp.n_max, "n_max");
    cfg.fill(o_sp_bits, sp.bits, "bits");
    cfg.fill(o_sp_flo, sp.fit_lo, "fit_lo");
    cfg.fill(o_sp_fhi, sp.fit_hi, "fit_hi");
    cfg.fill(o_sp_thr, sp.threads, "threads");
    cfg.fill(o_sp_out, sp.out, "out");
    cfg.fill(o_sp_fout, sp.fit_out, "fit_out");
    cfg.fill(o_st_var, st.variant, "variant");
    cfg.fill(o_st_lambda, st.lambda, "lambda");
    cfg.fill(o_st_rho, st.rho, "rho");
    cfg.fill(o_st_cl, st.c_left, "c_left");
    cfg.fill(o_st_cr, st.c_right, "c_right");
    cfg.fill(o_st_cb, st.c_bridge, "c_bridge");
    cfg.fill(o_st_sig, st.sigma, "sigma");
    cfg.fill(o_st_p0, st.p0, "p0");
    cfg.fill(o_st_q0, st.q0, "q0");
    cfg.fill(o_st_eta, st.eta, "eta");
    cfg.fill(o_st_nlo, st.n_lo, "n_lo");
    cfg.fill(o_st_nhi, st.n_hi, "n_hi");
    cfg.fill(o_st_wlo, st.window_lo, "window_lo");
    cfg.fill(o_st_whi, st.window_hi, "window_hi");
    cfg.fill(o_st_bits, st.bits, "bits");
    cfg.fill(o_st_thr, st.threads, "threads");
    cfg.fill(o_st_out, st.out, "out");
    cfg.fill(o_st_pout, st.phi_out, "phi_out");
    cfg.fill(o_st_svg, st.svg_out, "svg");
    cfg.fill(o_cp_l1, cp.lambda, "lambda");
    cfg.fill(o_cp_l2, cp.lambda2, "lambda2");
    cfg.fill(o_cp_c1, cp.c, "c");
    cfg.fill(o_cp_c2, cp.c2, "c2");
    cfg.fill(o_cp_p1, cp.p0, "p0");
    cfg.fill(o_cp_p2, cp.p02, "p02");
    cfg.fill(o_cp_nlo, cp.n_lo, "n_lo");
    cfg.fill(o_cp_nhi, cp.n_hi, "n_hi");
    cfg.fill(o_cp_sh, cp.shift, "index_shift");
    cfg.fill(o_cp_bits, cp.bits, "bits");
    cfg.fill(o_cp_thr, cp.threads, "threads");
    cfg.fill(o_cp_out, cp.out, "out");
    cfg.fill(o_cp_vout, cp.verdicts_out, "verdicts_out");
    cfg.fill(o_bd_lambda, bd.model.lambda, "lambda");
    cfg.fill(o_bd_rho, bd.model.rho, "rho");
    cfg.fill(o_bd_cl, bd.model.c_left, "c_left");
    cfg.fill(o_bd_cr, bd.model.c_right, "c_right");
    cfg.fill(o_bd_cb, bd.model.c_bridge, "c_bridge");
    cfg.fill(o_bd_p0, bd.model.p0, "p0");
    cfg.fill(o_bd_q0, bd.model.q0, "q0");
    cfg.fill(o_bd_nmax, bd.n_max, "n_max");
    cfg.fill(o_bd_mmax, bd.m_max, "m_max");
    cfg.fill(o_bd_emin, bd.eps_min, "eps_min");
    cfg.fill(o_bd_emax, bd.eps_max, "eps_max");
    cfg.fill(o_bd_samp, bd.samples, "samples");
    cfg.fill(o_bd_omit, bd.omit, "omit");
    cfg.fill(o_bd_bits, bd.model.bits, "bits");
    cfg.fill(o_bd_thr, bd.model.threads, "threads");
    cfg.fill(o_bd_out, bd.out, "out");
    cfg.fill(o_bd_svg, bd.svg_out, "svg");

    if (c_sp->parsed()) {
      if (!(sp.lambda > 1.0)) throw CLI::ValidationError("--lambda", "required, must be > 1");
      return run_sparkling(sp);
    }
    if (c_st->parsed()) {
      if (!(st.lambda > 1.0)) throw CLI::ValidationError("--lambda", "required, must be > 1");
      if (!(st.rho > 0.0 && st.rho < 1.0)) {
        throw CLI::ValidationError("--rho", "required, must lie in (0, 1)");
      }
      return run_staircase(st);
    }
    if (c_cp->parsed()) {
      if (!(cp.lambda > 1.0) || !(cp.lambda2 > 1.0)) {
        throw CLI::ValidationError("--lambda/--lambda2", "required, must be > 1");
      }
      return run_compare(cp);
    }
    if (c_bd->parsed()) {
      if (!(bd.model.lambda > 1.0)) throw CLI::ValidationError("--lambda", "required, must be > 1");
      if (!(bd.model.rho > 0.0 && bd.model.rho < 1.0)) {
        throw CLI::ValidationError("--rho", "required, must lie in (0, 1)");
      }
      bd.model.variant = "glasses";
      return run_bifdiag(bd);
    }
    if (c_flow->parsed()) {
      if (c_fs->parsed()) return run_flow_saddle(fs);
      if (c_fh->parsed()) return run_flow_homoclinic(fh);
      if (c_fp->parsed()) return run_flow_sparkling(fp);
      if (c_gc->parsed()) return run_glued_check(gc);
    }
    std::cerr << app.help() << std::endl;
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
}
