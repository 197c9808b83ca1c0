#include "glued.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <json.hpp>

#include "../real.hpp"

namespace pcy::flow {

namespace {

// C3 smoothstep and its flat-ended relatives.
double smooth01(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  double t2 = t * t;
  return t2 * t2 * (35.0 - 84.0 * t + 70.0 * t2 - 20.0 * t2 * t);
}

// 1 on [0, flat], 0 beyond `edge`.
double flat_top(double x, double flat, double edge) {
  if (x <= flat) return 1.0;
  if (x >= edge) return 0.0;
  return 1.0 - smooth01((x - flat) / (edge - flat));
}

// C3 bump on [0,1] with unit integral.
double unit_bump(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  double a = t * (1.0 - t);
  double a2 = a * a;
  return 630.0 * a2 * a2;
}

struct DiskCell {
  Vec2 c;
  Mat2 A;
  double r_in = 0.0;
  double r_flat = 0.0;
  // Spoke axes for the mask: unit directions of the attached channels.
  std::vector<Vec2> spokes;
  double w_box = 0.0, w_flat = 0.0;

  double mask(Vec2 p) const {
    Vec2 d = p - c;
    double open = 1.0 - flat_top(d.norm(), r_flat, r_in);
    for (const Vec2& s : spokes) {
      double u = std::abs(d.dot(s.perp()));
      double along = d.dot(s);
      if (along <= 0.0) continue;  // each spoke guards its own half-plane
      open *= 1.0 - flat_top(u, w_flat, w_box);
    }
    return 1.0 - open;
  }
};

struct CorridorCell {
  Vec2 a, b;   // wire endpoints; flow runs a -> b at unit speed
  Vec2 t, n;   // tangent and lateral unit vectors (n = t.perp())
  double len = 0.0;
  double w_box = 0.0, w_flat = 0.0;
  const DiskCell* morph_a = nullptr;  // disk behind `a`
  const DiskCell* morph_b = nullptr;  // disk behind `b`
  double ramp = 0.0;
  double bump_pos = -1.0, bump_len = 0.0, bump_amp = 0.0;

  bool contains(Vec2 p, double* s_out, double* u_out) const {
    double s = (p - a).dot(t);
    double u = (p - a).dot(n);
    if (s < 0.0 || s > len || std::abs(u) > w_box) return false;
    *s_out = s;
    *u_out = u;
    return true;
  }

  Vec2 formula(Vec2 p, double s) const {
    double w_lin_a = morph_a ? 1.0 - smooth01(s / ramp) : 0.0;
    double w_lin_b = morph_b ? 1.0 - smooth01((len - s) / ramp) : 0.0;
    Vec2 v = (1.0 - w_lin_a - w_lin_b) * t;
    if (w_lin_a > 0.0) v = v + w_lin_a * (morph_a->A * (p - morph_a->c));
    if (w_lin_b > 0.0) v = v + w_lin_b * (morph_b->A * (p - morph_b->c));
    if (bump_pos >= 0.0 && bump_len > 0.0) {
      v = v + (bump_amp * unit_bump((s - bump_pos) / bump_len)) * n;
    }
    return v;
  }
};

struct CornerCell {
  Vec2 v;
  Vec2 cin, cout;  // unit inflow/outflow directions (perpendicular)
  double h = 0.0;        // half-side of the square cell
  double b_blend = 0.0;  // half-length of the diagonal blend zone
  double w_box = 0.0, w_flat = 0.0;

  bool contains(Vec2 p) const {
    Vec2 d = p - v;
    return std::max(std::abs(d.x), std::abs(d.y)) <= h;
  }

  Vec2 formula(Vec2 p, double* mask_out) const {
    Vec2 d = p - v;
    Vec2 e_eta = (cin + cout) * (1.0 / std::sqrt(2.0));
    double eta = d.dot(e_eta);
    double q = smooth01(0.5 * (eta / b_blend + 1.0));
    double zeta_in = d.dot(cin.perp());
    double zeta_out = d.dot(cout.perp());
    *mask_out = (1.0 - q) * flat_top(std::abs(zeta_in), w_flat, w_box) +
                q * flat_top(std::abs(zeta_out), w_flat, w_box);
    return (1.0 - q) * cin + q * cout;
  }
};

}  // namespace

struct GluedImpl {
  std::vector<DiskCell> disks;        // [0]=L, [1]=R, [2]=source, [3]=sink
  std::vector<CorridorCell> corridors;
  std::vector<CornerCell> corners;
  Section sec_l, sec_b, sec_r;

  Vec2 eval(Vec2 p) const {
    for (const auto& d : disks) {
      Vec2 r = p - d.c;
      if (r.norm() < d.r_in) return d.mask(p) * (d.A * r);
    }
    for (const auto& c : corners) {
      if (c.contains(p)) {
        double m = 0.0;
        Vec2 v = c.formula(p, &m);
        return m * v;
      }
    }
    for (const auto& c : corridors) {
      double s = 0.0, u = 0.0;
      if (c.contains(p, &s, &u)) {
        double m = flat_top(std::abs(u), c.w_flat, c.w_box);
        return m * c.formula(p, s);
      }
    }
    return Vec2{0.0, 0.0};
  }

  // Analytic jacobian inside the pure linear cores; finite differences
  // elsewhere.
  Mat2 jac(Vec2 p) const {
    for (const auto& d : disks) {
      if ((p - d.c).norm() < d.r_flat) return d.A;
    }
    const double h = 1e-7;
    Vec2 fx1 = eval({p.x + h, p.y}), fx0 = eval({p.x - h, p.y});
    Vec2 fy1 = eval({p.x, p.y + h}), fy0 = eval({p.x, p.y - h});
    return Mat2{(fx1.x - fx0.x) / (2 * h), (fy1.x - fy0.x) / (2 * h), (fx1.y - fx0.y) / (2 * h),
                (fy1.y - fy0.y) / (2 * h)};
  }
};

namespace {

void check_geometry(const GluedImpl& impl) {
  // Region interiors must not overlap; faces may touch.
  const double tol = 1e-9;
  auto box_of_corridor = [](const CorridorCell& c) {
    Vec2 lo{std::min(c.a.x, c.b.x), std::min(c.a.y, c.b.y)};
    Vec2 hi{std::max(c.a.x, c.b.x), std::max(c.a.y, c.b.y)};
    lo = lo - c.w_box * Vec2{std::abs(c.n.x), std::abs(c.n.y)};
    hi = hi + c.w_box * Vec2{std::abs(c.n.x), std::abs(c.n.y)};
    return std::pair<Vec2, Vec2>{lo, hi};
  };
  std::vector<std::pair<Vec2, Vec2>> boxes;
  for (const auto& c : impl.corridors) boxes.push_back(box_of_corridor(c));
  for (const auto& c : impl.corners) {
    boxes.push_back({{c.v.x - c.h, c.v.y - c.h}, {c.v.x + c.h, c.v.y + c.h}});
  }
  auto overlap = [&](const std::pair<Vec2, Vec2>& a, const std::pair<Vec2, Vec2>& b) {
    return a.first.x < b.second.x - tol && b.first.x < a.second.x - tol &&
           a.first.y < b.second.y - tol && b.first.y < a.second.y - tol;
  };
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    for (std::size_t j = i + 1; j < boxes.size(); ++j) {
      // Adjacent corridor/corner pairs share a face; interiors must stay
      // disjoint regardless.
      if (overlap(boxes[i], boxes[j])) {
        throw Error(errc::geometry, "glued field: channel cells overlap (indices " +
                                        std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
  for (const auto& d : impl.disks) {
    for (std::size_t j = 0; j < boxes.size(); ++j) {
      const auto& b = boxes[j];
      double cx = std::clamp(d.c.x, b.first.x, b.second.x);
      double cy = std::clamp(d.c.y, b.first.y, b.second.y);
      double dist = (Vec2{cx, cy} - d.c).norm();
      bool is_spoke = dist >= d.r_in - tol;
      if (!is_spoke) {
        throw Error(errc::geometry, "glued field: a channel cell reaches inside a disk");
      }
    }
  }
}

}  // namespace

GluedSpec GluedSpec::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  GluedSpec s;
  s.lambda = j.at("lambda").get<double>();
  s.rho = j.at("rho").get<double>();
  s.eps = j.value("eps", 0.0);
  s.sigma = j.value("sigma", 0.0);
  s.delta = j.value("delta", 0.0);
  if (j.contains("geometry")) {
    const auto& g = j["geometry"];
    s.disk_radius = g.value("disk_radius", s.disk_radius);
    s.channel_width = g.value("channel_width", s.channel_width);
    if (g.contains("centers")) {
      s.center_l = Vec2{g["centers"][0][0].get<double>(), g["centers"][0][1].get<double>()};
      s.center_r = Vec2{g["centers"][1][0].get<double>(), g["centers"][1][1].get<double>()};
    }
  }
  return s;
}

std::string GluedSpec::to_json() const {
  nlohmann::json j;
  j["lambda"] = lambda;
  j["rho"] = rho;
  j["eps"] = eps;
  j["sigma"] = sigma;
  j["delta"] = delta;
  j["geometry"]["disk_radius"] = disk_radius;
  j["geometry"]["channel_width"] = channel_width;
  j["geometry"]["centers"] = {{center_l.x, center_l.y}, {center_r.x, center_r.y}};
  return j.dump(2);
}

GluedGlasses::GluedGlasses(const GluedSpec& spec) : spec_(spec) {
  if (!(spec.lambda > 1.0)) throw Error(errc::domain, "glued field: lambda must exceed 1");
  if (!(spec.rho > 0.0 && spec.rho < 1.0)) {
    throw Error(errc::domain, "glued field: rho must lie in (0, 1)");
  }
  if (spec.center_l.y != spec.center_r.y || !(spec.center_r.x > spec.center_l.x)) {
    throw Error(errc::geometry, "glued field: centers must be horizontally aligned, L left of R");
  }
  double dx = spec.center_r.x - spec.center_l.x;
  double sc = dx / 4.0;  // template drawn at saddle distance 4
  double R = spec.disk_radius;
  double w_box = 0.5 * spec.channel_width;
  double w_flat = 0.5 * w_box;
  double hc = 1.0 * sc * 0.5;             // corner half-side
  double bb = 0.95 * (hc - w_box) / std::sqrt(2.0);
  double ramp = 0.7 * R;
  double blen = 0.3 * sc;  // bump length
  if (bb <= 0.0) throw Error(errc::geometry, "glued field: channel too wide for the corners");
  if (!(w_box < 0.6 * R)) {
    throw Error(errc::geometry, "glued field: channel width too large for the disk radius");
  }

  auto impl = std::make_shared<GluedImpl>();
  Vec2 L = spec.center_l, Rc = spec.center_r;
  Vec2 SRC = L + Vec2{0.0, 2.4 * sc};
  Vec2 SNK = Rc + Vec2{2.0 * sc, 0.0};

  DiskCell dl{L, Mat2{1.0, 0.0, 0.0, -spec.lambda}, R, 0.6 * R, {}, w_box, w_flat};
  DiskCell dr{Rc, Mat2{spec.rho, 0.0, 0.0, -1.0}, R, 0.6 * R, {}, w_box, w_flat};
  DiskCell dsrc{SRC, Mat2{0.8, 0.0, 0.0, 0.8}, R, 0.6 * R, {}, w_box, w_flat};
  DiskCell dsnk{SNK, Mat2{-0.8, 0.0, 0.0, -0.8}, R, 0.6 * R, {}, w_box, w_flat};
  dl.spokes = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
  dr.spokes = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
  dsrc.spokes = {{0, -1}};
  dsnk.spokes = {{-1, 0}};
  impl->disks = {dl, dr, dsrc, dsnk};
  const DiskCell* DL = &impl->disks[0];
  const DiskCell* DR = &impl->disks[1];
  const DiskCell* DS = &impl->disks[2];
  const DiskCell* DK = &impl->disks[3];

  auto corner = [&](Vec2 v, Vec2 cin, Vec2 cout) {
    impl->corners.push_back(CornerCell{v, cin, cout, hc, bb, w_box, w_flat});
  };
  auto corridor = [&](Vec2 a, Vec2 b, const DiskCell* ma, const DiskCell* mb) {
    CorridorCell c;
    c.a = a;
    c.b = b;
    c.t = (b - a).unit();
    c.n = c.t.perp();
    c.len = (b - a).norm();
    c.w_box = w_box;
    c.w_flat = w_flat;
    c.morph_a = ma;
    c.morph_b = mb;
    c.ramp = ramp;
    impl->corridors.push_back(c);
    return impl->corridors.size() - 1;
  };

  // Loop l around the lower-left block (corners A, B, C).
  Vec2 A = L + Vec2{-2 * sc, 0}, B = L + Vec2{-2 * sc, -2 * sc}, C = L + Vec2{0, -2 * sc};
  corridor(L + Vec2{-R, 0}, A + Vec2{hc, 0}, DL, nullptr);
  corner(A, {-1, 0}, {0, -1});
  corridor(A + Vec2{0, -hc}, B + Vec2{0, hc}, nullptr, nullptr);
  corner(B, {0, -1}, {1, 0});
  corridor(B + Vec2{hc, 0}, C + Vec2{-hc, 0}, nullptr, nullptr);
  corner(C, {1, 0}, {0, 1});
  std::size_t l_final = corridor(C + Vec2{0, hc}, L + Vec2{0, -R}, nullptr, DL);

  // Bridge b from L east over the top into R from above (corners E1-E3).
  Vec2 E1 = L + Vec2{1.4 * sc, 0}, E2 = L + Vec2{1.4 * sc, 2.2 * sc},
       E3 = Vec2{Rc.x, L.y + 2.2 * sc};
  corridor(L + Vec2{R, 0}, E1 + Vec2{-hc, 0}, DL, nullptr);
  corner(E1, {1, 0}, {0, 1});
  corridor(E1 + Vec2{0, hc}, E2 + Vec2{0, -hc}, nullptr, nullptr);
  corner(E2, {0, 1}, {1, 0});
  corridor(E2 + Vec2{hc, 0}, E3 + Vec2{-hc, 0}, nullptr, nullptr);
  corner(E3, {1, 0}, {0, -1});
  std::size_t b_final = corridor(E3 + Vec2{0, -hc}, Rc + Vec2{0, R}, nullptr, DR);

  // Loop r around the lower block between the saddles (corners F1-F3).
  Vec2 F1 = Rc + Vec2{-1.4 * sc, 0}, F2 = Rc + Vec2{-1.4 * sc, -2 * sc}, F3 = Rc + Vec2{0, -2 * sc};
  corridor(Rc + Vec2{-R, 0}, F1 + Vec2{hc, 0}, DR, nullptr);
  corner(F1, {-1, 0}, {0, -1});
  corridor(F1 + Vec2{0, -hc}, F2 + Vec2{0, hc}, nullptr, nullptr);
  corner(F2, {0, -1}, {1, 0});
  corridor(F2 + Vec2{hc, 0}, F3 + Vec2{-hc, 0}, nullptr, nullptr);
  corner(F3, {1, 0}, {0, 1});
  std::size_t r_final = corridor(F3 + Vec2{0, hc}, Rc + Vec2{0, -R}, nullptr, DR);

  // Source feed into L's upper stable branch; sink drain of R's east
  // unstable branch.
  corridor(SRC + Vec2{0, -R}, L + Vec2{0, R}, DS, DL);
  corridor(Rc + Vec2{R, 0}, SNK + Vec2{-R, 0}, DR, DK);

  // Offsets: a unit-integral lateral bump displaces the incoming wire by
  // exactly the offset before the measuring section.
  auto add_bump = [&](std::size_t idx, double offset) {
    CorridorCell& c = impl->corridors[idx];
    double free_lo = 0.05 * c.len;
    double free_hi = c.len - (c.morph_b ? ramp : 0.0) - 0.25 * sc;
    c.bump_len = blen;
    c.bump_pos = free_hi - blen;
    if (c.bump_pos < free_lo) {
      throw Error(errc::geometry, "glued field: no room for the offset bump");
    }
    // Displacement along the lateral unit n is amp * len; the sections
    // below turn that into a splitting equal to the offset.
    c.bump_amp = offset / blen;
  };
  // Sections sit between bump and disk ramp, oriented so the measured
  // splitting x(S) - x(U) equals the requested offset.
  auto place_section = [&](std::size_t idx) {
    const CorridorCell& c = impl->corridors[idx];
    double s_sec = c.len - ramp - 0.1 * sc;
    return Section{c.a + s_sec * c.t, Vec2{1.0, 0.0}, 0.9 * w_flat};
  };
  add_bump(l_final, spec.eps);
  add_bump(b_final, spec.sigma);
  add_bump(r_final, spec.delta);
  impl->sec_l = place_section(l_final);
  impl->sec_b = place_section(b_final);
  impl->sec_b.direction = Vec2{-1.0, 0.0};
  impl->sec_r = place_section(r_final);

  check_geometry(*impl);
  impl_ = impl;
}

PlanarField GluedGlasses::field() const {
  auto impl = impl_;
  return PlanarField(
      [impl](Vec2 p, const std::vector<double>&) { return impl->eval(p); },
      [impl](Vec2 p, const std::vector<double>&) { return impl->jac(p); }, {});
}

Vec2 GluedGlasses::saddle_l() const { return spec_.center_l; }
Vec2 GluedGlasses::saddle_r() const { return spec_.center_r; }
Section GluedGlasses::section_l() const { return impl_->sec_l; }
Section GluedGlasses::section_b() const { return impl_->sec_b; }
Section GluedGlasses::section_r() const { return impl_->sec_r; }

SplittingAnchors GluedGlasses::anchors_l(const Saddle& L) const {
  return SplittingAnchors{L, Branch::unstable_minus, L, Branch::stable_minus};
}
SplittingAnchors GluedGlasses::anchors_b(const Saddle& L, const Saddle& R) const {
  return SplittingAnchors{L, Branch::unstable_plus, R, Branch::stable_plus};
}
SplittingAnchors GluedGlasses::anchors_r(const Saddle& R) const {
  return SplittingAnchors{R, Branch::unstable_minus, R, Branch::stable_minus};
}

GluedCheckReport glued_check(const GluedSpec& spec) {
  GluedGlasses g(spec);
  PlanarField f = g.field();
  Saddle L = find_saddle(f, g.saddle_l() + Vec2{1e-3, 1e-3});
  Saddle R = find_saddle(f, g.saddle_r() + Vec2{1e-3, 1e-3});

  GluedCheckReport rep;
  rep.eig_err_l = std::max(std::abs(L.mu_unstable - 1.0), std::abs(L.mu_stable + spec.lambda));
  rep.eig_err_r = std::max(std::abs(R.mu_unstable - spec.rho), std::abs(R.mu_stable + 1.0));
  TraceOptions topts;
  topts.t_max = 400.0;
  rep.eps_measured = splitting(f, g.anchors_l(L), g.section_l(), topts);
  rep.sigma_measured = splitting(f, g.anchors_b(L, R), g.section_b(), topts);
  rep.delta_measured = splitting(f, g.anchors_r(R), g.section_r(), topts);
  return rep;
}

}  // namespace pcy::flow
