#include "cczsim/couplings.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <iomanip>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace ccz {

std::string to_string(ZetaMethod m) {
  switch (m) {
    case ZetaMethod::order2: return "order2";
    case ZetaMethod::order3: return "order3";
    case ZetaMethod::order4: return "order4";
    case ZetaMethod::perturbative_sum: return "perturbative_sum";
    case ZetaMethod::exact: return "exact";
  }
  return "?";
}

namespace {

// Linear-frequency parameters (MHz) entering the perturbative formulas.
struct Params {
  double w1, w2, w3, wc1, wc2;
  double a1, a2, a3, ac1, ac2;
  double g12, g23, g13, g1c1, g2c1, g2c2, g3c2;

  double d12() const { return w1 - w2; }
  double d23() const { return w2 - w3; }
  double d13() const { return w1 - w3; }
  double d1c1() const { return w1 - wc1; }
  double d2c1() const { return w2 - wc1; }
  double d2c2() const { return w2 - wc2; }
  double d3c2() const { return w3 - wc2; }
};

Params params_of(const DeviceModel& d) {
  auto f = [&](Site s) { return d.transmon(s).frequency_ghz * 1e3; };
  auto a = [&](Site s) { return d.transmon(s).anharmonicity_mhz; };
  const auto& g = d.couplings();
  return Params{f(Site::Q1), f(Site::Q2), f(Site::Q3), f(Site::C1), f(Site::C2),
                a(Site::Q1), a(Site::Q2), a(Site::Q3), a(Site::C1), a(Site::C2),
                g.g(Site::Q1, Site::Q2), g.g(Site::Q2, Site::Q3), g.g(Site::Q1, Site::Q3),
                g.g(Site::Q1, Site::C1), g.g(Site::Q2, Site::C1), g.g(Site::Q2, Site::C2),
                g.g(Site::Q3, Site::C2)};
}

double inv(double x, const char* name) {
  if (std::abs(x) < 1e-9) throw ResonanceError(std::string("vanishing denominator ") + name);
  return 1.0 / x;
}

CouplingReport make_report(const DeviceModel& d, double z12, double z23, double z13, double z123, ZetaMethod m) {
  CouplingReport r;
  r.omega_c1_ghz = d.transmon(Site::C1).frequency_ghz;
  r.omega_c2_ghz = d.transmon(Site::C2).frequency_ghz;
  r.zeta12 = z12;
  r.zeta23 = z23;
  r.zeta13 = z13;
  r.zeta123_total = z123;
  r.zeta_zzz_irreducible = z123 - z12 - z23 - z13;
  r.method = m;
  return r;
}

// 4 g g g (1/(D_x (D_pair - a_hi)) - 1/(D_y (D_pair + a_lo)) + 1/(D_x D_y)), the
// coupler-mediated third-order term shared by the pair and total expressions.
double coupler_triple(double gqq, double gx, double gy, double dx, double dy, double dpair, double a_hi,
                      double a_lo, const char* tag) {
  if (gqq == 0.0 || gx == 0.0 || gy == 0.0) return 0.0;
  return 4.0 * gqq * gx * gy *
         (inv(dx * (dpair - a_hi), tag) - inv(dy * (dpair + a_lo), tag) + inv(dx * dy, tag));
}

// Same-coupler fourth-order block (both qubits through one coupler).
double same_coupler_block(double gx, double gy, double dx, double dy, double dpair, double a_upper, double a_lower,
                          double ac, const char* tag) {
  if (gx == 0.0 || gy == 0.0) return 0.0;
  const double s = inv(dx, tag) + inv(dy, tag);
  const double two_photon = inv(dx + dy - ac, "two-photon coupler denominator");
  return gx * gx * gy * gy *
         (s * s * 2.0 * two_photon + 2.0 * inv(dx * dx * (dpair - a_upper), tag) -
          2.0 * inv(dy * dy * (dpair + a_lower), tag) + (inv(dy, tag) - inv(dpair, tag)) * inv(dx * dx, tag) +
          (inv(dx, tag) + inv(dpair, tag)) * inv(dy * dy, tag));
}

// Cross-coupler fourth-order block.
double cross_block(double gx, double gy, double dx, double dy, const char* tag) {
  if (gx == 0.0 || gy == 0.0) return 0.0;
  const double s = inv(dx, tag) + inv(dy, tag);
  return gx * gx * gy * gy *
         (inv(dx + dy, tag) * s * s + inv(dx * dy * dy, tag) + inv(dx * dx * dy, tag));
}

}  // namespace

CouplingReport zeta_order2(const DeviceModel& device) {
  const auto p = params_of(device);
  auto pair = [](double g, double d, double a_hi, double a_lo, const char* tag) {
    if (g == 0.0) return 0.0;
    return 2.0 * g * g * (inv(d - a_hi, tag) - inv(d + a_lo, tag));
  };
  const double z12 = pair(p.g12, p.d12(), p.a2, p.a1, "Delta12 -/+ alpha");
  const double z23 = pair(p.g23, p.d23(), p.a3, p.a2, "Delta23 -/+ alpha");
  const double z13 = pair(p.g13, p.d13(), p.a3, p.a1, "Delta13 -/+ alpha");
  auto r = make_report(device, z12, z23, z13, z12 + z23 + z13, ZetaMethod::order2);
  return r;
}

CouplingReport zeta_order3(const DeviceModel& device) {
  const auto p = params_of(device);
  const double d12 = p.d12(), d23 = p.d23(), d13 = p.d13();
  const double ggg = p.g12 * p.g13 * p.g23;

  double z12 = 0, z23 = 0, z13 = 0, z123 = 0;
  if (ggg != 0.0) {
    z12 += 4.0 * ggg * (inv(d13 * (d12 - p.a2), "z12^3") - inv(d23 * (d12 + p.a1), "z12^3")) +
           2.0 * ggg * inv(d13 * d23, "z12^3");
    z23 += 4.0 * ggg * (inv(d13 * (d23 + p.a2), "z23^3") - inv(d12 * (d23 - p.a3), "z23^3")) +
           2.0 * ggg * inv(d12 * d13, "z23^3");
    z13 += 4.0 * ggg *
           (inv(d23 * (d13 + p.a1), "z13^3") + inv(d12 * (d13 - p.a3), "z13^3") - inv(d12 * d23, "z13^3"));
    z123 += 4.0 * ggg *
            (inv((d12 + p.a1) * (d13 + p.a1), "z123^3") + inv((d13 - p.a3) * (d23 - p.a3), "z123^3") -
             inv((d12 - p.a2) * (d23 + p.a2), "z123^3") + 2.0 * inv((d13 + p.a1) * (d23 + p.a2), "z123^3") +
             2.0 * inv((d12 - p.a2) * (d13 - p.a3), "z123^3") - 2.0 * inv((d12 + p.a1) * (d23 - p.a3), "z123^3"));
  }
  const double c1 = coupler_triple(p.g12, p.g1c1, p.g2c1, p.d1c1(), p.d2c1(), d12, p.a2, p.a1, "c1 triple");
  const double c2 = coupler_triple(p.g23, p.g2c2, p.g3c2, p.d2c2(), p.d3c2(), d23, p.a3, p.a2, "c2 triple");
  z12 += c1;
  z23 += c2;
  z123 += c1 + c2;
  return make_report(device, z12, z23, z13, z123, ZetaMethod::order3);
}

CouplingReport zeta_order4(const DeviceModel& device, Order4Variant variant) {
  const auto p = params_of(device);
  const double a23_second = variant == Order4Variant::as_printed ? p.a3 : p.a2;

  const double same12 =
      same_coupler_block(p.g1c1, p.g2c1, p.d1c1(), p.d2c1(), p.d12(), p.a2, p.a1, p.ac1, "z12^4 c1");
  const double same23 =
      same_coupler_block(p.g2c2, p.g3c2, p.d2c2(), p.d3c2(), p.d23(), p.a3, a23_second, p.ac2, "z23^4 c2");
  const double cross12 = cross_block(p.g1c1, p.g2c2, p.d1c1(), p.d2c2(), "z12^4 cross");
  const double cross23 = cross_block(p.g2c1, p.g3c2, p.d2c1(), p.d3c2(), "z23^4 cross");
  const double cross13 = cross_block(p.g1c1, p.g3c2, p.d1c1(), p.d3c2(), "z13^4 cross");

  const double z12 = same12 + cross12;
  const double z23 = same23 + cross23;
  const double z13 = cross13;
  const double z123 = same12 + cross12 + same23 + cross23 + cross13;
  return make_report(device, z12, z23, z13, z123, ZetaMethod::order4);
}

CouplingReport zeta_perturbative(const DeviceModel& device, double omega_c1_ghz, double omega_c2_ghz,
                                 Order4Variant variant) {
  const auto d = device.with_couplers(omega_c1_ghz, omega_c2_ghz);
  const auto r2 = zeta_order2(d);
  const auto r3 = zeta_order3(d);
  const auto r4 = zeta_order4(d, variant);
  return make_report(d, r2.zeta12 + r3.zeta12 + r4.zeta12, r2.zeta23 + r3.zeta23 + r4.zeta23,
                     r2.zeta13 + r3.zeta13 + r4.zeta13, r2.zeta123_total + r3.zeta123_total + r4.zeta123_total,
                     ZetaMethod::perturbative_sum);
}

CouplingReport zeta_exact(const DeviceModel& device, double omega_c1_ghz, double omega_c2_ghz,
                          const ExactOptions& opts) {
  const auto d = device.with_couplers(omega_c1_ghz, omega_c2_ghz);
  // RWA conserves excitation number, so the <=3-excitation block is exact there.
  FockSpace space = opts.frame == Frame::rwa ? FockSpace(d, 3) : FockSpace(d);
  CMat h = CMat(interaction_sparse(d, space, opts.frame));
  h.diagonal() += bare_diagonal(d, space).cast<cplx>();
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  const RVec& evals = es.eigenvalues();
  const CMat& evecs = es.eigenvectors();

  // Dressed energy (MHz) of the bare label |q1 q2 q3>, couplers in ground.
  auto dressed = [&](int q1, int q2, int q3) {
    const long idx = space.computational_index(q1, q2, q3);
    Eigen::Index best = 0;
    const double overlap = evecs.row(idx).cwiseAbs2().maxCoeff(&best);
    if (overlap < opts.overlap_floor) {
      std::ostringstream os;
      os << "ambiguous dressed state for |" << q1 << q2 << q3 << "> (max overlap " << overlap << ")";
      throw AssignmentAmbiguity(os.str());
    }
    return angular_to_mhz(evals(best));
  };
  const double e000 = dressed(0, 0, 0);
  const double e100 = dressed(1, 0, 0), e010 = dressed(0, 1, 0), e001 = dressed(0, 0, 1);
  const double e110 = dressed(1, 1, 0), e011 = dressed(0, 1, 1), e101 = dressed(1, 0, 1);
  const double e111 = dressed(1, 1, 1);
  return make_report(d, e110 - e100 - e010 + e000, e011 - e010 - e001 + e000, e101 - e100 - e001 + e000,
                     e111 - e100 - e010 - e001 + 2.0 * e000, ZetaMethod::exact);
}

std::vector<double> CouplerGrid::linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  return v;
}

std::vector<CouplingReport> sweep_couplings(const DeviceModel& device, const CouplerGrid& grid, SweepMethod method,
                                            const ExactOptions& opts, int jobs) {
  if (grid.size() == 0) throw InvalidArgument("empty coupler grid");
  const std::size_t n2 = grid.omega_c2_ghz.size();
  std::vector<CouplingReport> out(grid.size());
  auto eval = [&](std::size_t k) {
    const double c1 = grid.omega_c1_ghz[k / n2];
    const double c2 = grid.omega_c2_ghz[k % n2];
    try {
      out[k] = method == SweepMethod::exact ? zeta_exact(device, c1, c2, opts) : zeta_perturbative(device, c1, c2);
    } catch (const Error& e) {
      CouplingReport r;
      r.omega_c1_ghz = c1;
      r.omega_c2_ghz = c2;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      r.zeta12 = r.zeta23 = r.zeta13 = r.zeta123_total = r.zeta_zzz_irreducible = nan;
      r.method = method == SweepMethod::exact ? ZetaMethod::exact : ZetaMethod::perturbative_sum;
      r.flag = e.what();
      out[k] = r;
    }
  };
  const int workers = std::max(1, jobs);
  std::vector<std::future<void>> futs;
  for (int w = 0; w < workers; ++w) {
    futs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t k = w; k < out.size(); k += workers) eval(k);
    }));
  }
  for (auto& f : futs) f.get();
  return out;
}

std::string sweep_to_csv(const std::vector<CouplingReport>& reports) {
  std::ostringstream os;
  os << std::setprecision(15);
  os << "omega_c1_ghz,omega_c2_ghz,zeta12_mhz,zeta23_mhz,zeta13_mhz,zeta123_total_mhz,zeta_zzz_mhz,flag\n";
  for (const auto& r : reports) {
    std::string flag = r.flag;
    std::replace(flag.begin(), flag.end(), ',', ';');
    os << r.omega_c1_ghz << ',' << r.omega_c2_ghz << ',' << r.zeta12 << ',' << r.zeta23 << ',' << r.zeta13 << ','
       << r.zeta123_total << ',' << r.zeta_zzz_irreducible << ',' << flag << '\n';
  }
  return os.str();
}

std::vector<ContourSegment> zero_contour(const std::vector<double>& c1, const std::vector<double>& c2,
                                         const std::vector<double>& values) {
  const std::size_t n1 = c1.size(), n2 = c2.size();
  if (values.size() != n1 * n2) throw DimensionMismatch("contour values do not match grid");
  auto v = [&](std::size_t i, std::size_t j) { return values[i * n2 + j]; };
  struct Pt {
    double x, y;
  };
  // Crossing on the edge between two samples, if the sign changes.
  auto crossing = [](double xa, double ya, double va, double xb, double yb, double vb, Pt& out) {
    if (!std::isfinite(va) || !std::isfinite(vb)) return false;
    if ((va > 0) == (vb > 0)) return false;
    const double t = va / (va - vb);
    out = {xa + t * (xb - xa), ya + t * (yb - ya)};
    return true;
  };
  std::vector<ContourSegment> segs;
  for (std::size_t i = 0; i + 1 < n1; ++i) {
    for (std::size_t j = 0; j + 1 < n2; ++j) {
      std::vector<Pt> pts;
      Pt p{};
      if (crossing(c1[i], c2[j], v(i, j), c1[i + 1], c2[j], v(i + 1, j), p)) pts.push_back(p);
      if (crossing(c1[i + 1], c2[j], v(i + 1, j), c1[i + 1], c2[j + 1], v(i + 1, j + 1), p)) pts.push_back(p);
      if (crossing(c1[i + 1], c2[j + 1], v(i + 1, j + 1), c1[i], c2[j + 1], v(i, j + 1), p)) pts.push_back(p);
      if (crossing(c1[i], c2[j + 1], v(i, j + 1), c1[i], c2[j], v(i, j), p)) pts.push_back(p);
      for (std::size_t k = 0; k + 1 < pts.size(); k += 2)
        segs.push_back({pts[k].x, pts[k].y, pts[k + 1].x, pts[k + 1].y});
    }
  }
  return segs;
}

std::vector<ContourSegment> zero_contour(const CouplerGrid& grid, const std::vector<CouplingReport>& sweep,
                                         ZetaComponent which) {
  std::vector<double> vals(sweep.size());
  for (std::size_t k = 0; k < sweep.size(); ++k) {
    const auto& r = sweep[k];
    switch (which) {
      case ZetaComponent::z12: vals[k] = r.zeta12; break;
      case ZetaComponent::z23: vals[k] = r.zeta23; break;
      case ZetaComponent::z13: vals[k] = r.zeta13; break;
      case ZetaComponent::z123_total: vals[k] = r.zeta123_total; break;
    }
  }
  return zero_contour(grid.omega_c1_ghz, grid.omega_c2_ghz, vals);
}

namespace {

// Bracketed root of f on [lo, hi] by a coarse scan followed by bisection.
double scan_root(const std::function<double(double)>& f, double lo, double hi, const char* what) {
  const int n = 60;
  double xa = lo, fa = f(lo);
  for (int i = 1; i <= n; ++i) {
    const double xb = lo + (hi - lo) * i / n;
    const double fb = f(xb);
    if (std::isfinite(fa) && std::isfinite(fb) && (fa > 0) != (fb > 0)) {
      double a = xa, b = xb, fa_ = fa;
      for (int it = 0; it < 60 && b - a > 1e-10; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fm > 0) == (fa_ > 0)) {
          a = m;
          fa_ = fm;
        } else {
          b = m;
        }
      }
      return 0.5 * (a + b);
    }
    xa = xb;
    fa = fb;
  }
  throw NoOperatingPoint(std::string("no zero crossing of ") + what + " in coupler range");
}

}  // namespace

IdlePoint find_idle_point(const DeviceModel& device, const ExactOptions& opts, double lo_ghz, double hi_ghz) {
  double c1 = device.transmon(Site::C1).frequency_ghz;
  double c2 = device.transmon(Site::C2).frequency_ghz;
  auto safe = [&](double a, double b, bool first) {
    try {
      const auto r = zeta_exact(device, a, b, opts);
      return first ? r.zeta12 : r.zeta23;
    } catch (const AssignmentAmbiguity&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  // zeta12 is set mainly by c1 and zeta23 by c2; alternate until both settle.
  for (int sweep = 0; sweep < 6; ++sweep) {
    const double n1 = scan_root([&](double x) { return safe(x, c2, true); }, lo_ghz, hi_ghz, "zeta12");
    const double n2 = scan_root([&](double x) { return safe(n1, x, false); }, lo_ghz, hi_ghz, "zeta23");
    const bool done = std::abs(n1 - c1) < 1e-9 && std::abs(n2 - c2) < 1e-9;
    c1 = n1;
    c2 = n2;
    if (done) break;
  }
  return IdlePoint{c1, c2, zeta_exact(device, c1, c2, opts)};
}

}  // namespace ccz
