#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "ncvem/ncvem.hpp"
#include "oracles.hpp"

using namespace ncvem;

namespace {

constexpr double kPi = std::numbers::pi;

// Closed forms written out independently of the jet-based problem definitions.
double u1(double x, double y) { return x * x * y + std::sin(2 * kPi * x) * std::sin(2 * kPi * y) + 2.0; }
double u2(double x, double y) {
  const double g1 = std::sin(kPi * x) / 20, g2 = 1 + std::sin(3 * kPi * x) / 20;
  return -(y - g1) * (y - g2) * x * (1 - x) * (3 + std::sin(5 * x) * std::sin(7 * y));
}
double w3(double x, double y) {
  return x * (1 - x) * (y - std::sin(3 * kPi * x) / 20) * (3 + std::sin(5 * x) * std::sin(7 * y));
}

using Scalar = std::function<double(double, double)>;

// -div(s a1 grad u) + div(b1 u) + c1 u by nested central differences.
double fd_load(const Scalar& u, double s, double x, double y) {
  const double h = 1e-5;
  const auto flux = [&](double px, double py) {
    const double ux = (u(px + h, py) - u(px - h, py)) / (2 * h);
    const double uy = (u(px, py + h) - u(px, py - h)) / (2 * h);
    return std::array<double, 2>{s * ((py * py + 1) * ux - px * py * uy), s * (-px * py * ux + (px * px + 1) * uy)};
  };
  const double div_flux = (flux(x + h, y)[0] - flux(x - h, y)[0]) / (2 * h) +
                          (flux(x, y + h)[1] - flux(x, y - h)[1]) / (2 * h);
  const auto bu = [&](double px, double py) { return std::array<double, 2>{px * u(px, py), py * u(px, py)}; };
  const double div_bu = (bu(x + h, y)[0] - bu(x - h, y)[0]) / (2 * h) + (bu(x, y + h)[1] - bu(x, y - h)[1]) / (2 * h);
  return -div_flux + div_bu + (x * x + y * y * y) * u(x, y);
}

void check_load(const ManufacturedProblem& p, const Scalar& u, double s, int region, double x, double y) {
  const Point q(x, y);
  const ExactSolution ex = p.exact();
  EXPECT_NEAR(ex.u(q, region), u(x, y), 1e-14);
  const double h = 1e-6;
  EXPECT_NEAR(ex.grad_u(q, region).x(), (u(x + h, y) - u(x - h, y)) / (2 * h), 1e-7);
  EXPECT_NEAR(ex.grad_u(q, region).y(), (u(x, y + h) - u(x, y - h)) / (2 * h), 1e-7);
  const double f = ex.f(q, region);
  EXPECT_NEAR(f, fd_load(u, s, x, y), 1e-4 * std::max(1.0, std::abs(f))) << "at (" << x << ", " << y << ")";
}

ConvergenceRecord synthetic_record(const std::vector<double>& h, double c1, double p1, double c0, double p0) {
  ConvergenceRecord r;
  r.options.k = 2;
  for (std::size_t i = 0; i < h.size(); ++i) {
    LevelResult l;
    l.n = 4 << i;
    l.h = h[i];
    l.n_dof = 10 * static_cast<int>(i + 1);
    l.e_h1 = c1 * std::pow(h[i], p1);
    l.e_l2 = c0 * std::pow(h[i], p0);
    r.levels.push_back(l);
  }
  return r;
}

// Tag balance of an XML document without attributes containing '>'.
bool balanced_xml(const std::string& s) {
  std::vector<std::string> stack;
  std::size_t pos = 0;
  while ((pos = s.find('<', pos)) != std::string::npos) {
    const std::size_t end = s.find('>', pos);
    if (end == std::string::npos) return false;
    std::string tag = s.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.empty() || tag[0] == '?' || tag[0] == '!') continue;
    if (tag.back() == '/') continue;
    if (tag[0] == '/') {
      const std::string name = tag.substr(1);
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
      continue;
    }
    stack.push_back(tag.substr(0, tag.find_first_of(" \t\n")));
  }
  return stack.empty();
}

}  // namespace

TEST(Manufactured, CaseOneLoadMatchesFiniteDifferences) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(0.05, 0.95);
  const ManufacturedProblem p = problems::case1();
  for (int i = 0; i < 100; ++i) check_load(p, u1, 1.0, 1, d(rng), d(rng));
}

TEST(Manufactured, CaseTwoLoadMatchesFiniteDifferences) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> d(0.05, 0.95);
  const ManufacturedProblem p = problems::case2();
  for (int i = 0; i < 100; ++i) check_load(p, u2, 1.0, 1, d(rng), d(rng));
}

TEST(Manufactured, CaseTwoVanishesOnCurvedBoundary) {
  const ExactSolution ex = problems::case2().exact();
  for (double x = 0.0; x <= 1.0; x += 0.05) {
    EXPECT_NEAR(ex.u({x, std::sin(kPi * x) / 20}, 1), 0.0, 1e-15);
    EXPECT_NEAR(ex.u({x, 1 + std::sin(3 * kPi * x) / 20}, 1), 0.0, 1e-15);
  }
}

TEST(Manufactured, CaseThreeLoadMatchesFiniteDifferences) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> dx(0.05, 0.95), dy(-0.45, 0.45);
  const double k1 = 2.0, k2 = 5.0;
  const ManufacturedProblem p = problems::case3(k1, k2);
  int done = 0;
  while (done < 100) {
    const double x = dx(rng), y = dy(rng);
    const double g = std::sin(3 * kPi * x) / 20;
    if (std::abs(y - g) < 1e-3) continue;
    const int region = y < g ? 1 : 2;
    const double kappa = region == 1 ? k1 : k2;
    check_load(p, [kappa](double a, double b) { return w3(a, b) / kappa; }, kappa, region, x, y);
    ++done;
  }
}

TEST(Manufactured, CaseThreeFluxContinuousAcrossInterface) {
  const ManufacturedProblem p = problems::case3(1.0, 1e5);
  const ExactSolution ex = p.exact();
  const CoefficientField c = p.coefficients();
  for (double x = 0.1; x < 1.0; x += 0.1) {
    const double g = std::sin(3 * kPi * x) / 20, dg = 3 * kPi * std::cos(3 * kPi * x) / 20;
    const Point q(x, g);
    const Point n = Point(-dg, 1.0).normalized();
    EXPECT_NEAR(ex.u(q, 1), 0.0, 1e-15);
    EXPECT_NEAR(ex.u(q, 2), 0.0, 1e-15);
    const double f1 = (c.a(q, 1) * ex.grad_u(q, 1)).dot(n);
    const double f2 = (c.a(q, 2) * ex.grad_u(q, 2)).dot(n);
    EXPECT_NEAR(f1, f2, 1e-12 * std::max(1.0, std::abs(f1)));
  }
}

TEST(Manufactured, CaseThreeRejectsNonPositiveKappa) {
  EXPECT_THROW(problems::case3(0.0, 1.0), Error);
  EXPECT_THROW(problems::case3(1.0, -2.0), Error);
}

TEST(Slopes, ExactPowerLaw) {
  const std::vector<double> h{0.25, 0.125, 0.0625, 0.03125};
  const ConvergenceRecord r = synthetic_record(h, 3.0, 2.0, 0.5, 3.0);
  EXPECT_NEAR(slope_h1(r), 2.0, 1e-9);
  EXPECT_NEAR(slope_l2(r), 3.0, 1e-9);
  EXPECT_TRUE(rates_ok(r));
}

TEST(Slopes, FitUsesLastThreeLevels) {
  std::vector<double> h{0.5, 0.25, 0.125, 0.0625};
  std::vector<double> e{1.0, 0.25 * 0.25, 0.125 * 0.125, 0.0625 * 0.0625};
  EXPECT_NEAR(fitted_slope(h, e), 2.0, 1e-12);
  EXPECT_TRUE(std::isnan(fitted_slope({0.1}, {0.2})));
}

TEST(Slopes, BracketsFromOrder) {
  for (int k = 1; k <= 4; ++k) {
    const RateBrackets b = rate_brackets(k);
    EXPECT_DOUBLE_EQ(b.h1_lo, k - 0.2);
    EXPECT_DOUBLE_EQ(b.h1_hi, k + 0.5);
    EXPECT_DOUBLE_EQ(b.l2_lo, k + 0.75);
    EXPECT_DOUBLE_EQ(b.l2_hi, k + 1.5);
  }
  const std::vector<double> h{0.25, 0.125, 0.0625};
  EXPECT_FALSE(rates_ok(synthetic_record(h, 1.0, 1.7, 1.0, 3.0)));
  EXPECT_FALSE(rates_ok(synthetic_record(h, 1.0, 2.0, 1.0, 3.6)));
}

TEST(Report, SingleLevelCsv) {
  const ConvergenceRecord r = synthetic_record({0.25}, 1.0, 1.0, 1.0, 2.0);
  const std::string csv = record_csv(r);
  std::istringstream in(csv);
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "level,h,N_dof,E_H1,E_L2,slope_H1,slope_L2");
  EXPECT_FALSE(std::getline(in, extra) && !extra.empty());
  EXPECT_EQ(row.substr(row.size() - 2), ",,");
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 6);
}

TEST(Report, CsvLocalSlopes) {
  const ConvergenceRecord r = synthetic_record({0.2, 0.1, 0.05}, 1.0, 2.0, 1.0, 3.0);
  std::istringstream in(record_csv(r));
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::getline(in, line);
  EXPECT_NE(line.find(",2.0000,3.0000"), std::string::npos) << line;
}

TEST(Report, SvgWellFormed) {
  for (std::size_t n : {1u, 4u}) {
    std::vector<double> h;
    for (std::size_t i = 0; i < n; ++i) h.push_back(0.25 / (1 << i));
    const std::string svg = record_svg(synthetic_record(h, 1.0, 2.0, 0.1, 3.0));
    EXPECT_NE(svg.find("<svg"), std::string::npos);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    EXPECT_TRUE(balanced_xml(svg));
  }
}

TEST(Report, UnwritableDirectory) {
  const ConvergenceRecord r = synthetic_record({0.25, 0.125}, 1.0, 1.0, 1.0, 2.0);
  try {
    report(r, "/proc/ncvem/out");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IoError);
  }
  EXPECT_THROW(report(ConvergenceRecord{}, "/tmp"), Error);
}

TEST(Errors, InterpolantOfPolynomialHasNoError) {
  const Mesh m = generate_jittered_voronoi_mesh(5, 0.6, 10, 2);
  for (int k = 1; k <= 4; ++k) {
    const Discretization disc(m, k);
    const ExactSolution u = problems::patch(k).exact();
    Vector dofs = Vector::Zero(disc.dofs.size());
    for (const auto& el : disc.elements) {
      const auto glob = disc.dofs.local_to_global(m, el.cell_index());
      const Vector local = oracle::dofs_of(m, el, [&](const Point& p) { return u.u(p, 1); });
      for (std::size_t i = 0; i < glob.size(); ++i) dofs[glob[i]] = local[static_cast<Eigen::Index>(i)];
    }
    const ErrorNorms e = compute_errors(disc, dofs, u);
    EXPECT_LT(e.h1, 1e-11);
    EXPECT_LT(e.l2, 1e-11);
  }
}

TEST(Errors, ShiftedSolutionGivesKnownL2Error) {
  // u_h = u + 1 for polynomial u: the L2 error is |Omega|^(1/2) / ||u||.
  const Mesh m = generate_square_quad_mesh(3);
  const Discretization disc(m, 2);
  const ExactSolution u = problems::patch(2).exact();
  Vector dofs = Vector::Zero(disc.dofs.size());
  for (const auto& el : disc.elements) {
    const auto glob = disc.dofs.local_to_global(m, el.cell_index());
    const Vector local = oracle::dofs_of(m, el, [&](const Point& p) { return u.u(p, 1) + 1.0; });
    for (std::size_t i = 0; i < glob.size(); ++i) dofs[glob[i]] = local[static_cast<Eigen::Index>(i)];
  }
  double norm2 = 0.0;
  for (const Cell& c : m.cells)
    norm2 += oracle::cell_integral(m, c, [&](const Point& p) { return std::pow(u.u(p, 1), 2); });
  const ErrorNorms e = compute_errors(disc, dofs, u);
  EXPECT_NEAR(e.l2, 1.0 / std::sqrt(norm2), 1e-12);
  EXPECT_LT(e.h1, 1e-12);
}

TEST(Convergence, CaseOneLinearHalvesError) {
  CaseOptions opt;
  opt.k = 1;
  opt.levels = 2;
  opt.n0 = 8;
  const ConvergenceRecord r = run_case(opt);
  ASSERT_EQ(r.levels.size(), 2u);
  const double ratio = r.levels[0].e_h1 / r.levels[1].e_h1;
  EXPECT_GE(ratio, 1.7);
  EXPECT_LE(ratio, 2.3);
  EXPECT_EQ(r.levels[1].n, 16);
}

TEST(Convergence, KappaScalesDiffusion) {
  const Mesh m = generate_interface_mesh(4, sine_graph(3));
  const double s = 7.5;
  for (int k = 1; k <= 3; ++k) {
    const Discretization disc(m, k);
    CoefficientField base = problems::case3(1.0, 1e5).coefficients();
    CoefficientField scaled = problems::case3(s, s * 1e5).coefficients();
    for (auto* c : {&base, &scaled}) {
      c->b = [](const Point&, int) { return Point(0.0, 0.0); };
      c->c = [](const Point&, int) { return 0.0; };
    }
    for (const auto& el : disc.elements) {
      const int region = m.region_of_cell[static_cast<std::size_t>(el.cell_index())];
      const Matrix a = assemble_local(el, base, region).consistency;
      const Matrix b = assemble_local(el, scaled, region).consistency;
      EXPECT_LE((b - s * a).cwiseAbs().maxCoeff(), 1e-12 * (s * a).cwiseAbs().maxCoeff());
    }
  }
}

TEST(Convergence, PatchTestPasses) {
  for (MeshFamily f : {MeshFamily::Quad, MeshFamily::Voronoi, MeshFamily::Concave})
    for (int k = 1; k <= 4; ++k) {
      const LevelResult r = patch_test(f, k);
      EXPECT_TRUE(patch_ok(r)) << to_string(f) << " k=" << k << " " << r.e_h1 << " " << r.e_l2;
    }
}

TEST(Convergence, InvalidOptions) {
  CaseOptions opt;
  opt.k = 5;
  EXPECT_THROW(run_case(opt), Error);
  opt.k = 1;
  opt.levels = 0;
  EXPECT_THROW(run_case(opt), Error);
  EXPECT_THROW(patch_test(MeshFamily::Quad, 0), Error);
}

TEST(Families, ParseNames) {
  EXPECT_EQ(mesh_family_from_string("quad"), MeshFamily::Quad);
  EXPECT_EQ(mesh_family_from_string("voronoi"), MeshFamily::Voronoi);
  EXPECT_EQ(mesh_family_from_string("concave"), MeshFamily::Concave);
  EXPECT_THROW(mesh_family_from_string("hex"), Error);
  for (MeshFamily f : {MeshFamily::Quad, MeshFamily::Voronoi, MeshFamily::Concave})
    EXPECT_EQ(mesh_family_from_string(to_string(f)), f);
}
