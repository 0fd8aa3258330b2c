#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "ncvem/assembly.hpp"
#include "ncvem/errors.hpp"
#include "ncvem/mesh_generators.hpp"
#include "ncvem/problems.hpp"

namespace ncvem {

struct ErrorNorms {
  double h1 = 0.0;  // relative broken H1 seminorm error
  double l2 = 0.0;  // relative L2 error
};

/// Relative errors of the order-k L2 projection of u_h against the exact solution.
inline ErrorNorms compute_errors(const Discretization& disc, const Vector& dofs, const ExactSolution& exact) {
  const Mesh& mesh = *disc.mesh;
  double err_h1 = 0.0, err_l2 = 0.0, norm_h1 = 0.0, norm_l2 = 0.0;
  for (const auto& el : disc.elements) {
    const int region = mesh.region_of_cell[static_cast<std::size_t>(el.cell_index())];
    const auto glob = disc.dofs.local_to_global(mesh, el.cell_index());
    Vector local(static_cast<Eigen::Index>(glob.size()));
    for (std::size_t i = 0; i < glob.size(); ++i) local[static_cast<Eigen::Index>(i)] = dofs[glob[i]];
    const Vector coeff = el.l2_projector() * local;
    for (const auto& node : el.rule().nodes) {
      const double u = exact.u(node.point, region);
      const Point gu = exact.grad_u(node.point, region);
      const double uh = el.basis().eval(node.point).dot(coeff);
      const Point guh = el.basis().grad(node.point).transpose() * coeff;
      err_l2 += node.weight * (u - uh) * (u - uh);
      err_h1 += node.weight * (gu - guh).squaredNorm();
      norm_l2 += node.weight * u * u;
      norm_h1 += node.weight * gu.squaredNorm();
    }
  }
  return {std::sqrt(err_h1 / (norm_h1 + norm_l2)), std::sqrt(err_l2 / norm_l2)};
}

enum class MeshFamily { Quad, Voronoi, Concave };

inline const char* to_string(MeshFamily f) {
  switch (f) {
    case MeshFamily::Quad: return "quad";
    case MeshFamily::Voronoi: return "voronoi";
    case MeshFamily::Concave: return "concave";
  }
  return "quad";
}

inline MeshFamily mesh_family_from_string(const std::string& s) {
  if (s == "quad") return MeshFamily::Quad;
  if (s == "voronoi") return MeshFamily::Voronoi;
  if (s == "concave") return MeshFamily::Concave;
  fail(ErrorKind::InvalidArgument, "unknown mesh family '" + s + "'");
}

struct CaseOptions {
  int case_id = 1;
  MeshFamily family = MeshFamily::Quad;
  int k = 1;
  int levels = 4;
  /// Subdivisions of the coarsest level; doubled per level. Voronoi levels use n^2 jittered grid seeds.
  int n0 = 4;
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  std::uint64_t seed = 1;
  double jitter = 0.6;
  int lloyd_iters = 10;
};

/// The mesh of one refinement level for a test case.
inline Mesh make_case_mesh(const CaseOptions& opt, int n) {
  if (opt.case_id == 3) {
    if (opt.family != MeshFamily::Quad)
      fail(ErrorKind::InvalidArgument, "case 3 is defined on interface-fitted quad meshes only");
    return generate_interface_mesh(n, sine_graph(3));
  }
  Mesh square;
  switch (opt.family) {
    case MeshFamily::Quad: square = generate_square_quad_mesh(n); break;
    case MeshFamily::Voronoi:
      square = generate_jittered_voronoi_mesh(n, opt.jitter, opt.lloyd_iters,
                                              opt.seed * 1000003ULL + static_cast<std::uint64_t>(n));
      break;
    case MeshFamily::Concave: square = generate_concave_mesh(n); break;
  }
  if (opt.case_id == 1) return square;
  if (opt.case_id == 2) return map_mesh_to_curved_domain(square, sine_graph(1), sine_graph(3));
  fail(ErrorKind::InvalidArgument, "unknown case " + std::to_string(opt.case_id));
}

inline ManufacturedProblem case_problem(const CaseOptions& opt) {
  switch (opt.case_id) {
    case 1: return problems::case1();
    case 2: return problems::case2();
    case 3: return problems::case3(opt.kappa1, opt.kappa2);
    default: fail(ErrorKind::InvalidArgument, "unknown case " + std::to_string(opt.case_id));
  }
}

struct LevelResult {
  int n = 0;
  double h = 0.0;
  int n_dof = 0;
  double e_h1 = 0.0;
  double e_l2 = 0.0;
  double residual = 0.0;
  double seconds = 0.0;
};

struct ConvergenceRecord {
  CaseOptions options;
  std::vector<LevelResult> levels;
};

/// Least-squares slope of log(error) against log(h) over the last three levels
/// (all levels if fewer). NaN with fewer than two levels.
inline double fitted_slope(const std::vector<double>& h, const std::vector<double>& err) {
  const std::size_t n = h.size();
  if (n < 2) return std::nan("");
  const std::size_t first = n >= 3 ? n - 3 : 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(n - first);
  for (std::size_t i = first; i < n; ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

inline double slope_h1(const ConvergenceRecord& r) {
  std::vector<double> h, e;
  for (const auto& l : r.levels) {
    h.push_back(l.h);
    e.push_back(l.e_h1);
  }
  return fitted_slope(h, e);
}

inline double slope_l2(const ConvergenceRecord& r) {
  std::vector<double> h, e;
  for (const auto& l : r.levels) {
    h.push_back(l.h);
    e.push_back(l.e_l2);
  }
  return fitted_slope(h, e);
}

/// Accepted ranges for the fitted rates at order k.
struct RateBrackets {
  double h1_lo, h1_hi, l2_lo, l2_hi;
};

inline RateBrackets rate_brackets(int k) { return {k - 0.2, k + 0.5, k + 1 - 0.25, k + 1 + 0.5}; }

inline bool rates_ok(const ConvergenceRecord& r) {
  const auto b = rate_brackets(r.options.k);
  const double s1 = slope_h1(r);
  const double s0 = slope_l2(r);
  return s1 >= b.h1_lo && s1 <= b.h1_hi && s0 >= b.l2_lo && s0 <= b.l2_hi;
}

/// Solves one level and measures its errors.
inline LevelResult solve_level(const Mesh& mesh, int k, const ManufacturedProblem& problem) {
  const auto start = std::chrono::steady_clock::now();
  const Discretization disc(mesh, k);
  const ExactSolution exact = problem.exact();
  const auto sol = assemble_and_solve(disc, problem.coefficients(), exact.u);
  const ErrorNorms err = compute_errors(disc, sol.dofs, exact);
  LevelResult r;
  r.h = mesh.h();
  r.n_dof = disc.dofs.size();
  r.e_h1 = err.h1;
  r.e_l2 = err.l2;
  r.residual = sol.residual;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

inline ConvergenceRecord run_case(const CaseOptions& opt) {
  if (opt.k < 1 || opt.k > 4) fail(ErrorKind::InvalidArgument, "k must lie in 1..4");
  if (opt.levels < 1) fail(ErrorKind::InvalidArgument, "levels must be >= 1");
  ConvergenceRecord record;
  record.options = opt;
  const ManufacturedProblem problem = case_problem(opt);
  int n = opt.n0;
  for (int level = 0; level < opt.levels; ++level, n *= 2) {
    try {
      const Mesh mesh = make_case_mesh(opt, n);
      LevelResult r = solve_level(mesh, opt.k, problem);
      r.n = n;
      record.levels.push_back(r);
    } catch (const Error& e) {
      throw Error(e.kind(), "level " + std::to_string(level) + " (n=" + std::to_string(n) + "): " + e.message());
    }
  }
  return record;
}

/// Threshold on both errors for a polynomial exact solution.
inline constexpr double kPatchTolerance = 1e-9;

/// Solves the patch problem (a = I, b = 0, c = 0, u a full degree-k polynomial)
/// on the case-1 mesh of the given family with n subdivisions.
inline LevelResult patch_test(MeshFamily family, int k, int n = 4, std::uint64_t seed = 1) {
  if (k < 1 || k > 4) fail(ErrorKind::InvalidArgument, "k must lie in 1..4");
  CaseOptions opt;
  opt.family = family;
  opt.k = k;
  opt.seed = seed;
  LevelResult r = solve_level(make_case_mesh(opt, n), k, problems::patch(k));
  r.n = n;
  return r;
}

inline bool patch_ok(const LevelResult& r) { return r.e_h1 <= kPatchTolerance && r.e_l2 <= kPatchTolerance; }

// ---- reporting ----

namespace detail {

inline std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(10) << v;
  return os.str();
}

inline double local_slope(double h0, double e0, double h1, double e1) {
  return std::log(e1 / e0) / std::log(h1 / h0);
}

}  // namespace detail

inline std::string record_csv(const ConvergenceRecord& r) {
  std::ostringstream os;
  os << "level,h,N_dof,E_H1,E_L2,slope_H1,slope_L2\n";
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    const auto& l = r.levels[i];
    os << i << "," << detail::sci(l.h) << "," << l.n_dof << "," << detail::sci(l.e_h1) << "," << detail::sci(l.e_l2)
       << ",";
    if (i > 0) {
      const auto& p = r.levels[i - 1];
      os << std::fixed << std::setprecision(4) << detail::local_slope(p.h, p.e_h1, l.h, l.e_h1) << ","
         << detail::local_slope(p.h, p.e_l2, l.h, l.e_l2);
      os.unsetf(std::ios::floatfield);
    } else {
      os << ",";
    }
    os << "\n";
  }
  return os.str();
}

inline std::string record_svg(const ConvergenceRecord& r) {
  constexpr double W = 640, H = 480, L = 80, R = 30, T = 40, B = 60;
  double hmin = 1e300, hmax = -1e300, emin = 1e300, emax = -1e300;
  for (const auto& l : r.levels) {
    hmin = std::min(hmin, l.h);
    hmax = std::max(hmax, l.h);
    for (double e : {l.e_h1, l.e_l2}) {
      if (e > 0) {
        emin = std::min(emin, e);
        emax = std::max(emax, e);
      }
    }
  }
  if (!(emin < 1e300)) emin = emax = 1.0;
  const double lx0 = std::floor(std::log10(hmin)), lx1 = std::ceil(std::log10(hmax)) + (hmin == hmax ? 1 : 0);
  const double ly0 = std::floor(std::log10(emin)), ly1 = std::ceil(std::log10(emax)) + (emin == emax ? 1 : 0);
  const auto px = [&](double h) { return L + (std::log10(h) - lx0) / (lx1 - lx0) * (W - L - R); };
  const auto py = [&](double e) { return H - B - (std::log10(e) - ly0) / (ly1 - ly0) * (H - T - B); };
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "  <rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  os << "  <text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">case " << r.options.case_id
     << ", " << to_string(r.options.family) << ", k=" << r.options.k << "</text>\n";
  os << "  <rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double d = lx0; d <= lx1; d += 1)
    os << "  <text x=\"" << px(std::pow(10.0, d)) << "\" y=\"" << H - B + 18
       << "\" text-anchor=\"middle\" font-size=\"11\">1e" << static_cast<int>(d) << "</text>\n";
  for (double d = ly0; d <= ly1; d += 1)
    os << "  <text x=\"" << L - 6 << "\" y=\"" << py(std::pow(10.0, d)) + 4
       << "\" text-anchor=\"end\" font-size=\"11\">1e" << static_cast<int>(d) << "</text>\n";
  os << "  <text x=\"" << (W + L - R) / 2 << "\" y=\"" << H - 16 << "\" text-anchor=\"middle\">h</text>\n";
  const auto series = [&](const char* color, auto field, const char* name) {
    os << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& l : r.levels) os << px(l.h) << "," << py(field(l)) << " ";
    os << "\"/>\n";
    for (const auto& l : r.levels)
      os << "  <circle cx=\"" << px(l.h) << "\" cy=\"" << py(field(l)) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    (void)name;
  };
  series("#1f77b4", [](const LevelResult& l) { return l.e_h1; }, "E_H1");
  series("#d62728", [](const LevelResult& l) { return l.e_l2; }, "E_L2");
  os << "  <text x=\"" << L + 10 << "\" y=\"" << T + 16 << "\" fill=\"#1f77b4\">E_H1</text>\n";
  os << "  <text x=\"" << L + 10 << "\" y=\"" << T + 32 << "\" fill=\"#d62728\">E_L2</text>\n";
  // Reference slope triangles below the last point of each series.
  if (!r.levels.empty()) {
    const auto& last = r.levels.back();
    const double hb = last.h;
    const double ht = last.h * 2.0;
    for (int s : {r.options.k, r.options.k + 1}) {
      const double e = (s == r.options.k ? last.e_h1 : last.e_l2) * 0.5;
      const double e_top = e * std::pow(2.0, s);
      os << "  <polygon fill=\"none\" stroke=\"gray\" points=\"" << px(hb) << "," << py(e) << " " << px(ht) << ","
         << py(e) << " " << px(ht) << "," << py(e_top) << "\"/>\n";
      os << "  <text x=\"" << px(ht) + 4 << "\" y=\"" << (py(e) + py(e_top)) / 2 << "\" font-size=\"11\" fill=\"gray\">"
         << s << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

inline std::string record_rates(const ConvergenceRecord& r) {
  const auto b = rate_brackets(r.options.k);
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "case " << r.options.case_id << " family " << to_string(r.options.family) << " k " << r.options.k;
  if (r.options.case_id == 3) os << " kappa1 " << r.options.kappa1 << " kappa2 " << r.options.kappa2;
  os << "\n";
  const double s1 = slope_h1(r), s0 = slope_l2(r);
  os << "slope_H1 " << s1 << " bracket [" << b.h1_lo << ", " << b.h1_hi << "]\n";
  os << "slope_L2 " << s0 << " bracket [" << b.l2_lo << ", " << b.l2_hi << "]\n";
  os << "rates " << (rates_ok(r) ? "PASS" : "FAIL") << "\n";
  return os.str();
}

/// Writes convergence.csv, convergence.svg and rates.txt into out_dir.
inline void report(const ConvergenceRecord& r, const std::string& out_dir) {
  if (r.levels.empty()) fail(ErrorKind::InvalidArgument, "report: empty record");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  const auto write = [&](const std::string& name, const std::string& text) {
    const auto path = std::filesystem::path(out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::IoError, "cannot write '" + path.string() + "'");
    out << text;
    if (!out) fail(ErrorKind::IoError, "failed writing '" + path.string() + "'");
  };
  write("convergence.csv", record_csv(r));
  write("convergence.svg", record_svg(r));
  write("rates.txt", record_rates(r));
}

}  // namespace ncvem
