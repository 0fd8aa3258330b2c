// Command-line driver: convergence runs, mesh generation and checks, patch test.
//
// Exit codes: 0 success (rates or checks pass), 1 thresholds missed, 2 error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

#include "ncvem/ncvem.hpp"

namespace {

using namespace ncvem;

struct RunArgs {
  int case_id = 1;
  std::string family = "quad";
  int k = 1;
  int levels = 4;
  int n0 = 4;
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  std::uint64_t seed = 1;
  std::string out;
  std::string dump;
};

struct MeshGenArgs {
  int case_id = 1;
  std::string family = "quad";
  int n = 4;
  std::uint64_t seed = 1;
  std::string out;
};

CaseOptions to_options(const RunArgs& a) {
  CaseOptions o;
  o.case_id = a.case_id;
  o.family = mesh_family_from_string(a.family);
  o.k = a.k;
  o.levels = a.levels;
  o.n0 = a.n0;
  o.kappa1 = a.kappa1;
  o.kappa2 = a.kappa2;
  o.seed = a.seed;
  return o;
}

int do_run(const RunArgs& a) {
  const CaseOptions opt = to_options(a);
  const ConvergenceRecord record = run_case(opt);
  report(record, a.out);
  std::cout << record_csv(record) << record_rates(record);
  if (!a.dump.empty()) {
    const int n = opt.n0 << (opt.levels - 1);
    const Mesh mesh = make_case_mesh(opt, n);
    const Discretization disc(mesh, opt.k);
    const ManufacturedProblem problem = case_problem(opt);
    const SolveResult sol = assemble_and_solve(disc, problem.coefficients(), problem.exact().u);
    write_system_coo(sol, a.dump);
    std::cout << "system written to " << a.dump << "\n";
  }
  return rates_ok(record) ? 0 : 1;
}

int do_mesh_gen(const MeshGenArgs& a) {
  CaseOptions opt;
  opt.case_id = a.case_id;
  opt.family = mesh_family_from_string(a.family);
  opt.seed = a.seed;
  const Mesh mesh = make_case_mesh(opt, a.n);
  write_mesh(mesh, a.out);
  std::cout << mesh.cells.size() << " cells, " << mesh.edges.size() << " edges, " << mesh.vertices.size()
            << " vertices written to " << a.out << "\n";
  return 0;
}

int do_mesh_check(const std::string& path, double rho) {
  const Mesh mesh = read_mesh(path);
  std::string why;
  const bool topo = check_topology(mesh, &why);
  const MeshValidation v = validate_mesh(mesh, rho);
  int curved = 0;
  for (const auto& e : mesh.edges) curved += e.is_curved();
  double area = 0.0;
  for (const auto& c : mesh.cells) area += c.area;
  std::printf("cells %zu edges %zu (curved %d) vertices %zu\n", mesh.cells.size(), mesh.edges.size(), curved,
              mesh.vertices.size());
  std::printf("h %.6e  total area %.15g\n", mesh.h(), area);
  std::printf("topology %s%s\n", topo ? "ok" : "broken: ", topo ? "" : why.c_str());
  std::printf("G1 violations %d  G2 violations %d  (rho %.3g)\n", v.g1_violations, v.g2_violations, rho);
  return topo && v.ok() ? 0 : 1;
}

int do_patch(int k) {
  bool ok = true;
  for (const MeshFamily f : {MeshFamily::Quad, MeshFamily::Voronoi}) {
    const LevelResult r = patch_test(f, k);
    const bool pass = patch_ok(r);
    ok = ok && pass;
    std::printf("%-8s k=%d  E_H1 %.3e  E_L2 %.3e  residual %.3e  %s\n", to_string(f), k, r.e_h1, r.e_l2, r.residual,
                pass ? "PASS" : "FAIL");
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonconforming virtual element solver on curved polygonal meshes"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "convergence study for one test case");
  run_cmd->add_option("--case", run.case_id, "test case")->required()->check(CLI::IsMember({1, 2, 3}));
  run_cmd->add_option("--family", run.family, "mesh family")->check(CLI::IsMember({"quad", "voronoi", "concave"}));
  run_cmd->add_option("--k", run.k, "polynomial order")->required()->check(CLI::Range(1, 4));
  run_cmd->add_option("--levels", run.levels, "refinement levels")->check(CLI::PositiveNumber);
  run_cmd->add_option("--n0", run.n0, "subdivisions of the coarsest level")->check(CLI::Range(2, 1024));
  run_cmd->add_option("--kappa1", run.kappa1, "case 3 diffusion below the interface")->check(CLI::PositiveNumber);
  run_cmd->add_option("--kappa2", run.kappa2, "case 3 diffusion above the interface")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", run.seed, "Voronoi seed");
  run_cmd->add_option("--out", run.out, "output directory")->required();
  run_cmd->add_option("--dump-system", run.dump, "write the finest eliminated system in COO format");

  auto* mesh_cmd = app.add_subcommand("mesh", "mesh utilities");
  mesh_cmd->require_subcommand(1);
  MeshGenArgs gen;
  auto* gen_cmd = mesh_cmd->add_subcommand("gen", "generate a test-case mesh and write it as JSON");
  gen_cmd->add_option("--case", gen.case_id, "test case domain")->check(CLI::IsMember({1, 2, 3}));
  gen_cmd->add_option("--family", gen.family, "mesh family")->check(CLI::IsMember({"quad", "voronoi", "concave"}));
  gen_cmd->add_option("--n", gen.n, "subdivisions")->check(CLI::Range(1, 4096));
  gen_cmd->add_option("--seed", gen.seed, "Voronoi seed");
  gen_cmd->add_option("--out", gen.out, "output file")->required();
  std::string check_path;
  double rho = kDefaultRho;
  auto* check_cmd = mesh_cmd->add_subcommand("check", "read a mesh file and report its regularity");
  check_cmd->add_option("file", check_path, "mesh JSON file")->required();
  check_cmd->add_option("--rho", rho, "regularity constant")->check(CLI::Range(0.0, 1.0));

  int patch_k = 1;
  auto* patch_cmd = app.add_subcommand("patch-test", "polynomial reproduction on quad and Voronoi meshes");
  patch_cmd->add_option("--k", patch_k, "polynomial order")->required()->check(CLI::Range(1, 4));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return do_run(run);
    if (*gen_cmd) return do_mesh_gen(gen);
    if (*check_cmd) return do_mesh_check(check_path, rho);
    if (*patch_cmd) return do_patch(patch_k);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
