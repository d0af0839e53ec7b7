#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "detline/det_line.hpp"
#include "detline/errors.hpp"
#include "detline/family.hpp"
#include "detline/io.hpp"
#include "detline/operator.hpp"
#include "detline/symplectic.hpp"

namespace {

using namespace detline;

struct RunConfig {
  Tolerances tol;
  long long seed = 0;  // reserved for randomized sweeps; fixed for determinism
  std::string emit_csv;
  std::array<int, 2> grid{16, 16};
  int m = 8;
  std::string mode = "complex";
  std::string family_name;
  std::string selector = "quillen";
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt(const Complex& z) { return fmt(z.real()) + "," + fmt(z.imag()); }

template <class T>
T expect(const ParsedInput& input, const std::string& path, const char* what) {
  if (!std::holds_alternative<T>(input)) {
    throw ValidationError(path + ": expected a " + what + " file");
  }
  return std::get<T>(input);
}

void write_csv(const RunConfig& cfg, const std::vector<LinkRecord>& links) {
  if (cfg.emit_csv.empty()) return;
  std::ofstream out(cfg.emit_csv, std::ios::binary);
  if (!out) throw ValidationError("cannot open CSV output file " + cfg.emit_csv);
  out << "patch_i,patch_j,param_index,phase\n";
  for (const auto& l : links) {
    out << l.patch_from << "," << l.patch_to << "," << l.param_index << "," << fmt(l.phase)
        << "\n";
  }
}

OperatorFamily family_from_config(const RunConfig& cfg, const std::string& file) {
  if (!file.empty()) {
    const FamilySpec spec = expect<FamilySpec>(parse_input(file), file, "family spec");
    return builtin_family(spec.name, spec.grid[0], spec.grid[1], spec.m);
  }
  if (cfg.family_name.empty()) {
    throw ValidationError("chern/holonomy: pass a family spec file or --family");
  }
  return builtin_family(cfg.family_name, cfg.grid[0], cfg.grid[1], cfg.m);
}

int run(int argc, char** argv) {
  CLI::App app{"determinant line bundle toolkit"};
  app.require_subcommand(1);

  RunConfig cfg;
  app.add_option("--tol-rank", cfg.tol.rank, "relative singular value cutoff")->check(CLI::PositiveNumber);
  app.add_option("--tol-det", cfg.tol.det, "relative determinant tolerance")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "seed for randomized sweeps");
  app.add_option("--emit-csv", cfg.emit_csv, "write overlap phase samples to a CSV file");

  std::string file_a, file_b, file_c, file_d;
  double t_value = 0.0;

  auto* fdet = app.add_subcommand("fdet", "Fredholm determinant of a block operator");
  fdet->fallthrough();
  fdet->add_option("operator", file_a)->required();

  auto* cocycle = app.add_subcommand("cocycle", "cocycle defect of transition functions");
  cocycle->fallthrough();
  cocycle->add_option("T", file_a)->required();
  cocycle->add_option("A", file_b)->required();
  cocycle->add_option("B", file_c)->required();
  cocycle->add_option("C", file_d)->required();

  auto* fiber = app.add_subcommand("fiber", "Quillen fiber element of a section germ");
  fiber->fallthrough();
  fiber->add_option("T", file_a)->required();
  fiber->add_option("germ", file_b)->required();

  auto* souriau_cmd = app.add_subcommand("souriau", "Souriau map data of a Lagrangian pair");
  souriau_cmd->fallthrough();
  souriau_cmd->add_option("lambda", file_a)->required();
  souriau_cmd->add_option("mu", file_b)->required();

  auto* maslov = app.add_subcommand("maslov", "Maslov index of a closed Lagrangian path");
  maslov->fallthrough();
  maslov->add_option("lambda", file_a)->required();
  maslov->add_option("path", file_b)->required();

  auto* prop5 = app.add_subcommand("prop5", "chart transition determinants");
  prop5->fallthrough();
  prop5->add_option("theta", file_a)->required();
  prop5->add_option("theta2", file_b)->required();
  prop5->add_option("mu", file_c)->required();
  prop5->add_option("--mode", cfg.mode, "complex|real")->check(CLI::IsMember({"complex", "real"}));

  auto* chern = app.add_subcommand("chern", "Chern number of a builtin family");
  chern->fallthrough();
  chern->add_option("spec", file_a, "family spec file");
  chern->add_option("--family", cfg.family_name, "builtin family name");
  chern->add_option("--grid", cfg.grid, "grid sizes");
  chern->add_option("--m", cfg.m, "base truncation");
  chern->add_option("--selector", cfg.selector, "quillen|kernel_det|cokernel_det")
      ->check(CLI::IsMember({"quillen", "kernel_det", "cokernel_det"}));

  auto* alpha = app.add_subcommand("alpha", "path cos(pi t) + i sin(pi t) A at one t");
  alpha->fallthrough();
  alpha->add_option("operator", file_a)->required();
  alpha->add_option("t", t_value)->required()->check(CLI::Range(0.0, 1.0));

  auto* holonomy_cmd = app.add_subcommand("holonomy", "holonomy of a family's equator circle");
  holonomy_cmd->fallthrough();
  holonomy_cmd->add_option("spec", file_a, "family spec file");
  holonomy_cmd->add_option("--family", cfg.family_name, "builtin family name");
  holonomy_cmd->add_option("--grid", cfg.grid, "grid sizes");
  holonomy_cmd->add_option("--m", cfg.m, "base truncation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (fdet->parsed()) {
    const auto op = expect<BlockOperator>(parse_input(file_a), file_a, "block_operator");
    std::cout << "det=" << fmt(fredholm_det(op, cfg.tol.det)) << "\n";
    return 0;
  }
  if (cocycle->parsed()) {
    const auto t = expect<BlockOperator>(parse_input(file_a), file_a, "block_operator");
    const auto a = expect<TraceClassPerturbation>(parse_input(file_b), file_b, "trace_class");
    const auto b = expect<TraceClassPerturbation>(parse_input(file_c), file_c, "trace_class");
    const auto c = expect<TraceClassPerturbation>(parse_input(file_d), file_d, "trace_class");
    const double defect = cocycle_defect(t, a, b, c, cfg.tol);
    const double rel = defect / std::abs(transition(t, a, c, cfg.tol));
    std::cout << "defect=" << fmt(defect) << " rel=" << fmt(rel) << "\n";
    return 0;
  }
  if (fiber->parsed()) {
    const auto t = expect<BlockOperator>(parse_input(file_a), file_a, "block_operator");
    const auto germ = expect<SectionGerm>(parse_input(file_b), file_b, "section_germ");
    const Regularizer l = canonical_regularizer(t, cfg.tol.rank);
    const DetLineElement elem = quillen_fiber(t, germ, l, cfg.tol);
    std::cout << "coeff=" << fmt(elem.coefficient) << " dim=" << elem.dim()
              << " canonical=" << fmt(canonical_scalar(elem, t, cfg.tol)) << "\n";
    return 0;
  }
  if (souriau_cmd->parsed()) {
    const auto lambda = expect<LagrangianFrame>(parse_input(file_a), file_a, "lagrangian_frame");
    const auto mu = expect<LagrangianFrame>(parse_input(file_b), file_b, "lagrangian_frame");
    const Eigen::MatrixXcd s = souriau(lambda, mu);
    const int n = lambda.n();
    const double unitarity =
        (s * s.adjoint() - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
    const PairData pd = pair_data(lambda, mu);
    const int dim_ker = kernel_cokernel(q_map(lambda, mu), cfg.tol.rank).dim();
    std::cout << "det=" << fmt(log_det(s).value()) << " unitarity=" << fmt(unitarity)
              << " dim_intersection=" << pd.dim_intersection << " dim_ker_q=" << dim_ker << "\n";
    return 0;
  }
  if (maslov->parsed()) {
    const auto lambda = expect<LagrangianFrame>(parse_input(file_a), file_a, "lagrangian_frame");
    const auto path = expect<LagrangianPath>(parse_input(file_b), file_b, "lagrangian_path");
    std::cout << "maslov=" << maslov_index(lambda, path) << "\n";
    return 0;
  }
  if (prop5->parsed()) {
    const auto theta = expect<LagrangianFrame>(parse_input(file_a), file_a, "lagrangian_frame");
    const auto theta2 = expect<LagrangianFrame>(parse_input(file_b), file_b, "lagrangian_frame");
    const auto mu = expect<LagrangianFrame>(parse_input(file_c), file_c, "lagrangian_frame");
    const auto quad = prop5_quadruple(theta, theta2, mu);
    const ChartMode mode =
        (cfg.mode == "real") ? ChartMode::real_linear : ChartMode::complex_on_HJ;
    const Complex chart = chart_transition(theta, theta2, mu, mode);
    std::cout << "q1=" << fmt(quad[0]) << " q2=" << fmt(quad[1]) << " q3=" << fmt(quad[2])
              << " q4=" << fmt(quad[3]) << " chart=" << fmt(chart) << "\n";
    return 0;
  }
  if (chern->parsed()) {
    const OperatorFamily family = family_from_config(cfg, file_a);
    const PatchCover cover = spectral_patch_cover(family);
    const ChernSelector selector = (cfg.selector == "kernel_det") ? ChernSelector::kernel_det
                                   : (cfg.selector == "cokernel_det")
                                       ? ChernSelector::cokernel_det
                                       : ChernSelector::quillen;
    std::vector<LinkRecord> links;
    const int c1 = chern_number(family, selector, cover, &links, cfg.tol);
    std::cout << "c1=" << c1 << "\n";
    write_csv(cfg, links);
    return 0;
  }
  if (alpha->parsed()) {
    const auto op = expect<BlockOperator>(parse_input(file_a), file_a, "block_operator");
    std::cout << serialize(alpha_path(op, t_value)) << "\n";
    return 0;
  }
  if (holonomy_cmd->parsed()) {
    const OperatorFamily family = family_from_config(cfg, file_a);
    const OperatorFamily equator = latitude_circle(family);
    const PatchCover cover = spectral_patch_cover(equator);
    std::vector<LinkRecord> links;
    const Complex h = holonomy(equator, cover, &links, cfg.tol);
    std::cout << "holonomy=" << fmt(h) << " phase=" << fmt(std::arg(h)) << "\n";
    write_csv(cfg, links);
    return 0;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
