#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_support.hpp"
#include "detline/errors.hpp"
#include "detline/family.hpp"
#include "detline/io.hpp"
#include "support.hpp"

using namespace detline;
using clisupport::CliResult;
using clisupport::run_cli;
using clisupport::scratch_dir;
using clisupport::write_file;
namespace fs = std::filesystem;

namespace {

const char* kIdentityOp =
    R"({"kind":"block_operator","n":2,"entries":[[[1,0],[0,0]],[[0,0],[1,0]]]})";

std::string rotation_path_json(int samples) {
  LagrangianPath path;
  path.closed = true;
  for (int i = 0; i <= samples; ++i) {
    const double phi = M_PI * i / samples;
    Eigen::MatrixXd col(2, 1);
    col << std::cos(phi), std::sin(phi);
    path.frames.push_back(LagrangianFrame::from_columns(col));
  }
  return serialize(path);
}

// Frames move less than pi/8 per step but the Souriau determinant phase
// moves by 2 pi / 3: valid path, undersampled winding.
std::string fast_phase_path_json() {
  LagrangianPath path;
  path.closed = true;
  const int steps = 9;
  for (int i = 0; i <= steps; ++i) {
    const Complex phase = std::polar(1.0, M_PI * i / steps);
    const Eigen::MatrixXcd u = phase * Eigen::MatrixXcd::Identity(3, 3);
    path.frames.push_back(
        LagrangianFrame::from_orthonormal_columns(testsupport::frame_columns_from_unitary(u)));
  }
  return serialize(path);
}

std::string identity_frame_json(int n) {
  return serialize(LagrangianFrame::from_orthonormal_columns(
      testsupport::frame_columns_from_unitary(Eigen::MatrixXcd::Identity(n, n))));
}

}  // namespace

TEST_CASE("parse/serialize round trips are bit exact") {
  testsupport::Rng rng(137);

  std::vector<std::string> inputs;
  inputs.push_back(kIdentityOp);
  inputs.push_back(serialize(BlockOperator(testsupport::random_complex_matrix(rng, 3))));
  inputs.push_back(serialize(TraceClassPerturbation(testsupport::random_complex_matrix(rng, 2))));
  inputs.push_back(serialize(SectionGerm{
      TraceClassPerturbation(testsupport::random_complex_matrix(rng, 2)), Complex(0.1, -0.25)}));
  inputs.push_back(serialize(testsupport::random_lagrangian_frame(rng, 3)));
  inputs.push_back(rotation_path_json(16));
  inputs.push_back(serialize(FamilySpec{"sf_suspension", {20, 24}, 9}));

  for (const auto& text : inputs) {
    const ParsedInput first = parse_input_text(text);
    const std::string once = serialize(first);
    const ParsedInput second = parse_input_text(once);
    CHECK(serialize(second) == once);
  }

  // Payload equality, not just serialization stability.
  const auto op1 = std::get<BlockOperator>(parse_input_text(inputs[1]));
  const auto op2 = std::get<BlockOperator>(parse_input_text(serialize(op1)));
  CHECK(op1.block() == op2.block());
}

TEST_CASE("parser rejects malformed inputs with line information") {
  const auto error_of = [](const std::string& text) {
    try {
      parse_input_text(text, "input.json");
      return std::string();
    } catch (const ValidationError& e) {
      return std::string(e.what());
    }
  };

  CHECK(error_of(R"({"kind":"mystery","n":1})").find("unknown kind") != std::string::npos);
  CHECK(error_of(R"({"kind":"block_operator","n":2,"entries":[[[1,0]]]})")
            .find("rows") != std::string::npos);
  // n = 2 against 3x3 entries.
  const std::string mismatched =
      R"({"kind":"block_operator","n":2,"entries":[[[1,0],[0,0],[0,0]],[[0,0],[1,0],[0,0]],[[0,0],[0,0],[1,0]]]})";
  CHECK(!error_of(mismatched).empty());
  // Unbalanced brace on line 2.
  CHECK(error_of("{\"kind\":\"block_operator\",\n\"n\":1,").find(":2:") != std::string::npos);
  // Frames must arrive orthonormal.
  CHECK(error_of(R"({"kind":"lagrangian_frame","n":1,"columns":[[2,0]]})")
            .find("orthonormal") != std::string::npos);
  // Non-isotropic frame.
  CHECK(error_of(
            R"({"kind":"lagrangian_frame","n":2,"columns":[[1,0,0,0],[0,0,1,0]]})")
            .find("isotropic") != std::string::npos);

  CHECK(error_of(R"({"kind":"family","name":"nope","grid":[16,16],"m":8})")
            .find("unknown family") != std::string::npos);
}

TEST_CASE("cli computes and exits cleanly") {
  const fs::path op = write_file("identity.json", kIdentityOp);
  const CliResult fdet = run_cli("fdet " + op.string());
  CHECK(fdet.exit_code == 0);
  CHECK(fdet.out == "det=1,0\n");

  // Deterministic stdout.
  const CliResult again = run_cli("fdet " + op.string());
  CHECK(again.out == fdet.out);

  // Cocycle on 1x1 data.
  const fs::path t = write_file("t.json", R"({"kind":"block_operator","n":1,"entries":[[[0,0]]]})");
  const fs::path a = write_file("a.json", R"({"kind":"trace_class","n":1,"entries":[[[1,0]]]})");
  const fs::path b = write_file("b.json", R"({"kind":"trace_class","n":1,"entries":[[[2,0]]]})");
  const fs::path c = write_file("c.json", R"({"kind":"trace_class","n":1,"entries":[[[0,1]]]})");
  const CliResult coc =
      run_cli("cocycle " + t.string() + " " + a.string() + " " + b.string() + " " + c.string());
  CHECK(coc.exit_code == 0);
  CHECK(coc.out.find("defect=") == 0);
  {
    std::istringstream in(coc.out.substr(7));
    double defect = 1.0;
    in >> defect;
    CHECK(defect < 1e-10);
  }

  // alpha at the endpoints emits an exact identity operator.
  const fs::path herm = write_file(
      "herm.json", R"({"kind":"block_operator","n":2,"entries":[[[0.5,0],[0,-0.25]],[[0,0.25],[-0.5,0]]]})");
  const CliResult alpha0 = run_cli("alpha " + herm.string() + " 0");
  CHECK(alpha0.exit_code == 0);
  const auto parsed = std::get<BlockOperator>(parse_input_text(alpha0.out));
  CHECK(parsed.block() == Eigen::MatrixXcd::Identity(2, 2));

  // Maslov generator loop through files.
  const fs::path lambda = write_file(
      "lambda.json", serialize(LagrangianFrame::from_orthonormal_columns([] {
        Eigen::MatrixXd col(2, 1);
        col << 1, 0;
        return col;
      }())));
  const fs::path loop = write_file("loop.json", rotation_path_json(64));
  const CliResult mas = run_cli("maslov " + lambda.string() + " " + loop.string());
  CHECK(mas.exit_code == 0);
  CHECK(mas.out == "maslov=1\n");
}

TEST_CASE("cli exit-code contract under failure injection") {
  // Missing file.
  CHECK(run_cli("fdet /nonexistent/file.json").exit_code == 1);

  // Mismatched dimensions.
  const fs::path bad = write_file(
      "bad.json", R"({"kind":"block_operator","n":2,"entries":[[[1,0],[0,0],[0,0]],[[0,0],[1,0],[0,0]],[[0,0],[0,0],[1,0]]]})");
  CHECK(run_cli("fdet " + bad.string()).exit_code == 1);

  // Unknown kind.
  const fs::path unk = write_file("unk.json", R"({"kind":"mystery"})");
  CHECK(run_cli("fdet " + unk.string()).exit_code == 1);

  // Wrong kind for the command.
  const fs::path frame = write_file(
      "frame.json", R"({"kind":"lagrangian_frame","n":1,"columns":[[1,0]]})");
  CHECK(run_cli("fdet " + frame.string()).exit_code == 1);

  // Ill-conditioned rank detection: exit 2.
  const fs::path ambiguous = write_file(
      "ambiguous.json",
      R"({"kind":"block_operator","n":3,"entries":[[[1,0],[0,0],[0,0]],[[0,0],[3e-09,0],[0,0]],[[0,0],[0,0],[8e-10,0]]]})");
  const fs::path germ = write_file(
      "germ.json",
      R"({"kind":"section_germ","anchor":{"kind":"trace_class","n":1,"entries":[[[1,0]]]},"value":[1,0]})");
  CHECK(run_cli("fiber " + ambiguous.string() + " " + germ.string()).exit_code == 2);

  // Undersampled winding: exit 2.
  const fs::path lambda = write_file("lambda2.json", identity_frame_json(3));
  const fs::path coarse = write_file("coarse.json", fast_phase_path_json());
  CHECK(run_cli("maslov " + lambda.string() + " " + coarse.string()).exit_code == 2);

  // A path that violates the sampling invariant is invalid input: exit 1.
  const fs::path lambda1 = write_file(
      "lambda1.json", R"({"kind":"lagrangian_frame","n":1,"columns":[[1,0]]})");
  const fs::path jumpy = write_file("jumpy.json", rotation_path_json(3));
  CHECK(run_cli("maslov " + lambda1.string() + " " + jumpy.string()).exit_code == 1);

  // No partial CSV on failure.
  const fs::path csv = scratch_dir() / "should_not_exist.csv";
  fs::remove(csv);
  const fs::path spec = write_file("family_bad.json",
                                   R"({"kind":"family","name":"sf_suspension","grid":[4,4],"m":8})");
  const CliResult r = run_cli("chern " + spec.string() + " --emit-csv " + csv.string());
  CHECK(r.exit_code == 1);
  CHECK(!fs::exists(csv));
}

TEST_CASE("cli chern and holonomy on builtin families") {
  const fs::path spec = write_file(
      "family.json", R"({"kind":"family","name":"sf_suspension","grid":[16,20],"m":8})");
  const fs::path csv = scratch_dir() / "links.csv";
  fs::remove(csv);

  const CliResult chern = run_cli("chern " + spec.string() + " --emit-csv " + csv.string());
  CHECK(chern.exit_code == 0);
  const bool plus = chern.out == "c1=1\n";
  const bool minus = chern.out == "c1=-1\n";
  CHECK((plus || minus));
  REQUIRE(fs::exists(csv));
  {
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "patch_i,patch_j,param_index,phase");
    std::string row;
    CHECK(std::getline(in, row).good());
  }

  // Flag-driven spelling from the interface contract.
  const CliResult flags = run_cli("chern --family sf_suspension --grid 16 20 --m 8");
  CHECK(flags.exit_code == 0);
  CHECK(flags.out == chern.out);

  const fs::path hopf = write_file(
      "hopf.json", R"({"kind":"family","name":"hopf_selfadjoint","grid":[16,16],"m":8})");
  const CliResult kernel = run_cli("chern " + hopf.string() + " --selector kernel_det");
  CHECK(kernel.exit_code == 0);
  CHECK((kernel.out == "c1=1\n" || kernel.out == "c1=-1\n"));

  const CliResult hol = run_cli("holonomy " + hopf.string());
  CHECK(hol.exit_code == 0);
  CHECK(hol.out.find("holonomy=") == 0);
  CHECK(hol.out.find("phase=") != std::string::npos);
}
