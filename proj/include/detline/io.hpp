#pragma once

#include <array>
#include <string>
#include <variant>

#include "detline/det_line.hpp"
#include "detline/operator.hpp"
#include "detline/symplectic.hpp"

namespace detline {

// Builtin-family request as stored in a family spec file.
struct FamilySpec {
  std::string name;
  std::array<int, 2> grid{16, 16};
  int m = 8;
};

using ParsedInput = std::variant<BlockOperator, TraceClassPerturbation, SectionGerm,
                                 LagrangianFrame, LagrangianPath, FamilySpec>;

// Parses one of the declared "kind"s. Unknown kinds, malformed numbers and
// invariant violations raise ValidationError carrying file and line
// information. Parsing validates but never rewrites numeric payloads, so
// serialize(parse(file)) reproduces the payload bit-exactly.
ParsedInput parse_input(const std::string& path);
ParsedInput parse_input_text(const std::string& text, const std::string& label = "<input>");

std::string serialize(const BlockOperator& op);
std::string serialize(const TraceClassPerturbation& pert);
std::string serialize(const SectionGerm& germ);
std::string serialize(const LagrangianFrame& frame);
std::string serialize(const LagrangianPath& path);
std::string serialize(const FamilySpec& spec);
std::string serialize(const ParsedInput& value);

}  // namespace detline
