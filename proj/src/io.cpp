#include "detline/io.hpp"

#include <fstream>
#include <sstream>

#include "detline/errors.hpp"
#include "json.hpp"

namespace detline {

namespace {

using nlohmann::json;

int line_of_offset(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

// Best-effort line for semantic errors: the first occurrence of the key.
int line_of_key(const std::string& text, const std::string& key) {
  const std::size_t pos = text.find("\"" + key + "\"");
  return (pos == std::string::npos) ? 1 : line_of_offset(text, pos);
}

[[noreturn]] void fail(const std::string& label, int line, const std::string& message) {
  throw ValidationError(label + ":" + std::to_string(line) + ": " + message);
}

double get_number(const json& j, const std::string& label, const std::string& text,
                  const std::string& key) {
  if (!j.is_number()) fail(label, line_of_key(text, key), "expected a number in '" + key + "'");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(label, line_of_key(text, key), "non-finite number in '" + key + "'");
  return v;
}

Complex get_complex(const json& j, const std::string& label, const std::string& text,
                    const std::string& key) {
  if (!j.is_array() || j.size() != 2) {
    fail(label, line_of_key(text, key), "expected [re,im] in '" + key + "'");
  }
  return {get_number(j[0], label, text, key), get_number(j[1], label, text, key)};
}

Eigen::MatrixXcd get_entries(const json& j, int n, const std::string& label,
                             const std::string& text) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    fail(label, line_of_key(text, "entries"),
         "'entries' must hold " + std::to_string(n) + " rows");
  }
  Eigen::MatrixXcd m(n, n);
  for (int r = 0; r < n; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != n) {
      fail(label, line_of_key(text, "entries"),
           "row " + std::to_string(r) + " must hold " + std::to_string(n) + " entries");
    }
    for (int c = 0; c < n; ++c) m(r, c) = get_complex(j[r][c], label, text, "entries");
  }
  return m;
}

int get_dimension(const json& j, const std::string& label, const std::string& text) {
  if (!j.contains("n") || !j["n"].is_number_integer() || j["n"].get<int>() < 1) {
    fail(label, line_of_key(text, "n"), "'n' must be a positive integer");
  }
  return j["n"].get<int>();
}

TraceClassPerturbation parse_trace_class(const json& j, const std::string& label,
                                         const std::string& text) {
  const int n = get_dimension(j, label, text);
  return TraceClassPerturbation(get_entries(j.at("entries"), n, label, text));
}

LagrangianFrame parse_frame(const json& j, const std::string& label, const std::string& text) {
  const int n = get_dimension(j, label, text);
  const json& cols = j.contains("columns") ? j["columns"] : json();
  if (!cols.is_array() || static_cast<int>(cols.size()) != n) {
    fail(label, line_of_key(text, "columns"),
         "'columns' must hold " + std::to_string(n) + " columns");
  }
  Eigen::MatrixXd f(2 * n, n);
  for (int c = 0; c < n; ++c) {
    if (!cols[c].is_array() || static_cast<int>(cols[c].size()) != 2 * n) {
      fail(label, line_of_key(text, "columns"),
           "column " + std::to_string(c) + " must hold " + std::to_string(2 * n) + " entries");
    }
    for (int r = 0; r < 2 * n; ++r) f(r, c) = get_number(cols[c][r], label, text, "columns");
  }
  try {
    // Stored verbatim: file frames must already be orthonormal so parsing
    // never rewrites the payload.
    return LagrangianFrame::from_orthonormal_columns(std::move(f));
  } catch (const ValidationError& e) {
    fail(label, line_of_key(text, "columns"), e.what());
  }
}

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

json entries_to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json frame_to_json(const LagrangianFrame& frame) {
  json cols = json::array();
  for (int c = 0; c < frame.n(); ++c) {
    json col = json::array();
    for (int r = 0; r < 2 * frame.n(); ++r) col.push_back(frame.columns()(r, c));
    cols.push_back(std::move(col));
  }
  return json{{"kind", "lagrangian_frame"}, {"n", frame.n()}, {"columns", std::move(cols)}};
}

}  // namespace

ParsedInput parse_input_text(const std::string& text, const std::string& label) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(label, line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0), e.what());
  }
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    fail(label, 1, "input must be a JSON object with a string 'kind'");
  }
  const std::string kind = j["kind"].get<std::string>();
  try {
    if (kind == "block_operator") {
      const int n = get_dimension(j, label, text);
      return BlockOperator(get_entries(j.at("entries"), n, label, text));
    }
    if (kind == "trace_class") {
      return parse_trace_class(j, label, text);
    }
    if (kind == "section_germ") {
      if (!j.contains("anchor") || !j["anchor"].is_object()) {
        fail(label, line_of_key(text, "anchor"), "'anchor' must be a trace_class object");
      }
      SectionGerm germ;
      germ.anchor = parse_trace_class(j["anchor"], label, text);
      germ.value = get_complex(j.at("value"), label, text, "value");
      return germ;
    }
    if (kind == "lagrangian_frame") {
      return parse_frame(j, label, text);
    }
    if (kind == "lagrangian_path") {
      if (!j.contains("closed") || !j["closed"].is_boolean()) {
        fail(label, line_of_key(text, "closed"), "'closed' must be a boolean");
      }
      if (!j.contains("frames") || !j["frames"].is_array() || j["frames"].empty()) {
        fail(label, line_of_key(text, "frames"), "'frames' must be a non-empty array");
      }
      LagrangianPath path;
      path.closed = j["closed"].get<bool>();
      for (const auto& fj : j["frames"]) {
        if (!fj.is_object() || fj.value("kind", "") != std::string("lagrangian_frame")) {
          fail(label, line_of_key(text, "frames"),
               "every path entry must be a lagrangian_frame object");
        }
        path.frames.push_back(parse_frame(fj, label, text));
      }
      validate_path(path);
      return path;
    }
    if (kind == "family") {
      FamilySpec spec;
      if (!j.contains("name") || !j["name"].is_string()) {
        fail(label, line_of_key(text, "name"), "'name' must be a string");
      }
      spec.name = j["name"].get<std::string>();
      if (spec.name != "hopf_selfadjoint" && spec.name != "sf_suspension") {
        fail(label, line_of_key(text, "name"), "unknown family '" + spec.name + "'");
      }
      if (!j.contains("grid") || !j["grid"].is_array() || j["grid"].size() != 2 ||
          !j["grid"][0].is_number_integer() || !j["grid"][1].is_number_integer()) {
        fail(label, line_of_key(text, "grid"), "'grid' must be [t_points, s_points]");
      }
      spec.grid = {j["grid"][0].get<int>(), j["grid"][1].get<int>()};
      if (j.contains("m")) {
        if (!j["m"].is_number_integer()) fail(label, line_of_key(text, "m"), "'m' must be an integer");
        spec.m = j["m"].get<int>();
      }
      return spec;
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    fail(label, 1, e.what());
  }
  fail(label, line_of_key(text, "kind"), "unknown kind '" + kind + "'");
}

ParsedInput parse_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path + ":1: cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_input_text(buf.str(), path);
}

std::string serialize(const BlockOperator& op) {
  return json{{"kind", "block_operator"}, {"n", op.size()}, {"entries", entries_to_json(op.block())}}
      .dump();
}

std::string serialize(const TraceClassPerturbation& pert) {
  return json{{"kind", "trace_class"}, {"n", pert.size()}, {"entries", entries_to_json(pert.block())}}
      .dump();
}

std::string serialize(const SectionGerm& germ) {
  return json{{"kind", "section_germ"},
              {"anchor", json::parse(serialize(germ.anchor))},
              {"value", complex_to_json(germ.value)}}
      .dump();
}

std::string serialize(const LagrangianFrame& frame) { return frame_to_json(frame).dump(); }

std::string serialize(const LagrangianPath& path) {
  json frames = json::array();
  for (const auto& f : path.frames) frames.push_back(frame_to_json(f));
  return json{{"kind", "lagrangian_path"}, {"closed", path.closed}, {"frames", std::move(frames)}}
      .dump();
}

std::string serialize(const FamilySpec& spec) {
  return json{{"kind", "family"},
              {"name", spec.name},
              {"grid", json::array({spec.grid[0], spec.grid[1]})},
              {"m", spec.m}}
      .dump();
}

std::string serialize(const ParsedInput& value) {
  return std::visit([](const auto& v) { return serialize(v); }, value);
}

}  // namespace detline
