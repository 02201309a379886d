// Command-line front end: hyperexponential solutions of linear ODE operators.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "hyperexp/hyperexp.hpp"

using namespace hyperexp;
using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

enum Exit { kOk = 0, kInternal = 1, kParse = 2, kUnsupported = 3, kPrecision = 4 };

std::string read_input(const std::string& file) {
  if (file == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream in(file);
  if (!in) throw InvalidConfig("cannot open " + file);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Point parse_point(const std::string& s) {
  if (s == "infinity" || s == "inf" || s == "oo") return Point::infinity();
  return Point::at(parse_scalar(s));
}

std::string e_string(const TermFactor& f) {
  ExponentialPart p;
  p.alpha = f.alpha;
  p.u = f.c;
  return p.str();
}

json part_json(const LocalPart& lp) {
  return {{"e", lp.part.str()},
          {"alpha", lp.part.alpha.str()},
          {"dimension", lp.dim},
          {"log_free_dimension", lp.dim0},
          {"ramification", lp.part.ramification},
          {"supported", !lp.part.unsupported}};
}

json report_json(const SolutionReport& rep, const std::string& input) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["input"] = input;
  j["operator"] = rep.input.str();
  json sp = json::array();
  for (const auto& s : rep.singular.points)
    sp.push_back({{"point", s.point.str()}, {"multiplicity", s.multiplicity}, {"apparent", s.apparent}});
  for (const auto& g : rep.singular.apparent_groups)
    sp.push_back({{"point", "roots of " + g.factor.str()},
                  {"multiplicity", g.multiplicity},
                  {"apparent", true}});
  j["singular_points"] = sp;
  json parts = json::array();
  const auto pts = rep.singular.relevant();
  for (size_t i = 0; i < rep.local.size(); ++i) {
    json row = json::array();
    for (const auto& lp : rep.local[i].parts) {
      json pj = part_json(lp);
      pj["point"] = pts[i].str();
      row.push_back(pj);
    }
    parts.push_back(row);
  }
  j["parts"] = parts;
  json tuples = json::array();
  for (const auto& t : rep.tuples) {
    json idx = json::array();
    for (int k : t.tuple) idx.push_back(k + 1);
    tuples.push_back({{"indices", idx}, {"status", to_string(t.status)}, {"solutions", t.solutions}});
  }
  j["tuples"] = tuples;
  json sols = json::array();
  for (const auto& h : rep.solutions) {
    json ps = json::array();
    for (const auto& f : h.parts) ps.push_back({{"point", f.point.str()}, {"e", e_string(f)}});
    sols.push_back({{"multiplier", h.multiplier.str()}, {"parts", ps}, {"display", h.str()}});
  }
  j["solutions"] = sols;
  j["warnings"] = rep.warnings;
  j["precision_bits_used"] = rep.precision_bits_used;
  j["base_point"] = rep.local.size() > 1 ? json(rep.base_point.str()) : json(nullptr);
  j["restarts"] = rep.restarts;
  j["conservative"] = rep.conservative;
  j["timing_seconds"] = rep.seconds;
  return j;
}

std::string series_string(const GeneralizedSeries& s, int terms) {
  std::string out;
  int shown = 0;
  for (int n = 0; n <= s.N && shown < terms; ++n) {
    if (s.b[n].is_zero()) continue;
    std::string c = s.b[n].str();
    std::string mono = n == 0 ? "" : (n == 1 ? "t" : "t^" + std::to_string(n));
    std::string term = mono.empty() ? c : (s.b[n].is_one() ? mono : "(" + c + ")*" + mono);
    out += out.empty() ? term : " + " + term;
    ++shown;
  }
  return out.empty() ? "0" : out + " + O(t^" + std::to_string(s.N + 1) + ")";
}

int run_solve(const std::string& file, const SolverConfig& cfg) {
  std::string text = read_input(file);
  SolutionReport rep = solve(parse_operator(text), cfg);
  if (cfg.json) {
    std::cout << report_json(rep, text).dump(2) << "\n";
  } else {
    std::cout << pretty(rep);
  }
  return rep.conservative ? kPrecision : kOk;
}

int run_local(const std::string& file, const std::string& point, int order, int terms, bool as_json) {
  std::string text = read_input(file);
  DiffOp op = parse_operator(text);
  Point p = parse_point(point);
  LocalBasis lb = local_basis(op, p, order);
  if (as_json) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["point"] = p.str();
    json parts = json::array();
    for (const auto& lp : lb.parts) {
      json pj = part_json(lp);
      json ser = json::array();
      for (const auto& s : lp.basis) {
        json coeffs = json::array();
        for (const auto& c : s.b) coeffs.push_back(c.str());
        ser.push_back({{"leading", s.leading}, {"order", s.N}, {"coefficients", coeffs}});
      }
      pj["series"] = ser;
      parts.push_back(pj);
    }
    j["parts"] = parts;
    std::cout << j.dump(2) << "\n";
    return kOk;
  }
  std::cout << "local coordinate t = " << (p.infinite ? "1/x" : (p.z.is_zero() ? "x" : "x - (" + p.z.str() + ")"))
            << "\n";
  for (size_t j = 0; j < lb.parts.size(); ++j) {
    const auto& lp = lb.parts[j];
    std::cout << j + 1 << ": e = " << lp.part.str() << "  dim " << lp.dim << ", log-free " << lp.dim0 << "\n";
    for (const auto& s : lp.basis) std::cout << "   " << series_string(s, terms) << "\n";
  }
  return kOk;
}

int run_transition(const std::string& file, const std::string& path_text, long prec, bool as_json) {
  DiffOp op = parse_operator(read_input(file));
  Path path;
  std::stringstream ss(path_text);
  std::string tok;
  while (std::getline(ss, tok, ',')) path.waypoints.push_back(parse_scalar(tok));
  if (path.waypoints.empty()) throw InvalidConfig("empty path");
  for (const auto& w : path.waypoints)
    if (op.lead().eval(w).is_zero()) throw PathTooCloseToSingularity("path endpoint " + w.str() + " is singular");
  auto S = singular_points(op, false);
  BallMatrix M = transition_matrix(op, path, prec, S.obstacles());
  if (as_json) {
    json rows = json::array();
    for (int i = 0; i < M.rows(); ++i) {
      json row = json::array();
      for (int k = 0; k < M.cols(); ++k) {
        auto m = M(i, k).mid();
        row.push_back({{"re", m.real()}, {"im", m.imag()}, {"rad", M(i, k).rad().to_double()}});
      }
      rows.push_back(row);
    }
    std::cout << json{{"schema_version", kSchemaVersion}, {"path", path_text}, {"matrix", rows}}.dump(2) << "\n";
    return kOk;
  }
  for (int i = 0; i < M.rows(); ++i) {
    for (int k = 0; k < M.cols(); ++k) std::cout << (k ? "  " : "") << M(i, k).str(12);
    std::cout << "\n";
  }
  return kOk;
}

int run_rational(const std::string& file, bool as_json) {
  DiffOp op = parse_operator(read_input(file));
  auto sols = rational_solutions(op);
  if (as_json) {
    json arr = json::array();
    for (const auto& u : sols) arr.push_back(u.str());
    std::cout << json{{"schema_version", kSchemaVersion}, {"rational_solutions", arr}}.dump(2) << "\n";
    return kOk;
  }
  if (sols.empty()) std::cout << "no nonzero rational solutions\n";
  for (const auto& u : sols) std::cout << u.str() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperexponential solutions of linear differential operators"};
  app.require_subcommand(1);

  SolverConfig cfg;
  std::string file = "-", base_point;
  auto* solve_cmd = app.add_subcommand("solve", "find all hyperexponential solutions");
  solve_cmd->add_option("--precision-bits", cfg.precision_bits, "initial working precision")->capture_default_str();
  solve_cmd->add_option("--max-restarts", cfg.max_restarts, "precision doublings allowed")->capture_default_str();
  solve_cmd->add_option("--restart-multiplier", cfg.restart_multiplier,
                        "restart when the candidate set exceeds this times the order")->capture_default_str();
  solve_cmd->add_option("--base-point", base_point, "ordinary point where subspaces are compared");
  solve_cmd->add_option("--truncation", cfg.truncation, "fixed series truncation order");
  solve_cmd->add_option("--radius-inflation", cfg.radius_inflation, "testing: widen every generator ball");
  solve_cmd->add_flag("--json", cfg.json, "machine-readable output");
  bool no_apparent = false;
  solve_cmd->add_flag("--no-apparent-check", no_apparent, "keep apparent singularities in the list");
  solve_cmd->add_option("file", file, "operator file, or - for stdin");

  std::string point;
  int order = -1, terms = 6;
  bool local_json = false;
  auto* local_cmd = app.add_subcommand("local-solutions", "exponential parts and log-free series at a point");
  local_cmd->add_option("point", point, "a Q(i) point or infinity")->required();
  local_cmd->add_option("file", file, "operator file, or - for stdin");
  local_cmd->add_option("--order", order, "truncation order");
  local_cmd->add_option("--terms", terms, "nonzero terms to print")->capture_default_str();
  local_cmd->add_flag("--json", local_json, "machine-readable output");

  std::string path_text;
  long tprec = 128;
  bool trans_json = false;
  auto* trans_cmd = app.add_subcommand("transition", "transition matrix along a polygonal path");
  trans_cmd->add_option("path", path_text, "comma separated waypoints, e.g. 0,1/2+I/2,1")->required();
  trans_cmd->add_option("file", file, "operator file, or - for stdin");
  trans_cmd->add_option("--precision-bits", tprec, "working precision")->capture_default_str();
  trans_cmd->add_flag("--json", trans_json, "machine-readable output");

  bool rat_json = false;
  auto* rat_cmd = app.add_subcommand("rational-solutions", "basis of the rational solutions");
  rat_cmd->add_option("file", file, "operator file, or - for stdin");
  rat_cmd->add_flag("--json", rat_json, "machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInternal;
  }

  try {
    if (*solve_cmd) {
      cfg.apparent_check = !no_apparent;
      if (!base_point.empty()) cfg.base_point = parse_scalar(base_point);
      return run_solve(file, cfg);
    }
    if (*local_cmd) return run_local(file, point, order, terms, local_json);
    if (*trans_cmd) {
      if (tprec < 53) throw InvalidConfig("precision must be at least 53 bits");
      return run_transition(file, path_text, tprec, trans_json);
    }
    if (*rat_cmd) return run_rational(file, rat_json);
  } catch (const SyntaxError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const NonPolynomialCoefficient& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const UnsupportedAlgebraicSingularity& e) {
    std::cerr << "unsupported input: " << e.what() << "\n";
    return kUnsupported;
  } catch (const PrecisionExhausted& e) {
    std::cerr << "precision exhausted: " << e.what() << "\n";
    return kPrecision;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
