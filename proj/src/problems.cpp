#include "wsvie/problems.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wsvie/error.hpp"

namespace wsvie {

namespace {

const BrownianPath& require_path(const BrownianPath* path, const char* who) {
  if (!path) throw ConfigError(std::string(who) + " needs a Brownian path");
  return *path;
}

SVIEProblem example1(const RegistryOptions& options) {
  const double scale = options.twelfth_prefactor ? 1.0 / 12.0 : 1.0;
  SVIEProblem p;
  p.name = "example1";
  p.horizon = 0.5;
  p.forcing = [](double, const BrownianPath*) { return 1.0; };
  p.drift_kernel = [](double s, double) { return std::cos(s); };
  p.diffusion_kernel = [](double s, double) { return std::sin(s); };
  p.exact = [scale](double t, const BrownianPath* path) {
    const double noise =
        ito_integral_at(require_path(path, "example1 exact"), [](double s) { return std::sin(s); }, t);
    return scale * std::exp(-t / 4.0 + std::sin(t) + std::sin(2.0 * t) / 8.0 + noise);
  };
  return p;
}

SVIEProblem example2() {
  SVIEProblem p;
  p.name = "example2";
  p.horizon = 1.0;
  p.forcing = [](double t, const BrownianPath* path) {
    const double t2 = t * t;
    return t2 + std::sin(1.0 + t) - std::cos(1.0 + t) - 2.0 * std::sin(t) - 7.0 * t2 * t2 / 12.0 +
           require_path(path, "example2 forcing").value_at(t) / 40.0;
  };
  p.drift_kernel = [](double s, double t) { return s + t; };
  p.diffusion_kernel = [](double s, double t) { return std::exp(-3.0 * (s + t)); };
  return p;
}

SVIEProblem stock() {
  SVIEProblem p;
  p.name = "stock";
  p.horizon = 1.0;
  p.forcing = [](double, const BrownianPath*) { return 0.1; };
  p.drift_kernel = [](double s, double) { return std::log1p(s); };
  p.diffusion_kernel = [](double s, double) { return s; };
  p.exact = [](double t, const BrownianPath* path) {
    const double noise =
        ito_integral_at(require_path(path, "stock exact"), [](double s) { return s; }, t);
    return 0.1 * std::exp((1.0 + t) * std::log1p(t) - t - t * t * t / 6.0 + noise);
  };
  return p;
}

SVIEProblem bond() {
  SVIEProblem p;
  p.name = "bond";
  p.horizon = 1.0;
  p.forcing = [](double, const BrownianPath*) { return 1.0; };
  p.drift_kernel = [](double s, double) { return std::sin(s); };
  p.diffusion_kernel = [](double, double) { return 0.0; };
  p.exact = [](double t, const BrownianPath*) { return std::exp(1.0 - std::cos(t)); };
  return p;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

expr::Expr parse_field(const std::string& key, const std::string& src) {
  try {
    return expr::parse(src);
  } catch (const expr::SyntaxError& e) {
    throw ConfigError("problem field '" + key + "': " + e.what());
  }
}

// Rethrows evaluation failures as EvaluationError so callers see one type.
double run(const expr::Expr& e, const expr::EvalEnv& env) {
  try {
    return e.evaluate(env);
  } catch (const expr::EvalError& err) {
    throw EvaluationError("'" + e.source() + "': " + err.what());
  }
}

} // namespace

std::vector<std::string> registry_names() { return {"example1", "example2", "stock", "bond"}; }

SVIEProblem registry_lookup(std::string_view name, const RegistryOptions& options) {
  if (name == "example1") return example1(options);
  if (name == "example2") return example2();
  if (name == "stock") return stock();
  if (name == "bond") return bond();
  std::string known;
  for (const auto& n : registry_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown problem '" + std::string(name) + "'; available: " + known);
}

ProblemFile parse_problem_file(std::string_view text) {
  ProblemFile out;
  bool have_f = false, have_k1 = false, have_k2 = false;
  std::istringstream in{std::string(text)};
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("problem file line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(std::string_view(stripped).substr(0, eq));
    const std::string value = trim(std::string_view(stripped).substr(eq + 1));
    if (key == "name") {
      out.name = value;
    } else if (key == "T") {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc{} || ptr != value.data() + value.size() || !(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError("problem file line " + std::to_string(lineno) +
                          ": T must be a positive number");
      }
      out.horizon = v;
    } else if (key == "f") {
      out.f = value, have_f = true;
    } else if (key == "k1") {
      out.k1 = value, have_k1 = true;
    } else if (key == "k2") {
      out.k2 = value, have_k2 = true;
    } else if (key == "exact") {
      out.exact = value;
    } else {
      throw ConfigError("problem file line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  if (!have_f || !have_k1 || !have_k2) throw ConfigError("problem file needs f, k1 and k2");
  if (out.name.empty()) out.name = "file";
  return out;
}

ProblemFile read_problem_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open problem file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  ProblemFile file = parse_problem_file(buf.str());
  if (file.name == "file") file.name = std::filesystem::path(path).stem().string();
  return file;
}

SVIEProblem bind_problem(const ProblemFile& file) {
  const expr::Expr f = parse_field("f", file.f);
  const expr::Expr k1 = parse_field("k1", file.k1);
  const expr::Expr k2 = parse_field("k2", file.k2);

  if (f.usage().s) throw ConfigError("problem field 'f' may not use s");
  for (const auto* k : {&k1, &k2}) {
    if (k->usage().brownian) {
      throw ConfigError("kernel '" + k->source() + "' may not use B(...) or ito(...)");
    }
  }

  SVIEProblem p;
  p.name = file.name;
  p.horizon = file.horizon;
  p.forcing = [f](double t, const BrownianPath* path) { return run(f, {t, std::nullopt, path}); };
  p.drift_kernel = [k1](double s, double t) { return run(k1, {t, s, nullptr}); };
  p.diffusion_kernel = [k2](double s, double t) { return run(k2, {t, s, nullptr}); };
  if (file.exact) {
    const expr::Expr exact = parse_field("exact", *file.exact);
    if (exact.usage().s) throw ConfigError("problem field 'exact' may use s only inside ito(...)");
    p.exact = [exact](double t, const BrownianPath* path) {
      return run(exact, {t, std::nullopt, path});
    };
  }
  return p;
}

} // namespace wsvie
