#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rcurv/catalog.hpp"
#include "rcurv/integrate.hpp"
#include "rcurv/invariants.hpp"
#include "rcurv/suites.hpp"

using json = nlohmann::ordered_json;
using namespace rcurv;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitFailure = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::map<std::string, std::string>& anchors() {
  static const std::map<std::string, std::string> a{
      {"kronecker", "Lemma 5.1"},
      {"pfaffian-identities", "Lemma 5.2"},
      {"cgb", "Eq. (1.1)"},
      {"gbc", "Cor. 1.8"},
      {"ambient-ricci", "Lemma 3.1"},
      {"ambient-curvature", "Lemma 3.3"},
      {"ambient-christoffel", "Prop. 3.5"},
      {"ambient-laplacian", "Prop. 3.4"},
      {"p-routes", "Prop. 3.4; Cor. 1.8"},
      {"divergence", "Lemma 4.1; Rem. 3.7-3.8"},
      {"rvol", "Eq. (1.2); Cor. 1.7"},
      {"main-theorem", "Thm. 1.6"},
      {"worked-examples", "Sec. 5 Examples; Eq. (DeltaWeyl)"},
      {"straightenable", "Def. 1.5; Lemma 3.4"},
  };
  return a;
}

std::string anchor_of(const std::string& suite) {
  const auto it = anchors().find(suite);
  return it == anchors().end() ? std::string{} : it->second;
}

struct RunConfig {
  std::vector<std::string> suites;
  std::vector<std::string> manifolds;
  std::optional<double> tol;
  std::uint64_t seed = 42;
  std::optional<int> samples;
  std::optional<int> n;
  std::optional<int> nodes;
  std::optional<int> jet_order;
  std::string format = "json";
  std::string out;
  bool timing = true;
};

std::vector<std::string> split_list(const std::vector<std::string>& in) {
  std::vector<std::string> out;
  for (const auto& s : in) {
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Fills fields the command line left unset from a JSON document with the same keys.
void apply_config_file(const std::string& path, RunConfig& c, const CLI::App& app) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config file: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  const auto unset = [&](const char* flag) { return app.count(flag) == 0; };
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "suites" || key == "suite") {
        if (c.suites.empty()) c.suites = v.is_array() ? v.get<std::vector<std::string>>() : std::vector{v.get<std::string>()};
      } else if (key == "manifold" || key == "manifolds") {
        if (unset("--manifold"))
          c.manifolds = v.is_array() ? v.get<std::vector<std::string>>() : std::vector{v.get<std::string>()};
      } else if (key == "tol") {
        if (unset("--tol")) c.tol = v.get<double>();
      } else if (key == "seed") {
        if (unset("--seed")) c.seed = v.get<std::uint64_t>();
      } else if (key == "samples") {
        if (unset("--samples")) c.samples = v.get<int>();
      } else if (key == "n" || key == "dim") {
        if (unset("--n") && unset("--dim")) c.n = v.get<int>();
      } else if (key == "nodes") {
        if (unset("--nodes")) c.nodes = v.get<int>();
      } else if (key == "jet_order") {
        if (unset("--jet-order")) c.jet_order = v.get<int>();
      } else if (key == "format") {
        if (unset("--format")) c.format = v.get<std::string>();
      } else if (key == "out") {
        if (unset("--out")) c.out = v.get<std::string>();
      } else {
        throw ConfigError("config file: unknown key " + key);
      }
    }
  } catch (const json::type_error& e) {
    throw ConfigError(std::string("config file: ") + e.what());
  }
  if (c.format != "json" && c.format != "csv" && c.format != "table")
    throw ConfigError("format must be json, csv or table");
}

SuiteOptions to_options(const RunConfig& c) {
  SuiteOptions o;
  o.manifolds = c.manifolds;
  o.tol = c.tol;
  o.seed = c.seed;
  o.samples = c.samples;
  o.dim = c.n;
  o.nodes_per_axis = c.nodes;
  o.jet_order = c.jet_order;
  return o;
}

json to_json(const CheckReport& r, bool timing) {
  json j{{"id", r.id},           {"anchor", r.anchor}, {"lhs", r.lhs},   {"rhs", r.rhs},
         {"abs_err", r.abs_err}, {"rel_err", r.rel_err}, {"tol", r.tol}, {"pass", r.pass},
         {"criterion", r.criterion}};
  if (timing) j["wall_seconds"] = r.wall_seconds;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

void print_table(std::ostream& os, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (width.size() <= i) width.push_back(0);
      width[i] = std::max(width[i], row[i].size());
    }
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      line += row[i];
      if (i + 1 < row.size()) line += std::string(width[i] - row[i].size() + 2, ' ');
    }
    os << line << '\n';
  }
}

class ReportWriter {
 public:
  ReportWriter(std::ostream& os, std::string format, bool timing) : os_(os), format_(std::move(format)), timing_(timing) {
    if (format_ == "csv") {
      os_ << "id,anchor,lhs,rhs,abs_err,rel_err,tol,pass,criterion" << (timing_ ? ",wall_seconds" : "") << ",note\n";
    }
    if (format_ == "table") rows_.push_back({"id", "anchor", "lhs", "rhs", "abs_err", "rel_err", "tol", "pass"});
  }

  void write(const CheckReport& r) {
    if (format_ == "json") {
      os_ << to_json(r, timing_).dump() << '\n';
    } else if (format_ == "csv") {
      os_ << csv_field(r.id) << ',' << csv_field(r.anchor) << ',' << fmt(r.lhs, "%.17g") << ','
          << fmt(r.rhs, "%.17g") << ',' << fmt(r.abs_err, "%.3e") << ',' << fmt(r.rel_err, "%.3e") << ','
          << fmt(r.tol, "%.1e") << ',' << (r.pass ? "true" : "false") << ',' << r.criterion;
      if (timing_) os_ << ',' << fmt(r.wall_seconds, "%.4f");
      os_ << ',' << csv_field(r.note) << '\n';
    } else {
      rows_.push_back({r.id, r.anchor, fmt(r.lhs, "%.10g"), fmt(r.rhs, "%.10g"), fmt(r.abs_err, "%.2e"),
                       fmt(r.rel_err, "%.2e"), fmt(r.tol, "%.0e"), r.pass ? "PASS" : "FAIL"});
    }
    os_.flush();
  }

  ~ReportWriter() {
    if (format_ == "table") print_table(os_, rows_);
  }

 private:
  std::ostream& os_;
  std::string format_;
  bool timing_;
  std::vector<std::vector<std::string>> rows_;
};

struct SuiteSummary {
  std::string suite;
  int passed = 0, total = 0;
  double worst = 0.0, seconds = 0.0;
};

int run_verify(RunConfig c) {
  if (c.suites.empty()) throw ConfigError("no suite given; see `rcurv list`");
  if (std::find(c.suites.begin(), c.suites.end(), "all") != c.suites.end()) {
    c.suites.clear();
    for (const auto& s : suite_catalog()) c.suites.push_back(s.name);
  }
  const SuiteOptions opts = to_options(c);
  // every name is checked before anything is computed
  for (const auto& s : c.suites) {
    try {
      validate_suite(s, opts);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  std::ofstream file;
  if (!c.out.empty()) {
    file.open(c.out);
    if (!file) throw ConfigError("cannot open " + c.out + " for writing");
  }
  std::ostream& reports = c.out.empty() ? std::cout : file;
  std::ostream& summary_os = c.out.empty() ? std::cerr : std::cout;

  std::vector<SuiteSummary> summary;
  std::vector<std::string> failures;
  {
    ReportWriter writer(reports, c.format, c.timing);
    for (const auto& s : c.suites) {
      SuiteSummary sum{s};
      Stopwatch sw;
      std::vector<CheckReport> rs;
      try {
        rs = run_suite(s, opts);
      } catch (const std::exception& e) {
        CheckReport r;
        r.id = s + ":error";
        r.anchor = anchor_of(s);
        r.note = e.what();
        r.criterion = "none";
        rs.push_back(r);
      }
      for (auto& r : rs) {
        r.anchor = anchor_of(s);
        writer.write(r);
        ++sum.total;
        if (r.pass) {
          ++sum.passed;
        } else {
          failures.push_back(r.id + (r.note.empty() ? "" : " (" + r.note + ")"));
        }
        sum.worst = std::max(sum.worst, r.criterion == "rel" ? r.rel_err : std::min(r.abs_err, r.rel_err));
      }
      sum.seconds = sw.seconds();
      summary.push_back(sum);
    }
  }

  std::vector<std::vector<std::string>> rows{{"suite", "anchor", "passed", "worst_err", "seconds"}};
  int passed = 0, total = 0;
  for (const auto& s : summary) {
    rows.push_back({s.suite, anchor_of(s.suite), std::to_string(s.passed) + "/" + std::to_string(s.total),
                    fmt(s.worst, "%.2e"), c.timing ? fmt(s.seconds, "%.2f") : "-"});
    passed += s.passed;
    total += s.total;
  }
  rows.push_back({"total", "", std::to_string(passed) + "/" + std::to_string(total), "", ""});
  print_table(summary_os, rows);
  for (const auto& f : failures) std::cerr << "failed: " << f << '\n';
  return failures.empty() ? 0 : kExitFailure;
}

int run_list() {
  std::cout << "suites:\n";
  std::size_t w = 0;
  for (const auto& s : suite_catalog()) w = std::max(w, s.name.size());
  for (const auto& s : suite_catalog())
    std::cout << "  " << s.name << std::string(w - s.name.size(), ' ') << " → " << anchor_of(s.name) << "  ("
              << s.summary << ", tol " << fmt(s.default_tol, "%.0e") << ")\n";
  std::cout << "manifolds:\n";
  for (const auto& m : catalog_names()) std::cout << "  " << m << '\n';
  std::cout << "invariants (eval):\n  R  J  |Rm|^2  |W|^2  Delta|W|^2  Pf<l>  Pf<l>(W)\n";
  return 0;
}

int run_rvol(const std::string& space, int n, const std::string& format) {
  if (space != "hyperbolic") throw ConfigError("only --space hyperbolic is available");
  if (n < 2 || n % 2 != 0 || n > 16) throw ConfigError("--n must be even, between 2 and 16");
  const auto v = renormalized_volume(n);
  const double gb = conformally_flat_renormalized_volume(n);
  if (format == "json") {
    json terms = json::array();
    for (int e = -(n - 1); e <= 0; ++e)
      if (v.expansion.coefficient(e) != 0.0) terms.push_back({{"power", e}, {"coefficient", v.expansion.coefficient(e)}});
    std::cout << json{{"space", "hyperbolic"}, {"n", n}, {"value", v.value}, {"gauss_bonnet", gb}, {"expansion", terms}}.dump()
              << '\n';
  } else {
    std::cout << "V(H^" << n << ") = " << fmt(v.value, "%.15g") << "  (Gauss-Bonnet route " << fmt(gb, "%.15g") << ")\n";
  }
  return 0;
}

std::optional<int> parse_pfaffian(const std::string& s, bool& weyl) {
  if (s.rfind("Pf", 0) != 0) return std::nullopt;
  std::string rest = s.substr(2);
  weyl = false;
  if (rest.size() > 3 && rest.substr(rest.size() - 3) == "(W)") {
    weyl = true;
    rest.resize(rest.size() - 3);
  } else if (rest.size() > 4 && rest.substr(rest.size() - 4) == "(Rm)") {
    rest.resize(rest.size() - 4);
  }
  if (rest.empty() || rest.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
  return std::stoi(rest);
}

// Scalar invariant as a jet; `order` is the metric jet order it needs.
std::function<double(const Curvature&)> scalar_invariant(const std::string& name, int dim, int& order) {
  order = 2;
  if (name == "R") return [](const Curvature& g) { return g.scalar_curvature().value(); };
  if (name == "J") return [](const Curvature& g) { return g.schouten_trace().value(); };
  if (name == "|Rm|^2")
    return [](const Curvature& g) { return squared_norm(g.riemann(), g.inverse_metric()).value(); };
  if (name == "|W|^2") return [](const Curvature& g) { return squared_norm(g.weyl(), g.inverse_metric()).value(); };
  if (name == "Delta|W|^2") {
    order = 4;
    return [](const Curvature& g) { return g.laplacian(squared_norm(g.weyl(), g.inverse_metric())).value(); };
  }
  bool weyl = false;
  if (const auto l = parse_pfaffian(name, weyl)) {
    if (2 * *l > dim) throw ConfigError(name + " needs dimension at least " + std::to_string(2 * *l));
    return [l = *l, weyl](const Curvature& g) {
      return pf_ell(values(weyl ? g.weyl() : g.riemann()), l, values(g.inverse_metric()));
    };
  }
  throw ConfigError("unknown invariant " + name + "; see `rcurv list`");
}

int run_eval(const RunConfig& c, const std::string& invariant, const std::vector<double>& point, bool integrate) {
  if (c.manifolds.size() != 1) throw ConfigError("eval takes exactly one --manifold");
  ManifoldModel m;
  try {
    m = model_by_name(c.manifolds.front());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  int order = 0;
  const auto f = scalar_invariant(invariant, m.dim, order);
  if (c.jet_order && *c.jet_order < order)
    throw ConfigError(invariant + " needs metric jets of order " + std::to_string(order));
  if (!point.empty() && static_cast<int>(point.size()) != m.dim)
    throw ConfigError("--point needs " + std::to_string(m.dim) + " coordinates");
  if (integrate && !m.compact) throw ConfigError("--integrate needs a compact manifold");
  const std::vector<double> x = point.empty() ? m.base_point : point;

  json j{{"manifold", m.name}, {"invariant", invariant}, {"point", x}, {"value", f(m.curvature(x, order))}};
  if (integrate) {
    IntegrateOptions io;
    if (c.nodes) io.nodes_per_axis = *c.nodes;
    j["integral"] = integrate_scalar([&](std::span<const double> p) { return f(m.curvature(p, order)); }, m, io);
  }
  if (c.format == "json") {
    std::cout << j.dump() << '\n';
  } else {
    std::cout << invariant << " on " << m.name << " = " << fmt(j["value"].get<double>(), "%.15g") << '\n';
    if (integrate) std::cout << "integral = " << fmt(j["integral"].get<double>(), "%.15g") << '\n';
  }
  return 0;
}

void add_run_flags(CLI::App* app, RunConfig& c, std::string& config_path) {
  app->add_option("--manifold", c.manifolds, "catalog manifold name(s), comma separated")->delimiter(',');
  app->add_option("--tol", c.tol, "tolerance override for every check");
  app->add_option("--seed", c.seed, "seed for random points and tensors");
  app->add_option("--samples", c.samples, "random samples per check");
  app->add_option("--n,--dim", c.n, "dimension filter");
  app->add_option("--nodes", c.nodes, "Gauss-Legendre nodes per chart axis");
  app->add_option("--jet-order", c.jet_order, "cap on the metric jet order");
  app->add_option("--format", c.format, "report format")->check(CLI::IsMember({"json", "csv", "table"}));
  app->add_option("--out", c.out, "write reports to this path");
  app->add_option("--config", config_path, "JSON file with the same keys as the flags");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rcurv: curvature invariants, ambient metrics and renormalized volumes"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;

  auto* verify = app.add_subcommand("verify", "run verification suites");
  verify->add_option("suites", cfg.suites, "suite names, or `all`");
  add_run_flags(verify, cfg, config_path);
  verify->add_flag("--timing,!--no-timing", cfg.timing, "include wall times in reports (default on)");

  auto* list = app.add_subcommand("list", "list suites, manifolds and invariants");

  auto* rvol = app.add_subcommand("rvol", "renormalized volume");
  std::string space = "hyperbolic";
  int rvol_n = 4;
  std::string rvol_format = "table";
  rvol->add_option("--space", space, "model space")->check(CLI::IsMember({"hyperbolic"}));
  rvol->add_option("--n", rvol_n, "dimension");
  rvol->add_option("--format", rvol_format)->check(CLI::IsMember({"json", "csv", "table"}));

  auto* eval = app.add_subcommand("eval", "evaluate a scalar invariant");
  std::string invariant;
  std::vector<double> point;
  bool integrate = false;
  eval->add_option("invariant", invariant, "R, J, |Rm|^2, |W|^2, Delta|W|^2, Pf<l>, Pf<l>(W)")->required();
  add_run_flags(eval, cfg, config_path);
  eval->add_option("--point", point, "chart coordinates, comma separated")->delimiter(',');
  eval->add_flag("--integrate", integrate, "also integrate over the manifold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*list) return run_list();
    if (*rvol) return run_rvol(space, rvol_n, rvol_format);
    auto* sub = *verify ? verify : eval;
    if (!config_path.empty()) apply_config_file(config_path, cfg, *sub);
    cfg.manifolds = split_list(cfg.manifolds);
    if (*verify) return run_verify(cfg);
    return run_eval(cfg, invariant, point, integrate);
  } catch (const ConfigError& e) {
    std::cerr << "rcurv: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "rcurv: " << e.what() << '\n';
    return kExitFailure;
  }
}
