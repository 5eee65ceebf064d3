#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "qstar/bounds.hpp"
#include "qstar/errors.hpp"
#include "qstar/harness.hpp"
#include "qstar/hypq.hpp"
#include "qstar/starlike.hpp"

namespace qstar::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  // A single-row table printed as "key: value" lines in plain mode and as an
  // object in JSON.
  bool record = false;

  void add(std::string key, Cell value) {
    record = true;
    columns.push_back(std::move(key));
    if (rows.empty()) rows.emplace_back();
    rows.front().push_back(std::move(value));
  }
};

Cell cell(const ExtendedReal& v) {
  if (v.is_finite()) return v.value();
  return std::string("-inf");
}

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

nlohmann::ordered_json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isfinite(*d)) return *d;
    return format_number(*d);
  }
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

void render(const Table& t, Format format, std::ostream& out) {
  switch (format) {
    case Format::json: {
      auto row_json = [&](const std::vector<Cell>& row) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t k = 0; k < t.columns.size(); ++k) obj[t.columns[k]] = cell_json(row[k]);
        return obj;
      };
      if (t.record) {
        out << row_json(t.rows.front()).dump(2) << '\n';
      } else {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& row : t.rows) arr.push_back(row_json(row));
        out << arr.dump(2) << '\n';
      }
      return;
    }
    case Format::csv:
    case Format::plain: {
      if (format == Format::plain && t.record) {
        for (std::size_t k = 0; k < t.columns.size(); ++k) {
          out << t.columns[k] << ": " << cell_text(t.rows.front()[k]) << '\n';
        }
        return;
      }
      const char sep = format == Format::csv ? ',' : ' ';
      for (std::size_t k = 0; k < t.columns.size(); ++k) {
        out << (k ? std::string(1, sep) : "") << t.columns[k];
      }
      out << '\n';
      for (const auto& row : t.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
          out << (k ? std::string(1, sep) : "") << cell_text(row[k]);
        }
        out << '\n';
      }
      return;
    }
  }
}

struct PhiArgs {
  double a = 0.0, b = 0.0, c = 0.0, q = 0.5;

  void attach(CLI::App* cmd) {
    cmd->add_option("--a", a, "numerator parameter a")->required();
    cmd->add_option("--b", b, "numerator parameter b")->required();
    cmd->add_option("--c", c, "denominator parameter c")->required();
    cmd->add_option("--q", q, "base q in (0, 1)")->required();
  }
  PhiParams params() const { return PhiParams::make(a, b, c, q); }
};

struct ComplexArg {
  std::optional<double> re_only, re, im;

  void attach(CLI::App* cmd, const std::string& name) {
    auto* single = cmd->add_option("--" + name, re_only, "real value of " + name);
    auto* r = cmd->add_option("--" + name + "-re", re, "real part of " + name);
    auto* i = cmd->add_option("--" + name + "-im", im, "imaginary part of " + name);
    single->excludes(r)->excludes(i);
  }
  std::optional<cplx> value() const {
    if (re_only) return cplx{*re_only, 0.0};
    if (re || im) return cplx{re.value_or(0.0), im.value_or(0.0)};
    return std::nullopt;
  }
};

CaratheodoryMixture read_mixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open mixture file '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError("mixture file is not valid JSON: " + std::string(e.what()));
  }
  if (!doc.contains("weights") || !doc.contains("phases")) {
    throw ParameterError("mixture file needs \"weights\" and \"phases\" arrays");
  }
  const auto weights = doc.at("weights").get<std::vector<double>>();
  std::vector<cplx> phases;
  for (double angle : doc.at("phases").get<std::vector<double>>()) {
    phases.push_back(std::polar(1.0, angle));
  }
  return CaratheodoryMixture(weights, phases);
}

Table certificate_table(const SuiteReport& report) {
  Table t;
  t.columns = {"index", "theorem_id", "lhs", "rhs", "margin", "verdict"};
  long long k = 0;
  for (const auto& c : report.certificates) {
    t.rows.push_back({k++, to_string(c.theorem_id), c.lhs, c.rhs, c.margin,
                      std::string(c.pass ? "pass" : "fail")});
  }
  return t;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliConfig config;
  CLI::App app{"q-starlikeness toolkit: Heine series, orders and coefficient bounds", "qstar"};
  app.require_subcommand(1);
  app.fallthrough();
  const std::map<std::string, Format> formats{
      {"plain", Format::plain}, {"json", Format::json}, {"csv", Format::csv}};
  app.add_option("--format", config.output_format, "output format: plain, json or csv")
      ->transform(CLI::CheckedTransformer(formats));
  app.add_option("--out", config.output_path, "write output to this file");
  app.add_option("--seed", config.seed, "random seed");
  app.add_option("--tol", config.precision, "numerical tolerance")
      ->check(CLI::PositiveNumber);

  // phi
  auto* phi = app.add_subcommand("phi", "evaluate Phi[a,b;c;q,z]");
  PhiArgs phi_args;
  phi_args.attach(phi);
  ComplexArg phi_z;
  phi_z.attach(phi, "z");
  bool shifted = false;
  phi->add_flag("--shifted", shifted, "multiply by z");

  // sigma
  auto* sigma = app.add_subcommand("sigma", "order of q-starlikeness of z Phi[a,b;c;q,rz]");
  PhiArgs sigma_args;
  sigma_args.attach(sigma);
  double sigma_r = 1.0;
  std::string method = "closed";
  sigma->add_option("--r", sigma_r, "radius in (0, 1]");
  sigma->add_option("--method", method, "closed, grid or both")
      ->check(CLI::IsMember({"closed", "grid", "both"}));

  // bounds
  auto* bounds = app.add_subcommand("bounds", "coefficient bounds");
  std::string kind;
  double bounds_q = 0.5;
  unsigned bounds_n = 2;
  ComplexArg mu;
  bounds->add_option("kind", kind, "bieberbach, fs or hankel")
      ->required()
      ->check(CLI::IsMember({"bieberbach", "fs", "hankel"}));
  bounds->add_option("--q", bounds_q, "base q in (0, 1)")->required();
  bounds->add_option("--n", bounds_n, "coefficient index (bieberbach)");
  mu.attach(bounds, "mu");

  // coeffs
  auto* coeffs = app.add_subcommand("coeffs", "Taylor coefficients a_1..a_n for a p-kernel");
  std::string coeff_kernel;
  std::string coeff_mixture;
  double coeff_q = 0.5;
  std::size_t coeff_n = 10;
  coeffs->add_option("kernel", coeff_kernel, "F, G or mixture")
      ->required()
      ->check(CLI::IsMember({"F", "G", "mixture"}));
  coeffs->add_option("--q", coeff_q, "base q in (0, 1)")->required();
  coeffs->add_option("--n", coeff_n, "number of coefficients")->check(CLI::PositiveNumber);
  coeffs->add_option("--mixture", coeff_mixture, "JSON file with weights and phases");

  // trace
  auto* trace = app.add_subcommand("trace", "w = z D_q f / f on a circle");
  std::string fspec;
  double trace_q = 0.5;
  double trace_radius = 0.99;
  int n_theta = 360;
  std::optional<double> ta, tb, tc;
  std::string trace_mixture;
  trace->add_option("--f", fspec, "phi, F, G, identity or mixture")->required();
  trace->add_option("--q", trace_q, "base q in (0, 1)")->required();
  trace->add_option("--radius", trace_radius, "circle radius in (0, 1)");
  trace->add_option("--n-theta", n_theta, "number of angles")->check(CLI::PositiveNumber);
  trace->add_option("--a", ta, "phi parameter a");
  trace->add_option("--b", tb, "phi parameter b");
  trace->add_option("--c", tc, "phi parameter c");
  trace->add_option("--mixture", trace_mixture, "JSON file with weights and phases");

  // verify
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  std::string suite = "all";
  int n_cases = 25;
  verify->add_option("--suite", suite, "sigma, bieberbach, fs, hankel, lemmas, limits, "
                                       "containment or all");
  verify->add_option("--n-cases", n_cases, "cases per suite");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  std::ofstream file;
  if (!config.output_path.empty()) {
    file.open(config.output_path);
    if (!file) {
      err << "error: cannot open output file '" << config.output_path << "'\n";
      return kExitInvalid;
    }
  }
  std::ostream& sink = config.output_path.empty() ? out : file;

  try {
    Table table;
    if (phi->parsed()) {
      const auto z = phi_z.value();
      if (!z) throw ParameterError("phi needs --z or --z-re/--z-im");
      cplx v = phi_eval(phi_args.params(), *z, config.precision);
      if (shifted) v *= *z;
      table.add("re", v.real());
      table.add("im", v.imag());
    } else if (sigma->parsed()) {
      SigmaOptions options;
      options.with_grid = method != "closed";
      const auto report = sigma_q_phi(sigma_args.params(), sigma_r, options);
      if (method != "grid") table.add("closed_form", cell(report.closed_form));
      if (report.grid_estimate) table.add("grid_estimate", *report.grid_estimate);
      if (method == "both") {
        table.add("difference", *report.grid_estimate - report.closed_form.value());
      }
      table.add("lower_bound", cell(report.lower_bound));
      table.add("upper_bound", report.upper_bound);
      table.add("s", report.s);
      table.add("rho", report.rho);
    } else if (bounds->parsed()) {
      const QParam q(bounds_q);
      if (kind == "bieberbach") {
        if (bounds_n < 2) throw ParameterError("bieberbach bound needs n >= 2");
        table.add("bound", bieberbach_bound(q, bounds_n));
      } else if (kind == "fs") {
        const auto m = mu.value();
        if (!m) throw ParameterError("fs bound needs --mu or --mu-re/--mu-im");
        const auto b = fekete_szego_bound(q, *m);
        table.add("bound", b.value);
        table.add("active_extremal",
                  std::string(b.active == FsBranch::F_extremal ? "F" : "G"));
      } else {
        table.add("bound", hankel2_bound(q));
      }
    } else if (coeffs->parsed()) {
      const QParam q(coeff_q);
      std::optional<NormalizedSeries> series;
      if (coeff_kernel == "F") {
        series = extremal_F_coeffs(q, coeff_n);
      } else if (coeff_kernel == "G") {
        series = extremal_G_coeffs(q, coeff_n);
      } else {
        if (coeff_mixture.empty()) throw ParameterError("mixture kernel needs --mixture FILE");
        const auto m = read_mixture(coeff_mixture);
        series = coeffs_from_p(m.coefficients(coeff_n - 1), q, coeff_n);
      }
      table.columns = {"n", "re", "im"};
      for (std::size_t n = 1; n <= coeff_n; ++n) {
        const cplx a = series->a(n);
        table.rows.push_back({static_cast<long long>(n), a.real(), a.imag()});
      }
    } else if (trace->parsed()) {
      const QParam q(trace_q);
      if (!(trace_radius > 0.0 && trace_radius < 1.0)) {
        throw ParameterError("trace radius must lie in (0, 1)");
      }
      std::optional<NormalizedFunction> f;
      if (fspec == "phi") {
        if (!ta || !tb || !tc) throw ParameterError("f-spec phi needs --a, --b and --c");
        f = shifted_phi_function(PhiParams::make(*ta, *tb, *tc, trace_q), 1.0);
      } else if (fspec == "F") {
        f = extremal_F_function(q);
      } else if (fspec == "G") {
        f = extremal_G_function(q);
      } else if (fspec == "identity") {
        f = NormalizedFunction::from_series(NormalizedSeries::identity());
      } else if (fspec == "mixture") {
        if (trace_mixture.empty()) throw ParameterError("f-spec mixture needs --mixture FILE");
        f = kernel_function(q, [m = read_mixture(trace_mixture)](cplx z) { return m(z); },
                            "mixture");
      } else {
        throw ParameterError("malformed f-spec '" + fspec +
                             "': expected phi, F, G, identity or mixture");
      }
      table.columns = {"theta", "re_w", "im_w"};
      for (int k = 0; k < n_theta; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / n_theta;
        const cplx w = starlike_ratio(*f, std::polar(trace_radius, theta), q);
        table.rows.push_back({theta, w.real(), w.imag()});
      }
    } else if (verify->parsed()) {
      const auto report = run_suite(suite, static_cast<std::uint64_t>(config.seed), n_cases);
      if (config.output_format == Format::json) {
        sink << to_json(report) << '\n';
      } else if (config.output_format == Format::csv) {
        render(certificate_table(report), Format::csv, sink);
      } else {
        sink << "suite: " << report.suite_id << '\n'
             << "seed: " << report.seed << '\n'
             << "n_cases: " << report.n_cases << '\n'
             << "certificates: " << report.certificates.size() << '\n'
             << "failures: " << report.failures << '\n';
        for (const auto& c : report.certificates) {
          if (c.pass) continue;
          sink << "fail " << to_string(c.theorem_id) << " lhs=" << format_number(c.lhs)
               << " rhs=" << format_number(c.rhs) << " margin=" << format_number(c.margin)
               << '\n';
        }
      }
      return report.failures > 0 ? kExitFailures : kExitOk;
    }
    render(table, config.output_format, sink);
    return kExitOk;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const ConsistencyError& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitInvalid;
}

}  // namespace qstar::cli
