#include "cli.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "qtwist/analysis.hpp"
#include "qtwist/coeffs.hpp"
#include "qtwist/errors.hpp"
#include "qtwist/family.hpp"
#include "qtwist/ntcore.hpp"
#include "qtwist/parallel.hpp"
#include "qtwist/randmodel.hpp"

namespace qtwist::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

/// Raised for invalid combinations that CLI11 cannot see (e.g. moment order 0).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string command;
  std::uint64_t N = 10000;
  std::optional<double> Y;
  double t = 0.0;
  std::string provider = "trivial";
  std::uint64_t seed = 1;
  std::uint64_t samples = 100000;
  std::optional<double> R;
  std::optional<double> r;
  std::optional<std::size_t> grid;
  std::string out = "-";
  std::string format;
  std::optional<unsigned> threads;
  std::optional<double> eta;
  std::uint64_t P = 100000;
  std::optional<double> U;
  double model_Y = 1e5;
  std::string pairs = "1,0;1,1;2,0";
  double umax = 5.0;
  double X = 1000.0;
  std::size_t max_points = 0;
  double budget = kDefaultTupleBudget;
  std::optional<double> A1, A2;
  bool quiet = false;
};

struct Result {
  std::string body;
  std::string summary;              // one line for the terminal
  std::vector<std::string> failed;  // internal checks that did not pass
};

std::string num(double x) { return fmt::format("{:.17g}", x); }

/// Log-log scale (log log N)^2 / log N used by the discrepancy and small-value
/// normalizations.
double log_ratio(std::uint64_t N) {
  const double l = std::log(static_cast<double>(N));
  return std::pow(std::log(l), 2) / l;
}

class Context {
 public:
  Context(const Options& o, std::ostream& err) : o_(o), err_(err) {}

  const Options& opts() const { return o_; }

  std::shared_ptr<const SatakeProvider> provider() {
    if (!provider_) {
      provider_ = std::make_shared<const SatakeProvider>(
          o_.provider == "trivial" ? trivial_provider() : file_provider(o_.provider));
      for (const auto& w : provider_->warnings()) progress("warning: " + w);
    }
    return provider_;
  }

  double family_length() const { return o_.Y.value_or(FamilyConfig::default_length(o_.N)); }

  FamilyConfig family_config() {
    FamilyConfig cfg;
    cfg.N = o_.N;
    cfg.Y = family_length();
    cfg.t = o_.t;
    cfg.provider = provider();
    cfg.validate();
    return cfg;
  }

  const ComplexSampleSet& family() {
    if (!family_) {
      const auto cfg = family_config();
      progress(fmt::format("sweeping F({}) at Y = {}", cfg.N, num(cfg.Y)));
      family_ = family_sweep(cfg);
    }
    return *family_;
  }

  int dimension() { return provider()->is_self_dual_at(o_.t) ? 1 : 2; }

  CharFnGrid model_grid(std::span<const double> u, std::span<const double> v) {
    progress(fmt::format("model characteristic function, P = {}, {} x {} points", o_.P, u.size(),
                         v.size()));
    return ModelCharFn(*provider(), o_.t, o_.P).grid(u, v);
  }

  /// Inverted model density with the default output grid for the dimension.
  DensityGrid model_density() {
    const int dim = dimension();
    const std::size_t points = o_.grid.value_or(dim == 1 ? 513 : 129);
    const auto axis = symmetric_axis(half_width(), points | 1u);
    const std::vector<double> zero{0.0};
    const CharFnGrid grid = dim == 1 ? model_grid(axis, zero) : model_grid(axis, axis);
    return invert_density(grid, half_width(), DensitySpec::default_for(dim));
  }

  /// The planar model decays more slowly, so its inversion box is wider.
  double half_width() { return o_.U.value_or(dimension() == 1 ? 8.0 : 16.0); }

  void progress(const std::string& message) const {
    if (!o_.quiet) err_ << "[qtwist] " << message << '\n';
  }

  /// Effective configuration for the given keys, echoed into outputs.
  json config(std::initializer_list<const char*> keys) {
    json c;
    c["command"] = o_.command;
    for (const std::string key : keys) {
      if (key == "N") c["N"] = o_.N;
      else if (key == "Y") c["Y"] = family_length();
      else if (key == "t") c["t"] = o_.t;
      else if (key == "provider") c["provider"] = provider()->id();
      else if (key == "seed") c["seed"] = o_.seed;
      else if (key == "samples") c["samples"] = o_.samples;
      else if (key == "P") c["P"] = o_.P;
      else if (key == "U") c["U"] = half_width();
      else if (key == "model_Y") c["model_Y"] = o_.model_Y;
      else if (key == "umax") c["umax"] = o_.umax;
      else if (key == "X") c["X"] = o_.X;
      else if (key == "max_points") c["max_points"] = o_.max_points;
      else if (key == "budget") c["budget"] = o_.budget;
      else if (key == "pairs") c["pairs"] = o_.pairs;
    }
    return c;
  }

 private:
  const Options& o_;
  std::ostream& err_;
  std::shared_ptr<const SatakeProvider> provider_;
  std::optional<ComplexSampleSet> family_;
};

bool want_json(const Options& o, const char* fallback) {
  return (o.format.empty() ? std::string(fallback) : o.format) == "json";
}

std::string csv_preamble(const json& config) { return "# config " + config.dump() + "\n"; }

std::string json_document(const json& doc) { return doc.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Commands

Result cmd_discriminants(Context& ctx) {
  const auto& o = ctx.opts();
  const auto family = enumerate_discriminants(o.N);
  Result r;
  std::string body;
  body.reserve(family.size() * 8);
  for (const auto& d : family) {
    body += std::to_string(d.value());
    body += '\n';
  }
  r.body = std::move(body);
  const double expected = 6.0 / (std::numbers::pi * std::numbers::pi) * static_cast<double>(o.N);
  r.summary = fmt::format("N={} count={} expected={} relative_deviation={}", o.N, family.size(),
                          num(expected), num((static_cast<double>(family.size()) - expected) / expected));
  return r;
}

Result cmd_sweep(Context& ctx) {
  const auto& set = ctx.family();
  const json config = ctx.config({"N", "Y", "t", "provider"});
  Result r;
  if (want_json(ctx.opts(), "csv")) {
    json doc;
    doc["config"] = config;
    doc["dimension"] = set.dimension;
    json values = json::array();
    for (std::size_t i = 0; i < set.size(); ++i) {
      values.push_back({{"D", set.labels[i]}, {"re", set.values[i].real()}, {"im", set.values[i].imag()}});
    }
    doc["values"] = std::move(values);
    r.body = json_document(doc);
  } else {
    std::string body = csv_preamble(config) + "D,re,im\n";
    for (std::size_t i = 0; i < set.size(); ++i) {
      body += fmt::format("{},{},{}\n", set.labels[i], num(set.values[i].real()), num(set.values[i].imag()));
    }
    r.body = std::move(body);
  }
  r.summary = fmt::format("{} values, second moment {}", set.size(), num(sample_moment(set, 1, 1).real()));
  return r;
}

std::vector<std::pair<unsigned, unsigned>> parse_pairs(const std::string& text) {
  std::vector<std::pair<unsigned, unsigned>> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ';');) {
    unsigned j = 0, l = 0;
    char comma = 0;
    std::istringstream is(item);
    if (!(is >> j >> comma >> l) || comma != ',') throw UsageError("bad --pairs entry '" + item + "'");
    if (j + l == 0) throw UsageError("moment order (0,0) is not allowed");
    out.emplace_back(j, l);
  }
  if (out.empty()) throw UsageError("--pairs is empty");
  return out;
}

Result cmd_moments(Context& ctx) {
  const auto& o = ctx.opts();
  const auto pairs = parse_pairs(o.pairs);
  const auto& set = ctx.family();
  const PrimePowerSeries series(*ctx.provider(), ctx.family_length(), o.t);
  const json config = ctx.config({"N", "Y", "t", "provider", "samples", "seed", "budget", "pairs"});

  json records = json::array();
  for (const auto& [j, l] : pairs) {
    const Complex arith = sample_moment(set, j, l);
    json rec;
    rec["j"] = j;
    rec["l"] = l;
    rec["N"] = o.N;
    rec["Y"] = ctx.family_length();
    rec["t"] = o.t;
    rec["re"] = arith.real();
    rec["im"] = arith.imag();
    Complex exact;
    try {
      exact = exact_moment(series, j, l, o.budget);
      rec["exact_method"] = "enumeration";
      rec["stderr"] = 0.0;
    } catch (const BudgetError& e) {
      ctx.progress(fmt::format("({},{}): {}", j, l, e.what()));
      const auto mc = mc_moment(j, l, ctx.family_length(), o.t, *ctx.provider(), o.samples, o.seed);
      exact = mc.estimate;
      rec["exact_method"] = "monte-carlo";
      rec["stderr"] = mc.standard_error;
    }
    rec["exact_re"] = exact.real();
    rec["exact_im"] = exact.imag();
    rec["abs_diff"] = std::abs(arith - exact);
    records.push_back(std::move(rec));
  }

  Result r;
  if (want_json(o, "json")) {
    r.body = json_document({{"config", config}, {"moments", records}});
  } else {
    std::string body = csv_preamble(config) + "j,l,N,Y,t,re,im,exact_method,exact_re,exact_im,stderr,abs_diff\n";
    for (const auto& rec : records) {
      body += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", rec["j"].get<unsigned>(),
                          rec["l"].get<unsigned>(), o.N, num(rec["Y"]), num(rec["t"]), num(rec["re"]),
                          num(rec["im"]), rec["exact_method"].get<std::string>(), num(rec["exact_re"]),
                          num(rec["exact_im"]), num(rec["stderr"]), num(rec["abs_diff"]));
    }
    r.body = std::move(body);
  }
  r.summary = fmt::format("{} moment records", records.size());
  return r;
}

Result cmd_charfn(Context& ctx) {
  const auto& o = ctx.opts();
  const auto axis = symmetric_axis(o.umax, o.grid.value_or(11));
  const CharFnGrid emp = empirical_charfn_grid(ctx.family(), axis, axis);
  const CharFnGrid model = ctx.model_grid(axis, axis);
  const json config = ctx.config({"N", "Y", "t", "provider", "P", "umax"});
  double sup = 0.0;
  for (std::size_t i = 0; i < emp.values.size(); ++i) sup = std::max(sup, std::abs(emp.values[i] - model.values[i]));

  Result r;
  if (want_json(o, "csv")) {
    json values = json::array();
    for (std::size_t i = 0; i < axis.size(); ++i) {
      for (std::size_t k = 0; k < axis.size(); ++k) {
        values.push_back({{"u", axis[i]}, {"v", axis[k]},
                          {"emp_re", emp.at(i, k).real()}, {"emp_im", emp.at(i, k).imag()},
                          {"model_re", model.at(i, k).real()}, {"model_im", model.at(i, k).imag()}});
      }
    }
    r.body = json_document({{"config", config}, {"sup_diff", sup}, {"values", values}});
  } else {
    std::string body = csv_preamble(config) + "u,v,emp_re,emp_im,model_re,model_im\n";
    for (std::size_t i = 0; i < axis.size(); ++i) {
      for (std::size_t k = 0; k < axis.size(); ++k) {
        body += fmt::format("{},{},{},{},{},{}\n", num(axis[i]), num(axis[k]), num(emp.at(i, k).real()),
                            num(emp.at(i, k).imag()), num(model.at(i, k).real()), num(model.at(i, k).imag()));
      }
    }
    r.body = std::move(body);
  }
  r.summary = fmt::format("sup |Phi_F - Phi_rand| = {}", num(sup));
  return r;
}

Result cmd_density(Context& ctx) {
  const auto& o = ctx.opts();
  const DensityGrid d = ctx.model_density();
  json config = ctx.config({"t", "provider", "P", "U"});
  config["grid"] = o.grid.value_or(d.dimension == 1 ? 513 : 129);

  Result r;
  r.failed = d.check();
  const auto value = [&](std::size_t i, std::size_t k) { return d.at(i, k); };
  const std::size_t ny = d.dimension == 1 ? 1 : d.y.size();
  if (want_json(o, "csv")) {
    json values = json::array();
    for (std::size_t i = 0; i < d.x.size(); ++i) {
      for (std::size_t k = 0; k < ny; ++k) {
        values.push_back({{"x", d.x[i]}, {"y", d.dimension == 1 ? 0.0 : d.y[k]}, {"density", value(i, k)}});
      }
    }
    r.body = json_document({{"config", config}, {"dimension", d.dimension}, {"mass", d.mass},
                            {"min_density", d.min_density}, {"imag_residue", d.imag_residue},
                            {"step", d.step}, {"values", values}});
  } else {
    std::string body = csv_preamble(config) + "x,y,density\n";
    for (std::size_t i = 0; i < d.x.size(); ++i) {
      for (std::size_t k = 0; k < ny; ++k) {
        body += fmt::format("{},{},{}\n", num(d.x[i]), num(d.dimension == 1 ? 0.0 : d.y[k]), num(value(i, k)));
      }
    }
    r.body = std::move(body);
  }
  r.summary = fmt::format("dimension {} mass {} min {} imag_residue {}", d.dimension, num(d.mass),
                          num(d.min_density), num(d.imag_residue));
  return r;
}

Result cmd_discrepancy(Context& ctx) {
  const auto& o = ctx.opts();
  const auto& fam = ctx.family();
  ctx.progress(fmt::format("{} model draws at Y = {}", o.samples, num(o.model_Y)));
  const auto model = mc_value_set(o.model_Y, o.t, *ctx.provider(), o.samples, o.seed);
  const auto rep = discrepancy(fam, model, {o.max_points, o.seed});
  const json config = ctx.config({"N", "Y", "t", "provider", "samples", "model_Y", "seed", "max_points"});
  const double normalized = rep.sup_cdf_diff / log_ratio(o.N);

  Result r;
  if (want_json(o, "json")) {
    r.body = json_document({{"config", config},
                            {"dimension", rep.dimension},
                            {"sup_cdf_diff", rep.sup_cdf_diff},
                            {"rect_bound", rep.rect_bound},
                            {"normalized", normalized},
                            {"size_family", rep.size_a},
                            {"size_model", rep.size_b},
                            {"used_family", rep.used_a},
                            {"used_model", rep.used_b},
                            {"subsampled", rep.subsampled},
                            {"method", rep.method}});
  } else {
    r.body = csv_preamble(config) + "N,dimension,sup_cdf_diff,rect_bound,normalized,used_family,used_model\n" +
             fmt::format("{},{},{},{},{},{},{}\n", o.N, rep.dimension, num(rep.sup_cdf_diff),
                         num(rep.rect_bound), num(normalized), rep.used_a, rep.used_b);
  }
  r.summary = fmt::format("discrepancy {} (normalized {})", num(rep.sup_cdf_diff), num(normalized));
  return r;
}

Result cmd_bound(Context& ctx) {
  const auto& o = ctx.opts();
  const double R = o.R.value_or(default_smoothing_radius(o.N));
  const double inner = o.r.value_or(default_inner_cutoff(o.N));
  const std::size_t points = o.grid.value_or(257) | 1u;  // odd, so 0 is a grid point
  const auto axis = symmetric_axis(R, points);
  const CharFnGrid f = empirical_charfn_grid(ctx.family(), axis, axis);
  const CharFnGrid g = ctx.model_grid(axis, axis);
  double A1 = 0.0, A2 = 0.0;
  if (o.A1 && o.A2) {
    A1 = *o.A1;
    A2 = *o.A2;
  } else {
    ctx.progress("estimating A1, A2 from the inverted model density");
    std::tie(A1, A2) = density_marginal_sups(ctx.model_density());
    A1 = o.A1.value_or(A1);
    A2 = o.A2.value_or(A2);
  }
  const auto rep = berry_esseen_bound(f, g, R, A1, A2, inner);
  json config = ctx.config({"N", "Y", "t", "provider", "P", "U"});
  config["R"] = R;
  config["r"] = inner;
  config["grid"] = points;

  Result r;
  const json fields = {{"bound", rep.bound},
                       {"double_integral", rep.double_integral},
                       {"u_line_integral", rep.u_line_integral},
                       {"v_line_integral", rep.v_line_integral},
                       {"smoothing_term", rep.smoothing_term},
                       {"strip_integral", rep.strip_integral},
                       {"coarse_bound", rep.coarse_bound},
                       {"relative_change", rep.relative_change},
                       {"converged", rep.converged},
                       {"A1", A1},
                       {"A2", A2}};
  if (want_json(o, "json")) {
    json doc = {{"config", config}};
    doc.update(fields);
    r.body = json_document(doc);
  } else {
    std::string header, row;
    for (const auto& [key, value] : fields.items()) {
      header += (header.empty() ? "" : ",") + key;
      row += (row.empty() ? "" : ",") +
             (value.is_boolean() ? std::string(value.get<bool>() ? "true" : "false") : num(value.get<double>()));
    }
    r.body = csv_preamble(config) + header + "\n" + row + "\n";
  }
  if (!rep.converged) ctx.progress("warning: quadrature changed by more than 0.5% between strides");
  r.summary = fmt::format("Berry-Esseen bound {} at R = {}", num(rep.bound), num(R));
  return r;
}

Result cmd_minvalues(Context& ctx) {
  const auto& o = ctx.opts();
  const double eta = o.eta.value_or(log_ratio(o.N));
  const auto& set = ctx.family();
  const auto stats = small_values(set, eta);
  const json config = ctx.config({"N", "Y", "t", "provider"});
  const double share = static_cast<double>(stats.count) / static_cast<double>(set.size());

  Result r;
  if (want_json(o, "json")) {
    r.body = json_document({{"config", config}, {"N", o.N}, {"m_N", stats.min_modulus},
                            {"psi", stats.count}, {"eta", eta}, {"share", share}});
  } else {
    r.body = csv_preamble(config) + "N,m_N,psi,eta,share\n" +
             fmt::format("{},{},{},{},{}\n", o.N, num(stats.min_modulus), stats.count, num(eta), num(share));
  }
  r.summary = fmt::format("N={} m_N={} psi={} eta={}", o.N, num(stats.min_modulus), stats.count, num(eta));
  return r;
}

Result cmd_diagnostics(Context& ctx) {
  const auto& o = ctx.opts();
  const auto d = prime_sum_diagnostics(*ctx.provider(), o.X, o.P, o.t);
  const json config = ctx.config({"t", "provider", "X", "P"});
  json h = json::array();
  for (unsigned k = 2; k <= 4; ++k) h.push_back({{"k", k}, {"value", hypothesis_h_partial(*ctx.provider(), k, o.P)}});
  json doc = {{"config", config},
              {"abs_sum", d.abs_sum},
              {"signed_re", d.signed_sum.real()},
              {"signed_im", d.signed_sum.imag()},
              {"abs_comparator", d.abs_comparator}};
  if (d.signed_comparator) {
    doc["signed_comparator_re"] = d.signed_comparator->real();
    doc["signed_comparator_im"] = d.signed_comparator->imag();
  } else {
    doc["signed_comparator_re"] = nullptr;
    doc["signed_comparator_im"] = nullptr;
  }
  doc["hypothesis_h"] = h;
  Result r;
  r.body = json_document(doc);
  r.summary = fmt::format("tail sum {} vs log X / X = {}", num(d.abs_sum), num(d.abs_comparator));
  return r;
}

// ---------------------------------------------------------------------------

void write_output(const std::string& path, const std::string& body, std::ostream& out) {
  if (path == "-") {
    out << body;
    out.flush();
    return;
  }
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".partial";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + tmp.string() + " for writing");
    f << body;
    f.close();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path);
  }
}

void report_failure(std::ostream& err, const std::string& kind, const std::string& message,
                    const std::string& command) {
  json j = {{"error", kind}, {"message", message}};
  if (!command.empty()) j["command"] = command;
  err << j.dump() << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Quadratic twists: short Dirichlet polynomials versus the random model", "qtwist"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key = value file; flags override its entries");

  app.add_option("--N", o.N, "family cutoff |D| <= N")->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 40));
  app.add_option("--Y", o.Y, "polynomial length (default (log N)^2)")->check(CLI::NonNegativeNumber);
  app.add_option("--t", o.t, "height t in 1 + it");
  app.add_option("--provider", o.provider, "'trivial' or a Satake parameter file")
      ->check([](const std::string& v) {
        return v == "trivial" ? std::string() : CLI::ExistingFile(v);
      });
  app.add_option("--seed", o.seed, "seed of the random model");
  app.add_option("--samples", o.samples, "model draws / Monte Carlo samples")->check(CLI::Range(std::uint64_t{2}, std::uint64_t{1} << 32));
  app.add_option("--R", o.R, "Berry-Esseen radius (default log N / (log log N)^2)")->check(CLI::PositiveNumber);
  app.add_option("--r", o.r, "inner cutoff around the axes (default (log N)^-2)")->check(CLI::NonNegativeNumber);
  app.add_option("--grid", o.grid, "points per axis")->check(CLI::Range(std::size_t{3}, std::size_t{100001}));
  app.add_option("--out", o.out, "output path, '-' for stdout");
  app.add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", o.threads, "worker threads (default QTWIST_THREADS or all cores)")->check(CLI::Range(1u, 4096u));
  app.add_option("--eta", o.eta, "small-value threshold (default (log log N)^2 / log N)")->check(CLI::PositiveNumber);
  app.add_option("--P", o.P, "prime cutoff of the model Euler product / diagnostics")->check(CLI::Range(std::uint64_t{2}, std::uint64_t{1} << 36));
  app.add_option("--U", o.U, "Fourier inversion half-width (default 8 in 1D, 16 in 2D)")->check(CLI::PositiveNumber);
  app.add_option("--model-Y", o.model_Y, "truncation of the model series for draws")->check(CLI::NonNegativeNumber);
  app.add_option("--pairs", o.pairs, "moment orders, e.g. '1,0;1,1;2,0'");
  app.add_option("--umax", o.umax, "half-width of the characteristic-function grid")->check(CLI::PositiveNumber);
  app.add_option("--X", o.X, "lower end of the prime tail sums")->check(CLI::Range(2.0, 1e15));
  app.add_option("--max-points", o.max_points, "subsample 2D discrepancy inputs above this size (0 = exact)");
  app.add_option("--budget", o.budget, "tuple budget of exact moments")->check(CLI::PositiveNumber);
  app.add_option("--A1", o.A1, "Berry-Esseen A1 (default: inverted model density)")->check(CLI::NonNegativeNumber);
  app.add_option("--A2", o.A2, "Berry-Esseen A2 (default: inverted model density)")->check(CLI::NonNegativeNumber);
  app.add_flag("--quiet", o.quiet, "no progress on stderr");

  const std::vector<std::pair<const char*, const char*>> commands{
      {"discriminants", "list F(N), one discriminant per line"},
      {"sweep", "S_Y(D) for every D in F(N)"},
      {"moments", "family moments against exact random-model moments"},
      {"charfn", "empirical and model characteristic functions on a grid"},
      {"density", "Fourier-inverted density of the model distribution"},
      {"discrepancy", "distribution-function discrepancy, family vs model draws"},
      {"bound", "two-dimensional Berry-Esseen bound, family vs model"},
      {"minvalues", "smallest |S_Y(D)| and the count below eta"},
      {"diagnostics", "prime tail sums and Hypothesis H partial sums"},
  };
  for (const auto& [name, help] : commands) {
    app.add_subcommand(name, help)->callback([&o, name = std::string(name)] { o.command = name; });
  }

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    report_failure(err, "usage", e.what(), "");
    return kUsageError;
  }

  if (o.threads) set_thread_count(*o.threads);
  Context ctx(o, err);
  try {
    Result r;
    if (o.command == "discriminants") r = cmd_discriminants(ctx);
    else if (o.command == "sweep") r = cmd_sweep(ctx);
    else if (o.command == "moments") r = cmd_moments(ctx);
    else if (o.command == "charfn") r = cmd_charfn(ctx);
    else if (o.command == "density") r = cmd_density(ctx);
    else if (o.command == "discrepancy") r = cmd_discrepancy(ctx);
    else if (o.command == "bound") r = cmd_bound(ctx);
    else if (o.command == "minvalues") r = cmd_minvalues(ctx);
    else r = cmd_diagnostics(ctx);

    if (!r.failed.empty()) {
      std::string message;
      for (const auto& f : r.failed) message += (message.empty() ? "" : "; ") + f;
      report_failure(err, "check", message, o.command);
      return kCheckFailed;
    }
    write_output(o.out, r.body, out);
    if (o.out == "-") {
      ctx.progress(r.summary);
    } else {
      out << r.summary << '\n';
    }
    return kOk;
  } catch (const UsageError& e) {
    report_failure(err, "usage", e.what(), o.command);
    return kUsageError;
  } catch (const Error& e) {
    report_failure(err, e.kind(), e.what(), o.command);
    return kRuntimeError;
  } catch (const std::exception& e) {
    report_failure(err, "internal", e.what(), o.command);
    return kRuntimeError;
  }
}

}  // namespace qtwist::cli
