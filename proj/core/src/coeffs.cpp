#include "qtwist/coeffs.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qtwist/errors.hpp"
#include "qtwist/ntcore.hpp"

namespace qtwist {

namespace {

// Decimal inputs are rounded; the p^theta bound gets this much relative slack.
constexpr double kBoundSlack = 1e-7;

const Complex kUnit[1] = {Complex(1.0, 0.0)};

std::string prime_context(std::uint64_t p) { return "prime " + std::to_string(p); }

void check_self_dual(std::uint64_t p, std::span<const Complex> alpha, double tau0) {
  // Greedy multiset matching of alpha_j against conj(alpha_j) p^{i tau0}.
  const Complex twist = std::polar(1.0, tau0 * std::log(static_cast<double>(p)));
  std::vector<Complex> image;
  image.reserve(alpha.size());
  for (const Complex& a : alpha) image.push_back(std::conj(a) * twist);
  std::vector<bool> used(image.size(), false);
  for (const Complex& a : alpha) {
    bool matched = false;
    for (std::size_t k = 0; k < image.size(); ++k) {
      if (!used[k] && std::abs(image[k] - a) <= kSelfDualTolerance) {
        used[k] = true;
        matched = true;
        break;
      }
    }
    if (!matched) {
      throw InvariantError(prime_context(p) + ": parameters are not closed under "
                           "conj(alpha) p^{i tau0} with tau0 = " + std::to_string(tau0));
    }
  }
}

double parse_double(std::string_view token, std::size_t line) {
  double value = 0.0;
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value)) {
    throw ParseError(line, "malformed number '" + std::string(token) + "'");
  }
  return value;
}

std::uint64_t parse_unsigned(std::string_view token, std::size_t line) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(line, "malformed integer '" + std::string(token) + "'");
  }
  return value;
}

std::vector<std::string> split(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> tokens;
  for (std::string tok; is >> tok;) tokens.push_back(tok);
  return tokens;
}

}  // namespace

SatakeProvider SatakeProvider::trivial() {
  SatakeProvider p;
  p.degree_ = 1;
  p.theta_ = 0.0;
  p.self_dual_twist_ = 0.0;
  p.trivial_ = true;
  p.id_ = "trivial";
  return p;
}

SatakeProvider SatakeProvider::from_table(unsigned degree, double theta,
                                          std::optional<double> self_dual_twist,
                                          ParameterTable table, std::string id) {
  if (degree == 0) throw InvariantError("degree must be positive");
  if (!(theta >= 0.0 && theta < 0.5)) {
    throw InvariantError("theta must lie in [0, 1/2), got " + std::to_string(theta));
  }
  SatakeProvider p;
  p.degree_ = degree;
  p.theta_ = theta;
  p.self_dual_twist_ = self_dual_twist;
  p.id_ = std::move(id);
  if (theta >= 0.25) {
    p.warnings_.push_back("theta = " + std::to_string(theta) +
                          " >= 1/4: decay of the model characteristic function is not guaranteed");
  }
  for (const auto& [prime, alpha] : table) {
    if (prime < 2 || prime_divisors(prime).size() != 1 || prime_divisors(prime).front() != prime) {
      throw InvariantError(prime_context(prime) + " is not prime");
    }
    if (alpha.size() != degree) {
      throw InvariantError(prime_context(prime) + ": expected " + std::to_string(degree) +
                           " parameters, got " + std::to_string(alpha.size()));
    }
    const double bound = std::pow(static_cast<double>(prime), theta) * (1.0 + kBoundSlack);
    for (const Complex& a : alpha) {
      if (!(std::abs(a) <= bound)) {
        throw InvariantError(prime_context(prime) + ": |alpha| = " + std::to_string(std::abs(a)) +
                             " exceeds p^theta");
      }
    }
    if (self_dual_twist) check_self_dual(prime, alpha, *self_dual_twist);
  }
  p.table_ = std::move(table);
  return p;
}

bool SatakeProvider::has_prime(std::uint64_t p) const {
  return trivial_ || table_.contains(p);
}

std::span<const Complex> SatakeProvider::parameters(std::uint64_t p) const {
  if (trivial_) return kUnit;
  const auto it = table_.find(p);
  if (it == table_.end()) throw MissingDataError(p);
  return it->second;
}

Complex SatakeProvider::lambda(std::uint64_t p, unsigned m) const {
  if (trivial_) return {1.0, 0.0};
  Complex sum = 0.0;
  for (const Complex& a : parameters(p)) {
    Complex power = a;
    for (unsigned k = 1; k < m; ++k) power *= a;
    sum += power;
  }
  return sum;
}

bool SatakeProvider::is_self_dual_at(double t) const {
  return self_dual_twist_.has_value() && std::abs(*self_dual_twist_ - 2.0 * t) < 1e-12;
}

void SatakeProvider::require_primes(const PrimeTable& primes, std::uint64_t limit) const {
  if (trivial_) return;
  for (const std::uint64_t p : primes.primes_between(2, limit)) {
    if (!table_.contains(p)) throw MissingDataError(p);
  }
}

SatakeProvider trivial_provider() { return SatakeProvider::trivial(); }

SatakeProvider parse_satake(std::istream& in, std::string id) {
  unsigned degree = 1;
  double theta = 0.0;
  std::optional<double> twist;
  bool have_header = false;
  bool have_records = false;
  SatakeProvider::ParameterTable table;

  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto tokens = split(line);
    if (tokens.empty()) continue;

    if (tokens.front().front() == '#') {
      if (have_header || have_records) continue;  // comment
      if (tokens.front() == "#") tokens.erase(tokens.begin());
      else tokens.front().erase(0, 1);
      if (tokens.empty() || tokens.front() != "degree") {
        throw ParseError(lineno, "expected header '#degree d theta T [selfdual tau0]'");
      }
      if (tokens.size() != 4 && tokens.size() != 6) {
        throw ParseError(lineno, "header must read '#degree d theta T [selfdual tau0]'");
      }
      if (tokens[2] != "theta") throw ParseError(lineno, "expected 'theta' in header");
      const auto d = parse_unsigned(tokens[1], lineno);
      if (d == 0 || d > 64) throw ParseError(lineno, "degree out of range");
      degree = static_cast<unsigned>(d);
      theta = parse_double(tokens[3], lineno);
      if (tokens.size() == 6) {
        if (tokens[4] != "selfdual") throw ParseError(lineno, "expected 'selfdual' in header");
        twist = parse_double(tokens[5], lineno);
      }
      have_header = true;
      continue;
    }

    if (!have_header) throw ParseError(lineno, "record before '#degree' header");
    if (tokens.size() != 1 + 2 * static_cast<std::size_t>(degree)) {
      throw ParseError(lineno, "expected a prime and " + std::to_string(2 * degree) +
                                   " numbers, got " + std::to_string(tokens.size()) + " fields");
    }
    const std::uint64_t p = parse_unsigned(tokens[0], lineno);
    std::vector<Complex> alpha;
    alpha.reserve(degree);
    for (unsigned j = 0; j < degree; ++j) {
      alpha.emplace_back(parse_double(tokens[1 + 2 * j], lineno),
                         parse_double(tokens[2 + 2 * j], lineno));
    }
    if (!table.emplace(p, std::move(alpha)).second) {
      throw ParseError(lineno, "duplicate record for prime " + std::to_string(p));
    }
    have_records = true;
  }
  return SatakeProvider::from_table(degree, theta, twist, std::move(table), std::move(id));
}

SatakeProvider file_provider(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open Satake file " + path.string());
  return parse_satake(in, path.string());
}

SatakeProvider gl2_holomorphic_provider(const std::map<std::uint64_t, double>& hecke_ap,
                                        double weight, std::string id) {
  SatakeProvider::ParameterTable table;
  for (const auto& [p, ap] : hecke_ap) {
    const double a = ap / std::pow(static_cast<double>(p), (weight - 1.0) / 2.0);
    if (std::abs(a) > 2.0 + 1e-12) {
      throw InvariantError(prime_context(p) + ": normalized a_p exceeds the Deligne bound");
    }
    const double im = std::sqrt(std::max(0.0, 1.0 - a * a / 4.0));
    table.emplace(p, std::vector<Complex>{{a / 2.0, im}, {a / 2.0, -im}});
  }
  return SatakeProvider::from_table(2, 0.0, 0.0, std::move(table), std::move(id));
}

double hypothesis_h_partial(const SatakeProvider& provider, unsigned k,
                            std::uint64_t prime_cutoff) {
  if (k < 2) throw DomainError("hypothesis_h_partial: k must be >= 2");
  if (prime_cutoff < 2) return 0.0;
  const PrimeTable table = sieve_primes(prime_cutoff);
  double sum = 0.0;
  for (const std::uint64_t p : table.primes()) {
    const double lp = std::log(static_cast<double>(p));
    sum += lp * lp * std::norm(provider.lambda(p, k)) / std::pow(static_cast<double>(p), k);
  }
  return sum;
}

}  // namespace qtwist
