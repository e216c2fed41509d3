#pragma once

// PDF-bounded value distributions on [0,1]: density f with alpha <= f(x) <= beta
// everywhere. Sampling is inverse-transform only, so each draw consumes exactly
// one uniform from the stream.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "fairdiv/errors.hpp"
#include "fairdiv/rng.hpp"

namespace fairdiv {

struct UniformKind {};

struct TruncatedNormalKind {
  double mu;
  double sigma;
};

struct Knot {
  double x;
  double density;
};

struct PiecewiseLinearKind {
  std::vector<Knot> knots;
};

struct MeanAndBounds {
  double mean;
  double alpha;
  double beta;
};

namespace detail {

inline double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

inline double std_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

inline void require_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError(std::string(what) + " must lie in [0,1], got " + std::to_string(x));
  }
}

}  // namespace detail

/// Immutable distribution on [0,1] with verified density bounds (alpha, beta).
class DistributionSpec {
 public:
  using Kind = std::variant<UniformKind, TruncatedNormalKind, PiecewiseLinearKind>;

  static DistributionSpec uniform() { return DistributionSpec(UniformKind{}); }

  static DistributionSpec truncated_normal(double mu, double sigma) {
    if (!std::isfinite(mu) || !(sigma > 0.0) || !std::isfinite(sigma)) {
      throw PreconditionError("truncnorm requires finite mu and sigma > 0");
    }
    return DistributionSpec(TruncatedNormalKind{mu, sigma});
  }

  /// Knots must start at x=0, end at x=1, be strictly increasing, carry
  /// nonnegative densities and integrate to 1 within 1e-9. The stored density
  /// is renormalised so that cdf(1) == 1 exactly.
  static DistributionSpec piecewise_linear(std::vector<Knot> knots) {
    return DistributionSpec(PiecewiseLinearKind{std::move(knots)});
  }

  const Kind& kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }

  double pdf(double x) const {
    detail::require_unit(x, "x");
    return std::visit([&](const auto& k) { return pdf_impl(k, x); }, kind_);
  }

  double cdf(double x) const {
    detail::require_unit(x, "x");
    return std::visit([&](const auto& k) { return cdf_impl(k, x); }, kind_);
  }

  /// Least x in [0,1] with cdf(x) >= p.
  double quantile(double p) const {
    detail::require_unit(p, "p");
    return std::visit([&](const auto& k) { return quantile_impl(k, p); }, kind_);
  }

  MeanAndBounds mean_and_bounds() const { return {mean_, alpha_, beta_}; }

  /// Canonical spec string (`uniform`, `truncnorm:mu,sigma`, `pwl:x,d;...`).
  /// Reals use the shortest form that parses back to the same double.
  std::string to_string() const {
    std::string out;
    auto put = [&out](double v) {
      char buf[32];
      out.append(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
    };
    std::visit(
        [&](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, UniformKind>) {
            out += "uniform";
          } else if constexpr (std::is_same_v<K, TruncatedNormalKind>) {
            out += "truncnorm:";
            put(k.mu);
            out += ',';
            put(k.sigma);
          } else {
            out += "pwl:";
            for (std::size_t i = 0; i < raw_knots_.size(); ++i) {
              if (i > 0) out += ';';
              put(raw_knots_[i].x);
              out += ',';
              put(raw_knots_[i].density);
            }
          }
        },
        kind_);
    return out;
  }

 private:
  explicit DistributionSpec(UniformKind k) : kind_(k), mean_(0.5), alpha_(1.0), beta_(1.0) {}

  explicit DistributionSpec(TruncatedNormalKind k) : kind_(k) {
    const double a = -k.mu / k.sigma;
    const double b = (1.0 - k.mu) / k.sigma;
    cdf_lo_ = detail::std_normal_cdf(a);
    mass_ = detail::std_normal_cdf(b) - cdf_lo_;
    if (!(mass_ > 0.0)) throw PreconditionError("truncnorm has no mass on [0,1]");
    mean_ = k.mu + k.sigma * (detail::std_normal_pdf(a) - detail::std_normal_pdf(b)) / mass_;
    // Unimodal: the minimum sits at an endpoint, the maximum at clamp(mu).
    alpha_ = std::min(pdf_impl(k, 0.0), pdf_impl(k, 1.0));
    beta_ = pdf_impl(k, std::clamp(k.mu, 0.0, 1.0));
    if (!(alpha_ > 0.0) || !std::isfinite(beta_)) {
      throw PreconditionError("truncnorm density is not bounded away from 0 and infinity");
    }
  }

  explicit DistributionSpec(PiecewiseLinearKind k) : kind_(PiecewiseLinearKind{}), raw_knots_(k.knots) {
    auto& knots = k.knots;
    if (knots.size() < 2) throw PreconditionError("pwl needs at least two knots");
    if (knots.front().x != 0.0 || knots.back().x != 1.0) {
      throw PreconditionError("pwl knots must start at x=0 and end at x=1");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < knots.size(); ++i) {
      if (!(knots[i].density >= 0.0) || !std::isfinite(knots[i].density)) {
        throw PreconditionError("pwl densities must be finite and nonnegative");
      }
      if (i > 0) {
        if (!(knots[i].x > knots[i - 1].x)) throw PreconditionError("pwl knots must be strictly increasing");
        total += 0.5 * (knots[i].density + knots[i - 1].density) * (knots[i].x - knots[i - 1].x);
      }
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw PreconditionError("pwl density integrates to " + std::to_string(total) + ", expected 1");
    }
    for (auto& knot : knots) knot.density /= total;
    cumulative_.assign(knots.size(), 0.0);
    for (std::size_t i = 1; i < knots.size(); ++i) {
      cumulative_[i] = cumulative_[i - 1] +
                       0.5 * (knots[i].density + knots[i - 1].density) * (knots[i].x - knots[i - 1].x);
    }
    cumulative_.back() = 1.0;
    alpha_ = knots.front().density;
    beta_ = knots.front().density;
    for (const auto& knot : knots) {
      alpha_ = std::min(alpha_, knot.density);
      beta_ = std::max(beta_, knot.density);
    }
    if (!(alpha_ > 0.0)) throw PreconditionError("pwl density must be bounded away from 0");
    mean_ = simpson_mean(knots);
    std::get<PiecewiseLinearKind>(kind_).knots = std::move(knots);
  }

  // Composite Simpson over each linear piece. x*f(x) is quadratic per piece,
  // so the rule is exact there; 10^4 panels are spread over the pieces.
  static double simpson_mean(const std::vector<Knot>& knots) {
    constexpr std::size_t kPanels = 10000;
    const std::size_t pieces = knots.size() - 1;
    const std::size_t per_piece = std::max<std::size_t>(2, (kPanels / pieces) & ~std::size_t{1});
    double mean = 0.0;
    for (std::size_t s = 0; s < pieces; ++s) {
      const Knot lo = knots[s];
      const Knot hi = knots[s + 1];
      const double h = (hi.x - lo.x) / static_cast<double>(per_piece);
      auto integrand = [&](double x) {
        const double w = (x - lo.x) / (hi.x - lo.x);
        return x * (lo.density + w * (hi.density - lo.density));
      };
      double acc = integrand(lo.x) + integrand(hi.x);
      for (std::size_t p = 1; p < per_piece; ++p) {
        acc += (p % 2 == 1 ? 4.0 : 2.0) * integrand(lo.x + h * static_cast<double>(p));
      }
      mean += acc * h / 3.0;
    }
    return mean;
  }

  static double pdf_impl(const UniformKind&, double) { return 1.0; }
  static double cdf_impl(const UniformKind&, double x) { return x; }
  static double quantile_impl(const UniformKind&, double p) { return p; }

  double pdf_impl(const TruncatedNormalKind& k, double x) const {
    return detail::std_normal_pdf((x - k.mu) / k.sigma) / (k.sigma * mass_);
  }

  double cdf_impl(const TruncatedNormalKind& k, double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double value = (detail::std_normal_cdf((x - k.mu) / k.sigma) - cdf_lo_) / mass_;
    return std::clamp(value, 0.0, 1.0);
  }

  // Bisection on the cdf down to an x-bracket of 1e-12 (at most 60 halvings).
  double quantile_impl(const TruncatedNormalKind& k, double p) const {
    if (p <= 0.0) return 0.0;
    double lo = 0.0;
    double hi = 1.0;
    for (int iter = 0; iter < 60 && hi - lo > 1e-12; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (cdf_impl(k, mid) >= p) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    return hi;
  }

  static std::size_t segment_of(const std::vector<Knot>& knots, double x) {
    auto it = std::upper_bound(knots.begin(), knots.end(), x,
                               [](double v, const Knot& knot) { return v < knot.x; });
    auto idx = static_cast<std::size_t>(it - knots.begin());
    return std::clamp<std::size_t>(idx, 1, knots.size() - 1) - 1;
  }

  static double pdf_impl(const PiecewiseLinearKind& k, double x) {
    const auto s = segment_of(k.knots, x);
    const Knot lo = k.knots[s];
    const Knot hi = k.knots[s + 1];
    const double w = (x - lo.x) / (hi.x - lo.x);
    return lo.density + w * (hi.density - lo.density);
  }

  double cdf_impl(const PiecewiseLinearKind& k, double x) const {
    if (x >= 1.0) return 1.0;
    const auto s = segment_of(k.knots, x);
    const Knot lo = k.knots[s];
    const Knot hi = k.knots[s + 1];
    const double dx = x - lo.x;
    const double slope = (hi.density - lo.density) / (hi.x - lo.x);
    return std::min(1.0, cumulative_[s] + lo.density * dx + 0.5 * slope * dx * dx);
  }

  // Closed-form inverse of the per-piece quadratic, in the cancellation-free form.
  double quantile_impl(const PiecewiseLinearKind& k, double p) const {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), p);
    const auto s = std::clamp<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), 1,
                                           k.knots.size() - 1) - 1;
    const Knot lo = k.knots[s];
    const Knot hi = k.knots[s + 1];
    const double slope = (hi.density - lo.density) / (hi.x - lo.x);
    const double need = p - cumulative_[s];
    const double disc = lo.density * lo.density + 2.0 * slope * need;
    const double dx = 2.0 * need / (lo.density + std::sqrt(std::max(disc, 0.0)));
    return std::clamp(lo.x + dx, lo.x, hi.x);
  }

  Kind kind_;
  std::vector<Knot> raw_knots_;
  std::vector<double> cumulative_;
  double cdf_lo_ = 0.0;
  double mass_ = 1.0;
  double mean_ = 0.0;
  double alpha_ = 0.0;
  double beta_ = 0.0;
};

inline double pdf(const DistributionSpec& spec, double x) { return spec.pdf(x); }
inline double cdf(const DistributionSpec& spec, double x) { return spec.cdf(x); }
inline double quantile(const DistributionSpec& spec, double p) { return spec.quantile(p); }
inline MeanAndBounds mean_and_bounds(const DistributionSpec& spec) { return spec.mean_and_bounds(); }

/// Draw from D conditioned on [0,c], maximised over k copies, given the
/// uniform u: quantile(F(c) * u^(1/k)). The law has CDF (F(x)/F(c))^k on [0,c].
inline double conditional_max_from_uniform(const DistributionSpec& spec, std::size_t k, double c,
                                           double u) {
  if (k == 0) throw PreconditionError("k must be positive");
  detail::require_unit(c, "c");
  const double mass = spec.cdf(c);
  if (!(mass > 0.0)) throw PreconditionError("cdf(c) must be positive");
  const double scaled = k == 1 ? u : std::pow(u, 1.0 / static_cast<double>(k));
  return std::min(spec.quantile(mass * scaled), c);
}

inline double sample_conditional_max(const DistributionSpec& spec, std::size_t k, double c,
                                     RngStream& rng) {
  return conditional_max_from_uniform(spec, k, c, rng.uniform());
}

inline double sample(const DistributionSpec& spec, RngStream& rng) {
  return sample_conditional_max(spec, 1, 1.0, rng);
}

namespace detail {

inline double parse_real(std::string_view text, const std::string& whole) {
  std::string buf(text);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(buf, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (buf.empty() || used != buf.size() || !std::isfinite(value)) {
    throw PreconditionError("malformed number '" + buf + "' in distribution '" + whole + "'");
  }
  return value;
}

inline std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace detail

/// Parses `uniform`, `truncnorm:<mu>,<sigma>` or `pwl:<x0>,<d0>;<x1>,<d1>;...`.
inline DistributionSpec parse_distribution(std::string_view text) {
  const std::string whole(text);
  if (text == "uniform") return DistributionSpec::uniform();
  if (text.starts_with("truncnorm:")) {
    auto parts = detail::split(text.substr(10), ',');
    if (parts.size() != 2) throw PreconditionError("truncnorm expects '<mu>,<sigma>': " + whole);
    return DistributionSpec::truncated_normal(detail::parse_real(parts[0], whole),
                                              detail::parse_real(parts[1], whole));
  }
  if (text.starts_with("pwl:")) {
    std::vector<Knot> knots;
    for (auto pair : detail::split(text.substr(4), ';')) {
      auto xy = detail::split(pair, ',');
      if (xy.size() != 2) throw PreconditionError("pwl expects '<x>,<density>' pairs: " + whole);
      knots.push_back({detail::parse_real(xy[0], whole), detail::parse_real(xy[1], whole)});
    }
    return DistributionSpec::piecewise_linear(std::move(knots));
  }
  throw PreconditionError("unknown distribution '" + whole + "'");
}

}  // namespace fairdiv
