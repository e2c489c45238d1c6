#include "ddcc/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ddcc/error.hpp"

namespace ddcc {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMomentTolerance = 1e-6;

double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

struct MeanVar {
  double mean;
  double var;
};

MeanVar tn_mean_var(double mu0, double sigma0) {
  const auto tm = truncated_normal_moments(mu0, sigma0);
  return {tm.mean, std::max(0.0, tm.second - tm.mean * tm.mean)};
}

MeanVar bimodal_mean_var(double c1, double c2, double s) {
  const auto a = truncated_normal_moments(c1, s);
  const auto b = truncated_normal_moments(c2, s);
  const double mean = 0.5 * (a.mean + b.mean);
  const double second = 0.5 * (a.second + b.second);
  return {mean, std::max(0.0, second - mean * mean)};
}

// Smallest x in [lo, hi] with f(x) >= target for increasing f.
template <class F>
double bisect(F f, double lo, double hi, double target, int iterations = 100) {
  for (int k = 0; k < iterations; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

bool close(double got, double want) {
  return std::abs(got - want) <= kMomentTolerance * std::max(1.0, std::abs(want));
}

std::optional<DistributionSpec> checked(DistributionSpec spec) {
  for (double p : spec.params) {
    if (!std::isfinite(p)) return std::nullopt;
  }
  if (!close(distribution_mean(spec), spec.mean) ||
      !close(distribution_variance(spec), spec.variance)) {
    return std::nullopt;
  }
  return spec;
}

std::optional<DistributionSpec> solve_truncated_normal(double mean, double variance) {
  const double cv = std::sqrt(variance) / mean;
  // Coefficient of variation as a function of the standardized truncation
  // point a = -mu0 / sigma0; increasing from 0 towards 1.
  const auto cv_of = [](double a) {
    const double lam = inverse_mills_ratio(a);
    return std::sqrt(std::max(0.0, 1.0 + a * lam - lam * lam)) / (lam - a);
  };
  const double lo = -1e4;
  const double hi = 10.0;
  if (cv >= cv_of(hi)) return std::nullopt;
  const double a = cv <= cv_of(lo) ? lo : bisect(cv_of, lo, hi, cv, 200);
  const double sigma0 = mean / (inverse_mills_ratio(a) - a);
  return checked({Family::TruncatedNormal, mean, variance, {-a * sigma0, sigma0}});
}

std::optional<DistributionSpec> solve_bimodal(double mean, double variance) {
  const double sd = std::sqrt(variance);
  const double s = 0.5 * sd;
  // Center placing the mixture mean at `mean` for half-distance d.
  const auto center_for = [&](double d) -> std::optional<double> {
    const auto mean_at = [&](double c) { return bimodal_mean_var(c - d, c + d, s).mean; };
    const double lo = -d - 40.0 * s;
    const double hi = mean + d + 40.0 * s;
    if (mean_at(lo) > mean || mean_at(hi) < mean) return std::nullopt;
    return bisect(mean_at, lo, hi, mean);
  };
  const auto var_at = [&](double d) {
    const auto c = center_for(d);
    if (!c) return -1.0;
    return bimodal_mean_var(*c - d, *c + d, s).var;
  };
  const double dhi = mean + 10.0 * sd;
  if (var_at(0.0) > variance || var_at(dhi) < variance) return std::nullopt;
  const double d = bisect(var_at, 0.0, dhi, variance);
  const auto c = center_for(d);
  if (!c) return std::nullopt;
  return checked({Family::Bimodal, mean, variance, {*c - d, *c + d, s}});
}

}  // namespace

const char* to_string(Family family) {
  switch (family) {
    case Family::Uniform: return "uniform";
    case Family::TruncatedNormal: return "truncated_normal";
    case Family::FatigueLife: return "fatigue_life";
    case Family::Bimodal: return "bimodal";
    case Family::Gamma: return "gamma";
  }
  return "?";
}

Family parse_family(const std::string& name) {
  for (Family f : kAllFamilies) {
    if (name == to_string(f)) return f;
  }
  throw Error(ErrorKind::Parse, "unknown distribution family \"" + name + "\"");
}

double inverse_mills_ratio(double a) {
  if (a < 5.0) {
    return std_normal_pdf(a) / (0.5 * std::erfc(a / std::sqrt(2.0)));
  }
  // Continued fraction a + 1/(a + 2/(a + 3/(a + ...))).
  double t = a;
  for (int k = 200; k >= 1; --k) t = a + k / t;
  return t;
}

TruncatedMoments truncated_normal_moments(double mu0, double sigma0) {
  if (sigma0 <= 0.0) {
    const double x = std::max(0.0, mu0);
    return {x, x * x};
  }
  const double a = -mu0 / sigma0;
  const double lam = inverse_mills_ratio(a);
  const double mean = mu0 + sigma0 * lam;
  const double var = sigma0 * sigma0 * std::max(0.0, 1.0 + a * lam - lam * lam);
  return {mean, var + mean * mean};
}

double sample_truncated_normal(double mu0, double sigma0, Rng& rng) {
  const double a = -mu0 / sigma0;
  double z;
  if (a < 0.5) {
    std::normal_distribution<double> n01;
    do {
      z = n01(rng);
    } while (z < a);
  } else {
    // Robert's exponential proposal for tails.
    const double alpha = 0.5 * (a + std::sqrt(a * a + 4.0));
    std::exponential_distribution<double> ex(alpha);
    std::uniform_real_distribution<double> u01;
    for (;;) {
      z = a + ex(rng);
      if (u01(rng) <= std::exp(-0.5 * (z - alpha) * (z - alpha))) break;
    }
  }
  return std::max(0.0, mu0 + sigma0 * z);
}

std::optional<DistributionSpec> solve_distribution(Family family, double mean,
                                                   double variance) {
  if (!(mean > 0.0) || !(variance > 0.0) || !std::isfinite(mean) ||
      !std::isfinite(variance)) {
    return std::nullopt;
  }
  const double sd = std::sqrt(variance);
  switch (family) {
    case Family::Uniform: {
      const double half = std::sqrt(3.0) * sd;
      if (mean - half < 0.0) return std::nullopt;
      return checked({family, mean, variance, {mean - half, mean + half}});
    }
    case Family::TruncatedNormal:
      return solve_truncated_normal(mean, variance);
    case Family::FatigueLife: {
      // With u = alpha^2: cv^2 (1 + u/2)^2 = u (1 + 5u/4), a quadratic in u.
      const double c2 = variance / (mean * mean);
      const double qa = 1.25 - c2 / 4.0;
      if (qa <= 0.0) return std::nullopt;
      const double qb = 1.0 - c2;
      const double u = (-qb + std::sqrt(qb * qb + 4.0 * qa * c2)) / (2.0 * qa);
      const double beta = mean / (1.0 + u / 2.0);
      return checked({family, mean, variance, {std::sqrt(u), beta}});
    }
    case Family::Bimodal:
      return solve_bimodal(mean, variance);
    case Family::Gamma:
      return checked({family, mean, variance, {mean * mean / variance, variance / mean}});
  }
  return std::nullopt;
}

double distribution_mean(const DistributionSpec& spec) {
  const auto& p = spec.params;
  switch (spec.family) {
    case Family::Uniform: return 0.5 * (p[0] + p[1]);
    case Family::TruncatedNormal: return tn_mean_var(p[0], p[1]).mean;
    case Family::FatigueLife: return p[1] * (1.0 + p[0] * p[0] / 2.0);
    case Family::Bimodal: return bimodal_mean_var(p[0], p[1], p[2]).mean;
    case Family::Gamma: return p[0] * p[1];
  }
  return 0.0;
}

double distribution_variance(const DistributionSpec& spec) {
  const auto& p = spec.params;
  switch (spec.family) {
    case Family::Uniform: return (p[1] - p[0]) * (p[1] - p[0]) / 12.0;
    case Family::TruncatedNormal: return tn_mean_var(p[0], p[1]).var;
    case Family::FatigueLife: {
      const double ab = p[0] * p[1];
      return ab * ab * (1.0 + 1.25 * p[0] * p[0]);
    }
    case Family::Bimodal: return bimodal_mean_var(p[0], p[1], p[2]).var;
    case Family::Gamma: return p[0] * p[1] * p[1];
  }
  return 0.0;
}

double sample(const DistributionSpec& spec, Rng& rng) {
  const auto& p = spec.params;
  switch (spec.family) {
    case Family::Uniform:
      return std::uniform_real_distribution<double>(p[0], p[1])(rng);
    case Family::TruncatedNormal:
      return sample_truncated_normal(p[0], p[1], rng);
    case Family::FatigueLife: {
      const double t = 0.5 * p[0] * std::normal_distribution<double>()(rng);
      const double r = std::sqrt(t * t + 1.0);
      const double root = t >= 0.0 ? t + r : 1.0 / (r - t);
      return p[1] * root * root;
    }
    case Family::Bimodal: {
      const bool upper = std::bernoulli_distribution(0.5)(rng);
      return sample_truncated_normal(upper ? p[1] : p[0], p[2], rng);
    }
    case Family::Gamma:
      return std::gamma_distribution<double>(p[0], p[1])(rng);
  }
  return 0.0;
}

}  // namespace ddcc
