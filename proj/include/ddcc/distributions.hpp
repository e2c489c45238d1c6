#pragma once

// Nonnegative distribution families used by the benchmark generators, with
// parameters solved from a target mean and variance.

#include <optional>
#include <string>
#include <vector>

#include "ddcc/rng.hpp"

namespace ddcc {

enum class Family { Uniform, TruncatedNormal, FatigueLife, Bimodal, Gamma };

inline constexpr Family kAllFamilies[] = {Family::Uniform, Family::TruncatedNormal,
                                          Family::FatigueLife, Family::Bimodal,
                                          Family::Gamma};

const char* to_string(Family family);
Family parse_family(const std::string& name);

/// Target moments plus the solved family parameters:
///   Uniform          {a, b}
///   TruncatedNormal  {mu0, sigma0}        normal restricted to [0, inf)
///   FatigueLife      {alpha, beta}        Birnbaum-Saunders
///   Bimodal          {c1, c2, sigma0}     equal mixture of two truncated normals
///   Gamma            {shape, scale}
struct DistributionSpec {
  Family family = Family::Uniform;
  double mean = 0.0;
  double variance = 0.0;
  std::vector<double> params;
};

/// Solves the family parameters for the target moments; nullopt when the
/// family cannot realize them (e.g. a uniform law would need a negative
/// lower end) or the solved moments miss by more than 1e-6.
std::optional<DistributionSpec> solve_distribution(Family family, double mean,
                                                   double variance);

/// Mean and variance implied by the parameters (not the targets).
double distribution_mean(const DistributionSpec& spec);
double distribution_variance(const DistributionSpec& spec);

double sample(const DistributionSpec& spec, Rng& rng);

// Normal law N(mu0, sigma0^2) conditioned on X >= 0.
struct TruncatedMoments {
  double mean;
  double second;  // E[X^2]
};
TruncatedMoments truncated_normal_moments(double mu0, double sigma0);
/// phi(a) / (1 - Phi(a)), stable for large a.
double inverse_mills_ratio(double a);
double sample_truncated_normal(double mu0, double sigma0, Rng& rng);

}  // namespace ddcc
