#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace trajsmooth {

using Rng = std::mt19937_64;

/// Engine for one named stream of a seeded run. Streams with different ids are
/// statistically independent and do not depend on how work is scheduled.
Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream = {});

/// Child seed for sub-run `index` of `base` (datasets of a benchmark, workers, ...).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

double sample_uniform(Rng& rng);
double sample_normal(Rng& rng, double mean = 0.0, double sd = 1.0);
bool sample_bernoulli(Rng& rng, double p);
double sample_gamma(Rng& rng, double shape, double rate);
double sample_beta(Rng& rng, double a, double b);
/// Inverse gamma with density proportional to x^(-shape-1) exp(-scale/x).
double sample_inverse_gamma(Rng& rng, double shape, double scale);
/// Chi-squared with `df` degrees of freedom, conditioned on exceeding `lower`.
double sample_truncated_chi_squared(Rng& rng, double df, double lower = 1.0);

}  // namespace trajsmooth
