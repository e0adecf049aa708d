#include "trajsmooth/random.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

namespace trajsmooth {

Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) {
  std::vector<std::uint32_t> words;
  words.reserve(2 + 2 * stream.size());
  auto push = [&](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto s : stream) push(s);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  auto rng = make_rng(base, {0x646572697665ULL, index});
  return rng();
}

double sample_uniform(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

double sample_normal(Rng& rng, double mean, double sd) {
  return std::normal_distribution<double>(mean, sd)(rng);
}

bool sample_bernoulli(Rng& rng, double p) { return sample_uniform(rng) < p; }

double sample_gamma(Rng& rng, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) throw std::domain_error("sample_gamma: bad parameters");
  return std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
}

double sample_beta(Rng& rng, double a, double b) {
  const double x = sample_gamma(rng, a, 1.0);
  const double y = sample_gamma(rng, b, 1.0);
  // draws stay strictly inside (0, 1)
  constexpr double lo = std::numeric_limits<double>::min();
  constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  if (x + y == 0.0) return a >= b ? hi : lo;
  return std::clamp(x / (x + y), lo, hi);
}

double sample_inverse_gamma(Rng& rng, double shape, double scale) {
  return 1.0 / sample_gamma(rng, shape, scale);
}

double sample_truncated_chi_squared(Rng& rng, double df, double lower) {
  std::chi_squared_distribution<double> chi(df);
  for (int attempt = 0; attempt < 1'000'000; ++attempt) {
    const double r = chi(rng);
    if (r > lower) return r;
  }
  throw std::runtime_error("sample_truncated_chi_squared: rejection sampler did not terminate");
}

}  // namespace trajsmooth
