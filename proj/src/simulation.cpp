#include "gsv/simulation.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "gsv/error.hpp"
#include "gsv/extractors.hpp"

namespace gsv {

namespace {

std::int64_t to_int64(const mpz_class& value) {
  if (!value.fits_slong_p()) {
    throw GsvError(ErrorCode::kInvalidArgument, "scaled threshold value overflows 64 bits");
  }
  return value.get_si();
}

}  // namespace

ScaledThreshold::ScaledThreshold(std::span<const Rational> psi, const Rational& epsilon) {
  mpz_class den = 1;
  for (const Rational& v : psi) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), v.get_den_mpz_t());
  const Rational m = threshold_level(epsilon);
  denominator_ = to_int64(den);
  level_ = to_int64(mpz_class(m.get_num() * den));
  for (const Rational& v : psi) {
    Rational scaled = v * Rational(den);
    steps_.push_back(to_int64(scaled.get_num()));
  }
  // |z| stays below level + max step, well inside int64 for any sane input.
  if (level_ > std::numeric_limits<std::int64_t>::max() / 4) {
    throw GsvError(ErrorCode::kInvalidArgument, "threshold level too large to simulate");
  }
}

double SimulationResult::mean() const {
  if (trials == 0) return 0.0;
  return 2.0 * static_cast<double>(plus) / static_cast<double>(trials) - 1.0;
}

double SimulationResult::std_error() const {
  if (trials == 0) return 0.0;
  const double p = static_cast<double>(plus) / static_cast<double>(trials);
  return 2.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

SimulationResult simulate_threshold(const SourceSpec& spec, const ScaledThreshold& ext,
                                    std::size_t n, const SumRule& rule, std::uint64_t trials,
                                    std::uint64_t seed) {
  if (ext.steps().size() != spec.num_faces()) {
    throw GsvError(ErrorCode::kDimension, "psi does not match the face alphabet");
  }
  FaceSampler sampler(spec);
  std::mt19937_64 rng(seed);
  SimulationResult result;
  result.trials = trials;
  const std::int64_t level = ext.level();
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    std::int64_t z = 0;
    for (std::size_t t = 0; t < n; ++t) {
      if (z >= level || z <= -level) break;
      const DieIndex d = rule(z, t);
      if (d >= spec.num_dice()) {
        throw GsvError(ErrorCode::kStrategy, "rule chose die " + std::to_string(d));
      }
      z += ext.steps()[sampler.sample(d, rng())];
    }
    if (z >= 0) ++result.plus;
  }
  return result;
}

}  // namespace gsv
