#pragma once

#include <cstdint>
#include <functional>

#include "gsv/model.hpp"

namespace gsv {

// Threshold extractor with psi scaled to integers by a common denominator,
// so that Monte-Carlo runs avoid rational arithmetic while staying exact.
class ScaledThreshold {
 public:
  ScaledThreshold(std::span<const Rational> psi, const Rational& epsilon);

  // denominator * psi(f)
  const std::vector<std::int64_t>& steps() const { return steps_; }
  std::int64_t denominator() const { return denominator_; }
  // denominator * M
  std::int64_t level() const { return level_; }

 private:
  std::vector<std::int64_t> steps_;
  std::int64_t denominator_ = 1;
  std::int64_t level_ = 0;
};

// Adversary that sees the scaled running sum and the step index.
using SumRule = std::function<DieIndex(std::int64_t scaled_z, std::size_t step)>;

struct SimulationResult {
  std::uint64_t trials = 0;
  std::uint64_t plus = 0;  // outputs equal to +1

  double mean() const;       // estimate of E[Ext]
  double std_error() const;  // binomial standard error of mean()
};

// Runs `trials` independent n-step extractions against the rule. Draws come
// from one std::mt19937_64 seeded with `seed`.
SimulationResult simulate_threshold(const SourceSpec& spec, const ScaledThreshold& ext,
                                    std::size_t n, const SumRule& rule, std::uint64_t trials,
                                    std::uint64_t seed);

}  // namespace gsv
