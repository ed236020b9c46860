#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>

#include "gsv/model.hpp"

namespace gsv {

enum class OutputKind { kSign, kIndex };

// A deterministic extractor on exactly n faces. Sign outputs are -1/+1;
// index outputs lie in [0, 2^m).
struct ExtractorTable {
  using Eval = std::function<std::int64_t(std::span<const FaceIndex>)>;

  std::size_t n = 0;
  OutputKind kind = OutputKind::kSign;
  unsigned m = 1;
  Eval eval;

  static ExtractorTable sign(std::size_t n, Eval eval);
  static ExtractorTable index(std::size_t n, unsigned m, Eval eval);
  // outputs[code] for the sequence read as a base-|F| number, first face
  // most significant.
  static ExtractorTable lookup(std::size_t n, std::size_t num_faces, OutputKind kind, unsigned m,
                               std::vector<std::int64_t> outputs);
};

inline constexpr std::uint64_t kDefaultTreeGuard = 100'000'000;
inline constexpr std::uint64_t kDefaultEnumGuard = 1'000'000;

// GSV_TREE_GUARD when set to a positive integer, kDefaultTreeGuard otherwise.
std::uint64_t tree_guard_from_env();
// Throws GsvError(kTreeLimit) when |F|^n exceeds guard.
void check_tree_guard(std::size_t num_faces, std::size_t n, std::uint64_t guard);

struct BiasReport {
  Rational max_expectation;
  Rational min_expectation;
  Rational bias;
  StrategyTree max_strategy;
  StrategyTree min_strategy;
};

// Backward induction over the full history tree. Each internal node takes
// the best die for the pass; ties go to the smallest die index.
BiasReport exact_extremes(const SourceSpec& spec, const ExtractorTable& ext,
                          std::uint64_t guard = kDefaultTreeGuard);

// Visits every positive-probability sequence of length n under the strategy.
void enumerate_outcomes(const SourceSpec& spec, const Strategy& strategy, std::size_t n,
                        const std::function<void(std::span<const FaceIndex>, const Rational&)>& visit,
                        std::uint64_t guard = kDefaultTreeGuard);

// Exact output distribution; outputs with probability zero are omitted.
std::map<std::int64_t, Rational> output_distribution(const SourceSpec& spec,
                                                     const Strategy& strategy,
                                                     const ExtractorTable& ext,
                                                     std::uint64_t guard = kDefaultTreeGuard);

Rational expectation(const std::map<std::int64_t, Rational>& distribution);

// Total variation distance from uniform on [0, 2^m).
Rational distance_from_uniform(const std::map<std::int64_t, Rational>& distribution, unsigned m);

struct MultibitErrorReport {
  Rational distance;
  std::optional<StrategyTree> worst;  // set in exhaustive mode
  bool exhaustive = false;
};

// Number of deterministic strategy trees of depth n, or nullopt above limit.
std::optional<std::uint64_t> strategy_count(std::size_t num_faces, std::size_t num_dice,
                                            std::size_t n, std::uint64_t limit);

// Worst case over every strategy tree; throws GsvError(kEnumLimit) when
// there are more than enum_guard of them. The first worst tree in
// enumeration order is reported.
MultibitErrorReport exact_multibit_error(const SourceSpec& spec, const ExtractorTable& ext,
                                         std::uint64_t enum_guard = kDefaultEnumGuard,
                                         std::uint64_t guard = kDefaultTreeGuard);
// Distance for one supplied strategy.
MultibitErrorReport exact_multibit_error(const SourceSpec& spec, const ExtractorTable& ext,
                                         const Strategy& strategy,
                                         std::uint64_t guard = kDefaultTreeGuard);

// Calls visit for every strategy tree of depth n, in odometer order with the
// root varying slowest. Throws GsvError(kEnumLimit) above enum_guard.
void for_each_strategy_tree(std::size_t num_faces, std::size_t num_dice, std::size_t n,
                            const std::function<void(const StrategyTree&)>& visit,
                            std::uint64_t enum_guard = kDefaultEnumGuard);

struct GreedyResult {
  StrategyTree tree;
  Rational root_min;   // advantage every strategy guarantees, Pr[Ext = +1]
  Rational advantage;  // Pr[Ext = +1] under the greedy tree
  Rational promised;   // root_min + eps / (1 + eps) * root_min * (1 - root_min)
};

// Adversary pushing Pr[Ext = +1] up. At each node alpha is the minimum over
// strategies of the conditional advantage and alpha(f) the same for each
// child; the first die with E_d[alpha(F) - alpha] >= eps * Var_d[alpha(F)]
// is tossed. Throws GsvError(kNoQualifyingDie) when no die qualifies.
GreedyResult greedy_plus(const SourceSpec& spec, const ExtractorTable& ext, const Rational& epsilon,
                         std::uint64_t guard = kDefaultTreeGuard);
Strategy greedy_plus_strategy(const SourceSpec& spec, const ExtractorTable& ext,
                              const Rational& epsilon, std::uint64_t guard = kDefaultTreeGuard);

}  // namespace gsv
