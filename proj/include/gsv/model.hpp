#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gsv/rational.hpp"

namespace gsv {

using FaceIndex = std::size_t;
using DieIndex = std::size_t;
using History = std::vector<FaceIndex>;

// A probability distribution over the face alphabet.
struct Die {
  RationalVector probs;

  std::size_t arity() const { return probs.size(); }
};

// A GSV source type: a face alphabet plus a finite set of dice over it.
// Construction does not validate; use validate_source() or SourceSpec::checked().
struct SourceSpec {
  std::vector<std::string> face_labels;
  std::vector<Die> dice;

  std::size_t num_faces() const { return face_labels.size(); }
  std::size_t num_dice() const { return dice.size(); }

  // Labels default to "0", "1", ... ; throws GsvError(kInvalidSource) when
  // validate_source reports any violation.
  static SourceSpec checked(std::vector<Die> dice, std::vector<std::string> labels = {});
};

enum class ViolationKind {
  kNegativeProb,
  kSumNotOne,
  kOrphanFace,
  kArityMismatch,
  kDuplicateLabel,
  kEmpty,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::optional<DieIndex> die;
  std::optional<FaceIndex> face;

  std::string describe() const;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

ValidationReport validate_source(const SourceSpec& spec);

enum class WitnessKind { kNk, kNkPlus, kHnkSubset, kMvr, kMvd };

std::string_view to_string(WitnessKind kind);

// A face function psi: F -> [-1, 1] together with the condition it certifies.
struct Witness {
  RationalVector values;
  WitnessKind kind = WitnessKind::kNk;
  std::optional<Rational> epsilon;
  // min over dice of Var_d[psi(F)], recorded when known.
  std::optional<Rational> min_variance;

  std::size_t size() const { return values.size(); }
  const Rational& operator()(FaceIndex f) const { return values[f]; }
};

// E_d[psi(F)] and Var_d[psi(F)], exact. Throw GsvError(kDimension) on arity
// mismatch.
Rational die_mean(const Die& die, std::span<const Rational> psi);
Rational die_var(const Die& die, std::span<const Rational> psi);
inline Rational die_mean(const Die& die, const Witness& psi) { return die_mean(die, psi.values); }
inline Rational die_var(const Die& die, const Witness& psi) { return die_var(die, psi.values); }

std::vector<FaceIndex> support(const Die& die);

// Scales a nonzero vector so that max |psi(f)| = 1. Zero vectors are returned
// unchanged.
RationalVector normalize_max_abs(RationalVector values);

// Explicit strategy of bounded depth: one die per history of length < depth.
// Level k holds |F|^k entries indexed by the history read as a base-|F|
// number, first face most significant.
class StrategyTree {
 public:
  StrategyTree() = default;
  StrategyTree(std::size_t num_faces, std::size_t depth, DieIndex fill = 0);

  std::size_t num_faces() const { return num_faces_; }
  std::size_t depth() const { return levels_.size(); }

  DieIndex at(std::span<const FaceIndex> history) const;
  DieIndex& at(std::size_t level, std::uint64_t code) { return levels_[level][code]; }
  DieIndex at(std::size_t level, std::uint64_t code) const { return levels_[level][code]; }
  std::size_t level_size(std::size_t level) const { return levels_[level].size(); }

  bool operator==(const StrategyTree&) const = default;

 private:
  std::size_t num_faces_ = 0;
  std::vector<std::vector<DieIndex>> levels_;
};

// An adaptive adversary: a deterministic rule from history to die index.
class Strategy {
 public:
  using Rule = std::function<DieIndex(std::span<const FaceIndex>)>;

  static Strategy constant(DieIndex die);
  static Strategy from_rule(Rule rule);
  static Strategy from_tree(StrategyTree tree);

  DieIndex choose(std::span<const FaceIndex> history) const;

  // Non-null when the strategy is an explicit tree.
  const StrategyTree* tree() const { return tree_.get(); }

 private:
  Rule rule_;
  std::shared_ptr<const StrategyTree> tree_;
};

// Inverse-CDF sampler for one spec. A uniform 64-bit draw u selects the first
// face f with u / 2^64 < cdf(f), compared exactly.
class FaceSampler {
 public:
  explicit FaceSampler(const SourceSpec& spec);

  FaceIndex sample(DieIndex die, std::uint64_t u) const;
  std::size_t num_dice() const { return thresholds_.size(); }

 private:
  // thresholds_[d][f] = ceil(cdf_d(f) * 2^64); u < threshold <=> u < cdf * 2^64.
  std::vector<std::vector<unsigned __int128>> thresholds_;
};

// Draws n faces, each from the die the strategy picks for the prefix so far.
// Deterministic in (spec, strategy, n, seed). Throws GsvError(kStrategy) if
// the strategy returns an out-of-range die.
History sample_sequence(const SourceSpec& spec, const Strategy& strategy, std::size_t n,
                        std::uint64_t seed);

}  // namespace gsv
