#include "gsv/model.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "gsv/error.hpp"

namespace gsv {

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kNegativeProb: return "NEGATIVE_PROB";
    case ViolationKind::kSumNotOne: return "SUM_NOT_ONE";
    case ViolationKind::kOrphanFace: return "ORPHAN_FACE";
    case ViolationKind::kArityMismatch: return "ARITY_MISMATCH";
    case ViolationKind::kDuplicateLabel: return "DUPLICATE_LABEL";
    case ViolationKind::kEmpty: return "EMPTY";
  }
  return "UNKNOWN";
}

std::string Violation::describe() const {
  std::ostringstream out;
  out << to_string(kind);
  if (die) out << " die=" << *die;
  if (face) out << " face=" << *face;
  return out.str();
}

ValidationReport validate_source(const SourceSpec& spec) {
  ValidationReport report;
  auto add = [&](ViolationKind kind, std::optional<DieIndex> d, std::optional<FaceIndex> f) {
    report.violations.push_back({kind, d, f});
  };

  const std::size_t faces = spec.num_faces();
  if (faces == 0 || spec.num_dice() == 0) {
    add(ViolationKind::kEmpty, std::nullopt, std::nullopt);
    return report;
  }

  std::set<std::string> seen;
  for (FaceIndex f = 0; f < faces; ++f) {
    if (!seen.insert(spec.face_labels[f]).second) add(ViolationKind::kDuplicateLabel, std::nullopt, f);
  }

  std::vector<bool> covered(faces, false);
  for (DieIndex d = 0; d < spec.num_dice(); ++d) {
    const Die& die = spec.dice[d];
    if (die.arity() != faces) {
      add(ViolationKind::kArityMismatch, d, std::nullopt);
      continue;
    }
    Rational total = 0;
    for (FaceIndex f = 0; f < faces; ++f) {
      const Rational& p = die.probs[f];
      if (p < 0) add(ViolationKind::kNegativeProb, d, f);
      if (p > 0) covered[f] = true;
      total += p;
    }
    if (total != 1) add(ViolationKind::kSumNotOne, d, std::nullopt);
  }
  for (FaceIndex f = 0; f < faces; ++f) {
    if (!covered[f]) add(ViolationKind::kOrphanFace, std::nullopt, f);
  }
  return report;
}

SourceSpec SourceSpec::checked(std::vector<Die> dice, std::vector<std::string> labels) {
  SourceSpec spec;
  spec.dice = std::move(dice);
  if (labels.empty() && !spec.dice.empty()) {
    for (std::size_t f = 0; f < spec.dice.front().arity(); ++f) labels.push_back(std::to_string(f));
  }
  spec.face_labels = std::move(labels);
  auto report = validate_source(spec);
  if (!report.ok()) {
    std::string msg;
    for (const auto& v : report.violations) msg += (msg.empty() ? "" : ", ") + v.describe();
    throw GsvError(ErrorCode::kInvalidSource, msg);
  }
  return spec;
}

std::string_view to_string(WitnessKind kind) {
  switch (kind) {
    case WitnessKind::kNk: return "NK";
    case WitnessKind::kNkPlus: return "NK_PLUS";
    case WitnessKind::kHnkSubset: return "HNK_SUBSET";
    case WitnessKind::kMvr: return "MVR";
    case WitnessKind::kMvd: return "MVD";
  }
  return "UNKNOWN";
}

namespace {

void check_arity(const Die& die, std::span<const Rational> psi) {
  if (die.arity() != psi.size()) {
    throw GsvError(ErrorCode::kDimension, "die has " + std::to_string(die.arity()) +
                                              " faces but psi has " + std::to_string(psi.size()));
  }
}

}  // namespace

Rational die_mean(const Die& die, std::span<const Rational> psi) {
  check_arity(die, psi);
  Rational mean = 0;
  for (std::size_t f = 0; f < psi.size(); ++f) {
    if (die.probs[f] != 0) mean += die.probs[f] * psi[f];
  }
  return mean;
}

Rational die_var(const Die& die, std::span<const Rational> psi) {
  check_arity(die, psi);
  Rational mean = 0;
  Rational second = 0;
  for (std::size_t f = 0; f < psi.size(); ++f) {
    if (die.probs[f] == 0) continue;
    Rational weighted = die.probs[f] * psi[f];
    mean += weighted;
    second += weighted * psi[f];
  }
  return second - mean * mean;
}

std::vector<FaceIndex> support(const Die& die) {
  std::vector<FaceIndex> out;
  for (FaceIndex f = 0; f < die.arity(); ++f) {
    if (die.probs[f] > 0) out.push_back(f);
  }
  return out;
}

RationalVector normalize_max_abs(RationalVector values) {
  Rational peak = 0;
  for (const auto& v : values) peak = std::max(peak, abs(v));
  if (peak == 0) return values;
  for (auto& v : values) v /= peak;
  return values;
}

StrategyTree::StrategyTree(std::size_t num_faces, std::size_t depth, DieIndex fill)
    : num_faces_(num_faces) {
  std::uint64_t width = 1;
  levels_.reserve(depth);
  for (std::size_t k = 0; k < depth; ++k) {
    levels_.emplace_back(width, fill);
    width *= num_faces;
  }
}

DieIndex StrategyTree::at(std::span<const FaceIndex> history) const {
  if (history.size() >= levels_.size()) {
    throw GsvError(ErrorCode::kStrategy, "history of length " + std::to_string(history.size()) +
                                             " exceeds strategy depth " +
                                             std::to_string(levels_.size()));
  }
  std::uint64_t code = 0;
  for (FaceIndex f : history) {
    if (f >= num_faces_) throw GsvError(ErrorCode::kStrategy, "face index out of range");
    code = code * num_faces_ + f;
  }
  return levels_[history.size()][code];
}

Strategy Strategy::constant(DieIndex die) {
  Strategy s;
  s.rule_ = [die](std::span<const FaceIndex>) { return die; };
  return s;
}

Strategy Strategy::from_rule(Rule rule) {
  Strategy s;
  s.rule_ = std::move(rule);
  return s;
}

Strategy Strategy::from_tree(StrategyTree tree) {
  Strategy s;
  s.tree_ = std::make_shared<const StrategyTree>(std::move(tree));
  return s;
}

DieIndex Strategy::choose(std::span<const FaceIndex> history) const {
  if (tree_) return tree_->at(history);
  return rule_(history);
}

FaceSampler::FaceSampler(const SourceSpec& spec) {
  const mpz_class two64 = mpz_class(1) << 64;
  thresholds_.reserve(spec.num_dice());
  for (const Die& die : spec.dice) {
    std::vector<unsigned __int128> row;
    Rational cdf = 0;
    for (const Rational& p : die.probs) {
      cdf += p;
      Rational scaled = cdf * two64;
      mpz_class ceil_scaled = scaled.get_num() / scaled.get_den();
      if (ceil_scaled * scaled.get_den() != scaled.get_num()) ceil_scaled += 1;
      if (ceil_scaled > two64) ceil_scaled = two64;
      // Split into two 64-bit halves for the 128-bit threshold.
      mpz_class high = ceil_scaled >> 64;
      mpz_class low = ceil_scaled - (high << 64);
      unsigned __int128 value = static_cast<unsigned __int128>(mpz_get_ui(high.get_mpz_t())) << 64;
      // mpz_get_ui is 64-bit on LP64 targets.
      value |= static_cast<unsigned __int128>(mpz_get_ui(low.get_mpz_t()));
      row.push_back(value);
    }
    thresholds_.push_back(std::move(row));
  }
}

FaceIndex FaceSampler::sample(DieIndex die, std::uint64_t u) const {
  if (die >= thresholds_.size()) {
    throw GsvError(ErrorCode::kStrategy, "die index " + std::to_string(die) + " out of range");
  }
  const auto& row = thresholds_[die];
  for (FaceIndex f = 0; f < row.size(); ++f) {
    if (u < row[f]) return f;
  }
  // Unreachable for a die whose probabilities sum to one.
  throw GsvError(ErrorCode::kInvalidSource, "die probabilities do not sum to one");
}

History sample_sequence(const SourceSpec& spec, const Strategy& strategy, std::size_t n,
                        std::uint64_t seed) {
  FaceSampler sampler(spec);
  std::mt19937_64 rng(seed);
  History history;
  history.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    DieIndex die = strategy.choose(history);
    if (die >= spec.num_dice()) {
      throw GsvError(ErrorCode::kStrategy, "strategy chose die " + std::to_string(die) + " of " +
                                               std::to_string(spec.num_dice()));
    }
    history.push_back(sampler.sample(die, rng()));
  }
  return history;
}

}  // namespace gsv
