#include "gsv/oracle.hpp"

#include <cstdlib>
#include <string>

#include "gsv/error.hpp"

namespace gsv {

ExtractorTable ExtractorTable::sign(std::size_t n, Eval eval) {
  return ExtractorTable{n, OutputKind::kSign, 1, std::move(eval)};
}

ExtractorTable ExtractorTable::index(std::size_t n, unsigned m, Eval eval) {
  return ExtractorTable{n, OutputKind::kIndex, m, std::move(eval)};
}

ExtractorTable ExtractorTable::lookup(std::size_t n, std::size_t num_faces, OutputKind kind,
                                      unsigned m, std::vector<std::int64_t> outputs) {
  auto table = std::make_shared<const std::vector<std::int64_t>>(std::move(outputs));
  Eval eval = [table, num_faces](std::span<const FaceIndex> faces) {
    std::uint64_t code = 0;
    for (FaceIndex f : faces) code = code * num_faces + f;
    return table->at(code);
  };
  return ExtractorTable{n, kind, m, std::move(eval)};
}

std::uint64_t tree_guard_from_env() {
  const char* raw = std::getenv("GSV_TREE_GUARD");
  if (raw == nullptr || *raw == '\0') return kDefaultTreeGuard;
  char* end = nullptr;
  unsigned long long value = std::strtoull(raw, &end, 10);
  if (*end != '\0' || value == 0) {
    throw GsvError(ErrorCode::kInvalidArgument, std::string("bad GSV_TREE_GUARD: ") + raw);
  }
  return value;
}

void check_tree_guard(std::size_t num_faces, std::size_t n, std::uint64_t guard) {
  unsigned __int128 leaves = 1;
  for (std::size_t i = 0; i < n; ++i) {
    leaves *= num_faces;
    if (leaves > guard) {
      throw GsvError(ErrorCode::kTreeLimit, std::to_string(num_faces) + "^" + std::to_string(n) +
                                                " histories exceed the guard of " +
                                                std::to_string(guard));
    }
  }
}

namespace {

struct Extremes {
  Rational hi;
  Rational lo;
};

class ExtremesSearch {
 public:
  ExtremesSearch(const SourceSpec& spec, const ExtractorTable& ext)
      : spec_(spec),
        ext_(ext),
        max_tree_(spec.num_faces(), ext.n),
        min_tree_(spec.num_faces(), ext.n) {
    history_.reserve(ext.n);
  }

  Extremes run() { return visit(0, 0); }
  StrategyTree& max_tree() { return max_tree_; }
  StrategyTree& min_tree() { return min_tree_; }

 private:
  Extremes visit(std::size_t level, std::uint64_t code) {
    if (level == ext_.n) {
      Rational v(static_cast<long>(ext_.eval(history_)));
      return {v, v};
    }
    const std::size_t faces = spec_.num_faces();
    std::vector<Extremes> child;
    child.reserve(faces);
    for (FaceIndex f = 0; f < faces; ++f) {
      history_.push_back(f);
      child.push_back(visit(level + 1, code * faces + f));
      history_.pop_back();
    }
    Extremes best;
    DieIndex arg_hi = 0, arg_lo = 0;
    for (DieIndex d = 0; d < spec_.num_dice(); ++d) {
      Rational hi = 0, lo = 0;
      for (FaceIndex f = 0; f < faces; ++f) {
        const Rational& p = spec_.dice[d].probs[f];
        if (p == 0) continue;
        hi += p * child[f].hi;
        lo += p * child[f].lo;
      }
      if (d == 0 || hi > best.hi) {
        best.hi = hi;
        arg_hi = d;
      }
      if (d == 0 || lo < best.lo) {
        best.lo = lo;
        arg_lo = d;
      }
    }
    max_tree_.at(level, code) = arg_hi;
    min_tree_.at(level, code) = arg_lo;
    return best;
  }

  const SourceSpec& spec_;
  const ExtractorTable& ext_;
  StrategyTree max_tree_;
  StrategyTree min_tree_;
  History history_;
};

void walk(const SourceSpec& spec, const Strategy& strategy, std::size_t n, History& history,
          const Rational& prob,
          const std::function<void(std::span<const FaceIndex>, const Rational&)>& visit) {
  if (history.size() == n) {
    visit(history, prob);
    return;
  }
  const DieIndex d = strategy.choose(history);
  if (d >= spec.num_dice()) {
    throw GsvError(ErrorCode::kStrategy, "strategy chose die " + std::to_string(d));
  }
  const Die& die = spec.dice[d];
  for (FaceIndex f = 0; f < spec.num_faces(); ++f) {
    if (die.probs[f] == 0) continue;
    history.push_back(f);
    walk(spec, strategy, n, history, prob * die.probs[f], visit);
    history.pop_back();
  }
}

ExtractorTable tabulate(const SourceSpec& spec, const ExtractorTable& ext) {
  const std::size_t faces = spec.num_faces();
  std::uint64_t leaves = 1;
  for (std::size_t i = 0; i < ext.n; ++i) leaves *= faces;
  std::vector<std::int64_t> outputs(leaves);
  History h(ext.n, 0);
  for (std::uint64_t code = 0; code < leaves; ++code) {
    std::uint64_t rest = code;
    for (std::size_t i = ext.n; i > 0; --i) {
      h[i - 1] = rest % faces;
      rest /= faces;
    }
    outputs[code] = ext.eval(h);
  }
  return ExtractorTable::lookup(ext.n, faces, ext.kind, ext.m, std::move(outputs));
}

}  // namespace

BiasReport exact_extremes(const SourceSpec& spec, const ExtractorTable& ext, std::uint64_t guard) {
  check_tree_guard(spec.num_faces(), ext.n, guard);
  ExtremesSearch search(spec, ext);
  Extremes root = search.run();
  BiasReport report;
  report.max_expectation = root.hi;
  report.min_expectation = root.lo;
  report.bias = std::max(abs(root.hi), abs(root.lo));
  report.max_strategy = std::move(search.max_tree());
  report.min_strategy = std::move(search.min_tree());
  return report;
}

void enumerate_outcomes(const SourceSpec& spec, const Strategy& strategy, std::size_t n,
                        const std::function<void(std::span<const FaceIndex>, const Rational&)>& visit,
                        std::uint64_t guard) {
  check_tree_guard(spec.num_faces(), n, guard);
  History history;
  history.reserve(n);
  walk(spec, strategy, n, history, Rational(1), visit);
}

std::map<std::int64_t, Rational> output_distribution(const SourceSpec& spec,
                                                     const Strategy& strategy,
                                                     const ExtractorTable& ext,
                                                     std::uint64_t guard) {
  std::map<std::int64_t, Rational> dist;
  enumerate_outcomes(
      spec, strategy, ext.n,
      [&](std::span<const FaceIndex> faces, const Rational& p) { dist[ext.eval(faces)] += p; },
      guard);
  return dist;
}

Rational expectation(const std::map<std::int64_t, Rational>& distribution) {
  Rational total = 0;
  for (const auto& [value, p] : distribution) total += Rational(static_cast<long>(value)) * p;
  return total;
}

Rational distance_from_uniform(const std::map<std::int64_t, Rational>& distribution, unsigned m) {
  if (m > 62) throw GsvError(ErrorCode::kMLimit, "m too large for a distance computation");
  const std::uint64_t outputs = std::uint64_t{1} << m;
  const Rational uniform(1, outputs);
  Rational total = 0;
  std::uint64_t seen = 0;
  for (const auto& [value, p] : distribution) {
    if (value < 0 || static_cast<std::uint64_t>(value) >= outputs) {
      throw GsvError(ErrorCode::kDimension, "output " + std::to_string(value) + " outside [0, 2^m)");
    }
    if (p == 0) continue;
    total += abs(p - uniform);
    ++seen;
  }
  total += uniform * Rational(static_cast<unsigned long>(outputs - seen));
  return total / 2;
}

std::optional<std::uint64_t> strategy_count(std::size_t num_faces, std::size_t num_dice,
                                            std::size_t n, std::uint64_t limit) {
  unsigned __int128 nodes = 0, width = 1;
  for (std::size_t k = 0; k < n; ++k) {
    nodes += width;
    width *= num_faces;
    if (nodes > 64 * 64) break;
  }
  unsigned __int128 count = 1;
  for (unsigned __int128 i = 0; i < nodes; ++i) {
    count *= num_dice;
    if (count > limit) return std::nullopt;
  }
  return static_cast<std::uint64_t>(count);
}

void for_each_strategy_tree(std::size_t num_faces, std::size_t num_dice, std::size_t n,
                            const std::function<void(const StrategyTree&)>& visit,
                            std::uint64_t enum_guard) {
  if (!strategy_count(num_faces, num_dice, n, enum_guard)) {
    throw GsvError(ErrorCode::kEnumLimit, "more than " + std::to_string(enum_guard) +
                                              " strategy trees");
  }
  StrategyTree tree(num_faces, n, 0);
  std::vector<std::pair<std::size_t, std::uint64_t>> slots;
  for (std::size_t level = 0; level < n; ++level) {
    for (std::uint64_t code = 0; code < tree.level_size(level); ++code) slots.emplace_back(level, code);
  }
  while (true) {
    visit(tree);
    std::size_t i = slots.size();
    while (i > 0) {
      auto [level, code] = slots[i - 1];
      if (++tree.at(level, code) < num_dice) break;
      tree.at(level, code) = 0;
      --i;
    }
    if (i == 0) return;
  }
}

MultibitErrorReport exact_multibit_error(const SourceSpec& spec, const ExtractorTable& ext,
                                         std::uint64_t enum_guard, std::uint64_t guard) {
  check_tree_guard(spec.num_faces(), ext.n, guard);
  if (!strategy_count(spec.num_faces(), spec.num_dice(), ext.n, enum_guard)) {
    throw GsvError(ErrorCode::kEnumLimit, "more than " + std::to_string(enum_guard) +
                                              " strategy trees; use a fixed strategy");
  }
  const ExtractorTable table = tabulate(spec, ext);
  MultibitErrorReport report;
  report.exhaustive = true;
  bool first = true;
  for_each_strategy_tree(
      spec.num_faces(), spec.num_dice(), ext.n,
      [&](const StrategyTree& tree) {
        Strategy s = Strategy::from_tree(tree);
        Rational dist = distance_from_uniform(output_distribution(spec, s, table, guard), ext.m);
        if (first || dist > report.distance) {
          report.distance = dist;
          report.worst = tree;
          first = false;
        }
      },
      enum_guard);
  return report;
}

MultibitErrorReport exact_multibit_error(const SourceSpec& spec, const ExtractorTable& ext,
                                         const Strategy& strategy, std::uint64_t guard) {
  MultibitErrorReport report;
  report.distance = distance_from_uniform(output_distribution(spec, strategy, ext, guard), ext.m);
  return report;
}

namespace {

class GreedySearch {
 public:
  GreedySearch(const SourceSpec& spec, const ExtractorTable& ext, const Rational& epsilon)
      : spec_(spec), ext_(ext), epsilon_(epsilon), tree_(spec.num_faces(), ext.n) {}

  Rational run() { return visit(0, 0); }
  StrategyTree& tree() { return tree_; }

 private:
  Rational visit(std::size_t level, std::uint64_t code) {
    if (level == ext_.n) {
      std::int64_t out = ext_.eval(history_);
      if (out != 1 && out != -1) {
        throw GsvError(ErrorCode::kInvalidArgument, "greedy adversary needs a +-1 extractor");
      }
      return Rational(out == 1 ? 1 : 0);
    }
    const std::size_t faces = spec_.num_faces();
    RationalVector alpha_f;
    alpha_f.reserve(faces);
    for (FaceIndex f = 0; f < faces; ++f) {
      history_.push_back(f);
      alpha_f.push_back(visit(level + 1, code * faces + f));
      history_.pop_back();
    }
    RationalVector means;
    Rational alpha;
    for (DieIndex d = 0; d < spec_.num_dice(); ++d) {
      means.push_back(die_mean(spec_.dice[d], alpha_f));
      if (d == 0 || means.back() < alpha) alpha = means.back();
    }
    for (DieIndex d = 0; d < spec_.num_dice(); ++d) {
      if (means[d] - alpha >= epsilon_ * die_var(spec_.dice[d], alpha_f)) {
        tree_.at(level, code) = d;
        return alpha;
      }
    }
    throw GsvError(ErrorCode::kNoQualifyingDie,
                   "no die qualifies at depth " + std::to_string(level) + ", node " +
                       std::to_string(code));
  }

  const SourceSpec& spec_;
  const ExtractorTable& ext_;
  Rational epsilon_;
  StrategyTree tree_;
  History history_;
};

}  // namespace

GreedyResult greedy_plus(const SourceSpec& spec, const ExtractorTable& ext, const Rational& epsilon,
                         std::uint64_t guard) {
  if (ext.kind != OutputKind::kSign) {
    throw GsvError(ErrorCode::kInvalidArgument, "greedy adversary needs a +-1 extractor");
  }
  if (epsilon <= 0) throw GsvError(ErrorCode::kInvalidArgument, "epsilon must be positive");
  check_tree_guard(spec.num_faces(), ext.n, guard);
  GreedySearch search(spec, ext, epsilon);
  GreedyResult result;
  result.root_min = search.run();
  result.tree = std::move(search.tree());
  auto dist = output_distribution(spec, Strategy::from_tree(result.tree), ext, guard);
  result.advantage = dist.count(1) ? dist.at(1) : Rational(0);
  const Rational& a = result.root_min;
  result.promised = a + epsilon / (1 + epsilon) * a * (1 - a);
  return result;
}

Strategy greedy_plus_strategy(const SourceSpec& spec, const ExtractorTable& ext,
                              const Rational& epsilon, std::uint64_t guard) {
  return Strategy::from_tree(greedy_plus(spec, ext, epsilon, guard).tree);
}

}  // namespace gsv
