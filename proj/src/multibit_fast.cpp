#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>

#include "gsv/error.hpp"
#include "gsv/extractors.hpp"

namespace gsv {

MultiBitFast::MultiBitFast(unsigned m) : m_(m) {
  if (m < 1 || m > kFastMaxBits) {
    throw GsvError(ErrorCode::kMLimit, "fast multibit extractor needs 1 <= m <= " +
                                           std::to_string(kFastMaxBits) + ", got " +
                                           std::to_string(m));
  }
  size_ = std::uint64_t{1} << m;

  // Everything starts tied at 1/M; the highest index ranks on top.
  Block all;
  all.start = 0;
  all.size = size_;
  all.pieces.push_back({0, size_ - 1});
  all.tracked.push_back({size_ - 1, 0});
  all.tracked_offsets.push_back(size_ - 1);
  current_.push_back(std::move(all));
  denom_ = mpz_class(1) << m;
  values_.push_back(mpz_class(1));
  tracked_.push_back({0, size_ - 1});
}

std::uint64_t MultiBitFast::count_below(const std::vector<Piece>& pieces, std::uint64_t rank) {
  std::uint64_t total = 0;
  for (const Piece& p : pieces) {
    if (rank <= p.start) break;
    total += std::min(p.count, (rank - p.start + 1) / 2);
  }
  return total;
}

std::uint64_t MultiBitFast::prev_rank_at(const Block& block, std::uint64_t offset) {
  auto it = std::lower_bound(block.tracked_offsets.begin(), block.tracked_offsets.end(), offset);
  if (it != block.tracked_offsets.end() && *it == offset) {
    return block.tracked[it - block.tracked_offsets.begin()].prev_rank;
  }
  std::uint64_t index = offset - static_cast<std::uint64_t>(it - block.tracked_offsets.begin());
  for (const Piece& p : block.pieces) {
    if (index < p.count) return p.start + 2 * index;
    index -= p.count;
  }
  throw std::logic_error("rank outside the block");
}

void MultiBitFast::finish_layout(std::vector<Block>& layout) {
  std::uint64_t start = 0;
  for (Block& b : layout) {
    b.start = start;
    std::uint64_t grouped = 0;
    for (const Piece& p : b.pieces) grouped += p.count;
    b.size = grouped + b.tracked.size();
    b.tracked_offsets.clear();
    for (std::size_t k = 0; k < b.tracked.size(); ++k) {
      b.tracked_offsets.push_back(k + count_below(b.pieces, b.tracked[k].prev_rank));
    }
    start += b.size;
  }
  if (start != size_) throw std::logic_error("layout does not cover every martingale");
}

void MultiBitFast::promote_top() {
  Block& last = current_.back();
  if (!last.tracked_offsets.empty() && last.tracked_offsets.back() == last.size - 1) return;
  Piece& piece = last.pieces.back();
  const std::uint64_t prev = piece.start + 2 * (piece.count - 1);
  if (--piece.count == 0) last.pieces.pop_back();
  const auto id = static_cast<std::uint32_t>(tracked_.size());
  last.tracked.push_back({prev, id});
  last.tracked_offsets.push_back(last.size - 1);
  tracked_.push_back({history_.size(), size_ - 1});
}

void MultiBitFast::step(const Rational& psi_value) {
  if (psi_value == 0) return;
  // Factors 1 -/+ psi/2 = (2b -/+ a) / 2b for psi = a/b.
  const mpz_class twice_den = 2 * mpz_class(psi_value.get_den());
  const mpz_class down = twice_den - psi_value.get_num();
  const mpz_class up = twice_den + psi_value.get_num();

  struct Build {
    std::vector<Piece> pieces;
    std::vector<Member> tracked;
  };
  std::map<mpz_class, Build> next;

  auto add_segment = [&](std::uint64_t a, std::uint64_t len, const mpz_class& w) {
    if (len == 0) return;
    const std::uint64_t end = a + len;
    const std::uint64_t first_even = a + (a & 1);
    const std::uint64_t first_odd = a + ((a & 1) ^ 1);
    if (first_even < end) next[w * down].pieces.push_back({first_even, (end - first_even + 1) / 2});
    if (first_odd < end) next[w * up].pieces.push_back({first_odd, (end - first_odd + 1) / 2});
  };

  std::optional<Member> top;
  for (std::size_t bi = 0; bi < current_.size(); ++bi) {
    const Block& b = current_[bi];
    const mpz_class& w = values_[bi];
    std::uint64_t pos = 0;
    for (std::size_t k = 0; k < b.tracked.size(); ++k) {
      const std::uint64_t offset = b.tracked_offsets[k];
      add_segment(b.start + pos, offset - pos, w);
      const std::uint64_t rank = b.start + offset;
      const Member member{rank, b.tracked[k].id};
      if (rank == size_ - 1) {
        top = member;
      } else {
        next[w * ((rank & 1) ? up : down)].tracked.push_back(member);
      }
      pos = offset + 1;
    }
    add_segment(b.start + pos, b.size - pos, w);
  }
  if (!top) throw std::logic_error("top martingale is not individually tracked");

  denom_ *= twice_den;
  mpz_class rest = 0;
  for (const auto& [value, build] : next) {
    std::uint64_t members = build.tracked.size();
    for (const Piece& p : build.pieces) members += p.count;
    rest += value * mpz_class(static_cast<unsigned long>(members));
  }
  next[denom_ - rest].tracked.push_back(*top);

  history_.push_back(std::move(current_));
  current_.clear();
  values_.clear();
  for (auto& [value, build] : next) {
    Block b;
    b.pieces = std::move(build.pieces);
    b.tracked = std::move(build.tracked);
    current_.push_back(std::move(b));
    values_.push_back(value);
  }
  finish_layout(current_);
  promote_top();
  if (history_.size() % kNormalizeEvery == 0) normalize();
}

void MultiBitFast::normalize() {
  mpz_class g = denom_;
  for (const mpz_class& v : values_) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    if (g == 1) return;
  }
  denom_ /= g;
  for (mpz_class& v : values_) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
}

std::uint64_t MultiBitFast::top_index() const {
  const Block& last = current_.back();
  const std::uint32_t id = last.tracked.back().id;
  Origin origin = tracked_[id];
  std::uint64_t rank = origin.rank;
  // history_[t - 1] is the layout that was current before step t, so the
  // layout at time t is history_[t] for t < steps() and current_ otherwise.
  for (std::size_t t = origin.step; t > 0; --t) {
    const std::vector<Block>& layout = (t == history_.size()) ? current_ : history_[t];
    auto it = std::upper_bound(layout.begin(), layout.end(), rank,
                               [](std::uint64_t r, const Block& b) { return r < b.start; });
    const Block& block = *(it - 1);
    rank = prev_rank_at(block, rank - block.start);
  }
  return rank;
}

std::size_t MultiBitFast::group_count() const {
  return static_cast<std::size_t>(std::count_if(
      current_.begin(), current_.end(), [](const Block& b) { return !b.pieces.empty(); }));
}

std::vector<MultiBitFast::BlockSummary> MultiBitFast::blocks() const {
  std::vector<BlockSummary> out;
  for (std::size_t i = 0; i < current_.size(); ++i) {
    BlockSummary s;
    s.value = Rational(values_[i], denom_);
    s.value.canonicalize();
    s.tracked_members = current_[i].tracked.size();
    s.group_members = current_[i].size - s.tracked_members;
    out.push_back(std::move(s));
  }
  return out;
}

Rational MultiBitFast::total_mass() const {
  mpz_class total = 0;
  for (std::size_t i = 0; i < current_.size(); ++i) {
    total += values_[i] * mpz_class(static_cast<unsigned long>(current_[i].size));
  }
  Rational out(total, denom_);
  out.canonicalize();
  return out;
}

}  // namespace gsv
