#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gsv/model.hpp"

namespace gsv {

// psi(face_i) for each face of the sequence.
RationalVector psi_values(std::span<const Rational> psi, std::span<const FaceIndex> faces);

// sign(0) = +1.
inline int sign_of(const Rational& z) { return z < 0 ? -1 : 1; }

// ---- threshold extractor ----

struct ThresholdState {
  Rational z;
  Rational m_threshold;
  bool frozen = false;
};

// M = smallest integer k with k^2 >= 1/epsilon.
Rational threshold_level(const Rational& epsilon);
ThresholdState threshold_init(const Rational& epsilon);
// Adds psi_value unless |z| already reached M.
ThresholdState threshold_step(ThresholdState state, const Rational& psi_value);
int threshold_extract_values(std::span<const Rational> values, const Rational& epsilon);
int threshold_extract(std::span<const Rational> psi, const Rational& epsilon,
                      std::span<const FaceIndex> faces);

// ---- exponential-error bit extractor ----

struct BitExpState {
  Rational z;
  std::size_t steps = 0;
};

// z + (psi_value / 2) * (1 - |z|).
BitExpState bit_exp_step(BitExpState state, const Rational& psi_value);
int bit_extract_exp_values(std::span<const Rational> values);
int bit_extract_exp(std::span<const Rational> psi, std::span<const FaceIndex> faces);

// ---- multi-bit extractor ----

inline constexpr unsigned kNaiveMaxBits = 20;
inline constexpr unsigned kFastMaxBits = 62;

// Coordinates of z are the 2^m candidate outputs. `order` lists coordinates
// by ascending value; equal values keep their relative order from the
// previous step, and the initial order is by index.
struct MultiBitState {
  unsigned m = 0;
  RationalVector z;
  std::vector<std::uint64_t> order;

  std::uint64_t top() const { return order.back(); }
};

MultiBitState multibit_init(unsigned m);
// Step direction indexed by coordinate: for rank r (0-based) below the top,
// -z for even r and +z for odd r; the top takes minus the sum of the rest.
RationalVector multibit_direction(const MultiBitState& state);
MultiBitState multibit_step_naive(MultiBitState state, const Rational& psi_value);

// m-bit big-endian rendering of an output index.
std::string index_to_bits(std::uint64_t index, unsigned m);

// Index of the largest coordinate after folding all steps (ties go to the
// coordinate ranked highest by the order rule). Throws GsvError(kMLimit)
// for m outside 1..kNaiveMaxBits.
std::uint64_t multibit_index_naive(std::span<const Rational> values, unsigned m);
std::string multibit_extract_naive(std::span<const Rational> psi, std::span<const FaceIndex> faces,
                                   unsigned m);

// List-based implementation of the same extractor. Martingales that have
// never been on top are kept as counted groups sharing a value; ones that
// have been on top are kept individually. Each step records, for every
// group, which ranks of the previous step it came from, so the final top
// can be traced back to its starting index.
class MultiBitFast {
 public:
  explicit MultiBitFast(unsigned m);

  void step(const Rational& psi_value);
  std::uint64_t top_index() const;

  unsigned m() const { return m_; }
  std::size_t steps() const { return history_.size(); }
  // Number of distinct-value groups in L and number of individually
  // tracked martingales (LL).
  std::size_t group_count() const;
  std::size_t tracked_count() const { return tracked_.size(); }
  // Values by rank block, ascending: (value, L count, LL count).
  struct BlockSummary {
    Rational value;
    std::uint64_t group_members = 0;
    std::uint64_t tracked_members = 0;
  };
  std::vector<BlockSummary> blocks() const;
  Rational total_mass() const;

 private:
  // Ranks start, start + 2, ..., start + 2 (count - 1) of the previous step.
  struct Piece {
    std::uint64_t start = 0;
    std::uint64_t count = 0;
  };
  struct Member {
    std::uint64_t prev_rank = 0;
    std::uint32_t id = 0;
  };
  // All martingales of one value, contiguous in rank and ordered by their
  // previous rank.
  struct Block {
    std::uint64_t start = 0;
    std::uint64_t size = 0;
    std::vector<Piece> pieces;
    std::vector<Member> tracked;
    std::vector<std::uint64_t> tracked_offsets;  // positions inside the block
  };
  struct Origin {
    std::size_t step = 0;  // time of promotion
    std::uint64_t rank = 0;
  };

  static std::uint64_t count_below(const std::vector<Piece>& pieces, std::uint64_t rank);
  static std::uint64_t prev_rank_at(const Block& block, std::uint64_t offset);
  void finish_layout(std::vector<Block>& layout);
  void promote_top();

  // Block values are numerators over the shared denominator denom_, so a
  // step multiplies by small integers and compares without any gcd.
  static constexpr std::size_t kNormalizeEvery = 64;
  void normalize();

  unsigned m_;
  std::uint64_t size_;
  mpz_class denom_;
  std::vector<mpz_class> values_;  // per block of the current layout
  std::vector<Block> current_;
  std::vector<std::vector<Block>> history_;
  std::vector<Origin> tracked_;
};

std::uint64_t multibit_index_fast(std::span<const Rational> values, unsigned m);
std::string multibit_extract_fast(std::span<const Rational> psi, std::span<const FaceIndex> faces,
                                  unsigned m);

}  // namespace gsv
