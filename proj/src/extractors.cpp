#include "gsv/extractors.hpp"

#include <algorithm>
#include <numeric>

#include "gsv/error.hpp"

namespace gsv {

RationalVector psi_values(std::span<const Rational> psi, std::span<const FaceIndex> faces) {
  RationalVector out;
  out.reserve(faces.size());
  for (FaceIndex f : faces) {
    if (f >= psi.size()) {
      throw GsvError(ErrorCode::kDimension, "face " + std::to_string(f) + " outside psi of size " +
                                                std::to_string(psi.size()));
    }
    out.push_back(psi[f]);
  }
  return out;
}

Rational threshold_level(const Rational& epsilon) {
  if (epsilon <= 0) throw GsvError(ErrorCode::kInvalidArgument, "epsilon must be positive");
  return Rational(ceil_sqrt(Rational(1 / epsilon)));
}

ThresholdState threshold_init(const Rational& epsilon) {
  ThresholdState state;
  state.z = 0;
  state.m_threshold = threshold_level(epsilon);
  return state;
}

ThresholdState threshold_step(ThresholdState state, const Rational& psi_value) {
  if (state.frozen) return state;
  state.z += psi_value;
  state.frozen = abs(state.z) >= state.m_threshold;
  return state;
}

int threshold_extract_values(std::span<const Rational> values, const Rational& epsilon) {
  ThresholdState state = threshold_init(epsilon);
  for (const Rational& v : values) {
    if (state.frozen) break;
    state = threshold_step(std::move(state), v);
  }
  return sign_of(state.z);
}

int threshold_extract(std::span<const Rational> psi, const Rational& epsilon,
                      std::span<const FaceIndex> faces) {
  return threshold_extract_values(psi_values(psi, faces), epsilon);
}

BitExpState bit_exp_step(BitExpState state, const Rational& psi_value) {
  Rational room = 1 - abs(state.z);
  state.z += psi_value * room / 2;
  ++state.steps;
  return state;
}

int bit_extract_exp_values(std::span<const Rational> values) {
  BitExpState state;
  for (const Rational& v : values) state = bit_exp_step(std::move(state), v);
  return sign_of(state.z);
}

int bit_extract_exp(std::span<const Rational> psi, std::span<const FaceIndex> faces) {
  return bit_extract_exp_values(psi_values(psi, faces));
}

namespace {

void check_naive_bits(unsigned m) {
  if (m < 1 || m > kNaiveMaxBits) {
    throw GsvError(ErrorCode::kMLimit, "naive multibit extractor needs 1 <= m <= " +
                                           std::to_string(kNaiveMaxBits) + ", got " +
                                           std::to_string(m));
  }
}

}  // namespace

MultiBitState multibit_init(unsigned m) {
  check_naive_bits(m);
  MultiBitState state;
  state.m = m;
  const std::uint64_t size = std::uint64_t{1} << m;
  state.z.assign(size, Rational(1, size));
  state.order.resize(size);
  std::iota(state.order.begin(), state.order.end(), std::uint64_t{0});
  return state;
}

RationalVector multibit_direction(const MultiBitState& state) {
  const std::size_t size = state.z.size();
  RationalVector d(size);
  Rational rest = 0;
  for (std::size_t r = 0; r + 1 < size; ++r) {
    const std::uint64_t j = state.order[r];
    d[j] = (r % 2 == 0) ? Rational(-state.z[j]) : state.z[j];
    rest += d[j];
  }
  d[state.order.back()] = -rest;
  return d;
}

MultiBitState multibit_step_naive(MultiBitState state, const Rational& psi_value) {
  if (psi_value == 0) return state;
  const Rational half = psi_value / 2;
  RationalVector d = multibit_direction(state);
  for (std::size_t j = 0; j < state.z.size(); ++j) state.z[j] += half * d[j];
  std::stable_sort(state.order.begin(), state.order.end(),
                   [&](std::uint64_t a, std::uint64_t b) { return state.z[a] < state.z[b]; });
  return state;
}

std::string index_to_bits(std::uint64_t index, unsigned m) {
  std::string bits(m, '0');
  for (unsigned i = 0; i < m; ++i) {
    if ((index >> i) & 1u) bits[m - 1 - i] = '1';
  }
  return bits;
}

std::uint64_t multibit_index_naive(std::span<const Rational> values, unsigned m) {
  MultiBitState state = multibit_init(m);
  for (const Rational& v : values) state = multibit_step_naive(std::move(state), v);
  return state.top();
}

std::string multibit_extract_naive(std::span<const Rational> psi, std::span<const FaceIndex> faces,
                                   unsigned m) {
  return index_to_bits(multibit_index_naive(psi_values(psi, faces), m), m);
}

std::uint64_t multibit_index_fast(std::span<const Rational> values, unsigned m) {
  MultiBitFast fast(m);
  for (const Rational& v : values) fast.step(v);
  return fast.top_index();
}

std::string multibit_extract_fast(std::span<const Rational> psi, std::span<const FaceIndex> faces,
                                  unsigned m) {
  return index_to_bits(multibit_index_fast(psi_values(psi, faces), m), m);
}

}  // namespace gsv
