#pragma once

#include <algorithm>
#include <random>
#include <span>

#include "gsv/model.hpp"

namespace gsv::testing {

// Reference moments, computed as sum p (psi - mean)^2 rather than through
// the library's second-moment formula.
inline Rational ref_mean(const Die& d, std::span<const Rational> psi) {
  Rational acc = 0;
  for (std::size_t f = 0; f < psi.size(); ++f) acc += d.probs[f] * psi[f];
  return acc;
}

inline Rational ref_var(const Die& d, std::span<const Rational> psi) {
  const Rational mean = ref_mean(d, psi);
  Rational acc = 0;
  for (std::size_t f = 0; f < psi.size(); ++f) {
    Rational dev = psi[f] - mean;
    acc += d.probs[f] * dev * dev;
  }
  return acc;
}

// Random valid spec: each die puts small integer weights on a random
// nonempty support; uncovered faces are patched into a random die.
inline SourceSpec random_spec(std::mt19937_64& rng, std::size_t max_faces, std::size_t max_dice,
                              std::size_t min_faces = 2, std::size_t min_dice = 1) {
  std::uniform_int_distribution<std::size_t> nf(min_faces, max_faces), nd(min_dice, max_dice);
  const std::size_t faces = nf(rng), dice = nd(rng);
  std::vector<std::vector<unsigned>> weights(dice, std::vector<unsigned>(faces, 0));
  std::uniform_int_distribution<unsigned> w(1, 6), coin(0, 2);
  for (auto& row : weights) {
    for (auto& x : row) x = coin(rng) == 0 ? 0 : w(rng);
    if (std::all_of(row.begin(), row.end(), [](unsigned x) { return x == 0; })) {
      row[rng() % faces] = w(rng);
    }
  }
  for (std::size_t f = 0; f < faces; ++f) {
    bool covered = false;
    for (auto& row : weights) covered = covered || row[f] > 0;
    if (!covered) weights[rng() % dice][f] = w(rng);
  }
  std::vector<Die> out;
  for (auto& row : weights) {
    unsigned total = 0;
    for (unsigned x : row) total += x;
    Die d;
    for (unsigned x : row) d.probs.push_back(make_rational(x, total));
    out.push_back(std::move(d));
  }
  return SourceSpec::checked(std::move(out));
}

// Supports drawn from a random chain of nested face sets, the shape of
// sources that are hereditarily kernel-rich without NK+.
inline SourceSpec nested_spec(std::mt19937_64& rng, std::size_t max_faces, std::size_t max_dice) {
  std::uniform_int_distribution<std::size_t> nf(3, max_faces), nd(2, max_dice);
  const std::size_t faces = nf(rng), dice = nd(rng);
  std::vector<std::size_t> perm(faces);
  for (std::size_t i = 0; i < faces; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::uniform_int_distribution<unsigned> w(1, 6);
  std::vector<Die> out;
  for (std::size_t d = 0; d < dice; ++d) {
    // Prefix of the permutation of length >= 2; the last die covers all faces.
    std::size_t len = d + 1 == dice ? faces : 2 + rng() % (faces - 1);
    std::vector<unsigned> row(faces, 0);
    unsigned total = 0;
    for (std::size_t i = 0; i < len; ++i) total += row[perm[i]] = w(rng);
    Die die;
    for (unsigned x : row) die.probs.push_back(make_rational(x, total));
    out.push_back(std::move(die));
  }
  return SourceSpec::checked(std::move(out));
}

}  // namespace gsv::testing
