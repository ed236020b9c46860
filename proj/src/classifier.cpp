#include "gsv/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gsv/error.hpp"
#include "gsv/linalg.hpp"

namespace gsv {

namespace {

bool constant_on(const RationalVector& values, const std::vector<FaceIndex>& faces) {
  for (std::size_t i = 1; i < faces.size(); ++i) {
    if (values[faces[i]] != values[faces[0]]) return false;
  }
  return true;
}

std::vector<FaceIndex> union_of_supports(const SourceSpec& spec, const std::vector<DieIndex>& dice) {
  std::vector<bool> hit(spec.num_faces(), false);
  for (DieIndex d : dice) {
    for (FaceIndex f : support(spec.dice[d])) hit[f] = true;
  }
  std::vector<FaceIndex> out;
  for (FaceIndex f = 0; f < hit.size(); ++f) {
    if (hit[f]) out.push_back(f);
  }
  return out;
}

linalg::Matrix restricted_matrix(const SourceSpec& spec, const std::vector<DieIndex>& dice,
                                 const std::vector<FaceIndex>& faces) {
  linalg::Matrix m;
  m.reserve(dice.size());
  for (DieIndex d : dice) {
    RationalVector row;
    row.reserve(faces.size());
    for (FaceIndex f : faces) row.push_back(spec.dice[d].probs[f]);
    m.push_back(std::move(row));
  }
  return m;
}

// Kernel of the sub-source, embedded into full face vectors (zero outside
// the restricted faces).
std::vector<RationalVector> restricted_kernel(const SourceSpec& spec,
                                              const std::vector<DieIndex>& dice,
                                              const std::vector<FaceIndex>& faces) {
  auto local = linalg::nullspace(restricted_matrix(spec, dice, faces), faces.size());
  std::vector<RationalVector> out;
  out.reserve(local.size());
  for (auto& v : local) {
    RationalVector full(spec.num_faces(), Rational(0));
    for (std::size_t i = 0; i < faces.size(); ++i) full[faces[i]] = v[i];
    out.push_back(std::move(full));
  }
  return out;
}

// max |psi| = 1 and the first nonzero entry positive.
RationalVector canonical(RationalVector values) {
  values = normalize_max_abs(std::move(values));
  auto first = std::find_if(values.begin(), values.end(), [](const Rational& v) { return v != 0; });
  if (first != values.end() && *first < 0) {
    for (auto& v : values) v = -v;
  }
  return values;
}

RationalVector axpy(const RationalVector& y, const Rational& a, const RationalVector& x) {
  RationalVector out = y;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (x[i] != 0) out[i] += a * x[i];
  }
  return out;
}

// Combines kernel vectors so that the result is non-constant on the support
// of every die in `dice` for which some basis vector is. For each such die
// only one value of its coefficient (others fixed) can make the sum constant
// there, so coefficients drawn from 1..|dice|+1 always leave a valid tuple.
RationalVector combine_generic(const SourceSpec& spec, const std::vector<RationalVector>& basis,
                               const std::vector<DieIndex>& dice) {
  std::vector<std::size_t> chosen;
  std::vector<std::vector<FaceIndex>> target_supports;
  for (DieIndex d : dice) {
    auto supp = support(spec.dice[d]);
    for (std::size_t b = 0; b < basis.size(); ++b) {
      if (!constant_on(basis[b], supp)) {
        if (std::find(chosen.begin(), chosen.end(), b) == chosen.end()) chosen.push_back(b);
        target_supports.push_back(std::move(supp));
        break;
      }
    }
  }
  if (chosen.empty()) return basis.front();

  const unsigned long limit = dice.size() + 1;
  std::vector<unsigned long> coeff(chosen.size(), 1);
  while (true) {
    RationalVector psi(spec.num_faces(), Rational(0));
    for (std::size_t i = 0; i < chosen.size(); ++i) psi = axpy(psi, Rational(coeff[i]), basis[chosen[i]]);
    bool good = std::none_of(target_supports.begin(), target_supports.end(),
                             [&](const auto& supp) { return constant_on(psi, supp); });
    if (good) return psi;

    std::size_t pos = chosen.size();
    while (pos > 0) {
      --pos;
      if (coeff[pos] < limit) {
        ++coeff[pos];
        break;
      }
      coeff[pos] = 1;
      if (pos == 0) throw std::logic_error("no valid kernel combination; union bound violated");
    }
  }
}

Rational min_variance(const SourceSpec& spec, std::span<const Rational> psi) {
  Rational best = die_var(spec.dice.front(), psi);
  for (const Die& die : spec.dice) best = std::min(best, die_var(die, psi));
  return best;
}

std::vector<DieIndex> all_dice(const SourceSpec& spec) {
  std::vector<DieIndex> out(spec.num_dice());
  for (DieIndex d = 0; d < out.size(); ++d) out[d] = d;
  return out;
}

double log2_of(const Rational& value) {
  long num_exp = 0, den_exp = 0;
  double num = mpz_get_d_2exp(&num_exp, value.get_num_mpz_t());
  double den = mpz_get_d_2exp(&den_exp, value.get_den_mpz_t());
  return std::log2(num / den) + static_cast<double>(num_exp - den_exp);
}

// Recursion on the dice that a kernel witness of the current sub-source
// leaves with zero variance.
RationalVector build_mvr(const SourceSpec& spec, const std::vector<DieIndex>& dice,
                         const Rational& epsilon) {
  const auto faces = union_of_supports(spec, dice);
  const auto basis = restricted_kernel(spec, dice, faces);
  if (basis.empty()) throw GsvError(ErrorCode::kNotHnk, "sub-source has a trivial kernel");

  RationalVector psi = canonical(combine_generic(spec, basis, dice));

  std::vector<DieIndex> flat;
  Rational v = -1;
  for (DieIndex d : dice) {
    Rational var = die_var(spec.dice[d], psi);
    if (var == 0) {
      flat.push_back(d);
    } else if (v < 0 || var < v) {
      v = var;
    }
  }
  if (flat.empty()) return psi;
  if (flat.size() == dice.size()) {
    throw std::logic_error("kernel witness vanishes on every die of the sub-source");
  }

  RationalVector inner = build_mvr(spec, flat, Rational(v * epsilon * epsilon / 8));
  return axpy(psi, Rational(v * epsilon / 8), inner);
}

}  // namespace

KernelBasis kernel_basis(const SourceSpec& spec) {
  linalg::Matrix m;
  for (const Die& die : spec.dice) m.push_back(die.probs);
  return KernelBasis{linalg::nullspace(m, spec.num_faces())};
}

ConditionResult check_nk(const SourceSpec& spec) {
  auto kernel = kernel_basis(spec);
  if (kernel.empty()) return {};
  Witness w;
  w.values = canonical(kernel.basis.front());
  w.kind = WitnessKind::kNk;
  return {true, std::move(w)};
}

ConditionResult check_nk_plus(const SourceSpec& spec) {
  auto kernel = kernel_basis(spec);
  if (kernel.empty()) return {};
  for (const Die& die : spec.dice) {
    auto supp = support(die);
    bool seen = std::any_of(kernel.basis.begin(), kernel.basis.end(),
                            [&](const RationalVector& b) { return !constant_on(b, supp); });
    if (!seen) return {};
  }
  Witness w;
  w.values = canonical(combine_generic(spec, kernel.basis, all_dice(spec)));
  w.kind = WitnessKind::kNkPlus;
  w.min_variance = min_variance(spec, w.values);
  return {true, std::move(w)};
}

std::size_t restricted_rank(const SourceSpec& spec, const std::vector<DieIndex>& dice,
                            const std::vector<FaceIndex>& faces) {
  return linalg::rank(restricted_matrix(spec, dice, faces), faces.size());
}

HnkResult check_hnk(const SourceSpec& spec, std::size_t max_dice) {
  const std::size_t n = spec.num_dice();
  if (n > max_dice) {
    throw GsvError(ErrorCode::kSubsetLimit, std::to_string(n) + " dice exceeds the subset guard of " +
                                                std::to_string(max_dice));
  }
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<DieIndex> subset(k);
    for (std::size_t i = 0; i < k; ++i) subset[i] = i;
    while (true) {
      auto faces = union_of_supports(spec, subset);
      if (restricted_rank(spec, subset, faces) == faces.size()) {
        return {false, HnkCertificate{subset, faces}};
      }
      // Next k-combination in lexicographic order.
      std::size_t i = k;
      while (i > 0 && subset[i - 1] == n - k + (i - 1)) --i;
      if (i == 0) break;
      ++subset[i - 1];
      for (std::size_t j = i; j < k; ++j) subset[j] = subset[j - 1] + 1;
    }
  }
  return {true, std::nullopt};
}

bool check_mvr(const SourceSpec& spec, std::span<const Rational> psi, const Rational& epsilon) {
  return std::all_of(spec.dice.begin(), spec.dice.end(), [&](const Die& die) {
    return abs(die_mean(die, psi)) < epsilon * die_var(die, psi);
  });
}

bool check_mvd(const SourceSpec& spec, std::span<const Rational> psi, const Rational& epsilon,
               const Rational& delta) {
  return std::all_of(spec.dice.begin(), spec.dice.end(), [&](const Die& die) {
    return abs(die_mean(die, psi)) < epsilon * (die_var(die, psi) - delta);
  });
}

unsigned long mvr_variance_exponent(std::size_t num_dice) {
  if (num_dice >= 61) throw GsvError(ErrorCode::kInvalidArgument, "too many dice for the exponent");
  return 3ul * (1ul << num_dice) - 3ul;
}

bool at_least_power(const Rational& value, const Rational& epsilon, unsigned long exponent) {
  if (epsilon <= 0) throw GsvError(ErrorCode::kInvalidArgument, "epsilon must be positive");
  if (value <= 0) return false;
  if (exponent == 0) return value >= 1;
  const double lhs = log2_of(value);
  const double rhs = static_cast<double>(exponent) * log2_of(epsilon);
  if (lhs - rhs > 1.0) return true;
  if (rhs - lhs > 1.0) return false;
  return value >= pow(epsilon, exponent);
}

Witness mvr_witness(const SourceSpec& spec, const Rational& epsilon) {
  if (epsilon <= 0) throw GsvError(ErrorCode::kInvalidArgument, "epsilon must be positive");
  auto hnk = check_hnk(spec);
  if (!hnk.holds) throw GsvError(ErrorCode::kNotHnk, "source fails HNK");

  RationalVector phi = build_mvr(spec, all_dice(spec), epsilon);
  Rational floor_var = min_variance(spec, phi);
  const unsigned long exponent = mvr_variance_exponent(spec.num_dice());
  if (!check_mvr(spec, phi, epsilon)) {
    throw GsvError(ErrorCode::kEpsilonTooLarge,
                   "constructed witness violates |E| < eps*Var at eps=" + to_string(epsilon));
  }
  if (!at_least_power(floor_var, epsilon, exponent)) {
    throw GsvError(ErrorCode::kEpsilonTooLarge,
                   "constructed witness has variance below eps^" + std::to_string(exponent));
  }
  Witness w;
  w.values = std::move(phi);
  w.kind = WitnessKind::kMvr;
  w.epsilon = epsilon;
  w.min_variance = std::move(floor_var);
  return w;
}

std::optional<RationalVector> dual_beta(const SourceSpec& spec, FaceIndex f_star, FaceIndex f_low) {
  const std::size_t faces = spec.num_faces();
  if (f_star >= faces || f_low >= faces) throw GsvError(ErrorCode::kDimension, "face out of range");
  if (f_star == f_low) return RationalVector(spec.num_dice(), Rational(0));
  linalg::Matrix pmfs;
  for (const Die& die : spec.dice) pmfs.push_back(die.probs);
  RationalVector target(faces, Rational(0));
  target[f_star] = 1;
  target[f_low] = -1;
  return linalg::solve(linalg::transpose(pmfs, faces), spec.num_dice(), target);
}

std::optional<DualCertificate> dual_certificate(const SourceSpec& spec) {
  if (check_nk_plus(spec).holds) return std::nullopt;
  const auto kernel = kernel_basis(spec);

  for (DieIndex d = 0; d < spec.num_dice(); ++d) {
    const auto supp = support(spec.dice[d]);
    bool inside = std::all_of(kernel.basis.begin(), kernel.basis.end(),
                              [&](const RationalVector& b) { return constant_on(b, supp); });
    if (!inside) continue;

    DualCertificate cert;
    cert.die = d;
    cert.f_star = cert.f_low = supp.front();
    cert.beta = RationalVector(spec.num_dice(), Rational(0));
    cert.constant = 0;
    for (std::size_t i = 0; i < supp.size(); ++i) {
      for (std::size_t j = i + 1; j < supp.size(); ++j) {
        auto beta = dual_beta(spec, supp[i], supp[j]);
        if (!beta) throw std::logic_error("indicator difference outside the pmf span");
        Rational mass = 0;
        for (const auto& b : *beta) mass += abs(b);
        Rational c = mass * mass;
        if (c > cert.constant) {
          cert.constant = c;
          cert.f_star = supp[i];
          cert.f_low = supp[j];
          cert.beta = std::move(*beta);
        }
      }
    }
    return cert;
  }
  throw std::logic_error("NK+ fails but no die has its kernel restricted to constants");
}

std::string_view to_string(Category category) {
  switch (category) {
    case Category::kNonExtractable: return "NON_EXTRACTABLE";
    case Category::kPolyError: return "POLY_ERROR";
    case Category::kExpError: return "EXP_ERROR";
  }
  return "UNKNOWN";
}

ClassificationReport classify(const SourceSpec& spec, std::size_t max_dice) {
  ClassificationReport report;
  report.nk = check_nk(spec);
  report.nk_plus = check_nk_plus(spec);
  if (report.nk_plus.holds) {
    // NK+ implies HNK; no enumeration needed.
    report.hnk.holds = true;
    report.category = Category::kExpError;
    return report;
  }
  report.dual = dual_certificate(spec);
  report.hnk = check_hnk(spec, max_dice);
  report.category = report.hnk.holds ? Category::kPolyError : Category::kNonExtractable;
  return report;
}

}  // namespace gsv
