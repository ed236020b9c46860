#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "gsv/model.hpp"

namespace gsv {

// Basis of Ker D: face functions with zero mean under every die.
struct KernelBasis {
  std::vector<RationalVector> basis;

  std::size_t dimension() const { return basis.size(); }
  bool empty() const { return basis.empty(); }
};

KernelBasis kernel_basis(const SourceSpec& spec);

struct ConditionResult {
  bool holds = false;
  std::optional<Witness> witness;
};

ConditionResult check_nk(const SourceSpec& spec);

// NK+ holds iff every die sees some kernel vector that is not constant on its
// support. The returned witness combines those vectors with the first integer
// coefficient tuple (coefficients in 1..|D|+1, lexicographic order) that has
// positive variance under every die, rescaled to max |psi| = 1.
ConditionResult check_nk_plus(const SourceSpec& spec);

// A sub-source whose restricted kernel is {0}.
struct HnkCertificate {
  std::vector<DieIndex> dice;
  std::vector<FaceIndex> faces;  // union of the dice supports
};

struct HnkResult {
  bool holds = false;
  std::optional<HnkCertificate> failing;
};

inline constexpr std::size_t kDefaultSubsetGuard = 24;

// Enumerates nonempty dice subsets by size, then lexicographically, and
// returns the first one whose restricted kernel is trivial. Throws
// GsvError(kSubsetLimit) when |D| exceeds max_dice.
HnkResult check_hnk(const SourceSpec& spec, std::size_t max_dice = kDefaultSubsetGuard);

// Rank of the pmf matrix restricted to the given dice and faces.
std::size_t restricted_rank(const SourceSpec& spec, const std::vector<DieIndex>& dice,
                            const std::vector<FaceIndex>& faces);

// True iff |E_d[psi]| < epsilon * Var_d[psi] for every die.
bool check_mvr(const SourceSpec& spec, std::span<const Rational> psi, const Rational& epsilon);
// True iff |E_d[psi]| < epsilon * (Var_d[psi] - delta) for every die.
bool check_mvd(const SourceSpec& spec, std::span<const Rational> psi, const Rational& epsilon,
               const Rational& delta);

// Exponent C = 3 * 2^|D| - 3 of the variance floor epsilon^C.
unsigned long mvr_variance_exponent(std::size_t num_dice);

// True iff value >= epsilon^exponent, exact (0 < epsilon).
bool at_least_power(const Rational& value, const Rational& epsilon, unsigned long exponent);

// Builds an MVR(epsilon) witness for an HNK source by recursing on the dice
// whose variance vanishes under a kernel witness. The result is checked
// against |E_d| < epsilon * Var_d and min Var_d >= epsilon^C before it is
// returned. Throws GsvError(kNotHnk) or GsvError(kEpsilonTooLarge).
Witness mvr_witness(const SourceSpec& spec, const Rational& epsilon);

struct DualCertificate {
  DieIndex die = 0;
  FaceIndex f_star = 0;
  FaceIndex f_low = 0;
  RationalVector beta;  // indexed by die
  // max over face pairs in supp(die) of (sum |beta|)^2
  Rational constant;
};

// Coefficients beta with e_{f_star} - e_{f_low} = sum_d beta(d) pmf_d, i.e.
// psi(f_star) - psi(f_low) = sum_d beta(d) E_d[psi] for every psi. Returns
// nullopt when the indicator difference is outside the span of the pmfs.
std::optional<RationalVector> dual_beta(const SourceSpec& spec, FaceIndex f_star, FaceIndex f_low);

// nullopt when NK+ holds. Otherwise picks the first die whose support sees
// only constant kernel vectors and the face pair maximizing sum |beta|.
std::optional<DualCertificate> dual_certificate(const SourceSpec& spec);

enum class Category { kNonExtractable, kPolyError, kExpError };

std::string_view to_string(Category category);

struct ClassificationReport {
  ConditionResult nk;
  ConditionResult nk_plus;
  HnkResult hnk;
  std::optional<DualCertificate> dual;
  Category category = Category::kNonExtractable;
};

ClassificationReport classify(const SourceSpec& spec, std::size_t max_dice = kDefaultSubsetGuard);

}  // namespace gsv
