#include <doctest.h>

#include <random>

#include "gsv/classifier.hpp"
#include "gsv/error.hpp"
#include "gsv/linalg.hpp"
#include "gsv/presets.hpp"
#include "support.hpp"

using namespace gsv;
using testing::ref_mean;
using testing::ref_var;

namespace {

bool proportional(const RationalVector& a, const RationalVector& b) {
  REQUIRE(a.size() == b.size());
  std::optional<Rational> ratio;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] == 0) != (b[i] == 0)) return false;
    if (a[i] == 0) continue;
    Rational r = a[i] / b[i];
    if (ratio && *ratio != r) return false;
    ratio = r;
  }
  return ratio.has_value();
}

bool in_unit_box(const RationalVector& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& x) { return abs(x) <= 1; });
}

Rational max_abs(const RationalVector& v) {
  Rational m = 0;
  for (const auto& x : v) m = std::max(m, abs(x));
  return m;
}

// Restricted kernel is trivial iff the restricted pmf matrix has full column
// rank; computed here with a fresh matrix.
bool restricted_kernel_trivial(const SourceSpec& spec, const HnkCertificate& cert) {
  linalg::Matrix m;
  for (DieIndex d : cert.dice) {
    RationalVector row;
    for (FaceIndex f : cert.faces) row.push_back(spec.dice[d].probs[f]);
    m.push_back(row);
  }
  return linalg::rank(m, cert.faces.size()) == cert.faces.size();
}

// Draws specs until `want` holds, from both generators.
template <typename Pred>
std::vector<SourceSpec> collect(std::mt19937_64& rng, std::size_t count, Pred want) {
  std::vector<SourceSpec> out;
  for (std::size_t tries = 0; out.size() < count && tries < 400000; ++tries) {
    SourceSpec s = tries % 2 ? testing::nested_spec(rng, 5, 4) : testing::random_spec(rng, 5, 4);
    if (want(s)) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

TEST_SUITE("classifier") {

TEST_CASE("kernel basis examples") {
  auto e1 = kernel_basis(preset_e1());
  REQUIRE(e1.dimension() == 1);
  CHECK(proportional(e1.basis[0], RationalVector{-1, 1, 0, 0}));

  CHECK(kernel_basis(preset_sv(Rational(1, 4))).empty());

  auto coin = kernel_basis(preset_fair_coin());
  REQUIRE(coin.dimension() == 1);
  CHECK(proportional(coin.basis[0], RationalVector{1, -1}));
}

TEST_CASE("kernel basis vectors are exact zeros of every die") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    auto spec = testing::random_spec(rng, 6, 4);
    auto k = kernel_basis(spec);
    linalg::Matrix pmfs;
    for (const auto& d : spec.dice) pmfs.push_back(d.probs);
    CHECK(k.dimension() == spec.num_faces() - linalg::rank(pmfs, spec.num_faces()));
    for (const auto& v : k.basis) {
      for (const auto& d : spec.dice) CHECK(ref_mean(d, v) == 0);
    }
  }
}

TEST_CASE("NK examples") {
  auto e1 = check_nk(preset_e1());
  REQUIRE(e1.holds);
  CHECK(proportional(e1.witness->values, RationalVector{-1, 1, 0, 0}));
  CHECK_FALSE(check_nk(preset_sv(Rational(1, 4))).holds);
  auto coin = check_nk(preset_fair_coin());
  REQUIRE(coin.holds);
  CHECK(coin.witness->values == RationalVector{1, -1});
  CHECK(max_abs(e1.witness->values) == 1);
}

TEST_CASE("NK+ examples") {
  auto coin = check_nk_plus(preset_fair_coin());
  REQUIRE(coin.holds);
  CHECK(coin.witness->values == RationalVector{1, -1});
  CHECK(coin.witness->min_variance == Rational(1));
  CHECK(coin.witness->kind == WitnessKind::kNkPlus);
  CHECK_FALSE(check_nk_plus(preset_e2()).holds);
  CHECK_FALSE(check_nk_plus(preset_e1()).holds);
  CHECK_FALSE(check_nk_plus(preset_two_dice()).holds);
}

TEST_CASE("NK+ witnesses and dual certificates on random specs") {
  std::mt19937_64 rng(41);
  int plus = 0, minus = 0;
  for (int trial = 0; trial < 400; ++trial) {
    auto spec = trial % 2 ? testing::nested_spec(rng, 5, 4) : testing::random_spec(rng, 5, 4);
    auto r = check_nk_plus(spec);
    if (r.holds) {
      ++plus;
      const auto& psi = r.witness->values;
      CHECK(in_unit_box(psi));
      CHECK(max_abs(psi) == 1);
      Rational v = -1;
      for (const auto& d : spec.dice) {
        CHECK(ref_mean(d, psi) == 0);
        CHECK(ref_var(d, psi) > 0);
        if (v < 0 || ref_var(d, psi) < v) v = ref_var(d, psi);
      }
      CHECK(r.witness->min_variance == v);
      CHECK_FALSE(dual_certificate(spec).has_value());
    } else {
      ++minus;
      auto cert = dual_certificate(spec);
      REQUIRE(cert.has_value());
      // beta identity on every face indicator.
      for (FaceIndex g = 0; g < spec.num_faces(); ++g) {
        RationalVector e(spec.num_faces(), Rational(0));
        e[g] = 1;
        Rational rhs = 0;
        for (DieIndex d = 0; d < spec.num_dice(); ++d) rhs += cert->beta[d] * ref_mean(spec.dice[d], e);
        CHECK(e[cert->f_star] - e[cert->f_low] == rhs);
      }
      Rational mass = 0;
      for (const auto& b : cert->beta) mass += abs(b);
      CHECK(cert->constant >= mass * mass);
      // The chosen die sees only constant kernel vectors.
      auto supp = support(spec.dice[cert->die]);
      for (const auto& v : kernel_basis(spec).basis) {
        for (FaceIndex f : supp) CHECK(v[f] == v[supp[0]]);
      }
    }
  }
  CHECK(plus > 20);
  CHECK(minus > 20);
}

TEST_CASE("HNK examples and certificates") {
  auto e1 = check_hnk(preset_e1());
  CHECK_FALSE(e1.holds);
  REQUIRE(e1.failing.has_value());
  CHECK(e1.failing->dice == std::vector<DieIndex>{1, 2});
  CHECK(e1.failing->faces == std::vector<FaceIndex>{2, 3});
  CHECK(restricted_kernel_trivial(preset_e1(), *e1.failing));

  CHECK(check_hnk(preset_e2()).holds);
  CHECK(check_hnk(preset_fair_coin()).holds);
  auto sv = check_hnk(preset_sv(Rational(1, 4)));
  CHECK_FALSE(sv.holds);
  CHECK(sv.failing->dice == std::vector<DieIndex>{0, 1});

  auto two = check_hnk(preset_two_dice());
  CHECK_FALSE(two.holds);
  CHECK(two.failing->dice == std::vector<DieIndex>{0});
  CHECK(two.failing->faces == std::vector<FaceIndex>{2});
}

TEST_CASE("HNK enumeration guard") {
  std::vector<Die> dice(25, Die{{Rational(1, 2), Rational(1, 2)}});
  auto spec = SourceSpec::checked(dice);
  try {
    check_hnk(spec);
    FAIL("expected SUBSET_LIMIT");
  } catch (const GsvError& e) {
    CHECK(e.code() == ErrorCode::kSubsetLimit);
  }
  std::vector<Die> few(12, Die{{Rational(1, 2), Rational(1, 2)}});
  auto small = SourceSpec::checked(few);
  CHECK_THROWS_AS(check_hnk(small, 11), GsvError);
  CHECK(check_hnk(small, 12).holds);
}

TEST_CASE("failing HNK subsets have trivial restricted kernels; hierarchy holds") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 500; ++trial) {
    auto spec = trial % 2 ? testing::nested_spec(rng, 5, 4) : testing::random_spec(rng, 5, 4);
    auto nk = check_nk(spec).holds;
    auto plus = check_nk_plus(spec).holds;
    auto hnk = check_hnk(spec);
    if (plus) CHECK(hnk.holds);
    if (hnk.holds) CHECK(nk);
    if (!hnk.holds) {
      REQUIRE(hnk.failing.has_value());
      CHECK(restricted_kernel_trivial(spec, *hnk.failing));
    }
    auto report = classify(spec);
    CHECK((report.category == Category::kExpError) == plus);
    CHECK((report.category == Category::kPolyError) == (hnk.holds && !plus));
    CHECK((report.category == Category::kNonExtractable) == !hnk.holds);
  }
}

TEST_CASE("MVR and MVD checks") {
  auto coin = preset_fair_coin();
  for (auto eps : {Rational(1, 1000), Rational(1, 2), Rational(3)}) {
    CHECK(check_mvr(coin, RationalVector{1, -1}, eps));
  }
  RationalVector psi{Rational(1, 10), Rational(-1, 10), 1, -1};
  auto e2 = preset_e2();
  CHECK_FALSE(check_mvd(e2, psi, Rational(1, 10), Rational(1, 100)));
  CHECK(ref_var(e2.dice[0], psi) == Rational(1, 100));
  CHECK_FALSE(check_mvr(preset_sv(Rational(1, 4)), RationalVector{1, -1}, Rational(1, 10)));

  // d2 of E2 under (1/10, -1/10, 1, -1).
  CHECK(ref_mean(e2.dice[1], psi) == Rational(1, 60));
  Rational var = Rational(2, 3) + Rational(1, 300) - Rational(1, 3600);
  CHECK(ref_var(e2.dice[1], psi) == var);
  CHECK(Rational(1, 60) < var / 10);
  CHECK(check_mvr(e2, psi, Rational(1, 10)));
  CHECK_THROWS_AS(check_mvr(e2, RationalVector{1, -1}, Rational(1, 10)), GsvError);
}

TEST_CASE("MVR witness for E2 has the expected shape") {
  auto e2 = preset_e2();
  const Rational eps(1, 10);
  auto w = mvr_witness(e2, eps);
  CHECK(w.kind == WitnessKind::kMvr);
  CHECK(w.epsilon == eps);
  CHECK(proportional(w.values, RationalVector{eps / 12, -eps / 12, 1, -1}));
  CHECK(check_mvr(e2, w.values, eps));
  for (const auto& d : e2.dice) {
    CHECK(abs(ref_mean(d, w.values)) < eps * ref_var(d, w.values));
    CHECK(ref_var(d, w.values) >= pow(eps, mvr_variance_exponent(3)));
  }
  CHECK(mvr_variance_exponent(3) == 21);
}

TEST_CASE("MVR witness errors") {
  try {
    mvr_witness(preset_e1(), Rational(1, 10));
    FAIL("expected NOT_HNK");
  } catch (const GsvError& e) {
    CHECK(e.code() == ErrorCode::kNotHnk);
  }
  try {
    mvr_witness(preset_e2(), Rational(4));
    FAIL("expected EPSILON_TOO_LARGE");
  } catch (const GsvError& e) {
    CHECK(e.code() == ErrorCode::kEpsilonTooLarge);
  }
  auto coin = mvr_witness(preset_fair_coin(), Rational(1, 1000));
  CHECK(coin.values == RationalVector{1, -1});
}

TEST_CASE("MVR witnesses on random hereditary specs") {
  std::mt19937_64 rng(61);
  auto specs = collect(rng, 40, [](const SourceSpec& s) {
    return !check_nk_plus(s).holds && check_hnk(s).holds;
  });
  REQUIRE(specs.size() == 40);
  for (const auto& spec : specs) {
    Rational eps(1, 8);
    std::optional<Witness> w;
    for (int k = 0; k < 12 && !w; ++k, eps /= 4) {
      try {
        w = mvr_witness(spec, eps);
      } catch (const GsvError& e) {
        REQUIRE(e.code() == ErrorCode::kEpsilonTooLarge);
      }
    }
    REQUIRE(w.has_value());
    CHECK(in_unit_box(w->values));
    const Rational floor = pow(*w->epsilon, mvr_variance_exponent(spec.num_dice()));
    for (const auto& d : spec.dice) {
      CHECK(abs(ref_mean(d, w->values)) < *w->epsilon * ref_var(d, w->values));
      CHECK(ref_var(d, w->values) >= floor);
    }
  }
}

TEST_CASE("variance floor comparison") {
  CHECK(at_least_power(Rational(1, 8), Rational(1, 2), 3));
  CHECK_FALSE(at_least_power(Rational(1, 9), Rational(1, 2), 3));
  CHECK(at_least_power(Rational(1, 1000), Rational(1, 2), 1000000));
  CHECK_FALSE(at_least_power(Rational(0), Rational(1, 2), 3));
  CHECK(at_least_power(Rational(1), Rational(1, 2), 0));
}

TEST_CASE("dual certificate examples") {
  auto sv = dual_certificate(preset_sv(Rational(1, 4)));
  REQUIRE(sv.has_value());
  CHECK(sv->die == 0);
  CHECK(sv->f_star == 0);
  CHECK(sv->f_low == 1);
  CHECK(sv->beta == RationalVector{2, -2});
  CHECK(sv->constant == 16);
  // 3/4 b1 + 1/4 b2 = 1 and 1/4 b1 + 3/4 b2 = -1.
  CHECK(Rational(3, 4) * 2 + Rational(1, 4) * -2 == 1);

  CHECK_FALSE(dual_certificate(preset_fair_coin()).has_value());
  auto same = dual_beta(preset_sv(Rational(1, 4)), 1, 1);
  REQUIRE(same.has_value());
  CHECK(*same == RationalVector{0, 0});

  auto two = dual_certificate(preset_two_dice());
  REQUIRE(two.has_value());
  CHECK(two->die == 0);
  CHECK(two->constant == 0);
}

TEST_CASE("MVD fails at C eps^2 for sources without NK+") {
  std::mt19937_64 rng(71);
  auto specs = collect(rng, 10, [](const SourceSpec& s) { return !check_nk_plus(s).holds; });
  specs.push_back(preset_sv(Rational(1, 4)));
  specs.push_back(preset_e2());
  for (const auto& spec : specs) {
    auto cert = dual_certificate(spec);
    REQUIRE(cert.has_value());
    for (int trial = 0; trial < 60; ++trial) {
      RationalVector psi(spec.num_faces());
      for (auto& x : psi) x = make_rational(static_cast<long>(rng() % 9) - 4, 4);
      for (int k = 1; k <= 8; ++k) {
        Rational eps = pow2(-k);
        CHECK_FALSE(check_mvd(spec, psi, eps, cert->constant * eps * eps));
      }
    }
  }
}

TEST_CASE("classification of the presets") {
  CHECK(classify(preset_e1()).category == Category::kNonExtractable);
  CHECK(classify(preset_e2()).category == Category::kPolyError);
  CHECK(classify(preset_fair_coin()).category == Category::kExpError);
  CHECK(classify(preset_sv(Rational(1, 4))).category == Category::kNonExtractable);
  CHECK(classify(preset_two_dice()).category == Category::kNonExtractable);
  CHECK(to_string(Category::kPolyError) == "POLY_ERROR");
}

}  // TEST_SUITE
