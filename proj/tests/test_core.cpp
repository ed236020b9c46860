#include <doctest.h>

#include <cmath>
#include <random>

#include "gsv/error.hpp"
#include "gsv/linalg.hpp"
#include "gsv/model.hpp"
#include "gsv/presets.hpp"
#include "support.hpp"

using namespace gsv;

namespace {

// Plain Gauss-Jordan over mpq: the reference for the fraction-free code.
struct Rref {
  linalg::Matrix rows;
  std::vector<std::size_t> pivots;
};

Rref reference_rref(linalg::Matrix a, std::size_t cols) {
  Rref out;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < a.size(); ++c) {
    std::size_t p = r;
    while (p < a.size() && a[p][c] == 0) ++p;
    if (p == a.size()) continue;
    std::swap(a[p], a[r]);
    Rational lead = a[r][c];
    for (auto& x : a[r]) x /= lead;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i == r || a[i][c] == 0) continue;
      Rational f = a[i][c];
      for (std::size_t j = 0; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    out.pivots.push_back(c);
    ++r;
  }
  a.resize(r);
  out.rows = std::move(a);
  return out;
}

linalg::Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::uniform_int_distribution<long> num(-4, 4), den(1, 5), zero(0, 3);
  linalg::Matrix m(rows, RationalVector(cols));
  for (auto& row : m) {
    for (auto& x : row) x = zero(rng) == 0 ? Rational(0) : make_rational(num(rng), den(rng));
  }
  return m;
}

RationalVector multiply(const linalg::Matrix& a, const RationalVector& x) {
  RationalVector out;
  for (const auto& row : a) {
    Rational acc = 0;
    for (std::size_t j = 0; j < x.size(); ++j) acc += row[j] * x[j];
    out.push_back(acc);
  }
  return out;
}

Die die_of(std::initializer_list<Rational> probs) { return Die{RationalVector(probs)}; }

}  // namespace

TEST_SUITE("core") {

TEST_CASE("rational parsing accepts fractions and exact decimals") {
  CHECK(parse_rational("1/2") == Rational(1, 2));
  CHECK(parse_rational("-3/6") == Rational(-1, 2));
  CHECK(parse_rational("7") == Rational(7));
  CHECK(parse_rational("0.125") == Rational(1, 8));
  CHECK(parse_rational("-2.5e-1") == Rational(-1, 4));
  CHECK(parse_rational("1e3") == Rational(1000));
  CHECK(parse_rational(" 2/4 ") == Rational(1, 2));
  CHECK(to_string(parse_rational("6/4")) == "3/2");
  CHECK(to_string(Rational(5)) == "5");
  for (const char* bad : {"", "1/0", "abc", "1/2/3", "0x10", "1.2.3", "e5", "--1"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_rational(bad), GsvError);
  }
  CHECK(make_rational(6, -4) == Rational(-3, 2));
}

TEST_CASE("ceil_sqrt is the least k with k^2 >= x") {
  CHECK(ceil_sqrt(Rational(4)) == 2);
  CHECK(ceil_sqrt(Rational(5)) == 3);
  CHECK(ceil_sqrt(Rational(25)) == 5);
  CHECK(ceil_sqrt(Rational(1, 4)) == 1);
  CHECK(ceil_sqrt(Rational(0)) == 0);
  for (long num = 1; num < 400; num += 7) {
    for (long den = 1; den < 9; ++den) {
      Rational x = make_rational(num, den);
      mpz_class k = ceil_sqrt(x);
      CHECK(Rational(k * k) >= x);
      CHECK((k == 0 || Rational((k - 1) * (k - 1)) < x));
    }
  }
  CHECK(pow2(-3) == Rational(1, 8));
  CHECK(pow(Rational(2, 3), 3) == Rational(8, 27));
}

TEST_CASE("fraction-free elimination agrees with Gauss-Jordan") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t rows = 1 + rng() % 5, cols = 1 + rng() % 6;
    auto a = random_matrix(rng, rows, cols);
    auto ref = reference_rref(a, cols);
    auto ech = linalg::bareiss_echelon(a, cols);
    CHECK(ech.rank() == ref.pivots.size());
    CHECK(ech.pivot_cols == ref.pivots);
    CHECK(linalg::rank(a, cols) == ref.pivots.size());

    auto kernel = linalg::nullspace(a, cols);
    CHECK(kernel.size() == cols - ref.pivots.size());
    for (const auto& v : kernel) {
      for (const auto& y : multiply(a, v)) CHECK(y == 0);
    }
    // Linearly independent.
    if (!kernel.empty()) CHECK(linalg::rank(kernel, cols) == kernel.size());

    RationalVector b(rows);
    for (auto& x : b) x = make_rational(static_cast<long>(rng() % 7) - 3, 1 + rng() % 3);
    auto x = linalg::solve(a, cols, b);
    auto aug = a;
    for (std::size_t i = 0; i < rows; ++i) aug[i].push_back(b[i]);
    const bool consistent = linalg::rank(aug, cols + 1) == ref.pivots.size();
    CHECK(x.has_value() == consistent);
    if (x) CHECK(multiply(a, *x) == b);
  }
}

TEST_CASE("transpose swaps indices") {
  linalg::Matrix a{{1, 2, 3}, {4, 5, 6}};
  auto t = linalg::transpose(a, 3);
  REQUIRE(t.size() == 3);
  CHECK(t[2][1] == 6);
  CHECK(t[0][1] == 4);
}

TEST_CASE("die mean and variance") {
  RationalVector psi{-1, 1};
  CHECK(die_mean(die_of({Rational(1, 3), Rational(2, 3)}), psi) == Rational(1, 3));
  CHECK(die_mean(die_of({Rational(1, 2), Rational(1, 2)}), psi) == 0);
  CHECK(die_mean(die_of({0, 0, 1}), RationalVector{-1, 1, 0}) == 0);
  CHECK(die_var(die_of({Rational(1, 3), Rational(2, 3)}), psi) == Rational(8, 9));
  CHECK(die_var(die_of({1, 0}), psi) == 0);
  CHECK(die_var(preset_e1().dice[0], RationalVector{-1, 1, 0, 0}) == 1);
  CHECK_THROWS_AS(die_mean(die_of({1, 0}), RationalVector{1, 2, 3}), GsvError);
  try {
    die_var(die_of({1, 0}), RationalVector{1});
    FAIL("expected a dimension error");
  } catch (const GsvError& e) {
    CHECK(e.code() == ErrorCode::kDimension);
  }
}

TEST_CASE("variance identity on random dice and witnesses") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    auto spec = testing::random_spec(rng, 5, 3);
    RationalVector psi(spec.num_faces()), sq(spec.num_faces());
    for (std::size_t f = 0; f < psi.size(); ++f) {
      psi[f] = make_rational(static_cast<long>(rng() % 9) - 4, 4);
      sq[f] = psi[f] * psi[f];
    }
    for (const Die& d : spec.dice) {
      Rational mean = die_mean(d, psi);
      CHECK(die_var(d, psi) == die_mean(d, sq) - mean * mean);
      CHECK(die_var(d, psi) >= 0);
    }
  }
}

TEST_CASE("support lists positive faces") {
  CHECK(support(die_of({Rational(1, 2), Rational(1, 2), 0, 0})) == std::vector<FaceIndex>{0, 1});
  CHECK(support(die_of({0, 0, 1})) == std::vector<FaceIndex>{2});
  CHECK(support(preset_e2().dice[1]) == std::vector<FaceIndex>{0, 1, 2, 3});
}

TEST_CASE("validation reports each violation") {
  CHECK(validate_source(preset_e1()).ok());

  SourceSpec orphan{{"0", "1", "2"}, {die_of({Rational(1, 2), Rational(1, 2), 0})}};
  auto r = validate_source(orphan);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].kind == ViolationKind::kOrphanFace);
  CHECK(r.violations[0].face == 2u);

  SourceSpec short_sum{{"0", "1"}, {die_of({Rational(1, 2), Rational(1, 3)})}};
  r = validate_source(short_sum);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].kind == ViolationKind::kSumNotOne);
  CHECK(r.violations[0].die == 0u);

  SourceSpec negative{{"0", "1"}, {die_of({Rational(3, 2), Rational(-1, 2)})}};
  r = validate_source(negative);
  REQUIRE_FALSE(r.ok());
  CHECK(r.violations[0].kind == ViolationKind::kNegativeProb);
  CHECK(r.violations[0].face == 1u);

  SourceSpec arity{{"0", "1"}, {die_of({1, 0}), die_of({1})}};
  r = validate_source(arity);
  CHECK(std::any_of(r.violations.begin(), r.violations.end(),
                    [](const Violation& v) { return v.kind == ViolationKind::kArityMismatch && v.die == 1u; }));

  SourceSpec dup{{"a", "a"}, {die_of({Rational(1, 2), Rational(1, 2)})}};
  CHECK(validate_source(dup).violations[0].kind == ViolationKind::kDuplicateLabel);

  CHECK(validate_source(SourceSpec{}).violations[0].kind == ViolationKind::kEmpty);
  CHECK_THROWS_AS(SourceSpec::checked({die_of({Rational(1, 2), Rational(1, 3)})}), GsvError);
}

TEST_CASE("sampling is deterministic and respects point masses") {
  auto coin = preset_fair_coin();
  CHECK(sample_sequence(coin, Strategy::constant(0), 0, 1).empty());

  auto two = preset_two_dice();
  CHECK(sample_sequence(two, Strategy::constant(0), 3, 99) == History{2, 2, 2});

  auto e2 = preset_e2();
  auto rule = Strategy::from_rule([](std::span<const FaceIndex> h) { return h.size() % 3; });
  CHECK(sample_sequence(e2, rule, 50, 7) == sample_sequence(e2, rule, 50, 7));
  CHECK(sample_sequence(e2, rule, 50, 7) != sample_sequence(e2, rule, 50, 8));

  try {
    sample_sequence(e2, Strategy::constant(3), 1, 0);
    FAIL("expected a strategy error");
  } catch (const GsvError& e) {
    CHECK(e.code() == ErrorCode::kStrategy);
  }
}

TEST_CASE("valid specs never fail to sample under in-range strategies") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    auto spec = testing::random_spec(rng, 5, 4);
    const std::size_t dice = spec.num_dice();
    auto rule = Strategy::from_rule([dice](std::span<const FaceIndex> h) {
      std::size_t acc = 0;
      for (FaceIndex f : h) acc = acc * 31 + f;
      return acc % dice;
    });
    auto seq = sample_sequence(spec, rule, 40, trial);
    CHECK(seq.size() == 40);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      History prefix(seq.begin(), seq.begin() + static_cast<long>(i));
      CHECK(spec.dice[rule.choose(prefix)].probs[seq[i]] > 0);
    }
  }
}

TEST_CASE("empirical face frequencies match the pmf") {
  auto e2 = preset_e2();
  const std::size_t n = 100000;
  for (DieIndex d = 0; d < e2.num_dice(); ++d) {
    auto seq = sample_sequence(e2, Strategy::constant(d), n, 1234 + d);
    std::vector<double> count(e2.num_faces(), 0);
    for (FaceIndex f : seq) count[f] += 1;
    for (FaceIndex f = 0; f < e2.num_faces(); ++f) {
      const double p = to_double(e2.dice[d].probs[f]);
      CAPTURE(d);
      CAPTURE(f);
      CHECK(std::abs(count[f] / n - p) <= 4 * std::sqrt(p / n));
    }
  }
}

TEST_CASE("strategy trees index histories big-endian") {
  StrategyTree tree(3, 3, 0);
  CHECK(tree.level_size(2) == 9);
  tree.at(2, 1 * 3 + 2) = 1;
  CHECK(tree.at(History{1, 2}) == 1);
  CHECK(tree.at(History{2, 1}) == 0);
  CHECK_THROWS_AS(tree.at(History{0, 0, 0}), GsvError);
  auto s = Strategy::from_tree(tree);
  CHECK(s.tree() != nullptr);
  CHECK(s.choose(History{1, 2}) == 1);
}

TEST_CASE("face sampler compares against exact cumulative thresholds") {
  auto spec = SourceSpec::checked({die_of({Rational(1, 2), Rational(1, 2)})});
  FaceSampler sampler(spec);
  const std::uint64_t half = std::uint64_t{1} << 63;
  CHECK(sampler.sample(0, half - 1) == 0);
  CHECK(sampler.sample(0, half) == 1);
  CHECK(sampler.sample(0, ~std::uint64_t{0}) == 1);
  auto third = SourceSpec::checked({die_of({Rational(1, 3), Rational(2, 3)})});
  FaceSampler s3(third);
  // floor(2^64 / 3) = 6148914691236517205 < 2^64/3, so it maps to face 0.
  CHECK(s3.sample(0, 6148914691236517205ull) == 0);
  CHECK(s3.sample(0, 6148914691236517206ull) == 1);
}

}  // TEST_SUITE
