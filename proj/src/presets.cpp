#include "gsv/presets.hpp"

#include "gsv/error.hpp"

namespace gsv {

namespace {

Die die(std::initializer_list<Rational> probs) { return Die{RationalVector(probs)}; }

}  // namespace

SourceSpec preset_e1() {
  return SourceSpec::checked({
      die({Rational(1, 2), Rational(1, 2), 0, 0}),
      die({0, 0, Rational(1, 3), Rational(2, 3)}),
      die({0, 0, Rational(2, 3), Rational(1, 3)}),
  });
}

SourceSpec preset_e2() {
  return SourceSpec::checked({
      die({Rational(1, 2), Rational(1, 2), 0, 0}),
      die({Rational(1, 4), Rational(1, 12), Rational(1, 3), Rational(1, 3)}),
      die({Rational(1, 12), Rational(1, 4), Rational(1, 3), Rational(1, 3)}),
  });
}

SourceSpec preset_fair_coin() {
  return SourceSpec::checked({die({Rational(1, 2), Rational(1, 2)})});
}

SourceSpec preset_sv(const Rational& delta) {
  if (delta <= 0 || delta >= Rational(1, 2)) {
    throw GsvError(ErrorCode::kInvalidArgument, "sv delta must lie in (0, 1/2)");
  }
  const Rational hi = Rational(1, 2) + delta;
  const Rational lo = Rational(1, 2) - delta;
  return SourceSpec::checked({die({hi, lo}), die({lo, hi})});
}

SourceSpec preset_two_dice() {
  return SourceSpec::checked({
      die({0, 0, 1}),
      die({Rational(1, 2), Rational(1, 2), 0}),
  });
}

std::optional<SourceSpec> find_preset(std::string_view name) {
  if (name == "E1") return preset_e1();
  if (name == "E2") return preset_e2();
  if (name == "fair-coin") return preset_fair_coin();
  if (name == "two-dice") return preset_two_dice();
  if (name.starts_with("sv:")) return preset_sv(parse_rational(name.substr(3)));
  return std::nullopt;
}

std::vector<std::string> preset_names() { return {"E1", "E2", "fair-coin", "two-dice", "sv:<delta>"}; }

}  // namespace gsv
