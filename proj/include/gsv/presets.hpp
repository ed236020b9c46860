#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gsv/model.hpp"

namespace gsv {

// Three dice over four faces with a hidden two-face SV source.
SourceSpec preset_e1();
// Three dice over four faces; hereditary kernel without NK+.
SourceSpec preset_e2();
SourceSpec preset_fair_coin();
// Dice (1/2 + delta, 1/2 - delta) and (1/2 - delta, 1/2 + delta), 0 < delta < 1/2.
SourceSpec preset_sv(const Rational& delta);
// (0, 0, 1) and (1/2, 1/2, 0): a kernel exists but one die has no entropy.
SourceSpec preset_two_dice();

// Names: E1, E2, fair-coin, two-dice, sv:<delta>.
std::optional<SourceSpec> find_preset(std::string_view name);
std::vector<std::string> preset_names();

}  // namespace gsv
