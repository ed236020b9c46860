#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "gsv/classifier.hpp"
#include "gsv/model.hpp"
#include "gsv/oracle.hpp"

namespace gsv::json_io {

using Json = nlohmann::ordered_json;

// Strings go through parse_rational, JSON integers are exact; binary
// floating-point numbers are rejected with GsvError(kParse).
Rational rational_from_json(const Json& value);
Json rational_to_json(const Rational& value);
Json rationals_to_json(std::span<const Rational> values);

// {"faces": [...], "dice": [["1/2", ...], ...]}; "faces" may be omitted, in
// which case labels default to "0", "1", .... The result is validated.
SourceSpec source_from_json(const Json& doc);
SourceSpec parse_source(const std::string& text);
SourceSpec load_source(const std::filesystem::path& path);
Json source_to_json(const SourceSpec& spec);

// Nested {"die": k, "<face label>": {...}} objects, one level per sample.
StrategyTree strategy_from_json(const Json& doc, const SourceSpec& spec, std::size_t depth);
StrategyTree load_strategy(const std::filesystem::path& path, const SourceSpec& spec,
                           std::size_t depth);
Json strategy_to_json(const StrategyTree& tree, const SourceSpec& spec);

Json witness_to_json(const Witness& witness);
Json report_to_json(const ClassificationReport& report, const SourceSpec& spec);
Json bias_to_json(const BiasReport& report, const SourceSpec& spec);

}  // namespace gsv::json_io
