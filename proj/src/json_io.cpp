#include "gsv/json_io.hpp"

#include <fstream>
#include <sstream>

#include "gsv/error.hpp"

namespace gsv::json_io {

namespace {

[[noreturn]] void fail(const std::string& what) { throw GsvError(ErrorCode::kParse, what); }

Json parse_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void fill_tree(const Json& node, const SourceSpec& spec, StrategyTree& tree, std::size_t level,
               std::uint64_t code) {
  if (!node.is_object() || !node.contains("die")) {
    fail("strategy node at depth " + std::to_string(level) + " has no \"die\"");
  }
  const Json& die = node.at("die");
  if (!die.is_number_integer() || die.get<std::int64_t>() < 0) {
    fail("strategy \"die\" must be a non-negative integer");
  }
  const auto d = die.get<std::uint64_t>();
  if (d >= spec.num_dice()) {
    throw GsvError(ErrorCode::kStrategy, "strategy names die " + std::to_string(d) + " of " +
                                             std::to_string(spec.num_dice()));
  }
  tree.at(level, code) = d;
  if (level + 1 == tree.depth()) return;
  for (FaceIndex f = 0; f < spec.num_faces(); ++f) {
    const std::string& label = spec.face_labels[f];
    if (!node.contains(label)) {
      fail("strategy node at depth " + std::to_string(level) + " lacks face \"" + label + "\"");
    }
    fill_tree(node.at(label), spec, tree, level + 1, code * spec.num_faces() + f);
  }
}

Json tree_node(const StrategyTree& tree, const SourceSpec& spec, std::size_t level,
               std::uint64_t code) {
  Json node;
  node["die"] = tree.at(level, code);
  if (level + 1 < tree.depth()) {
    for (FaceIndex f = 0; f < spec.num_faces(); ++f) {
      node[spec.face_labels[f]] = tree_node(tree, spec, level + 1, code * spec.num_faces() + f);
    }
  }
  return node;
}

}  // namespace

Rational rational_from_json(const Json& value) {
  if (value.is_string()) return parse_rational(value.get<std::string>());
  if (value.is_number_integer()) {
    return value.is_number_unsigned() ? Rational(value.get<unsigned long>())
                                      : Rational(value.get<long>());
  }
  if (value.is_number_float()) {
    fail("binary floating-point number " + value.dump() + "; write it as a \"p/q\" or decimal string");
  }
  fail("expected a rational, got " + value.dump());
}

Json rational_to_json(const Rational& value) { return to_string(value); }

Json rationals_to_json(std::span<const Rational> values) {
  Json out = Json::array();
  for (const Rational& v : values) out.push_back(rational_to_json(v));
  return out;
}

SourceSpec source_from_json(const Json& doc) {
  if (!doc.is_object()) fail("source must be a JSON object");
  if (!doc.contains("dice") || !doc.at("dice").is_array()) fail("source needs a \"dice\" array");
  std::vector<Die> dice;
  for (const Json& row : doc.at("dice")) {
    if (!row.is_array()) fail("each die must be an array of probabilities");
    Die die;
    for (const Json& p : row) die.probs.push_back(rational_from_json(p));
    dice.push_back(std::move(die));
  }
  std::vector<std::string> labels;
  if (doc.contains("faces")) {
    if (!doc.at("faces").is_array()) fail("\"faces\" must be an array");
    for (const Json& label : doc.at("faces")) {
      if (label.is_string()) {
        labels.push_back(label.get<std::string>());
      } else if (label.is_number_integer()) {
        labels.push_back(label.dump());
      } else {
        fail("face labels must be strings");
      }
    }
  }
  for (const std::string& label : labels) {
    if (label == "die") fail("\"die\" is reserved and cannot label a face");
  }
  return SourceSpec::checked(std::move(dice), std::move(labels));
}

SourceSpec parse_source(const std::string& text) { return source_from_json(parse_text(text)); }

SourceSpec load_source(const std::filesystem::path& path) { return parse_source(read_file(path)); }

Json source_to_json(const SourceSpec& spec) {
  Json doc;
  doc["faces"] = spec.face_labels;
  Json dice = Json::array();
  for (const Die& d : spec.dice) dice.push_back(rationals_to_json(d.probs));
  doc["dice"] = std::move(dice);
  return doc;
}

StrategyTree strategy_from_json(const Json& doc, const SourceSpec& spec, std::size_t depth) {
  StrategyTree tree(spec.num_faces(), depth);
  if (depth > 0) fill_tree(doc, spec, tree, 0, 0);
  return tree;
}

StrategyTree load_strategy(const std::filesystem::path& path, const SourceSpec& spec,
                           std::size_t depth) {
  return strategy_from_json(parse_text(read_file(path)), spec, depth);
}

Json strategy_to_json(const StrategyTree& tree, const SourceSpec& spec) {
  if (tree.depth() == 0) return Json::object();
  return tree_node(tree, spec, 0, 0);
}

Json witness_to_json(const Witness& witness) {
  Json out;
  out["kind"] = std::string(to_string(witness.kind));
  out["values"] = rationals_to_json(witness.values);
  if (witness.epsilon) out["epsilon"] = rational_to_json(*witness.epsilon);
  if (witness.min_variance) out["min_variance"] = rational_to_json(*witness.min_variance);
  return out;
}

namespace {

Json condition_json(const ConditionResult& result) {
  Json out;
  out["holds"] = result.holds;
  if (result.witness) out["witness"] = witness_to_json(*result.witness);
  return out;
}

}  // namespace

Json report_to_json(const ClassificationReport& report, const SourceSpec& spec) {
  Json out;
  out["category"] = std::string(to_string(report.category));
  out["nk"] = condition_json(report.nk);
  out["nk_plus"] = condition_json(report.nk_plus);
  Json hnk;
  hnk["holds"] = report.hnk.holds;
  if (report.hnk.failing) {
    Json dice = Json::array(), faces = Json::array();
    for (DieIndex d : report.hnk.failing->dice) dice.push_back(d);
    for (FaceIndex f : report.hnk.failing->faces) faces.push_back(spec.face_labels[f]);
    hnk["failing_subset"] = {{"dice", dice}, {"faces", faces}};
  }
  out["hnk"] = std::move(hnk);
  if (report.dual) {
    const DualCertificate& c = *report.dual;
    out["dual_certificate"] = {{"die", c.die},
                               {"f_star", spec.face_labels[c.f_star]},
                               {"f_low", spec.face_labels[c.f_low]},
                               {"beta", rationals_to_json(c.beta)},
                               {"constant", rational_to_json(c.constant)}};
  }
  return out;
}

Json bias_to_json(const BiasReport& report, const SourceSpec& spec) {
  Json out;
  out["max_expectation"] = rational_to_json(report.max_expectation);
  out["min_expectation"] = rational_to_json(report.min_expectation);
  out["bias"] = rational_to_json(report.bias);
  out["max_strategy"] = strategy_to_json(report.max_strategy, spec);
  out["min_strategy"] = strategy_to_json(report.min_strategy, spec);
  return out;
}

}  // namespace gsv::json_io
