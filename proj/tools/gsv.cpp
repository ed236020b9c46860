// gsv: classify GSV sources, run extractors, compute exact biases, and
// benchmark the multi-bit extractor.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "gsv/classifier.hpp"
#include "gsv/error.hpp"
#include "gsv/extractors.hpp"
#include "gsv/json_io.hpp"
#include "gsv/oracle.hpp"
#include "gsv/presets.hpp"

namespace {

using gsv::ErrorCode;
using gsv::GsvError;
using gsv::Rational;
using gsv::RationalVector;
using gsv::SourceSpec;
using Json = gsv::json_io::Json;

constexpr int kExitUsage = 64;
constexpr int kExitGuard = 65;
constexpr int kExitInternal = 70;

struct RunConfig {
  std::string source;
  std::string epsilon;  // extract and bias default to 1/10
  std::string delta;
  std::string n = "10";
  std::string m = "1";
  std::string seed = "0";
  std::string strategy = "constant:0";
  std::string extractor = "bit-exp";
  std::string format = "json";
  std::string out;
  std::string transcript;
  std::string reps = "5";
  std::string naive_max_m = "16";
};

std::uint64_t parse_count(const std::string& text, const char* flag) {
  Rational value = gsv::parse_rational(text);
  if (value < 0 || value.get_den() != 1 || !value.get_num().fits_ulong_p()) {
    throw GsvError(ErrorCode::kParse, std::string(flag) + " needs a non-negative integer, got " + text);
  }
  return value.get_num().get_ui();
}

// "N" or "A..B", inclusive.
std::pair<std::uint64_t, std::uint64_t> parse_range(const std::string& text, const char* flag) {
  auto dots = text.find("..");
  if (dots == std::string::npos) {
    auto v = parse_count(text, flag);
    return {v, v};
  }
  auto lo = parse_count(text.substr(0, dots), flag);
  auto hi = parse_count(text.substr(dots + 2), flag);
  if (lo > hi) throw GsvError(ErrorCode::kParse, std::string(flag) + " range is empty: " + text);
  return {lo, hi};
}

SourceSpec load_source(const std::string& where) {
  if (where.empty()) throw GsvError(ErrorCode::kParse, "--source is required");
  if (std::filesystem::is_regular_file(where)) return gsv::json_io::load_source(where);
  if (auto preset = gsv::find_preset(where)) return *preset;
  throw GsvError(ErrorCode::kParse, "no such file or preset: " + where);
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw GsvError(ErrorCode::kParse, "cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void emit_json(const RunConfig& cfg, const Json& doc) {
  Output out(cfg.out);
  out.stream() << doc.dump(2) << "\n";
}

// NK+ witness when available; otherwise the MVR witness at epsilon.
gsv::Witness pick_witness(const SourceSpec& spec, const gsv::ClassificationReport& report,
                          const Rational& epsilon) {
  if (report.nk_plus.witness) return *report.nk_plus.witness;
  return gsv::mvr_witness(spec, epsilon);
}

struct ExtractorChoice {
  std::string name;
  RationalVector psi;
  Rational epsilon;
  unsigned m = 1;
  std::optional<gsv::ExtractorTable> table;

  bool multibit() const { return name == "multibit-naive" || name == "multibit-fast"; }
};

gsv::ExtractorTable load_table(const std::string& path, const SourceSpec& spec) {
  std::ifstream in(path);
  if (!in) throw GsvError(ErrorCode::kParse, "cannot open " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw GsvError(ErrorCode::kParse, e.what());
  }
  if (!doc.contains("outputs") || !doc.at("outputs").is_array()) {
    throw GsvError(ErrorCode::kParse, "extractor table needs an \"outputs\" array");
  }
  std::vector<std::int64_t> outputs;
  for (const Json& v : doc.at("outputs")) {
    if (!v.is_number_integer()) throw GsvError(ErrorCode::kParse, "table outputs must be integers");
    outputs.push_back(v.get<std::int64_t>());
  }
  std::size_t n = 0;
  std::uint64_t leaves = 1;
  while (leaves < outputs.size()) {
    leaves *= spec.num_faces();
    ++n;
  }
  if (leaves != outputs.size()) {
    throw GsvError(ErrorCode::kParse, "table size is not a power of |F|");
  }
  if (doc.contains("m")) {
    unsigned m = doc.at("m").get<unsigned>();
    return gsv::ExtractorTable::lookup(n, spec.num_faces(), gsv::OutputKind::kIndex, m,
                                       std::move(outputs));
  }
  for (auto v : outputs) {
    if (v != 1 && v != -1) throw GsvError(ErrorCode::kParse, "sign table outputs must be +-1");
  }
  return gsv::ExtractorTable::lookup(n, spec.num_faces(), gsv::OutputKind::kSign, 1,
                                     std::move(outputs));
}

ExtractorChoice choose_extractor(const RunConfig& cfg, const SourceSpec& spec,
                                 const gsv::ClassificationReport& report) {
  ExtractorChoice c;
  c.name = cfg.extractor;
  c.epsilon = gsv::parse_rational(cfg.epsilon);
  c.m = static_cast<unsigned>(parse_count(cfg.m, "--m"));
  if (c.name.starts_with("table:")) {
    c.table = load_table(c.name.substr(6), spec);
    return c;
  }
  if (c.name == "constant") return c;
  if (c.name != "threshold" && c.name != "bit-exp" && !c.multibit()) {
    throw GsvError(ErrorCode::kParse, "unknown extractor " + c.name);
  }
  c.psi = pick_witness(spec, report, c.epsilon).values;
  return c;
}

gsv::ExtractorTable make_table(const ExtractorChoice& c, std::size_t n) {
  if (c.table) {
    if (c.table->n != n) {
      throw GsvError(ErrorCode::kInvalidArgument, "extractor table is defined for n=" +
                                                      std::to_string(c.table->n) + " only");
    }
    return *c.table;
  }
  const RationalVector psi = c.psi;
  if (c.name == "constant") {
    return gsv::ExtractorTable::sign(n, [](std::span<const gsv::FaceIndex>) { return 1; });
  }
  if (c.name == "threshold") {
    const Rational eps = c.epsilon;
    return gsv::ExtractorTable::sign(
        n, [psi, eps](std::span<const gsv::FaceIndex> f) { return gsv::threshold_extract(psi, eps, f); });
  }
  if (c.name == "bit-exp") {
    return gsv::ExtractorTable::sign(
        n, [psi](std::span<const gsv::FaceIndex> f) { return gsv::bit_extract_exp(psi, f); });
  }
  const unsigned m = c.m;
  if (c.name == "multibit-naive") {
    return gsv::ExtractorTable::index(n, m, [psi, m](std::span<const gsv::FaceIndex> f) {
      return static_cast<std::int64_t>(gsv::multibit_index_naive(gsv::psi_values(psi, f), m));
    });
  }
  return gsv::ExtractorTable::index(n, m, [psi, m](std::span<const gsv::FaceIndex> f) {
    return static_cast<std::int64_t>(gsv::multibit_index_fast(gsv::psi_values(psi, f), m));
  });
}

int category_exit(gsv::Category category) {
  switch (category) {
    case gsv::Category::kExpError: return 0;
    case gsv::Category::kPolyError: return 1;
    case gsv::Category::kNonExtractable: return 2;
  }
  return kExitInternal;
}

int cmd_classify(const RunConfig& cfg) {
  SourceSpec spec = load_source(cfg.source);
  auto report = gsv::classify(spec);
  if (cfg.format == "csv") {
    Output out(cfg.out);
    out.stream() << "category,nk,nk_plus,hnk\n"
                 << gsv::to_string(report.category) << "," << report.nk.holds << ","
                 << report.nk_plus.holds << "," << report.hnk.holds << "\n";
    return category_exit(report.category);
  }
  Json doc = gsv::json_io::report_to_json(report, spec);
  if (report.hnk.holds && !cfg.epsilon.empty()) {
    const Rational eps = gsv::parse_rational(cfg.epsilon);
    try {
      doc["mvr_witness"] = gsv::json_io::witness_to_json(gsv::mvr_witness(spec, eps));
    } catch (const GsvError& e) {
      if (e.code() != ErrorCode::kEpsilonTooLarge) throw;
      doc["mvr_witness_error"] = e.what();
    }
    if (!cfg.delta.empty() && doc.contains("mvr_witness")) {
      auto phi = gsv::mvr_witness(spec, eps).values;
      doc["mvd_holds"] = gsv::check_mvd(spec, phi, eps, gsv::parse_rational(cfg.delta));
    }
  }
  emit_json(cfg, doc);
  return category_exit(report.category);
}

gsv::Strategy pick_strategy(const RunConfig& cfg, const SourceSpec& spec, const ExtractorChoice& c,
                            std::size_t n) {
  if (cfg.strategy.starts_with("constant:")) {
    auto d = parse_count(cfg.strategy.substr(9), "--strategy");
    if (d >= spec.num_dice()) throw GsvError(ErrorCode::kStrategy, "no die " + std::to_string(d));
    return gsv::Strategy::constant(d);
  }
  if (cfg.strategy == "worst-case") {
    const auto guard = gsv::tree_guard_from_env();
    auto table = make_table(c, n);
    if (table.kind == gsv::OutputKind::kIndex) {
      auto report = gsv::exact_multibit_error(spec, table, gsv::kDefaultEnumGuard, guard);
      return gsv::Strategy::from_tree(*report.worst);
    }
    auto bias = gsv::exact_extremes(spec, table, guard);
    const bool up = gsv::abs(bias.max_expectation) >= gsv::abs(bias.min_expectation);
    return gsv::Strategy::from_tree(up ? bias.max_strategy : bias.min_strategy);
  }
  return gsv::Strategy::from_tree(gsv::json_io::load_strategy(cfg.strategy, spec, n));
}

// One transcript row per sample: step,face,psi_value,z_summary.
class Transcript {
 public:
  explicit Transcript(const std::string& path) {
    if (path.empty()) return;
    out_.open(path);
    if (!out_) throw GsvError(ErrorCode::kParse, "cannot write " + path);
    out_ << "step,face,psi_value,z_summary\n";
  }
  bool on() const { return out_.is_open(); }
  void row(std::size_t step, const std::string& face, const Rational& psi, const std::string& z) {
    out_ << step << "," << face << "," << gsv::to_string(psi) << "," << z << "\n";
  }

 private:
  std::ofstream out_;
};

int cmd_extract(const RunConfig& cfg) {
  SourceSpec spec = load_source(cfg.source);
  auto report = gsv::classify(spec);
  if (report.category == gsv::Category::kNonExtractable) {
    std::cerr << "gsv: source is NON_EXTRACTABLE\n";
    return 2;
  }
  const std::size_t n = parse_count(cfg.n, "--n");
  const std::uint64_t seed = parse_count(cfg.seed, "--seed");
  ExtractorChoice c = choose_extractor(cfg, spec, report);
  gsv::Strategy strategy = pick_strategy(cfg, spec, c, n);
  gsv::History faces = gsv::sample_sequence(spec, strategy, n, seed);

  Transcript transcript(cfg.transcript);
  std::string output;
  if (c.table) {
    output = std::to_string(c.table->eval(faces));
  } else if (c.name == "constant") {
    output = "1";
  } else if (c.name == "threshold") {
    auto state = gsv::threshold_init(c.epsilon);
    for (std::size_t i = 0; i < n; ++i) {
      state = gsv::threshold_step(std::move(state), c.psi[faces[i]]);
      if (transcript.on()) transcript.row(i + 1, spec.face_labels[faces[i]], c.psi[faces[i]], gsv::to_string(state.z));
    }
    output = gsv::sign_of(state.z) > 0 ? "1" : "-1";
  } else if (c.name == "bit-exp") {
    gsv::BitExpState state;
    for (std::size_t i = 0; i < n; ++i) {
      state = gsv::bit_exp_step(std::move(state), c.psi[faces[i]]);
      if (transcript.on()) transcript.row(i + 1, spec.face_labels[faces[i]], c.psi[faces[i]], gsv::to_string(state.z));
    }
    output = gsv::sign_of(state.z) > 0 ? "1" : "-1";
  } else if (c.name == "multibit-naive") {
    auto state = gsv::multibit_init(c.m);
    for (std::size_t i = 0; i < n; ++i) {
      state = gsv::multibit_step_naive(std::move(state), c.psi[faces[i]]);
      if (transcript.on()) {
        transcript.row(i + 1, spec.face_labels[faces[i]], c.psi[faces[i]],
                       "top=" + gsv::index_to_bits(state.top(), c.m));
      }
    }
    output = gsv::index_to_bits(state.top(), c.m);
  } else {
    gsv::MultiBitFast fast(c.m);
    for (std::size_t i = 0; i < n; ++i) {
      fast.step(c.psi[faces[i]]);
      if (transcript.on()) {
        transcript.row(i + 1, spec.face_labels[faces[i]], c.psi[faces[i]],
                       "top=" + gsv::index_to_bits(fast.top_index(), c.m));
      }
    }
    output = gsv::index_to_bits(fast.top_index(), c.m);
  }

  if (cfg.format == "csv") {
    Output out(cfg.out);
    out.stream() << "extractor,n,seed,output\n" << c.name << "," << n << "," << seed << "," << output << "\n";
    return 0;
  }
  Json doc;
  doc["category"] = std::string(gsv::to_string(report.category));
  doc["extractor"] = c.name;
  doc["n"] = n;
  doc["seed"] = seed;
  if (!c.psi.empty()) doc["psi"] = gsv::json_io::rationals_to_json(c.psi);
  if (c.multibit()) doc["m"] = c.m;
  doc["output"] = output;
  emit_json(cfg, doc);
  return 0;
}

int cmd_bias(const RunConfig& cfg) {
  SourceSpec spec = load_source(cfg.source);
  auto report = gsv::classify(spec);
  ExtractorChoice c;
  try {
    c = choose_extractor(cfg, spec, report);
  } catch (const GsvError& e) {
    if (e.code() == ErrorCode::kNotHnk) {
      std::cerr << "gsv: source has no extractor witness (NON_EXTRACTABLE)\n";
      return 2;
    }
    throw;
  }
  auto [lo, hi] = parse_range(cfg.n, "--n");
  if (c.table) lo = hi = c.table->n;
  const auto guard = gsv::tree_guard_from_env();

  Json rows = Json::array();
  std::ostringstream csv;
  csv << (c.multibit() ? "n,distance\n" : "n,bias\n");
  for (std::uint64_t n = lo; n <= hi; ++n) {
    auto table = make_table(c, n);
    Json row;
    row["n"] = n;
    if (table.kind == gsv::OutputKind::kIndex) {
      gsv::check_tree_guard(spec.num_faces(), n, guard);
      auto err = gsv::exact_multibit_error(spec, table, gsv::kDefaultEnumGuard, guard);
      row["distance"] = gsv::json_io::rational_to_json(err.distance);
      row["worst_strategy"] = gsv::json_io::strategy_to_json(*err.worst, spec);
      csv << n << "," << gsv::to_string(err.distance) << "\n";
    } else {
      auto bias = gsv::exact_extremes(spec, table, guard);
      row["report"] = gsv::json_io::bias_to_json(bias, spec);
      csv << n << "," << gsv::to_string(bias.bias) << "\n";
    }
    rows.push_back(std::move(row));
  }
  if (cfg.format == "csv") {
    Output out(cfg.out);
    out.stream() << csv.str();
  } else {
    Json doc;
    doc["extractor"] = c.name;
    if (!c.psi.empty()) doc["psi"] = gsv::json_io::rationals_to_json(c.psi);
    doc["rows"] = std::move(rows);
    emit_json(cfg, doc);
  }
  return 0;
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t k = xs.size() / 2;
  return xs.size() % 2 ? xs[k] : (xs[k - 1] + xs[k]) / 2;
}

template <typename F>
double seconds(F&& f) {
  auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_bench(const RunConfig& cfg) {
  auto [n_lo, n_hi] = parse_range(cfg.n, "--n");
  auto [m_lo, m_hi] = parse_range(cfg.m, "--m");
  const auto reps = std::max<std::uint64_t>(5, parse_count(cfg.reps, "--reps"));
  const auto naive_max = parse_count(cfg.naive_max_m, "--naive-max-m");
  const std::uint64_t seed = parse_count(cfg.seed, "--seed");

  std::ostringstream csv;
  csv << "n,m,naive_median_s,fast_median_s,speedup,match\n";
  Json rows = Json::array();
  for (std::uint64_t n = n_lo; n <= n_hi; n = (n == n_hi ? n + 1 : std::min(n_hi, n * 2))) {
    for (std::uint64_t m = m_lo; m <= m_hi; ++m) {
      std::mt19937_64 rng(seed ^ (n * 1000003u + m));
      RationalVector values;
      for (std::uint64_t i = 0; i < n; ++i) values.push_back(Rational(rng() & 1 ? 1 : -1));

      std::vector<double> fast_t, naive_t;
      std::uint64_t fast_out = 0, naive_out = 0;
      for (std::uint64_t r = 0; r < reps; ++r) {
        fast_t.push_back(seconds([&] { fast_out = gsv::multibit_index_fast(values, m); }));
      }
      const bool comparative = m <= naive_max && m <= gsv::kNaiveMaxBits;
      if (comparative) {
        for (std::uint64_t r = 0; r < reps; ++r) {
          naive_t.push_back(seconds([&] { naive_out = gsv::multibit_index_naive(values, m); }));
        }
      }
      Json row;
      row["n"] = n;
      row["m"] = m;
      row["fast_median_s"] = median(fast_t);
      csv << n << "," << m << ",";
      if (comparative) {
        const double nm = median(naive_t), fm = median(fast_t);
        row["naive_median_s"] = nm;
        row["speedup"] = nm / fm;
        row["match"] = naive_out == fast_out;
        csv << nm << "," << fm << "," << nm / fm << "," << (naive_out == fast_out) << "\n";
      } else {
        csv << "," << median(fast_t) << ",,\n";
      }
      rows.push_back(std::move(row));
    }
  }
  if (cfg.format == "csv") {
    Output out(cfg.out);
    out.stream() << csv.str();
  } else {
    emit_json(cfg, Json{{"reps", reps}, {"rows", rows}});
  }
  return 0;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kTreeLimit:
    case ErrorCode::kEnumLimit:
    case ErrorCode::kSubsetLimit: return kExitGuard;
    case ErrorCode::kNotHnk: return 2;
    case ErrorCode::kNoQualifyingDie: return kExitInternal;
    default: return kExitUsage;
  }
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--source", cfg.source, "source JSON file or preset (E1, E2, fair-coin, two-dice, sv:<delta>)")
      ->required();
  sub->add_option("--epsilon", cfg.epsilon, "epsilon as p/q or decimal (extract/bias default 1/10)");
  sub->add_option("--delta", cfg.delta, "delta as p/q or decimal");
  sub->add_option("--format", cfg.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  sub->add_option("--out", cfg.out, "output file (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classify GSV sources and run their extractors"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* classify = app.add_subcommand("classify", "classify a source (exit 0/1/2 = EXP/POLY/NON)");
  add_common(classify, cfg);

  auto* extract = app.add_subcommand("extract", "sample a source and run an extractor");
  add_common(extract, cfg);
  auto* bias = app.add_subcommand("bias", "exact worst-case bias over all strategies");
  add_common(bias, cfg);
  for (auto* sub : {extract, bias}) {
    sub->add_option("--n", cfg.n, "sample count, or A..B for bias")->capture_default_str();
    sub->add_option("--m", cfg.m, "output bits for multibit extractors")->capture_default_str();
    sub->add_option("--extractor", cfg.extractor,
                    "threshold, bit-exp, multibit-naive, multibit-fast, constant, table:<path>")
        ->capture_default_str();
  }
  extract->add_option("--seed", cfg.seed, "64-bit seed")->capture_default_str();
  extract->add_option("--strategy", cfg.strategy, "tree JSON path, worst-case, or constant:<die>")
      ->capture_default_str();
  extract->add_option("--transcript", cfg.transcript, "CSV transcript path");

  auto* bench = app.add_subcommand("bench", "time naive vs fast multibit extraction");
  bench->add_option("--n", cfg.n, "sample count or A..B (doubling)")->capture_default_str();
  bench->add_option("--m", cfg.m, "bits or A..B")->capture_default_str();
  bench->add_option("--seed", cfg.seed, "64-bit seed")->capture_default_str();
  bench->add_option("--reps", cfg.reps, "repetitions (at least 5)")->capture_default_str();
  bench->add_option("--naive-max-m", cfg.naive_max_m, "skip naive above this m")->capture_default_str();
  bench->add_option("--format", cfg.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  bench->add_option("--out", cfg.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*classify) return cmd_classify(cfg);
    if (*extract) {
      if (cfg.epsilon.empty()) cfg.epsilon = "1/10";
      return cmd_extract(cfg);
    }
    if (*bias) {
      if (cfg.epsilon.empty()) cfg.epsilon = "1/10";
      return cmd_bias(cfg);
    }
    if (*bench) return cmd_bench(cfg);
  } catch (const GsvError& e) {
    std::cerr << "gsv: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "gsv: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
