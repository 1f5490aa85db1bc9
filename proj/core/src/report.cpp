#include <json.hpp>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "declsolve/eval.hpp"
#include "io.hpp"
#include "report_io.hpp"

namespace declsolve {

using nlohmann::json;

namespace {

std::string encode_value(const Value& v) {
  if (v.is_exact()) return v.exact().to_string();
  char buf[40];
  std::snprintf(buf, sizeof buf, "~%.17g", v.to_double());
  return buf;
}

Value decode_value(const std::string& s) {
  if (!s.empty() && s.front() == '~') return Value::approximate(std::strtod(s.c_str() + 1, nullptr));
  return Value(Rational::parse(s));
}

Method decode_method(const std::string& s) {
  for (Method m : {Method::Substitution, Method::LinearElimination, Method::Quadratic, Method::Numeric}) {
    if (to_string(m) == s) return m;
  }
  throw Error(ErrorCode::FormatError, "unknown solver method '" + s + "'");
}

json config_json(const RunConfig& c) {
  return {
      {"model", c.model},
      {"temperature", c.params.temperature},
      {"max_tokens", c.params.max_tokens},
      {"n", c.params.n_samples},
      {"stop", c.stop},
      {"prompt_hashes", c.prompt_hashes},
      {"mode", c.mode},
      {"seed", c.seed},
  };
}

RunConfig config_from(const json& j) {
  RunConfig c;
  c.model = j.at("model").get<std::string>();
  c.params.temperature = j.at("temperature").get<double>();
  c.params.max_tokens = j.at("max_tokens").get<int>();
  c.params.n_samples = j.at("n").get<int>();
  c.stop = j.at("stop").get<std::vector<std::string>>();
  c.prompt_hashes = j.at("prompt_hashes").get<std::map<std::string, std::string>>();
  c.mode = j.at("mode").get<std::string>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

json header_json(const RunReport& r) {
  return {
      {"variant", to_string(r.variant)},
      {"dataset", r.dataset},
      {"dataset_size", r.dataset_size},
      {"config", config_json(r.config)},
  };
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

namespace detail {

std::string run_header_json(const RunReport& report) { return header_json(report).dump(2) + "\n"; }

}  // namespace detail

std::string record_line(const EvalRecord& r) {
  json j = {
      {"id", r.id},
      {"question", r.question},
      {"gold", r.gold.to_string()},
      {"transcript", r.transcript},
      {"script", r.script ? json(*r.script) : json(nullptr)},
      {"predicted", r.predicted ? json(encode_value(*r.predicted)) : json(nullptr)},
      {"verdict", to_string(r.verdict)},
      {"any_candidate_correct", r.any_candidate_correct},
      {"principle_warnings", r.principle_warnings},
      {"detail", r.detail},
  };
  if (r.outcome) {
    json candidates = json::array();
    for (const auto& c : r.outcome->candidates) candidates.push_back(encode_value(c));
    json trace = json::array();
    for (const auto& step : r.outcome->trace) trace.push_back({{"method", to_string(step.method)}, {"detail", step.detail}});
    j["outcome"] = {{"candidates", candidates}, {"selected", encode_value(r.outcome->selected)}, {"trace", trace}};
  } else {
    j["outcome"] = nullptr;
  }
  return j.dump() + "\n";
}

EvalRecord parse_record_line(std::string_view line) {
  try {
    const json j = json::parse(line);
    EvalRecord r;
    r.id = j.at("id").get<std::string>();
    r.question = j.at("question").get<std::string>();
    r.gold = Rational::parse(j.at("gold").get<std::string>());
    r.transcript = j.at("transcript").get<std::string>();
    if (!j.at("script").is_null()) r.script = j["script"].get<std::string>();
    if (!j.at("predicted").is_null()) r.predicted = decode_value(j["predicted"].get<std::string>());
    const auto verdict = parse_verdict(j.at("verdict").get<std::string>());
    if (!verdict) throw Error(ErrorCode::FormatError, "unknown verdict");
    r.verdict = *verdict;
    r.any_candidate_correct = j.at("any_candidate_correct").get<bool>();
    r.principle_warnings = j.at("principle_warnings").get<std::size_t>();
    r.detail = j.at("detail").get<std::string>();
    if (const json& o = j.at("outcome"); !o.is_null()) {
      SolveOutcome out;
      for (const auto& c : o.at("candidates")) out.candidates.push_back(decode_value(c.get<std::string>()));
      out.selected = decode_value(o.at("selected").get<std::string>());
      for (const auto& s : o.at("trace")) {
        out.trace.push_back({decode_method(s.at("method").get<std::string>()), s.at("detail").get<std::string>()});
      }
      r.outcome = std::move(out);
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("bad record line: ") + e.what());
  }
}

std::string report_json(const RunReport& report) {
  json j = header_json(report);
  json histogram = json::object();
  for (const auto& [verdict, count] : report.histogram()) histogram[std::string(to_string(verdict))] = count;
  json rows = json::array();
  for (const auto& r : report.records) {
    rows.push_back({
        {"id", r.id},
        {"verdict", to_string(r.verdict)},
        {"predicted", r.predicted ? json(encode_value(*r.predicted)) : json(nullptr)},
        {"gold", r.gold.to_string()},
        {"any_candidate_correct", r.any_candidate_correct},
        {"principle_warnings", r.principle_warnings},
    });
  }
  j["evaluated"] = report.records.size();
  j["correct"] = report.correct();
  j["solve_rate"] = report.solve_rate();
  j["any_candidate_rate"] = report.any_candidate_rate();
  j["histogram"] = histogram;
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

double RateSummary::mean() const {
  if (rates.empty()) return 0.0;
  return std::accumulate(rates.begin(), rates.end(), 0.0) / static_cast<double>(rates.size());
}

double RateSummary::stddev() const {
  if (rates.size() < 2) return 0.0;
  const double m = mean();
  double ss = 0.0;
  for (double r : rates) ss += (r - m) * (r - m);
  return std::sqrt(ss / static_cast<double>(rates.size() - 1));
}

std::vector<RateSummary> summarize(const std::vector<RunReport>& runs) {
  std::vector<RateSummary> out;
  for (const auto& run : runs) {
    auto it = std::find_if(out.begin(), out.end(), [&](const RateSummary& s) {
      return s.variant == run.variant && s.dataset == run.dataset;
    });
    if (it == out.end()) {
      out.push_back({run.variant, run.dataset, {}});
      it = std::prev(out.end());
    }
    it->rates.push_back(run.solve_rate());
  }
  return out;
}

std::string summary_table(const std::vector<RateSummary>& summaries) {
  std::vector<std::string> datasets;
  std::vector<Variant> variants;
  for (const auto& s : summaries) {
    if (std::find(datasets.begin(), datasets.end(), s.dataset) == datasets.end()) datasets.push_back(s.dataset);
    if (std::find(variants.begin(), variants.end(), s.variant) == variants.end()) variants.push_back(s.variant);
  }
  std::vector<std::vector<std::string>> grid;
  grid.push_back({"method"});
  for (const auto& d : datasets) grid[0].push_back(d);
  for (Variant v : variants) {
    std::vector<std::string> row{std::string(to_string(v))};
    for (const auto& d : datasets) {
      auto it = std::find_if(summaries.begin(), summaries.end(),
                             [&](const RateSummary& s) { return s.variant == v && s.dataset == d; });
      if (it == summaries.end()) {
        row.emplace_back("-");
      } else if (it->rates.size() == 1) {
        row.push_back(fixed(it->mean(), 1));
      } else {
        row.push_back(fixed(it->mean(), 1) + " +- " + fixed(it->stddev(), 2));
      }
    }
    grid.push_back(std::move(row));
  }
  std::vector<std::size_t> widths(grid[0].size(), 0);
  for (const auto& row : grid) {
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  }
  std::string out;
  auto emit = [&](const std::vector<std::string>& row) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) line += (c ? "  " : "") + pad(row[c], widths[c]);
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  };
  emit(grid[0]);
  std::vector<std::string> rule;
  for (auto w : widths) rule.emplace_back(w, '-');
  emit(rule);
  for (std::size_t r = 1; r < grid.size(); ++r) emit(grid[r]);
  return out;
}

std::string summary_csv(const std::vector<RateSummary>& summaries) {
  std::string out = "variant,dataset,runs,solve_rate_mean,solve_rate_sd\n";
  for (const auto& s : summaries) {
    out += std::string(to_string(s.variant)) + "," + csv_field(s.dataset) + "," + std::to_string(s.rates.size()) +
           "," + fixed(s.mean(), 4) + "," + fixed(s.stddev(), 4) + "\n";
  }
  return out;
}

std::string rows_csv(const RunReport& report) {
  std::string out = "id,verdict,predicted,gold,any_candidate_correct,principle_warnings,detail\n";
  for (const auto& r : report.records) {
    out += csv_field(r.id) + "," + std::string(to_string(r.verdict)) + "," +
           csv_field(r.predicted ? encode_value(*r.predicted) : "") + "," + r.gold.to_string() + "," +
           (r.any_candidate_correct ? "true" : "false") + "," + std::to_string(r.principle_warnings) + "," +
           csv_field(r.detail) + "\n";
  }
  return out;
}

void write_report(const RunReport& report, const std::filesystem::path& dir) {
  detail::write_file(dir / kReportFile, report_json(report));
  detail::write_file(dir / kRowsCsvFile, rows_csv(report));
  write_summary({report}, dir);
}

void write_summary(const std::vector<RunReport>& runs, const std::filesystem::path& dir) {
  const auto summaries = summarize(runs);
  detail::write_file(dir / kSummaryTextFile, summary_table(summaries));
  detail::write_file(dir / kSummaryCsvFile, summary_csv(summaries));
}

RunReport load_run(const std::filesystem::path& dir) {
  RunReport report;
  try {
    const json head = json::parse(detail::read_file(dir / kRunFile));
    const auto variant = parse_variant(head.at("variant").get<std::string>());
    if (!variant) throw Error(ErrorCode::FormatError, "unknown variant in run.json");
    report.variant = *variant;
    report.dataset = head.at("dataset").get<std::string>();
    report.dataset_size = head.at("dataset_size").get<std::size_t>();
    report.config = config_from(head.at("config"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("bad run.json: ") + e.what());
  }
  const std::string records = detail::read_file(dir / kRecordsFile);
  std::size_t pos = 0;
  while (pos < records.size()) {
    auto nl = records.find('\n', pos);
    // a line without its newline was cut off mid-write
    if (nl == std::string::npos) break;
    const std::string_view line = detail::trim(std::string_view(records).substr(pos, nl - pos));
    pos = nl + 1;
    if (!line.empty()) report.records.push_back(parse_record_line(line));
  }
  return report;
}

}  // namespace declsolve
