#include <json.hpp>
#include <regex>
#include <set>

#include "declsolve/eval.hpp"
#include "io.hpp"

namespace declsolve {

using nlohmann::json;

namespace {

const std::regex& numeral_pattern() {
  static const std::regex re(R"(^([+-]?)(?:(\d{1,3}(?:,\d{3})+|\d+)(?:\.(\d+))?|(\d+)/(\d+))$)");
  return re;
}

std::string record_number(std::size_t n) { return std::to_string(n); }

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    out.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

std::string field_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  throw Error(ErrorCode::FormatError, "expected a string or number, got " + std::string(v.type_name()));
}

void check_unique(std::vector<Problem>& problems) {
  std::set<std::string> seen;
  for (const auto& p : problems) {
    if (!seen.insert(p.id).second) throw DatasetError(ErrorCode::DuplicateId, p.id, "id appears more than once");
  }
}

// RFC 4180: quoted fields may hold commas, newlines and doubled quotes.
std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"': quoted = true; any = true; break;
      case ',': row.push_back(std::move(field)); field.clear(); any = true; break;
      case '\r': break;
      case '\n':
        if (any || !field.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        row.clear();
        field.clear();
        any = false;
        break;
      default: field += c; any = true;
    }
  }
  if (quoted) throw Error(ErrorCode::FormatError, "unterminated quoted CSV field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::optional<std::string> lower_key(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return detail::trim(s).empty() ? std::nullopt : std::optional<std::string>(std::string(detail::trim(s)));
}

bool is_question_key(const std::string& k) { return k == "question" || k == "problem" || k == "text"; }
bool is_answer_key(const std::string& k) { return k == "answer" || k == "gold" || k == "solution"; }

Problem make_problem(std::string id, std::string question, std::string_view answer) {
  auto gold = parse_numeral(answer);
  if (!gold) throw DatasetError(ErrorCode::UnparseableGold, id, "answer '" + std::string(answer) + "' is not a number");
  return {std::move(id), std::move(question), std::move(*gold)};
}

std::vector<Problem> algebra_from_objects(const std::vector<json>& objects) {
  std::vector<Problem> out;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const json& o = objects[i];
    if (!o.is_object()) throw Error(ErrorCode::FormatError, "record " + record_number(i + 1) + " is not an object");
    std::string id = record_number(i + 1);
    std::optional<std::string> question;
    std::optional<std::string> answer;
    for (const auto& [key, value] : o.items()) {
      const auto k = lower_key(key);
      if (!k) continue;
      if (*k == "id") id = field_text(value);
      else if (is_question_key(*k)) question = field_text(value);
      else if (is_answer_key(*k)) answer = field_text(value);
    }
    if (!question) throw DatasetError(ErrorCode::FormatError, id, "no question field");
    if (!answer) throw DatasetError(ErrorCode::UnparseableGold, id, "no answer field");
    out.push_back(make_problem(id, *question, *answer));
  }
  return out;
}

std::vector<Problem> algebra_from_csv(std::string_view text) {
  auto rows = parse_csv(text);
  if (rows.empty()) throw Error(ErrorCode::FormatError, "empty CSV");
  std::optional<std::size_t> qcol;
  std::optional<std::size_t> acol;
  std::optional<std::size_t> idcol;
  for (std::size_t c = 0; c < rows[0].size(); ++c) {
    const auto k = lower_key(rows[0][c]);
    if (!k) continue;
    if (*k == "id" && !idcol) idcol = c;
    else if (is_question_key(*k) && !qcol) qcol = c;
    else if (is_answer_key(*k) && !acol) acol = c;
  }
  if (!qcol || !acol) throw Error(ErrorCode::FormatError, "CSV header needs question and answer columns");
  std::vector<Problem> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    std::string id = idcol && *idcol < row.size() ? std::string(detail::trim(row[*idcol])) : record_number(r);
    if (*qcol >= row.size() || *acol >= row.size()) {
      throw DatasetError(ErrorCode::FormatError, id, "row has " + std::to_string(row.size()) + " fields");
    }
    out.push_back(make_problem(id, row[*qcol], row[*acol]));
  }
  return out;
}

}  // namespace

std::optional<Rational> parse_numeral(std::string_view text) {
  text = detail::trim(text);
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(text.begin(), text.end(), m, numeral_pattern())) return std::nullopt;
  std::string cleaned;
  for (char c : text) {
    if (c != ',') cleaned += c;
  }
  return Rational::try_parse(cleaned);
}

Rational gsm8k_gold(std::string_view answer, const std::string& id) {
  const auto marker = answer.rfind("####");
  if (marker == std::string_view::npos) throw DatasetError(ErrorCode::MissingMarker, id, "answer has no ####");
  const std::string_view rest = detail::trim(answer.substr(marker + 4));
  auto gold = parse_numeral(rest);
  if (!gold) throw DatasetError(ErrorCode::UnparseableGold, id, "gold '" + std::string(rest) + "' is not a number");
  return *gold;
}

std::vector<Problem> parse_gsm8k(std::string_view text) {
  std::vector<Problem> out;
  std::size_t n = 0;
  std::size_t line_no = 0;
  for (std::string_view line : lines_of(text)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    ++n;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw Error(ErrorCode::FormatError, "line " + std::to_string(line_no) + " is not a JSON object");
    }
    const std::string id = j.contains("id") ? field_text(j["id"]) : record_number(n);
    if (!j.contains("question") || !j["question"].is_string()) {
      throw DatasetError(ErrorCode::FormatError, id, "no question field");
    }
    if (!j.contains("answer") || !j["answer"].is_string()) {
      throw DatasetError(ErrorCode::MissingMarker, id, "no answer field");
    }
    out.push_back({id, j["question"].get<std::string>(), gsm8k_gold(j["answer"].get<std::string>(), id)});
  }
  check_unique(out);
  return out;
}

std::vector<Problem> load_gsm8k(const std::filesystem::path& path) { return parse_gsm8k(detail::read_file(path)); }

std::vector<Problem> parse_algebra(std::string_view text) {
  const std::string_view body = detail::trim(text);
  std::vector<Problem> out;
  if (!body.empty() && (body.front() == '[' || body.front() == '{')) {
    std::vector<json> objects;
    try {
      if (body.front() == '[') {
        for (auto& o : json::parse(body)) objects.push_back(std::move(o));
      } else {
        for (std::string_view line : lines_of(body)) {
          if (!detail::trim(line).empty()) objects.push_back(json::parse(line));
        }
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::FormatError, e.what());
    }
    out = algebra_from_objects(objects);
  } else {
    out = algebra_from_csv(text);
  }
  check_unique(out);
  return out;
}

std::vector<Problem> load_algebra(const std::filesystem::path& path) {
  return parse_algebra(detail::read_file(path));
}

}  // namespace declsolve
