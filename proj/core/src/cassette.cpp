#include <json.hpp>

#include "declsolve/digest.hpp"
#include "declsolve/llm_client.hpp"
#include "io.hpp"

namespace declsolve {

using nlohmann::json;

namespace {

json params_json(const DecodingParams& p) {
  return {{"temperature", p.temperature}, {"max_tokens", p.max_tokens}, {"n", p.n_samples}};
}

DecodingParams params_from(const json& j) {
  DecodingParams p;
  p.temperature = j.at("temperature").get<double>();
  p.max_tokens = j.at("max_tokens").get<int>();
  p.n_samples = j.at("n").get<int>();
  return p;
}

std::string excerpt(const std::string& body) {
  constexpr std::size_t kMax = 200;
  return body.size() <= kMax ? body : body.substr(0, kMax) + "...";
}

}  // namespace

std::string fingerprint(const CompletionRequest& request) {
  const json canonical = {
      {"model", request.model},
      {"prompt", request.prompt},
      {"params", params_json(request.params)},
      {"stop", request.stop},
  };
  return sha256_hex(canonical.dump());
}

std::string request_body(const CompletionRequest& request) {
  json body = {
      {"model", request.model},
      {"prompt", request.prompt},
      {"temperature", request.params.temperature},
      {"max_tokens", request.params.max_tokens},
      {"n", request.params.n_samples},
  };
  if (!request.stop.empty()) body["stop"] = request.stop;
  return body.dump();
}

std::string completion_text(const std::string& response_body) {
  const json j = json::parse(response_body, nullptr, false);
  if (j.is_discarded()) throw EndpointError(200, "response is not JSON: " + excerpt(response_body));
  const auto choices = j.find("choices");
  if (choices == j.end() || !choices->is_array() || choices->empty() || !(*choices)[0].contains("text") ||
      !(*choices)[0]["text"].is_string()) {
    throw EndpointError(200, "response has no choices[0].text: " + excerpt(response_body));
  }
  return (*choices)[0]["text"].get<std::string>();
}

Cassette Cassette::load(const std::filesystem::path& path) { return parse(detail::read_file(path)); }

Cassette Cassette::parse(std::string_view text) {
  Cassette c;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = detail::trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      if (j.contains("cassette_metadata")) {
        const json& m = j["cassette_metadata"];
        c.metadata_ = CassetteMetadata{m.value("model", ""), m.value("recorded_at", ""),
                                       m.value("prompt_hashes", std::map<std::string, std::string>{})};
        continue;
      }
      CassetteEntry e;
      e.fingerprint = j.at("fingerprint").get<std::string>();
      e.model = j.at("model").get<std::string>();
      e.params = params_from(j.at("params"));
      e.stop = j.value("stop", std::vector<std::string>{});
      e.completion = j.at("completion").get<std::string>();
      c.add(std::move(e));
    } catch (const json::exception& ex) {
      throw Error(ErrorCode::FormatError, "cassette line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return c;
}

const std::string* Cassette::find(const std::string& fp) const {
  auto it = index_.find(fp);
  return it == index_.end() ? nullptr : &entries_[it->second].completion;
}

bool Cassette::add(CassetteEntry entry) {
  if (index_.contains(entry.fingerprint)) return false;
  index_.emplace(entry.fingerprint, entries_.size());
  entries_.push_back(std::move(entry));
  return true;
}

std::string Cassette::entry_line(const CassetteEntry& e) {
  const json j = {
      {"fingerprint", e.fingerprint}, {"model", e.model},         {"params", params_json(e.params)},
      {"stop", e.stop},               {"completion", e.completion},
  };
  return j.dump() + "\n";
}

std::string Cassette::metadata_line(const CassetteMetadata& m) {
  const json j = {{"cassette_metadata",
                   {{"model", m.model}, {"recorded_at", m.recorded_at}, {"prompt_hashes", m.prompt_hashes}}}};
  return j.dump() + "\n";
}

std::string Cassette::serialize() const {
  std::string out;
  if (metadata_) out += metadata_line(*metadata_);
  for (const auto& e : entries_) out += entry_line(e);
  return out;
}

void Cassette::save(const std::filesystem::path& path) const { detail::write_file(path, serialize()); }

}  // namespace declsolve
