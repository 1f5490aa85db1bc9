#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "declsolve/errors.hpp"
#include "declsolve/prompt.hpp"

namespace declsolve {

struct CompletionRequest {
  std::string model;
  std::string prompt;
  DecodingParams params;
  std::vector<std::string> stop{std::string(kDefaultStop)};
};

/// Hex SHA-256 over a canonical encoding of model, prompt bytes, decoding
/// parameters and stop sequences.
std::string fingerprint(const CompletionRequest& request);

/// JSON body sent to an OpenAI-compatible `/v1/completions` endpoint.
std::string request_body(const CompletionRequest& request);

/// `choices[0].text` of a completions response. Throws EndpointError.
std::string completion_text(const std::string& response_body);

class CassetteMiss : public Error {
 public:
  explicit CassetteMiss(std::string fp)
      : Error(ErrorCode::CassetteMiss, "no recorded completion for " + fp), fingerprint_(std::move(fp)) {}
  const std::string& fingerprint() const noexcept { return fingerprint_; }

 private:
  std::string fingerprint_;
};

class EndpointError : public Error {
 public:
  EndpointError(int status, const std::string& excerpt)
      : Error(ErrorCode::EndpointError, "status " + std::to_string(status) + ": " + excerpt), status_(status) {}
  /// HTTP status, or 0 when no response arrived.
  int status() const noexcept { return status_; }

 private:
  int status_;
};

struct CassetteEntry {
  std::string fingerprint;
  std::string model;
  DecodingParams params;
  std::vector<std::string> stop;
  std::string completion;
};

struct CassetteMetadata {
  std::string model;
  std::string recorded_at;
  std::map<std::string, std::string> prompt_hashes;
};

/// Newline-delimited JSON: an optional metadata line, then one entry per
/// line. Entries are immutable: re-adding a fingerprint keeps the first.
class Cassette {
 public:
  Cassette() = default;

  static Cassette load(const std::filesystem::path& path);
  static Cassette parse(std::string_view text);

  const std::string* find(const std::string& fp) const;
  bool add(CassetteEntry entry);
  std::size_t size() const { return entries_.size(); }

  const std::optional<CassetteMetadata>& metadata() const { return metadata_; }
  void set_metadata(CassetteMetadata metadata) { metadata_ = std::move(metadata); }

  /// Entries in insertion order, metadata first.
  std::string serialize() const;
  void save(const std::filesystem::path& path) const;

  static std::string entry_line(const CassetteEntry& entry);
  static std::string metadata_line(const CassetteMetadata& metadata);

 private:
  std::optional<CassetteMetadata> metadata_;
  std::vector<CassetteEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Network seam. Implementations throw Error(Timeout) on timeouts and
/// EndpointError(0, ...) when no connection could be made.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post(const std::string& url, const std::string& body,
                            const std::vector<std::pair<std::string, std::string>>& headers,
                            std::chrono::milliseconds timeout) = 0;
};

/// cpp-httplib transport for http and https URLs.
std::shared_ptr<HttpTransport> make_http_transport();

enum class ClientMode { Live, Replay, RecordThrough };

std::string_view to_string(ClientMode mode) noexcept;
std::optional<ClientMode> parse_client_mode(std::string_view name);  // live, replay, record

struct ClientConfig {
  ClientMode mode = ClientMode::Replay;
  std::string endpoint = "https://api.openai.com/v1/completions";
  std::string api_key_env = "OPENAI_API_KEY";
  std::filesystem::path cassette;
  std::chrono::milliseconds timeout{std::chrono::seconds(120)};
  int max_in_flight = 4;
  int max_attempts = 3;
  std::chrono::milliseconds backoff_base{std::chrono::seconds(2)};
  std::map<std::string, std::string> prompt_hashes;  // written into new cassettes
};

using SleepFn = std::function<void(std::chrono::milliseconds)>;

/// Completion client shared by concurrent workers.
///
/// Replay serves only from the cassette and never creates a transport.
/// RecordThrough serves cassette hits and records misses through the live
/// path, appending each new entry to the cassette file as it arrives. Live
/// retries 429, 5xx, timeouts and connection failures with exponential
/// backoff.
class CompletionClient {
 public:
  explicit CompletionClient(ClientConfig config, std::shared_ptr<HttpTransport> transport = nullptr,
                            SleepFn sleep = nullptr);

  std::string complete(const CompletionRequest& request);

  const ClientConfig& config() const { return config_; }
  std::size_t network_calls() const { return network_calls_.load(); }
  std::size_t cassette_size() const;

 private:
  std::string live(const CompletionRequest& request);
  void record(const CompletionRequest& request, const std::string& fp, const std::string& text);

  ClientConfig config_;
  std::shared_ptr<HttpTransport> transport_;
  SleepFn sleep_;
  std::string api_key_;
  Cassette cassette_;
  mutable std::shared_mutex cassette_mutex_;
  std::mutex writer_mutex_;
  std::unique_ptr<std::counting_semaphore<>> in_flight_;
  std::atomic<std::size_t> network_calls_{0};
};

}  // namespace declsolve
