#include "declsolve/llm_client.hpp"

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <thread>

namespace declsolve {

namespace {

bool retryable(int status) { return status == 429 || status >= 500; }

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class InFlight {
 public:
  explicit InFlight(std::counting_semaphore<>& sem) : sem_(sem) { sem_.acquire(); }
  ~InFlight() { sem_.release(); }
  InFlight(const InFlight&) = delete;
  InFlight& operator=(const InFlight&) = delete;

 private:
  std::counting_semaphore<>& sem_;
};

}  // namespace

std::string_view to_string(ClientMode mode) noexcept {
  switch (mode) {
    case ClientMode::Live: return "live";
    case ClientMode::Replay: return "replay";
    case ClientMode::RecordThrough: return "record";
  }
  return "unknown";
}

std::optional<ClientMode> parse_client_mode(std::string_view name) {
  for (ClientMode m : {ClientMode::Live, ClientMode::Replay, ClientMode::RecordThrough}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

CompletionClient::CompletionClient(ClientConfig config, std::shared_ptr<HttpTransport> transport, SleepFn sleep)
    : config_(std::move(config)), transport_(std::move(transport)), sleep_(std::move(sleep)) {
  if (!sleep_) sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  if (config_.max_attempts < 1) throw Error(ErrorCode::InvalidArgument, "max_attempts must be at least 1");
  in_flight_ = std::make_unique<std::counting_semaphore<>>(std::max(1, config_.max_in_flight));

  if (config_.mode == ClientMode::Replay) {
    cassette_ = Cassette::load(config_.cassette);
    return;
  }
  if (config_.mode == ClientMode::RecordThrough) {
    if (config_.cassette.empty()) throw Error(ErrorCode::InvalidArgument, "record mode needs a cassette path");
    if (std::filesystem::exists(config_.cassette)) cassette_ = Cassette::load(config_.cassette);
  }
  if (!transport_) transport_ = make_http_transport();
  if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
}

std::size_t CompletionClient::cassette_size() const {
  std::shared_lock lock(cassette_mutex_);
  return cassette_.size();
}

std::string CompletionClient::complete(const CompletionRequest& request) {
  if (request.prompt.empty()) throw Error(ErrorCode::InvalidArgument, "empty prompt");
  if (request.params.max_tokens <= 0) throw Error(ErrorCode::InvalidArgument, "max_tokens must be positive");

  switch (config_.mode) {
    case ClientMode::Replay: {
      const std::string fp = fingerprint(request);
      if (const std::string* hit = cassette_.find(fp)) return *hit;
      throw CassetteMiss(fp);
    }
    case ClientMode::RecordThrough: {
      const std::string fp = fingerprint(request);
      {
        std::shared_lock lock(cassette_mutex_);
        if (const std::string* hit = cassette_.find(fp)) return *hit;
      }
      std::string text = live(request);
      record(request, fp, text);
      return text;
    }
    case ClientMode::Live: return live(request);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown client mode");
}

std::string CompletionClient::live(const CompletionRequest& request) {
  std::vector<std::pair<std::string, std::string>> headers;
  if (!api_key_.empty()) headers.emplace_back("Authorization", "Bearer " + api_key_);
  const std::string body = request_body(request);

  for (int attempt = 1;; ++attempt) {
    const bool last = attempt >= config_.max_attempts;
    const auto backoff = config_.backoff_base * (1LL << (attempt - 1));
    HttpResponse response;
    try {
      InFlight slot(*in_flight_);
      ++network_calls_;
      response = transport_->post(config_.endpoint, body, headers, config_.timeout);
    } catch (const EndpointError& e) {
      if (last || e.status() != 0) throw;
      sleep_(backoff);
      continue;
    } catch (const Error& e) {
      if (last || e.code() != ErrorCode::Timeout) throw;
      sleep_(backoff);
      continue;
    }
    if (response.status >= 200 && response.status < 300) return completion_text(response.body);
    if (last || !retryable(response.status)) {
      throw EndpointError(response.status, response.body.substr(0, 200));
    }
    sleep_(backoff);
  }
}

void CompletionClient::record(const CompletionRequest& request, const std::string& fp, const std::string& text) {
  std::lock_guard writer(writer_mutex_);
  {
    std::shared_lock lock(cassette_mutex_);
    if (cassette_.find(fp)) return;
  }
  const bool fresh = !std::filesystem::exists(config_.cassette) || std::filesystem::file_size(config_.cassette) == 0;
  CassetteEntry entry{fp, request.model, request.params, request.stop, text};
  std::string lines;
  if (fresh) {
    CassetteMetadata meta{request.model, utc_now(), config_.prompt_hashes};
    lines += Cassette::metadata_line(meta);
    std::unique_lock lock(cassette_mutex_);
    cassette_.set_metadata(std::move(meta));
  }
  lines += Cassette::entry_line(entry);
  std::ofstream out(config_.cassette, std::ios::binary | std::ios::app);
  out << lines;
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "cannot append to cassette '" + config_.cassette.string() + "'");
  std::unique_lock lock(cassette_mutex_);
  cassette_.add(std::move(entry));
}

}  // namespace declsolve
