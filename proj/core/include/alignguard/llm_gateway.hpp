#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "alignguard/util.hpp"

namespace alignguard {

struct CompletionRequest {
  std::string model_name;
  double temperature = 0.2;
  std::string system_text;
  std::string user_text;  // must be non-empty
  int max_output_tokens = 4096;
  std::string stage;  // diagnostic label: "extract" | "synthesize" | "mutate"

  // sha256 over model_name, temperature, system_text, user_text.
  std::string fingerprint() const;
};

// Persisted request/completion map, keyed by fingerprint. Full requests are
// stored alongside so fingerprint collisions are detected on lookup.
class Cassette {
 public:
  Cassette() = default;
  static Cassette load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  // Returns the recorded completion; throws ReplayMissError when absent and
  // GatewayError when a fingerprint collides with a different request.
  std::string lookup(const CompletionRequest& req) const;
  bool contains(const CompletionRequest& req) const;
  void put(const CompletionRequest& req, const std::string& completion);
  size_t size() const { return entries_.size(); }
  std::vector<std::string> fingerprints() const;

 private:
  std::map<std::string, Json> entries_;
};

// The wire side of the gateway; swapped out in tests and replay mode.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string complete(const CompletionRequest& req) = 0;
};

// POSTs a chat-completion request to an HTTP endpoint. Auth token comes
// from the configured environment variable.
class HttpTransport : public Transport {
 public:
  HttpTransport(std::string endpoint, std::string api_key);
  std::string complete(const CompletionRequest& req) override;

 private:
  std::string endpoint_;
  std::string api_key_;
};

// Fails on any attempted network activity. Installed by the offline
// closure tests to assert that replay mode never reaches the wire.
class DenyTransport : public Transport {
 public:
  std::string complete(const CompletionRequest& req) override;
};

enum class GatewayMode { Replay, Record, Live };

std::string to_string(GatewayMode mode);
std::optional<GatewayMode> gateway_mode_from_string(const std::string& s);

struct GatewayConfig {
  GatewayMode mode = GatewayMode::Replay;
  std::filesystem::path cassette_path;
  std::string endpoint;
  std::string api_key_env = "ALIGNGUARD_API_TOKEN";
  // Two tiers: extraction/synthesis vs mutation, defaulting to one endpoint.
  std::string model_name = "gpt-4o";
  std::string mutation_model_name = "gpt-4o-mini";
  double temperature = 0.2;
  int max_retries = 3;

  Json to_json() const;
  static GatewayConfig from_json(const Json& doc);
};

class Gateway {
 public:
  // Validates mode requirements (credentials for live/record, cassette for
  // replay). `transport` overrides the wire implementation in tests.
  static std::shared_ptr<Gateway> configure(const GatewayConfig& config,
                                            std::unique_ptr<Transport> transport = nullptr);

  std::string complete(const CompletionRequest& req);

  // complete + parse_structured with the declared retry policy: up to
  // config.max_retries re-asks appending the parse error to the prompt,
  // then StageError.
  Json complete_structured(const CompletionRequest& req,
                           const std::vector<std::string>& required_fields);

  const GatewayConfig& config() const { return config_; }
  size_t transport_calls() const { return transport_calls_; }
  void flush();

 private:
  Gateway(GatewayConfig config, std::unique_ptr<Transport> transport);

  GatewayConfig config_;
  std::unique_ptr<Transport> transport_;
  Cassette cassette_;
  size_t transport_calls_ = 0;
  std::mutex mutex_;
};

// Extracts the first structured block (fenced or bare JSON object) from a
// completion, validates required dotted field paths, and returns the
// parsed document. Throws FormatError naming the missing field.
Json parse_structured(const std::string& text,
                      const std::vector<std::string>& required_fields);

}  // namespace alignguard
