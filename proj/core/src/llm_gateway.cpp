#include "alignguard/llm_gateway.hpp"

#include <cstdlib>
#include <sstream>

#include <httplib.h>

#include "alignguard/errors.hpp"
#include "alignguard/json.hpp"

namespace alignguard {

std::string CompletionRequest::fingerprint() const {
  std::ostringstream key;
  key.precision(17);
  key << model_name << "\x1f" << temperature << "\x1f" << system_text << "\x1f"
      << user_text;
  return sha256_hex(key.str());
}

namespace {

Json request_to_json(const CompletionRequest& req) {
  return Json{{"model_name", req.model_name},
              {"temperature", req.temperature},
              {"system_text", req.system_text},
              {"user_text", req.user_text}};
}

bool same_request(const Json& stored, const CompletionRequest& req) {
  return stored.value("model_name", "") == req.model_name &&
         stored.value("temperature", 0.0) == req.temperature &&
         stored.value("system_text", "") == req.system_text &&
         stored.value("user_text", "") == req.user_text;
}

}  // namespace

Cassette Cassette::load(const std::filesystem::path& path) {
  Cassette cassette;
  if (!std::filesystem::exists(path))
    throw ConfigError("cassette file missing: " + path.string());
  Json doc = load_json_file(path);
  if (doc.value("format", "") != "alignguard.cassette.v1")
    throw FormatError("unrecognized cassette format in " + path.string());
  for (const auto& [fp, entry] : doc.value("entries", Json::object()).items())
    cassette.entries_[fp] = entry;
  return cassette;
}

void Cassette::save(const std::filesystem::path& path) const {
  Json doc;
  doc["format"] = "alignguard.cassette.v1";
  Json entries = Json::object();
  for (const auto& [fp, entry] : entries_) entries[fp] = entry;
  doc["entries"] = entries;
  save_json_file(path, doc);
}

std::string Cassette::lookup(const CompletionRequest& req) const {
  auto it = entries_.find(req.fingerprint());
  if (it == entries_.end())
    throw ReplayMissError("replay miss for stage '" + req.stage +
                          "': no cassette entry for fingerprint " +
                          req.fingerprint().substr(0, 12));
  if (!same_request(it->second.value("request", Json::object()), req))
    throw GatewayError("cassette fingerprint collision: stored request differs");
  return it->second.value("completion", "");
}

bool Cassette::contains(const CompletionRequest& req) const {
  auto it = entries_.find(req.fingerprint());
  return it != entries_.end() &&
         same_request(it->second.value("request", Json::object()), req);
}

void Cassette::put(const CompletionRequest& req, const std::string& completion) {
  Json entry;
  entry["request"] = request_to_json(req);
  entry["completion"] = completion;
  entries_[req.fingerprint()] = entry;
}

std::vector<std::string> Cassette::fingerprints() const {
  std::vector<std::string> out;
  for (const auto& [fp, _] : entries_) out.push_back(fp);
  return out;
}

HttpTransport::HttpTransport(std::string endpoint, std::string api_key)
    : endpoint_(std::move(endpoint)), api_key_(std::move(api_key)) {}

std::string HttpTransport::complete(const CompletionRequest& req) {
  // endpoint: scheme://host[:port]/path
  auto scheme_split = endpoint_.find("://");
  if (scheme_split == std::string::npos)
    throw GatewayError("endpoint must include a scheme: " + endpoint_);
  auto path_split = endpoint_.find('/', scheme_split + 3);
  std::string base = path_split == std::string::npos ? endpoint_
                                                     : endpoint_.substr(0, path_split);
  std::string path = path_split == std::string::npos ? "/v1/chat/completions"
                                                     : endpoint_.substr(path_split);

  Json body;
  body["model"] = req.model_name;
  body["temperature"] = req.temperature;
  body["max_tokens"] = req.max_output_tokens;
  body["messages"] = Json::array({
      Json{{"role", "system"}, {"content", req.system_text}},
      Json{{"role", "user"}, {"content", req.user_text}},
  });

  httplib::Client client(base);
  client.set_read_timeout(120, 0);
  client.set_connection_timeout(20, 0);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res)
    throw GatewayError("endpoint unreachable: " + base +
                       " (" + httplib::to_string(res.error()) + ")");
  if (res->status < 200 || res->status >= 300)
    throw GatewayError("endpoint error " + std::to_string(res->status) + ": " +
                       res->body.substr(0, 2000));
  Json doc = parse_json(res->body, "completion response");
  if (doc.contains("choices") && !doc["choices"].empty()) {
    const auto& choice = doc["choices"][0];
    if (choice.contains("message"))
      return choice["message"].value("content", "");
    return choice.value("text", "");
  }
  throw GatewayError("completion response without choices: " +
                     res->body.substr(0, 500));
}

std::string DenyTransport::complete(const CompletionRequest& req) {
  throw GatewayError("network activity denied (stage '" + req.stage + "')");
}

std::string to_string(GatewayMode mode) {
  switch (mode) {
    case GatewayMode::Replay:
      return "replay";
    case GatewayMode::Record:
      return "record";
    case GatewayMode::Live:
      return "live";
  }
  throw std::logic_error("unknown GatewayMode");
}

std::optional<GatewayMode> gateway_mode_from_string(const std::string& s) {
  if (s == "replay") return GatewayMode::Replay;
  if (s == "record") return GatewayMode::Record;
  if (s == "live") return GatewayMode::Live;
  return std::nullopt;
}

Json GatewayConfig::to_json() const {
  Json doc;
  doc["mode"] = to_string(mode);
  doc["cassette_path"] = cassette_path.string();
  doc["endpoint"] = endpoint;
  doc["api_key_env"] = api_key_env;
  doc["model_name"] = model_name;
  doc["mutation_model_name"] = mutation_model_name;
  doc["temperature"] = temperature;
  doc["max_retries"] = max_retries;
  return doc;
}

GatewayConfig GatewayConfig::from_json(const Json& doc) {
  GatewayConfig cfg;
  if (doc.contains("mode")) {
    auto mode = gateway_mode_from_string(doc["mode"].get<std::string>());
    if (!mode) throw ConfigError("unknown gateway mode: " + doc["mode"].dump());
    cfg.mode = *mode;
  }
  cfg.cassette_path = doc.value("cassette_path", "");
  cfg.endpoint = doc.value("endpoint", "");
  cfg.api_key_env = doc.value("api_key_env", cfg.api_key_env);
  cfg.model_name = doc.value("model_name", cfg.model_name);
  cfg.mutation_model_name = doc.value("mutation_model_name", cfg.mutation_model_name);
  cfg.temperature = doc.value("temperature", cfg.temperature);
  cfg.max_retries = doc.value("max_retries", cfg.max_retries);
  return cfg;
}

Gateway::Gateway(GatewayConfig config, std::unique_ptr<Transport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {}

std::shared_ptr<Gateway> Gateway::configure(const GatewayConfig& config,
                                            std::unique_ptr<Transport> transport) {
  if (config.temperature < 0.0 || config.temperature > 2.0)
    throw ConfigError("temperature must be within [0, 2]");

  std::unique_ptr<Transport> wire = std::move(transport);
  if (config.mode != GatewayMode::Replay && !wire) {
    const char* key = nullptr;
    if (!config.api_key_env.empty()) key = std::getenv(config.api_key_env.c_str());
    if (config.endpoint.empty())
      throw ConfigError("live/record mode requires an endpoint");
    if (!key || !*key)
      throw ConfigError("live/record mode requires credentials in $" +
                        config.api_key_env);
    wire = std::make_unique<HttpTransport>(config.endpoint, key);
  }

  auto gateway = std::shared_ptr<Gateway>(new Gateway(config, std::move(wire)));
  if (config.mode == GatewayMode::Replay) {
    if (config.cassette_path.empty())
      throw ConfigError("replay mode requires a cassette path");
    gateway->cassette_ = Cassette::load(config.cassette_path);
  } else if (config.mode == GatewayMode::Record &&
             std::filesystem::exists(config.cassette_path)) {
    gateway->cassette_ = Cassette::load(config.cassette_path);
  }
  return gateway;
}

std::string Gateway::complete(const CompletionRequest& req) {
  if (trim(req.user_text).empty())
    throw PreconditionError("completion request with empty user_text");
  if (req.temperature < 0.0 || req.temperature > 2.0)
    throw PreconditionError("temperature out of range");

  std::lock_guard<std::mutex> lock(mutex_);
  switch (config_.mode) {
    case GatewayMode::Replay:
      return cassette_.lookup(req);
    case GatewayMode::Record: {
      if (cassette_.contains(req)) return cassette_.lookup(req);
      ++transport_calls_;
      std::string completion = transport_->complete(req);
      cassette_.put(req, completion);
      cassette_.save(config_.cassette_path);
      return completion;
    }
    case GatewayMode::Live:
      ++transport_calls_;
      return transport_->complete(req);
  }
  throw std::logic_error("unreachable gateway mode");
}

Json Gateway::complete_structured(const CompletionRequest& req,
                                  const std::vector<std::string>& required_fields) {
  CompletionRequest attempt = req;
  std::string last_error;
  for (int retry = 0; retry <= config_.max_retries; ++retry) {
    if (retry > 0) {
      attempt.user_text = req.user_text +
                          "\n\nYour previous output failed validation: " + last_error +
                          "\nReturn only the structured output, correcting this.";
    }
    std::string completion = complete(attempt);
    try {
      return parse_structured(completion, required_fields);
    } catch (const FormatError& e) {
      last_error = e.what();
    }
  }
  throw StageError(req.stage.empty() ? "completion" : req.stage,
                   "structured output failed after " +
                       std::to_string(config_.max_retries) + " retries: " + last_error);
}

void Gateway::flush() {
  std::lock_guard<std::mutex> lock(mutex_);
  if (config_.mode == GatewayMode::Record && !config_.cassette_path.empty())
    cassette_.save(config_.cassette_path);
}

Json parse_structured(const std::string& text,
                      const std::vector<std::string>& required_fields) {
  // Prefer a fenced block; tolerate a language tag after the fence.
  std::string candidate;
  size_t fence = text.find("```");
  if (fence != std::string::npos) {
    size_t body_start = text.find('\n', fence);
    size_t fence_end = body_start == std::string::npos
                           ? std::string::npos
                           : text.find("```", body_start);
    if (body_start != std::string::npos && fence_end != std::string::npos)
      candidate = text.substr(body_start + 1, fence_end - body_start - 1);
  }
  if (candidate.empty()) {
    size_t open = text.find('{');
    if (open != std::string::npos) {
      int depth = 0;
      bool in_string = false;
      for (size_t i = open; i < text.size(); ++i) {
        char c = text[i];
        if (in_string) {
          if (c == '\\')
            ++i;
          else if (c == '"')
            in_string = false;
          continue;
        }
        if (c == '"') in_string = true;
        if (c == '{') ++depth;
        if (c == '}') {
          --depth;
          if (depth == 0) {
            candidate = text.substr(open, i - open + 1);
            break;
          }
        }
      }
    }
  }
  if (trim(candidate).empty())
    throw FormatError("no structured block found in completion");

  Json doc = Json::parse(candidate, nullptr, false);
  if (doc.is_discarded()) {
    // Some completions wrap a JSON object in a fenced block with prose
    // around it; try the first balanced object inside the candidate.
    size_t open = candidate.find('{');
    size_t close = candidate.rfind('}');
    if (open != std::string::npos && close != std::string::npos && close > open)
      doc = Json::parse(candidate.substr(open, close - open + 1), nullptr, false);
  }
  if (doc.is_discarded())
    throw FormatError("structured block is not valid JSON");

  for (const auto& field : required_fields) {
    const Json* cursor = &doc;
    std::string part;
    std::istringstream path(field);
    bool ok = true;
    while (std::getline(path, part, '.')) {
      if (!cursor->is_object() || !cursor->contains(part)) {
        ok = false;
        break;
      }
      cursor = &(*cursor)[part];
    }
    if (!ok) throw FormatError("missing required field: " + field);
  }
  return doc;
}

}  // namespace alignguard
