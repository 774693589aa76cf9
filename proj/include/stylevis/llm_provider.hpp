#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace stylevis::llm {

using Params = std::map<std::string, std::string>;

/// Text-completion backend. Implementations must not touch artifact state
/// and must tolerate concurrent calls. Transport failures throw
/// Error(ErrorKind::Provider).
class LlmProvider {
 public:
  virtual ~LlmProvider() = default;

  virtual std::string name() const = 0;
  virtual std::string complete(std::string_view system, std::string_view user,
                               const Params& params) = 0;
};

/// Deterministic stand-in: answers with `prompt_count` distinct
/// comma-separated prompts chosen by hashing the user message, wrapped in a
/// line of prose the way chat models tend to answer.
class MockLlmProvider final : public LlmProvider {
 public:
  explicit MockLlmProvider(int prompt_count = 3) : prompt_count_(prompt_count) {}

  std::string name() const override { return "mock-llm"; }
  std::string complete(std::string_view system, std::string_view user,
                       const Params& params) override;

  std::size_t call_count() const { return calls_.load(); }

 private:
  int prompt_count_;
  std::atomic<std::size_t> calls_{0};
};

/// Replays a fixed script of replies in order; the last step repeats once
/// the script runs out. A step beginning with "!transport" simulates a
/// transport failure instead of a reply.
class ScriptedLlmProvider final : public LlmProvider {
 public:
  explicit ScriptedLlmProvider(std::vector<std::string> steps);

  /// One reply per file, in the order given.
  static ScriptedLlmProvider from_files(const std::vector<std::filesystem::path>& files);

  std::string name() const override { return "scripted-llm"; }
  std::string complete(std::string_view system, std::string_view user,
                       const Params& params) override;

  std::size_t call_count() const;
  /// User messages received so far, in call order.
  std::vector<std::string> seen_user_messages() const;

 private:
  std::vector<std::string> steps_;
  mutable std::mutex mutex_;
  std::size_t next_ = 0;
  std::vector<std::string> seen_;
};

struct HttpEndpoint {
  std::string url;          // e.g. http://localhost:8080/v1/complete
  std::string model;
  std::string api_key;      // resolved from the environment by the caller
  int timeout_seconds = 120;
};

/// POSTs {"model", "system", "user", "params"} as JSON and treats the
/// response body as the raw completion text.
class HttpLlmProvider final : public LlmProvider {
 public:
  explicit HttpLlmProvider(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

  std::string name() const override { return "http:" + endpoint_.model; }
  std::string complete(std::string_view system, std::string_view user,
                       const Params& params) override;

 private:
  HttpEndpoint endpoint_;
};

/// Splits "scheme://host:port/path" into ("scheme://host:port", "/path").
std::pair<std::string, std::string> split_url(std::string_view url);

}  // namespace stylevis::llm
