#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace stylevis::images {

using Bytes = std::vector<std::uint8_t>;

struct ImageSize {
  int width = 1024;
  int height = 1024;
};

struct ImageRequest {
  std::string final_prompt;
  std::string negative_prompt;  // empty when the provider ignores negatives
  std::uint64_t seed = 0;
  ImageSize size;
  std::map<std::string, std::string> extra;
};

/// Text-to-image backend. Must be safe for concurrent calls; transport or
/// model failures throw Error(ErrorKind::Provider).
class ImageProvider {
 public:
  virtual ~ImageProvider() = default;

  virtual std::string name() const = 0;
  virtual std::string file_extension() const = 0;
  virtual bool supports_negative_prompt() const { return true; }
  virtual Bytes generate(const ImageRequest& request) = 0;
};

/// Renders a small binary PPM whose header comment carries the SHA-256 of
/// the prompt, the seed and the requested size; pixel colors are derived
/// from the same digest. Output is a pure function of the request.
class MockImageProvider final : public ImageProvider {
 public:
  using FailurePredicate = std::function<bool(const ImageRequest&)>;

  MockImageProvider() = default;
  explicit MockImageProvider(FailurePredicate fail_when) : fail_when_(std::move(fail_when)) {}

  std::string name() const override { return "mock-image"; }
  std::string file_extension() const override { return "ppm"; }
  Bytes generate(const ImageRequest& request) override;

  std::size_t call_count() const { return calls_.load(); }

 private:
  FailurePredicate fail_when_;
  std::atomic<std::size_t> calls_{0};
};

struct HttpImageEndpoint {
  std::string url;
  std::string model;
  std::string api_key;
  std::string extension = "png";
  bool negative_prompt_supported = true;
  int timeout_seconds = 300;
};

/// POSTs {"model", "prompt", "negative_prompt", "seed", "width", "height",
/// "extra"} and stores the response body as the image.
class HttpImageProvider final : public ImageProvider {
 public:
  explicit HttpImageProvider(HttpImageEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

  std::string name() const override { return "http:" + endpoint_.model; }
  std::string file_extension() const override { return endpoint_.extension; }
  bool supports_negative_prompt() const override { return endpoint_.negative_prompt_supported; }
  Bytes generate(const ImageRequest& request) override;

 private:
  HttpImageEndpoint endpoint_;
};

}  // namespace stylevis::images
