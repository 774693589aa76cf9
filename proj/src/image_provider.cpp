#include "stylevis/image_provider.hpp"

#include "stylevis/digest.hpp"
#include "stylevis/error.hpp"
#include "stylevis/llm_provider.hpp"

#include <httplib.h>
#include <json.hpp>

#include <string>

namespace stylevis::images {
namespace {

constexpr int kMockSide = 32;

}  // namespace

Bytes MockImageProvider::generate(const ImageRequest& request) {
  ++calls_;
  if (fail_when_ && fail_when_(request)) {
    throw Error(ErrorKind::Provider, "mock image provider: injected failure");
  }
  const std::string digest = sha256_hex(request.final_prompt);
  std::string header = "P6\n# stylevis-mock prompt-sha256=" + digest +
                       " seed=" + std::to_string(request.seed) +
                       " size=" + std::to_string(request.size.width) + "x" +
                       std::to_string(request.size.height) + "\n" + std::to_string(kMockSide) +
                       " " + std::to_string(kMockSide) + "\n255\n";
  Bytes out(header.begin(), header.end());
  out.reserve(out.size() + kMockSide * kMockSide * 3);

  auto nibble = [&](std::size_t i) {
    const char c = digest[i % digest.size()];
    return static_cast<unsigned>(c <= '9' ? c - '0' : c - 'a' + 10);
  };
  const unsigned base_r = nibble(0) * 16 + nibble(1);
  const unsigned base_g = nibble(2) * 16 + nibble(3);
  const unsigned base_b = nibble(4) * 16 + nibble(5);
  for (int y = 0; y < kMockSide; ++y) {
    for (int x = 0; x < kMockSide; ++x) {
      const unsigned band = nibble(static_cast<std::size_t>((x / 4) + 8 * (y / 4)));
      out.push_back(static_cast<std::uint8_t>((base_r + band * 8 + x * 4) & 0xff));
      out.push_back(static_cast<std::uint8_t>((base_g + band * 4 + y * 4) & 0xff));
      out.push_back(static_cast<std::uint8_t>((base_b + band * 2 + (request.seed & 0x3f)) & 0xff));
    }
  }
  return out;
}

Bytes HttpImageProvider::generate(const ImageRequest& request) {
  const auto [base, path] = llm::split_url(endpoint_.url);
  httplib::Client client(base);
  client.set_read_timeout(endpoint_.timeout_seconds, 0);
  client.set_connection_timeout(10, 0);
  httplib::Headers headers;
  if (!endpoint_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + endpoint_.api_key);
  }
  nlohmann::json body = {{"model", endpoint_.model},
                         {"prompt", request.final_prompt},
                         {"seed", request.seed},
                         {"width", request.size.width},
                         {"height", request.size.height},
                         {"extra", request.extra}};
  if (!request.negative_prompt.empty()) body["negative_prompt"] = request.negative_prompt;
  auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorKind::Provider, "image request to " + endpoint_.url +
                                         " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorKind::Provider, "image endpoint returned HTTP " + std::to_string(res->status));
  }
  if (res->body.empty()) throw Error(ErrorKind::Provider, "image endpoint returned no bytes");
  return Bytes(res->body.begin(), res->body.end());
}

}  // namespace stylevis::images
