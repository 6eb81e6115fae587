#include "manifest.hpp"

#include <chrono>
#include <ctime>

#include <openssl/evp.h>

#include "attrition/errors.hpp"

namespace attrition::cli {

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw NumericalError("sha256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int n = 0; n < len; ++n) {
    out += hex[md[n] >> 4];
    out += hex[md[n] & 15];
  }
  return out;
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

io::Json RunManifest::to_json() const {
  io::Json doc;
  doc["command"] = command;
  doc["args"] = args;
  doc["config"] = config;
  doc["input"] = io::Json{{"path", input_path}, {"sha256", input_digest}};
  doc["seed"] = seed ? io::Json(*seed) : io::Json(nullptr);
  doc["tool_version"] = tool_version;
  doc["started"] = started;
  doc["finished"] = finished;
  doc["outputs"] = outputs;
  return doc;
}

RunManifest RunManifest::from_json(const io::Json& doc) {
  try {
    RunManifest m;
    m.command = doc.at("command").get<std::string>();
    m.args = doc.at("args").get<std::vector<std::string>>();
    m.config = doc.at("config").get<std::string>();
    m.input_path = doc.at("input").at("path").get<std::string>();
    m.input_digest = doc.at("input").at("sha256").get<std::string>();
    if (!doc.at("seed").is_null()) m.seed = doc.at("seed").get<std::uint64_t>();
    m.tool_version = doc.at("tool_version").get<std::string>();
    m.started = doc.at("started").get<std::string>();
    m.finished = doc.at("finished").get<std::string>();
    m.outputs = doc.at("outputs").get<std::vector<std::string>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad manifest: ") + e.what());
  }
}

}  // namespace attrition::cli
