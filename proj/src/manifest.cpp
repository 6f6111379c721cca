#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "mla/cli_io.hpp"

namespace mla {

namespace {

std::string digest_hex(const unsigned char* data, std::size_t n, std::istream* stream) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 initialisation failed");
  }
  if (data) EVP_DigestUpdate(ctx.get(), data, n);
  if (stream) {
    std::array<char, 1 << 16> buf{};
    while (*stream) {
      stream->read(buf.data(), buf.size());
      const auto got = stream->gcount();
      if (got > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(got));
    }
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  return digest_hex(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), nullptr);
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return digest_hex(nullptr, 0, &in);
}

nlohmann::json manifest_to_json(const RunManifest& m) {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& f : m.files) files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  nlohmann::json out = {{"tool", "mla"},
                        {"code_version", m.code_version},
                        {"started_utc", m.started_utc},
                        {"finished_utc", m.finished_utc},
                        {"threads", m.threads},
                        {"config", m.config},
                        {"tolerances", m.tolerances},
                        {"status", m.ok ? "ok" : "error"},
                        {"files", files}};
  if (!m.ok) {
    out["error_kind"] = m.error_kind;
    out["error"] = m.error;
  }
  return out;
}

}  // namespace mla
