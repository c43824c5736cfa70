// SPDX-License-Identifier: Apache-2.0
#include "loadfc/manifest.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "loadfc/error.hpp"

namespace loadfc {

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view bytes) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::Io, "SHA-256 digest failed");
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

std::string RunManifest::str() const {
  KeyValues kv;
  kv.set("command", command);
  for (const auto& [k, v] : globals.items()) kv.set("global." + k, v);
  for (const auto& [k, v] : options.items()) kv.set("option." + k, v);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    kv.set("input." + std::to_string(i) + ".path", inputs[i].first);
    kv.set("input." + std::to_string(i) + ".sha256", inputs[i].second);
  }
  for (std::size_t i = 0; i < outputs.size(); ++i)
    kv.set("output." + std::to_string(i), outputs[i]);
  return "# loadfc run manifest\n" + kv.str();
}

RunManifest RunManifest::parse(std::string_view text) {
  const KeyValues kv = KeyValues::parse(text);
  RunManifest m;
  m.command = kv.require("command");
  for (const auto& [k, v] : kv.items()) {
    if (k.starts_with("global.")) m.globals.set(k.substr(7), v);
    if (k.starts_with("option.")) m.options.set(k.substr(7), v);
  }
  for (std::size_t i = 0;; ++i) {
    const auto path = kv.get("input." + std::to_string(i) + ".path");
    if (!path) break;
    m.inputs.emplace_back(*path, kv.require("input." + std::to_string(i) + ".sha256"));
  }
  for (std::size_t i = 0;; ++i) {
    const auto out = kv.get("output." + std::to_string(i));
    if (!out) break;
    m.outputs.push_back(*out);
  }
  return m;
}

}  // namespace loadfc
