// SPDX-License-Identifier: Apache-2.0
#include "loadfc/keyvalue.hpp"

#include "loadfc/error.hpp"

namespace loadfc {

void KeyValues::set(std::string key, std::string value) {
  for (auto& [k, v] : items_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  items_.emplace_back(std::move(key), std::move(value));
}

std::optional<std::string> KeyValues::get(std::string_view key) const {
  for (const auto& [k, v] : items_)
    if (k == key) return v;
  return std::nullopt;
}

std::string KeyValues::require(std::string_view key) const {
  auto v = get(key);
  if (!v) throw Error(ErrorKind::SchemaMismatch, "missing key '" + std::string(key) + "'");
  return *v;
}

std::string KeyValues::str() const {
  std::string out;
  for (const auto& [k, v] : items_) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

KeyValues KeyValues::parse(std::string_view text) {
  KeyValues kv;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorKind::SchemaMismatch, "line without '=': " + std::string(line));
    kv.set(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
  }
  return kv;
}

}  // namespace loadfc
