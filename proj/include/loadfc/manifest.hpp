// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "loadfc/keyvalue.hpp"

namespace loadfc {

/// Whole file as bytes; Io error naming the path when it cannot be read.
std::string read_text_file(const std::string& path);
/// Creates parent directories as needed.
void write_text_file(const std::string& path, std::string_view bytes);

/// Lowercase hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

/// Everything needed to re-run a command: its name, every option with
/// defaults made explicit, input digests and the files it wrote.
struct RunManifest {
  std::string command;
  KeyValues globals;  // --seed, --jobs, --out-dir
  KeyValues options;  // command option name (without dashes) -> value
  std::vector<std::pair<std::string, std::string>> inputs;  // path, sha256
  std::vector<std::string> outputs;

  std::string str() const;
  static RunManifest parse(std::string_view text);
};

}  // namespace loadfc
