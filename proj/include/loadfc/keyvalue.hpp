// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace loadfc {

/// Ordered flat key=value document; one pair per line, '#' starts a comment.
class KeyValues {
 public:
  void set(std::string key, std::string value);
  std::optional<std::string> get(std::string_view key) const;
  std::string require(std::string_view key) const;  // SchemaMismatch if absent
  const std::vector<std::pair<std::string, std::string>>& items() const noexcept {
    return items_;
  }

  std::string str() const;
  static KeyValues parse(std::string_view text);

 private:
  std::vector<std::pair<std::string, std::string>> items_;
};

}  // namespace loadfc
