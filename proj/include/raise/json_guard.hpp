#pragma once

#include <string_view>

namespace raise::detail {

/// String-aware bracket-depth scan. The vendored JSON parser recurses per
/// nesting level, so adversarial inputs (kilobytes of '[') must be bounded
/// before parsing. Exact for valid documents; over-rejection can only hit
/// inputs that are malformed anyway.
inline bool json_nesting_too_deep(std::string_view text, int limit) {
  int depth = 0;
  bool in_string = false;
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (c == '\\')
        ++i;
      else if (c == '"')
        in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    if (c == '[' || c == '{') {
      if (++depth > limit) return true;
    }
    if (c == ']' || c == '}') --depth;
  }
  return false;
}

}  // namespace raise::detail
