#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aeg {

// Raised by all spec-string and config parsers; position is a 0-based byte
// offset into the offending string (or a line number for config files).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : std::runtime_error(message + " (at position " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// One `key=value` token of a `kind:key=val,key=val` spec string.
struct SpecParam {
  std::string key;
  std::string value;
  std::size_t position = 0;
};

struct SpecString {
  std::string kind;
  std::vector<SpecParam> params;

  const SpecParam* find(std::string_view key) const {
    for (const auto& p : params)
      if (p.key == key) return &p;
    return nullptr;
  }
};

// Splits `kind` or `kind:key=val,key=val,...`. Keys and the kind are
// lowercased; values are kept verbatim (they may be file paths).
SpecString parse_spec_string(std::string_view spec);

// Numeric field helpers; all throw ParseError naming the offending token.
double spec_double(const SpecString& s, std::string_view key);
double spec_double_or(const SpecString& s, std::string_view key, double fallback);
long long spec_int(const SpecString& s, std::string_view key);
std::uint64_t spec_uint(const SpecString& s, std::string_view key);
std::string spec_path(const SpecString& s, std::string_view key);

// Rejects params whose keys are not in `allowed` (comma-separated list).
void spec_check_keys(const SpecString& s, std::string_view allowed);

}  // namespace aeg
