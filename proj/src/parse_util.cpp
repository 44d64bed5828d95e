#include "aeg/parse_util.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>

namespace aeg {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

SpecString parse_spec_string(std::string_view spec) {
  SpecString out;
  if (spec.empty()) throw ParseError("empty spec string", 0);
  const std::size_t colon = spec.find(':');
  out.kind = lower(spec.substr(0, colon));
  if (out.kind.empty()) throw ParseError("missing kind before ':'", 0);
  if (colon == std::string_view::npos) return out;

  std::size_t pos = colon + 1;
  if (pos >= spec.size()) throw ParseError("expected key=value after ':'", pos);
  while (pos < spec.size()) {
    std::size_t end = spec.find(',', pos);
    if (end == std::string_view::npos) end = spec.size();
    const std::string_view item = spec.substr(pos, end - pos);
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0)
      throw ParseError("expected key=value, got '" + std::string(item) + "'", pos);
    SpecParam p;
    p.key = lower(item.substr(0, eq));
    p.value = std::string(item.substr(eq + 1));
    p.position = pos;
    if (p.value.empty()) throw ParseError("empty value for key '" + p.key + "'", pos);
    out.params.push_back(std::move(p));
    pos = end + 1;
  }
  return out;
}

namespace {

const SpecParam& require(const SpecString& s, std::string_view key) {
  const SpecParam* p = s.find(key);
  if (!p)
    throw ParseError("missing parameter '" + std::string(key) + "' in '" + s.kind + "' spec", 0);
  return *p;
}

double to_double(const SpecParam& p) {
  char* end = nullptr;
  const double v = std::strtod(p.value.c_str(), &end);
  if (end == p.value.c_str() || *end != '\0')
    throw ParseError("invalid number '" + p.value + "' for key '" + p.key + "'", p.position);
  return v;
}

}  // namespace

double spec_double(const SpecString& s, std::string_view key) { return to_double(require(s, key)); }

double spec_double_or(const SpecString& s, std::string_view key, double fallback) {
  const SpecParam* p = s.find(key);
  return p ? to_double(*p) : fallback;
}

long long spec_int(const SpecString& s, std::string_view key) {
  const SpecParam& p = require(s, key);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(p.value.data(), p.value.data() + p.value.size(), v);
  if (ec != std::errc{} || ptr != p.value.data() + p.value.size())
    throw ParseError("invalid integer '" + p.value + "' for key '" + p.key + "'", p.position);
  return v;
}

std::uint64_t spec_uint(const SpecString& s, std::string_view key) {
  const SpecParam& p = require(s, key);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(p.value.data(), p.value.data() + p.value.size(), v);
  if (ec != std::errc{} || ptr != p.value.data() + p.value.size())
    throw ParseError("invalid unsigned integer '" + p.value + "' for key '" + p.key + "'",
                     p.position);
  return v;
}

std::string spec_path(const SpecString& s, std::string_view key) { return require(s, key).value; }

void spec_check_keys(const SpecString& s, std::string_view allowed) {
  for (const auto& p : s.params) {
    bool ok = false;
    std::size_t pos = 0;
    while (pos <= allowed.size()) {
      std::size_t end = allowed.find(',', pos);
      if (end == std::string_view::npos) end = allowed.size();
      if (allowed.substr(pos, end - pos) == p.key) {
        ok = true;
        break;
      }
      pos = end + 1;
    }
    if (!ok)
      throw ParseError("unknown parameter '" + p.key + "' in '" + s.kind + "' spec", p.position);
  }
}

}  // namespace aeg
