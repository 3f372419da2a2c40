#include "wpcis/version.hpp"

#include <cctype>
#include <limits>

#include "wpcis/errors.hpp"

namespace wpcis {
namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Parses the digit run starting at `pos`; false on overflow.
bool read_number(std::string_view s, std::size_t& pos, unsigned& value) {
  std::uint64_t acc = 0;
  const std::size_t start = pos;
  while (pos < s.size() && is_digit(s[pos])) {
    acc = acc * 10 + static_cast<unsigned>(s[pos] - '0');
    if (acc > std::numeric_limits<unsigned>::max()) return false;
    ++pos;
  }
  value = static_cast<unsigned>(acc);
  return pos > start;
}

}  // namespace

std::string WpVersion::str() const {
  std::string out = std::to_string(major) + '.' + std::to_string(minor);
  if (patch) out += '.' + std::to_string(*patch);
  return out;
}

std::optional<WpVersion> find_version(std::string_view raw) noexcept {
  for (std::size_t start = 0; start < raw.size(); ++start) {
    if (!is_digit(raw[start]) || (start > 0 && is_digit(raw[start - 1]))) continue;

    unsigned parts[3] = {0, 0, 0};
    int count = 0;
    std::size_t pos = start;
    while (count < 3) {
      // An overflowing component ends the run; earlier components still count.
      if (!read_number(raw, pos, parts[count])) break;
      ++count;
      if (count == 3 || pos + 1 >= raw.size() || raw[pos] != '.' || !is_digit(raw[pos + 1])) break;
      ++pos;
    }
    if (count < 2) continue;
    WpVersion v{parts[0], parts[1], std::nullopt};
    if (count == 3) v.patch = parts[2];
    return v;
  }
  return std::nullopt;
}

WpVersion parse_version(std::string_view raw) {
  if (auto v = find_version(raw)) return *v;
  throw Error(ErrorCode::NoVersionFound, "no version number in '" + std::string(raw) + "'");
}

bool is_affected_version(const WpVersion& v) noexcept {
  return v.major == 4 && v.minor == 7 && v.patch.has_value() && (*v.patch == 0 || *v.patch == 1);
}

bool is_imprecise_affected_candidate(const WpVersion& v) noexcept {
  return v.major == 4 && v.minor == 7 && !v.patch.has_value();
}

}  // namespace wpcis
