#include "wpcis/id_coercion.hpp"

#include <limits>

#include "wpcis/errors.hpp"

namespace wpcis {

std::int64_t leading_integer(std::string_view text) noexcept {
  constexpr auto kMax = std::numeric_limits<std::int64_t>::max();
  std::int64_t value = 0;
  for (char c : text) {
    if (c < '0' || c > '9') break;
    const int digit = c - '0';
    if (value > (kMax - digit) / 10) return kMax;
    value = value * 10 + digit;
  }
  return value;
}

bool is_numeric_id(std::string_view text) noexcept {
  if (text.empty()) return false;
  for (char c : text) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

std::string coerced_id(std::int64_t post_id, std::string_view suffix) {
  if (post_id < 0) {
    throw Error(ErrorCode::InvalidArgument, "post id must be non-negative");
  }
  if (suffix.empty() || (suffix.front() >= '0' && suffix.front() <= '9')) {
    throw Error(ErrorCode::InvalidSuffix,
                "suffix must be non-empty and start with a non-digit: '" + std::string(suffix) + "'");
  }
  return std::to_string(post_id) + std::string(suffix);
}

}  // namespace wpcis
