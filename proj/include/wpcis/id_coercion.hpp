#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace wpcis {

/// Integer value of the longest leading run of decimal digits; an empty run
/// is 0 and overlong runs saturate at INT64_MAX.
std::int64_t leading_integer(std::string_view text) noexcept;

/// True when `text` is a non-empty run of decimal digits only.
bool is_numeric_id(std::string_view text) noexcept;

/// Decimal `post_id` followed by `suffix`, which must be non-empty and start
/// with a non-digit so leading_integer() of the result is `post_id`.
/// Throws Error(InvalidSuffix).
std::string coerced_id(std::int64_t post_id, std::string_view suffix);

}  // namespace wpcis
