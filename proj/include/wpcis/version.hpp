#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace wpcis {

/// WordPress release number. `patch` is absent when the source only carried
/// two components ("4.7"), which is not the same as "4.7.0".
struct WpVersion {
  unsigned major = 0;
  unsigned minor = 0;
  std::optional<unsigned> patch;

  std::string str() const;

  // Absent patch orders before any present patch.
  friend auto operator<=>(const WpVersion&, const WpVersion&) = default;
  friend bool operator==(const WpVersion&, const WpVersion&) = default;
};

/// First dotted numeric run of two or three components in `raw`, or
/// nullopt. Components start and end on digit-run boundaries.
std::optional<WpVersion> find_version(std::string_view raw) noexcept;

/// Like find_version but throws Error(NoVersionFound).
WpVersion parse_version(std::string_view raw);

/// True only for exactly 4.7.0 and 4.7.1.
bool is_affected_version(const WpVersion& v) noexcept;

/// 4.7 with no patch component: could be affected or patched.
bool is_imprecise_affected_candidate(const WpVersion& v) noexcept;

}  // namespace wpcis
