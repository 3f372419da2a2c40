#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace wpcis {

enum class Sector { education, financial, medical, online_portal, blog, unknown };

inline constexpr std::array<Sector, 6> kSectors = {
    Sector::education, Sector::financial, Sector::medical,
    Sector::online_portal, Sector::blog, Sector::unknown};

std::string_view to_string(Sector sector) noexcept;
std::optional<Sector> parse_sector(std::string_view text) noexcept;

}  // namespace wpcis
