#include "wpcis/sector.hpp"

namespace wpcis {

std::string_view to_string(Sector sector) noexcept {
  switch (sector) {
    case Sector::education: return "education";
    case Sector::financial: return "financial";
    case Sector::medical: return "medical";
    case Sector::online_portal: return "online_portal";
    case Sector::blog: return "blog";
    case Sector::unknown: return "unknown";
  }
  return "unknown";
}

std::optional<Sector> parse_sector(std::string_view text) noexcept {
  for (Sector s : kSectors) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

}  // namespace wpcis
