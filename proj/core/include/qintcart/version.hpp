#pragma once

#include <string_view>

namespace qintcart {

inline constexpr std::string_view kEngineVersion = "qintcart 0.1.0";
inline constexpr std::string_view kSchema = "qintcart/1";

} // namespace qintcart
