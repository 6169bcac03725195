#pragma once

namespace semiscat {

inline constexpr const char* kVersion = "0.1.0";

} // namespace semiscat
