#pragma once

namespace rotorsim {

inline constexpr const char* version_string = "1.0.0";
inline constexpr const char* result_schema = "rotorsim-result-v1";
inline constexpr const char* scenario_schema = "rotorsim-scenario-v1";

}  // namespace rotorsim
