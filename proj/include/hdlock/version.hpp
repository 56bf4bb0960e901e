#pragma once

namespace hdlock {

inline constexpr const char* kVersion = "1.0.0";
// Bumped whenever a JSON report layout changes.
inline constexpr int kSchemaVersion = 1;

}  // namespace hdlock
