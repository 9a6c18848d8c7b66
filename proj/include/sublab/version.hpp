#pragma once

namespace sublab {

inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

}  // namespace sublab
