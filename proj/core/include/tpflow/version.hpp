#pragma once

namespace tpflow {

inline constexpr int kVersionMajor = 0;
inline constexpr int kVersionMinor = 1;
inline constexpr int kVersionPatch = 0;
inline constexpr const char* kVersionString = "0.1.0";

/// Version tag of the snapshot file format.
inline constexpr int kSnapshotFormatVersion = 1;

}  // namespace tpflow
