#pragma once

namespace macjscc {

inline constexpr const char* kLibraryVersion = "0.1.0";

}  // namespace macjscc
