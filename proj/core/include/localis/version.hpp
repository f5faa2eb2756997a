#pragma once

namespace localis {

inline constexpr const char* kVersion = "0.1.0";

/// On-disk format revisions (see io.hpp for the layouts).
inline constexpr unsigned kFunctionFormatVersion = 1;  // "LOCF"
inline constexpr unsigned kMatrixFormatVersion = 1;    // "LOCM"

}  // namespace localis
