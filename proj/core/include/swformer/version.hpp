#pragma once

namespace swformer {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace swformer
