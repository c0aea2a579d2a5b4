#pragma once

#include <cstdint>

namespace cwl {

using i64 = std::int64_t;
using u64 = std::uint64_t;

} // namespace cwl
