#pragma once

#include <cstdint>

namespace alid::mem {

// Heap high-water tracking backed by global operator new/delete overrides
// (see src/memtrack.cpp). Used by the benchmark to report peak memory.
std::uint64_t current_bytes();
std::uint64_t peak_bytes();
void reset_peak();

} // namespace alid::mem
