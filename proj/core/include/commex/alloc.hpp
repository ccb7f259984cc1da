#pragma once

namespace commex {

/// Keeps freed heap memory mapped so that the per-epoch Eigen temporaries do
/// not page-fault on every allocation. Process-wide; call once from main().
/// No-op outside glibc.
void tune_allocator();

}  // namespace commex
