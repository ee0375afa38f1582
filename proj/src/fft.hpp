#pragma once

#include <span>

#include "h1diff/spectral_field.hpp"

namespace h1diff::detail {

// Unnormalised in-place complex transforms over a full grid (FFT ordering).
// Plans are created once per (dim, n, direction) under a lock; execution is
// re-entrant.
void fft_forward(const Grid& grid, std::span<Complex> data);
void fft_inverse(const Grid& grid, std::span<Complex> data);

}  // namespace h1diff::detail
