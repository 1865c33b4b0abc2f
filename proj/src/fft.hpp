#pragma once

#include <span>

#include "sts/core.hpp"

namespace sts::detail {

enum class FftSign { negative, positive };

// In-place unnormalized DFT: out_j = sum_k in_k exp(sign * 2 pi i j k / n).
// Backed by FFTW; plans are cached per (n, sign) and safe to share across threads.
void fft_inplace(std::span<cplx> data, FftSign sign);

}  // namespace sts::detail
