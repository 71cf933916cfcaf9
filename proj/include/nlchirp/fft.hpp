#pragma once

#include <vector>

#include "nlchirp/waveform.hpp"

namespace nlchirp {

/// Forward DFT (unnormalized, e^{-j2pi kn/N} kernel) backed by FFTW.
/// Plans are cached per size behind a mutex; execution is reentrant.
std::vector<cplx> fft_forward(const std::vector<cplx>& input);

} // namespace nlchirp
