#pragma once

#include <complex>
#include <cstddef>

namespace noperr::fft {

// Unnormalized multichannel transform on an N^d grid. Data is interleaved:
// channel c of point p sits at p*howmany + c. sign = -1 forward, +1 backward.
// in and out must not alias. Plans are cached and shared across threads.
void transform(int dim, std::size_t n, std::size_t howmany, int sign,
               const std::complex<double>* in, std::complex<double>* out);

}  // namespace noperr::fft
