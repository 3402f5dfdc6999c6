// Copyright 2026 The envsep authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ENVSEP_FFT_HPP
#define ENVSEP_FFT_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace envsep::fft {

// Real transforms with one-sided spectra of length n/2 + 1.
// forward_real is the plain unnormalized DFT; inverse_real includes the 1/n
// factor, so inverse_real(forward_real(x)) == x up to rounding.
// Both are safe to call concurrently; plans are cached per size behind a
// mutex and executed on caller-owned buffers.

/// in.size() == n (n >= 2, even); returns n/2 + 1 bins.
std::vector<std::complex<double>> forward_real(const std::vector<double>& in);

/// in.size() == n/2 + 1 for the given even n; returns n real samples.
/// The input is treated as the one-sided half of a Hermitian spectrum.
std::vector<double> inverse_real(const std::vector<std::complex<double>>& in,
                                 std::size_t n);

}  // namespace envsep::fft

#endif  // ENVSEP_FFT_HPP
