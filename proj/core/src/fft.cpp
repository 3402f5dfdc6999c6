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

#include "envsep/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace envsep::fft {
namespace {

// FFTW plan creation is not thread-safe; execution on caller buffers via the
// new-array interface is. Plans are created once per size with
// FFTW_ESTIMATE (deterministic algorithm choice) and FFTW_UNALIGNED so they
// accept std::vector storage.
class PlanCache {
 public:
  fftw_plan forward(std::size_t n) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = forward_.find(n);
    if (it != forward_.end()) return it->second;
    std::vector<double> in(n);
    std::vector<fftw_complex> out(n / 2 + 1);
    fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                          out.data(),
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan) throw std::runtime_error("fftw: failed to plan r2c transform");
    forward_.emplace(n, plan);
    return plan;
  }

  fftw_plan inverse(std::size_t n) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = inverse_.find(n);
    if (it != inverse_.end()) return it->second;
    std::vector<fftw_complex> in(n / 2 + 1);
    std::vector<double> out(n);
    fftw_plan plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), in.data(),
                                          out.data(),
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan) throw std::runtime_error("fftw: failed to plan c2r transform");
    inverse_.emplace(n, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::size_t, fftw_plan> forward_;
  std::map<std::size_t, fftw_plan> inverse_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

std::vector<std::complex<double>> forward_real(const std::vector<double>& in) {
  const std::size_t n = in.size();
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("fft: transform length must be even and >= 2");
  std::vector<double> scratch(in);
  std::vector<std::complex<double>> out(n / 2 + 1);
  fftw_execute_dft_r2c(cache().forward(n), scratch.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<double> inverse_real(const std::vector<std::complex<double>>& in,
                                 std::size_t n) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("fft: transform length must be even and >= 2");
  if (in.size() != n / 2 + 1)
    throw std::invalid_argument("fft: one-sided input must have n/2+1 bins");
  std::vector<std::complex<double>> scratch(in);  // c2r destroys its input
  std::vector<double> out(n);
  fftw_execute_dft_c2r(cache().inverse(n),
                       reinterpret_cast<fftw_complex*>(scratch.data()),
                       out.data());
  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : out) v *= scale;
  return out;
}

}  // namespace envsep::fft
