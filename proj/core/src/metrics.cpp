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

#include "envsep/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "envsep/fft.hpp"

namespace envsep::metrics {
namespace {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

double db_ratio(double num, double den) {
  if (den <= 0.0) return kDbCap;
  if (num <= 0.0) return -kDbCap;
  return std::clamp(20.0 * std::log10(num / den), -kDbCap, kDbCap);
}

// Projection workspace shared across estimates and targets: the references,
// the Gram matrix of their 0..L-1 sample delays on the zero-padded support
// of length n + L - 1, and its factorization. The Gram is block-Toeplitz and
// is built from FFT cross-correlations, which are exact inner products on
// the padded support.
class Projector {
 public:
  Projector(const std::vector<AudioSignal>& references, int filter_length)
      : taps_(filter_length) {
    if (references.empty())
      throw std::invalid_argument("metrics: no references");
    n_ = references[0].samples.size();
    if (n_ < static_cast<std::size_t>(taps_) || taps_ < 1)
      throw std::invalid_argument(
          "metrics: signals must be at least filter_length samples long");
    for (const auto& ref : references) {
      if (ref.samples.size() != n_)
        throw std::invalid_argument("metrics: signal lengths differ");
      double energy = 0.0;
      for (double v : ref.samples) energy += v * v;
      if (energy <= 0.0)
        throw std::invalid_argument("metrics: all-zero reference");
    }

    num_refs_ = static_cast<int>(references.size());
    padded_len_ = n_ + static_cast<std::size_t>(taps_) - 1;
    fft_len_ = next_pow2(padded_len_);

    refs_.resize(static_cast<std::size_t>(num_refs_));
    ref_spectra_.resize(static_cast<std::size_t>(num_refs_));
    for (int j = 0; j < num_refs_; ++j) {
      refs_[static_cast<std::size_t>(j)] =
          Eigen::Map<const Eigen::VectorXd>(references[j].samples.data(),
                                            static_cast<Eigen::Index>(n_));
      std::vector<double> buf(fft_len_, 0.0);
      std::copy(references[j].samples.begin(), references[j].samples.end(),
                buf.begin());
      ref_spectra_[static_cast<std::size_t>(j)] = fft::forward_real(buf);
    }

    build_gram();
  }

  int num_refs() const { return num_refs_; }
  std::size_t padded_len() const { return padded_len_; }

  /// Projection of the estimate onto the delay span of one reference and of
  /// all references, both on the padded support.
  struct Projections {
    Eigen::VectorXd onto_target;
    Eigen::VectorXd onto_all;
  };

  Projections project(const AudioSignal& estimate, int target) const {
    if (estimate.samples.size() != n_)
      throw std::invalid_argument("metrics: signal lengths differ");
    if (target < 0 || target >= num_refs_)
      throw std::invalid_argument("metrics: target index out of range");

    // rhs[(j, tau)] = <estimate, delay_tau(ref_j)> via FFT cross-correlation.
    std::vector<double> buf(fft_len_, 0.0);
    std::copy(estimate.samples.begin(), estimate.samples.end(), buf.begin());
    const auto est_spec = fft::forward_real(buf);

    Eigen::VectorXd rhs(static_cast<Eigen::Index>(num_refs_) * taps_);
    for (int j = 0; j < num_refs_; ++j) {
      const auto corr = correlate(est_spec, ref_spectra_[static_cast<std::size_t>(j)]);
      for (int tau = 0; tau < taps_; ++tau)
        rhs(j * taps_ + tau) = corr[static_cast<std::size_t>(tau)];
    }

    Projections p;
    const Eigen::VectorXd coeff_all = solve_all(rhs);
    p.onto_all = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(padded_len_));
    for (int j = 0; j < num_refs_; ++j)
      accumulate_filtered(p.onto_all, j, coeff_all.segment(j * taps_, taps_));

    const Eigen::VectorXd coeff_target =
        solve_block(target, rhs.segment(target * taps_, taps_));
    p.onto_target = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(padded_len_));
    accumulate_filtered(p.onto_target, target, coeff_target);
    return p;
  }

 private:
  // corr[d] = sum_m a[m] * b[m - d] for d = 0..taps-1 (b delayed).
  std::vector<double> correlate(
      const std::vector<std::complex<double>>& a_spec,
      const std::vector<std::complex<double>>& b_spec) const {
    std::vector<std::complex<double>> prod(a_spec.size());
    for (std::size_t i = 0; i < a_spec.size(); ++i)
      prod[i] = a_spec[i] * std::conj(b_spec[i]);
    return fft::inverse_real(prod, fft_len_);
  }

  void build_gram() {
    const Eigen::Index dim = static_cast<Eigen::Index>(num_refs_) * taps_;
    gram_.resize(dim, dim);
    for (int i = 0; i < num_refs_; ++i) {
      for (int j = 0; j < num_refs_; ++j) {
        // G[(i,tau),(j,tau')] = <delay_tau ref_i, delay_tau' ref_j>
        //                     = c_ij(tau' - tau) with
        // c_ij(d) = sum_m ref_i[m] ref_j[m - d]; negative d wraps to the
        // tail of the circular correlation (fft_len >= n + taps - 1 keeps
        // positive and negative lags from aliasing).
        const auto corr = correlate(ref_spectra_[static_cast<std::size_t>(i)],
                                    ref_spectra_[static_cast<std::size_t>(j)]);
        for (int tau = 0; tau < taps_; ++tau)
          for (int tau2 = 0; tau2 < taps_; ++tau2) {
            const int d = tau2 - tau;
            const double value =
                d >= 0 ? corr[static_cast<std::size_t>(d)]
                       : corr[fft_len_ - static_cast<std::size_t>(-d)];
            gram_(i * taps_ + tau, j * taps_ + tau2) = value;
          }
      }
    }
    full_ = factor(gram_);
    blocks_.clear();
    for (int j = 0; j < num_refs_; ++j)
      blocks_.push_back(factor(gram_.block(j * taps_, j * taps_, taps_, taps_)));
  }

  // LDLT with a ridge retry when the Gram is rank-deficient.
  static Eigen::LDLT<Eigen::MatrixXd> factor(const Eigen::MatrixXd& g) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(g);
    const Eigen::VectorXd d = ldlt.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    if (ldlt.info() == Eigen::Success && d.minCoeff() > 1e-12 * dmax)
      return ldlt;
    const double lambda = 1e-9 * g.trace();
    Eigen::MatrixXd ridged = g;
    ridged.diagonal().array() += lambda;
    return Eigen::LDLT<Eigen::MatrixXd>(ridged);
  }

  Eigen::VectorXd solve_all(const Eigen::VectorXd& rhs) const {
    return full_.solve(rhs);
  }
  Eigen::VectorXd solve_block(int j, const Eigen::VectorXd& rhs) const {
    return blocks_[static_cast<std::size_t>(j)].solve(rhs);
  }

  // out += sum_tau coeff[tau] * delay_tau(ref_j) on the padded support.
  void accumulate_filtered(Eigen::VectorXd& out, int j,
                           const Eigen::VectorXd& coeff) const {
    const Eigen::VectorXd& ref = refs_[static_cast<std::size_t>(j)];
    for (int tau = 0; tau < taps_; ++tau) {
      const double c = coeff(tau);
      if (c == 0.0) continue;
      out.segment(tau, static_cast<Eigen::Index>(n_)) += c * ref;
    }
  }

  int taps_;
  int num_refs_ = 0;
  std::size_t n_ = 0;
  std::size_t padded_len_ = 0;
  std::size_t fft_len_ = 0;
  std::vector<Eigen::VectorXd> refs_;
  std::vector<std::vector<std::complex<double>>> ref_spectra_;
  Eigen::MatrixXd gram_;
  Eigen::LDLT<Eigen::MatrixXd> full_;
  std::vector<Eigen::LDLT<Eigen::MatrixXd>> blocks_;
};

BssDecomposition decompose_with(const Projector& projector,
                                const AudioSignal& estimate, int target) {
  const auto p = projector.project(estimate, target);
  Eigen::VectorXd padded =
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(projector.padded_len()));
  padded.head(static_cast<Eigen::Index>(estimate.samples.size())) =
      Eigen::Map<const Eigen::VectorXd>(
          estimate.samples.data(),
          static_cast<Eigen::Index>(estimate.samples.size()));

  BssDecomposition d;
  d.s_target = p.onto_target;
  d.e_interf = p.onto_all - p.onto_target;
  d.e_artif = padded - p.onto_all;
  return d;
}

SourceMetrics metrics_of(const BssDecomposition& d) {
  return {sdr(d), sir(d), sar(d)};
}

}  // namespace

BssDecomposition decompose(const AudioSignal& estimate,
                           const std::vector<AudioSignal>& references,
                           int target_index, int filter_length) {
  Projector projector(references, filter_length);
  return decompose_with(projector, estimate, target_index);
}

double sdr(const BssDecomposition& d) {
  return db_ratio(d.s_target.norm(), (d.e_interf + d.e_artif).norm());
}

double sir(const BssDecomposition& d) {
  return db_ratio(d.s_target.norm(), d.e_interf.norm());
}

double sar(const BssDecomposition& d) {
  return db_ratio((d.s_target + d.e_interf).norm(), d.e_artif.norm());
}

MetricsReport evaluate_permuted(const std::vector<AudioSignal>& estimates,
                                const std::vector<AudioSignal>& references,
                                int filter_length) {
  if (estimates.size() != references.size())
    throw std::invalid_argument("metrics: estimate/reference count mismatch");
  const int count = static_cast<int>(estimates.size());
  Projector projector(references, filter_length);

  // Metrics for every (estimate, target) pair, then the assignment with the
  // best mean SDR.
  std::vector<std::vector<SourceMetrics>> table(
      static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    for (int j = 0; j < count; ++j)
      table[static_cast<std::size_t>(i)].push_back(
          metrics_of(decompose_with(projector, estimates[static_cast<std::size_t>(i)], j)));

  std::vector<int> perm(static_cast<std::size_t>(count));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_mean = -1e300;
  do {
    double mean = 0.0;
    for (int i = 0; i < count; ++i)
      mean += table[static_cast<std::size_t>(i)]
                   [static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])].sdr;
    mean /= count;
    if (mean > best_mean) {
      best_mean = mean;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  MetricsReport report;
  report.permutation = best;
  for (int i = 0; i < count; ++i)
    report.per_source.push_back(
        table[static_cast<std::size_t>(i)]
             [static_cast<std::size_t>(best[static_cast<std::size_t>(i)])]);
  return report;
}

void write_csv(std::ostream& out, const MetricsReport& report) {
  out << "source_id,permuted_ref,SDR,SIR,SAR\n";
  char line[128];
  for (std::size_t i = 0; i < report.per_source.size(); ++i) {
    const SourceMetrics& m = report.per_source[i];
    std::snprintf(line, sizeof(line), "%zu,%d,%.6f,%.6f,%.6f\n", i,
                  report.permutation[i], m.sdr, m.sir, m.sar);
    out << line;
  }
}

}  // namespace envsep::metrics
