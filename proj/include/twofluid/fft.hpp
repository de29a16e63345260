// Thin RAII wrapper around FFTW complex-to-complex transforms.
//
// Spectral arrays hold Fourier coefficients: f(x) = sum_m fhat_m e^{i k.x}
// with k = m/L, so the forward transform divides by the grid size and the
// backward transform is unnormalized.
#pragma once

#include <fftw3.h>

#include <complex>
#include <cstring>
#include <vector>

#include "twofluid/grid.hpp"

namespace twofluid {

class SpectralTransform {
 public:
  explicit SpectralTransform(const PeriodicGrid& g) : grid_(g), size_(g.size()) {
    in_ = fftw_alloc_complex(size_);
    out_ = fftw_alloc_complex(size_);
    const unsigned flags = (g.n >= 256) ? FFTW_MEASURE : FFTW_ESTIMATE;
    if (g.dim == 2) {
      fwd_ = fftw_plan_dft_2d(g.n, g.n, in_, out_, FFTW_FORWARD, flags);
      bwd_ = fftw_plan_dft_2d(g.n, g.n, in_, out_, FFTW_BACKWARD, flags);
    } else {
      fwd_ = fftw_plan_dft_3d(g.n, g.n, g.n, in_, out_, FFTW_FORWARD, flags);
      bwd_ = fftw_plan_dft_3d(g.n, g.n, g.n, in_, out_, FFTW_BACKWARD, flags);
    }
  }

  SpectralTransform(const SpectralTransform&) = delete;
  SpectralTransform& operator=(const SpectralTransform&) = delete;

  ~SpectralTransform() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(in_);
    fftw_free(out_);
  }

  const PeriodicGrid& grid() const { return grid_; }

  void forward(const std::complex<double>* in, std::complex<double>* out) const {
    std::memcpy(in_, in, size_ * sizeof(fftw_complex));
    fftw_execute(fwd_);
    const double scale = 1.0 / static_cast<double>(size_);
    const auto* src = reinterpret_cast<const std::complex<double>*>(out_);
    for (std::size_t i = 0; i < size_; ++i) out[i] = src[i] * scale;
  }

  void backward(const std::complex<double>* in, std::complex<double>* out) const {
    std::memcpy(in_, in, size_ * sizeof(fftw_complex));
    fftw_execute(bwd_);
    std::memcpy(out, out_, size_ * sizeof(fftw_complex));
  }

  // Real field -> coefficients.
  void to_spectral(const std::vector<double>& phys,
                   std::vector<std::complex<double>>& spec) const {
    scratch_.resize(size_);
    for (std::size_t i = 0; i < size_; ++i) scratch_[i] = phys[i];
    spec.resize(size_);
    forward(scratch_.data(), spec.data());
  }

  // Coefficients -> real field; returns the largest dropped imaginary part.
  double to_physical(const std::vector<std::complex<double>>& spec,
                     std::vector<double>& phys) const {
    scratch_.resize(size_);
    backward(spec.data(), scratch_.data());
    phys.resize(size_);
    double max_imag = 0.0;
    for (std::size_t i = 0; i < size_; ++i) {
      phys[i] = scratch_[i].real();
      max_imag = std::max(max_imag, std::abs(scratch_[i].imag()));
    }
    return max_imag;
  }

 private:
  PeriodicGrid grid_;
  std::size_t size_;
  fftw_complex* in_;
  fftw_complex* out_;
  fftw_plan fwd_;
  fftw_plan bwd_;
  mutable std::vector<std::complex<double>> scratch_;
};

}  // namespace twofluid
