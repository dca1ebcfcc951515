#pragma once

// Periodic pseudo-spectral core: grids, fields, Fourier multipliers,
// Littlewood-Paley projections and dyadic norms.
//
// Conventions
//   * The grid samples [-L/2, L/2) at x_j = -L/2 + j L/n.
//   * Spectra are stored in FFT order with the normalization
//       f_j = sum_m c_m exp(2 pi i m j / n),
//     so that the continuum L2 norm over one period is sqrt(L sum |c_m|^2).
//   * Mode m carries wavenumber xi_m = 2 pi s / L with s = m for m < n/2 and
//     s = m - n otherwise; the Nyquist mode (m = n/2) is xi = -pi n / L.

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bo3/errors.hpp"

namespace bo3 {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;
using Symbol = std::function<Complex(double)>;

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

/// Uniform periodic grid standing in for the real line. Owns the FFT plans
/// for size n and for the 2n padded grid used by dealiased products.
/// All member functions are const and safe to call concurrently.
class Grid {
 public:
  /// Throws PreconditionError unless n is a power of two >= 8 and length is
  /// finite and positive.
  static GridPtr make(std::size_t n, double length);

  ~Grid();
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  std::size_t size() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  double spacing() const noexcept { return length_ / static_cast<double>(n_); }
  double fundamental() const noexcept;
  /// pi n / L, the modulus of the Nyquist wavenumber.
  double max_wavenumber() const noexcept;

  double x(std::size_t j) const noexcept;
  std::vector<double> coordinates() const;

  double wavenumber(std::size_t m) const noexcept { return xi_[m]; }
  const std::vector<double>& wavenumbers() const noexcept { return xi_; }
  /// Signed integer mode index s in [-n/2, n/2).
  long mode(std::size_t m) const noexcept;
  std::size_t nyquist_index() const noexcept { return n_ / 2; }
  /// Index of the mode carrying -xi_m (the Nyquist mode maps to itself).
  std::size_t mirror(std::size_t m) const noexcept { return m == 0 ? 0 : n_ - m; }

  /// Largest dyadic band whose support reaches the grid, i.e. the largest k
  /// with 2^{k-1} < max_wavenumber().
  int top_band() const noexcept;
  bool band_resolved(int k) const noexcept { return k >= 0 && k <= top_band(); }

  Spectrum forward(std::span<const Complex> values) const;
  Spectrum forward(std::span<const double> values) const;
  std::vector<Complex> inverse(std::span<const Complex> spectrum) const;
  std::vector<double> inverse_real(std::span<const Complex> spectrum) const;

  /// Zero-pads an n-mode spectrum to 2n modes (dropping the Nyquist mode) and
  /// returns samples on the refined grid.
  void to_padded(std::span<const Complex> spectrum, std::span<Complex> fine) const;
  /// Transforms 2n fine-grid samples and truncates to the n resolved modes
  /// (Nyquist mode zeroed).
  void from_padded(std::span<const Complex> fine, std::span<Complex> spectrum) const;
  /// Unnormalized 2n-point transforms (exp(+i..) backward, exp(-i..) forward).
  void padded_backward(std::span<const Complex> in, std::span<Complex> out) const;
  void padded_forward(std::span<const Complex> in, std::span<Complex> out) const;
  /// Unnormalized n-point transforms.
  void plain_backward(std::span<const Complex> in, std::span<Complex> out) const;
  void plain_forward(std::span<const Complex> in, std::span<Complex> out) const;

 private:
  Grid(std::size_t n, double length);

  struct Plans;
  std::size_t n_;
  double length_;
  std::vector<double> xi_;
  std::unique_ptr<Plans> plans_;
};

bool same_grid(const Grid& a, const Grid& b) noexcept;

/// Real grid function. Values and spectrum are both held and are immutable
/// after construction.
class RealField {
 public:
  RealField(GridPtr grid, std::vector<double> values);
  /// Builds the real field whose spectrum is the Hermitian part of `spectrum`.
  static RealField from_spectrum(GridPtr grid, Spectrum spectrum);
  static RealField zeros(GridPtr grid);
  static RealField sample(GridPtr grid, const std::function<double(double)>& f);

  const Grid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  const Spectrum& spectrum() const noexcept { return spectrum_; }
  double operator[](std::size_t j) const noexcept { return values_[j]; }

  double mean() const noexcept { return spectrum_[0].real(); }
  double l2_norm() const noexcept;
  double sup_norm() const noexcept;

 private:
  RealField(GridPtr grid, std::vector<double> values, Spectrum spectrum);

  GridPtr grid_;
  std::vector<double> values_;
  Spectrum spectrum_;
};

/// Complex grid function (no Hermitian constraint).
class ComplexField {
 public:
  ComplexField(GridPtr grid, std::vector<Complex> values);
  explicit ComplexField(const RealField& f);
  static ComplexField from_spectrum(GridPtr grid, Spectrum spectrum);
  static ComplexField zeros(GridPtr grid);

  const Grid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const Complex> values() const noexcept { return values_; }
  const Spectrum& spectrum() const noexcept { return spectrum_; }
  Complex operator[](std::size_t j) const noexcept { return values_[j]; }

  double l2_norm() const noexcept;
  double sup_norm() const noexcept;
  RealField real() const;
  RealField imag() const;

 private:
  ComplexField(GridPtr grid, std::vector<Complex> values, Spectrum spectrum);

  GridPtr grid_;
  std::vector<Complex> values_;
  Spectrum spectrum_;
};

// Linear combinations (grids must match).
RealField operator+(const RealField& a, const RealField& b);
RealField operator-(const RealField& a, const RealField& b);
RealField operator-(const RealField& a);
RealField operator*(double s, const RealField& a);
ComplexField operator+(const ComplexField& a, const ComplexField& b);
ComplexField operator-(const ComplexField& a, const ComplexField& b);
ComplexField operator*(Complex s, const ComplexField& a);

/// Dealiased products: factors are multiplied on the 2n padded grid and the
/// result is truncated to the resolved modes.
RealField product(const RealField& a, const RealField& b);
RealField product(const RealField& a, const RealField& b, const RealField& c);
ComplexField product(const ComplexField& a, const ComplexField& b);
ComplexField product(const RealField& a, const ComplexField& b);

/// Plain pointwise product on the grid (no dealiasing); used for
/// non-polynomial factors such as unimodular gauges and coordinate weights.
ComplexField pointwise(const ComplexField& a, const ComplexField& b);
RealField pointwise(const RealField& a, std::span<const double> weight);

/// Quadrature inner product (L/n) sum a b.
double inner(const RealField& a, const RealField& b);
double integral(const RealField& a);
/// Sup norm of a - b.
double max_difference(const RealField& a, const RealField& b);
double max_difference(const ComplexField& a, const ComplexField& b);

// ---- Fourier multipliers -------------------------------------------------

/// Multiplies the spectrum by m(xi). The Nyquist mode is zeroed whenever m
/// is not real and even there. Throws PreconditionError on non-finite m.
ComplexField apply_symbol(const RealField& f, const Symbol& m);
ComplexField apply_symbol(const ComplexField& f, const Symbol& m);
/// For symbols with m(-xi) = conj(m(xi)); the output stays real.
RealField apply_real_symbol(const RealField& f, const Symbol& m);

/// Symbol -i sgn(xi); zero mode and Nyquist mode map to 0.
RealField hilbert(const RealField& f);
ComplexField hilbert(const ComplexField& f);

/// Multiplier (i xi)^order, order in [1, 4].
RealField derivative(const RealField& f, int order = 1);
ComplexField derivative(const ComplexField& f, int order = 1);

/// Relative tolerance defining "mean zero": |mean| <= kMeanTolerance * ||f||.
inline constexpr double kMeanTolerance = 1e-10;
bool is_mean_zero(const RealField& f) noexcept;
/// Throws MeanNotZeroError if the mean exceeds the tolerance.
void require_mean_zero(const RealField& f, const std::string& where);

/// Multiplier 1/(i xi) with the zero mode set to 0. Requires a mean-zero
/// input (MeanNotZeroError otherwise).
RealField antiderivative(const RealField& f);
/// Same multiplier without the mean check; the zero mode is discarded.
RealField antiderivative_unchecked(const RealField& f);

/// |D|^s with the zero mode annihilated.
RealField abs_derivative_power(const RealField& f, double s);

// ---- Littlewood-Paley ----------------------------------------------------

enum class Half { both, plus, minus };

struct DyadicBand {
  int k = 0;
  Half half = Half::both;
};

/// Smooth even bump: 1 on [-1, 1], 0 outside [-2, 2], with the C-infinity
/// transition e(2-|x|) / (e(2-|x|) + e(|x|-1)), e(s) = exp(-1/s) for s > 0.
double partition_bump(double xi) noexcept;
/// Symbol of P_k: psi(xi) for k = 0, psi(xi/2^k) - psi(xi/2^{k-1}) otherwise.
/// Negative k gives the homogeneous blocks psi(xi/2^k) - psi(xi/2^{k-1}).
double band_symbol(int k, double xi) noexcept;
/// Symbol of P_{<k} = P_{<=k-1} (zero for k <= 0).
double below_symbol(int k, double xi) noexcept;
double half_symbol(Half half, double xi) noexcept;

RealField project_band(const RealField& f, int k);
ComplexField project_band(const RealField& f, DyadicBand band);
ComplexField project_band(const ComplexField& f, DyadicBand band);
/// P_{<k}.
RealField project_below(const RealField& f, int k);
/// 1 - P_{<k}.
RealField project_at_or_above(const RealField& f, int k);
/// Bands strictly between lo and hi: symbol psi(xi/2^{hi-1}) - psi(xi/2^lo).
/// project_range(f, 0, k) keeps the frequencies of P_{<k} outside P_0.
RealField project_range(const RealField& f, int lo, int hi);

double sobolev_norm(const RealField& f, double s, bool homogeneous);
/// sup_k 2^{sk} ||P_k f||_{L2} over the resolved inhomogeneous bands.
double besov_norm(const RealField& f, double s);
/// Homogeneous version: sup over all integer k whose band meets the grid's
/// nonzero frequencies.
double homogeneous_besov_norm(const RealField& f, double s);

/// ||P_k f||_{L2} for k = 0 .. top_band().
std::vector<double> band_norms(const RealField& f);

struct FrequencyEnvelope {
  double delta = 0.0;
  std::vector<double> c;

  bool slowly_varying(double rel_tol = 1e-12) const;
  bool majorizes(const RealField& f, double rel_tol = 1e-12) const;
};

/// Minimal slowly varying majorant c_k = max_j 2^{-delta |j-k|} ||P_j f||.
/// Requires delta in (0, 1/2].
FrequencyEnvelope envelope(const RealField& f, double delta);

// ---- Snapshot files ------------------------------------------------------

struct Snapshot {
  RealField field;
  double time;
};

/// Header "n L time", then n lines "x value", all in round-trip precision.
void write_snapshot(const std::string& path, const RealField& f, double time);
Snapshot read_snapshot(const std::string& path);

}  // namespace bo3
