#include "bo3/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>

namespace bo3 {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }
fftw_complex* as_fftw(const Complex* p) {
  return reinterpret_cast<fftw_complex*>(const_cast<Complex*>(p));
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void require_same(const Grid& a, const Grid& b, const char* where) {
  if (!same_grid(a, b)) throw PreconditionError(std::string(where) + ": fields live on different grids");
}

double smooth_step_half(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

}  // namespace

struct Grid::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  fftw_plan fwd2 = nullptr;
  fftw_plan bwd2 = nullptr;
  // SIMD variants, usable when both arrays are SIMD-aligned.
  fftw_plan afwd = nullptr;
  fftw_plan abwd = nullptr;
  fftw_plan afwd2 = nullptr;
  fftw_plan abwd2 = nullptr;

  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    for (fftw_plan p : {fwd, bwd, fwd2, bwd2, afwd, abwd, afwd2, abwd2})
      if (p) fftw_destroy_plan(p);
  }
};

namespace {

void run(fftw_plan unaligned, fftw_plan aligned, const Complex* in, Complex* out) {
  fftw_complex* i = as_fftw(in);
  fftw_complex* o = as_fftw(out);
  const bool simd = fftw_alignment_of(reinterpret_cast<double*>(i)) == 0 &&
                    fftw_alignment_of(reinterpret_cast<double*>(o)) == 0;
  fftw_execute_dft(simd ? aligned : unaligned, i, o);
}

}  // namespace

Grid::Grid(std::size_t n, double length) : n_(n), length_(length), xi_(n), plans_(std::make_unique<Plans>()) {
  const double k0 = 2.0 * std::numbers::pi / length;
  for (std::size_t m = 0; m < n; ++m) xi_[m] = k0 * static_cast<double>(mode(m));

  std::vector<Complex> a(2 * n), b(2 * n);
  const int ni = static_cast<int>(n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard<std::mutex> lock(planner_mutex());
  plans_->fwd = fftw_plan_dft_1d(ni, as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD, flags);
  plans_->bwd = fftw_plan_dft_1d(ni, as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD, flags);
  plans_->fwd2 = fftw_plan_dft_1d(2 * ni, as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD, flags);
  plans_->bwd2 = fftw_plan_dft_1d(2 * ni, as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD, flags);

  auto* fa = fftw_alloc_complex(2 * n);
  auto* fb = fftw_alloc_complex(2 * n);
  plans_->afwd = fftw_plan_dft_1d(ni, fa, fb, FFTW_FORWARD, FFTW_ESTIMATE);
  plans_->abwd = fftw_plan_dft_1d(ni, fa, fb, FFTW_BACKWARD, FFTW_ESTIMATE);
  plans_->afwd2 = fftw_plan_dft_1d(2 * ni, fa, fb, FFTW_FORWARD, FFTW_ESTIMATE);
  plans_->abwd2 = fftw_plan_dft_1d(2 * ni, fa, fb, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_free(fa);
  fftw_free(fb);
}

Grid::~Grid() = default;

GridPtr Grid::make(std::size_t n, double length) {
  if (n < 8 || !is_power_of_two(n))
    throw PreconditionError("grid size must be a power of two >= 8, got " + std::to_string(n));
  if (!std::isfinite(length) || length <= 0.0)
    throw PreconditionError("grid length must be finite and positive");
  return GridPtr(new Grid(n, length));
}

double Grid::fundamental() const noexcept { return 2.0 * std::numbers::pi / length_; }

double Grid::max_wavenumber() const noexcept {
  return std::numbers::pi * static_cast<double>(n_) / length_;
}

double Grid::x(std::size_t j) const noexcept {
  return -0.5 * length_ + static_cast<double>(j) * spacing();
}

std::vector<double> Grid::coordinates() const {
  std::vector<double> out(n_);
  for (std::size_t j = 0; j < n_; ++j) out[j] = x(j);
  return out;
}

long Grid::mode(std::size_t m) const noexcept {
  const long mm = static_cast<long>(m);
  const long nn = static_cast<long>(n_);
  return mm < nn / 2 ? mm : mm - nn;
}

int Grid::top_band() const noexcept {
  const double xmax = max_wavenumber();
  int k = 0;
  while (std::ldexp(1.0, k) < xmax) ++k;
  return k;
}

Spectrum Grid::forward(std::span<const Complex> values) const {
  if (values.size() != n_) throw PreconditionError("forward: size mismatch");
  Spectrum out(n_);
  run(plans_->fwd, plans_->afwd, values.data(), out.data());
  const double s = 1.0 / static_cast<double>(n_);
  for (auto& c : out) c *= s;
  return out;
}

Spectrum Grid::forward(std::span<const double> values) const {
  std::vector<Complex> tmp(values.begin(), values.end());
  return forward(std::span<const Complex>(tmp));
}

std::vector<Complex> Grid::inverse(std::span<const Complex> spectrum) const {
  if (spectrum.size() != n_) throw PreconditionError("inverse: size mismatch");
  std::vector<Complex> out(n_);
  run(plans_->bwd, plans_->abwd, spectrum.data(), out.data());
  return out;
}

std::vector<double> Grid::inverse_real(std::span<const Complex> spectrum) const {
  const auto z = inverse(spectrum);
  std::vector<double> out(n_);
  for (std::size_t j = 0; j < n_; ++j) out[j] = z[j].real();
  return out;
}

void Grid::to_padded(std::span<const Complex> spectrum, std::span<Complex> fine) const {
  const std::size_t n = n_, h = n_ / 2;
  std::vector<Complex> wide(2 * n, Complex{});
  for (std::size_t m = 0; m < h; ++m) wide[m] = spectrum[m];
  for (std::size_t m = h + 1; m < n; ++m) wide[m + n] = spectrum[m];
  run(plans_->bwd2, plans_->abwd2, wide.data(), fine.data());
}

void Grid::from_padded(std::span<const Complex> fine, std::span<Complex> spectrum) const {
  const std::size_t n = n_, h = n_ / 2;
  std::vector<Complex> wide(2 * n);
  run(plans_->fwd2, plans_->afwd2, fine.data(), wide.data());
  const double s = 1.0 / static_cast<double>(2 * n);
  for (std::size_t m = 0; m < h; ++m) spectrum[m] = wide[m] * s;
  spectrum[h] = Complex{};
  for (std::size_t m = h + 1; m < n; ++m) spectrum[m] = wide[m + n] * s;
}

void Grid::padded_backward(std::span<const Complex> in, std::span<Complex> out) const {
  run(plans_->bwd2, plans_->abwd2, in.data(), out.data());
}

void Grid::padded_forward(std::span<const Complex> in, std::span<Complex> out) const {
  run(plans_->fwd2, plans_->afwd2, in.data(), out.data());
}

void Grid::plain_backward(std::span<const Complex> in, std::span<Complex> out) const {
  run(plans_->bwd, plans_->abwd, in.data(), out.data());
}

void Grid::plain_forward(std::span<const Complex> in, std::span<Complex> out) const {
  run(plans_->fwd, plans_->afwd, in.data(), out.data());
}

bool same_grid(const Grid& a, const Grid& b) noexcept {
  return &a == &b || (a.size() == b.size() && a.length() == b.length());
}

// ---- fields ----------------------------------------------------------------

RealField::RealField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw PreconditionError("RealField: null grid");
  if (values_.size() != grid_->size()) throw PreconditionError("RealField: value count does not match grid");
  spectrum_ = grid_->forward(std::span<const double>(values_));
}

RealField::RealField(GridPtr grid, std::vector<double> values, Spectrum spectrum)
    : grid_(std::move(grid)), values_(std::move(values)), spectrum_(std::move(spectrum)) {}

RealField RealField::from_spectrum(GridPtr grid, Spectrum c) {
  if (!grid) throw PreconditionError("RealField: null grid");
  const std::size_t n = grid->size();
  if (c.size() != n) throw PreconditionError("RealField: spectrum size does not match grid");
  c[0] = Complex(c[0].real(), 0.0);
  c[n / 2] = Complex(c[n / 2].real(), 0.0);
  for (std::size_t m = 1; m < n / 2; ++m) {
    const Complex a = 0.5 * (c[m] + std::conj(c[n - m]));
    c[m] = a;
    c[n - m] = std::conj(a);
  }
  auto values = grid->inverse_real(c);
  return RealField(std::move(grid), std::move(values), std::move(c));
}

RealField RealField::zeros(GridPtr grid) {
  const std::size_t n = grid->size();
  return RealField(std::move(grid), std::vector<double>(n, 0.0), Spectrum(n));
}

RealField RealField::sample(GridPtr grid, const std::function<double(double)>& f) {
  std::vector<double> v(grid->size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(grid->x(j));
  return RealField(std::move(grid), std::move(v));
}

double RealField::l2_norm() const noexcept {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s * grid_->spacing());
}

double RealField::sup_norm() const noexcept {
  double s = 0.0;
  for (double v : values_) s = std::max(s, std::abs(v));
  return s;
}

ComplexField::ComplexField(GridPtr grid, std::vector<Complex> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw PreconditionError("ComplexField: null grid");
  if (values_.size() != grid_->size()) throw PreconditionError("ComplexField: value count does not match grid");
  spectrum_ = grid_->forward(std::span<const Complex>(values_));
}

ComplexField::ComplexField(const RealField& f)
    : grid_(f.grid_ptr()), values_(f.values().begin(), f.values().end()), spectrum_(f.spectrum()) {}

ComplexField::ComplexField(GridPtr grid, std::vector<Complex> values, Spectrum spectrum)
    : grid_(std::move(grid)), values_(std::move(values)), spectrum_(std::move(spectrum)) {}

ComplexField ComplexField::from_spectrum(GridPtr grid, Spectrum c) {
  if (!grid) throw PreconditionError("ComplexField: null grid");
  if (c.size() != grid->size()) throw PreconditionError("ComplexField: spectrum size does not match grid");
  auto values = grid->inverse(c);
  return ComplexField(std::move(grid), std::move(values), std::move(c));
}

ComplexField ComplexField::zeros(GridPtr grid) {
  const std::size_t n = grid->size();
  return ComplexField(std::move(grid), std::vector<Complex>(n), Spectrum(n));
}

double ComplexField::l2_norm() const noexcept {
  double s = 0.0;
  for (const Complex& v : values_) s += std::norm(v);
  return std::sqrt(s * grid_->spacing());
}

double ComplexField::sup_norm() const noexcept {
  double s = 0.0;
  for (const Complex& v : values_) s = std::max(s, std::abs(v));
  return s;
}

RealField ComplexField::real() const {
  std::vector<double> v(values_.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = values_[j].real();
  return RealField(grid_, std::move(v));
}

RealField ComplexField::imag() const {
  std::vector<double> v(values_.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = values_[j].imag();
  return RealField(grid_, std::move(v));
}

// ---- arithmetic ------------------------------------------------------------

namespace {

template <class F>
RealField combine(const RealField& a, const RealField& b, F op) {
  require_same(a.grid(), b.grid(), "field arithmetic");
  Spectrum c(a.size());
  for (std::size_t m = 0; m < c.size(); ++m) c[m] = op(a.spectrum()[m], b.spectrum()[m]);
  return RealField::from_spectrum(a.grid_ptr(), std::move(c));
}

template <class F>
ComplexField combine(const ComplexField& a, const ComplexField& b, F op) {
  require_same(a.grid(), b.grid(), "field arithmetic");
  Spectrum c(a.size());
  for (std::size_t m = 0; m < c.size(); ++m) c[m] = op(a.spectrum()[m], b.spectrum()[m]);
  return ComplexField::from_spectrum(a.grid_ptr(), std::move(c));
}

}  // namespace

RealField operator+(const RealField& a, const RealField& b) {
  return combine(a, b, [](Complex x, Complex y) { return x + y; });
}
RealField operator-(const RealField& a, const RealField& b) {
  return combine(a, b, [](Complex x, Complex y) { return x - y; });
}
RealField operator-(const RealField& a) { return -1.0 * a; }
RealField operator*(double s, const RealField& a) {
  Spectrum c = a.spectrum();
  for (auto& z : c) z *= s;
  return RealField::from_spectrum(a.grid_ptr(), std::move(c));
}
ComplexField operator+(const ComplexField& a, const ComplexField& b) {
  return combine(a, b, [](Complex x, Complex y) { return x + y; });
}
ComplexField operator-(const ComplexField& a, const ComplexField& b) {
  return combine(a, b, [](Complex x, Complex y) { return x - y; });
}
ComplexField operator*(Complex s, const ComplexField& a) {
  Spectrum c = a.spectrum();
  for (auto& z : c) z *= s;
  return ComplexField::from_spectrum(a.grid_ptr(), std::move(c));
}

namespace {

Spectrum padded_product(const Grid& g, std::initializer_list<const Spectrum*> factors) {
  const std::size_t nf = 2 * g.size();
  std::vector<Complex> acc(nf, Complex(1.0)), tmp(nf);
  for (const Spectrum* f : factors) {
    g.to_padded(*f, tmp);
    for (std::size_t j = 0; j < nf; ++j) acc[j] *= tmp[j];
  }
  Spectrum out(g.size());
  g.from_padded(acc, out);
  return out;
}

}  // namespace

RealField product(const RealField& a, const RealField& b) {
  require_same(a.grid(), b.grid(), "product");
  return RealField::from_spectrum(a.grid_ptr(), padded_product(a.grid(), {&a.spectrum(), &b.spectrum()}));
}

RealField product(const RealField& a, const RealField& b, const RealField& c) {
  require_same(a.grid(), b.grid(), "product");
  require_same(a.grid(), c.grid(), "product");
  return RealField::from_spectrum(a.grid_ptr(),
                                  padded_product(a.grid(), {&a.spectrum(), &b.spectrum(), &c.spectrum()}));
}

ComplexField product(const ComplexField& a, const ComplexField& b) {
  require_same(a.grid(), b.grid(), "product");
  return ComplexField::from_spectrum(a.grid_ptr(), padded_product(a.grid(), {&a.spectrum(), &b.spectrum()}));
}

ComplexField product(const RealField& a, const ComplexField& b) {
  require_same(a.grid(), b.grid(), "product");
  return ComplexField::from_spectrum(a.grid_ptr(), padded_product(a.grid(), {&a.spectrum(), &b.spectrum()}));
}

ComplexField pointwise(const ComplexField& a, const ComplexField& b) {
  require_same(a.grid(), b.grid(), "pointwise");
  std::vector<Complex> v(a.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = a[j] * b[j];
  return ComplexField(a.grid_ptr(), std::move(v));
}

RealField pointwise(const RealField& a, std::span<const double> weight) {
  if (weight.size() != a.size()) throw PreconditionError("pointwise: weight size mismatch");
  std::vector<double> v(a.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = a[j] * weight[j];
  return RealField(a.grid_ptr(), std::move(v));
}

double inner(const RealField& a, const RealField& b) {
  require_same(a.grid(), b.grid(), "inner");
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s * a.grid().spacing();
}

double integral(const RealField& a) { return a.mean() * a.grid().length(); }

double max_difference(const RealField& a, const RealField& b) {
  require_same(a.grid(), b.grid(), "max_difference");
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s = std::max(s, std::abs(a[j] - b[j]));
  return s;
}

double max_difference(const ComplexField& a, const ComplexField& b) {
  require_same(a.grid(), b.grid(), "max_difference");
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s = std::max(s, std::abs(a[j] - b[j]));
  return s;
}

// ---- multipliers -----------------------------------------------------------

namespace {

Spectrum multiply(const Grid& g, const Spectrum& c, const Symbol& m) {
  const std::size_t n = g.size();
  Spectrum out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Complex s = m(g.wavenumber(i));
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
      throw PreconditionError("apply_symbol: symbol is not finite at xi = " + std::to_string(g.wavenumber(i)));
    out[i] = s * c[i];
  }
  const std::size_t h = g.nyquist_index();
  const Complex at = m(g.wavenumber(h));
  const Complex mirrored = m(-g.wavenumber(h));
  if (at.imag() != 0.0 || mirrored != at) out[h] = Complex{};
  return out;
}

}  // namespace

ComplexField apply_symbol(const RealField& f, const Symbol& m) {
  return ComplexField::from_spectrum(f.grid_ptr(), multiply(f.grid(), f.spectrum(), m));
}

ComplexField apply_symbol(const ComplexField& f, const Symbol& m) {
  return ComplexField::from_spectrum(f.grid_ptr(), multiply(f.grid(), f.spectrum(), m));
}

RealField apply_real_symbol(const RealField& f, const Symbol& m) {
  return RealField::from_spectrum(f.grid_ptr(), multiply(f.grid(), f.spectrum(), m));
}

namespace {

Complex hilbert_symbol(double xi) {
  if (xi > 0.0) return {0.0, -1.0};
  if (xi < 0.0) return {0.0, 1.0};
  return {};
}

Symbol derivative_symbol(int order) {
  if (order < 1 || order > 4) throw PreconditionError("derivative order must be in [1, 4]");
  return [order](double xi) {
    const Complex ik(0.0, xi);
    Complex r = ik;
    for (int i = 1; i < order; ++i) r *= ik;
    return r;
  };
}

}  // namespace

RealField hilbert(const RealField& f) { return apply_real_symbol(f, hilbert_symbol); }
ComplexField hilbert(const ComplexField& f) { return apply_symbol(f, hilbert_symbol); }

RealField derivative(const RealField& f, int order) { return apply_real_symbol(f, derivative_symbol(order)); }
ComplexField derivative(const ComplexField& f, int order) { return apply_symbol(f, derivative_symbol(order)); }

bool is_mean_zero(const RealField& f) noexcept {
  return std::abs(f.mean()) <= kMeanTolerance * f.l2_norm();
}

void require_mean_zero(const RealField& f, const std::string& where) {
  if (!is_mean_zero(f)) throw MeanNotZeroError(where, f.mean());
}

RealField antiderivative(const RealField& f) {
  require_mean_zero(f, "antiderivative");
  return antiderivative_unchecked(f);
}

RealField antiderivative_unchecked(const RealField& f) {
  return apply_real_symbol(f, [](double xi) { return xi == 0.0 ? Complex{} : 1.0 / Complex(0.0, xi); });
}

RealField abs_derivative_power(const RealField& f, double s) {
  return apply_real_symbol(f, [s](double xi) { return xi == 0.0 ? Complex{} : Complex(std::pow(std::abs(xi), s)); });
}

// ---- Littlewood-Paley ------------------------------------------------------

double partition_bump(double xi) noexcept {
  const double a = std::abs(xi);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  const double s = a - 1.0;
  const double up = smooth_step_half(1.0 - s);
  return up / (up + smooth_step_half(s));
}

double band_symbol(int k, double xi) noexcept {
  if (k == 0) return partition_bump(xi);
  return partition_bump(std::ldexp(xi, -k)) - partition_bump(std::ldexp(xi, -(k - 1)));
}

double below_symbol(int k, double xi) noexcept {
  if (k <= 0) return 0.0;
  return partition_bump(std::ldexp(xi, -(k - 1)));
}

double half_symbol(Half half, double xi) noexcept {
  switch (half) {
    case Half::plus: return xi >= 0.0 ? 1.0 : 0.0;
    case Half::minus: return xi < 0.0 ? 1.0 : 0.0;
    case Half::both: break;
  }
  return 1.0;
}

namespace {

void require_band(const Grid& g, int k) {
  if (!g.band_resolved(k))
    throw PreconditionError("dyadic band " + std::to_string(k) + " is outside the grid resolution (top band " +
                            std::to_string(g.top_band()) + ")");
}

}  // namespace

RealField project_band(const RealField& f, int k) {
  require_band(f.grid(), k);
  return apply_real_symbol(f, [k](double xi) { return Complex(band_symbol(k, xi)); });
}

ComplexField project_band(const RealField& f, DyadicBand band) {
  return project_band(ComplexField(f), band);
}

ComplexField project_band(const ComplexField& f, DyadicBand band) {
  require_band(f.grid(), band.k);
  const Grid& g = f.grid();
  Spectrum c(f.size());
  for (std::size_t m = 0; m < c.size(); ++m) {
    const double xi = g.wavenumber(m);
    c[m] = band_symbol(band.k, xi) * half_symbol(band.half, xi) * f.spectrum()[m];
  }
  if (band.half != Half::both) c[g.nyquist_index()] = Complex{};
  return ComplexField::from_spectrum(f.grid_ptr(), std::move(c));
}

RealField project_below(const RealField& f, int k) {
  return apply_real_symbol(f, [k](double xi) { return Complex(below_symbol(k, xi)); });
}

RealField project_at_or_above(const RealField& f, int k) {
  return apply_real_symbol(f, [k](double xi) { return Complex(1.0 - below_symbol(k, xi)); });
}

RealField project_range(const RealField& f, int lo, int hi) {
  if (lo < 0 || hi <= lo) throw PreconditionError("project_range: need 0 <= lo < hi");
  return apply_real_symbol(f, [lo, hi](double xi) {
    const double upper = below_symbol(hi, xi);
    const double lower = partition_bump(std::ldexp(xi, -lo));
    return Complex(upper - lower);
  });
}

double sobolev_norm(const RealField& f, double s, bool homogeneous) {
  const Grid& g = f.grid();
  if (homogeneous && s < 0.0 && !is_mean_zero(f)) throw MeanNotZeroError("sobolev_norm", f.mean());
  double acc = 0.0;
  for (std::size_t m = 0; m < f.size(); ++m) {
    const double xi = g.wavenumber(m);
    double w;
    if (homogeneous) {
      if (xi == 0.0) {
        if (s != 0.0) continue;
        w = 1.0;
      } else {
        w = std::pow(std::abs(xi), 2.0 * s);
      }
    } else {
      w = std::pow(1.0 + xi * xi, s);
    }
    acc += w * std::norm(f.spectrum()[m]);
  }
  return std::sqrt(acc * g.length());
}

namespace {

double band_l2(const RealField& f, const std::function<double(double)>& symbol) {
  const Grid& g = f.grid();
  double acc = 0.0;
  for (std::size_t m = 0; m < f.size(); ++m) {
    const double p = symbol(g.wavenumber(m));
    acc += p * p * std::norm(f.spectrum()[m]);
  }
  return std::sqrt(acc * g.length());
}

}  // namespace

std::vector<double> band_norms(const RealField& f) {
  const int top = f.grid().top_band();
  std::vector<double> out(static_cast<std::size_t>(top) + 1);
  for (int k = 0; k <= top; ++k) out[k] = band_l2(f, [k](double xi) { return band_symbol(k, xi); });
  return out;
}

double besov_norm(const RealField& f, double s) {
  const auto norms = band_norms(f);
  double best = 0.0;
  for (std::size_t k = 0; k < norms.size(); ++k)
    best = std::max(best, std::pow(2.0, s * static_cast<double>(k)) * norms[k]);
  return best;
}

double homogeneous_besov_norm(const RealField& f, double s) {
  const Grid& g = f.grid();
  const int top = g.top_band();
  const int bottom = static_cast<int>(std::floor(std::log2(g.fundamental()))) - 1;
  double best = 0.0;
  for (int k = bottom; k <= top; ++k) {
    const double nk = band_l2(f, [k](double xi) {
      return partition_bump(std::ldexp(xi, -k)) - partition_bump(std::ldexp(xi, -(k - 1)));
    });
    best = std::max(best, std::pow(2.0, s * k) * nk);
  }
  return best;
}

bool FrequencyEnvelope::slowly_varying(double rel_tol) const {
  const double floor = rel_tol * (c.empty() ? 0.0 : *std::max_element(c.begin(), c.end()));
  for (std::size_t j = 0; j < c.size(); ++j)
    for (std::size_t k = 0; k < c.size(); ++k) {
      const double d = std::abs(static_cast<double>(j) - static_cast<double>(k));
      if (c[j] > c[k] * std::pow(2.0, delta * d) * (1.0 + rel_tol) + floor) return false;
    }
  return true;
}

bool FrequencyEnvelope::majorizes(const RealField& f, double rel_tol) const {
  const auto norms = band_norms(f);
  if (norms.size() > c.size()) return false;
  for (std::size_t k = 0; k < norms.size(); ++k)
    if (norms[k] > c[k] * (1.0 + rel_tol) + 1e-300) return false;
  return true;
}

FrequencyEnvelope envelope(const RealField& f, double delta) {
  if (!(delta > 0.0 && delta <= 0.5)) throw PreconditionError("envelope: delta must lie in (0, 1/2]");
  const auto norms = band_norms(f);
  FrequencyEnvelope env{delta, std::vector<double>(norms.size(), 0.0)};
  for (std::size_t k = 0; k < norms.size(); ++k)
    for (std::size_t j = 0; j < norms.size(); ++j) {
      const double d = std::abs(static_cast<double>(j) - static_cast<double>(k));
      env.c[k] = std::max(env.c[k], std::pow(2.0, -delta * d) * norms[j]);
    }
  return env;
}

// ---- snapshots -------------------------------------------------------------

void write_snapshot(const std::string& path, const RealField& f, double time) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("cannot open " + path + " for writing");
  const Grid& g = f.grid();
  std::fprintf(fp, "%zu %.17g %.17g\n", g.size(), g.length(), time);
  for (std::size_t j = 0; j < f.size(); ++j) std::fprintf(fp, "%.17g %.17g\n", g.x(j), f[j]);
  std::fclose(fp);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::size_t n = 0;
  double length = 0.0, time = 0.0;
  if (!(in >> n >> length >> time)) throw std::runtime_error(path + ": malformed snapshot header");
  auto grid = Grid::make(n, length);
  std::vector<double> v(n);
  for (std::size_t j = 0; j < n; ++j) {
    double x = 0.0;
    if (!(in >> x >> v[j])) throw std::runtime_error(path + ": truncated snapshot");
  }
  return Snapshot{RealField(std::move(grid), std::move(v)), time};
}

}  // namespace bo3
