#include "kernels.hpp"

#include <cmath>

namespace bo3::detail {

Kernel::Kernel(GridPtr grid, bool dealias)
    : grid_(std::move(grid)),
      n_(grid_->size()),
      padded_(dealias),
      nf_(dealias ? 2 * n_ : n_),
      xi_(grid_->wavenumbers()),
      wide_(nf_),
      fine_(nf_),
      f_(12, std::vector<double>(nf_)),
      s1_(n_),
      s2_(n_),
      s3_(n_) {
  for (int op = 0; op < 6; ++op) {
    table_[op].resize(n_);
    for (std::size_t m = 0; m < n_; ++m) table_[op][m] = symbol(static_cast<Op>(op), m);
  }
}

void Kernel::backward() {
  if (padded_)
    grid_->padded_backward(wide_, fine_);
  else
    grid_->plain_backward(wide_, fine_);
}

void Kernel::forward() {
  if (padded_)
    grid_->padded_forward(fine_, wide_);
  else
    grid_->plain_forward(fine_, wide_);
}

Complex Kernel::linear_symbol(FlowTag tag, double xi) noexcept {
  if (tag == FlowTag::benjamin_ono) return Complex(0.0, -xi * std::abs(xi));
  return Complex(0.0, -xi * xi * xi);
}

Complex Kernel::symbol(Op op, std::size_t m) const noexcept {
  const double xi = xi_[m];
  const double sg = xi > 0.0 ? 1.0 : (xi < 0.0 ? -1.0 : 0.0);
  switch (op) {
    case Op::id: return 1.0;
    case Op::dx: return {0.0, xi};
    case Op::dxx: return -xi * xi;
    case Op::hdx: return std::abs(xi);
    case Op::hdxx: return {0.0, sg * xi * xi};
    case Op::h: return {0.0, -sg};
  }
  return 1.0;
}

void Kernel::lift(const Spectrum& a, Op oa, const Spectrum& b, Op ob, std::vector<double>& ua,
                  std::vector<double>& ub) {
  const std::size_t n = n_, h = n_ / 2;
  const Complex I(0.0, 1.0);
  const Complex* ta = table_[static_cast<int>(oa)].data();
  const Complex* tb = table_[static_cast<int>(ob)].data();
  std::fill(wide_.begin() + h, wide_.begin() + (nf_ - h + 1), Complex{});
  for (std::size_t m = 0; m < n; ++m) {
    if (m == h) continue;
    const std::size_t w = m < h ? m : m + nf_ - n;
    wide_[w] = ta[m] * a[m] + I * (tb[m] * b[m]);
  }
  backward();
  for (std::size_t j = 0; j < nf_; ++j) {
    ua[j] = fine_[j].real();
    ub[j] = fine_[j].imag();
  }
}

void Kernel::lift(const Spectrum& a, Op oa, std::vector<double>& ua) {
  const std::size_t n = n_, h = n_ / 2;
  const Complex* ta = table_[static_cast<int>(oa)].data();
  std::fill(wide_.begin() + h, wide_.begin() + (nf_ - h + 1), Complex{});
  for (std::size_t m = 0; m < n; ++m) {
    if (m == h) continue;
    const std::size_t w = m < h ? m : m + nf_ - n;
    wide_[w] = ta[m] * a[m];
  }
  backward();
  for (std::size_t j = 0; j < nf_; ++j) ua[j] = fine_[j].real();
}

void Kernel::lower(const std::vector<double>& ua, const std::vector<double>& ub, Spectrum& a, Spectrum& b) {
  const std::size_t n = n_, h = n_ / 2, nf = nf_;
  for (std::size_t j = 0; j < nf; ++j) fine_[j] = Complex(ua[j], ub[j]);
  forward();
  const double s = 1.0 / static_cast<double>(nf);
  const Complex I(0.0, 1.0);
  for (std::size_t m = 0; m < n; ++m) {
    if (m == h) {
      a[m] = b[m] = Complex{};
      continue;
    }
    const std::size_t w = m < h ? m : m + nf - n;
    const std::size_t wm = w == 0 ? 0 : nf - w;
    const Complex c = wide_[w], cm = std::conj(wide_[wm]);
    a[m] = 0.5 * (c + cm) * s;
    b[m] = -0.5 * I * (c - cm) * s;
  }
}

void Kernel::bo(const Spectrum& phi, Spectrum& out) {
  auto& u = f_[0];
  auto& ux = f_[1];
  auto& p = f_[2];
  lift(phi, Op::id, phi, Op::dx, u, ux);
  for (std::size_t j = 0; j < nf_; ++j) p[j] = u[j] * ux[j];
  std::fill(f_[3].begin(), f_[3].end(), 0.0);
  lower(p, f_[3], out, s1_);
}

void Kernel::tbo(const Spectrum& phi, Spectrum& out) {
  auto& u = f_[0];
  auto& ux = f_[1];
  auto& uxx = f_[2];
  auto& hux = f_[3];
  auto& huxx = f_[4];
  auto& A = f_[5];
  auto& B = f_[6];
  lift(phi, Op::id, phi, Op::dx, u, ux);
  lift(phi, Op::dxx, phi, Op::hdx, uxx, hux);
  lift(phi, Op::hdxx, huxx);
  for (std::size_t j = 0; j < nf_; ++j) {
    A[j] = u[j] * u[j] * ux[j] + ux[j] * hux[j] + u[j] * huxx[j];
    B[j] = uxx[j] * u[j] + ux[j] * ux[j];
  }
  lower(A, B, s1_, s2_);
  for (std::size_t m = 0; m < n_; ++m) out[m] = -0.75 * (s1_[m] + table_[static_cast<int>(Op::h)][m] * s2_[m]);
}

void Kernel::linearized(const Spectrum& phi, const Spectrum& v, Spectrum& out) {
  auto& p = f_[0];
  auto& px = f_[1];
  auto& pxx = f_[2];
  auto& hpx = f_[3];
  auto& hpxx = f_[4];
  auto& w = f_[5];
  auto& wx = f_[6];
  auto& wxx = f_[7];
  auto& hwx = f_[8];
  auto& hwxx = f_[9];
  auto& A = f_[10];
  auto& B = f_[11];
  lift(phi, Op::id, phi, Op::dx, p, px);
  lift(phi, Op::dxx, phi, Op::hdx, pxx, hpx);
  lift(phi, Op::hdxx, v, Op::id, hpxx, w);
  lift(v, Op::dx, v, Op::dxx, wx, wxx);
  lift(v, Op::hdx, v, Op::hdxx, hwx, hwxx);
  for (std::size_t j = 0; j < nf_; ++j) {
    A[j] = 2.0 * p[j] * px[j] * w[j] + p[j] * p[j] * wx[j] + wx[j] * hpx[j] + px[j] * hwx[j] + w[j] * hpxx[j] +
           p[j] * hwxx[j];
    B[j] = wxx[j] * p[j] + pxx[j] * w[j] + 2.0 * wx[j] * px[j];
  }
  lower(A, B, s1_, s2_);
  for (std::size_t m = 0; m < n_; ++m) out[m] = -0.75 * (s1_[m] + table_[static_cast<int>(Op::h)][m] * s2_[m]);
}

void Kernel::adjoint(const Spectrum& phi, const Spectrum& wspec, Spectrum& out) {
  auto& p = f_[0];
  auto& px = f_[1];
  auto& hpx = f_[2];
  auto& w = f_[3];
  auto& wx = f_[4];
  auto& hwxx = f_[5];
  auto& S = f_[6];
  auto& T = f_[7];
  auto& U = f_[8];
  auto& Z = f_[9];
  lift(phi, Op::id, phi, Op::dx, p, px);
  lift(phi, Op::hdx, wspec, Op::id, hpx, w);
  lift(wspec, Op::dx, wspec, Op::hdxx, wx, hwxx);
  for (std::size_t j = 0; j < nf_; ++j) {
    S[j] = 1.5 * p[j] * px[j] * w[j] - 0.75 * wx[j] * hpx[j] - 0.75 * hwxx[j] * p[j];
    T[j] = p[j] * p[j] * w[j];
    U[j] = wx[j] * p[j];
    Z[j] = 0.0;
  }
  lower(S, T, s1_, s2_);
  lower(U, Z, s3_, out);
  for (std::size_t m = 0; m < n_; ++m) {
    const Complex d = table_[static_cast<int>(Op::dx)][m];
    out[m] = s1_[m] - 0.75 * d * s2_[m] - 0.75 * table_[static_cast<int>(Op::h)][m] * d * s3_[m];
  }
}

void Kernel::nonlinear(FlowTag tag, const Spectrum* background, const Spectrum& u, Spectrum& out) {
  switch (tag) {
    case FlowTag::airy: std::fill(out.begin(), out.end(), Complex{}); return;
    case FlowTag::benjamin_ono: bo(u, out); return;
    case FlowTag::third_order_bo: tbo(u, out); return;
    case FlowTag::linearized_tbo: linearized(*background, u, out); return;
    case FlowTag::adjoint_linearized_tbo: adjoint(*background, u, out); return;
  }
}

}  // namespace bo3::detail
