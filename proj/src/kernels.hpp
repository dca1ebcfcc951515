#pragma once

// Spectrum-level nonlinear terms used by the integrator. Two real fields share
// one complex transform on the padded grid, so a cubic right-hand side costs a
// handful of 2n-point FFTs. One Kernel per thread.

#include <new>
#include <vector>

#include "bo3/flows.hpp"

namespace bo3::detail {

template <class T>
struct SimdAllocator {
  using value_type = T;
  SimdAllocator() = default;
  template <class U>
  SimdAllocator(const SimdAllocator<U>&) noexcept {}
  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t{64})); }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, std::align_val_t{64}); }
  template <class U>
  bool operator==(const SimdAllocator<U>&) const noexcept { return true; }
};

using AlignedBuffer = std::vector<Complex, SimdAllocator<Complex>>;

enum class Op { id, dx, dxx, hdx, hdxx, h };

class Kernel {
 public:
  explicit Kernel(GridPtr grid, bool dealias = true);

  const Grid& grid() const noexcept { return *grid_; }

  /// Nonlinear part only (the linear part is handled by the propagator).
  void bo(const Spectrum& phi, Spectrum& out);
  void tbo(const Spectrum& phi, Spectrum& out);
  void linearized(const Spectrum& phi, const Spectrum& v, Spectrum& out);
  void adjoint(const Spectrum& phi, const Spectrum& w, Spectrum& out);

  /// Dispatches on the flow; `background` is ignored for the nonlinear flows.
  void nonlinear(FlowTag tag, const Spectrum* background, const Spectrum& u, Spectrum& out);

  /// Symbol of the linear part of each flow.
  static Complex linear_symbol(FlowTag tag, double xi) noexcept;

 private:
  Complex symbol(Op op, std::size_t m) const noexcept;
  void lift(const Spectrum& a, Op oa, const Spectrum& b, Op ob, std::vector<double>& ua, std::vector<double>& ub);
  void lift(const Spectrum& a, Op oa, std::vector<double>& ua);
  void lower(const std::vector<double>& ua, const std::vector<double>& ub, Spectrum& a, Spectrum& b);

  void backward();
  void forward();

  GridPtr grid_;
  std::size_t n_;
  bool padded_;
  std::size_t nf_;
  std::vector<double> xi_;
  std::vector<Complex> table_[6];
  AlignedBuffer wide_, fine_;
  std::vector<std::vector<double>> f_;
  Spectrum s1_, s2_, s3_;
};

}  // namespace bo3::detail
