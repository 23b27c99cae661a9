#pragma once

// Level-m action of the isometry between L2(K, nu) and L2([0,1]): cell averages of functions and
// kernels on the model partition, L2 norms, fractal-side averages, and kernel pullback.

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "sspde/quadrature.hpp"
#include "sspde/sparse_rows.hpp"
#include "sspde/symbolic_ifs.hpp"

namespace sspde {

using RealFunction = std::function<double(double)>;
using KernelFunction = std::function<double(double, double)>;
using PlaneFunction = std::function<double(Vec2)>;
using PlaneKernel = std::function<double(Vec2, Vec2)>;

/// Piecewise-constant function sum_w u_w 1_{K_w}, indexed in lexicographic word order.
struct StepFunction {
  std::shared_ptr<const Partition> partition;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

/// Piecewise-constant kernel sum_{w,v} W_wv 1_{K_w x K_v}.
struct StepKernel {
  std::shared_ptr<const Partition> partition;
  SparseRows entries;

  double at(std::size_t w, std::size_t v) const { return entries.at(w, v); }
};

/// Optional band pruning for kernel averages: pairs of cells whose gap exceeds `radius` are not
/// evaluated and stored as exact zeros.
struct SupportPruning {
  double radius = 0.0;
  bool periodic = false;
};

inline constexpr int kDefaultQuadratureNodes = 8;

/// g_w = average of f over Q_w (Lebesgue, uniform p).
StepFunction cell_averages(const RealFunction& f, std::shared_ptr<const Partition> partition,
                           const QuadratureRule& rule = gauss_legendre(kDefaultQuadratureNodes));

/// W_wv = average of W over Q_w x Q_v with the tensorized rule.
StepKernel kernel_cell_averages(const KernelFunction& kernel, std::shared_ptr<const Partition> partition,
                                const QuadratureRule& rule = gauss_legendre(kDefaultQuadratureNodes),
                                std::optional<SupportPruning> pruning = std::nullopt);

/// sum_w u_w nu(K_w).
double integral_of_step(const StepFunction& u);
/// (sum_w u_w^2 nu(K_w))^{1/2}.
double l2_norm(const StepFunction& u);
double l2_norm(std::span<const double> values, std::span<const double> measures);
/// l2(nu) distance between two states on the same partition.
double l2_distance(std::span<const double> a, std::span<const double> b, std::span<const double> measures);

/// || sum_w u_w 1_{Q_w} - f ||_{L2(0,1)} by per-cell quadrature; equals the L2(K, nu) distance.
double l2_error(const StepFunction& u, const RealFunction& f,
                const QuadratureRule& rule = gauss_legendre(kDefaultQuadratureNodes));

/// Fine-to-coarse averaging: the level-(m-1) values obtained by p-weighted averaging of children.
StepFunction coarsen(const StepFunction& fine, std::shared_ptr<const Partition> coarse);

/// Martingale approximation of nu-averages over the fractal cells K_w: the nu-weighted mean of f
/// over the anchor points f_{w v}(base), |v| = depth. `base` defaults to the barycenter of nu.
StepFunction fractal_cell_averages(const PlaneFunction& f, const IfsSpec& ifs, int m, int depth,
                                   std::optional<Vec2> base = std::nullopt, const Limits& limits = {});

/// Symbolic pair averages of J over K_w x K_v using depth-`depth` descendant anchors. With the
/// symbolic anchor rule this reproduces kernel_cell_averages of the pullback kernel exactly.
StepKernel fractal_kernel_averages(const PlaneKernel& kernel, const IfsSpec& ifs, int m, int depth,
                                   std::optional<Vec2> base = std::nullopt, const Limits& limits = {});

/// Depth-n truncation of the coding map: xi -> f_{word_of_point(xi, k, n)}(base).
Vec2 coding_map(double xi, const IfsSpec& ifs, int depth, Vec2 base);

/// (xi, eta) -> J(Phi_n(xi), Phi_n(eta)).
KernelFunction pullback_kernel(PlaneKernel kernel, IfsSpec ifs, int depth, std::optional<Vec2> base = std::nullopt);
/// xi -> f(Phi_n(xi)).
RealFunction pullback_function(PlaneFunction f, IfsSpec ifs, int depth, std::optional<Vec2> base = std::nullopt);

inline int default_pullback_depth(int m) { return m + 6; }

/// CSV schema: word,value
void write_step_function_csv(std::ostream& out, const StepFunction& u);
StepFunction read_step_function_csv(std::istream& in, std::shared_ptr<const Partition> partition);
/// CSV schema: word_row,word_col,value (stored entries only)
void write_step_kernel_csv(std::ostream& out, const StepKernel& kernel);

}  // namespace sspde
