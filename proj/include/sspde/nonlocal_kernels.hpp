#pragma once

// Scaled nonlocal kernel families and their cell-pair averaged weight matrices.

#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "sspde/sparse_rows.hpp"
#include "sspde/symbolic_ifs.hpp"
#include "sspde/trig_polynomial.hpp"

namespace sspde {

enum class KernelParity { odd, even, one_sided };
enum class KernelPreset { odd_box, even_box, upwind_box };
enum class WeightMode { transport, heat, upwind, linear_generic };
enum class Boundary { periodic, dirichlet, neumann };

std::string_view to_string(KernelParity parity);
std::string_view to_string(KernelPreset preset);
std::string_view to_string(WeightMode mode);
std::string_view to_string(Boundary boundary);
KernelPreset parse_kernel_preset(std::string_view name);
WeightMode parse_weight_mode(std::string_view name);
Boundary parse_boundary(std::string_view name);

/// Polynomial sum_i coeffs[i] z^i on the closed interval [lo, hi].
struct PolynomialPiece {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> coeffs;

  double operator()(double z) const;
  bool contains(double z) const { return z >= lo && z <= hi; }
};

/// Moments of the unscaled profile: raw[j] = int z^j P(z) dz for j = 0..4, plus the absolute
/// moments used by the stability and consistency constants.
struct KernelMoments {
  double raw[5] = {0, 0, 0, 0, 0};
  double abs_first = 0.0;   // int |z| |P(z)| dz
  double abs_second = 0.0;  // int z^2 |P(z)| dz
};

/// Piecewise-polynomial base profile P with compact support, scaled as eps^{-a} P(z / eps).
class KernelFamily {
 public:
  /// Presets: odd_box -sign(z) 1_{|z|<=1}; even_box (1/2) 1_{|z|<=1}; upwind_box (1/2) 1_{0<=z<=2}.
  static KernelFamily preset(KernelPreset preset, double epsilon);
  /// Custom profile; the pieces must satisfy the moment constraints of `parity`:
  /// odd: int P = 0, int z P = -1 (hence int z^2 P = 0); even: P >= 0, int P = 1, int z P = 0;
  /// one_sided: support in [0, inf), P >= 0, int P = 1, int z P = 1.
  static KernelFamily custom(std::vector<PolynomialPiece> pieces, KernelParity parity, double epsilon,
                             std::string name = "custom");

  KernelFamily with_epsilon(double epsilon) const;

  const std::string& name() const noexcept { return name_; }
  KernelParity parity() const noexcept { return parity_; }
  double epsilon() const noexcept { return epsilon_; }
  /// Exponent a in eps^{-a}: 2 for odd and one-sided derivative kernels, 1 for even kernels.
  int scaling_exponent() const noexcept { return parity_ == KernelParity::even ? 1 : 2; }
  /// Z: the profile vanishes outside [-Z, Z].
  double support_radius() const noexcept { return support_radius_; }
  const std::vector<PolynomialPiece>& pieces() const noexcept { return pieces_; }
  const KernelMoments& moments() const noexcept { return moments_; }

  /// C_eta = (1/2) int z^2 |eta|.
  double c_eta() const noexcept { return 0.5 * moments_.abs_second; }
  double m2() const noexcept { return moments_.raw[2]; }
  double m4() const noexcept { return moments_.raw[4]; }

  /// Unscaled profile. At a jump between two pieces the mean of the one-sided values is returned,
  /// so odd profiles vanish at 0.
  double profile(double z) const;
  /// eps^{-a} P(z / eps) on the whole line.
  double eval(double z) const;
  /// Scaled profile at the representative of z in (-1/2, 1/2]. Throws "period overlap" when
  /// eps Z >= 1/2.
  double periodized_eval(double z) const;

  /// Integral of P(S + tau) * weight(tau) over tau in [lo, hi], exact when weight is a polynomial
  /// of degree <= weight_degree between consecutive `breaks`.
  template <class Weight>
  double integrate_shifted(double shift, double lo, double hi, std::vector<double> breaks, Weight&& weight,
                           int weight_degree) const;

 private:
  KernelFamily() = default;
  void finalize();

  std::string name_;
  KernelParity parity_ = KernelParity::even;
  double epsilon_ = 0.0;
  double support_radius_ = 0.0;
  std::vector<PolynomialPiece> pieces_;
  KernelMoments moments_;
};

/// Cell-pair averaged kernel values on a uniform level-m partition.
struct WeightMatrix {
  std::shared_ptr<const Partition> partition;
  double epsilon = 0.0;
  WeightMode mode = WeightMode::linear_generic;
  Boundary boundary = Boundary::periodic;
  /// 2 kappa / (m2 eps^2) for heat (already folded into `entries`), 1 otherwise.
  double prefactor = 1.0;
  std::string kernel_name;
  /// Heat/transport/generic: sigma_wv (cell-pair average, prefactor folded). Upwind: oriented
  /// coefficients a_wv = nu(K_w)^{-1} int_{Q_w} int_0^inf rho_eps(z) 1_{x+z in Q_v} dz dx.
  SparseRows entries;
  /// Dirichlet only: raw absorbed mass alpha_w per cell (prefactor not folded).
  std::vector<double> absorption;
  /// Largest cell offset |w - v| stored in the direct band.
  std::size_t band_halfwidth = 0;

  int level() const { return partition->level(); }
  std::size_t size() const { return entries.size(); }
  const std::vector<double>& measures() const { return partition->measures(); }

  /// sum_v entry(w, v) nu(K_v) for each row (entries include the prefactor).
  std::vector<double> weighted_row_sums() const;
  /// max_w sum_v |entry(w,v)| nu(K_v) (+ prefactor * absorption).
  double operator_norm_bound() const;
};

struct WeightOptions {
  WeightMode mode = WeightMode::linear_generic;
  Boundary boundary = Boundary::periodic;
  /// Diffusion coefficient used in the heat prefactor.
  double kappa = 1.0;
};

/// Weight matrix for `kernel` on a uniform partition. Entries are exact cell-pair integrals of the
/// piecewise-polynomial kernel; entries outside the support band are exact zeros and not stored.
WeightMatrix averaged_weights(const KernelFamily& kernel, std::shared_ptr<const Partition> partition,
                              const WeightOptions& options);

/// Whole-line even kernel restricted to [0,1]^2 plus per-cell absorbed exterior mass.
WeightMatrix dirichlet_variant(const KernelFamily& kernel, std::shared_ptr<const Partition> partition,
                               WeightMode mode = WeightMode::linear_generic, double kappa = 1.0);

/// Even kernel with the exterior folded back by even reflection at 0 and 1; requires eps Z < 1.
WeightMatrix neumann_variant(const KernelFamily& kernel, std::shared_ptr<const Partition> partition,
                             WeightMode mode = WeightMode::linear_generic, double kappa = 1.0);

/// 2 kappa / (m2 eps^2).
double heat_prefactor(const KernelFamily& kernel, double kappa);

enum class ConsistencyMode { heat, transport, burgers_centered, burgers_upwind };
ConsistencyMode parse_consistency_mode(std::string_view name);

/// || A_eps u - A u ||_{L2(T)} on an N-point uniform grid, with the nonlocal operator evaluated by
/// exact-order quadrature on each kernel piece:
///   heat:             A_eps u = 2 kappa/(m2 eps^2) int rho_eps(x-y)(u(y)-u(x)) dy,  A u = kappa u''
///   transport:        D_eps u = int eta_eps(x-y) u(y) dy,                            A u = u'
///   burgers_centered: A_eps(u) = int eta_eps(x-y)(F(u(x)) - F(u(y))) dy,             A u = -(u^2/2)'
///   burgers_upwind:   N_eps(u) = int_0^inf rho_eps(z)(g(u(x),u(x+z)) - g(u(x-z),u(x))) dz, A u = (u^2/2)'
double consistency_error(const KernelFamily& kernel, ConsistencyMode mode, const TrigPolynomial& u, int grid_points,
                         double kappa = 1.0);

/// CSV schema: row_word,col_word,value (stored entries only).
void write_weight_matrix_csv(std::ostream& out, const WeightMatrix& weights);
/// JSON header: m, k, epsilon, mode, boundary, prefactor, kernel, band, nonzeros, absorption.
void write_weight_matrix_json(std::ostream& out, const WeightMatrix& weights);

/// Monotone two-point flux g(a,b) = (a_+)^2/2 + (b_-)^2/2.
inline double upwind_flux(double a, double b) {
  const double ap = a > 0.0 ? a : 0.0;
  const double bm = b < 0.0 ? b : 0.0;
  return 0.5 * ap * ap + 0.5 * bm * bm;
}

}  // namespace sspde

#include "sspde/detail/nonlocal_kernels_impl.hpp"
