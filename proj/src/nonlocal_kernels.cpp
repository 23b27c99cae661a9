#include "sspde/nonlocal_kernels.hpp"

#include <cmath>
#include <ostream>

#include <json.hpp>

#include "sspde/csv_io.hpp"

namespace sspde {

namespace detail {

const QuadratureRule& cached_gauss_legendre(int n) {
  static const std::vector<QuadratureRule> rules = [] {
    std::vector<QuadratureRule> out;
    for (int i = 1; i <= 32; ++i) out.push_back(gauss_legendre(i));
    return out;
  }();
  if (n < 1 || n > 32) throw ValidationError("polynomial degree too high for exact kernel integration");
  return rules[static_cast<std::size_t>(n - 1)];
}

}  // namespace detail

std::string_view to_string(KernelParity parity) {
  switch (parity) {
    case KernelParity::odd: return "odd";
    case KernelParity::even: return "even";
    case KernelParity::one_sided: return "one_sided";
  }
  return "?";
}

std::string_view to_string(KernelPreset preset) {
  switch (preset) {
    case KernelPreset::odd_box: return "odd_box";
    case KernelPreset::even_box: return "even_box";
    case KernelPreset::upwind_box: return "upwind_box";
  }
  return "?";
}

std::string_view to_string(WeightMode mode) {
  switch (mode) {
    case WeightMode::transport: return "transport";
    case WeightMode::heat: return "heat";
    case WeightMode::upwind: return "upwind";
    case WeightMode::linear_generic: return "linear_generic";
  }
  return "?";
}

std::string_view to_string(Boundary boundary) {
  switch (boundary) {
    case Boundary::periodic: return "periodic";
    case Boundary::dirichlet: return "dirichlet";
    case Boundary::neumann: return "neumann";
  }
  return "?";
}

KernelPreset parse_kernel_preset(std::string_view name) {
  if (name == "odd_box") return KernelPreset::odd_box;
  if (name == "even_box") return KernelPreset::even_box;
  if (name == "upwind_box") return KernelPreset::upwind_box;
  throw ValidationError("unknown kernel preset '" + std::string(name) + "'");
}

WeightMode parse_weight_mode(std::string_view name) {
  if (name == "transport") return WeightMode::transport;
  if (name == "heat") return WeightMode::heat;
  if (name == "upwind") return WeightMode::upwind;
  if (name == "linear_generic") return WeightMode::linear_generic;
  throw ValidationError("unknown weight mode '" + std::string(name) + "'");
}

Boundary parse_boundary(std::string_view name) {
  if (name == "periodic") return Boundary::periodic;
  if (name == "dirichlet") return Boundary::dirichlet;
  if (name == "neumann") return Boundary::neumann;
  throw ValidationError("unknown boundary '" + std::string(name) + "'");
}

ConsistencyMode parse_consistency_mode(std::string_view name) {
  if (name == "heat") return ConsistencyMode::heat;
  if (name == "transport") return ConsistencyMode::transport;
  if (name == "burgers_centered") return ConsistencyMode::burgers_centered;
  if (name == "burgers_upwind") return ConsistencyMode::burgers_upwind;
  throw ValidationError("unknown consistency mode '" + std::string(name) + "'");
}

double PolynomialPiece::operator()(double z) const {
  double value = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) value = value * z + *it;
  return value;
}

namespace {

// int_a^b z^j * piece(z) dz by exact monomial antiderivatives.
double monomial_moment(const PolynomialPiece& piece, double a, double b, int j) {
  double sum = 0.0;
  for (std::size_t i = 0; i < piece.coeffs.size(); ++i) {
    const int n = static_cast<int>(i) + j + 1;
    sum += piece.coeffs[i] * (std::pow(b, n) - std::pow(a, n)) / n;
  }
  return sum;
}

// Interior sign changes of a polynomial piece, refined by bisection.
std::vector<double> sign_changes(const PolynomialPiece& piece) {
  std::vector<double> roots;
  constexpr int kSamples = 512;
  const double step = (piece.hi - piece.lo) / kSamples;
  double prev_z = piece.lo;
  double prev = piece(prev_z);
  for (int i = 1; i <= kSamples; ++i) {
    const double z = i == kSamples ? piece.hi : piece.lo + i * step;
    const double value = piece(z);
    if ((prev < 0.0 && value > 0.0) || (prev > 0.0 && value < 0.0)) {
      double a = prev_z, b = z, fa = prev;
      for (int it = 0; it < 200 && b - a > 0.0; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        const double fm = piece(mid);
        if ((fa < 0.0) == (fm < 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    if (value != 0.0) {
      prev = value;
      prev_z = z;
    }
  }
  return roots;
}

}  // namespace

KernelFamily KernelFamily::preset(KernelPreset preset, double epsilon) {
  switch (preset) {
    case KernelPreset::odd_box:
      return custom({{-1.0, 0.0, {1.0}}, {0.0, 1.0, {-1.0}}}, KernelParity::odd, epsilon, "odd_box");
    case KernelPreset::even_box:
      return custom({{-1.0, 1.0, {0.5}}}, KernelParity::even, epsilon, "even_box");
    case KernelPreset::upwind_box:
      return custom({{0.0, 2.0, {0.5}}}, KernelParity::one_sided, epsilon, "upwind_box");
  }
  throw ValidationError("unknown kernel preset");
}

KernelFamily KernelFamily::custom(std::vector<PolynomialPiece> pieces, KernelParity parity, double epsilon,
                                  std::string name) {
  KernelFamily kf;
  kf.name_ = std::move(name);
  kf.parity_ = parity;
  kf.epsilon_ = epsilon;
  kf.pieces_ = std::move(pieces);
  kf.finalize();
  return kf;
}

KernelFamily KernelFamily::with_epsilon(double epsilon) const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ValidationError("epsilon must be > 0");
  KernelFamily copy = *this;
  copy.epsilon_ = epsilon;
  return copy;
}

void KernelFamily::finalize() {
  if (!(epsilon_ > 0.0) || !std::isfinite(epsilon_)) throw ValidationError("epsilon must be > 0");
  if (pieces_.empty()) throw ValidationError("kernel profile needs at least one piece");
  std::sort(pieces_.begin(), pieces_.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& piece = pieces_[i];
    if (!(piece.hi > piece.lo) || !std::isfinite(piece.lo) || !std::isfinite(piece.hi)) {
      throw ValidationError("kernel piece has an empty or unbounded interval");
    }
    if (piece.coeffs.empty()) throw ValidationError("kernel piece has no coefficients");
    if (i > 0 && piece.lo < pieces_[i - 1].hi) throw ValidationError("kernel pieces overlap");
  }

  support_radius_ = 0.0;
  moments_ = {};
  for (const auto& piece : pieces_) {
    support_radius_ = std::max({support_radius_, std::abs(piece.lo), std::abs(piece.hi)});
    for (int j = 0; j < 5; ++j) moments_.raw[j] += monomial_moment(piece, piece.lo, piece.hi, j);
    std::vector<double> cuts{piece.lo, piece.hi};
    if (piece.lo < 0.0 && piece.hi > 0.0) cuts.push_back(0.0);
    for (double r : sign_changes(piece)) cuts.push_back(r);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double a = cuts[c], b = cuts[c + 1];
      const double mid = 0.5 * (a + b);
      const double sign_p = piece(mid) < 0.0 ? -1.0 : 1.0;
      const double sign_z = mid < 0.0 ? -1.0 : 1.0;
      moments_.abs_first += sign_p * sign_z * monomial_moment(piece, a, b, 1);
      moments_.abs_second += sign_p * monomial_moment(piece, a, b, 2);
    }
  }

  constexpr double tol = 1e-12;
  auto require = [&](bool ok, const std::string& what) {
    if (!ok) throw ValidationError("kernel '" + name_ + "' violates moment constraint: " + what);
  };
  auto sample_points = [&] {
    std::vector<double> zs;
    for (int i = 0; i <= 1000; ++i) zs.push_back(-support_radius_ + 2.0 * support_radius_ * i / 1000.0);
    return zs;
  };
  auto require_nonnegative = [&] {
    for (const auto& piece : pieces_) {
      for (int i = 0; i <= 256; ++i) {
        const double z = piece.lo + (piece.hi - piece.lo) * i / 256.0;
        require(piece(z) >= -1e-14, "profile must be nonnegative");
      }
    }
  };
  const double* m = moments_.raw;
  switch (parity_) {
    case KernelParity::odd:
      require(std::abs(m[0]) <= tol, "int eta = 0 (got " + std::to_string(m[0]) + ")");
      require(std::abs(m[1] + 1.0) <= tol, "int z eta = -1 (got " + std::to_string(m[1]) + ")");
      require(std::abs(m[2]) <= tol, "int z^2 eta = 0 (got " + std::to_string(m[2]) + ")");
      for (double z : sample_points()) require(std::abs(profile(z) + profile(-z)) <= tol, "profile must be odd");
      break;
    case KernelParity::even:
      require(std::abs(m[0] - 1.0) <= tol, "int rho = 1 (got " + std::to_string(m[0]) + ")");
      require(std::abs(m[1]) <= tol, "int z rho = 0 (got " + std::to_string(m[1]) + ")");
      require_nonnegative();
      for (double z : sample_points()) require(std::abs(profile(z) - profile(-z)) <= tol, "profile must be even");
      break;
    case KernelParity::one_sided:
      require(pieces_.front().lo >= 0.0, "support must lie in [0, inf)");
      require(std::abs(m[0] - 1.0) <= tol, "int rho = 1 (got " + std::to_string(m[0]) + ")");
      require(std::abs(m[1] - 1.0) <= tol, "int z rho = 1 (got " + std::to_string(m[1]) + ")");
      require_nonnegative();
      break;
  }
}

double KernelFamily::profile(double z) const {
  double sum = 0.0;
  int hits = 0;
  for (const auto& piece : pieces_) {
    if (piece.contains(z)) {
      sum += piece(z);
      ++hits;
    }
  }
  if (hits == 0) return 0.0;
  return sum / hits;
}

double KernelFamily::eval(double z) const {
  const double scale = scaling_exponent() == 1 ? 1.0 / epsilon_ : 1.0 / (epsilon_ * epsilon_);
  return scale * profile(z / epsilon_);
}

double KernelFamily::periodized_eval(double z) const {
  if (epsilon_ * support_radius_ >= 0.5) {
    throw ValidationError("period overlap: eps * Z = " + std::to_string(epsilon_ * support_radius_) + " >= 1/2");
  }
  const double r = z - std::ceil(z - 0.5);
  return eval(r);
}

double heat_prefactor(const KernelFamily& kernel, double kappa) {
  if (!(kappa > 0.0)) throw ValidationError("kappa must be > 0");
  return 2.0 * kappa / (kernel.m2() * kernel.epsilon() * kernel.epsilon());
}

namespace {

// (1/h^2) int_{[0,h]^2} K(s + xi - zeta) dxi dzeta for the scaled kernel K.
double pair_average(const KernelFamily& kernel, double s, double h) {
  const double eps = kernel.epsilon();
  if (std::abs(s) >= eps * kernel.support_radius() + h) return 0.0;
  const double big_s = s / eps;
  const double big_h = h / eps;
  const double integral = kernel.integrate_shifted(
      big_s, -big_h, big_h, {0.0}, [big_h](double tau) { return big_h - std::abs(tau); }, 1);
  const double scale = kernel.scaling_exponent() == 1 ? eps : 1.0;  // eps^{2-a}
  return scale * integral / (big_h * big_h * eps * eps);
}

void require_mode_parity(const KernelFamily& kernel, WeightMode mode) {
  const auto parity = kernel.parity();
  if (mode == WeightMode::transport && parity != KernelParity::odd) throw ValidationError("transport weights need an odd kernel");
  if (mode == WeightMode::heat && parity != KernelParity::even) throw ValidationError("heat weights need an even kernel");
  if (mode == WeightMode::upwind && parity != KernelParity::one_sided) throw ValidationError("upwind weights need a one-sided kernel");
}

std::size_t band_for(const KernelFamily& kernel, const Partition& partition) {
  const double cells = std::ceil(kernel.epsilon() * kernel.support_radius() / partition.cell_length());
  return std::min<std::size_t>(partition.size() - 1, static_cast<std::size_t>(cells) + 1);
}

void require_uniform_partition(const Partition& partition) {
  if (!partition.uniform_measure()) throw ValidationError("weight assembly needs uniform p (Lebesgue cells on [0,1])");
}

WeightMatrix make_header(const KernelFamily& kernel, std::shared_ptr<const Partition> partition, WeightMode mode,
                         Boundary boundary, double kappa) {
  WeightMatrix wm;
  wm.partition = std::move(partition);
  wm.epsilon = kernel.epsilon();
  wm.mode = mode;
  wm.boundary = boundary;
  wm.kernel_name = kernel.name();
  wm.prefactor = mode == WeightMode::heat ? heat_prefactor(kernel, kappa) : 1.0;
  return wm;
}

}  // namespace

std::vector<double> WeightMatrix::weighted_row_sums() const {
  const auto& nu = measures();
  std::vector<double> sums(size(), 0.0);
  for (std::size_t w = 0; w < size(); ++w) {
    const auto cols = entries.row_cols(w);
    const auto vals = entries.row_values(w);
    double s = 0.0;
    for (std::size_t i = 0; i < cols.size(); ++i) s += vals[i] * nu[cols[i]];
    sums[w] = s;
  }
  return sums;
}

double WeightMatrix::operator_norm_bound() const {
  const auto& nu = measures();
  double bound = 0.0;
  for (std::size_t w = 0; w < size(); ++w) {
    const auto cols = entries.row_cols(w);
    const auto vals = entries.row_values(w);
    double s = 0.0;
    for (std::size_t i = 0; i < cols.size(); ++i) s += std::abs(vals[i]) * (mode == WeightMode::upwind ? 1.0 : nu[cols[i]]);
    if (!absorption.empty()) s += prefactor * absorption[w];
    bound = std::max(bound, s);
  }
  return bound;
}

WeightMatrix averaged_weights(const KernelFamily& kernel, std::shared_ptr<const Partition> partition,
                              const WeightOptions& options) {
  if (options.boundary == Boundary::dirichlet) return dirichlet_variant(kernel, partition, options.mode, options.kappa);
  if (options.boundary == Boundary::neumann) return neumann_variant(kernel, partition, options.mode, options.kappa);
  require_uniform_partition(*partition);
  require_mode_parity(kernel, options.mode);
  if (kernel.epsilon() * kernel.support_radius() >= 0.5) {
    throw ValidationError("period overlap: eps * Z = " + std::to_string(kernel.epsilon() * kernel.support_radius()) +
                          " >= 1/2");
  }
  WeightMatrix wm = make_header(kernel, partition, options.mode, Boundary::periodic, options.kappa);
  const std::size_t n = partition->size();
  const double h = partition->cell_length();
  const std::size_t band = band_for(kernel, *partition);
  wm.band_halfwidth = band;
  const bool upwind = options.mode == WeightMode::upwind;

  // Circulant structure: entry (i, j) depends on (i - j) mod n only.
  auto periodic_value = [&](double s) {
    double v = 0.0;
    for (int image = -1; image <= 1; ++image) v += pair_average(kernel, s + image, h);
    return v;
  };
  std::vector<double> by_offset(n, 0.0);
  std::vector<std::size_t> offsets;
  const auto in = static_cast<std::ptrdiff_t>(n);
  for (std::ptrdiff_t d = -static_cast<std::ptrdiff_t>(band); d <= static_cast<std::ptrdiff_t>(band); ++d) {
    offsets.push_back(static_cast<std::size_t>(((d % in) + in) % in));
  }
  std::sort(offsets.begin(), offsets.end());
  offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());

  const auto parity = kernel.parity();
  for (std::size_t d : offsets) {
    const std::size_t mirror = (n - d) % n;
    if (parity != KernelParity::one_sided && mirror < d) continue;  // filled from its mirror
    // Upwind coefficients use rho_eps(y - x), the reflected kernel.
    const double s = static_cast<double>(d) * h;
    double value = upwind ? periodic_value(-s) : periodic_value(s);
    if (parity == KernelParity::odd && (d == 0 || d == mirror)) value = 0.0;
    by_offset[d] = value;
    if (parity == KernelParity::odd) by_offset[mirror] = d == mirror ? 0.0 : -value;
    if (parity == KernelParity::even) by_offset[mirror] = value;
  }
  const double scale = upwind ? h : wm.prefactor;
  for (double& v : by_offset) v *= scale;

  std::vector<std::vector<std::pair<std::size_t, double>>> rows(n);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t d : offsets) {
      const double v = by_offset[d];
      if (v == 0.0) continue;
      rows[i].emplace_back((i + n - d) % n, v);
    }
  });
  wm.entries = SparseRows::from_rows(n, std::move(rows));
  return wm;
}

WeightMatrix dirichlet_variant(const KernelFamily& kernel, std::shared_ptr<const Partition> partition, WeightMode mode,
                               double kappa) {
  require_uniform_partition(*partition);
  if (kernel.parity() != KernelParity::even) throw ValidationError("Dirichlet variant needs an even kernel");
  if (mode != WeightMode::heat && mode != WeightMode::linear_generic) {
    throw ValidationError("Dirichlet variant supports heat and linear_generic modes");
  }
  WeightMatrix wm = make_header(kernel, partition, mode, Boundary::dirichlet, kappa);
  const std::size_t n = partition->size();
  const double h = partition->cell_length();
  const std::size_t band = band_for(kernel, *partition);
  wm.band_halfwidth = band;

  std::vector<double> by_offset(band + 1);
  for (std::size_t d = 0; d <= band; ++d) by_offset[d] = wm.prefactor * pair_average(kernel, static_cast<double>(d) * h, h);

  std::vector<std::vector<std::pair<std::size_t, double>>> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= band ? i - band : 0;
    const std::size_t hi = std::min(n - 1, i + band);
    for (std::size_t j = lo; j <= hi; ++j) {
      const double v = by_offset[i > j ? i - j : j - i];
      if (v != 0.0) rows[i].emplace_back(j, v);
    }
  }
  wm.entries = SparseRows::from_rows(n, std::move(rows));

  // alpha_w = (1/h) int_{Q_w} int_{R \ [0,1]} rho_eps(x - y) dy dx
  //         = (1/h) int rho_eps(z) [ |{x in Q_w : x < z}| + |{x in Q_w : x > 1 + z}| ] dz.
  const double eps = kernel.epsilon();
  const double reach = eps * kernel.support_radius();
  const double z_max = kernel.support_radius();
  wm.absorption.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Interval cell = partition->intervals()[i];
    if (cell.lo >= reach && 1.0 - cell.hi >= reach) continue;
    const double left = kernel.integrate_shifted(
        0.0, -z_max, z_max, {cell.lo / eps, cell.hi / eps},
        [&](double zeta) { return std::clamp(eps * zeta - cell.lo, 0.0, h); }, 1);
    const double right = kernel.integrate_shifted(
        0.0, -z_max, z_max, {(cell.hi - 1.0) / eps, (cell.lo - 1.0) / eps},
        [&](double zeta) { return std::clamp(cell.hi - 1.0 - eps * zeta, 0.0, h); }, 1);
    wm.absorption[i] = (left + right) / h;
  }
  return wm;
}

WeightMatrix neumann_variant(const KernelFamily& kernel, std::shared_ptr<const Partition> partition, WeightMode mode,
                             double kappa) {
  require_uniform_partition(*partition);
  if (kernel.parity() != KernelParity::even) throw ValidationError("Neumann variant needs an even kernel");
  if (mode != WeightMode::heat && mode != WeightMode::linear_generic) {
    throw ValidationError("Neumann variant supports heat and linear_generic modes");
  }
  if (kernel.epsilon() * kernel.support_radius() >= 1.0) {
    throw ValidationError("Neumann reflection needs eps * Z < 1");
  }
  WeightMatrix wm = make_header(kernel, partition, mode, Boundary::neumann, kappa);
  const std::size_t n = partition->size();
  const double h = partition->cell_length();
  const std::size_t band = band_for(kernel, *partition);
  wm.band_halfwidth = band;

  std::vector<std::vector<std::pair<std::size_t, double>>> rows(n);
  parallel_for(n, [&](std::size_t i) {
    std::vector<std::size_t> candidates;
    const std::size_t lo = i >= band ? i - band : 0;
    const std::size_t hi = std::min(n - 1, i + band);
    for (std::size_t j = lo; j <= hi; ++j) candidates.push_back(j);
    for (std::size_t j = 0; j <= std::min(band, n - 1); ++j) candidates.push_back(j);
    for (std::size_t j = n - 1 - std::min(band, n - 1); j < n; ++j) candidates.push_back(j);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (std::size_t j : candidates) {
      const double direct = static_cast<double>(i) * h - static_cast<double>(j) * h;
      // Reflection y -> -y maps Q_j to [-b_j, -a_j]; y -> 2 - y maps it to [2 - b_j, 2 - a_j].
      const double mirrored = static_cast<double>(i + j + 1) * h;
      const double v = pair_average(kernel, direct, h) + pair_average(kernel, mirrored, h) +
                       pair_average(kernel, mirrored - 2.0, h);
      if (v != 0.0) rows[i].emplace_back(j, wm.prefactor * v);
    }
  });
  wm.entries = SparseRows::from_rows(n, std::move(rows));
  return wm;
}

double consistency_error(const KernelFamily& kernel, ConsistencyMode mode, const TrigPolynomial& u, int grid_points,
                         double kappa) {
  if (grid_points < 1) throw ValidationError("grid needs at least one point");
  switch (mode) {
    case ConsistencyMode::heat:
      if (kernel.parity() != KernelParity::even) throw ValidationError("heat consistency needs an even kernel");
      break;
    case ConsistencyMode::transport:
    case ConsistencyMode::burgers_centered:
      if (kernel.parity() != KernelParity::odd) throw ValidationError("derivative consistency needs an odd kernel");
      break;
    case ConsistencyMode::burgers_upwind:
      if (kernel.parity() != KernelParity::one_sided) throw ValidationError("upwind consistency needs a one-sided kernel");
      break;
  }
  const double eps = kernel.epsilon();
  const auto& rule = detail::cached_gauss_legendre(24);
  auto flux = [](double s) { return 0.5 * s * s; };

  // int P(zeta) g(zeta) d zeta over the profile pieces.
  auto profile_integral = [&](auto&& g) {
    double total = 0.0;
    for (const auto& piece : kernel.pieces()) {
      const double len = piece.hi - piece.lo;
      double sum = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double zeta = piece.lo + len * rule.nodes[q];
        sum += rule.weights[q] * piece(zeta) * g(zeta);
      }
      total += len * sum;
    }
    return total;
  };

  double sum_sq = 0.0;
  for (int i = 0; i < grid_points; ++i) {
    const double x = static_cast<double>(i) / grid_points;
    const double ux = u(x);
    const double dux = u.derivative(x, 1);
    double err = 0.0;
    switch (mode) {
      case ConsistencyMode::heat: {
        const double p = heat_prefactor(kernel, kappa);
        const double approx = p * profile_integral([&](double z) { return u(x - eps * z) - ux; });
        err = approx - kappa * u.derivative(x, 2);
        break;
      }
      case ConsistencyMode::transport: {
        const double approx = profile_integral([&](double z) { return u(x - eps * z) - ux; }) / eps;
        err = approx - dux;
        break;
      }
      case ConsistencyMode::burgers_centered: {
        const double approx = -profile_integral([&](double z) { return flux(u(x - eps * z)) - flux(ux); }) / eps;
        err = approx + ux * dux;
        break;
      }
      case ConsistencyMode::burgers_upwind: {
        const double approx = profile_integral([&](double z) {
                                return upwind_flux(ux, u(x + eps * z)) - upwind_flux(u(x - eps * z), ux);
                              }) / eps;
        err = approx - ux * dux;
        break;
      }
    }
    sum_sq += err * err;
  }
  return std::sqrt(sum_sq / grid_points);
}

void write_weight_matrix_csv(std::ostream& out, const WeightMatrix& weights) {
  out << "row_word,col_word,value\n";
  const auto& words = weights.partition->words();
  for (std::size_t w = 0; w < weights.size(); ++w) {
    const auto cols = weights.entries.row_cols(w);
    const auto vals = weights.entries.row_values(w);
    const std::string row = words[w].to_string();
    for (std::size_t i = 0; i < cols.size(); ++i) {
      out << row << ',' << words[cols[i]].to_string() << ',' << format_double(vals[i]) << '\n';
    }
  }
}

void write_weight_matrix_json(std::ostream& out, const WeightMatrix& weights) {
  nlohmann::ordered_json j;
  j["m"] = weights.level();
  j["k"] = weights.partition->k();
  j["epsilon"] = weights.epsilon;
  j["mode"] = std::string(to_string(weights.mode));
  j["boundary"] = std::string(to_string(weights.boundary));
  j["prefactor"] = weights.prefactor;
  j["kernel"] = weights.kernel_name;
  j["size"] = weights.size();
  j["nonzeros"] = weights.entries.nonzeros();
  j["band_halfwidth"] = weights.band_halfwidth;
  if (!weights.absorption.empty()) j["absorption"] = weights.absorption;
  out << j.dump(2) << '\n';
}

}  // namespace sspde
