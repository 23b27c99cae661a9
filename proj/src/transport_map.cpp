#include "sspde/transport_map.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "sspde/csv_io.hpp"

namespace sspde {

namespace {

void require_uniform(const Partition& partition, const char* op) {
  if (!partition.uniform_measure()) {
    throw ValidationError(std::string(op) + " integrates against Lebesgue measure on [0,1] and needs uniform p");
  }
}

double checked(double value, const char* what) {
  if (!std::isfinite(value)) throw NumericalError(std::string("non-finite value in ") + what);
  return value;
}

// Weight of each depth-d descendant relative to its ancestor cell.
std::vector<double> descendant_weights(const IfsSpec& ifs, int depth, std::uint64_t count) {
  if (ifs.uniform()) return std::vector<double>(count, 1.0 / static_cast<double>(count));
  std::vector<double> weights(count);
  for (std::uint64_t j = 0; j < count; ++j) weights[j] = cell_measure(Word::from_index(j, ifs.k, depth), ifs.p);
  return weights;
}

Vec2 apply_word(const Word& w, const IfsSpec& ifs, Vec2 point) {
  for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it) point = ifs.maps[static_cast<std::size_t>(*it - 1)](point);
  return point;
}

}  // namespace

StepFunction cell_averages(const RealFunction& f, std::shared_ptr<const Partition> partition, const QuadratureRule& rule) {
  require_uniform(*partition, "cell_averages");
  StepFunction u{partition, std::vector<double>(partition->size())};
  const double h = partition->cell_length();
  for (std::size_t w = 0; w < partition->size(); ++w) {
    const double lo = partition->intervals()[w].lo;
    double avg = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) avg += rule.weights[i] * checked(f(lo + h * rule.nodes[i]), "cell_averages");
    u.values[w] = avg;
  }
  return u;
}

StepKernel kernel_cell_averages(const KernelFunction& kernel, std::shared_ptr<const Partition> partition,
                                const QuadratureRule& rule, std::optional<SupportPruning> pruning) {
  require_uniform(*partition, "kernel_cell_averages");
  const std::size_t n = partition->size();
  const double h = partition->cell_length();
  std::vector<std::vector<std::pair<std::size_t, double>>> rows(n);
  parallel_for(n, [&](std::size_t w) {
    const double xlo = partition->intervals()[w].lo;
    for (std::size_t v = 0; v < n; ++v) {
      if (pruning) {
        const double offset = std::abs(static_cast<double>(w) - static_cast<double>(v));
        double cells_apart = offset;
        if (pruning->periodic) cells_apart = std::min(offset, static_cast<double>(n) - offset);
        const double gap = std::max(0.0, cells_apart - 1.0) * h;
        if (gap >= pruning->radius) continue;
      }
      const double ylo = partition->intervals()[v].lo;
      double sum = 0.0;
      if (rule.split_diagonal && v == w) {
        // Collapsed map of each triangle: (s, s t) below the diagonal, (s t, s) above.
        for (std::size_t a = 0; a < rule.size(); ++a) {
          const double s = rule.nodes[a];
          for (std::size_t b = 0; b < rule.size(); ++b) {
            const double st = s * rule.nodes[b];
            const double both = kernel(xlo + h * s, ylo + h * st) + kernel(xlo + h * st, ylo + h * s);
            sum += (rule.weights[a] * rule.weights[b] * s) * both;
          }
        }
        rows[w].emplace_back(v, checked(sum, "kernel_cell_averages"));
        continue;
      }
      for (std::size_t a = 0; a < rule.size(); ++a) {
        const double x = xlo + h * rule.nodes[a];
        for (std::size_t b = 0; b < rule.size(); ++b) {
          sum += (rule.weights[a] * rule.weights[b]) * kernel(x, ylo + h * rule.nodes[b]);
        }
      }
      rows[w].emplace_back(v, checked(sum, "kernel_cell_averages"));
    }
  });
  return {partition, SparseRows::from_rows(n, std::move(rows))};
}

double integral_of_step(const StepFunction& u) {
  const auto& nu = u.partition->measures();
  double sum = 0.0;
  for (std::size_t w = 0; w < u.size(); ++w) sum += u.values[w] * nu[w];
  return sum;
}

double l2_norm(std::span<const double> values, std::span<const double> measures) {
  double sum = 0.0;
  for (std::size_t w = 0; w < values.size(); ++w) sum += values[w] * values[w] * measures[w];
  return std::sqrt(sum);
}

double l2_norm(const StepFunction& u) { return l2_norm(u.values, u.partition->measures()); }

double l2_distance(std::span<const double> a, std::span<const double> b, std::span<const double> measures) {
  if (a.size() != b.size() || a.size() != measures.size()) throw ValidationError("state length mismatch");
  double sum = 0.0;
  for (std::size_t w = 0; w < a.size(); ++w) sum += (a[w] - b[w]) * (a[w] - b[w]) * measures[w];
  return std::sqrt(sum);
}

double l2_error(const StepFunction& u, const RealFunction& f, const QuadratureRule& rule) {
  const auto& partition = *u.partition;
  require_uniform(partition, "l2_error");
  const double h = partition.cell_length();
  double sum = 0.0;
  for (std::size_t w = 0; w < u.size(); ++w) {
    const double lo = partition.intervals()[w].lo;
    double cell = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double d = u.values[w] - checked(f(lo + h * rule.nodes[i]), "l2_error");
      cell += rule.weights[i] * d * d;
    }
    sum += h * cell;
  }
  return std::sqrt(sum);
}

StepFunction coarsen(const StepFunction& fine, std::shared_ptr<const Partition> coarse) {
  const auto& fp = *fine.partition;
  if (coarse->k() != fp.k() || coarse->level() + 1 != fp.level()) throw ValidationError("coarsen needs levels m and m+1");
  const auto k = static_cast<std::size_t>(fp.k());
  StepFunction out{coarse, std::vector<double>(coarse->size())};
  for (std::size_t w = 0; w < coarse->size(); ++w) {
    double sum = 0.0;
    for (std::size_t c = 0; c < k; ++c) sum += fp.p()[c] * fine.values[w * k + c];
    out.values[w] = sum;
  }
  return out;
}

StepFunction fractal_cell_averages(const PlaneFunction& f, const IfsSpec& ifs, int m, int depth,
                                   std::optional<Vec2> base, const Limits& limits) {
  ifs.validate();
  if (depth < 0) throw ValidationError("depth must be >= 0");
  checked_power(ifs.k, m + depth, limits.max_samples);
  auto partition = std::make_shared<const Partition>(ifs.k, m, ifs.p, limits);
  const Vec2 origin = base.value_or(ifs.barycenter());
  const auto count = checked_power(ifs.k, depth, limits.max_samples);
  std::vector<Vec2> anchors(count);
  for (std::uint64_t j = 0; j < count; ++j) anchors[j] = apply_word(Word::from_index(j, ifs.k, depth), ifs, origin);
  const auto weights = descendant_weights(ifs, depth, count);

  StepFunction u{partition, std::vector<double>(partition->size())};
  parallel_for(partition->size(), [&](std::size_t w) {
    const Word& word = partition->words()[w];
    double sum = 0.0;
    for (std::uint64_t j = 0; j < count; ++j) sum += weights[j] * checked(f(apply_word(word, ifs, anchors[j])), "fractal_cell_averages");
    u.values[w] = sum;
  });
  return u;
}

StepKernel fractal_kernel_averages(const PlaneKernel& kernel, const IfsSpec& ifs, int m, int depth,
                                   std::optional<Vec2> base, const Limits& limits) {
  ifs.validate();
  if (depth < 0) throw ValidationError("depth must be >= 0");
  checked_power(ifs.k, m + depth, limits.max_samples);
  auto partition = std::make_shared<const Partition>(ifs.k, m, ifs.p, limits);
  const Vec2 origin = base.value_or(ifs.barycenter());
  const auto count = checked_power(ifs.k, depth, limits.max_samples);
  const auto weights = descendant_weights(ifs, depth, count);
  const std::size_t n = partition->size();

  // Anchor points f_{w a}(base) for every cell w and descendant a, computed exactly as the coding
  // map computes them.
  std::vector<Vec2> points(n * count);
  for (std::size_t w = 0; w < n; ++w) {
    for (std::uint64_t a = 0; a < count; ++a) {
      points[w * count + a] = project_point(partition->words()[w] + Word::from_index(a, ifs.k, depth), ifs, origin).point;
    }
  }
  std::vector<std::vector<std::pair<std::size_t, double>>> rows(n);
  parallel_for(n, [&](std::size_t w) {
    rows[w].reserve(n);
    for (std::size_t v = 0; v < n; ++v) {
      double sum = 0.0;
      for (std::uint64_t a = 0; a < count; ++a) {
        for (std::uint64_t b = 0; b < count; ++b) {
          sum += (weights[a] * weights[b]) * kernel(points[w * count + a], points[v * count + b]);
        }
      }
      rows[w].emplace_back(v, checked(sum, "fractal_kernel_averages"));
    }
  });
  return {partition, SparseRows::from_rows(n, std::move(rows))};
}

Vec2 coding_map(double xi, const IfsSpec& ifs, int depth, Vec2 base) {
  return project_point(word_of_point(xi, ifs.k, depth), ifs, base).point;
}

KernelFunction pullback_kernel(PlaneKernel kernel, IfsSpec ifs, int depth, std::optional<Vec2> base) {
  ifs.validate();
  const Vec2 origin = base.value_or(ifs.barycenter());
  return [kernel = std::move(kernel), ifs = std::move(ifs), depth, origin](double xi, double eta) {
    return kernel(coding_map(xi, ifs, depth, origin), coding_map(eta, ifs, depth, origin));
  };
}

RealFunction pullback_function(PlaneFunction f, IfsSpec ifs, int depth, std::optional<Vec2> base) {
  ifs.validate();
  const Vec2 origin = base.value_or(ifs.barycenter());
  return [f = std::move(f), ifs = std::move(ifs), depth, origin](double xi) { return f(coding_map(xi, ifs, depth, origin)); };
}

void write_step_function_csv(std::ostream& out, const StepFunction& u) {
  out << "word,value\n";
  for (std::size_t w = 0; w < u.size(); ++w) {
    out << u.partition->words()[w].to_string() << ',' << format_double(u.values[w]) << '\n';
  }
}

StepFunction read_step_function_csv(std::istream& in, std::shared_ptr<const Partition> partition) {
  const auto rows = read_csv(in, {"word", "value"});
  if (rows.size() != partition->size()) throw ValidationError("step function CSV has the wrong number of cells");
  StepFunction u{partition, std::vector<double>(partition->size())};
  std::vector<bool> seen(partition->size(), false);
  for (const auto& row : rows) {
    const Word w = Word::parse(row[0], partition->k());
    if (w.size() != static_cast<std::size_t>(partition->level())) throw ValidationError("word '" + row[0] + "' has the wrong level");
    const auto idx = w.index(partition->k());
    if (seen[idx]) throw ValidationError("duplicate word '" + row[0] + "'");
    seen[idx] = true;
    u.values[idx] = parse_double(row[1]);
  }
  return u;
}

void write_step_kernel_csv(std::ostream& out, const StepKernel& kernel) {
  out << "word_row,word_col,value\n";
  const auto& words = kernel.partition->words();
  for (std::size_t w = 0; w < kernel.entries.size(); ++w) {
    const auto cols = kernel.entries.row_cols(w);
    const auto vals = kernel.entries.row_values(w);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      out << words[w].to_string() << ',' << words[cols[i]].to_string() << ',' << format_double(vals[i]) << '\n';
    }
  }
}

}  // namespace sspde
