#pragma once

// Words over {1..k}, cylinder cells, Bernoulli measures, and similitude IFS in the plane.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sspde/common.hpp"

namespace sspde {

/// Finite word w = (w_1 ... w_m) over the alphabet {1..k}. The empty word is allowed.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<int> letters) : letters_(std::move(letters)) {}
  Word(std::initializer_list<int> letters) : letters_(letters) {}

  std::size_t size() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  int operator[](std::size_t i) const { return letters_[i]; }
  const std::vector<int>& letters() const noexcept { return letters_; }

  /// Concatenation w·v.
  Word operator+(const Word& other) const;
  Word prefix(std::size_t n) const;

  /// Position of the word among all words of the same length in lexicographic order.
  std::uint64_t index(int k) const;
  static Word from_index(std::uint64_t index, int k, int m);

  /// Digit-string form, e.g. "213". The empty word serializes to "".
  std::string to_string() const;
  static Word parse(std::string_view digits, int k);

  void validate(int k) const;

  auto operator<=>(const Word&) const = default;

 private:
  std::vector<int> letters_;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  bool operator==(const Vec2&) const = default;
};

double norm(Vec2 v);

struct Mat2 {
  double a = 1.0, b = 0.0;
  double c = 0.0, d = 1.0;

  Vec2 operator*(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  /// Spectral norm.
  double norm() const;
};

/// x -> linear * x + offset with contraction ratio `ratio`.
struct Similitude {
  Mat2 linear;
  Vec2 offset;
  double ratio = 0.5;

  Vec2 operator()(Vec2 v) const { return linear * v + offset; }
  Vec2 fixed_point() const;
};

/// Probabilistic IFS: k similitudes with a probability vector.
struct IfsSpec {
  int k = 0;
  std::vector<Similitude> maps;
  std::vector<double> p;

  /// Throws ValidationError when a map is not a contraction with the stated ratio or p is not a
  /// probability vector.
  void validate() const;

  /// Common contraction ratio q when all ratios agree.
  std::optional<double> common_ratio() const;
  /// log k / log(1/q); requires a common ratio.
  double similarity_dimension() const;
  /// Barycenter of the self-similar measure, the solution of c = sum_i p_i f_i(c).
  Vec2 barycenter() const;
  /// Diameter of the attractor, estimated from the convex hull of the fixed points (exact for
  /// the presets, whose attractor hull is spanned by the fixed points).
  double diameter() const;
  bool uniform() const;
};

/// Sierpinski gasket: three half-scale maps toward (0,0), (1,0), (1/2, sqrt(3)/2), uniform p.
IfsSpec sg_preset();
/// Model IFS on [0,1] (embedded as [0,1] x {0}): g_i(x) = x/k + (i-1)/k, uniform p.
IfsSpec interval_preset(int k);

/// All k^m words of length m in lexicographic order.
std::vector<Word> enumerate_words(int k, int m, const Limits& limits = {});

/// nu(K_w) = p_{w_1} ... p_{w_m}; 1 for the empty word.
double cell_measure(const Word& w, std::span<const double> p);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
  double midpoint() const { return 0.5 * (lo + hi); }
};

/// Q_w = g_w([0,1]) = [sum_i (w_i - 1) k^{-i}, + k^{-m}].
Interval interval_cell(const Word& w, int k);

/// Level-m word whose half-open cell [a, a + k^{-m}) contains x; x = 1 maps to the last word.
Word word_of_point(double x, int k, int m);
/// Lexicographic index of word_of_point(x, k, m).
std::uint64_t cell_index_of_point(double x, int k, int m);

struct ProjectedPoint {
  Vec2 point;
  /// (prod_i r_{w_i}) * diam(K): distance bound to the projection of any infinite extension of w
  /// when the base point lies in K.
  double error_bound = 0.0;
};

/// f_{w_1} o ... o f_{w_m}(base).
ProjectedPoint project_point(const Word& w, const IfsSpec& ifs, Vec2 base);

/// Level-m cell structure: words, measures, and intervals of the model IFS on [0,1].
class Partition {
 public:
  Partition(int k, int level, std::vector<double> p, const Limits& limits = {});
  static Partition uniform(int k, int level, const Limits& limits = {});

  int k() const noexcept { return k_; }
  int level() const noexcept { return level_; }
  std::size_t size() const noexcept { return words_.size(); }
  const std::vector<Word>& words() const noexcept { return words_; }
  const std::vector<double>& measures() const noexcept { return measures_; }
  const std::vector<Interval>& intervals() const noexcept { return intervals_; }
  const std::vector<double>& p() const noexcept { return p_; }
  /// Common cell length k^{-m}.
  double cell_length() const noexcept { return cell_length_; }
  bool uniform_measure() const noexcept { return uniform_; }

 private:
  int k_;
  int level_;
  std::vector<double> p_;
  std::vector<Word> words_;
  std::vector<double> measures_;
  std::vector<Interval> intervals_;
  double cell_length_;
  bool uniform_;
};

/// Rate bookkeeping for the two-scale error law.
struct RateModel {
  int k = 2;
  double q = 0.5;
  double alpha = 1.0;
  double beta = 1.0;

  double similarity_dimension() const;
  std::uint64_t cells(int m) const;
  /// Balanced nonlocal scale eps = N_m^{-alpha/(beta s)} = q^{alpha m / beta}.
  double balanced_epsilon(int m) const;
};

}  // namespace sspde
