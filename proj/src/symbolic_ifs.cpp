#include "sspde/symbolic_ifs.hpp"

#include <cmath>
#include <numeric>

namespace sspde {

Word Word::operator+(const Word& other) const {
  std::vector<int> out = letters_;
  out.insert(out.end(), other.letters_.begin(), other.letters_.end());
  return Word(std::move(out));
}

Word Word::prefix(std::size_t n) const {
  if (n > letters_.size()) throw ValidationError("prefix longer than word");
  return Word(std::vector<int>(letters_.begin(), letters_.begin() + static_cast<std::ptrdiff_t>(n)));
}

std::uint64_t Word::index(int k) const {
  std::uint64_t idx = 0;
  for (int letter : letters_) idx = idx * static_cast<std::uint64_t>(k) + static_cast<std::uint64_t>(letter - 1);
  return idx;
}

Word Word::from_index(std::uint64_t index, int k, int m) {
  std::vector<int> letters(static_cast<std::size_t>(m));
  for (int i = m - 1; i >= 0; --i) {
    letters[static_cast<std::size_t>(i)] = static_cast<int>(index % static_cast<std::uint64_t>(k)) + 1;
    index /= static_cast<std::uint64_t>(k);
  }
  return Word(std::move(letters));
}

std::string Word::to_string() const {
  std::string s;
  s.reserve(letters_.size());
  for (int letter : letters_) {
    if (letter < 1 || letter > 9) throw ValidationError("digit-string form requires letters in 1..9");
    s.push_back(static_cast<char>('0' + letter));
  }
  return s;
}

Word Word::parse(std::string_view digits, int k) {
  if (k > 9) throw ValidationError("digit-string form requires k <= 9");
  std::vector<int> letters;
  letters.reserve(digits.size());
  for (char c : digits) {
    if (c < '1' || c > '0' + k) {
      throw ValidationError("invalid letter '" + std::string(1, c) + "' for k = " + std::to_string(k));
    }
    letters.push_back(c - '0');
  }
  return Word(std::move(letters));
}

void Word::validate(int k) const {
  for (int letter : letters_) {
    if (letter < 1 || letter > k) {
      throw ValidationError("letter " + std::to_string(letter) + " outside 1.." + std::to_string(k));
    }
  }
}

double norm(Vec2 v) { return std::hypot(v.x, v.y); }

double Mat2::norm() const {
  // Largest singular value from the eigenvalues of A^T A.
  const double p = a * a + c * c;
  const double q = a * b + c * d;
  const double r = b * b + d * d;
  const double mean = 0.5 * (p + r);
  const double dev = std::sqrt(0.25 * (p - r) * (p - r) + q * q);
  return std::sqrt(mean + dev);
}

Vec2 Similitude::fixed_point() const {
  // (I - A) x = offset
  const double m00 = 1.0 - linear.a, m01 = -linear.b;
  const double m10 = -linear.c, m11 = 1.0 - linear.d;
  const double det = m00 * m11 - m01 * m10;
  return {(m11 * offset.x - m01 * offset.y) / det, (m00 * offset.y - m10 * offset.x) / det};
}

void IfsSpec::validate() const {
  if (k < 2) throw ValidationError("IFS needs k >= 2 maps");
  if (maps.size() != static_cast<std::size_t>(k)) throw ValidationError("IFS map count differs from k");
  if (p.size() != static_cast<std::size_t>(k)) throw ValidationError("probability vector length differs from k");
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const auto& f = maps[i];
    if (!(f.ratio > 0.0 && f.ratio < 1.0)) {
      throw ValidationError("map " + std::to_string(i + 1) + ": contraction ratio must lie in (0,1)");
    }
    const double n = f.linear.norm();
    if (std::abs(n - f.ratio) > 1e-9) {
      throw ValidationError("map " + std::to_string(i + 1) + ": linear part has norm " + std::to_string(n) +
                            " but ratio is " + std::to_string(f.ratio));
    }
  }
  double sum = 0.0;
  for (double pi : p) {
    if (!(pi > 0.0)) throw ValidationError("probabilities must be > 0");
    sum += pi;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ValidationError("probabilities must sum to 1");
}

std::optional<double> IfsSpec::common_ratio() const {
  if (maps.empty()) return std::nullopt;
  const double r = maps.front().ratio;
  for (const auto& f : maps) {
    if (f.ratio != r) return std::nullopt;
  }
  return r;
}

double IfsSpec::similarity_dimension() const {
  const auto r = common_ratio();
  if (!r) throw ValidationError("similarity dimension needs a common contraction ratio");
  return std::log(static_cast<double>(k)) / std::log(1.0 / *r);
}

Vec2 IfsSpec::barycenter() const {
  // c = sum p_i (A_i c + b_i)  =>  (I - sum p_i A_i) c = sum p_i b_i
  Mat2 a{0, 0, 0, 0};
  Vec2 rhs;
  for (int i = 0; i < k; ++i) {
    const auto& f = maps[static_cast<std::size_t>(i)];
    const double w = p[static_cast<std::size_t>(i)];
    a.a += w * f.linear.a;
    a.b += w * f.linear.b;
    a.c += w * f.linear.c;
    a.d += w * f.linear.d;
    rhs = rhs + w * f.offset;
  }
  Similitude avg{a, rhs, 0.5};
  return avg.fixed_point();
}

double IfsSpec::diameter() const {
  double diam = 0.0;
  for (const auto& f : maps) {
    for (const auto& g : maps) diam = std::max(diam, norm(f.fixed_point() - g.fixed_point()));
  }
  return diam;
}

bool IfsSpec::uniform() const {
  return std::all_of(p.begin(), p.end(), [&](double pi) { return pi == p.front(); });
}

IfsSpec sg_preset() {
  const std::array<Vec2, 3> vertices{Vec2{0.0, 0.0}, Vec2{1.0, 0.0}, Vec2{0.5, std::sqrt(3.0) / 2.0}};
  IfsSpec ifs;
  ifs.k = 3;
  for (const auto& v : vertices) ifs.maps.push_back({Mat2{0.5, 0.0, 0.0, 0.5}, 0.5 * v, 0.5});
  ifs.p.assign(3, 1.0 / 3.0);
  return ifs;
}

IfsSpec interval_preset(int k) {
  if (k < 2) throw ValidationError("interval preset needs k >= 2");
  IfsSpec ifs;
  ifs.k = k;
  const double r = 1.0 / k;
  for (int i = 0; i < k; ++i) {
    ifs.maps.push_back({Mat2{r, 0.0, 0.0, r}, Vec2{static_cast<double>(i) / k, 0.0}, r});
  }
  ifs.p.assign(static_cast<std::size_t>(k), r);
  return ifs;
}

std::vector<Word> enumerate_words(int k, int m, const Limits& limits) {
  const std::uint64_t n = checked_power(k, m, limits.max_cells);
  std::vector<Word> words;
  words.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) words.push_back(Word::from_index(i, k, m));
  return words;
}

double cell_measure(const Word& w, std::span<const double> p) {
  double measure = 1.0;
  for (int letter : w.letters()) {
    if (letter < 1 || static_cast<std::size_t>(letter) > p.size()) throw ValidationError("letter outside alphabet");
    measure *= p[static_cast<std::size_t>(letter - 1)];
  }
  return measure;
}

Interval interval_cell(const Word& w, int k) {
  w.validate(k);
  double n = 1.0;
  for (std::size_t i = 0; i < w.size(); ++i) n *= k;
  const auto j = static_cast<double>(w.index(k));
  return {j / n, (j + 1.0) / n};
}

std::uint64_t cell_index_of_point(double x, int k, int m) {
  const std::uint64_t n = checked_power(k, m, ~std::uint64_t{0} / static_cast<std::uint64_t>(k));
  if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("point outside [0,1]");
  const double scaled = std::floor(x * static_cast<double>(n));
  const auto j = static_cast<std::uint64_t>(scaled);
  return std::min(j, n - 1);
}

Word word_of_point(double x, int k, int m) { return Word::from_index(cell_index_of_point(x, k, m), k, m); }

ProjectedPoint project_point(const Word& w, const IfsSpec& ifs, Vec2 base) {
  w.validate(ifs.k);
  Vec2 point = base;
  double contraction = 1.0;
  for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it) {
    const auto& f = ifs.maps[static_cast<std::size_t>(*it - 1)];
    point = f(point);
    contraction *= f.ratio;
  }
  return {point, contraction * ifs.diameter()};
}

Partition::Partition(int k, int level, std::vector<double> p, const Limits& limits)
    : k_(k), level_(level), p_(std::move(p)) {
  if (p_.size() != static_cast<std::size_t>(k)) throw ValidationError("probability vector length differs from k");
  double sum = 0.0;
  for (double pi : p_) {
    if (!(pi > 0.0)) throw ValidationError("probabilities must be > 0");
    sum += pi;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ValidationError("probabilities must sum to 1");
  words_ = enumerate_words(k, level, limits);
  uniform_ = std::all_of(p_.begin(), p_.end(), [&](double pi) { return pi == p_.front(); });
  double n = 1.0;
  for (int i = 0; i < level; ++i) n *= k;
  cell_length_ = 1.0 / n;
  measures_.reserve(words_.size());
  intervals_.reserve(words_.size());
  for (std::size_t j = 0; j < words_.size(); ++j) {
    // Uniform p gives k^{-m} exactly rather than a product of rounded 1/k factors.
    measures_.push_back(uniform_ ? cell_length_ : cell_measure(words_[j], p_));
    intervals_.push_back({static_cast<double>(j) / n, static_cast<double>(j + 1) / n});
  }
}

Partition Partition::uniform(int k, int level, const Limits& limits) {
  if (k < 2) throw ValidationError("alphabet size k must be >= 2");
  return Partition(k, level, std::vector<double>(static_cast<std::size_t>(k), 1.0 / k), limits);
}

double RateModel::similarity_dimension() const { return std::log(static_cast<double>(k)) / std::log(1.0 / q); }

std::uint64_t RateModel::cells(int m) const { return checked_power(k, m, ~std::uint64_t{0} / static_cast<std::uint64_t>(k)); }

double RateModel::balanced_epsilon(int m) const {
  const double s = similarity_dimension();
  return std::pow(static_cast<double>(cells(m)), -alpha / (beta * s));
}

}  // namespace sspde
