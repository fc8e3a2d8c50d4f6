#pragma once

// Dense matrices over Z/n and Gaussian elimination over Z/p.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "symba/error.hpp"

namespace symba {

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = r * b % m;
    b = b * b % m;
    e >>= 1;
  }
  return r;
}

// Inverse of a unit modulo a prime.
inline std::uint64_t inv_mod_prime(std::uint64_t a, std::uint64_t p) { return pow_mod(a, p - 2, p); }

inline void require_prime(std::uint64_t p) {
  if (!is_prime(p)) {
    fail(Errc::unsupported_modulus,
         "linear solving needs a prime modulus, got " + std::to_string(p));
  }
}

class ModMatrix {
 public:
  ModMatrix() = default;
  ModMatrix(std::size_t rows, std::size_t cols, std::uint64_t modulus)
      : rows_(rows), cols_(cols), mod_(modulus), a_(rows * cols, 0) {
    if (modulus < 1 || modulus > (std::uint64_t{1} << 31)) {
      fail(Errc::invalid_input, "modulus out of range: " + std::to_string(modulus));
    }
  }

  static ModMatrix identity(std::size_t n, std::uint64_t modulus) {
    ModMatrix m(n, n, modulus);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::uint64_t modulus() const { return mod_; }

  std::uint64_t operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
  void set(std::size_t i, std::size_t j, std::uint64_t v) {
    a_[i * cols_ + j] = static_cast<std::uint32_t>(v % mod_);
  }
  void add_to(std::size_t i, std::size_t j, std::uint64_t v) {
    a_[i * cols_ + j] = static_cast<std::uint32_t>((a_[i * cols_ + j] + v % mod_) % mod_);
  }

  bool is_zero() const {
    for (auto v : a_)
      if (v) return false;
    return true;
  }

  ModMatrix transpose() const {
    ModMatrix t(cols_, rows_, mod_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t.a_[j * rows_ + i] = a_[i * cols_ + j];
    return t;
  }

  friend ModMatrix operator*(const ModMatrix& x, const ModMatrix& y) {
    if (x.cols_ != y.rows_ || x.mod_ != y.mod_) fail(Errc::invalid_input, "matrix shape mismatch");
    ModMatrix r(x.rows_, y.cols_, x.mod_);
    for (std::size_t i = 0; i < x.rows_; ++i)
      for (std::size_t k = 0; k < x.cols_; ++k) {
        std::uint64_t v = x.a_[i * x.cols_ + k];
        if (!v) continue;
        for (std::size_t j = 0; j < y.cols_; ++j) {
          auto& out = r.a_[i * r.cols_ + j];
          out = static_cast<std::uint32_t>((out + v * y.a_[k * y.cols_ + j]) % x.mod_);
        }
      }
    return r;
  }

  friend ModMatrix operator+(const ModMatrix& x, const ModMatrix& y) {
    if (x.rows_ != y.rows_ || x.cols_ != y.cols_ || x.mod_ != y.mod_)
      fail(Errc::invalid_input, "matrix shape mismatch");
    ModMatrix r = x;
    for (std::size_t i = 0; i < r.a_.size(); ++i)
      r.a_[i] = static_cast<std::uint32_t>((std::uint64_t{r.a_[i]} + y.a_[i]) % r.mod_);
    return r;
  }

  std::vector<std::uint64_t> apply(const std::vector<std::uint64_t>& v) const {
    if (v.size() != cols_) fail(Errc::invalid_input, "vector length mismatch");
    std::vector<std::uint64_t> r(rows_, 0);
    for (std::size_t i = 0; i < rows_; ++i) {
      std::uint64_t s = 0;
      for (std::size_t j = 0; j < cols_; ++j) s = (s + std::uint64_t{a_[i * cols_ + j]} * v[j]) % mod_;
      r[i] = s;
    }
    return r;
  }

  friend bool operator==(const ModMatrix&, const ModMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::uint64_t mod_ = 2;
  std::vector<std::uint32_t> a_;
};

namespace detail {

// In-place reduced row echelon form over Z/p; returns pivot columns.
inline std::vector<std::size_t> rref(ModMatrix& m, std::size_t pivot_cols) {
  const std::uint64_t p = m.modulus();
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < pivot_cols && row < m.rows(); ++col) {
    std::size_t sel = row;
    while (sel < m.rows() && m(sel, col) == 0) ++sel;
    if (sel == m.rows()) continue;
    if (sel != row)
      for (std::size_t j = 0; j < m.cols(); ++j) {
        auto t = m(row, j);
        m.set(row, j, m(sel, j));
        m.set(sel, j, t);
      }
    auto inv = inv_mod_prime(m(row, col), p);
    for (std::size_t j = 0; j < m.cols(); ++j) m.set(row, j, m(row, j) * inv % p);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == row) continue;
      auto f = m(i, col);
      if (!f) continue;
      for (std::size_t j = 0; j < m.cols(); ++j) m.set(i, j, m(i, j) + (p - f) * m(row, j) % p);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace detail

inline std::size_t rank(const ModMatrix& a) {
  require_prime(a.modulus());
  ModMatrix m = a;
  return detail::rref(m, m.cols()).size();
}

// Some X with A·X = B (free variables set to zero), or nullopt.
inline std::optional<ModMatrix> solve(const ModMatrix& a, const ModMatrix& b) {
  require_prime(a.modulus());
  if (a.rows() != b.rows() || a.modulus() != b.modulus()) fail(Errc::invalid_input, "solve shape mismatch");
  ModMatrix aug(a.rows(), a.cols() + b.cols(), a.modulus());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) aug.set(i, j, a(i, j));
    for (std::size_t j = 0; j < b.cols(); ++j) aug.set(i, a.cols() + j, b(i, j));
  }
  auto pivots = detail::rref(aug, a.cols());
  for (std::size_t i = pivots.size(); i < aug.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j)
      if (aug(i, a.cols() + j)) return std::nullopt;
  ModMatrix x(a.cols(), b.cols(), a.modulus());
  for (std::size_t r = 0; r < pivots.size(); ++r)
    for (std::size_t j = 0; j < b.cols(); ++j) x.set(pivots[r], j, aug(r, a.cols() + j));
  return x;
}

inline std::optional<ModMatrix> inverse(const ModMatrix& a) {
  if (a.rows() != a.cols()) fail(Errc::invalid_input, "inverse of a non-square matrix");
  auto x = solve(a, ModMatrix::identity(a.rows(), a.modulus()));
  if (!x || !((a * *x) == ModMatrix::identity(a.rows(), a.modulus()))) return std::nullopt;
  return x;
}

// Basis of {v : A·v = 0}, one vector per free column, in column order.
inline std::vector<std::vector<std::uint64_t>> kernel_basis(const ModMatrix& a) {
  require_prime(a.modulus());
  const std::uint64_t p = a.modulus();
  ModMatrix m = a;
  auto pivots = detail::rref(m, m.cols());
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<std::vector<std::uint64_t>> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    std::vector<std::uint64_t> v(m.cols(), 0);
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = (p - m(r, free)) % p;
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace symba
