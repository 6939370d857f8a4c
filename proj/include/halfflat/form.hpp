#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cassert>
#include <cstdint>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "halfflat/scalar.hpp"

namespace halfflat {

inline constexpr int kMaxDim = 7;

/// Strictly increasing multi-index encoded as a bitmask (bit i = generator
/// i, 0-based). Degree is the popcount.
using Mask = std::uint8_t;

inline int degree_of(Mask m) { return std::popcount(static_cast<unsigned>(m)); }

/// Sign of e^a ^ e^b relative to e^(a|b), or 0 when the masks overlap.
/// The sign is (-1)^(number of pairs i in a, j in b with i > j).
inline int wedge_sign(Mask a, Mask b) {
  if (a & b) return 0;
  int inversions = 0;
  for (unsigned rest = b; rest; rest &= rest - 1) {
    const int j = std::countr_zero(rest);
    inversions += std::popcount(static_cast<unsigned>(a) >> (j + 1));
  }
  return (inversions & 1) ? -1 : 1;
}

/// Masks of a given degree in dimension n, in lexicographic order of the
/// index tuples, and the inverse lookup.
class MaskTable {
public:
  static const std::vector<Mask> &masks(int n, int k) {
    static const std::vector<Mask> none;
    if (k < 0 || k > n) return none;
    return instance().masks_[n][k];
  }
  static int index(int n, Mask m) { return instance().index_[n][m]; }
  static int count(int n, int k) {
    return (k < 0 || k > n) ? 0 : static_cast<int>(masks(n, k).size());
  }

private:
  MaskTable() {
    for (int n = 0; n <= kMaxDim; ++n) {
      masks_[n].resize(n + 1);
      index_[n].fill(-1);
      for (int k = 0; k <= n; ++k) {
        std::vector<int> pick(k);
        std::function<void(int, int)> rec = [&](int start, int depth) {
          if (depth == k) {
            Mask m = 0;
            for (int i : pick) m |= static_cast<Mask>(1u << i);
            index_[n][m] = static_cast<int>(masks_[n][k].size());
            masks_[n][k].push_back(m);
            return;
          }
          for (int i = start; i < n; ++i) {
            pick[depth] = i;
            rec(i + 1, depth + 1);
          }
        };
        rec(0, 0);
      }
    }
  }
  static const MaskTable &instance() {
    static const MaskTable table;
    return table;
  }
  std::array<std::vector<std::vector<Mask>>, kMaxDim + 1> masks_;
  std::array<std::array<int, 256>, kMaxDim + 1> index_{};
};

/// 1-indexed digit string of a mask, e.g. 0b1011 -> "124".
inline std::string mask_digits(Mask m) {
  std::string s;
  for (int i = 0; i < 8; ++i)
    if (m & (1u << i)) s.push_back(static_cast<char>('1' + i));
  return s;
}

/// Inverse of mask_digits; digits must be strictly increasing.
inline Mask digits_mask(const std::string &s, int dim) {
  Mask m = 0;
  int last = -1;
  for (char ch : s) {
    const int i = ch - '1';
    if (i < 0 || i >= dim) throw std::invalid_argument("multi-index digit out of range: " + s);
    if (i <= last) throw std::invalid_argument("multi-index not strictly increasing: " + s);
    m |= static_cast<Mask>(1u << i);
    last = i;
  }
  return m;
}

template <class S>
using Vector = std::vector<S>;

/// Alternating form of fixed degree on a space of dimension <= 7, stored as
/// the dense coefficient list over MaskTable::masks(dim, degree).
template <class S>
class Form {
public:
  Form() = default;
  Form(int dim, int degree) : dim_(dim), degree_(degree) {
    if (dim < 0 || dim > kMaxDim) throw std::invalid_argument("form dimension out of range");
    coeffs_.assign(MaskTable::count(dim, degree), S(0));
  }

  static Form constant(int dim, const S &value) {
    Form f(dim, 0);
    f.coeffs_[0] = value;
    return f;
  }
  /// e^(index+1), 0-based index.
  static Form generator(int dim, int index, const S &c = S(1)) {
    Form f(dim, 1);
    f.coeffs_[index] = c;
    return f;
  }
  static Form monomial(int dim, Mask m, const S &c = S(1)) {
    Form f(dim, degree_of(m));
    f[m] = c;
    return f;
  }

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  std::size_t size() const { return coeffs_.size(); }

  const std::vector<Mask> &masks() const { return MaskTable::masks(dim_, degree_); }
  Mask mask_at(std::size_t i) const { return masks()[i]; }

  S &operator[](Mask m) { return coeffs_[slot(m)]; }
  const S &operator[](Mask m) const { return coeffs_[slot(m)]; }
  S &at(std::size_t i) { return coeffs_[i]; }
  const S &at(std::size_t i) const { return coeffs_[i]; }
  const std::vector<S> &coefficients() const { return coeffs_; }
  std::vector<S> &coefficients() { return coeffs_; }

  bool is_zero(double tol = 0.0) const {
    return std::all_of(coeffs_.begin(), coeffs_.end(),
                       [tol](const S &c) { return halfflat::is_zero(c, tol); });
  }
  /// Largest coefficient magnitude (value part for jets).
  double max_abs() const {
    double m = 0.0;
    for (const S &c : coeffs_) m = std::max(m, magnitude(c));
    return m;
  }

  Form &operator+=(const Form &o) {
    check_same(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  Form &operator-=(const Form &o) {
    check_same(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  Form &operator*=(const S &s) {
    for (S &c : coeffs_) c *= s;
    return *this;
  }
  friend Form operator+(Form a, const Form &b) { return a += b; }
  friend Form operator-(Form a, const Form &b) { return a -= b; }
  friend Form operator*(Form a, const S &s) { return a *= s; }
  friend Form operator*(const S &s, Form a) { return a *= s; }
  friend Form operator-(Form a) {
    for (S &c : a.coeffs_) c = -c;
    return a;
  }
  friend bool operator==(const Form &a, const Form &b) {
    return a.dim_ == b.dim_ && a.degree_ == b.degree_ && a.coeffs_ == b.coeffs_;
  }

  /// Coefficient-wise map into another scalar type.
  template <class T, class F>
  Form<T> map(F &&f) const {
    Form<T> out(dim_, degree_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) out.at(i) = f(coeffs_[i]);
    return out;
  }

  /// Human readable "2*e124 - e35" form with 1-indexed generators.
  std::string str() const {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (halfflat::is_zero(coeffs_[i], 0.0)) continue;
      std::string c = scalar_string(coeffs_[i]);
      std::string mon = degree_ == 0 ? "" : "e" + mask_digits(mask_at(i));
      bool neg = !c.empty() && c[0] == '-';
      if (neg) c = c.substr(1);
      if (!first) os << (neg ? " - " : " + ");
      else if (neg) os << "-";
      if (mon.empty()) os << c;
      else if (c == "1") os << mon;
      else os << c << "*" << mon;
      first = false;
    }
    return first ? "0" : os.str();
  }

private:
  std::size_t slot(Mask m) const {
    assert(degree_of(m) == degree_);
    return static_cast<std::size_t>(MaskTable::index(dim_, m));
  }
  void check_same(const Form &o) const {
    if (dim_ != o.dim_ || degree_ != o.degree_)
      throw std::invalid_argument("form dimension/degree mismatch");
  }

  int dim_ = 0;
  int degree_ = 0;
  std::vector<S> coeffs_ = std::vector<S>(1, S(0));
};

template <class S>
Form<S> wedge(const Form<S> &a, const Form<S> &b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("wedge: dimension mismatch");
  const int n = a.dim();
  const int k = a.degree() + b.degree();
  Form<S> out(n, k);
  if (k > n) return out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (is_zero(a.at(i))) continue;
    const Mask ma = a.mask_at(i);
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (is_zero(b.at(j))) continue;
      const Mask mb = b.mask_at(j);
      const int s = wedge_sign(ma, mb);
      if (s == 0) continue;
      if (s > 0) out[ma | mb] += a.at(i) * b.at(j);
      else out[ma | mb] -= a.at(i) * b.at(j);
    }
  }
  return out;
}

/// Interior product of a vector (components over the generator basis) with
/// a form; the degree drops by one, degree-0 input gives the zero 0-form.
template <class S>
Form<S> interior(const Vector<S> &v, const Form<S> &a) {
  const int n = a.dim();
  if (static_cast<int>(v.size()) != n) throw std::invalid_argument("interior: vector length");
  if (a.degree() == 0) return Form<S>(n, 0);
  Form<S> out(n, a.degree() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (is_zero(a.at(i))) continue;
    const Mask m = a.mask_at(i);
    int pos = 0;
    for (int j = 0; j < n; ++j) {
      if (!(m & (1u << j))) continue;
      if (!is_zero(v[j])) {
        const Mask rest = static_cast<Mask>(m & ~(1u << j));
        if (pos % 2 == 0) out[rest] += v[j] * a.at(i);
        else out[rest] -= v[j] * a.at(i);
      }
      ++pos;
    }
  }
  return out;
}

/// Standard basis vector e_(index+1).
template <class S>
Vector<S> basis_vector(int dim, int index) {
  Vector<S> v(dim, S(0));
  v[index] = S(1);
  return v;
}

/// Evaluates a 1-form on a vector.
template <class S>
S evaluate(const Form<S> &one_form, const Vector<S> &v) {
  S s(0);
  for (int i = 0; i < one_form.dim(); ++i) s += one_form.at(i) * v[i];
  return s;
}

/// 1-form with the given coefficients over e^1..e^n.
template <class S>
Form<S> one_form(const Vector<S> &coeffs) {
  Form<S> f(static_cast<int>(coeffs.size()), 1);
  for (std::size_t i = 0; i < coeffs.size(); ++i) f.at(i) = coeffs[i];
  return f;
}

template <class S>
Vector<S> one_form_coeffs(const Form<S> &f) {
  if (f.degree() != 1) throw std::invalid_argument("expected a 1-form");
  return f.coefficients();
}

/// Top-degree coefficient (coefficient of e^1^...^e^n).
template <class S>
S top_coefficient(const Form<S> &f) {
  if (f.degree() != f.dim()) throw std::invalid_argument("expected a top-degree form");
  return f.at(0);
}

template <class S>
Form<S> power(const Form<S> &a, int k) {
  Form<S> out = Form<S>::constant(a.dim(), S(1));
  for (int i = 0; i < k; ++i) out = wedge(out, a);
  return out;
}

/// Change of coframe: substitutes e^a = sum_i sub[a][i] f^i, where `sub` has
/// one row per old generator and one column per new generator. The result is
/// expressed over f^1..f^m.
template <class S>
Form<S> substitute(const Form<S> &a, const std::vector<std::vector<S>> &sub) {
  const int n_old = a.dim();
  if (static_cast<int>(sub.size()) != n_old) throw std::invalid_argument("substitute: row count");
  const int n_new = sub.empty() ? 0 : static_cast<int>(sub[0].size());
  std::vector<Form<S>> images;
  images.reserve(n_old);
  for (int i = 0; i < n_old; ++i) images.push_back(one_form<S>(sub[i]));
  Form<S> out(n_new, a.degree());
  for (std::size_t idx = 0; idx < a.size(); ++idx) {
    if (is_zero(a.at(idx))) continue;
    Form<S> term = Form<S>::constant(n_new, a.at(idx));
    const Mask m = a.mask_at(idx);
    for (int i = 0; i < n_old; ++i)
      if (m & (1u << i)) term = wedge(term, images[i]);
    if (term.degree() == out.degree()) out += term;
  }
  return out;
}

/// Re-indexes a form into a bigger space: generator i goes to slot map[i].
template <class S>
Form<S> embed(const Form<S> &a, int new_dim, const std::vector<int> &map) {
  Form<S> out(new_dim, a.degree());
  for (std::size_t idx = 0; idx < a.size(); ++idx) {
    if (is_zero(a.at(idx))) continue;
    const Mask m = a.mask_at(idx);
    Mask nm = 0;
    std::vector<int> order;
    for (int i = 0; i < a.dim(); ++i)
      if (m & (1u << i)) order.push_back(map[i]);
    for (int j : order) nm |= static_cast<Mask>(1u << j);
    // sign of sorting the images into increasing order
    int inv = 0;
    for (std::size_t p = 0; p < order.size(); ++p)
      for (std::size_t q = p + 1; q < order.size(); ++q)
        if (order[p] > order[q]) ++inv;
    if (inv % 2) out[nm] -= a.at(idx);
    else out[nm] += a.at(idx);
  }
  return out;
}

/// Same form regarded in dimension new_dim >= dim with generators kept in place.
template <class S>
Form<S> extend(const Form<S> &a, int new_dim) {
  std::vector<int> map(a.dim());
  for (int i = 0; i < a.dim(); ++i) map[i] = i;
  return embed(a, new_dim, map);
}

/// Restriction to the first new_dim generators; throws if the form uses
/// any other generator.
template <class S>
Form<S> restrict_to(const Form<S> &a, int new_dim) {
  Form<S> out(new_dim, a.degree());
  const Mask keep = static_cast<Mask>((1u << new_dim) - 1);
  for (std::size_t idx = 0; idx < a.size(); ++idx) {
    if (is_zero(a.at(idx))) continue;
    const Mask m = a.mask_at(idx);
    if (m & ~keep) throw std::invalid_argument("restrict_to: form involves dropped generators");
    out[m] = a.at(idx);
  }
  return out;
}

template <class T, class S>
Form<T> promote_form(const Form<S> &a) {
  return a.template map<T>([](const S &c) { return promote<T>(c); });
}

/// Value / first / second derivative of a jet-valued form.
inline Form<double> jet_component(const Form<Jet> &a, int order) {
  return a.map<double>([order](const Jet &c) {
    const double x = order == 0 ? c.v : order == 1 ? c.d1 : c.d2;
    if (!std::isfinite(x) && std::isfinite(c.v))
      throw DomainError("requested derivative order is not available");
    if (!std::isfinite(x)) throw DomainError("coefficient evaluated at a pole");
    return x;
  });
}

/// Inverse of parse_form for nonzero coefficients, e.g. "2*e124-e35+1/2*e36".
template <class S>
std::string form_string(const Form<S> &a) {
  std::string out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const S &c = a.at(i);
    if (is_zero(c)) continue;
    std::string v = scalar_string(c);
    const bool neg = !v.empty() && v[0] == '-';
    if (neg) v.erase(0, 1);
    if (neg) out += '-';
    else if (!out.empty()) out += '+';
    if (v != "1") out += v + "*";
    out += "e" + mask_digits(a.mask_at(i));
  }
  return out.empty() ? "0" : out;
}

/// Parses "2*e124 - e35 + 1/2*e653": monomial digits are 1-based and may come
/// in any order (the permutation sign is applied).
Form<Rational> parse_form(const std::string &s, int dim, int degree);

}  // namespace halfflat
