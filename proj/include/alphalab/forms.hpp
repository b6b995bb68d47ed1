#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "alphalab/rational.hpp"
#include "alphalab/rng.hpp"

namespace alphalab::forms {

using Complex = std::complex<double>;

inline double magnitude(const Complex& z) { return std::abs(z); }
inline double magnitude(const Rational& q) { return std::abs(to_double(q)); }

template <class Scalar>
Scalar scalar_from_bigint(const BigInt& n) {
  if constexpr (std::is_same_v<Scalar, Rational>) {
    return Rational(n);
  } else {
    return Scalar(n.template convert_to<double>());
  }
}

// Homogeneous form of degree d in (z1, z2). coeff(k) multiplies z1^{d-k} z2^k,
// i.e. coefficients run by descending power of the affine variable z = z1/z2.
template <class Scalar>
class BasicBinaryForm {
 public:
  explicit BasicBinaryForm(std::vector<Scalar> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) throw std::invalid_argument("binary form: empty coefficient list");
    bool all_zero = true;
    for (const auto& v : c_)
      if (v != Scalar(0)) {
        all_zero = false;
        break;
      }
    if (all_zero) throw std::invalid_argument("binary form: all coefficients vanish");
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const Scalar& coeff(int k) const { return c_.at(static_cast<std::size_t>(k)); }
  const std::vector<Scalar>& coefficients() const { return c_; }

  Scalar eval(const Scalar& z1, const Scalar& z2) const {
    // Two-sided Horner on the homogeneous pair.
    Scalar acc(0), p(1);
    for (int k = degree(); k >= 0; --k) {
      acc = acc * z1 + c_[static_cast<std::size_t>(k)] * p;
      p = p * z2;
    }
    return acc;
  }

  int max_modulus_index() const {
    int best = 0;
    double m = magnitude(c_[0]);
    for (int k = 1; k < static_cast<int>(c_.size()); ++k) {
      const double mk = magnitude(c_[static_cast<std::size_t>(k)]);
      if (mk > m) {
        m = mk;
        best = k;
      }
    }
    return best;
  }

 private:
  std::vector<Scalar> c_;
};

using BinaryForm = BasicBinaryForm<Complex>;
using RationalForm = BasicBinaryForm<Rational>;

template <class Scalar>
struct BasicProjPoint {
  Scalar z1, z2;

  BasicProjPoint(Scalar a, Scalar b) : z1(std::move(a)), z2(std::move(b)) {
    if (z1 == Scalar(0) && z2 == Scalar(0))
      throw std::invalid_argument("projective point: both coordinates vanish");
  }
  static BasicProjPoint affine(const Scalar& z) { return BasicProjPoint(z, Scalar(1)); }
  static BasicProjPoint infinity() { return BasicProjPoint(Scalar(1), Scalar(0)); }
};

using ProjPoint = BasicProjPoint<Complex>;
using RationalProjPoint = BasicProjPoint<Rational>;

// Convolution product of coefficient vectors (z2-degree indexing).
template <class Scalar>
std::vector<Scalar> conv(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
  std::vector<Scalar> out(a.size() + b.size() - 1, Scalar(0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == Scalar(0)) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

// Coefficients of (a z1 + b z2)^p.
template <class Scalar>
std::vector<Scalar> linear_power(const Scalar& a, const Scalar& b, int p) {
  std::vector<Scalar> out(static_cast<std::size_t>(p) + 1, Scalar(0));
  std::vector<Scalar> apow(static_cast<std::size_t>(p) + 1), bpow(static_cast<std::size_t>(p) + 1);
  apow[0] = Scalar(1);
  bpow[0] = Scalar(1);
  for (int i = 1; i <= p; ++i) {
    apow[static_cast<std::size_t>(i)] = apow[static_cast<std::size_t>(i - 1)] * a;
    bpow[static_cast<std::size_t>(i)] = bpow[static_cast<std::size_t>(i - 1)] * b;
  }
  for (int i = 0; i <= p; ++i)
    out[static_cast<std::size_t>(i)] = scalar_from_bigint<Scalar>(binomial(p, i)) *
                                       apow[static_cast<std::size_t>(p - i)] *
                                       bpow[static_cast<std::size_t>(i)];
  return out;
}

inline constexpr int kOrbitDegree = 12;

// Degree-d form with the single root p of multiplicity d: (b z1 - a z2)^d.
template <class Scalar>
BasicBinaryForm<Scalar> expand_rnc(const BasicProjPoint<Scalar>& p, int d = kOrbitDegree) {
  return BasicBinaryForm<Scalar>(linear_power<Scalar>(p.z2, Scalar(0) - p.z1, d));
}

// Degree-12 form with root multiset {alpha x 11, beta x 1}.
template <class Scalar>
BasicBinaryForm<Scalar> expand_mu(const BasicProjPoint<Scalar>& alpha,
                                  const BasicProjPoint<Scalar>& beta) {
  auto main = linear_power<Scalar>(alpha.z2, Scalar(0) - alpha.z1, kOrbitDegree - 1);
  std::vector<Scalar> last = {beta.z2, Scalar(0) - beta.z1};
  return BasicBinaryForm<Scalar>(conv(main, last));
}

namespace detail {
template <class Scalar>
bool det_is_one(const std::array<Scalar, 4>& g, double tol) {
  const Scalar det = g[0] * g[3] - g[1] * g[2];
  if constexpr (std::is_same_v<Scalar, Rational>) {
    (void)tol;
    return det == Scalar(1);
  } else {
    return magnitude(det - Scalar(1)) <= tol;
  }
}
}  // namespace detail

// Substitution action f |-> f o g^{-1}; degree preserved. For det g = 1 the
// inverse is [[d,-b],[-c,a]].
template <class Scalar>
BasicBinaryForm<Scalar> act(const std::array<Scalar, 4>& g, const BasicBinaryForm<Scalar>& f,
                            double det_tol = 1e-12) {
  if (!detail::det_is_one(g, det_tol))
    throw std::invalid_argument("act: group element determinant is not 1");
  const int d = f.degree();
  // Images of z1, z2 under the inverse substitution.
  const Scalar l1a = g[3], l1b = Scalar(0) - g[1];
  const Scalar l2a = Scalar(0) - g[2], l2b = g[0];
  std::vector<std::vector<Scalar>> p1(static_cast<std::size_t>(d) + 1),
      p2(static_cast<std::size_t>(d) + 1);
  for (int k = 0; k <= d; ++k) {
    p1[static_cast<std::size_t>(k)] = linear_power(l1a, l1b, k);
    p2[static_cast<std::size_t>(k)] = linear_power(l2a, l2b, k);
  }
  std::vector<Scalar> out(static_cast<std::size_t>(d) + 1, Scalar(0));
  for (int k = 0; k <= d; ++k) {
    const Scalar& ck = f.coeff(k);
    if (ck == Scalar(0)) continue;
    const auto term = conv(p1[static_cast<std::size_t>(d - k)], p2[static_cast<std::size_t>(k)]);
    for (std::size_t i = 0; i < term.size(); ++i) out[i] += ck * term[i];
  }
  return BasicBinaryForm<Scalar>(std::move(out));
}

// SL(2,C) element, stored as one fixed lift; sign is irrelevant on
// even-degree forms.
struct GroupElement {
  std::array<Complex, 4> m;  // row-major [[a,b],[c,d]]

  static GroupElement identity() { return {{Complex(1), Complex(0), Complex(0), Complex(1)}}; }

  Complex det() const { return m[0] * m[3] - m[1] * m[2]; }

  GroupElement operator*(const GroupElement& o) const {
    return {{m[0] * o.m[0] + m[1] * o.m[2], m[0] * o.m[1] + m[1] * o.m[3],
             m[2] * o.m[0] + m[3] * o.m[2], m[2] * o.m[1] + m[3] * o.m[3]}};
  }

  GroupElement inverse() const { return {{m[3], -m[1], -m[2], m[0]}}; }

  GroupElement negated() const { return {{-m[0], -m[1], -m[2], -m[3]}}; }

  ProjPoint apply(const ProjPoint& p) const {
    return ProjPoint(m[0] * p.z1 + m[1] * p.z2, m[2] * p.z1 + m[3] * p.z2);
  }
};

inline BinaryForm act(const GroupElement& g, const BinaryForm& f, double det_tol = 1e-12) {
  return act<Complex>(g.m, f, det_tol);
}

inline double frobenius_gap(const GroupElement& a, const GroupElement& b) {
  double s = 0;
  for (int k = 0; k < 4; ++k) s += std::norm(a.m[k] - b.m[k]);
  return std::sqrt(s);
}

// Distance between rotations, quotienting the +-1 lift ambiguity.
inline double psl_distance(const GroupElement& a, const GroupElement& b) {
  return std::min(frobenius_gap(a, b), frobenius_gap(a, b.negated()));
}

namespace detail {

// Fixed sign representative: flip so the first entry of modulus > 0.4 has
// positive real part (positive imaginary part on the Re = 0 ridge).
inline GroupElement canonical_sign(const GroupElement& g) {
  for (int k = 0; k < 4; ++k) {
    if (std::abs(g.m[k]) > 0.4) {
      const double re = g.m[k].real(), im = g.m[k].imag();
      if (re < -1e-9 || (std::abs(re) <= 1e-9 && im < 0)) return g.negated();
      return g;
    }
  }
  return g;  // unreachable for unitary input
}

inline bool matches(const GroupElement& a, const GroupElement& b, double tol = 1e-8) {
  return frobenius_gap(a, b) < tol;
}

}  // namespace detail

// The 60 rotation representatives of the icosahedral group as SU(2) lifts,
// one per element, closed under multiplication up to sign. Generators are the
// classical pair aligned with the vertex normalization used by
// icosahedral_form(): the order-5 rotation z -> e^{2 pi i/5} z about the
// polar axis and an order-2 rotation exchanging the poles.
inline const std::vector<GroupElement>& icosahedral_group() {
  static const std::vector<GroupElement> group = [] {
    using std::numbers::pi;
    const Complex i01(0.0, 1.0);
    const Complex eps = std::exp(i01 * (2.0 * pi / 5.0));
    GroupElement rot5{{eps * eps * eps, Complex(0), Complex(0), eps * eps}};
    const double s36 = std::sin(pi / 5.0), s72 = std::sin(2.0 * pi / 5.0);
    const double inv_root5 = 1.0 / std::sqrt(5.0);
    GroupElement rot2{{i01 * (-2.0 * s72 * inv_root5), i01 * (2.0 * s36 * inv_root5),
                       i01 * (2.0 * s36 * inv_root5), i01 * (2.0 * s72 * inv_root5)}};

    std::vector<GroupElement> elems;
    auto insert = [&elems](const GroupElement& g) {
      const GroupElement c = detail::canonical_sign(g);
      for (const auto& e : elems)
        if (detail::matches(e, c)) return false;
      elems.push_back(c);
      return true;
    };
    insert(GroupElement::identity());
    insert(rot5);
    insert(rot2);
    bool grew = true;
    while (grew) {
      grew = false;
      const std::size_t n = elems.size();
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          if (insert(elems[a] * elems[b])) grew = true;
      if (elems.size() > 60) throw std::logic_error("icosahedral closure exceeded 60 elements");
    }
    if (elems.size() != 60) throw std::logic_error("icosahedral closure did not reach 60 elements");
    std::sort(elems.begin(), elems.end(), [](const GroupElement& x, const GroupElement& y) {
      for (int k = 0; k < 4; ++k) {
        if (x.m[k].real() != y.m[k].real()) return x.m[k].real() < y.m[k].real();
        if (x.m[k].imag() != y.m[k].imag()) return x.m[k].imag() < y.m[k].imag();
      }
      return false;
    });
    return elems;
  }();
  return group;
}

// Order of the rotation represented by g (power reaching +-identity).
inline int psl_order(const GroupElement& g, int max_order = 60) {
  GroupElement p = g;
  const GroupElement id = GroupElement::identity();
  for (int k = 1; k <= max_order; ++k) {
    if (detail::matches(p, id) || detail::matches(p, id.negated())) return k;
    p = p * g;
  }
  throw std::logic_error("psl_order: no power reached the identity");
}

// Vertex configuration of the regular icosahedron as a degree-12 form. In the
// stereographic alignment with roots {0, infinity} and the two pentagonal
// rings {z : z^10 + 11 z^5 - 1 = 0}, the form is
// z1 z2 (z1^10 + 11 z1^5 z2^5 - z2^10), normalized to max-modulus 1.
inline BinaryForm icosahedral_form() {
  std::vector<Complex> c(kOrbitDegree + 1, Complex(0));
  c[1] = Complex(1.0 / 11.0);
  c[6] = Complex(1.0);
  c[11] = Complex(-1.0 / 11.0);
  return BinaryForm(std::move(c));
}

// Scale-free comparison: normalize both coefficient vectors at the index of
// the reference form's max-modulus coefficient, then take the max-norm gap.
inline double projective_distance(const BinaryForm& a, const BinaryForm& b) {
  if (a.degree() != b.degree()) return 1e300;
  auto one_sided = [](const BinaryForm& x, const BinaryForm& y) {
    const int idx = x.max_modulus_index();
    const double ref = magnitude(y.coeff(idx));
    if (ref < 1e-14 * magnitude(y.coeff(y.max_modulus_index()))) return 1e300;
    double worst = 0;
    const Complex sx = x.coeff(idx), sy = y.coeff(idx);
    for (int k = 0; k <= x.degree(); ++k)
      worst = std::max(worst, std::abs(x.coeff(k) / sx - y.coeff(k) / sy));
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

inline bool projectively_equal(const BinaryForm& a, const BinaryForm& b, double tol = 1e-9) {
  return projective_distance(a, b) <= tol;
}

// Affine roots by companion-matrix eigenvalues; roots at infinity show up as
// vanishing leading coefficients and are returned through the out-parameter.
inline std::vector<Complex> affine_roots(const BinaryForm& f, int* infinity_multiplicity = nullptr,
                                         double lead_tol = 1e-11) {
  const int d = f.degree();
  const double scale = magnitude(f.coeff(f.max_modulus_index()));
  int lead = 0;
  while (lead <= d && std::abs(f.coeff(lead)) <= lead_tol * scale) ++lead;
  if (infinity_multiplicity) *infinity_multiplicity = lead;
  const int dd = d - lead;
  std::vector<Complex> roots;
  if (dd == 0) return roots;
  // Monic polynomial p(z) = z^dd + sum a_k z^k with a_k = c(lead + dd - k)/c(lead).
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(dd, dd);
  for (int k = 0; k < dd; ++k) {
    comp(k, dd - 1) = -f.coeff(lead + dd - k) / f.coeff(lead);
    if (k > 0) comp(k, k - 1) = Complex(1);
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, /*computeEigenvectors=*/false);
  roots.reserve(static_cast<std::size_t>(dd));
  for (int k = 0; k < dd; ++k) roots.push_back(es.eigenvalues()(k));
  return roots;
}

struct RootCluster {
  Complex center;
  int multiplicity;
};

// Groups numerically scattered copies of a multiple root. Cluster centroids
// are far more accurate than the individual eigenvalues because eigenvalue
// sums are well conditioned.
inline std::vector<RootCluster> cluster_roots(const std::vector<Complex>& roots,
                                              double tol = 0.15) {
  const std::size_t n = roots.size();
  std::vector<int> parent(n);
  for (std::size_t k = 0; k < n; ++k) parent[k] = static_cast<int>(k);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      const double scale = std::max({1.0, std::abs(roots[a]), std::abs(roots[b])});
      if (std::abs(roots[a] - roots[b]) <= tol * scale)
        parent[static_cast<std::size_t>(find(static_cast<int>(a)))] =
            find(static_cast<int>(b));
    }
  std::vector<RootCluster> out;
  std::vector<int> seen;
  for (std::size_t k = 0; k < n; ++k) {
    const int r = find(static_cast<int>(k));
    if (std::find(seen.begin(), seen.end(), r) != seen.end()) continue;
    seen.push_back(r);
    Complex sum(0);
    int count = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (find(static_cast<int>(j)) == r) {
        sum += roots[j];
        ++count;
      }
    out.push_back({sum / static_cast<double>(count), count});
  }
  std::sort(out.begin(), out.end(), [](const RootCluster& x, const RootCluster& y) {
    if (x.multiplicity != y.multiplicity) return x.multiplicity > y.multiplicity;
    if (x.center.real() != y.center.real()) return x.center.real() < y.center.real();
    return x.center.imag() < y.center.imag();
  });
  return out;
}

inline GroupElement random_su2(CounterRng& rng) {
  double q[4];
  double norm2 = 0;
  do {
    norm2 = 0;
    for (double& v : q) {
      v = rng.gaussian();
      norm2 += v * v;
    }
  } while (norm2 < 1e-12);
  const double inv = 1.0 / std::sqrt(norm2);
  const double a = q[0] * inv, b = q[1] * inv, c = q[2] * inv, d = q[3] * inv;
  return {{Complex(a, b), Complex(c, d), Complex(-c, d), Complex(a, -b)}};
}

struct StabilizerReport {
  int gamma_total = 0;
  int gamma_fixed = 0;
  double worst_gamma_error = 0;  // raw coefficient gap, not projective
  int random_trials = 0;
  int random_moved = 0;
  double min_random_move = 0;  // projective distance
  bool pass = false;
};

// Probabilistic stabilizer evidence: every rotation lift must fix f with
// coefficients intact (trivial character), and generic elements away from the
// group must move it. Not a proof of equality of stabilizers.
inline StabilizerReport stabilizer_probe(const BinaryForm& f, int trials, std::uint64_t seed,
                                         double fix_tol = 1e-10, double move_tol = 1e-6) {
  const auto& gamma = icosahedral_group();
  StabilizerReport rep;
  rep.gamma_total = static_cast<int>(gamma.size());
  for (const auto& g : gamma) {
    const BinaryForm moved = act(g, f);
    double gap = 0;
    for (int k = 0; k <= f.degree(); ++k)
      gap = std::max(gap, std::abs(moved.coeff(k) - f.coeff(k)));
    rep.worst_gamma_error = std::max(rep.worst_gamma_error, gap);
    if (gap <= fix_tol) ++rep.gamma_fixed;
  }
  CounterRng rng(seed, /*stream=*/0x5741u);
  rep.random_trials = trials;
  rep.min_random_move = trials > 0 ? 1e300 : 0.0;
  for (int t = 0; t < trials; ++t) {
    GroupElement g = random_su2(rng);
    // Reject candidates close to the stabilizer; they would not discriminate.
    for (int attempts = 0; attempts < 1000; ++attempts) {
      double nearest = 1e300;
      for (const auto& e : gamma) nearest = std::min(nearest, psl_distance(g, e));
      if (nearest > 0.1) break;
      g = random_su2(rng);
    }
    const double moved = projective_distance(act(g, f), f);
    rep.min_random_move = std::min(rep.min_random_move, moved);
    if (moved > move_tol) ++rep.random_moved;
  }
  rep.pass = rep.gamma_fixed == rep.gamma_total && rep.random_moved == rep.random_trials;
  return rep;
}

}  // namespace alphalab::forms
