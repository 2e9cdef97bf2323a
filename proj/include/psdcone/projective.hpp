#pragma once

#include <functional>
#include <string>
#include <vector>

#include "psdcone/generators.hpp"
#include "psdcone/preserver.hpp"

namespace psdcone {

/// A one-dimensional subspace of Q(i)^n, stored with its first nonzero
/// coordinate scaled to 1 so that equal lines have identical directions.
class Line {
 public:
  Line() = default;
  explicit Line(std::vector<Exact> v) : dir_(std::move(v)) {
    std::size_t k = 0;
    while (k < dir_.size() && dir_[k].is_zero()) ++k;
    if (k == dir_.size()) throw InvalidArgument("Line: zero direction");
    const Exact inv = Exact(1) / dir_[k];
    for (auto& x : dir_) x *= inv;
  }

  static Line basis(std::size_t n, std::size_t j) {
    std::vector<Exact> v(n);
    v[j] = Exact(1);
    return Line(std::move(v));
  }

  std::size_t ambient_dim() const { return dir_.size(); }
  const std::vector<Exact>& direction() const { return dir_; }

  friend bool operator==(const Line& a, const Line& b) { return a.dir_ == b.dir_; }

 private:
  std::vector<Exact> dir_;
};

/// Map on projective lines, queried as an oracle. Must be pure.
struct LineMap {
  std::size_t dim = 0;
  std::function<Line(const Line&)> fn;

  Line operator()(const Line& l) const {
    require_same_dim(l.ambient_dim(), dim, "LineMap");
    Line out = fn(l);
    require_same_dim(out.ambient_dim(), dim, "LineMap image");
    return out;
  }
};

inline LineMap line_map_of(const SemilinearOperator<Exact>& t) {
  return {t.dim(), [t](const Line& l) { return Line(t.apply(std::span<const Exact>(l.direction()))); }};
}

namespace detail {

/// Closest rational with denominator at most max_den (continued fractions).
inline mpq_class best_rational(double x, long max_den) {
  const bool neg = x < 0;
  double v = std::fabs(x);
  mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(v);
    const mpz_class ai(a);
    const mpz_class p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    const double frac = v - a;
    if (frac < 1e-15) break;
    v = 1.0 / frac;
  }
  mpq_class r(p1, q1);
  r.canonicalize();
  return neg ? mpq_class(-r) : r;
}

/// Exact line recovered from a float direction whose normalized coordinates
/// are Gaussian rationals with bounded denominators.
inline Line rationalize_line(const std::vector<Approx>& d, double tol = 1e-9, long max_den = 1000000) {
  double top = 0;
  for (const auto& x : d) top = std::max(top, std::abs(x));
  if (top == 0) throw InvalidArgument("rationalize_line: zero direction");
  std::size_t k = 0;
  while (std::abs(d[k]) <= 1e-9 * top) ++k;
  std::vector<Exact> out(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const Approx ratio = std::abs(d[i]) <= 1e-9 * top ? Approx{} : d[i] / d[k];
    Exact q(best_rational(ratio.real(), max_den), best_rational(ratio.imag(), max_den));
    if (std::abs(q.to_complex() - ratio) > tol * std::max(1.0, std::abs(ratio)))
      throw NotSemilinear("rationalize_line: image direction is not a bounded Gaussian rational");
    out[i] = std::move(q);
  }
  return Line(std::move(out));
}

}  // namespace detail

/// Line map induced by a cone map on rank-one operators:
/// [f] -> ran phi(f f*). Float evaluation (form_iv parts) is converted back
/// to an exact line by bounded-denominator rational reconstruction.
inline LineMap induced_line_map(const PreserverSpec& spec, const Tolerance& tol = {1e-8}) {
  if (!spec.requires_approx()) {
    return {spec.dim, [spec](const Line& l) {
              const auto img = apply_map(spec, rank_one<Exact>(std::span<const Exact>(l.direction())));
              if (img.rank() != 1)
                throw NotSemilinear("induced_line_map: image of a rank-one operator has rank " +
                                    std::to_string(img.rank()));
              return Line(range(img).basis().col(0));
            }};
  }
  return {spec.dim, [spec, tol](const Line& l) {
            const auto a = convert<Approx>(rank_one<Exact>(std::span<const Exact>(l.direction())));
            const auto img = apply_map(spec, a, tol);
            if (img.rank() != 1)
              throw NotSemilinear("induced_line_map: image of a rank-one operator has rank " +
                                  std::to_string(img.rank()));
            const auto e = eigh(img.matrix());
            std::vector<Approx> top(img.dim());
            for (std::size_t i = 0; i < img.dim(); ++i) top[i] = e.vectors(i, img.dim() - 1);
            return detail::rationalize_line(top);
          }};
}

struct ProjectivityReport {
  std::size_t coplanar_checked = 0;
  std::size_t noncoplanar_checked = 0;
  bool passed = true;
  std::string failure;
};

namespace detail {

inline std::size_t rank_of_lines(const std::vector<Line>& ls) {
  const std::size_t n = ls.front().ambient_dim();
  ExactMatrix m(n, ls.size());
  for (std::size_t j = 0; j < ls.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) m(i, j) = ls[j].direction()[i];
  return rank(m);
}

inline std::vector<Exact> random_vector(std::size_t n, Rng& rng) {
  std::vector<Exact> v(n);
  bool nonzero = false;
  while (!nonzero) {
    for (auto& x : v) {
      x = Exact(rng.uniform_int(-kEntryRange, kEntryRange), rng.uniform_int(-kEntryRange, kEntryRange));
      nonzero = nonzero || !x.is_zero();
    }
  }
  return v;
}

inline std::vector<Exact> combine(const Exact& a, const std::vector<Exact>& u, const Exact& b,
                                  const std::vector<Exact>& w) {
  std::vector<Exact> r(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) r[i] = a * u[i] + b * w[i];
  return r;
}

}  // namespace detail

/// Checks that coplanar triples of lines map to coplanar triples, that
/// non-coplanar triples stay non-coplanar, and that distinct lines keep
/// distinct images. Includes the deterministic triples ([e_i], [e_i+e_j], [e_j])
/// before the random ones.
inline ProjectivityReport verify_projectivity(const LineMap& m, std::size_t trials, Seed seed) {
  if (m.dim < 3) throw InvalidArgument("verify_projectivity: ambient dimension must be at least 3");
  const std::size_t n = m.dim;
  ProjectivityReport rep;
  auto check = [&](const std::vector<Line>& src, bool coplanar) {
    std::vector<Line> img;
    try {
      for (const auto& l : src) img.push_back(m(l));
    } catch (const Error& e) {
      rep.passed = false;
      rep.failure = e.what();
      return;
    }
    for (std::size_t i = 0; i < src.size(); ++i)
      for (std::size_t j = i + 1; j < src.size(); ++j)
        if (!(src[i] == src[j]) && img[i] == img[j]) {
          rep.passed = false;
          rep.failure = "two distinct lines share an image";
          return;
        }
    const std::size_t r = detail::rank_of_lines(img);
    if (coplanar) {
      ++rep.coplanar_checked;
      if (r > 2) {
        rep.passed = false;
        rep.failure = "coplanar triple mapped to a non-coplanar triple";
      }
    } else {
      ++rep.noncoplanar_checked;
      if (r < 3) {
        rep.passed = false;
        rep.failure = "non-coplanar triple mapped to a coplanar triple";
      }
    }
  };

  for (std::size_t i = 0; i < n && rep.passed; ++i)
    for (std::size_t j = i + 1; j < n && rep.passed; ++j) {
      std::vector<Exact> s(n);
      s[i] = Exact(1);
      s[j] = Exact(1);
      check({Line::basis(n, i), Line(s), Line::basis(n, j)}, true);
    }
  for (std::size_t i = 0; i + 2 < n && rep.passed; ++i)
    check({Line::basis(n, i), Line::basis(n, i + 1), Line::basis(n, i + 2)}, false);

  Rng rng(seed);
  for (std::size_t t = 0; t < trials && rep.passed; ++t) {
    const auto u = detail::random_vector(n, rng);
    const auto w = detail::random_vector(n, rng);
    const auto z = detail::random_vector(n, rng);
    std::vector<Line> plane;
    for (int k = 0; k < 3; ++k) {
      std::vector<Exact> v;
      do {
        v = detail::combine(Exact(rng.uniform_int(-3, 3), rng.uniform_int(-3, 3)), u,
                            Exact(rng.uniform_int(-3, 3), rng.uniform_int(-3, 3)), w);
      } while (std::all_of(v.begin(), v.end(), [](const Exact& x) { return x.is_zero(); }));
      plane.emplace_back(std::move(v));
    }
    check(plane, true);
    const std::vector<Line> spread = {Line(u), Line(w), Line(z)};
    if (rep.passed && detail::rank_of_lines(spread) == 3) check(spread, false);
  }
  return rep;
}

/// Recovers (T, flavor) from a line map induced by an invertible semilinear
/// operator, up to a global scalar:
///   columns from the images of [e_j], relative scales from [e_1 + e_j],
///   flavor from [e_1 + i e_2] against [t_1 + i t_2] and [t_1 - i t_2].
inline SemilinearOperator<Exact> reconstruct_semilinear(const LineMap& m, std::size_t dim) {
  if (dim < 2) throw InvalidArgument("reconstruct_semilinear: dimension must be at least 2");
  require_same_dim(m.dim, dim, "reconstruct_semilinear");
  const std::size_t n = dim;
  std::vector<Line> cols;
  for (std::size_t j = 0; j < n; ++j) cols.push_back(m(Line::basis(n, j)));
  if (detail::rank_of_lines(cols) != n)
    throw NotSemilinear("images of the basis lines are linearly dependent");

  ExactMatrix t(n, n);
  for (std::size_t i = 0; i < n; ++i) t(i, 0) = cols[0].direction()[i];
  for (std::size_t j = 1; j < n; ++j) {
    std::vector<Exact> probe(n);
    probe[0] = Exact(1);
    probe[j] = Exact(1);
    const Line img = m(Line(probe));
    // Solve img = alpha t_1 + beta t_j.
    ExactMatrix sys(n, 3);
    for (std::size_t i = 0; i < n; ++i) {
      sys(i, 0) = t(i, 0);
      sys(i, 1) = cols[j].direction()[i];
      sys(i, 2) = img.direction()[i];
    }
    const auto k = kernel(sys);
    if (k.cols() != 1 || k(2, 0).is_zero())
      throw NotSemilinear("image of [e_1 + e_" + std::to_string(j + 1) + "] is not in the plane of the basis images");
    const Exact alpha = -k(0, 0) / k(2, 0);
    const Exact beta = -k(1, 0) / k(2, 0);
    if (alpha.is_zero() || beta.is_zero())
      throw NotSemilinear("image of [e_1 + e_" + std::to_string(j + 1) + "] coincides with a basis image");
    const Exact scale = beta / alpha;
    for (std::size_t i = 0; i < n; ++i) t(i, j) = scale * cols[j].direction()[i];
  }

  std::vector<Exact> probe(n);
  probe[0] = Exact(1);
  probe[1] = Exact(0, 1);
  const Line img = m(Line(probe));
  std::vector<Exact> lin(n), con(n);
  for (std::size_t i = 0; i < n; ++i) {
    lin[i] = t(i, 0) + Exact(0, 1) * t(i, 1);
    con[i] = t(i, 0) - Exact(0, 1) * t(i, 1);
  }
  if (img == Line(lin)) return SemilinearOperator<Exact>(t, Flavor::linear);
  if (img == Line(con)) return SemilinearOperator<Exact>(t, Flavor::conjugate);
  throw NotSemilinear("image of [e_1 + i e_2] matches neither the linear nor the conjugate-linear candidate");
}

/// T' = lambda T for some nonzero lambda.
inline bool projectively_equal(const ExactMatrix& a, const ExactMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  std::size_t k = 0;
  while (k < b.data().size() && b.data()[k].is_zero()) ++k;
  if (k == b.data().size()) return a.is_zero();
  if (a.data()[k].is_zero()) return false;
  const Exact lambda = a.data()[k] / b.data()[k];
  return a == b * lambda;
}

/// Number of random lines (outside the probe set) where m and the line map
/// of t disagree.
inline std::size_t count_reconstruction_mismatches(const LineMap& m, const SemilinearOperator<Exact>& t,
                                                   std::size_t trials, Seed seed) {
  const auto tm = line_map_of(t);
  Rng rng(seed);
  std::size_t bad = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    const Line l(detail::random_vector(m.dim, rng));
    if (!(m(l) == tm(l))) ++bad;
  }
  return bad;
}

}  // namespace psdcone
