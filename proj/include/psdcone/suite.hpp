#pragma once

#include <functional>
#include <string>
#include <vector>

#include "psdcone/io.hpp"
#include "psdcone/lebesgue.hpp"
#include "psdcone/preserver.hpp"
#include "psdcone/projective.hpp"

namespace psdcone {

/// Largest k tried in the domination oracle A <= 2^k B.
inline constexpr int kMaxDominationExponent = 60;
/// Float tolerance for the form_iv and range-form checks.
inline constexpr double kFloatRelTol = 1e-8;
/// Conditioning floor for backend agreement instances.
inline constexpr double kConditionFloor = 1e-6;

namespace checks {

/// Exact oracle: does a <= 2^k b hold for some k in [0, 60]?
inline bool dominated_by_power_of_two(const PsdOperator<Exact>& a, const PsdOperator<Exact>& b) {
  mpz_class c = 1;
  for (int k = 0; k <= kMaxDominationExponent; ++k, c <<= 1) {
    const Exact s(mpq_class(c), mpq_class(0));
    if (psd_check(ExactMatrix(b.matrix() * s - a.matrix()))) return true;
  }
  return false;
}

/// Exact oracle: a nonzero f in ran a ∩ ran b with f f* <= 2^k a and
/// f f* <= 2^k b for some k <= 60. Returns false when the intersection is {0}.
inline bool has_common_rank_one_minorant(const PsdOperator<Exact>& a, const PsdOperator<Exact>& b) {
  const auto meet = subspace_intersect(range(a), range(b));
  if (meet.dim() == 0) return false;
  const auto f = meet.basis().col(0);
  const auto ff = rank_one<Exact>(std::span<const Exact>(f));
  return dominated_by_power_of_two(ff, a) && dominated_by_power_of_two(ff, b);
}

/// Smallest nonzero singular value over the largest, with the number of
/// nonzero values taken from the exact rank.
inline double condition_ratio(const ExactMatrix& m) {
  const std::size_t r = rank(m);
  if (r == 0) return 1.0;
  const auto s = detail::full_svd(convert<Approx>(m));
  return s.sigma(static_cast<Eigen::Index>(r) - 1) / s.sigma(0);
}

inline bool well_conditioned(const PsdOperator<Exact>& a, const PsdOperator<Exact>& b) {
  for (const ExactMatrix& m : {a.matrix(), b.matrix(), ExactMatrix(b.matrix() - a.matrix()),
                               hstack(a.matrix(), b.matrix())})
    if (condition_ratio(m) <= kConditionFloor) return false;
  return true;
}

inline bool same_booleans(const RelationReport& x, const RelationReport& y) {
  return x.leq_ab == y.leq_ab && x.leq_ba == y.leq_ba && x.abs_cont_ab == y.abs_cont_ab &&
         x.abs_cont_ba == y.abs_cont_ba && x.singular == y.singular && x.same_range_class == y.same_range_class;
}

/// Random Gaussian-integer matrix of random rank, for the linalg identities.
inline ExactMatrix random_low_rank(std::size_t rows, std::size_t cols, Seed seed) {
  Rng rng(seed);
  const auto r = static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(std::min(rows, cols))));
  return random_gaussian_integer_matrix(rows, r, rng) * random_gaussian_integer_matrix(r, cols, rng);
}

inline bool penrose_identities(const ExactMatrix& m) {
  const auto p = pinv(m);
  return m * p * m == m && p * m * p == p && (m * p).adjoint() == m * p && (p * m).adjoint() == p * m;
}

}  // namespace checks

struct SuiteOptions {
  std::size_t dim_lo = 2;
  std::size_t dim_hi = 4;
  std::size_t trials = 200;
  Seed seed = 7;
  bool skip_float = false;
};

struct SuiteResult {
  io::json report;
  std::size_t failures = 0;
};

namespace detail {

class PropertyLog {
 public:
  PropertyLog(std::string name, std::size_t dim, const char* backend, Seed seed)
      : name_(std::move(name)), dim_(dim), backend_(backend), seed_(seed) {}

  void pass() { ++passed_; }
  void fail(io::json counterexample) {
    ++failed_;
    if (examples_.size() < 3) examples_.push_back(std::move(counterexample));
  }
  void record(bool ok, const std::function<io::json()>& dump) { ok ? pass() : fail(dump()); }
  std::size_t failed() const { return failed_; }

  io::json to_json() const {
    io::json j;
    j["name"] = name_;
    j["dim"] = dim_;
    j["backend"] = backend_;
    j["seed"] = seed_;
    j["passed"] = passed_;
    j["failed"] = failed_;
    j["counterexamples"] = examples_;
    return j;
  }

 private:
  std::string name_;
  std::size_t dim_;
  const char* backend_;
  Seed seed_;
  std::size_t passed_ = 0;
  std::size_t failed_ = 0;
  std::vector<io::json> examples_;
};

inline io::json pair_dump(const PsdOperator<Exact>& a, const PsdOperator<Exact>& b) {
  io::json j;
  j["A"] = io::matrix_to_json(a.matrix());
  j["B"] = io::matrix_to_json(b.matrix());
  return j;
}

}  // namespace detail

/// Runs the packaged property suite. The report is a pure function of the
/// options (no timing fields), so equal options give byte-identical output.
inline SuiteResult run_suite(const SuiteOptions& opt) {
  std::vector<detail::PropertyLog> logs;
  const std::size_t n_t = opt.trials;
  const std::size_t few = std::max<std::size_t>(1, n_t / 10);

  for (std::size_t d = opt.dim_lo; d <= opt.dim_hi; ++d) {
    auto seed_for = [&](Seed salt) { return mix_seed(mix_seed(opt.seed, d), salt); };

    {
      detail::PropertyLog log("ac_matches_domination", d, "exact", seed_for(1));
      for (std::size_t i = 0; i < n_t; ++i) {
        const auto [a, b] = sample_test_pair(d, mix_seed(seed_for(1), i));
        log.record(is_abs_continuous(a, b) == checks::dominated_by_power_of_two(a, b),
                   [&, &a = a, &b = b] { return detail::pair_dump(a, b); });
      }
      logs.push_back(std::move(log));
    }
    {
      detail::PropertyLog log("singular_iff_no_rank_one_minorant", d, "exact", seed_for(2));
      for (std::size_t i = 0; i < n_t; ++i) {
        const auto [a, b] = sample_test_pair(d, mix_seed(seed_for(2), i));
        log.record(is_singular(a, b) == !checks::has_common_rank_one_minorant(a, b),
                   [&, &a = a, &b = b] { return detail::pair_dump(a, b); });
      }
      logs.push_back(std::move(log));
    }
    {
      detail::PropertyLog log("range_equality_and_dimension_formula", d, "exact", seed_for(3));
      for (std::size_t i = 0; i < n_t; ++i) {
        const auto s = checks::random_low_rank(d, d + 1, mix_seed(seed_for(3), 2 * i));
        const auto w = checks::random_low_rank(d, d, mix_seed(seed_for(3), 2 * i + 1));
        const auto u = column_space(s), v = column_space(w);
        const bool ok = subspace_equal(u, column_space(ExactMatrix(s * s.adjoint()))) &&
                        subspace_intersect(u, v).dim() + subspace_sum(u, v).dim() == u.dim() + v.dim() &&
                        checks::penrose_identities(s);
        log.record(ok, [&] {
          io::json j;
          j["S"] = io::matrix_to_json(s);
          j["W"] = io::matrix_to_json(w);
          return j;
        });
      }
      logs.push_back(std::move(log));
    }
    {
      detail::PropertyLog pres("congruence_preserves_relations", d, "exact", seed_for(4));
      detail::PropertyLog form("congruence_range_form", d, "exact", seed_for(4));
      std::size_t k = 0;
      for (Flavor fl : {Flavor::linear, Flavor::conjugate})
        for (int rep = 0; rep < 2; ++rep, ++k) {
          const auto t = random_semilinear<Exact>(d, mix_seed(seed_for(4), k), fl);
          const auto spec = PreserverSpec::congruence(t);
          const auto pr = verify_relation_preservation<Exact>(spec, n_t / 4 + 1, mix_seed(seed_for(5), k));
          pres.record(pr.passed(), [&] { return io::to_json(pr); });
          const auto rf = verify_range_form<Exact>(spec, t, n_t / 4 + 1, mix_seed(seed_for(6), k));
          form.record(rf.passed(), [&] { return io::to_json(rf); });
        }
      logs.push_back(std::move(pres));
      logs.push_back(std::move(form));
    }
    {
      detail::PropertyLog log("wild_preserves_relations", d, "exact", seed_for(7));
      const auto spec = make_wild_map(seed_for(7), d);
      const auto pr = verify_relation_preservation<Exact>(spec, n_t, seed_for(8));
      log.record(pr.passed(), [&] { return io::to_json(pr); });
      logs.push_back(std::move(log));
    }
    {
      detail::PropertyLog log("projective_round_trip", d, "exact", seed_for(9));
      for (Flavor fl : {Flavor::linear, Flavor::conjugate})
        for (std::size_t i = 0; i < few; ++i) {
          const auto t = random_semilinear<Exact>(d, mix_seed(seed_for(9), 2 * i + (fl == Flavor::conjugate)), fl);
          const auto m = induced_line_map(PreserverSpec::congruence(t));
          bool ok = false;
          std::string why;
          try {
            const auto r = reconstruct_semilinear(m, d);
            ok = r.flavor() == fl && projectively_equal(r.matrix(), t.matrix());
            if (ok && d >= 3) ok = verify_projectivity(m, 10, mix_seed(seed_for(10), i)).passed;
          } catch (const Error& e) {
            why = e.what();
          }
          log.record(ok, [&] {
            io::json j = io::to_json(t);
            j["error"] = why;
            return j;
          });
        }
      logs.push_back(std::move(log));
    }
    if (d == 2) {
      detail::PropertyLog log("dim2_conditions", d, "exact", seed_for(11));
      const auto cong = PreserverSpec::congruence(random_semilinear<Exact>(2, seed_for(11), Flavor::linear));
      const auto wild = make_wild_map(seed_for(12), 2);
      for (const auto* spec : {&cong, &wild}) {
        const auto r = dim2_conditions<Exact>(*spec, n_t, seed_for(13));
        log.record(r.passed(), [&] { return io::to_json(r); });
      }
      logs.push_back(std::move(log));
    }

    if (opt.skip_float) continue;
    const Tolerance ftol{kFloatRelTol};
    {
      detail::PropertyLog pres("form_iv_preserves_relations", d, "float", seed_for(14));
      detail::PropertyLog form("form_iv_range_form", d, "float", seed_for(14));
      std::size_t k = 0;
      for (Flavor fl : {Flavor::linear, Flavor::conjugate})
        for (int rep = 0; rep < 2; ++rep, ++k) {
          const auto t = random_semilinear<Exact>(d, mix_seed(seed_for(14), k), fl);
          const auto spec = PreserverSpec::form_iv(t, ZFamily{mix_seed(seed_for(15), k), std::nullopt});
          const auto pr = verify_relation_preservation<Approx>(spec, n_t / 4 + 1, mix_seed(seed_for(16), k), ftol);
          pres.record(pr.passed(), [&] { return io::to_json(pr); });
          const auto rf = verify_range_form<Approx>(spec, t, n_t / 4 + 1, mix_seed(seed_for(17), k), ftol);
          form.record(rf.passed(), [&] { return io::to_json(rf); });
        }
      logs.push_back(std::move(pres));
      logs.push_back(std::move(form));
    }
    {
      detail::PropertyLog log("lebesgue_decomposition", d, "float", seed_for(18));
      for (std::size_t i = 0; i < few; ++i) {
        const auto [ea, eb] = sample_test_pair(d, mix_seed(seed_for(18), i));
        const auto a = convert<Approx>(ea), b = convert<Approx>(eb);
        const auto dec = decompose(a, b);
        const auto rep = verify_decomposition(dec, a, 100, mix_seed(seed_for(19), i));
        log.record(rep.passed(), [&, &ea = ea, &eb = eb] {
          io::json j = detail::pair_dump(ea, eb);
          j["report"] = io::to_json(rep);
          return j;
        });
      }
      logs.push_back(std::move(log));
    }
    {
      detail::PropertyLog log("backend_agreement", d, "float", seed_for(20));
      std::size_t done = 0;
      for (std::size_t i = 0; done < few && i < 50 * few; ++i) {
        const auto [a, b] = sample_test_pair(d, mix_seed(seed_for(20), i));
        if (!checks::well_conditioned(a, b)) continue;
        ++done;
        const auto re = analyze_pair(a, b);
        const auto rf = analyze_pair(convert<Approx>(a), convert<Approx>(b));
        log.record(checks::same_booleans(re, rf), [&, &a = a, &b = b] { return detail::pair_dump(a, b); });
      }
      logs.push_back(std::move(log));
    }
  }

  SuiteResult res;
  io::json props = io::json::array();
  for (const auto& l : logs) {
    res.failures += l.failed();
    props.push_back(l.to_json());
  }
  io::json tol;
  tol["float_rel"] = kFloatRelTol;
  tol["range_angle"] = kRangeAngleTol;
  tol["maximality_slack"] = kMaximalitySlack;
  tol["domination_max_exponent"] = kMaxDominationExponent;
  tol["condition_floor"] = kConditionFloor;
  res.report["seed"] = opt.seed;
  res.report["dims"] = io::json::array({opt.dim_lo, opt.dim_hi});
  res.report["trials"] = opt.trials;
  res.report["skip_float"] = opt.skip_float;
  res.report["tolerances"] = std::move(tol);
  res.report["properties"] = std::move(props);
  res.report["failures"] = res.failures;
  res.report["passed"] = res.failures == 0;
  return res;
}

}  // namespace psdcone
