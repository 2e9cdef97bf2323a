// psdcone: relations, Lebesgue decomposition, preserver maps and semilinear
// reconstruction on the positive semidefinite cone.
//
// Exit codes: 0 success / all checks pass, 1 a property check failed,
// 2 usage, parse or dimension error.

#include <chrono>
#include <iostream>
#include <optional>
#include <regex>
#include <string>

#include <CLI11.hpp>

#include "psdcone/psdcone.hpp"

namespace {

using namespace psdcone;
using io::json;

constexpr int kOk = 0;
constexpr int kPropertyFailure = 1;
constexpr int kUsageError = 2;

struct UsageError : Error {
  using Error::Error;
};

Tolerance tolerance_from(const std::optional<double>& tol) { return tol ? Tolerance{*tol} : Tolerance{}; }

Backend resolve_backend(const std::string& flag, std::initializer_list<Backend> inputs) {
  if (flag == "exact") return Backend::exact;
  if (flag == "float") return Backend::approx;
  if (!flag.empty()) throw UsageError("--backend must be exact or float");
  for (auto b : inputs)
    if (b == Backend::approx) return Backend::approx;
  return Backend::exact;
}

template <BackendScalar S>
PsdOperator<S> load_psd(const io::AnyMatrix& m, const std::string& path, const Tolerance& tol) {
  try {
    return PsdOperator<S>(io::as_backend<S>(m), tol);
  } catch (const NotPsd& e) {
    throw UsageError(path + ": " + e.what());
  }
}

template <BackendScalar S>
int run_analyze(const io::AnyMatrix& ma, const io::AnyMatrix& mb, const std::string& pa, const std::string& pb,
                const Tolerance& tol) {
  const auto a = load_psd<S>(ma, pa, tol);
  const auto b = load_psd<S>(mb, pb, tol);
  if (a.dim() != b.dim()) throw UsageError("dimension mismatch: A is " + std::to_string(a.dim()) + "x" +
                                           std::to_string(a.dim()) + ", B is " + std::to_string(b.dim()) + "x" +
                                           std::to_string(b.dim()));
  const auto r = analyze_pair(a, b, tol);
  std::cout << io::to_json(r).dump(2) << "\n\n";
  std::cout << "relations (" << backend_name(ScalarTraits<S>::backend) << " backend)\n" << io::relation_table(r);
  return kOk;
}

int cmd_analyze(const std::string& pa, const std::string& pb, const std::string& backend_flag,
                const std::optional<double>& tol_flag) {
  const auto ma = io::parse_matrix_file(pa);
  const auto mb = io::parse_matrix_file(pb);
  const auto tol = tolerance_from(tol_flag);
  if (resolve_backend(backend_flag, {io::backend_of(ma), io::backend_of(mb)}) == Backend::exact)
    return run_analyze<Exact>(ma, mb, pa, pb, tol);
  return run_analyze<Approx>(ma, mb, pa, pb, tol);
}

int cmd_decompose(const std::string& pa, const std::string& pb, const std::string& prefix, std::size_t trials,
                  Seed seed) {
  const auto a = load_psd<Approx>(io::parse_matrix_file(pa), pa, {});
  const auto b = load_psd<Approx>(io::parse_matrix_file(pb), pb, {});
  if (a.dim() != b.dim()) throw UsageError("dimension mismatch between A and B");
  const auto d = decompose(a, b);
  const auto rep = verify_decomposition(d, a, trials, seed);
  io::write_json_file(prefix + ".ac.json", io::matrix_to_json(d.ac_part.matrix()));
  io::write_json_file(prefix + ".sing.json", io::matrix_to_json(d.singular_part.matrix()));
  const json rj = io::to_json(rep);
  io::write_json_file(prefix + ".report.json", rj);
  std::cout << rj.dump(2) << "\n";
  return rep.passed() ? kOk : kPropertyFailure;
}

PreserverSpec load_spec(const std::string& path) {
  try {
    return io::parse_spec(io::read_json_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

int cmd_map_apply(const std::string& spec_path, const std::string& pa, const std::string& backend_flag,
                  const std::optional<double>& tol_flag, const std::string& out) {
  const auto spec = load_spec(spec_path);
  const auto ma = io::parse_matrix_file(pa);
  const auto tol = tolerance_from(tol_flag);
  const Backend backend = resolve_backend(backend_flag, {io::backend_of(ma)});
  if (backend == Backend::exact && spec.requires_approx())
    throw UsageError("map apply: form_iv maps need the float backend (pass --backend float)");
  json result;
  if (backend == Backend::exact) {
    const auto a = load_psd<Exact>(ma, pa, tol);
    if (a.dim() != spec.dim) throw UsageError("dimension mismatch between map spec and A");
    result = io::matrix_to_json(apply_map(spec, a, tol).matrix());
  } else {
    const auto a = load_psd<Approx>(ma, pa, tol);
    if (a.dim() != spec.dim) throw UsageError("dimension mismatch between map spec and A");
    result = io::matrix_to_json(apply_map(spec, a, tol).matrix());
  }
  if (out.empty()) std::cout << result.dump(2) << "\n";
  else io::write_json_file(out, result);
  return kOk;
}

template <BackendScalar S>
json verify_spec(const PreserverSpec& spec, const std::optional<SemilinearOperator<Exact>>& t, std::size_t trials,
                 Seed seed, const Tolerance& tol, bool& ok) {
  json j;
  j["backend"] = backend_name(ScalarTraits<S>::backend);
  const auto pr = verify_relation_preservation<S>(spec, trials, seed, tol);
  ok = pr.passed();
  j["relation_preservation"] = io::to_json(pr);
  if (t) {
    const auto rf = verify_range_form<S>(spec, *t, trials, mix_seed(seed, 1), tol);
    ok = ok && rf.passed();
    j["range_form"] = io::to_json(rf);
  }
  if (spec.dim == 2) {
    const auto d2 = dim2_conditions<S>(spec, trials, mix_seed(seed, 2), tol);
    ok = ok && d2.passed();
    j["dim2_conditions"] = io::to_json(d2);
  }
  j["passed"] = ok;
  return j;
}

int cmd_map_verify(const std::string& spec_path, const std::string& t_path, const std::string& flavor,
                   std::size_t dim, std::size_t trials, Seed seed, const std::optional<double>& tol_flag) {
  const auto spec = load_spec(spec_path);
  if (spec.dim != dim)
    throw UsageError("--dim " + std::to_string(dim) + " does not match the map dimension " +
                     std::to_string(spec.dim));
  std::optional<SemilinearOperator<Exact>> t;
  if (!t_path.empty()) {
    try {
      t = SemilinearOperator<Exact>(io::as_backend<Exact>(io::parse_matrix_file(t_path)), parse_flavor(flavor));
    } catch (const SingularMatrix&) {
      throw UsageError(t_path + ": T is not invertible");
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
    if (t->dim() != dim) throw UsageError("dimension mismatch between --T and --dim");
  }
  bool ok = false;
  json j;
  if (spec.requires_approx()) {
    const Tolerance tol{tol_flag.value_or(kFloatRelTol)};
    j = verify_spec<Approx>(spec, t, trials, seed, tol, ok);
  } else {
    j = verify_spec<Exact>(spec, t, trials, seed, {}, ok);
  }
  std::cout << j.dump(2) << "\n";
  return ok ? kOk : kPropertyFailure;
}

int cmd_reconstruct(const std::string& path, std::size_t dim, Seed seed) {
  const json doc = io::read_json_file(path);
  LineMap m;
  try {
    if (doc.is_object() && doc.value("kind", std::string()) == "line_table") m = io::parse_line_table(doc);
    else m = induced_line_map(io::parse_spec(doc));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (m.dim != dim)
    throw UsageError("--dim " + std::to_string(dim) + " does not match the map dimension " + std::to_string(m.dim));
  json out;
  bool ok = true;
  try {
    const auto t = reconstruct_semilinear(m, dim);
    out["reconstructed"] = io::to_json(t);
    out["holdout_mismatches"] = count_reconstruction_mismatches(m, t, 50, seed);
    ok = out["holdout_mismatches"].get<std::size_t>() == 0;
  } catch (const NotSemilinear& e) {
    out["error"] = "not semilinear";
    out["diagnostic"] = e.what();
    ok = false;
  }
  if (dim >= 3) {
    const auto pr = verify_projectivity(m, 50, seed);
    out["projectivity"] = io::to_json(pr);
    ok = ok && pr.passed;
  } else {
    out["projectivity"] = "unverifiable: coplanarity gives no certificate in dimension 2";
  }
  out["passed"] = ok;
  std::cout << out.dump(2) << "\n";
  return ok ? kOk : kPropertyFailure;
}

int cmd_suite(const std::string& dims, std::size_t trials, Seed seed, bool skip_float, const std::string& out) {
  static const std::regex range_re(R"(^\s*(\d+)\s*\.\.\s*(\d+)\s*$|^\s*(\d+)\s*$)");
  std::smatch m;
  if (!std::regex_match(dims, m, range_re)) throw UsageError("--dims must look like 2..5");
  SuiteOptions opt;
  opt.dim_lo = std::stoul(m[1].matched ? m[1].str() : m[3].str());
  opt.dim_hi = std::stoul(m[2].matched ? m[2].str() : m[3].str());
  if (opt.dim_lo < 1 || opt.dim_lo > opt.dim_hi) throw UsageError("--dims: empty or invalid range");
  opt.trials = trials;
  opt.seed = seed;
  opt.skip_float = skip_float;
  const auto start = std::chrono::steady_clock::now();
  const auto res = run_suite(opt);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  if (out.empty()) std::cout << res.report.dump(2) << "\n";
  else io::write_json_file(out, res.report);
  std::cerr << "suite: " << res.failures << " failure(s), wall-clock " << elapsed.count() << " s\n";
  return res.failures == 0 ? kOk : kPropertyFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"psdcone: operator-range relations on the positive semidefinite cone"};
  app.require_subcommand(1);

  std::string a_path, b_path, backend, out_prefix, out;
  std::optional<double> tol;
  std::size_t trials = 100, dim = 0;
  Seed seed = 0;

  auto* analyze = app.add_subcommand("analyze", "relation report for a pair of PSD matrices");
  analyze->add_option("A", a_path, "matrix file")->required();
  analyze->add_option("B", b_path, "matrix file")->required();
  analyze->add_option("--backend", backend, "exact|float");
  analyze->add_option("--tol", tol, "relative tolerance for float rank/PSD decisions");

  auto* decomp = app.add_subcommand("decompose", "Lebesgue decomposition of A with respect to B");
  decomp->add_option("A", a_path)->required();
  decomp->add_option("B", b_path)->required();
  decomp->add_option("--out-prefix", out_prefix)->required();
  decomp->add_option("--trials", trials, "maximality samples")->capture_default_str();
  decomp->add_option("--seed", seed)->capture_default_str();

  auto* map = app.add_subcommand("map", "preserver maps");
  map->require_subcommand(1);
  std::string spec_path, t_path, flavor = "linear";
  auto* apply = map->add_subcommand("apply", "apply a map spec to a matrix");
  apply->add_option("--spec", spec_path)->required();
  apply->add_option("A", a_path)->required();
  apply->add_option("--backend", backend, "exact|float");
  apply->add_option("--tol", tol);
  apply->add_option("--out", out, "output file (default stdout)");
  auto* verify = map->add_subcommand("verify", "sampled preservation and range-form checks");
  verify->add_option("--spec", spec_path)->required();
  verify->add_option("--T", t_path, "matrix file of the semilinear operator T");
  verify->add_option("--flavor", flavor, "linear|conjugate")->capture_default_str();
  verify->add_option("--dim", dim)->required();
  verify->add_option("--trials", trials)->required();
  verify->add_option("--seed", seed)->required();
  verify->add_option("--tol", tol);

  auto* recon = app.add_subcommand("reconstruct", "recover T and its flavor from an induced line map");
  recon->add_option("--map", spec_path, "map spec or line table")->required();
  recon->add_option("--dim", dim)->required();
  recon->add_option("--seed", seed)->capture_default_str();

  std::string dims = "2..4";
  bool skip_float = false;
  auto* suite = app.add_subcommand("suite", "packaged property suite");
  suite->add_option("--dims", dims)->capture_default_str();
  suite->add_option("--trials", trials)->required();
  suite->add_option("--seed", seed)->required();
  suite->add_flag("--skip-float", skip_float);
  suite->add_option("--out", out, "report file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*analyze) return cmd_analyze(a_path, b_path, backend, tol);
    if (*decomp) return cmd_decompose(a_path, b_path, out_prefix, trials, seed);
    if (*apply) return cmd_map_apply(spec_path, a_path, backend, tol, out);
    if (*verify) return cmd_map_verify(spec_path, t_path, flavor, dim, trials, seed, tol);
    if (*recon) return cmd_reconstruct(spec_path, dim, seed);
    if (*suite) return cmd_suite(dims, trials, seed, skip_float, out);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const DimensionMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}
