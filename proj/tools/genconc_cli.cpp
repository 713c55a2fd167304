// genconc: command-line front end over the JSON formats in json_io.hpp.
//
// Exit status: 0 success, 2 validation error, 3 numerical failure,
// 4 state or density matrix outside the family / class.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"

#include "genconc/genconc.hpp"
#include "genconc/json_io.hpp"

using namespace genconc;
using json_io::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitNotInClass = 4;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NumericalFailure: return kExitNumerical;
    case ErrorKind::NotInFamily:
    case ErrorKind::NotInClass:
    case ErrorKind::NotTwoLevel: return kExitNotInClass;
    default: return kExitValidation;
  }
}

struct Options {
  std::string input;
  std::string output;
  std::string format = "json";
  std::string family;
  std::string method = "tau-takagi";
  int k = 1;
  int k_min = 1;
  int k_max = 3;
  double tol = 1e-8;
  std::uint64_t seed = 1;
  std::size_t count = 1;
  std::size_t samples = 1000;
  bool normalize = false;
  bool paper_explicit = false;
  bool paper_antidiagonal = false;
  bool dense = false;
};

json lambdas_json(const RealVector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

std::string csv_cell(const json& v) {
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + csv_cell(v[i]);
    return s;
  }
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

/// CSV rendering: arrays of flat objects become a table, a flat object
/// becomes key,value lines.
std::string to_csv(const json& j) {
  std::ostringstream out;
  const json* table = nullptr;
  for (const char* key : {"results", "entries", "params"}) {
    if (j.contains(key) && j.at(key).is_array()) table = &j.at(key);
  }
  if (table && !table->empty() && table->at(0).is_object()) {
    bool first = true;
    for (const auto& row : *table) {
      if (first) {
        std::string header;
        for (auto it = row.begin(); it != row.end(); ++it) header += (header.empty() ? "" : ",") + it.key();
        out << header << "\n";
        first = false;
      }
      std::string line;
      bool lead = true;
      for (auto it = row.begin(); it != row.end(); ++it) {
        line += (lead ? "" : ",") + csv_cell(it.value());
        lead = false;
      }
      out << line << "\n";
    }
    return out.str();
  }
  if (table && !table->empty() && table->at(0).is_array()) {
    for (const auto& row : *table) out << csv_cell(row[0]) << "," << csv_cell(row[1]) << "," << csv_cell(row[2]) << "\n";
    return out.str();
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.value().is_object()) continue;
    out << it.key() << "," << csv_cell(it.value()) << "\n";
  }
  return out.str();
}

void emit(const Options& opt, const json& j) {
  const std::string text = opt.format == "csv" ? to_csv(j) : j.dump(2) + "\n";
  if (opt.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(opt.output);
  if (!out) fail(ErrorKind::Validation, "cannot write " + opt.output);
  out << text;
}

std::optional<Family> parse_family(const std::string& name) {
  if (name.empty()) return std::nullopt;
  if (name == "sym") return Family::Sym;
  if (name == "recursive") return Family::Recursive;
  fail(ErrorKind::Validation, "unknown family '" + name + "' (expected sym or recursive)");
}

/// k from a density dimension 2^{2k+2}.
int k_from_dim(Index dim) {
  for (int k = 1; k <= 4; ++k) {
    if (dim == (Index{1} << (2 * k + 2))) return k;
  }
  fail(ErrorKind::Dimension, "density dimension " + std::to_string(dim) +
                                 " is not 2^(2k+2) for k in [1, 4]");
}

DensityMatrix load_density(const std::string& path) {
  const json j = json_io::read_file(path);
  if (j.contains("states")) return ensemble_density(json_io::ensemble_from_json(j));
  return json_io::density_from_json(j);
}

/// The p to use for a density matrix: explicit family if given, otherwise the
/// first family (recursive, then sym) whose subspace contains the support.
BiformMatrix choose_p(const DensityMatrix& rho, const Options& opt) {
  const int k = k_from_dim(rho.dim());
  if (opt.paper_explicit) {
    if (rho.dim() != 16) fail(ErrorKind::Validation, "--paper-explicit needs a 16x16 density matrix");
    return p16_explicit();
  }
  if (const auto fam = parse_family(opt.family)) return derive_p(FamilySpec{*fam, k});
  std::vector<FamilySpec> candidates{{Family::Recursive, k}};
  if (k == 1) candidates.push_back({Family::Sym, 1});
  const ComplexMatrix support = support_vectors(rho);
  for (const auto& spec : candidates) {
    bool inside = true;
    for (Index i = 0; i < support.cols() && inside; ++i) {
      try {
        family_project(ComplexVector(support.col(i)), spec, kClassTolerance);
      } catch (const NotInFamilyError&) {
        inside = false;
      }
    }
    if (inside) return derive_p(spec);
  }
  fail(ErrorKind::NotInClass, "density matrix is not supported on any d-computable family");
}

json mixed_report(const DensityMatrix& rho, const BiformMatrix& p, const std::string& method) {
  json out{{"family", to_string(p.family.family)}, {"k", p.family.k}, {"p_source", to_string(p.source)}};
  const auto result = mixed_concurrence(rho, p);
  out["rank"] = result.spectrum.lambdas.size();
  out["method"] = to_string(LambdaMethod::TauTakagi);
  out["lambdas"] = lambdas_json(result.spectrum.lambdas);
  out["raw"] = result.raw;
  out["clamped"] = result.clamped;
  out["eof"] = result.eof;
  out["caveat"] = result.caveat;
  if (method != "tau-takagi") {
    json agreement = json::object();
    double worst = 0.0;
    for (auto m : {LambdaMethod::RhoPEig, LambdaMethod::RMatrix}) {
      if (method != "all" && method != to_string(m)) continue;
      const auto other = lambda_spectrum(rho, p, m);
      const double diff = max_abs_difference(result.spectrum, other);
      agreement[to_string(m)] = {{"lambdas", lambdas_json(other.lambdas.head(
                                                 std::min<Index>(other.lambdas.size(), 2 * result.spectrum.lambdas.size() + 2)))},
                                 {"max_difference", diff}};
      worst = std::max(worst, diff);
    }
    if (agreement.empty()) fail(ErrorKind::Validation, "unknown --method '" + method + "'");
    out["method_agreement"] = agreement;
    if (worst > 1e-8) {
      emit(Options{}, out);
      fail(ErrorKind::NumericalFailure, "Lambda spectra from different methods disagree by " +
                                            std::to_string(worst));
    }
  }
  return out;
}

int cmd_construct(const Options& opt) {
  const auto params = json_io::any_params_from_json(json_io::read_file(opt.input));
  const PureState psi = std::visit([](const auto& p) { return family_state(p); }, params);
  json out = json_io::to_json(psi);
  emit(opt, out);
  return 0;
}

int cmd_pure(const Options& opt) {
  const PureState psi = json_io::pure_from_json(json_io::read_file(opt.input), opt.normalize);
  const RealVector spectrum = herm_eig(reduced_density(psi)).eigenvalues;
  json out{{"n", psi.n()}, {"E", eof_pure(psi)}, {"spectrum", lambdas_json(spectrum)}};
  try {
    const auto s = spectrum_structure(psi);
    out["two_level"] = true;
    out["levels"] = {{"lambda1", s.lambda1}, {"n", s.mult1}, {"lambda2", s.lambda2}, {"m", s.mult2}};
    out["D"] = gen_determinant_D(s);
    out["E_two_level"] = eof_two_level(s);
    out["d"] = s.mult1 == s.mult2 ? json(gen_concurrence_d(s)) : json(nullptr);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotTwoLevel) throw;
    out["two_level"] = false;
    out["levels"] = nullptr;
    out["D"] = nullptr;
    out["d"] = nullptr;
  }
  if (psi.n() == 2) out["C"] = wootters_C(psi);
  emit(opt, out);
  return 0;
}

int cmd_mixed(const Options& opt) {
  const DensityMatrix rho = load_density(opt.input);
  emit(opt, mixed_report(rho, choose_p(rho, opt), opt.method));
  return 0;
}

int cmd_decompose(const Options& opt) {
  const DensityMatrix rho = load_density(opt.input);
  const BiformMatrix p = choose_p(rho, opt);
  const auto result = mixed_concurrence(rho, p);
  json out{{"family", to_string(p.family.family)}, {"k", p.family.k},
           {"lambdas", lambdas_json(result.spectrum.lambdas)}, {"raw", result.raw},
           {"eof", result.eof}, {"caveat", result.caveat}};
  out["optimal"] = json_io::to_json(optimal_decomposition(rho, p));
  if (result.raw >= 0.0) {
    const Ensemble eq = equalized_decomposition(rho, p);
    json conc = json::array();
    for (const auto& z : eq.states) conc.push_back(state_concurrence(z, p));
    out["equalized"] = json_io::to_json(eq);
    out["equalized_concurrences"] = conc;
  } else {
    out["equalized"] = nullptr;
  }
  emit(opt, out);
  return 0;
}

int cmd_pmatrix(const Options& opt) {
  const Family fam = parse_family(opt.family).value_or(Family::Recursive);
  BiformMatrix p;
  std::optional<PComparison> comparison;
  if (opt.paper_explicit) {
    if (fam != Family::Sym || opt.k != 1) {
      fail(ErrorKind::Validation, "--paper-explicit is the k=1 sym-family matrix");
    }
    p = p16_explicit();
    comparison = compare_p(p, derive_p(p.family));
  } else if (opt.paper_antidiagonal) {
    if (fam != Family::Recursive) fail(ErrorKind::Validation, "--paper-antidiagonal applies to the recursive family");
    p = literal_antidiagonal_p(opt.k);
    comparison = compare_p(p, derive_p(p.family));
  } else {
    p = derive_p(FamilySpec{fam, opt.k});
  }
  json out{{"family", to_string(p.family.family)}, {"k", p.family.k},
           {"source", to_string(p.source)}, {"dim", p.dim()}};
  if (opt.dense) {
    json rows = json::array();
    for (Index r = 0; r < p.dim(); ++r) {
      json row = json::array();
      for (Index c = 0; c < p.dim(); ++c) row.push_back(p.p(r, c));
      rows.push_back(row);
    }
    out["p"] = rows;
  } else {
    json entries = json::array();
    for (const auto& e : to_triplets(p.p)) entries.push_back(json::array({e.row, e.col, e.value}));
    out["entries"] = entries;
  }
  if (comparison) {
    json diffs = json::array();
    for (const auto& e : comparison->on_support) diffs.push_back(json::array({e.row, e.col, e.value}));
    out["comparison_with_derived"] = {{"mismatches_on_support", comparison->mismatches_on_support},
                                      {"mismatches_total", comparison->mismatches_total},
                                      {"differing_entries_on_support", diffs}};
  }
  emit(opt, out);
  return 0;
}

int cmd_verify(const Options& opt) {
  if (opt.k_min < 1 || opt.k_max > 4 || opt.k_min > opt.k_max) {
    fail(ErrorKind::Validation, "k range must lie within [1, 4]");
  }
  json results = json::array();
  bool all_passed = true;
  for (int k = opt.k_min; k <= opt.k_max; ++k) {
    std::mt19937_64 rng(detail::splitmix64(opt.seed) ^ static_cast<std::uint64_t>(k));
    double det = 0.0, poly = 0.0, spread = 0.0;
    std::size_t mult_fail = 0, failures = 0;
    for (std::size_t i = 0; i < opt.samples; ++i) {
      const auto r = verify_identities(random_params(k, rng), opt.tol);
      det = std::max(det, r.det_residual);
      poly = std::max(poly, r.charpoly_residual);
      spread = std::max(spread, r.level_spread);
      mult_fail += r.multiplicity_ok ? 0 : 1;
      failures += r.passed ? 0 : 1;
    }
    all_passed = all_passed && failures == 0;
    results.push_back({{"k", k}, {"samples", opt.samples}, {"max_det_residual", det},
                       {"max_charpoly_residual", poly}, {"max_level_spread", spread},
                       {"multiplicity_failures", mult_fail}, {"failures", failures},
                       {"passed", failures == 0}});
  }
  emit(opt, json{{"tolerance", opt.tol}, {"seed", opt.seed}, {"results", results}});
  return all_passed ? 0 : kExitNumerical;
}

int cmd_sample(const Options& opt) {
  const Family fam = parse_family(opt.family).value_or(Family::Recursive);
  if (fam == Family::Sym && opt.k != 1) fail(ErrorKind::Validation, "sym family requires --k 1");
  std::mt19937_64 rng(detail::splitmix64(opt.seed));
  json params = json::array();
  for (std::size_t i = 0; i < opt.count; ++i) {
    if (fam == Family::Sym) {
      params.push_back(json_io::to_json(random_sym_params(rng)));
    } else {
      params.push_back(json_io::to_json(random_params(opt.k, rng)));
    }
  }
  emit(opt, json{{"family", to_string(fam)}, {"k", opt.k}, {"seed", opt.seed}, {"params", params}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized concurrence and entanglement of formation for d-computable states"};
  app.require_subcommand(1);
  Options opt;

  const auto add_io = [&](CLI::App* sub, bool needs_input) {
    auto* in = sub->add_option("-i,--input", opt.input, "Input JSON file");
    if (needs_input) in->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--output", opt.output, "Output file (default: stdout)");
    sub->add_option("--format", opt.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  };
  const auto add_k = [&](CLI::App* sub) {
    sub->add_option("-k,--k", opt.k, "Family level k (N = 2^(k+1))")->check(CLI::Range(1, 4));
  };
  const auto add_family = [&](CLI::App* sub) {
    sub->add_option("--family", opt.family, "sym or recursive")->check(CLI::IsMember({"sym", "recursive"}));
  };

  auto* construct = app.add_subcommand("construct", "Family parameters -> normalized pure state");
  add_io(construct, true);

  auto* pure = app.add_subcommand("pure", "Pure state -> spectrum, D, d, E");
  add_io(pure, true);
  pure->add_flag("--normalize", opt.normalize, "Normalize the amplitudes before evaluating");

  auto* mixed = app.add_subcommand("mixed", "Density matrix or ensemble -> Lambda, d(rho), E");
  add_io(mixed, true);
  add_family(mixed);
  mixed->add_option("--method", opt.method, "Also cross-check Lambda with another method")
      ->check(CLI::IsMember({"tau-takagi", "rho-p-eig", "R-matrix", "all"}));
  mixed->add_flag("--paper-explicit", opt.paper_explicit, "Use the published 16x16 p verbatim");

  auto* decompose = app.add_subcommand("decompose", "Density matrix -> optimal and equalized ensembles");
  add_io(decompose, true);
  add_family(decompose);

  auto* pmatrix = app.add_subcommand("pmatrix", "Emit the bilinear-form matrix p");
  add_io(pmatrix, false);
  add_k(pmatrix);
  add_family(pmatrix);
  pmatrix->add_flag("--paper-explicit", opt.paper_explicit, "Published 16x16 entry list (sym, k=1)");
  pmatrix->add_flag("--paper-antidiagonal", opt.paper_antidiagonal, "Literal published anti-diagonal rule");
  pmatrix->add_flag("--dense", opt.dense, "Dense matrix instead of 1-indexed triplets");

  auto* verify = app.add_subcommand("verify", "Determinant / characteristic polynomial identity suite");
  add_io(verify, false);
  verify->add_option("--k-min", opt.k_min)->check(CLI::Range(1, 4));
  verify->add_option("--k-max", opt.k_max)->check(CLI::Range(1, 4));
  verify->add_option("--samples", opt.samples, "Random parameter sets per k")->check(CLI::PositiveNumber);
  verify->add_option("--seed", opt.seed, "Master seed");
  verify->add_option("--tol", opt.tol, "Relative residual tolerance")->check(CLI::Range(1e-300, 1e-2));

  auto* sample = app.add_subcommand("sample", "Random normalized family parameters");
  add_io(sample, false);
  add_k(sample);
  add_family(sample);
  sample->add_option("--count", opt.count, "Number of parameter sets")->check(CLI::PositiveNumber);
  sample->add_option("--seed", opt.seed, "Master seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*construct) return cmd_construct(opt);
    if (*pure) return cmd_pure(opt);
    if (*mixed) return cmd_mixed(opt);
    if (*decompose) return cmd_decompose(opt);
    if (*pmatrix) return cmd_pmatrix(opt);
    if (*verify) return cmd_verify(opt);
    if (*sample) return cmd_sample(opt);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const json::exception& e) {
    std::cerr << "error (validation): " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}
