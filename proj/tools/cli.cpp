#include "cli.hpp"

#include "ifsm/cuntz.hpp"
#include "ifsm/diagnostics.hpp"
#include "ifsm/errors.hpp"
#include "ifsm/filterbank.hpp"
#include "ifsm/hutchinson.hpp"
#include "ifsm/io.hpp"
#include "ifsm/nadic_measure.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

namespace ifsm::cli {

using nlohmann::json;

namespace {

/// Exit with status 2: the bank does not define a Cuntz representation.
struct ValidationFailure : Error {
  using Error::Error;
};

const std::vector<CommandInfo> kCommands = {
    {"validate", "check unitarity of a filter bank and the Cuntz relations on basis probes",
     {"validate_filterbank", "verify_cuntz_relations", "fourier_basis_bank", "monomial_bank"},
     {"bank", "samples", "tol", "out"}},
    {"atoms", "atomic approximant mu_f^(k) as CSV",
     {"atom_tree", "refine", "apply_s_star"},
     {"bank", "vector", "k", "prune-eps", "node-cap", "refine", "out"}},
    {"fourier", "Fourier transform of mu_f^(k) on a t grid",
     {"fourier_of_atoms", "fourier_error_bound", "fourier_by_transfer"},
     {"bank", "vector", "k", "t-grid", "method", "prune-eps", "node-cap", "out", "report"}},
    {"cdf", "distribution function of mu_f^(k) on an x grid",
     {"cdf"},
     {"bank", "vector", "k", "x-grid", "prune-eps", "node-cap", "out"}},
    {"integrate", "integral of a test function against mu_f^(k) with optional certified bound",
     {"integrate"},
     {"bank", "vector", "k", "psi", "l1-moment", "prune-eps", "node-cap", "out"}},
    {"cyclicity", "finite-level absolute continuity test of the channel pushforwards",
     {"cyclicity_test", "pushforward_measure", "radon_nikodym_profile", "apply_s"},
     {"bank", "vector", "k", "ac-tol", "out"}},
    {"hutchinson-cascade", "k-fold Hutchinson iterate of a point mass",
     {"cascade", "self_similarity_residual", "attractor_cover"},
     {"ifs", "k", "start", "out", "report"}},
    {"hutchinson-chaos", "chaos game moments and histogram",
     {"chaos_game"},
     {"ifs", "samples", "burn-in", "seed", "bins", "out"}},
    {"moments", "exact moments of the IFS fixed point",
     {"solve_moments"},
     {"ifs", "max-order", "out"}},
    {"eigen-check", "joint eigenvector search for the adjoint isometries",
     {"solve_joint_eigenproblem"},
     {"bank", "window", "tol", "out"}},
    {"cross-check", "eigenvector cascade vs atom tree, and the refinement identity",
     {"eigen_cross_check", "refinement_residual"},
     {"bank", "vector", "k", "window", "tol", "out"}},
    {"convergence", "sup-grid distance of F^(k) to F^(k_max)",
     {"convergence_profile"},
     {"bank", "vector", "k-min", "k", "x-grid", "out"}},
};

const std::vector<std::string> kFlagOptions = {"refine"};

using Options = std::map<std::string, std::string>;

bool is_flag(const std::string& key) {
  return std::find(kFlagOptions.begin(), kFlagOptions.end(), key) != kFlagOptions.end();
}

std::string json_scalar_to_string(const json& v, const std::string& key) {
  if (v.is_string())
    return v.get<std::string>();
  if (v.is_boolean())
    return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer())
    return std::to_string(v.get<std::int64_t>());
  if (v.is_number())
    return io::format_double(v.get<double>());
  throw ParseError("config key '" + key + "' must be a scalar");
}

Options parse_options(const CommandInfo& cmd, const std::vector<std::string>& args) {
  CLI::App app{cmd.summary, "ifsm " + cmd.name};
  app.set_help_flag();
  std::string config;
  CLI::Option* config_opt = app.add_option("--config", config);
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> given;
  for (const auto& key : cmd.options)
    given.emplace_back(key, is_flag(key) ? app.add_flag("--" + key) : app.add_option("--" + key, values[key]));

  // CLI11 consumes the argument list from the back
  std::vector<std::string> rest(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    throw ParseError("'" + cmd.name + "': " + e.what());
  }

  Options flags;
  for (const auto& [key, opt] : given)
    if (opt->count() > 0)
      flags[key] = is_flag(key) ? "true" : values[key];

  Options merged;
  if (config_opt->count() > 0) {
    const json j = io::read_json_file(config);
    if (!j.is_object())
      throw ParseError("config file must hold a JSON object");
    for (const auto& [key, v] : j.items()) {
      if (std::find(cmd.options.begin(), cmd.options.end(), key) == cmd.options.end())
        throw ParseError("config key '" + key + "' not accepted by '" + cmd.name + "'");
      merged[key] = json_scalar_to_string(v, key);
    }
  }
  for (auto& [k, v] : flags)
    merged[k] = v;
  return merged;
}

std::optional<std::string> get(const Options& o, const std::string& key) {
  auto it = o.find(key);
  if (it == o.end())
    return std::nullopt;
  return it->second;
}

std::int64_t get_int(const Options& o, const std::string& key, std::int64_t fallback, std::int64_t lo,
                     std::int64_t hi) {
  const auto s = get(o, key);
  if (!s)
    return fallback;
  std::int64_t v = 0;
  const auto r = std::from_chars(s->data(), s->data() + s->size(), v);
  if (r.ec != std::errc() || r.ptr != s->data() + s->size())
    throw ParseError("--" + key + " expects an integer, got '" + *s + "'");
  if (v < lo || v > hi)
    throw ParseError("--" + key + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return v;
}

double get_real(const Options& o, const std::string& key, double fallback) {
  const auto s = get(o, key);
  if (!s)
    return fallback;
  double v = 0.0;
  const auto r = std::from_chars(s->data(), s->data() + s->size(), v);
  if (r.ec != std::errc() || r.ptr != s->data() + s->size() || !std::isfinite(v))
    throw ParseError("--" + key + " expects a real number, got '" + *s + "'");
  return v;
}

std::string require(const Options& o, const std::string& key) {
  auto s = get(o, key);
  if (!s)
    throw ParseError("missing required --" + key);
  return *s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string p;
  while (std::getline(ss, p, sep))
    parts.push_back(p);
  return parts;
}

int builtin_size(const std::vector<std::string>& parts, std::size_t at) {
  if (parts.size() != at + 1)
    throw ParseError("builtin needs a size, e.g. builtin:fourier:3");
  int n = 0;
  const auto& s = parts[at];
  const auto r = std::from_chars(s.data(), s.data() + s.size(), n);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size() || n < 2 || n > 64)
    throw ParseError("builtin size must be an integer in 2..64");
  return n;
}

FilterBank load_bank(const Options& o) {
  const std::string spec = require(o, "bank");
  if (spec.rfind("builtin:", 0) == 0) {
    const auto parts = split(spec, ':');
    const std::string name = parts.size() > 1 ? parts[1] : "";
    if (name == "haar" && parts.size() == 2)
      return haar_bank();
    if (name == "shift" && parts.size() == 2)
      return monomial_bank(2);
    if (name == "d4" && parts.size() == 2)
      return daubechies4_bank();
    if (name == "fourier")
      return fourier_basis_bank(builtin_size(parts, 2));
    if (name == "monomial")
      return monomial_bank(builtin_size(parts, 2));
    throw ParseError("unknown builtin bank '" + spec + "'");
  }
  return io::bank_from_json(io::read_json_file(spec));
}

FilterBank load_validated_bank(const Options& o) {
  FilterBank fb = load_bank(o);
  const auto report = validate_filterbank(fb);
  if (!report.passed)
    throw ValidationFailure("filter bank fails unitarity: max defect " + io::format_double(report.max_defect));
  return fb;
}

CoeffVector load_vector(const Options& o) {
  const auto spec = get(o, "vector");
  if (!spec)
    return CoeffVector::delta(0);
  if (spec->rfind("builtin:e:", 0) == 0) {
    const std::string s = spec->substr(10);
    std::int64_t n = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), n);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
      throw ParseError("bad basis vector '" + *spec + "'");
    return CoeffVector::delta(n);
  }
  return io::vector_from_json(io::read_json_file(*spec));
}

AffineIFS load_ifs(const Options& o) {
  const std::string spec = require(o, "ifs");
  if (spec == "builtin:cantor")
    return {{{1.0 / 3, 0.0}, {1.0 / 3, 2.0 / 3}}, {0.5, 0.5}};
  if (spec == "builtin:dyadic")
    return {{{0.5, 0.0}, {0.5, 0.5}}, {0.5, 0.5}};
  if (spec.rfind("builtin:", 0) == 0)
    throw ParseError("unknown builtin IFS '" + spec + "'");
  return io::ifs_from_json(io::read_json_file(spec));
}

AtomTreeOptions tree_options(const Options& o) {
  AtomTreeOptions t;
  t.prune_eps = get_real(o, "prune-eps", 0.0);
  if (!(t.prune_eps >= 0.0 && t.prune_eps < 1.0))
    throw ParseError("--prune-eps must lie in [0, 1)");
  t.node_cap = static_cast<std::uint64_t>(get_int(o, "node-cap", kDefaultNodeCap, 1, 1'000'000'000));
  return t;
}

int depth(const Options& o, int fallback = 0) { return static_cast<int>(get_int(o, "k", fallback, 0, 62)); }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

/// Output of one command: the primary artefact and an optional side report.
struct Output {
  std::string primary;
  std::optional<std::string> report;
};

Output cmd_validate(const Options& o) {
  const FilterBank fb = load_bank(o);
  const int samples = static_cast<int>(get_int(o, "samples", recommended_samples(fb), 1, 10'000'000));
  const double tol = get_real(o, "tol", kDefaultUnitarityTol);
  if (!(tol > 0.0))
    throw ParseError("--tol must be positive");
  if (samples < 2 * fb.degree_span() + 1)
    throw ParseError("--samples must be at least 2*span+1 = " + std::to_string(2 * fb.degree_span() + 1));
  const ValidationReport r = validate_filterbank(fb, samples, tol);

  std::vector<CoeffVector> probes;
  for (int n = -2; n <= 2; ++n)
    probes.push_back(CoeffVector::delta(n));
  const CuntzReport c = verify_cuntz_relations(fb, probes);

  json j = {{"passed", r.passed},
            {"max_defect", r.max_defect},
            {"worst_angle", r.worst_angle},
            {"samples_checked", r.samples_checked},
            {"unitarity_tol", tol},
            {"cuntz",
             {{"probes", json::array({-2, -1, 0, 1, 2})},
              {"orthogonality_defect", c.orthogonality_defect},
              {"completeness_defect", c.completeness_defect}}}};
  Output out{dump(j), std::nullopt};
  if (!r.passed)
    throw ValidationFailure(out.primary);
  return out;
}

Output cmd_atoms(const Options& o) {
  const FilterBank fb = load_validated_bank(o);
  const CoeffVector f = load_vector(o);
  const int k = depth(o, 0);
  const AtomTreeOptions t = tree_options(o);
  if (get(o, "refine")) {
    if (k < 1)
      throw ParseError("--refine needs --k >= 1");
    AtomTree tree(fb, f, k - 1, t);
    return {io::atoms_csv(tree.refine()), std::nullopt};
  }
  return {io::atoms_csv(atom_tree(fb, f, k, t)), std::nullopt};
}

Output cmd_fourier(const Options& o) {
  const FilterBank fb = load_validated_bank(o);
  const CoeffVector f = load_vector(o);
  const int k = depth(o, 0);
  const auto ts = io::parse_grid(require(o, "t-grid"));
  const std::string method = get(o, "method").value_or("atoms");
  std::vector<Complex> values;
  if (method == "atoms")
    values = fourier_of_atoms(atom_tree(fb, f, k, tree_options(o)), ts);
  else if (method == "transfer")
    values = fourier_by_transfer(fb, f, k, ts);
  else
    throw ParseError("--method must be 'atoms' or 'transfer'");

  json bounds = json::array();
  for (double t : ts)
    bounds.push_back({{"t", t}, {"bound", fourier_error_bound(t, k, fb.n_channels)}});
  json report = {{"k", k}, {"base", fb.n_channels}, {"method", method}, {"bounds", bounds}};
  return {io::complex_series_csv(ts, values), dump(report)};
}

Output cmd_cdf(const Options& o) {
  const FilterBank fb = load_validated_bank(o);
  const CoeffVector f = load_vector(o);
  const auto xs = io::parse_grid(require(o, "x-grid"));
  const auto values = cdf(atom_tree(fb, f, depth(o, 0), tree_options(o)), xs);
  return {io::cdf_csv(xs, values), std::nullopt};
}

std::function<Complex(double)> test_function(const std::string& name) {
  using std::numbers::pi;
  if (name == "one")
    return [](double) { return Complex(1.0); };
  if (name == "x")
    return [](double x) { return Complex(x); };
  if (name == "x2")
    return [](double x) { return Complex(x * x); };
  if (name == "cos2pi")
    return [](double x) { return Complex(std::cos(2 * pi * x)); };
  if (name == "sin2pi")
    return [](double x) { return Complex(std::sin(2 * pi * x)); };
  throw ParseError("--psi must be one of one, x, x2, cos2pi, sin2pi");
}

Output cmd_integrate(const Options& o) {
  const FilterBank fb = load_validated_bank(o);
  const CoeffVector f = load_vector(o);
  const int k = depth(o, 0);
  const std::string psi = get(o, "psi").value_or("one");
  std::optional<double> moment;
  if (get(o, "l1-moment"))
    moment = get_real(o, "l1-moment", 0.0);
  if (moment && *moment < 0.0)
    throw ParseError("--l1-moment must be >= 0");
  const auto r = integrate(atom_tree(fb, f, k, tree_options(o)), test_function(psi), moment);
  json j = {{"psi", psi}, {"k", k}, {"value", complex_json(r.value)}, {"bound", nullptr}};
  if (r.bound)
    j["bound"] = *r.bound;
  return {dump(j), std::nullopt};
}

Output cmd_cyclicity(const Options& o) {
  const FilterBank fb = load_validated_bank(o);
  const CoeffVector f = load_vector(o);
  const int k = static_cast<int>(get_int(o, "k", 1, 1, 62));
  const double ac_tol = get_real(o, "ac-tol", kDefaultAcTol);
  const CyclicityReport r = cyclicity_test(fb, f, k, ac_tol);

  json witnesses = json::array();
  for (const auto& w : r.violations)
    witnesses.push_back({{"channel", w.channel},
                         {"numerator", w.address.numerator},
                         {"depth", w.address.depth},
                         {"push_mass", w.push_mass},
                         {"base_mass", w.base_mass}});
  const AtomicMeasure base = atom_tree(fb, f, k);
  json profiles = json::array();
  for (int j = 0; j < fb.n_channels; ++j) {
    const auto p = radon_nikodym_profile(pushforward_measure(fb, f, j, k), base, ac_tol);
    json ratios = json::array();
    for (const auto& q : p.ratios)
      ratios.push_back({{"numerator", q.address.numerator}, {"ratio", q.ratio}});
    json singular = json::array();
    for (const auto& a : p.singular)
      singular.push_back(a.numerator);
    profiles.push_back({{"channel", j}, {"ratios", ratios}, {"singular", singular}});
  }
  json j = {{"verdict", to_string(r.verdict)},
            {"level", r.level},
            {"witnesses", witnesses},
            {"caveat", kCyclicityCaveat},
            {"radon_nikodym", profiles}};
  return {dump(j), std::nullopt};
}

Output cmd_cascade(const Options& o) {
  const AffineIFS ifs = load_ifs(o);
  const int k = depth(o, 0);
  const double start = get_real(o, "start", 0.0);
  const PointMassCloud cloud = cascade(ifs, k, start);
  json report = {{"k", k}, {"residual_w1", self_similarity_residual(ifs, cloud)}};
  if (k >= 1) {
    const AttractorCover cover = attractor_cover(ifs, k);
    json intervals = json::array();
    for (const auto& iv : cover.intervals)
      intervals.push_back(json::array({iv.lo, iv.hi}));
    report["cover"] = {{"hull", json::array({cover.hull.lo, cover.hull.hi})},
                       {"max_diameter", cover.max_diameter},
                       {"diameter_bound", cover.diameter_bound},
                       {"non_overlapping", cover.non_overlapping},
                       {"intervals", intervals}};
  }
  return {io::cloud_csv(cloud), dump(report)};
}

Output cmd_chaos(const Options& o) {
  const AffineIFS ifs = load_ifs(o);
  const auto samples = static_cast<std::uint64_t>(get_int(o, "samples", 1'000'000, 1, 1'000'000'000));
  const auto burn_in = static_cast<std::uint64_t>(get_int(o, "burn-in", 100, 0, 1'000'000'000));
  const auto seed = static_cast<std::uint64_t>(get_int(o, "seed", 1, 0, INT64_MAX));
  const int bins = static_cast<int>(get_int(o, "bins", 0, 0, 1'000'000));
  std::optional<HistogramSpec> hist;
  if (bins > 0) {
    const Interval hull = invariant_interval(ifs);
    hist = HistogramSpec{bins, hull.lo, std::nextafter(hull.hi, INFINITY)};
  }
  const ChaosGameResult r = chaos_game(ifs, samples, burn_in, seed, hist);
  json j = {{"samples", r.samples},
            {"burn_in", burn_in},
            {"seed", seed},
            {"mean", r.mean},
            {"variance", r.variance},
            {"histogram", nullptr}};
  if (hist)
    j["histogram"] = {{"lo", r.hist_lo}, {"hi", r.hist_hi}, {"counts", r.histogram}};
  return {dump(j), std::nullopt};
}

Output cmd_moments(const Options& o) {
  const AffineIFS ifs = load_ifs(o);
  const int max_order = static_cast<int>(get_int(o, "max-order", 6, 1, 64));
  const auto m = solve_moments(ifs, max_order);
  std::ostringstream csv;
  csv << "order,moment\n";
  for (std::size_t r = 0; r < m.size(); ++r)
    csv << r << ',' << io::format_double(m[r]) << '\n';
  return {csv.str(), std::nullopt};
}

json eigen_json(const EigenSolution& e) {
  json lambdas = json::array();
  double sum = 0.0;
  for (auto l : e.lambdas) {
    lambdas.push_back(complex_json(l));
    sum += std::norm(l);
  }
  json j = {{"found", e.found}, {"window", json::array({e.window.lo, e.window.hi})}};
  if (e.found) {
    j["lambdas"] = lambdas;
    j["sum_abs_lambda_sq"] = sum;
    j["residual"] = e.residual;
    j["vector"] = io::vector_to_json(e.vector);
  } else {
    j["message"] = "no joint eigenvector found in window";
  }
  return j;
}

Output cmd_eigen(const Options& o) {
  const FilterBank fb = load_validated_bank(o);
  const int w = static_cast<int>(get_int(o, "window", default_eigen_window(fb), 1, 4096));
  const double tol = get_real(o, "tol", kDefaultEigenTol);
  return {dump(eigen_json(solve_joint_eigenproblem(fb, w, tol))), std::nullopt};
}

Output cmd_cross_check(const Options& o) {
  const FilterBank fb = load_validated_bank(o);
  const CoeffVector f = load_vector(o);
  const int k = static_cast<int>(get_int(o, "k", 6, 1, 62));
  const int w = static_cast<int>(get_int(o, "window", default_eigen_window(fb), 1, 4096));
  const double tol = get_real(o, "tol", kDefaultEigenTol);
  const EigenCrossCheck c = eigen_cross_check(fb, k, w, tol);
  json j = {{"k", k}, {"eigen", eigen_json(c.eigen)}};
  if (c.eigen.found) {
    j["cascade_atoms"] = c.cascade_atoms;
    j["tree_atoms"] = c.tree_atoms;
    j["positions_match"] = c.positions_match;
    j["max_mass_discrepancy"] = c.max_mass_discrepancy;
  }
  j["refinement_residual"] = refinement_residual(fb, f, k);
  return {dump(j), std::nullopt};
}

Output cmd_convergence(const Options& o) {
  const FilterBank fb = load_validated_bank(o);
  const CoeffVector f = load_vector(o);
  const int k_max = static_cast<int>(get_int(o, "k", 8, 1, 62));
  const int k_min = static_cast<int>(get_int(o, "k-min", 0, 0, 61));
  const auto xs = io::parse_grid(require(o, "x-grid"));
  const auto rows = convergence_profile(fb, f, k_min, k_max, xs);
  std::ostringstream csv;
  csv << "k,sup_diff,scale\n";
  for (const auto& r : rows)
    csv << r.k << ',' << io::format_double(r.sup_diff) << ',' << io::format_double(r.scale) << '\n';
  return {csv.str(), std::nullopt};
}

const std::map<std::string, std::function<Output(const Options&)>> kHandlers = {
    {"validate", cmd_validate},       {"atoms", cmd_atoms},
    {"fourier", cmd_fourier},         {"cdf", cmd_cdf},
    {"integrate", cmd_integrate},     {"cyclicity", cmd_cyclicity},
    {"hutchinson-cascade", cmd_cascade}, {"hutchinson-chaos", cmd_chaos},
    {"moments", cmd_moments},         {"eigen-check", cmd_eigen},
    {"cross-check", cmd_cross_check}, {"convergence", cmd_convergence},
};

void usage(std::ostream& err) {
  err << "usage: ifsm <command> [options]\n\ncommands:\n";
  for (const auto& c : kCommands) {
    err << "  " << c.name << "  " << c.summary << "\n     ";
    for (const auto& opt : c.options)
      err << " --" << opt;
    err << "\n";
  }
}

void emit(const Options& o, const std::string& key, const std::string& content, std::ostream& out) {
  if (const auto path = get(o, key))
    io::write_atomically(*path, content);
  else if (key == "out")
    out << content;
}

} // namespace

const std::vector<CommandInfo>& commands() { return kCommands; }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty() || args[0] == "--help" || args[0] == "help") {
    usage(err);
    return args.empty() ? kMalformedInput : kOk;
  }
  const auto cmd = std::find_if(kCommands.begin(), kCommands.end(),
                                [&](const CommandInfo& c) { return c.name == args[0]; });
  if (cmd == kCommands.end()) {
    err << "ifsm: unknown command '" << args[0] << "'\n";
    usage(err);
    return kMalformedInput;
  }

  Options options;
  try {
    options = parse_options(*cmd, args);
    const Output result = kHandlers.at(cmd->name)(options);
    emit(options, "out", result.primary, out);
    if (result.report)
      emit(options, "report", *result.report, out);
    return kOk;
  } catch (const ValidationFailure& e) {
    // validate still writes its report before failing
    if (cmd->name == "validate")
      emit(options, "out", e.what(), out);
    else
      err << "ifsm: " << e.what() << "\n";
    return kValidationFailed;
  } catch (const DepthOverflow& e) {
    err << "ifsm: " << e.what() << "\n";
    return kCapOverflow;
  } catch (const std::exception& e) {
    err << "ifsm: " << e.what() << "\n";
    return kMalformedInput;
  }
}

} // namespace ifsm::cli
