#include "cli.hpp"
#include "cli_cases.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using namespace ifsm;

namespace {

const std::string fx = IFSM_FIXTURES_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ifsm_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("every subcommand is deterministic") {
  TempDir tmp;
  std::set<std::string> seen;
  for (const auto& c : testing::cli_cases(fx)) {
    CAPTURE(c.label);
    seen.insert(c.args[0]);
    std::vector<std::string> outputs;
    for (int rep = 0; rep < 2; ++rep) {
      auto args = c.args;
      const auto out = tmp.path / (c.label + std::to_string(rep) + ".out");
      const auto rep_path = tmp.path / (c.label + std::to_string(rep) + ".json");
      args.insert(args.end(), {"--out", out.string()});
      if (c.has_report)
        args.insert(args.end(), {"--report", rep_path.string()});
      const auto r = run(args);
      REQUIRE(r.code == 0);
      CHECK(r.out.empty());
      outputs.push_back(slurp(out) + (c.has_report ? slurp(rep_path) : ""));
    }
    CHECK(!outputs[0].empty());
    CHECK(outputs[0] == outputs[1]);
  }
  CHECK(seen.size() == cli::commands().size());
}

TEST_CASE("atoms output for the shift bank") {
  const auto r = run({"atoms", "--bank", fx + "/shift_bank.json", "--vector", fx + "/e0.json", "--k", "3"});
  CHECK(r.code == 0);
  CHECK(r.out == "numerator,depth,base,position_float,mass\n0,3,2,0.0,1.0\n");
}

TEST_CASE("validate report and exit codes") {
  const auto ok = run({"validate", "--bank", fx + "/haar_bank.json"});
  CHECK(ok.code == 0);
  const auto j = nlohmann::json::parse(ok.out);
  CHECK(j.at("passed") == true);

  TempDir tmp;
  const auto out = tmp.path / "report.json";
  const auto bad = run({"validate", "--bank", fx + "/degenerate_bank.json", "--out", out.string()});
  CHECK(bad.code == 2);
  const auto jb = nlohmann::json::parse(slurp(out));
  CHECK(jb.at("passed") == false);
  CHECK(jb.at("max_defect").get<double>() >= 0.1);

  CHECK(run({"atoms", "--bank", fx + "/degenerate_bank.json", "--k", "2"}).code == 2);
}

TEST_CASE("malformed input exits with 1") {
  TempDir tmp;
  const auto broken = tmp.path / "broken.json";
  std::ofstream(broken) << "{ \"n\": 2, \"filters\": [";
  const auto extra = tmp.path / "extra.json";
  std::ofstream(extra) << R"({"n": 2, "filters": [], "colour": 1})";

  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"atoms", "--bank", broken.string()}).code == 1);
  CHECK(run({"atoms", "--bank", extra.string()}).code == 1);
  CHECK(run({"atoms", "--bank", (tmp.path / "missing.json").string()}).code == 1);
  CHECK(run({"atoms", "--bank", "builtin:haar", "--window", "3"}).code == 1);
  CHECK(run({"atoms", "--bank", "builtin:haar", "--k"}).code == 1);
  CHECK(run({"atoms", "--bank", "builtin:haar", "--k", "two"}).code == 1);
  CHECK(run({"fourier", "--bank", "builtin:haar", "--t-grid", "0:1"}).code == 1);
  CHECK(run({"fourier", "--bank", "builtin:haar", "--method", "guess"}).code == 1);
  CHECK(run({"moments", "--ifs", fx + "/haar_bank.json"}).code == 1);
  const auto r = run({"cdf", "--bank", "builtin:haar", "--x-grid", "nope"});
  CHECK(r.code == 1);
  CHECK(!r.err.empty());
  CHECK(r.out.empty());
}

TEST_CASE("cap overflow exits with 3") {
  CHECK(run({"atoms", "--bank", fx + "/haar_bank.json", "--k", "30"}).code == 3);
  CHECK(run({"atoms", "--bank", "builtin:haar", "--k", "8", "--node-cap", "100"}).code == 3);
  CHECK(run({"hutchinson-cascade", "--ifs", fx + "/dyadic_ifs.json", "--k", "40"}).code == 3);
}

TEST_CASE("config file values are overridden by flags") {
  TempDir tmp;
  const auto cfg = tmp.path / "cfg.json";
  std::ofstream(cfg) << R"({"bank": "builtin:haar", "k": 2})";
  const auto a = run({"atoms", "--config", cfg.string()});
  CHECK(a.code == 0);
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 5);
  const auto b = run({"atoms", "--config", cfg.string(), "--k", "3"});
  CHECK(std::count(b.out.begin(), b.out.end(), '\n') == 9);

  const auto bad = tmp.path / "bad.json";
  std::ofstream(bad) << R"({"bank": "builtin:haar", "colour": 2})";
  CHECK(run({"atoms", "--config", bad.string()}).code == 1);
}

TEST_CASE("cyclicity report carries verdict, witness and caveat") {
  const auto r = run({"cyclicity", "--bank", fx + "/shift_bank.json", "--vector", fx + "/e0.json", "--k", "6"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("verdict") == "VIOLATION");
  CHECK(j.at("level") == 6);
  REQUIRE(j.at("witnesses").size() == 1);
  const auto& w = j.at("witnesses")[0];
  CHECK(w.at("channel") == 1);
  CHECK(w.at("numerator") == 32);
  CHECK(w.at("depth") == 6);
  CHECK(w.at("push_mass") == 1.0);
  CHECK(w.at("base_mass") == 0.0);
  CHECK(j.at("caveat").get<std::string>().find("never a proof") != std::string::npos);
}

TEST_CASE("every library operation is reachable from exactly one subcommand") {
  const std::vector<std::string> operations = {
      "validate_filterbank", "fourier_basis_bank", "monomial_bank",    "apply_s",
      "apply_s_star",        "verify_cuntz_relations", "solve_joint_eigenproblem", "atom_tree",
      "refine",              "fourier_of_atoms",  "fourier_error_bound", "cdf",
      "integrate",           "refinement_residual", "cascade",          "chaos_game",
      "solve_moments",       "self_similarity_residual", "attractor_cover", "pushforward_measure",
      "cyclicity_test",      "radon_nikodym_profile", "eigen_cross_check", "convergence_profile"};
  std::map<std::string, int> count;
  std::set<std::string> names;
  for (const auto& c : cli::commands()) {
    names.insert(c.name);
    for (const auto& op : c.operations)
      ++count[op];
  }
  for (const auto& op : operations) {
    CAPTURE(op);
    CHECK(count[op] == 1);
  }
  const std::set<std::string> expected = {"validate",   "atoms",          "fourier",          "cdf",
                                          "integrate",  "cyclicity",      "hutchinson-cascade", "hutchinson-chaos",
                                          "moments",    "eigen-check",    "cross-check",      "convergence"};
  CHECK(names == expected);
}
