#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "../src/cli/commands.hpp"

using namespace hessianlab;
using namespace hessianlab::cli;
namespace fs = std::filesystem;

namespace {

std::string tmpdir(const std::string& tag) {
  std::string d = (fs::temp_directory_path() / ("hessianlab_test_" + tag)).string();
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("identities command: pass, fault injection, determinism") {
  RunOptions run;
  run.config["n_min"] = "3";
  run.config["n_max"] = "4";
  run.config["samples"] = "120";
  run.config["seed"] = "42";
  run.config["workers"] = "2";
  run.out_dir = tmpdir("ident");
  CHECK(dispatch("identities", run) == 0);
  std::string rep1 = read_text_file(run.out_dir + "/report.json");
  CHECK(rep1.find("\"all_pass\": true") != std::string::npos);

  // byte-identical report on re-run from the archived config
  RunOptions rerun;
  rerun.config = parse_config(read_text_file(run.out_dir + "/resolved.cfg"));
  rerun.config.erase("command");
  rerun.out_dir = tmpdir("ident2");
  CHECK(dispatch("identities", rerun) == 0);
  CHECK(read_text_file(rerun.out_dir + "/report.json") == rep1);

  // injected fault flips one identity and must name it with exit 1
  RunOptions faulty = run;
  faulty.config["fault"] = "sigma_grad_second_moment";
  faulty.out_dir = tmpdir("ident3");
  CHECK(dispatch("identities", faulty) == 1);
  std::string rep3 = read_text_file(faulty.out_dir + "/report.json");
  CHECK(rep3.find("\"first_failure\": \"sigma_grad_second_moment\"") != std::string::npos);
}

TEST_CASE("config errors exit with code 2") {
  RunOptions run;
  run.config["n"] = "not_a_number";
  run.out_dir = tmpdir("badcfg");
  CHECK(dispatch("inequality", run) == 2);
  RunOptions run2;
  run2.out_dir = tmpdir("badcmd");
  CHECK(dispatch("no-such-command", run2) == 2);
}

TEST_CASE("inequality command evaluates a batch and reports the verdict") {
  RunOptions run;
  run.config["inequality"] = "main";
  run.config["n"] = "4";
  run.config["k"] = "3";
  run.config["A"] = "1";
  run.config["count"] = "150";
  run.config["seed"] = "9";
  run.out_dir = tmpdir("ineq");
  CHECK(dispatch("inequality", run) == 0);
  std::string rep = read_text_file(run.out_dir + "/report.json");
  CHECK(rep.find("\"violations\": 0") != std::string::npos);
  CHECK(fs::exists(run.out_dir + "/witnesses.jsonl"));
  CHECK(fs::exists(run.out_dir + "/resolved.cfg"));
}

TEST_CASE("search command: counterexample run exits 0 with the verdict inside") {
  RunOptions run;
  run.config["inequality"] = "rw";
  run.config["n"] = "5";
  run.config["k"] = "3";
  run.config["A"] = "5";
  run.config["i"] = "1";
  run.config["K"] = "64";
  run.config["restarts"] = "32";
  run.config["iters"] = "300";
  run.config["seed"] = "4";
  run.config["workers"] = "2";
  run.out_dir = tmpdir("rw");
  CHECK(dispatch("search", run) == 0);
  std::string rep = read_text_file(run.out_dir + "/report.json");
  CHECK(rep.find("counterexample found") != std::string::npos);

  // reproducibility of the full report from the archived config
  RunOptions rerun;
  rerun.config = parse_config(read_text_file(run.out_dir + "/resolved.cfg"));
  rerun.config.erase("command");
  rerun.out_dir = tmpdir("rw2");
  CHECK(dispatch("search", rerun) == 0);
  CHECK(read_text_file(rerun.out_dir + "/report.json") == rep);
}

TEST_CASE("scan mode emits the frontier artifacts") {
  RunOptions run;
  run.config["inequality"] = "main";
  run.config["mode"] = "scan";
  run.config["n"] = "4";
  run.config["k"] = "3";
  run.config["A"] = "1";
  run.config["restarts"] = "8";
  run.config["iters"] = "120";
  run.config["lambda1_grid"] = "4,16,64";
  run.config["svg"] = "true";
  run.config["seed"] = "2";
  run.out_dir = tmpdir("scan");
  CHECK(dispatch("search", run) == 0);
  CHECK(fs::exists(run.out_dir + "/frontier.csv"));
  CHECK(fs::exists(run.out_dir + "/frontier.svg"));
  std::string csv = read_text_file(run.out_dir + "/frontier.csv");
  CHECK(csv.rfind("lambda1,min_gap,scale,feasible", 0) == 0);
}

TEST_CASE("solve-radial: closed-form agreement is reported") {
  RunOptions run;
  run.config["n"] = "3";
  run.config["k"] = "2";
  run.config["nodes"] = "800";
  run.out_dir = tmpdir("radial");
  CHECK(dispatch("solve-radial", run) == 0);
  std::string rep = read_text_file(run.out_dir + "/report.json");
  CHECK(rep.find("closed_form_sup_error") != std::string::npos);
  CHECK(fs::exists(run.out_dir + "/solution.csv"));
}

TEST_CASE("solve-radial rejects nonpositive f with exit 1") {
  RunOptions run;
  run.config["f"] = "poly:1,-2";  // 1 - 2r crosses zero inside [0, 1]
  run.out_dir = tmpdir("radialbad");
  CHECK(dispatch("solve-radial", run) == 1);
}

TEST_CASE("solve-grid small run with mesh study") {
  RunOptions run;
  run.config["n"] = "2";
  run.config["k"] = "2";
  run.config["N"] = "17";
  run.config["mesh_study"] = "true";
  run.out_dir = tmpdir("grid");
  CHECK(dispatch("solve-grid", run) == 0);
  std::string rep = read_text_file(run.out_dir + "/report.json");
  CHECK(rep.find("\"converged\": true") != std::string::npos);
  CHECK(rep.find("sandwich_holds\": true") != std::string::npos);
  CHECK(rep.find("mesh_study") != std::string::npos);
}

TEST_CASE("rigidity quadratic family and growth rejection") {
  RunOptions run;
  run.config["surrogate"] = "quadratic";
  run.config["pts"] = "15";
  run.out_dir = tmpdir("rig");
  CHECK(dispatch("rigidity", run) == 0);
  std::string rep = read_text_file(run.out_dir + "/report.json");
  CHECK(rep.find("\"spread\": 0.0") != std::string::npos);

  RunOptions bad;
  bad.config["surrogate"] = "growth_violating";
  bad.out_dir = tmpdir("rigbad");
  CHECK(dispatch("rigidity", bad) == 0);
  std::string rep2 = read_text_file(bad.out_dir + "/report.json");
  CHECK(rep2.find("growth hypothesis rejected") != std::string::npos);
  CHECK(rep2.find("certificate") != std::string::npos);
}
