#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <string>

#include "halfflat/io.hpp"

using halfflat::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string &args) {
  const std::string cmd = std::string(HALFFLAT_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE *p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string &name) { return std::string(HALFFLAT_DATA) + "/" + name; }

json run_json(const std::string &args, int expected_code) {
  const Run r = run("--json " + args);
  CHECK(r.code == expected_code);
  return json::parse(r.out);
}

}  // namespace

TEST_CASE("algebra commands and exit codes") {
  CHECK(run("algebra check \"(0,0,0,12,13,23)\"").code == 0);
  CHECK(run("algebra check \"(0,0,0,12,34)\"").code == 1);
  CHECK(run("algebra check \"(0,0,1x)\"").code == 2);
  CHECK(run("algebra frobnicate \"(0,0)\"").code == 2);
  CHECK(run("").code == 2);
  CHECK(run("no-such-command").code == 2);
  const json j = run_json("algebra catalog --file " + data("algebras.json"), 0);
  CHECK(j["data"]["catalog"].size() == 6);
  const json c = run_json("algebra center \"(0,0,0,12,13,23)\"", 0);
  CHECK(c["data"]["center"].size() == 3);
}

TEST_CASE("report layout") {
  const json j = run_json("structure --algebra \"(0,0,0,12,13,23)\" --structure " + data("explicit-u1.json") +
                              " --expect shf",
                          0);
  for (const char *key : {"command", "inputs_digest", "status", "checks", "data", "artifacts"})
    CHECK(j.contains(key));
  CHECK(j["status"] == "pass");
  CHECK(j["data"]["arithmetic"] == "rational");
  CHECK(j["data"]["symplectic_half_flat"] == true);
  CHECK(j["data"]["integrable"] == false);
  CHECK(run("structure --algebra \"(0,0,0,12,13,23)\" --structure " + data("explicit-u1.json") + " --expect integrable")
            .code == 1);
  CHECK(run("structure --algebra \"(0,0,0,12,13,23)\" --structure " + data("missing.json")).code == 2);
}

TEST_CASE("torsion of the u = 1 structure has only W2-") {
  const json j = run_json("torsion --algebra \"(0,0,0,12,13,23)\" --structure " + data("explicit-u1.json"), 0);
  CHECK(j["data"]["nonzero_components"] == json::array({"W2-"}));
  CHECK(j["data"]["torsion"]["W2-"].get<double>() > 1e-3);
}

TEST_CASE("reduce, lift and check-gcy") {
  const json r = run_json("reduce --algebra \"(0,0,0,12,13,23)\" --structure " + data("explicit-u1.json") +
                              " --vector 0,0,0,0,0,1",
                          0);
  CHECK(r["data"]["quotient"] == "(0,0,0,12,13)");
  CHECK(run("reduce --algebra \"(0,0,0,12,13,23)\" --structure " + data("explicit-u1.json") + " --vector 1,0,0,0,0,0")
            .code == 2);
  const std::string base = "--algebra \"(0,0,0,12,13)\" --structure " + data("hypo-n5-12-13-a.json");
  const json l = run_json("lift " + base + " --phi " + data("hypo-n5-12-13-a-phi.json") + " --t 1", 0);
  CHECK(l["data"]["algebra"] == "(0,0,0,12,13,-2*23)");
  CHECK(run("check-gcy " + base + " --phi=-2*e23 --t 1").code == 0);
  CHECK(run("check-gcy " + base + " --phi 0 --t 1").code == 1);
  CHECK(run("check-gcy " + base + " --phi 0 --t -1").code == 2);
}

TEST_CASE("thm53 default example") {
  const json j = run_json("thm53", 0);
  REQUIRE(j["data"]["samples"].size() == 3);
  for (const auto &s : j["data"]["samples"]) CHECK(s["phi"]["coeffs"] == json({{"14", "1"}, {"23", "1"}}));
  CHECK(run("thm53 --x 1").code == 2);
}

TEST_CASE("flow, curvature and holonomy") {
  CHECK(run("flow explicit --u 1.1").code == 0);
  CHECK(run("flow explicit --u 0").code == 2);
  const json c = run_json("curvature --u 1.0", 0);
  CHECK(c["data"]["ricci_norm"].get<double>() < 1e-8);
  CHECK(c["data"]["matches_printed_expression"] == false);
  CHECK(c["data"]["amended_max_difference"].get<double>() < 1e-8);
  const json h = run_json("holonomy --samples 1.0,1.2", 0);
  CHECK(h["data"]["dim"] == 14);
}

TEST_CASE("floats are written with 17 significant digits") {
  const Run r = run("--json flow explicit --u 1.1");
  CHECK(r.out.find("0.90909090909090906") != std::string::npos);
  CHECK(r.out.find("\"u\": 1.1000000000000001") != std::string::npos);
}

TEST_CASE("search reports are deterministic") {
  const std::string args = "--json --seed 11 search --algebra \"(0,0,0,0,12)\" --restarts 3";
  const Run a = run(args);
  const Run b = run(args);
  CHECK(a.out == b.out);
  const json j = json::parse(a.out);
  CHECK(j["data"]["kind"] == "hypo_with_eq4");
  CHECK(j["data"]["log"].size() == 3);
  CHECK(run("search --algebra \"(0,0,0,0,0)\" --kind shf").code == 2);
  CHECK(run("search --algebra \"(0,0,0,0,0,12)\" --restarts 2 --expect found").code == 1);
}
