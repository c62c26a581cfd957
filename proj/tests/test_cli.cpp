#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(ORLICZ_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kSop = R"('{"family":"sum_of_powers","params":{"p":2,"q":4}}')";
const char* kP2 = R"('{"family":"power","params":{"p":2}}')";
const char* kUnit = R"('{"dim":1,"extents":[1],"counts":[60]}')";

fs::path scratch() {
  const fs::path d = fs::temp_directory_path() / "orlicz_cli_test";
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("version and usage") {
  const Run v = run("--version");
  CHECK(v.code == 0);
  CHECK(v.out.rfind("orlicz ", 0) == 0);
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("solve --alpha 1").code == 2);  // no Young function
}

TEST_CASE("inspect the (2,4) function") {
  const Run r = run(std::string("inspect --young ") + kSop + " --json -");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["p_index"].get<double>() == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(j["exponents"]["0"].get<double>() == doctest::Approx(2.0).epsilon(1e-2));
  CHECK(j["exponents"]["inf"].get<double>() == doctest::Approx(4.0).epsilon(1e-2));
  CHECK(j["delta2"]["zero"]["holds"].get<bool>());

  const Run text = run(std::string("inspect --young ") + kSop);
  CHECK(text.code == 0);
  CHECK(text.out.find("infinity") != std::string::npos);
}

TEST_CASE("config errors exit 2") {
  CHECK(run(R"(inspect --young '{"family":"power","params":{"p":-2}}')").code == 2);
  CHECK(run(R"(inspect --young '{"family":"power","params":{"p":2},"extra":1}')").code == 2);
  CHECK(run("inspect --config /nonexistent.json").code == 2);
  const fs::path cfg = scratch() / "bad.json";
  std::ofstream(cfg) << R"({"young":{"family":"power","params":{"p":2}},"solver":{"tol":-1}})";
  CHECK(run("inspect --config " + cfg.string()).code == 2);
}

TEST_CASE("solve writes JSON and CSV") {
  const fs::path csv = scratch() / "u.csv";
  const Run r = run(std::string("solve --young ") + kP2 + " --mesh " + kUnit + " --alpha 1 --json - --csv " + csv.string());
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["converged"].get<bool>());
  CHECK(j["energy"].get<double>() == doctest::Approx(9.87).epsilon(1e-2));
  for (const char* k : {"alpha", "energy", "lambda", "residual", "iterations", "converged"}) {
    CHECK(j.contains(k));
  }
  CHECK(fs::file_size(csv) > 0);
}

TEST_CASE("nonlocal subcommand") {
  const Run r = run(std::string("nonlocal --young ") + kP2 + " --interval 1 --nodes 32 --s 0.5 --alpha 1 --json -");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["converged"].get<bool>());
  CHECK(j["tail_energy"].get<double>() > 0.0);
  CHECK(run(std::string("nonlocal --young ") + kP2 + " --nodes 32 --s 1.5 --alpha 1").code == 2);
}

TEST_CASE("sweep checks and exit codes") {
  const Run d = run(std::string("sweep --young ") + kP2 + " --mesh " + kUnit +
                    " --alpha-min 0.1 --alpha-max 10 --per-decade 3 --check derivative --json -");
  CHECK(d.code == 0);
  CHECK(json::parse(d.out)["passed"].get<bool>());

  // decay needs inner radius > 1
  CHECK(run(R"(sweep --young '{"family":"exp_minus_poly","params":{"n":2}}' --mesh )" +
            std::string(kUnit) + " --alpha-min 1 --alpha-max 100 --check decay")
            .code == 2);
  // bounds need a Delta_2 function
  CHECK(run(R"(sweep --young '{"family":"exp_minus_poly","params":{"n":2}}' --mesh )" +
            std::string(kUnit) + " --alpha-min 0.1 --alpha-max 10 --check bounds")
            .code == 2);
  CHECK(run(std::string("sweep --young ") + kP2 + " --mesh " + kUnit + " --check speed").code == 2);
  CHECK(run(std::string("sweep --young ") + kP2 + " --mesh " + kUnit + " --per-decade 1").code == 2);
}

TEST_CASE("failed verification exits 1") {
  // a tolerance no run can meet in one iteration
  const Run r = run(std::string("solve --young ") + kSop + " --mesh " + kUnit +
                    " --alpha 50 --max-iter 1 --restarts 1 --tol 1e-15 --json -");
  CHECK(r.code == 1);
  CHECK_FALSE(json::parse(r.out)["converged"].get<bool>());
}

TEST_CASE("sweep output is bit-identical across runs") {
  const fs::path a = scratch() / "a.csv";
  const fs::path b = scratch() / "b.csv";
  const fs::path plot = scratch() / "a.py";
  const std::string base = std::string("sweep --young ") + kSop + " --mesh " + kUnit +
                           " --alpha-min 0.1 --alpha-max 10 --per-decade 3 --seed 5 --restarts 2";
  CHECK(run(base + " --csv " + a.string() + " --plot " + plot.string()).code == 0);
  CHECK(run(base + " --csv " + b.string() + " --no-warm-start --jobs 1").code == 0);
  const fs::path c = scratch() / "c.csv";
  CHECK(run(base + " --csv " + c.string()).code == 0);
  CHECK(slurp(a) == slurp(c));
  CHECK(slurp(plot).find(a.string()) != std::string::npos);
}
