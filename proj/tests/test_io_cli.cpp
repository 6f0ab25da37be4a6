#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "markovdyn/cli.hpp"
#include "markovdyn/io.hpp"
#include "test_support.hpp"

using namespace markovdyn;
using nlohmann::json;
using markovdyn::testing::rotation_kernel;
using markovdyn::testing::rotation_system;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path("/tmp/markovdyn_test_" + name) {
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

struct CliResult {
  int code;
  std::string out;
  std::string err;
  json report;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  CliResult r{code, out.str(), err.str(), json()};
  if (!r.out.empty() && r.out[0] == '{') r.report = json::parse(r.out);
  return r;
}

}  // namespace

TEST_CASE("kernel json round trip") {
  const MarkovKernel k = rotation_kernel();
  const json j = to_json(k);
  const MarkovKernel back = kernel_from_json(j);
  CHECK(markovdyn::testing::max_abs_diff(k, back) == 0.0);
  CHECK(back.space().labels() == k.space().labels());

  SUBCASE("malformed documents name the offending entry") {
    CHECK_THROWS_WITH_AS(kernel_from_json(json{{"states", {"a", "b"}}}),
                         doctest::Contains("rows"), std::invalid_argument);
    json bad = to_json(k);
    bad["rows"][1][0] = "oops";
    CHECK_THROWS_WITH_AS(kernel_from_json(bad), doctest::Contains("(1,0)"),
                         std::invalid_argument);
    json negative = to_json(k);
    negative["rows"][0][0] = -0.5;
    CHECK_THROWS_AS(kernel_from_json(negative), std::invalid_argument);
  }
}

TEST_CASE("kernel csv round trip") {
  const MarkovKernel k = rotation_kernel();
  std::stringstream buf;
  kernel_to_csv(buf, k);
  const MarkovKernel back = kernel_from_csv(buf);
  CHECK(markovdyn::testing::max_abs_diff(k, back) == 0.0);

  SUBCASE("bad csv entries are located") {
    std::stringstream bad("a,b\n0.75,0.25\n0.75,zzz\n");
    CHECK_THROWS_WITH_AS(kernel_from_csv(bad), doctest::Contains("(1,1)"),
                         std::invalid_argument);
  }
  SUBCASE("row count mismatch") {
    std::stringstream bad("a,b\n0.75,0.25\n");
    CHECK_THROWS_AS(kernel_from_csv(bad), std::invalid_argument);
  }
}

TEST_CASE("system json round trip preserves the reduction exactly") {
  const ProductDynamicalSystem sys = rotation_system();
  const json j = to_json(sys);
  const ProductDynamicalSystem back = system_from_json(j);
  CHECK(markovdyn::testing::max_abs_diff(reduce(back), reduce(sys)) == 0.0);
  CHECK(back.x_table() == sys.x_table());
  CHECK(back.y_table() == sys.y_table());

  SUBCASE("functions survive a dilate round trip") {
    const ProductDynamicalSystem dil = dilate(rotation_kernel());
    const ProductDynamicalSystem dil_back = system_from_json(to_json(dil));
    REQUIRE(dil_back.env().functions().has_value());
    CHECK(*dil_back.env().functions() == *dil.env().functions());
  }
  SUBCASE("ids are optional on input") {
    json no_ids = j;
    no_ids["env"].erase("ids");
    const ProductDynamicalSystem anon = system_from_json(no_ids);
    CHECK(anon.env().ids()[0] == "e0");
  }
}

TEST_CASE("cli reduce on the bundled rotation file") {
  const CliResult r = run_cli({"reduce", "--system", "data/rotation_system.json",
                               "--no-timestamp"});
  REQUIRE(r.code == cli::kExitPass);
  CHECK(r.report["outputs"]["kernel"]["rows"][0][0] == 0.75);
  CHECK(r.report["outputs"]["kernel"]["rows"][0][1] == 0.25);
  CHECK(r.report["outputs"]["kernel"]["rows"][1][0] == 0.75);
}

TEST_CASE("cli emitted reports are re-readable as inputs") {
  const CliResult dilated = run_cli({"dilate", "--kernel", "data/kernel_markov.json",
                                     "--no-timestamp"});
  REQUIRE(dilated.code == cli::kExitPass);
  TempFile sysfile("roundtrip_system.json", dilated.out);

  const CliResult reduced = run_cli({"reduce", "--system", sysfile.path, "--no-timestamp"});
  REQUIRE(reduced.code == cli::kExitPass);
  CHECK(reduced.report["outputs"]["kernel"]["rows"][0][0] == 0.75);

  TempFile kernelfile("roundtrip_kernel.json", reduced.out);
  const CliResult classified = run_cli({"classify", "--kernel", kernelfile.path,
                                        "--no-timestamp"});
  REQUIRE(classified.code == cli::kExitPass);
  CHECK(classified.report["outputs"]["label"] == "random");
}

TEST_CASE("cli reports are byte-identical for equal configs") {
  const std::vector<std::string> args{"iterate", "--kernel", "data/kernel_markov.json", "--x",
                                      "0",       "--n",      "3",                       "--mode",
                                      "mc",      "--samples", "2000",                   "--seed",
                                      "9",       "--no-timestamp"};
  const CliResult a = run_cli(args);
  const CliResult b = run_cli(args);
  CHECK(a.code == cli::kExitPass);
  CHECK(a.out == b.out);
}

TEST_CASE("cli exit codes") {
  SUBCASE("usage error for unknown subcommand") {
    const CliResult r = run_cli({"frobnicate"});
    CHECK(r.code == cli::kExitUsage);
  }
  SUBCASE("missing file") {
    const CliResult r = run_cli({"classify", "--kernel", "/nonexistent.json"});
    CHECK(r.code == cli::kExitUsage);
    CHECK(r.err.find("cannot open") != std::string::npos);
  }
  SUBCASE("malformed kernel names the offending row") {
    TempFile bad("bad_kernel.json",
                 R"({"states": ["a","b"], "rows": [[0.9, 0.2], [0.5, 0.5]]})");
    const CliResult r = run_cli({"classify", "--kernel", bad.path});
    CHECK(r.code == cli::kExitUsage);
    CHECK(r.err.find("row 0") != std::string::npos);
  }
  SUBCASE("iterate requires exactly one input") {
    const CliResult r = run_cli({"iterate", "--m", "2"});
    CHECK(r.code == cli::kExitUsage);
  }
  SUBCASE("checks report pass") {
    const CliResult r = run_cli({"sde-check", "--check", "cocycle", "--model", "gbm-1d",
                                 "--params", R"({"a":0.1,"b":0.2})", "--x", "1.0", "--t", "0.1",
                                 "--dt", "0.001", "--seed", "5", "--no-timestamp"});
    CHECK(r.code == cli::kExitPass);
    CHECK(r.report["status"] == "pass");
    CHECK(r.report["outputs"]["bitwise_equal"] == true);
  }
}

TEST_CASE("cli csv outputs") {
  SUBCASE("kernel as csv") {
    const CliResult r = run_cli({"reduce", "--system", "data/rotation_system.json", "--format",
                                 "csv", "--no-timestamp"});
    REQUIRE(r.code == cli::kExitPass);
    std::stringstream buf(r.out);
    const MarkovKernel k = kernel_from_csv(buf);
    CHECK(markovdyn::testing::max_abs_diff(k, rotation_kernel()) == 0.0);
  }
  SUBCASE("trajectory as csv") {
    const CliResult r = run_cli({"sde-flow", "--model", "ou", "--params",
                                 R"({"lambda":[1.0],"sigma":[[1.0]]})", "--x", "1.0", "--t",
                                 "0.01", "--dt", "0.001", "--format", "csv", "--no-timestamp"});
    REQUIRE(r.code == cli::kExitPass);
    CHECK(r.out.rfind("time,x0", 0) == 0);
    // Header plus 11 grid rows.
    int lines = 0;
    for (const char c : r.out) lines += c == '\n' ? 1 : 0;
    CHECK(lines == 12);
  }
}

TEST_CASE("cli iterate in chain mode reports the distribution and reference row") {
  const CliResult r = run_cli({"iterate", "--kernel", "data/kernel_markov.json", "--x", "0",
                               "--n", "2", "--mode", "exact", "--no-timestamp"});
  REQUIRE(r.code == cli::kExitPass);
  CHECK(r.report["status"] == "pass");
  CHECK(r.report["outputs"]["distribution"]["weights"][0] == doctest::Approx(0.75));
  CHECK(r.report["outputs"]["distribution"]["weights"][1] == doctest::Approx(0.25));
  CHECK(r.report["outputs"]["reference_power_row"][0] == doctest::Approx(0.75));
}

TEST_CASE("cli classify labels the bundled permutation kernel") {
  const CliResult r = run_cli({"classify", "--kernel", "data/kernel_swap.json", "--no-timestamp"});
  REQUIRE(r.code == cli::kExitPass);
  CHECK(r.report["outputs"]["label"] == "deterministic-invertible");
}

TEST_CASE("cli reads csv kernels by extension") {
  TempFile csv("kernel.csv", "a,b\n0,1\n1,0\n");
  const CliResult r = run_cli({"classify", "--kernel", csv.path, "--no-timestamp"});
  REQUIRE(r.code == cli::kExitPass);
  CHECK(r.report["outputs"]["label"] == "deterministic-invertible");
}

TEST_CASE("cli maps inconclusive statistical checks to exit 3") {
  const CliResult r = run_cli({"sde-check", "--check", "generator", "--model", "ou", "--params",
                               R"({"lambda":[1e-6],"sigma":[[1e-3]]})", "--obs", "x", "--x", "1.0",
                               "--dt", "0.01", "--samples", "8", "--horizons", "0.1", "0.05",
                               "--seed", "4", "--no-timestamp"});
  CHECK(r.code == cli::kExitInconclusive);
  CHECK(r.report["status"] == "inconclusive");
  CHECK(r.report["outputs"]["note"].get<std::string>().find("raise samples") !=
        std::string::npos);
}

TEST_CASE("cli defect and invertible reports carry the reference values") {
  const CliResult defect = run_cli({"defect", "--kernel", "data/kernel_markov.json",
                                    "--no-timestamp"});
  REQUIRE(defect.code == cli::kExitPass);
  CHECK(defect.report["outputs"]["defect"] == 0.75);
  CHECK(defect.report["outputs"]["witness_f"][0] == 1.0);
  CHECK(defect.report["outputs"]["witness_f"][1] == -1.0);

  const CliResult inv = run_cli({"invertible", "--kernel", "data/kernel_lazy.json",
                                 "--no-timestamp"});
  REQUIRE(inv.code == cli::kExitPass);
  CHECK(inv.report["outputs"]["invertible"] == false);
  CHECK(inv.report["outputs"]["matrix_inverse"][0][0] == 1.125);
  CHECK(inv.report["outputs"]["matrix_inverse"][0][1] == -0.125);
}
