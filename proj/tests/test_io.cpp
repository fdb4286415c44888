#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "helpers.hpp"
#include "otlp/error.hpp"
#include "otlp/io.hpp"
#include "otlp/run.hpp"

using namespace otlp;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("otlp_io_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const char* name) const { return (path / name).string(); }
  static inline int counter = 0;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ErrorKind parse_kind(const char* text) {
  try {
    parse_instance(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::kInvalidArgument;
}

int cli(const std::string& args) {
  const int status = std::system((std::string(OTLP_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("parse_instance") {
  const Instance inst = parse_instance(R"({"k":1,"l":1,"p":[1],"q":[1],"C":[[0]]})");
  CHECK(inst.k() == 1);
  CHECK(parse_kind(R"({"k":2,"l":2,"p":[0.5,0.5],"q":[0.5,0.5],"C":[[0,1],[1]]})") ==
        ErrorKind::kParseError);
  CHECK(parse_kind(R"({"k":1,"l":1,"p":[1],"q":[1]})") == ErrorKind::kParseError);
  CHECK(parse_kind(R"({"k":1,"l":1,"p":[1],"q":[1],"C":[[0]])") == ErrorKind::kParseError);
  CHECK(parse_kind(R"({"k":1,"l":1,"p":["a"],"q":[1],"C":[[0]]})") == ErrorKind::kParseError);
  CHECK(parse_kind(R"({"k":1,"l":1,"p":[-1],"q":[1],"C":[[0]]})") == ErrorKind::kNegativeEntry);
  const Instance renorm =
      parse_instance(R"({"k":1,"l":2,"p":[0.5,0.4999999],"q":[1],"C":[[0,1]]})");
  CHECK(renorm.renormalized());
}

TEST_CASE("parse errors name the field") {
  try {
    parse_instance(R"({"k":2,"l":2,"p":[0.5,0.5],"q":[0.5,0.5],"C":[[0,1],[1]]})", "inst.json");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(std::strstr(e.what(), "inst.json") != nullptr);
    CHECK(std::strstr(e.what(), "C[1]") != nullptr);
  }
}

TEST_CASE("instances round-trip bit for bit") {
  TempDir dir;
  for (CostModel m : {CostModel::kUniform01, CostModel::kEuclideanGrid, CostModel::kSparseZero}) {
    const Instance inst = generate_instance(7, 11, m, 99);
    save_instance(inst, dir.file("inst.json"));
    const Instance back = load_instance(dir.file("inst.json"));
    CHECK(std::memcmp(back.p().data(), inst.p().data(), 11 * sizeof(double)) == 0);
    CHECK(std::memcmp(back.q().data(), inst.q().data(), 7 * sizeof(double)) == 0);
    CHECK(back.cost() == inst.cost());
  }
  CHECK_THROWS_AS(load_instance(dir.file("missing.json")), Error);
}

TEST_CASE("generate_instance") {
  const Instance one = generate_instance(1, 1, CostModel::kUniform01, 1234);
  CHECK(one.p()[0] == 1.0);
  CHECK(one.q()[0] == 1.0);

  const Instance a = generate_instance(6, 4, CostModel::kSparseZero, 8);
  const Instance b = generate_instance(6, 4, CostModel::kSparseZero, 8);
  CHECK(instance_json(a) == instance_json(b));
  CHECK(instance_json(a) != instance_json(generate_instance(6, 4, CostModel::kSparseZero, 9)));
  std::size_t zeros = 0;
  for (double v : a.cost().data()) zeros += v == 0.0;
  CHECK(zeros == 5);  // round(0.2 * 24)

  const Instance grid = generate_instance(8, 8, CostModel::kEuclideanGrid, 7);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(grid.cost()(i, i) == 0.0);
    for (std::size_t j = 0; j < 8; ++j) CHECK(grid.cost()(i, j) == grid.cost()(j, i));
  }
  // Points 0 and 3 sit at (0,0) and (0,1) on the 3-wide grid.
  CHECK(grid.cost()(0, 3) == 1.0);
  CHECK(grid.cost()(0, 4) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(parse_cost_model("gaussian"), Error);
}

TEST_CASE("plan JSON") {
  const Instance inst = test::make({0.5, 0.5}, {0.5, 0.5}, {{0, 1}, {1, 0}});
  const std::string json = plan_json(TransportPlan(test::mat({{1, 0}, {0, 1}}), PlanKind::kExact), inst);
  CHECK(json == "{\n  \"kind\": \"exact\",\n  \"cost\": 0,\n  \"X\": [\n    [1,0],\n    [0,1]\n  ]\n}\n");
}

TEST_CASE("report CSV appends under one header") {
  TempDir dir;
  SolveReport r;
  r.pipeline = "mpc";
  r.k = 2;
  r.l = 3;
  r.delta = 0.5;
  r.cost = 0.25;
  append_report(dir.file("r.csv"), r);
  r.oracle = 0.2;
  r.gap = 0.05;
  append_report(dir.file("r.csv"), r);
  const std::string text = slurp(dir.file("r.csv"));
  CHECK(text.rfind(std::string(kReportHeader) + "\n", 0) == 0);
  CHECK(text.find(kReportHeader, 1) == std::string::npos);
  CHECK(text.find("mpc,2,3,0.5,0,0,0,0.25,,,0,0,") != std::string::npos);
  CHECK(text.find("mpc,2,3,0.5,0,0,0,0.25,0.20000000000000001,0.050000000000000003,") !=
        std::string::npos);
}

TEST_CASE("run drives every pipeline") {
  RunConfig cfg;
  cfg.generate = GeneratorSpec{6, 5, CostModel::kUniform01};
  cfg.seed = 4;
  cfg.delta = 0.1;
  for (Pipeline p : {Pipeline::kOblivious, Pipeline::kExact, Pipeline::kMpc, Pipeline::kPacking}) {
    cfg.pipeline = p;
    const RunResult r = run(cfg);
    CHECK(r.pass);
    REQUIRE(r.report.oracle);
    CHECK(*r.report.gap == r.report.cost - *r.report.oracle);
    CHECK(r.report.resid_row >= 0.0);
    if (p == Pipeline::kOblivious) {
      const Instance inst = generate_instance(6, 5, CostModel::kUniform01, 4);
      CHECK(r.report.cost == doctest::Approx(avg_cost(inst)).epsilon(1e-14));
    }
  }
  cfg.oracle = false;
  cfg.pipeline = Pipeline::kMpc;
  CHECK_FALSE(run(cfg).report.oracle);
  CHECK(parse_generator("3,4,sparse_zero").model == CostModel::kSparseZero);
  CHECK_THROWS_AS(parse_generator("3,x,uniform01"), Error);
  CHECK_THROWS_AS(parse_generator("0,4,uniform01"), Error);
}

TEST_CASE("CLI exit codes and output") {
  TempDir dir;
  CHECK(cli("--pipeline mpc --delta 0.1 --generate 5,5,uniform01 --seed 2 --output " +
            dir.file("a.json")) == 0);
  CHECK(cli("--pipeline mpc --delta 0.1 --generate 5,5,uniform01 --seed 2 --output " +
            dir.file("b.json")) == 0);
  CHECK(slurp(dir.file("a.json")) == slurp(dir.file("b.json")));
  CHECK(slurp(dir.file("a.json")).rfind("{\n  \"kind\": \"exact\"", 0) == 0);

  CHECK(cli("--input " + dir.file("missing.json")) == 3);
  std::ofstream(dir.file("bad.json")) << R"({"k":1,"l":1,"p":[0.5],"q":[1],"C":[[0]]})";
  CHECK(cli("--input " + dir.file("bad.json")) == 3);
  CHECK(cli("--pipeline nonsense --generate 2,2,uniform01") == 3);
  CHECK(cli("--generate 2,2,uniform01 --delta -1") == 3);
  CHECK(cli("") == 3);

  CHECK(cli("--pipeline packing --delta 0.2 --generate 4,6,sparse_zero --batch 3 --report " +
            dir.file("r.csv") + " --output " + dir.file("plan.json")) == 0);
  std::size_t rows = 0;
  std::istringstream lines(slurp(dir.file("r.csv")));
  for (std::string line; std::getline(lines, line);) ++rows;
  CHECK(rows == 4);
  CHECK(fs::exists(dir.file("plan-0.json")));
  CHECK(fs::exists(dir.file("plan-2.json")));
}
