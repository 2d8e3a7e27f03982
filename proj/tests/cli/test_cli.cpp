#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifndef ORBITLIFT_CLI
#error "ORBITLIFT_CLI must point at the orbitlift executable"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kData = ORBITLIFT_TEST_DATA;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("orbitlift_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + ORBITLIFT_CLI + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

void put(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::vector<std::vector<std::string>> rows_of(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream cs(line);
    std::string cell;
    while (std::getline(cs, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string join(const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
    out += "\n";
  }
  return out;
}

const char* kS3Path = R"({"path": [[[0, 0.1], [1, 1]], [[0, 0.1], [1, -0.5]], [[1, 0.3], [2, 0.4]]], "start": -1, "end": 1})";

}  // namespace

TEST(Cli, RoundTripS2) {
  const fs::path d = scratch("s2");
  const std::string curve = (kData / "s2_cross.json").string();
  ASSERT_EQ(run("lift --catalog Sn --n 2 --curve-json " + curve + " --grid -1:1:41 --out " + d.string()), 0);
  for (const char* f : {"lift.csv", "glue_log.json", "diagnostics.json"}) EXPECT_TRUE(fs::exists(d / f)) << f;
  ASSERT_EQ(run("verify --catalog Sn --n 2 --curve-json " + curve + " --lift-csv " + (d / "lift.csv").string() +
                " --out " + d.string()),
            0);
  EXPECT_TRUE(load(d / "verify.json")["passed"].get<bool>());
}

TEST(Cli, RoundTripFaceAxisW) {
  const fs::path d = scratch("w");
  const std::string curve = (kData / "w_face_axis.json").string();
  ASSERT_EQ(run("lift --catalog W --curve-json " + curve + " --grid -1:1:101 --out " + d.string()), 0);
  ASSERT_EQ(run("verify --catalog W --curve-json " + curve + " --lift-csv " + (d / "lift.csv").string() +
                " --out " + d.string()),
            0);
  const json v = load(d / "verify.json");
  EXPECT_LE(v["residual"]["max"].get<double>(), 1e-8);
}

TEST(Cli, PerturbedLiftIsLocalized) {
  const fs::path d = scratch("fault");
  put(d / "curve.json", kS3Path);
  ASSERT_EQ(run("lift --catalog Sn --n 3 --curve-json " + (d / "curve.json").string() +
                " --grid -1:1:101 --out " + d.string()),
            0);
  auto rows = rows_of(slurp(d / "lift.csv"));
  ASSERT_GT(rows.size(), 70u);
  const std::size_t row = 64;  // header + 63 -> t = 0.26
  const double t = std::stod(rows[row][0]);
  std::ostringstream v;
  v.precision(17);
  v << std::stod(rows[row][1]) + 1e-3;
  rows[row][1] = v.str();
  put(d / "bad.csv", join(rows));
  EXPECT_EQ(run("verify --catalog Sn --n 3 --curve-json " + (d / "curve.json").string() + " --lift-csv " +
                (d / "bad.csv").string() + " --out " + d.string()),
            2);
  const json r = load(d / "verify.json");
  EXPECT_FALSE(r["passed"].get<bool>());
  EXPECT_NEAR(r["residual"]["t"].get<double>(), t, 1e-12);
}

TEST(Cli, InvariantDegrees) {
  const fs::path d = scratch("inv");
  ASSERT_EQ(run("invariants --catalog H3 --out " + d.string()), 0);
  EXPECT_EQ(load(d / "invariants.json")["degrees"].get<std::vector<int>>(), (std::vector<int>{2, 6, 10}));
  ASSERT_EQ(run("invariants --catalog C2n --n 4 --out " + d.string()), 0);
  const auto deg = load(d / "invariants.json")["degrees"].get<std::vector<int>>();
  EXPECT_EQ(deg.back(), 4);
  ASSERT_EQ(run("invariants --catalog trivial --dim 2 --out " + d.string()), 0);
  EXPECT_EQ(load(d / "invariants.json")["degrees"].get<std::vector<int>>(), (std::vector<int>{1, 1}));
}

TEST(Cli, BadInputIsComputationError) {
  const fs::path d = scratch("bad");
  EXPECT_EQ(run("invariants --catalog NoSuch --out " + d.string()), 1);
  EXPECT_EQ(run("lift --catalog Sn --n 2 --curve-json " + (d / "missing.json").string() + " --out " + d.string()), 1);
  // x1 + x2 = 0 and x1^2 + x2^2 = -1 has no real solution
  put(d / "complex.json", R"({"components": [[], [[0, -1]]], "start": 0, "end": 1})");
  EXPECT_EQ(run("lift --catalog Sn --n 2 --curve-json " + (d / "complex.json").string() + " --grid 0:1:11 --out " +
                d.string()),
            1);
}

TEST(Cli, PolarLift) {
  const fs::path d = scratch("polar");
  ASSERT_EQ(run("polar-lift --polar-json " + (kData / "so2_section.json").string() + " --curve-json " +
                (kData / "square.json").string() + " --grid -1:1:51 --out " + d.string()),
            0);
  EXPECT_TRUE(load(d / "orthogonality.json")["orthogonal"].get<bool>());
  const auto rows = rows_of(slurp(d / "lift.csv"));
  ASSERT_EQ(rows.size(), 52u);
  const double sign = std::stod(rows.back()[1]) > 0 ? 1.0 : -1.0;
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_NEAR(std::stod(rows[i][1]), sign * std::stod(rows[i][0]), 1e-8);
}

TEST(Cli, Counterexamples) {
  const fs::path d = scratch("cex");
  ASSERT_EQ(run("counterexamples --out " + d.string()), 0);
  EXPECT_TRUE(load(d / "counterexamples.json")["passed"].get<bool>());
}

TEST(Cli, Reduce) {
  const fs::path d = scratch("reduce");
  ASSERT_EQ(run("reduce --catalog Sn --n 3 --out " + d.string()), 0);
  EXPECT_TRUE(fs::exists(d / "reduction_plan.json"));
}

TEST(Cli, DeterministicArtifacts) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const std::string curve = (kData / "w_face_axis.json").string();
  for (const fs::path& d : {a, b}) {
    ASSERT_EQ(run("--seed 7 lift --catalog W --curve-json " + curve + " --grid -1:1:81 --refine 2 --out " + d.string()), 0);
    ASSERT_EQ(run("--seed 7 invariants --catalog T --out " + d.string()), 0);
  }
  for (const auto& e : fs::directory_iterator(a)) {
    const auto name = e.path().filename();
    ASSERT_TRUE(fs::exists(b / name)) << name;
    EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
  }
}

TEST(Cli, SampledCurve) {
  const fs::path d = scratch("samples");
  std::ostringstream s;
  s.precision(17);
  s << R"({"samples": [)";
  for (int i = 0; i <= 40; ++i) {
    const double t = -1.0 + i / 20.0;
    s << (i ? ", " : "") << "[" << t << ", " << 2 * t * t + 0.5 << ", " << t << "]";
  }
  s << "]}";
  put(d / "curve.json", s.str());
  EXPECT_EQ(run("lift --catalog trivial --dim 2 --curve-json " + (d / "curve.json").string() +
                " --grid -1:1:21 --out " + d.string()),
            0);
  EXPECT_TRUE(fs::exists(d / "lift.csv"));
}
