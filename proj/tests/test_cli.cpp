#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "coimpact/cli.hpp"

namespace fs = std::filesystem;
using coimpact::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("coimpact_cli_" + std::to_string(std::rand()) + "_" +
                                        std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& content = {}) const {
    const auto p = (path / name).string();
    if (!content.empty()) std::ofstream(p, std::ios::binary) << content;
    return p;
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);)
    if (!l.empty()) out.push_back(l);
  return out;
}

struct ThreadsGuard {
  explicit ThreadsGuard(const char* n) { setenv("COIMPACT_THREADS", n, 1); }
  ~ThreadsGuard() { unsetenv("COIMPACT_THREADS"); }
};

const char* kHeader = "date,symbol,broker_id,sign,shares,start_time,end_time,day_volume,exec_volume,open,high,low,close\n";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("version and help") {
    CHECK(invoke({"--version"}).code == 0);
    CHECK(invoke({"--version"}).out.find("0.1.0") != std::string::npos);
    const auto h = invoke({"--help"});
    CHECK(h.code == 0);
    CHECK(h.out.find("calibrate") != std::string::npos);
  }

  TEST_CASE("unknown flag prints usage and exits 1") {
    const auto r = invoke({"curve", "--model", "iid-gaussian", "--bogus", "1"});
    CHECK(r.code == 1);
    CHECK(r.err.find("--phi-min") != std::string::npos);
  }

  TEST_CASE("curve: iid gaussian grid") {
    const auto r = invoke({"curve", "--model", "iid-gaussian", "--n", "2", "--sigma", "0.008", "--phi-min", "1e-5",
                           "--phi-max", "0.1", "--points", "50"});
    REQUIRE(r.code == 0);
    const auto rows = lines(r.out);
    REQUIRE(rows.size() == 51);
    CHECK(rows[0] == "phi,impact");
    double last_phi = 0, last = -1;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto comma = rows[i].find(',');
      const double phi = std::stod(rows[i].substr(0, comma));
      const double imp = std::stod(rows[i].substr(comma + 1));
      CHECK(phi > last_phi);
      CHECK(imp > last);
      last_phi = phi;
      last = imp;
    }
    CHECK(std::stod(rows[1].substr(0, rows[1].find(','))) == doctest::Approx(1e-5).epsilon(1e-12));
  }

  TEST_CASE("curve: invalid model parameters exit 1") {
    CHECK(invoke({"curve", "--model", "correlated-gaussian", "--n", "3", "--cphi", "1.5"}).code == 1);
    CHECK(invoke({"curve", "--model", "nope"}).code == 1);
    CHECK(invoke({"curve", "--model", "iid-gaussian", "--sigma", "-1"}).code == 1);
  }

  TEST_CASE("specfun-check passes") {
    const auto r = invoke({"specfun-check"});
    CHECK(r.code == 0);
    const auto rows = lines(r.out);
    REQUIRE(rows.size() > 1);
    CHECK(rows[0] == "function,input,value,reference,relative_error,pass");
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].substr(rows[i].rfind(',') + 1) == "true");
  }

  TEST_CASE("ingest: filters and report") {
    TempDir dir;
    std::string csv = kHeader;
    csv += "2010-01-04,AAA,B1,1,1000,10:00:00,10:30:00,100000,20000,10,10.5,9.5,10.2\n";
    csv += "2010-01-04,AAA,B2,-1,500,10:00:00,10:01:00,100000,20000,10,10.5,9.5,10.2\n";  // 60 s
    csv += "2010-01-04,AAA,B3,-1,2000,11:00:00,12:00:00,100000,30000,10,10.5,9.5,10.2\n";
    csv += "2010-01-04,AAA,B4,1,500,15:00:00,16:05:00,100000,20000,10,10.5,9.5,10.2\n";  // late
    const auto in = dir.file("meta.csv", csv);
    const auto out = dir.file("panels.csv");
    const auto report = dir.file("report.json");
    const auto r = invoke({"ingest", "--input", in, "--out", out, "--report", report});
    REQUIRE(r.code == 0);
    const auto rep = nlohmann::json::parse(slurp(report));
    CHECK(rep["input"] == 4);
    CHECK(rep["kept"] == 2);
    CHECK(rep["filter_2"] == 1);
    CHECK(rep["filter_3"] == 1);
    CHECK(rep["panels"] == 1);
    const auto rows = lines(slurp(out));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == "symbol,date,n,net_flow,rescaled_return,phis");
    CHECK(rows[1].rfind("AAA,2010-01-04,2,", 0) == 0);

    const auto manifest = nlohmann::json::parse(slurp(out + ".manifest.json"));
    CHECK(manifest["command"] == "ingest");
    CHECK(manifest["version"] == "0.1.0");
    CHECK(manifest["inputs"].size() == 1);
    CHECK(manifest["inputs"][in] == coimpact::sha256_file(in));
  }

  TEST_CASE("ingest: empty file and bad header") {
    TempDir dir;
    const auto empty = dir.file("empty.csv", " ");
    std::ofstream(empty, std::ios::trunc).close();
    const auto r = invoke({"ingest", "--input", empty});
    CHECK(r.code == 0);
    CHECK(r.err.find("warning") != std::string::npos);
    CHECK(lines(r.out).size() == 1);

    const auto bad = dir.file("bad.csv", "date,symbol,side\n2010-01-04,AAA,1\n");
    const auto b = invoke({"ingest", "--input", bad});
    CHECK(b.code == 1);
    CHECK(b.err.find("broker_id") != std::string::npos);

    CHECK(invoke({"ingest", "--input", (dir.path / "missing.csv").string()}).code == 1);
  }

  TEST_CASE("sha256 of a known string") {
    TempDir dir;
    CHECK(coimpact::sha256_file(dir.file("abc.txt", "abc")) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }

  TEST_CASE("simulate: config validation") {
    TempDir dir;
    const auto unknown = dir.file("u.json", R"({"p_n": {"2": 1.0}, "gamma_eps": 0.3, "sigma": 0.008, "gamma": 1})");
    const auto r = invoke({"simulate", "--config", unknown, "--days", "10"});
    CHECK(r.code == 1);
    CHECK(r.err.find("gamma") != std::string::npos);
    const auto badp = dir.file("p.json", R"({"p_n": {"2": 0.5}, "gamma_eps": 0.3, "sigma": 0.008})");
    CHECK(invoke({"simulate", "--config", badp, "--days", "10"}).code == 1);
    const auto badg = dir.file("g.json", R"({"p_n": {"2": 1.0}, "gamma_eps": 1.3, "sigma": 0.008})");
    CHECK(invoke({"simulate", "--config", badg, "--days", "10"}).code == 1);
    const auto notjson = dir.file("n.json", "{p_n");
    CHECK(invoke({"simulate", "--config", notjson, "--days", "10"}).code == 1);
  }

  TEST_CASE("simulate then analyze recovers the sign coupling") {
    TempDir dir;
    const auto config = dir.file(
        "c.json",
        R"({"p_n": {"1": 0.2, "2": 0.4, "5": 0.4}, "gamma_eps": 0.5, "volume_scheme": "half-normal",
            "sigma": 0.008, "y_ratio": 1.0, "noise_sd": 0.5, "seed": 3, "days": 20000})");
    const auto panels = dir.file("panels.csv");
    REQUIRE(invoke({"simulate", "--config", config, "--out", panels}).code == 0);
    const auto m = nlohmann::json::parse(slurp(panels + ".manifest.json"));
    CHECK(m["seed"] == 3);

    const auto r = invoke({"analyze", "--input", panels});
    REQUIRE(r.code == 0);
    const auto rep = nlohmann::json::parse(r.out);
    for (const char* n : {"2", "5"}) {
      const auto& e = rep["sign_correlation_by_n"][n];
      const double c = e["c_eps"].get<double>();
      const double se = e["std_error"].get<double>();
      CHECK(std::fabs(c - 0.25) < 3 * se);
    }
    CHECK(rep["impact_curve"]["global"].contains("bins"));

    // Same config and seed: byte-identical panels.
    const auto again = dir.file("again.csv");
    REQUIRE(invoke({"simulate", "--config", config, "--out", again}).code == 0);
    CHECK(slurp(again) == slurp(panels));
  }

  TEST_CASE("calibrate: degenerate returns exit 2") {
    TempDir dir;
    std::string csv = "symbol,date,n,net_flow,rescaled_return,phis\n";
    for (int d = 1; d <= 9; ++d)
      csv += "AAA,2010-01-0" + std::to_string(d) + ",2,0.03,0.5,0.01;0.02\n";
    const auto in = dir.file("p.csv", csv);
    const auto r = invoke({"calibrate", "--input", in, "--samples", "1000"});
    CHECK(r.code == 2);
  }

  TEST_CASE("impact-mc output does not depend on the thread count") {
    const std::vector<std::string> args = {"impact-mc", "--n",      "5",   "--gamma", "0.3", "--sigma", "0.008",
                                           "--samples", "20000",    "--seed", "42", "--points", "6"};
    std::string one, four;
    {
      ThreadsGuard g("1");
      one = invoke(args).out;
    }
    {
      ThreadsGuard g("4");
      four = invoke(args).out;
    }
    CHECK(lines(one).size() == 7);
    CHECK(one == four);
  }
}
