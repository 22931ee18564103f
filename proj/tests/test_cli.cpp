#include "doctest.h"

#include "cli.hpp"

#include "spslab/error.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using spslab::cli::parse_list;
using spslab::cli::run;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("spslab_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Captured {
  int code;
  std::string out, err;
};

Captured call(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("list syntax") {
  CHECK(parse_list("4,8,...,256") == std::vector<double>{4, 8, 16, 32, 64, 128, 256});
  CHECK(parse_list("1,2,...,5") == std::vector<double>{1, 2, 3, 4, 5});
  CHECK(parse_list("1e2, 1e3,1e4") == std::vector<double>{100, 1000, 10000});
  CHECK(parse_list("0.5") == std::vector<double>{0.5});
  auto kind = [](const std::string& s) {
    try {
      parse_list(s);
    } catch (const spslab::Error& e) {
      return e.kind();
    }
    return spslab::ErrorKind::assertion;
  };
  CHECK(kind("1,2,...,4.5") == spslab::ErrorKind::invalid_argument);
  CHECK(kind("1,...,4") == spslab::ErrorKind::invalid_argument);
  CHECK(kind("1,x") == spslab::ErrorKind::invalid_argument);
  CHECK(kind("") == spslab::ErrorKind::invalid_argument);
}

TEST_CASE("regime: single point, usage errors, sweep curves") {
  TempDir d;
  auto r = call({"--out", d.path.string(), "regime", "--n", "3", "--alpha", "2", "--p", "2", "--q", "2.8"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("EXISTENCE_RADIAL_ONLY", 0) == 0);
  auto j = nlohmann::json::parse(slurp(d / "regime.json"));
  CHECK(j["exponents"]["exact"]["q_rad"] == "18/7");
  CHECK(j["exponents"]["exact"]["q_cs"] == "3");

  auto bad = call({"--out", d.path.string(), "regime", "--n", "3", "--alpha", "2", "--p", "2", "--q", "0.5"});
  CHECK(bad.code == spslab::cli::kUsage);
  CHECK(bad.err.find("q >= 1") != std::string::npos);
  CHECK(call({"regime", "--frobnicate"}).code == spslab::cli::kUsage);
  CHECK(call({}).code == spslab::cli::kUsage);

  auto sw = call({"--out", d.path.string(), "regime", "--alpha", "2", "--p-range", "1:4:13", "--q-range", "1:7:25"});
  CHECK(sw.code == 0);
  CHECK(slurp(d / "regime_curves.csv").find("\n2,3,") != std::string::npos);
  auto grid = slurp(d / "regime_grid.csv");
  CHECK(grid.find("\n2,3,EIGENVALUE_CRITICAL") != std::string::npos);
  CHECK(grid.find("\n2,2.75,EXISTENCE_RADIAL_ONLY") != std::string::npos);
}

TEST_CASE("solve writes result, profile and manifest; replay is byte-identical") {
  TempDir a, b;
  auto r = call({"--out", a.path.string(), "solve", "--q", "4", "--m", "512"});
  CHECK(r.code == 0);
  auto res = nlohmann::json::parse(slurp(a / "result.json"));
  CHECK(res["converged"].get<bool>());
  CHECK(res["residuals"]["pohozaev"].get<double>() <= 1e-3);
  auto man = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(man["command"] == "solve");
  CHECK(man["exit_code"] == 0);
  CHECK(man["settings"]["tol_grad"] == 1e-6);  // defaults echoed
  CHECK(man.contains("timestamp"));
  CHECK(man["outputs"].size() == 2);
  for (const auto& e : fs::directory_iterator(a.path)) CHECK(e.path().string().find(".tmp.") == std::string::npos);

  CHECK(call({"--out", b.path.string(), "replay", a / "manifest.json"}).code == 0);
  CHECK(slurp(a / "result.json") == slurp(b / "result.json"));
  CHECK(slurp(a / "profile.csv") == slurp(b / "profile.csv"));
}

TEST_CASE("config file under flags") {
  TempDir d;
  std::ofstream(d / "cfg.json") << R"({"q": "5", "m": 1024, "tol_grad": 1e-7})";
  CHECK(call({"--out", d.path.string(), "solve", "--config", d / "cfg.json", "--m", "512"}).code == 0);
  auto s = nlohmann::json::parse(slurp(d / "manifest.json"))["settings"];
  CHECK(s["q"] == "5");
  CHECK(s["m"] == 512);
  CHECK(s["tol_grad"] == 1e-7);

  std::ofstream(d / "bad.json") << R"({"q": "5", "mm": 3})";
  auto bad = call({"--out", d.path.string(), "solve", "--config", d / "bad.json"});
  CHECK(bad.code == spslab::cli::kUsage);
  CHECK(bad.err.find("mm") != std::string::npos);
  std::ofstream(d / "broken.json") << "{";
  CHECK(call({"--out", d.path.string(), "solve", "--config", d / "broken.json"}).code == spslab::cli::kUsage);
  CHECK(call({"--out", d.path.string(), "solve", "--config", d / "missing.json"}).code == spslab::cli::kIo);
}

TEST_CASE("exit codes for nonconvergence and unwritable output") {
  TempDir d;
  auto nc = call({"--out", d.path.string(), "solve", "--q", "7", "--m", "512", "--max-iter", "200"});
  CHECK(nc.code == spslab::cli::kNonconvergence);
  auto man = nlohmann::json::parse(slurp(d / "manifest.json"));
  CHECK(man["exit_code"] == spslab::cli::kNonconvergence);
  CHECK(call({"--out", "/proc/spslab_nope", "solve", "--m", "512"}).code == spslab::cli::kIo);
}

TEST_CASE("sweep runs the cartesian product in order") {
  TempDir d;
  std::ofstream(d / "sw.json") << R"({"q": ["3", "4"], "c": [1, 2], "m": 512})";
  auto r = call({"--out", d.path.string(), "--threads", "2", "sweep", d / "sw.json"});
  CHECK(r.code == 0);
  auto csv = slurp(d / "sweep.csv");
  CHECK(csv.rfind("index,c,q,exit_code", 0) == 0);
  CHECK(csv.find("\n0,1,3,0,true") != std::string::npos);
  CHECK(csv.find("\n3,2,4,0,true") != std::string::npos);
  CHECK(fs::exists(d.path / "points/003/result.json"));

  std::ofstream(d / "bad.json") << R"({"q": ["3", "0.5"]})";
  CHECK(call({"--out", d.path.string(), "sweep", d / "bad.json"}).code == spslab::cli::kUsage);
}

TEST_CASE("family and verify commands") {
  TempDir d;
  auto f = call({"--out", d.path.string(), "family", "annular", "--n", "3", "--alpha", "2", "--p", "2", "--q", "2.5",
                 "--R", "4,8,...,256"});
  CHECK(f.code == 0);
  auto rep = nlohmann::json::parse(slurp(d / "family.json"));
  CHECK(rep["members"].size() == 7);
  CHECK(f.out.find("slope quotient") != std::string::npos);
  CHECK(call({"--out", d.path.string(), "family", "spiral"}).code == spslab::cli::kUsage);

  auto v = call({"--out", d.path.string(), "verify", "brezis-lieb", "--preset", "escaping-bump"});
  CHECK(v.code == 0);
  CHECK(v.out.find("escaping-bump: pass") != std::string::npos);
  CHECK(slurp(d / "verify.csv").rfind("check,passed", 0) == 0);
  CHECK(call({"--out", d.path.string(), "verify", "weighted-log", "--gamma", "0.4"}).code == spslab::cli::kUsage);
  CHECK(call({"--out", d.path.string(), "verify", "nonsense"}).code == spslab::cli::kUsage);

  // profile round trip through solve
  CHECK(call({"--out", d.path.string(), "solve", "--m", "512"}).code == 0);
  auto p = call({"--out", d.path.string(), "verify", "power", "--profile", d / "profile.csv", "--beta", "0.25"});
  CHECK(p.code == 0);
  CHECK(p.out.find("power_interior: pass") != std::string::npos);
}
