#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef SLMC_CLI_PATH
#error "SLMC_CLI_PATH must point at the built binary"
#endif

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args, const std::string& env = "") {
  fs::path out = fs::temp_directory_path() / "slmc_cli_out.txt";
  std::string cmd = env + " " + std::string(SLMC_CLI_PATH) + " " + args + " > " +
                    out.string() + " 2>&1";
  int rc = std::system(cmd.c_str());
  std::ifstream in(out);
  std::stringstream buf;
  buf << in.rdbuf();
  fs::remove(out);
  return {rc == -1 ? -1 : WEXITSTATUS(rc), buf.str()};
}

}  // namespace

TEST_CASE("build prints the reachable state count") {
  auto res = run_cli("build --model reduced --n 3 --nu 40:0.5,50:0.5 --gamma0 5:1 --gamma1 6:1");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("states=30550") != std::string::npos);
  CHECK(res.output.find("time=") != std::string::npos);
}

TEST_CASE("analyze a lone process: the lock is always free") {
  auto res = run_cli("analyze --model full --n 1");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("p_acquire_no_wait  1\n") != std::string::npos);
}

TEST_CASE("steady/export/analyze round trip through files") {
  fs::path dir = fs::temp_directory_path() / "slmc_cli_trip";
  fs::create_directories(dir);
  auto steady_file = (dir / "steady.txt").string();
  auto base = (dir / "model").string();

  auto s = run_cli("steady --model reduced --n 2 --steady-out " + steady_file);
  REQUIRE(s.exit_code == 0);
  REQUIRE(fs::exists(steady_file));

  auto e = run_cli("export --model reduced --n 2 --mrmc-out " + base);
  REQUIRE(e.exit_code == 0);
  CHECK(fs::exists(base + ".tra"));
  CHECK(fs::exists(base + ".lab"));

  auto a = run_cli("analyze --model reduced --n 2 --steady-in " + steady_file);
  CHECK(a.exit_code == 0);
  CHECK(a.output.find("imported") != std::string::npos);

  auto internal = run_cli("analyze --model reduced --n 2");
  REQUIRE(internal.exit_code == 0);
  // same properties whether the vector is imported or solved in-process
  auto tail = [](const std::string& s) {
    auto pos = s.find("\nn=2\n");
    REQUIRE(pos != std::string::npos);
    return s.substr(pos);
  };
  CHECK(tail(a.output) == tail(internal.output));

  fs::remove_all(dir);
}

TEST_CASE("simulate is reproducible for a fixed seed") {
  const char* args = "simulate --n 2 --ticks 100000 --seed 31337";
  auto a = run_cli(args);
  auto b = run_cli(args);
  CHECK(a.exit_code == 0);
  CHECK(a.output == b.output);
  auto c = run_cli("simulate --n 2 --ticks 100000 --seed 31338");
  CHECK(a.output != c.output);
}

TEST_CASE("sweep writes ascending csv groups") {
  fs::path csv = fs::temp_directory_path() / "slmc_sweep.csv";
  auto res = run_cli("sweep --model reduced --n 2..4 --csv " + csv.string());
  REQUIRE(res.exit_code == 0);
  std::ifstream in(csv);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  CHECK(line == "n,property,key,value");
  std::uint32_t last_n = 0;
  while (std::getline(in, line)) {
    std::uint32_t n = std::stoul(line.substr(0, line.find(',')));
    CHECK(n >= last_n);
    last_n = n;
  }
  CHECK(last_n == 4);
  fs::remove(csv);
}

TEST_CASE("config file mirrors the flags") {
  fs::path cfg = fs::temp_directory_path() / "slmc_cfg.ini";
  {
    std::ofstream out(cfg);
    out << "model=reduced\n";
    out << "n=3\n";
    out << "nu=40:0.5,50:0.5\n";
    out << "gamma0=5:1\n";
    out << "gamma1=6:1\n";
  }
  auto res = run_cli("build --config " + cfg.string());
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("states=30550") != std::string::npos);
  fs::remove(cfg);
}

TEST_CASE("errors carry a phase tag and a nonzero exit") {
  auto bad_dist = run_cli("build --model full --n 2 --nu 40:0.7,50:0.5");
  CHECK(bad_dist.exit_code != 0);
  CHECK(bad_dist.output.find("error[build]") != std::string::npos);

  auto bad_flag = run_cli("build --frobnicate");
  CHECK(bad_flag.exit_code != 0);

  auto range_where_single = run_cli("build --model full --n 2..5");
  CHECK(range_where_single.exit_code != 0);
  CHECK(range_where_single.output.find("single process count") != std::string::npos);

  auto no_sub = run_cli("");
  CHECK(no_sub.exit_code != 0);
}

TEST_CASE("log verbosity env var") {
  auto quiet = run_cli("build --model reduced --n 2", "SLMC_LOG=quiet");
  CHECK(quiet.exit_code == 0);
  CHECK(quiet.output.find("[build]") == std::string::npos);
  auto info = run_cli("build --model reduced --n 2", "SLMC_LOG=info");
  CHECK(info.output.find("[build]") != std::string::npos);
}
