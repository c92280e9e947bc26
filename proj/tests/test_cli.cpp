#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr folded into stdout.
Run smw(const std::string& args) {
  const std::string cmd = std::string(SMW_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "smw_cli_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("build writes a machine and a manifest that replays") {
  const fs::path dir = scratch();
  const fs::path a = dir / "main.txt";
  const fs::path b = dir / "again.txt";
  REQUIRE(smw("build --main --m 2 --L 12 --toy-even -o " + a.string()).code == 0);
  const fs::path manifest = dir / "main.txt.manifest.json";
  REQUIRE(fs::exists(manifest));
  CHECK(slurp(manifest).find("\"hash\"") != std::string::npos);
  REQUIRE(smw("build --manifest " + manifest.string() + " -o " + b.string()).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).rfind("machine m5_m4_main-half", 0) == 0);
}

TEST_CASE("simulate and enumerate") {
  const Run s = smw("simulate --machine lr --word 'q1 a p1 q2' --history 'z1_a z12 z2_a'");
  CHECK(s.code == 0);
  CHECK(s.out.find("q1 a p2 q2") != std::string::npos);
  CHECK(smw("simulate --machine lr --word 'q1 a p1 q2' --history 'z2_a'").code == 1);
  const Run e = smw("enumerate --machine lr --word 'q1 a p1 q2' --depth 2");
  CHECK(e.code == 0);
  CHECK(e.out.find("z1_a") != std::string::npos);
  const Run j = smw("simulate --machine main --word 'W(0,0)' --history 'ins_tacc t34'");
  CHECK(j.code == 0);
}

TEST_CASE("compile and export") {
  const fs::path dir = scratch();
  const Run g = smw("compile --group Gbar --format gap-style");
  CHECK(g.code == 0);
  CHECK(g.out.find("FreeGroup") != std::string::npos);
  const fs::path plain = dir / "gbar.txt";
  REQUIRE(smw("compile --group Gbar --format plain -o " + plain.string()).code == 0);
  const Run x = smw("export --in " + plain.string() + " --format plain");
  CHECK(x.code == 0);
  CHECK(x.out == slurp(plain));
}

TEST_CASE("verify, report and exit codes") {
  const fs::path dir = scratch();
  const fs::path rep = dir / "report.json";
  const Run v = smw("verify --suite lr-bound --max-tape 4 -o " + rep.string());
  CHECK(v.code == 0);
  CHECK(v.out.find("PASS lr-bound") != std::string::npos);
  const Run again = smw("verify --suite lr-bound --max-tape 4 -o -");
  CHECK(again.out.find(slurp(rep)) != std::string::npos);
  CHECK(smw("report --in " + rep.string()).code == 0);
  CHECK(smw("report --in " + (dir / "missing.json").string()).code == 3);
  CHECK(smw("").code == 1);
  CHECK(smw("verify --suite nope").code == 1);
  CHECK(smw("build --machine main --manifest " + (dir / "missing.json").string()).code == 3);
}

TEST_CASE("disk") {
  const Run d = smw("disk --k 0");
  CHECK(d.code == 0);
  CHECK(d.out.find("yes") != std::string::npos);
}
