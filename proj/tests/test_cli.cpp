#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "specmd/harness.hpp"

namespace {

int run_cmd(const std::string& cmd) {
  const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return s;
}

const char* kTmpCfg = "/tmp/specmd_smoke.cfg";

void write_smoke_config() {
  std::ofstream out(kTmpCfg);
  out << "problem = gaussian\nboundary = ced\nscheme = cn\n"
         "x_l = -5\nx_r = 5\nn.left = 12\nn.interior = 60\nn.right = 80\n"
         "n_t = 20\nt_final = 0.01\nobserver.stride = 10\n"
         "output.csv = /tmp/specmd_smoke.csv\noutput.json = /tmp/specmd_smoke.json\n"
         "output.field = /tmp/specmd_smoke_field.csv\n";
}

}  // namespace

TEST_CASE("cli: run writes csv/json/field and exits 0") {
  write_smoke_config();
  std::remove("/tmp/specmd_smoke.csv");
  CHECK(run_cmd(std::string(SPECMD_BIN) + " run " + kTmpCfg) == 0);
  const std::string csv = slurp("/tmp/specmd_smoke.csv");
  CHECK(csv.rfind("t,delta,delta_inf,delta_E,", 0) == 0);
  CHECK(slurp("/tmp/specmd_smoke.json").find("\"completed\": true") != std::string::npos);
  CHECK(slurp("/tmp/specmd_smoke_field.csv").rfind("x,re,im", 0) == 0);
}

TEST_CASE("cli: config errors exit with code 2") {
  write_smoke_config();
  CHECK(run_cmd(std::string(SPECMD_BIN) + " run /tmp/does_not_exist.cfg") == 2);
  CHECK(run_cmd(std::string(SPECMD_BIN) + " run " + kTmpCfg + " --set scheme=rk9") == 2);
  CHECK(run_cmd(std::string(SPECMD_BIN) + " bogus-subcommand") == 2);
  CHECK(run_cmd(std::string(SPECMD_BIN) + " sweep " + kTmpCfg +
                " --param pml.sigma0 --values 1,2") == 2);
}

TEST_CASE("cli: numerical failures exit with code 3") {
  write_smoke_config();
  // an absurd time step with a handful of iterations cannot converge
  const int code = run_cmd(std::string(SPECMD_BIN) + " run " + kTmpCfg +
                           " --set problem=soliton --set x_l=-25 --set x_r=25" +
                           " --set t_final=100 --set n_t=2 --set fp.max_iters=4");
  CHECK(code == 3);
}

TEST_CASE("cli: converge subcommand reports a slope") {
  write_smoke_config();
  const int code = run_cmd(std::string(SPECMD_BIN) + " converge " + kTmpCfg +
                           " --resolutions 40,80 --set t_final=0.1");
  CHECK(code == 0);
}

TEST_CASE("cli: shipped presets parse") {
  for (const char* name :
       {"linear-ced", "linear-pml", "linear-tbc", "soliton-ced", "soliton-pml", "soliton-tbc",
        "peregrine", "peregrine-perturbed"}) {
    const std::string path = std::string(SPECMD_PRESETS) + "/" + name + ".cfg";
    INFO(path);
    std::ifstream in(path);
    REQUIRE(in.good());
    // parse-only: budget constraints keep full preset runs in the
    // acceptance suite
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK_NOTHROW(specmd::ExperimentConfig::parse(text));
  }
}
