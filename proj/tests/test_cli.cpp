// Drives the installed CLI binary end to end. The binary path arrives in
// the MIMODFE_CLI environment variable, set by the ctest registration.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct CmdResult {
    int status = -1;
    std::string output;
};

std::string cli_path() {
    const char* env = std::getenv("MIMODFE_CLI");
    REQUIRE_MESSAGE(env != nullptr, "MIMODFE_CLI must point at the CLI binary");
    return env;
}

CmdResult run_cli(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CmdResult result;
    char buf[4096];
    while (size_t n = std::fread(buf, 1, sizeof(buf), pipe)) result.output.append(buf, n);
    const int rc = pclose(pipe);
    result.status = WEXITSTATUS(rc);
    return result;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("cli_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

const std::string sweep_args =
    "--users 2 --streams 2,2 --subcarriers 8 --channel-length 3 --modulation dmt "
    "--info-start 10 --info-stop 14 --info-step 4 --realizations 3 --min-bits 3000 "
    "--receivers dfe,linear --seed 41";

}  // namespace

TEST_CASE("design prints the verification report") {
    const CmdResult r = run_cli(
        "design --users 2 --streams 1,1 --subcarriers 4 --channel-length 2 --info 4 --seed 2");
    CHECK(r.status == 0);
    CHECK(r.output.find("sum_information") != std::string::npos);
    CHECK(r.output.find("mse bound") != std::string::npos);
    CHECK(r.output.find("FLAG") == std::string::npos);
}

TEST_CASE("design --out then verify round-trips") {
    TempFile design("design.json");
    const CmdResult d = run_cli(
        "design --users 2 --streams 2,1 --subcarriers 8 --channel-length 3 --info 9 "
        "--seed 17 --out " + design.path);
    CHECK(d.status == 0);

    const CmdResult v = run_cli("verify " + design.path);
    CHECK(v.status == 0);
    CHECK(v.output.find("sum_information") != std::string::npos);
    CHECK(v.output.find("FLAG") == std::string::npos);

    const CmdResult bad = run_cli("verify does_not_exist.json");
    CHECK(bad.status != 0);
}

TEST_CASE("design accepts a channel taps file") {
    TempFile taps("taps.txt");
    {
        std::ofstream f(taps.path);
        f << "# two single-tap users\n";
        f << "1.0 0.0\n\n0.0 1.0\n";
    }
    const CmdResult r = run_cli("design --streams 1,1 --subcarriers 4 --info 3 "
                                "--channel-file " + taps.path);
    CHECK(r.status == 0);
    CHECK(r.output.find("FLAG") == std::string::npos);
}

TEST_CASE("design honors a user ordering") {
    const CmdResult r = run_cli(
        "design --users 2 --streams 1,2 --subcarriers 8 --channel-length 3 --info 8 "
        "--seed 5 --order 2,1");
    CHECK(r.status == 0);
    // design position first shows user 2 under the permutation
    CHECK(r.output.find("dead") == std::string::npos);
}

TEST_CASE("sweep writes identical CSV across runs and thread counts") {
    TempFile a("a.csv"), b("b.csv"), c("c.csv");
    CHECK(run_cli("sweep " + sweep_args + " --threads 1 --out " + a.path).status == 0);
    CHECK(run_cli("sweep " + sweep_args + " --threads 1 --out " + b.path).status == 0);
    CHECK(run_cli("sweep " + sweep_args + " --threads 3 --out " + c.path).status == 0);
    const std::string ga = slurp(a.path);
    CHECK(!ga.empty());
    CHECK(ga == slurp(b.path));
    CHECK(ga == slurp(c.path));
}

TEST_CASE("sweep reads a config file, command line wins") {
    TempFile cfg("sweep.cfg"), a("cfg_a.csv"), b("cfg_b.csv");
    {
        std::ofstream f(cfg.path);
        f << "users=2\nstreams=2,2\nsubcarriers=8\nchannel-length=3\nmodulation=dmt\n";
        f << "info-start=10\ninfo-stop=14\ninfo-step=4\nrealizations=3\nmin-bits=3000\n";
        f << "receivers=dfe,linear\nseed=41\n";
    }
    CHECK(run_cli("sweep --config " + cfg.path + " --out " + a.path).status == 0);
    CHECK(run_cli("sweep " + sweep_args + " --out " + b.path).status == 0);
    CHECK(slurp(a.path) == slurp(b.path));

    // a command-line seed overrides the config file value
    TempFile c("cfg_c.csv");
    CHECK(run_cli("sweep --config " + cfg.path + " --seed 99 --out " + c.path).status == 0);
    CHECK(slurp(a.path) != slurp(c.path));
}

TEST_CASE("sweep requires an output path") {
    const CmdResult r = run_cli("sweep " + sweep_args);
    CHECK(r.status != 0);
}

TEST_CASE("dead-stream refusal reaches the exit code and message") {
    const CmdResult r = run_cli(
        "sweep --users 1 --streams 2 --subcarriers 2 --channel-length 2 "
        "--info-start 0.05 --info-stop 0.05 --realizations 2 --min-bits 100 --seed 5 "
        "--out cli_test_dead.csv");
    std::remove("cli_test_dead.csv");
    CHECK(r.status == 2);
    CHECK(r.output.find("dead streams") != std::string::npos);
}

TEST_CASE("--help names every documented flag") {
    const CmdResult r = run_cli("sweep --help");
    CHECK(r.status == 0);
    for (const char* flag :
         {"--users", "--streams", "--subcarriers", "--channel-length", "--modulation",
          "--info-start", "--info-stop", "--info-step", "--realizations", "--seed",
          "--receivers", "--out", "--config", "--threads", "--min-bits"}) {
        CHECK_MESSAGE(r.output.find(flag) != std::string::npos, flag);
    }
}
