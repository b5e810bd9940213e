#include <doctest.h>

#include <cstdlib>
#include <string>
#include <sys/wait.h>

#include "support.hpp"

namespace fs = std::filesystem;
using hsim::test::scratch_dir;
using hsim::test::slurp;

namespace {

struct Result {
    int code;
    std::string err;
};

Result hsim_cli(const std::string& args, const fs::path& dir) {
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = std::string(HSIM_CLI) + " " + args + " >/dev/null 2>" + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err)};
}

const std::string kPreset = std::string(HSIM_PRESET_DIR) + "/sydney-2016";

}  // namespace

TEST_CASE("cli exit codes") {
    const auto dir = scratch_dir("cli_codes");
    const auto missing = hsim_cli("run --scenario /no/such/scenario --out " + (dir / "o").string(), dir);
    CHECK(missing.code == 2);
    CHECK(missing.err.find("/no/such/scenario") != std::string::npos);

    const auto usage = hsim_cli("run --out " + (dir / "o").string(), dir);
    CHECK(usage.code == 1);

    const auto field = hsim_cli("whatif --scenario " + kPreset + " --households 500 --n 1 --field nonsense --donor " +
                                    kPreset + " --out " + (dir / "w").string(),
                                dir);
    CHECK(field.code == 1);
    CHECK(field.err.find("mortgage_rate_series") != std::string::npos);

    const auto grid = hsim_cli("calibrate --scenario " + kPreset + " --households 500 --grid '' --reference x.csv --out " +
                                   (dir / "c").string(),
                               dir);
    CHECK(grid.code == 1);

    const auto bad_set = hsim_cli("run --scenario " + kPreset + " --set lvr_mean=2 --out " + (dir / "o").string(), dir);
    CHECK(bad_set.code == 2);
}

TEST_CASE("cli run, manifest and replay") {
    const auto dir = scratch_dir("cli_run");
    const fs::path out = dir / "run";
    REQUIRE(hsim_cli("run --scenario " + kPreset + " --households 1500 --seed 9 --out " + out.string(), dir).code == 0);
    for (const char* f : {"prices.csv", "index.csv", "transactions.csv", "diagnostics.csv", "summary.json", "manifest.json"}) {
        CHECK(fs::exists(out / f));
    }
    const std::string manifest = slurp(out / "manifest.json");
    CHECK(manifest.find("\"n_sim_households\": \"1500\"") != std::string::npos);

    const fs::path again = dir / "again";
    REQUIRE(hsim_cli("replay --manifest " + out.string() + " --out " + again.string(), dir).code == 0);
    for (const char* f : {"prices.csv", "index.csv", "transactions.csv", "diagnostics.csv", "summary.json"}) {
        CHECK(slurp(out / f) == slurp(again / f));
    }

    const fs::path pop = dir / "pop";
    REQUIRE(hsim_cli("population --scenario " + kPreset + " --households 800 --out " + pop.string(), dir).code == 0);
    CHECK(fs::exists(pop / "manifest.json"));
}
