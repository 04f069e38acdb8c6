// SPDX-License-Identifier: Apache-2.0
//
// End-to-end checks of the z3rosim binary: exit codes, output files and the
// re-runnability of the config echo. Invoked by ctest with the tool path as
// the first argument.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
    if (ok) {
        std::printf("ok   %s\n", what.c_str());
    } else {
        std::printf("FAIL %s\n", what.c_str());
        ++failures;
    }
}

int run(const std::string& command) {
    const int status = std::system(command.c_str());
    return status;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: cli_integration <path-to-z3rosim>\n");
        return 2;
    }
    const std::string tool = argv[1];
    const fs::path work = fs::temp_directory_path() / "z3sim_cli_it";
    fs::remove_all(work);
    fs::create_directories(work);

    const fs::path config = work / "scan.cfg";
    {
        std::ofstream out(config);
        out << "channel_synthetic = rayleigh:m=16,l=6,seed=42\n"
               "user_locations = 2\n"
               "m_s = 2\n"
               "pa_model = rapp\n"
               "backoff_db = -3.1\n"
               "noise_var = 0.001\n"
               "ensemble_size = 20000\n"
               "seed = 7\n";
    }

    // --- scan: success path ---
    const fs::path out1 = work / "out1";
    check(run(tool + " scan --config " + config.string() + " --out " + out1.string() +
              " --users 1 --threads 4") == 0,
          "scan exits 0");
    for (const char* name :
         {"at_user_ecdf.csv", "all_locations_ecdf.csv", "heatmap_user2.csv", "summary.json"}) {
        check(fs::exists(out1 / name), std::string("scan wrote ") + name);
    }
    json summary;
    {
        std::ifstream in(out1 / "summary.json");
        in >> summary;
    }
    check(summary.at("command") == "scan", "summary records the command");
    check(summary.at("gaps").contains("at_user"), "summary carries at-user gaps");
    for (const auto& name : summary.at("outputs")) {
        check(fs::exists(out1 / name.get<std::string>()), "listed output exists");
    }

    // --- config echo reruns the identical experiment ---
    const fs::path config2 = work / "echo.cfg";
    {
        std::ofstream out(config2);
        for (const auto& [key, value] : summary.at("config").items()) {
            out << key << " = " << value.get<std::string>() << "\n";
        }
    }
    const fs::path out2 = work / "out2";
    check(run(tool + " scan --config " + config2.string() + " --out " + out2.string() +
              " --users 1 --threads 1") == 0,
          "echoed config reruns");
    check(read_file(out1 / "at_user_ecdf.csv") == read_file(out2 / "at_user_ecdf.csv"),
          "echoed rerun reproduces at_user_ecdf.csv byte-for-byte");
    check(read_file(out1 / "all_locations_ecdf.csv") == read_file(out2 / "all_locations_ecdf.csv"),
          "echoed rerun reproduces all_locations_ecdf.csv byte-for-byte");

    // --- scan: usage errors ---
    check(run(tool + " scan --config " + config.string() + " --out " + (work / "out3").string() +
              " --users 2 2>/dev/null") != 0,
          "--users 2 with a 1-entry list fails");
    const fs::path blocker = work / "blocker";
    {
        std::ofstream out(blocker);
        out << "not a directory\n";
    }
    check(run(tool + " scan --config " + config.string() + " --out " +
              (blocker / "sub").string() + " --users 1 2>/dev/null") != 0,
          "unwritable output path fails");
    check(run(tool + " scan --config " + (work / "missing.cfg").string() + " --out " +
              (work / "out4").string() + " 2>/dev/null") != 0,
          "missing config fails");

    // --- sweep ---
    const fs::path sweep_out = work / "sweep";
    check(run(tool + " sweep --config " + config.string() + " --out " + sweep_out.string() +
              " --axis noise --grid 0:40:9") == 0,
          "noise sweep exits 0");
    {
        std::ifstream in(sweep_out / "sweep.csv");
        std::string line;
        int rows = 0;
        std::getline(in, line);
        check(line == "axis_db,rate_mrt,rate_z3ro", "sweep.csv header");
        while (std::getline(in, line)) {
            ++rows;
        }
        check(rows == 9, "sweep.csv has one row per grid point");
    }
    check(run(tool + " sweep --config " + config.string() + " --out " +
              (work / "sweep_bad").string() + " --axis noise --grid 10:0:5 2>/dev/null") != 0,
          "reversed grid fails");
    const fs::path sweep_one = work / "sweep_one";
    check(run(tool + " sweep --config " + config.string() + " --out " + sweep_one.string() +
              " --axis noise --grid 20:20:1") == 0,
          "single-point grid runs");
    {
        std::ifstream in(sweep_one / "sweep.csv");
        std::string line;
        int rows = 0;
        while (std::getline(in, line)) {
            ++rows;
        }
        check(rows == 2, "single-point sweep has header plus one row");
    }
    check(run(tool + " sweep --config " + config.string() + " --out " +
              (work / "sweep_bo").string() + " --axis backoff --grid -9:-3:3") == 0,
          "backoff sweep exits 0");

    // --- pattern ---
    const fs::path pattern_out = work / "pattern";
    check(run(tool + " pattern --m 32 --user-angle 0 --grid -90:90:13 --ms 2 --ensemble-size "
                     "1000000 --seed 5 --out " +
              pattern_out.string()) == 0,
          "pattern exits 0");
    {
        std::ifstream in(pattern_out / "pattern.csv");
        std::string line;
        std::getline(in, line);
        check(line == "angle_deg,mrt_distortion_db,z3ro_distortion_db", "pattern.csv header");
        double mrt_at_zero = 0.0, z3ro_at_zero = 0.0;
        bool found = false;
        while (std::getline(in, line)) {
            double angle, mrt_db, z3ro_db;
            std::string z3ro_text = line.substr(line.rfind(',') + 1);
            if (std::sscanf(line.c_str(), "%lf,%lf", &angle, &mrt_db) >= 2 &&
                std::abs(angle) < 1e-9) {
                mrt_at_zero = mrt_db;
                z3ro_at_zero = z3ro_text == "-inf"
                                   ? -std::numeric_limits<double>::infinity()
                                   : std::stod(z3ro_text);
                found = true;
            }
            (void)z3ro_db;
        }
        check(found, "pattern grid contains the user angle");
        check(z3ro_at_zero <= mrt_at_zero - 40.0, "z3ro sits >= 40 dB under mrt at the user");
    }
    check(run(tool + " pattern --m 32 --user-angle 120 --grid -90:90:5 --out " +
              (work / "pat_bad").string() + " 2>/dev/null") != 0,
          "out-of-range user angle fails");

    std::printf("%s\n", failures == 0 ? "ALL OK" : "FAILURES PRESENT");
    return failures == 0 ? 0 : 1;
}
