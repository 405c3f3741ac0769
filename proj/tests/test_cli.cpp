#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "qtube/cli.hpp"
#include "qtube/errors.hpp"

using namespace qtube;

namespace {

const std::string uniform = R"("geometry": {"lower": [[0,0],[3,0]], "upper": [[0,1],[3,1]]})";

RunConfig config(const std::string& body) { return parse_run_config("{" + uniform + "," + body + "}", {}); }

int run(const std::string& args)
{
    const int status = std::system((std::string(QTUBE_BIN) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path write_temp(const std::string& name, const std::string& text)
{
    const auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream(p) << text;
    return p;
}

} // namespace

TEST_CASE("number formatting")
{
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(123456789012345.0) == "1.23456789012e+14");
    CHECK(format_number(NAN) == "nan");
}

TEST_CASE("config parsing")
{
    const RunConfig c = config(R"("k2": {"min": 10, "max": 20, "count": 3}, "N": [2, 4], "workers": 2)");
    CHECK(c.k2 == std::vector<double>{10, 15, 20});
    CHECK(c.N == std::vector<int>{2, 4});
    CHECK(c.workers == 2);
    CHECK(config(R"("k2": 12, "N": 3)").k2 == std::vector<double>{12});
    const RunConfig t = config(R"("k2": [12], "N": 1, "tolerances": {"ode_rtol": 1e-10, "flux": 1e-5})");
    CHECK(t.pipeline.solve.rtol == 1e-10);
    CHECK(t.flux_tolerance == 1e-5);

    CHECK_THROWS_AS(parse_run_config("{", {}), InvalidArgument);
    CHECK_THROWS_AS(parse_run_config(R"({"k2": [10]})", {}), InvalidArgument);
    CHECK_THROWS_AS(config(R"("k2": [10], "colour": 1)"), InvalidArgument);
    CHECK_THROWS_AS(config(R"("k2": {"min": 20, "max": 10, "count": 3})"), InvalidArgument);
    CHECK_THROWS_AS(config(R"("N": 0)"), InvalidArgument);
    CHECK_THROWS_AS(config(R"("workers": 0)"), InvalidArgument);
    CHECK_THROWS_AS(config(R"("tolerances": {"ode_rtol": -1})"), InvalidArgument);
    CHECK_THROWS_AS(parse_run_config(R"({"geometry": {"lower": [[0,0]], "upper": []}})", {}), GeometryError);
}

TEST_CASE("solve output is deterministic and independent of workers")
{
    RunConfig c = config(R"("k2": {"min": 12, "max": 60, "count": 9}, "N": 3)");
    std::ostringstream serial, parallel;
    c.workers = 1;
    CHECK(cmd_solve(c, serial) == 0);
    c.workers = 3;
    CHECK(cmd_solve(c, parallel) == 0);
    CHECK(serial.str() == parallel.str());

    std::istringstream in(serial.str());
    std::string line;
    int comments = 0, rows = 0;
    while (std::getline(in, line)) {
        if (line.rfind('#', 0) == 0)
            ++comments;
        else
            ++rows;
    }
    CHECK(comments >= 2);
    CHECK(rows == 10);
    CHECK(serial.str().find("\n12,3,ok,1,1,") != std::string::npos);
}

TEST_CASE("cutoff energies produce failed rows")
{
    RunConfig c = config(R"("k2": [20], "N": 2)");
    c.k2.push_back(M_PI * M_PI);
    std::ostringstream out;
    CHECK(cmd_solve(c, out) == 1);
    CHECK(out.str().find("\n20,2,ok,") != std::string::npos);
    CHECK(out.str().find(",failed,") != std::string::npos);
}

TEST_CASE("converge and mufield")
{
    RunConfig c = config(R"("k2": [30], "N": [1])");
    std::ostringstream out;
    CHECK_THROWS_AS(cmd_converge(c, out), InvalidArgument);
    c.N = {1, 2, 4};
    std::ostringstream conv;
    CHECK(cmd_converge(c, conv) == 0);
    CHECK(conv.str().find("# monotone yes") != std::string::npos);

    RunConfig m = parse_run_config(
        R"({"geometry": {"lower": [[-2,0],[2,0]], "upper": [[-2,1],[0,1],[0,0.6],[2,0.6]]}, "rounding": 0.05,
            "mufield": {"u_min": -1, "u_max": 1, "nu": 5, "nv": 3}})",
        {});
    std::ostringstream grid;
    CHECK(cmd_mufield(m, grid) == 0);
    std::istringstream in(grid.str());
    std::string line;
    int rows = 0;
    while (std::getline(in, line))
        if (line.rfind('#', 0) != 0) {
            ++rows;
            CHECK(std::count(line.begin(), line.end(), ',') == 4);
        }
    CHECK(rows == 3);
    CHECK(grid.str().find("# nu 5 nv 3") != std::string::npos);
}

TEST_CASE("compose on a straight duct")
{
    RunConfig c = config(R"("k2": [20, 30], "N": 2, "cuts": [1.5], "verify": true)");
    std::ostringstream out;
    CHECK(cmd_compose(c, out) == 0);
    CHECK(out.str().find("unsplit_difference") != std::string::npos);
    c.cuts = {1.5, 1.5};
    CHECK_THROWS_AS(cmd_compose(c, out), GeometryError);
}

TEST_CASE("command line exit codes")
{
    const auto good = write_temp("qtube_good.json", "{" + uniform + R"(, "k2": [20], "N": 2})");
    const auto single = write_temp("qtube_single.json", "{" + uniform + R"(, "k2": [20], "N": [2]})");
    const auto bad = write_temp("qtube_bad.json", R"({"geometry": {"lower": [[0,0],[1,0]]}})");
    char k2[64];
    std::snprintf(k2, sizeof k2, "%.17g", M_PI * M_PI);
    const auto cut = write_temp("qtube_cut.json", "{" + uniform + ", \"k2\": [" + k2 + "], \"N\": 1}");
    CHECK(run("solve --config " + good.string()) == 0);
    CHECK(run("solve --config " + cut.string()) == 1);
    CHECK(run("converge --config " + single.string()) == 2);
    CHECK(run("solve --config " + bad.string()) == 2);
    CHECK(run("solve") == 2);
    CHECK(run("frobnicate") == 2);
    const auto out = std::filesystem::temp_directory_path() / "qtube_out.csv";
    CHECK(run("solve -j 2 -o " + out.string() + " --config " + good.string()) == 0);
    CHECK(std::filesystem::file_size(out) > 0);
}
