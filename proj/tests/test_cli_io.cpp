#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "mcd/error.hpp"
#include "mcd/io.hpp"
#include "mcd/metrics.hpp"

using namespace mcd;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::path(MCD_TEST_TMP) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

// Runs the CLI with stdout and stderr captured under `dir`.
int cli(const std::string& args, const fs::path& dir) {
    const std::string cmd = std::string("\"") + MCD_CLI + "\" " + args + " > \"" + (dir / "stdout.txt").string() +
                            "\" 2> \"" + (dir / "stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

io::GridFile parse(const std::string& text) {
    std::istringstream in(text);
    return io::parse_grid(in);
}

}  // namespace

TEST_CASE("grid CSV round trip") {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> d(-1000, 100000);
    Grid g(7, 9);
    for (auto& v : g.values()) v = d(rng);
    std::ostringstream out;
    io::write_grid(out, g, 100);
    const auto back = parse(out.str());
    CHECK(std::ranges::equal(back.grid.values(), g.values()));
    CHECK(back.trials_uniform == 100);
    CHECK(out.str().rfind("7,9,100\n", 0) == 0);

    std::normal_distribution<double> n(0.0, 1e3);
    for (auto& v : g.values()) v = n(rng) * 1e-7;
    std::ostringstream real;
    io::write_grid(real, g);
    CHECK(std::ranges::equal(parse(real.str()).grid.values(), g.values()));
    CHECK_FALSE(parse(real.str()).trials_uniform.has_value());
}

TEST_CASE("number formatting") {
    CHECK(io::format_number(0.0) == "0");
    CHECK(io::format_number(-0.0) == "0");
    CHECK(io::format_number(42.0) == "42");
    CHECK(io::format_number(-7.0) == "-7");
    CHECK(io::format_number(0.1) == "0.10000000000000001");
    CHECK(std::stod(io::format_number(M_PI)) == M_PI);
}

TEST_CASE("grid CSV layouts and errors") {
    CHECK(parse("2,3\n1,2,3\n4,5,6\n").grid(1, 2) == 6.0);
    CHECK(parse("2,2\n1\n2\n3\n4\n").grid(1, 0) == 3.0);
    CHECK(parse("\n2,2\r\n 1 , 2 \r\n\n3,4\r\n").grid(0, 1) == 2.0);

    const auto fails_at = [](const std::string& text, int line) {
        try {
            parse(text);
        } catch (const ParseError& e) {
            CHECK(e.line() == line);
            CHECK(std::string(e.what()).find("line " + std::to_string(line)) != std::string::npos);
            return;
        }
        FAIL("no parse error for: " << text);
    };
    fails_at("2,3\n1,2,3\n4,5\n", 3);
    fails_at("2,3\n1,2,3\n4,x,6\n", 3);
    fails_at("2,3\n1,2,3\n", 3);
    fails_at("2,3\n1,2,3\n4,5,6\n7,8,9\n", 4);
    fails_at("2\n1,2\n", 1);
    fails_at("0,3\n", 1);
    fails_at("2,2,0\n1,2\n3,4\n", 1);
    fails_at("", 1);
    try {
        parse("2,3\n1,2,3\n4,x,6\n");
    } catch (const ParseError& e) {
        CHECK(e.column() == 2);
    }
}

TEST_CASE("trials and mask files") {
    const auto dir = scratch("io_files");
    spit(dir / "trials.csv", "2,2\n10,20\n30,40\n");
    CHECK(io::read_trials(dir / "trials.csv")(1, 1) == 40);
    spit(dir / "bad_trials.csv", "2,2\n10,20.5\n30,40\n");
    CHECK_THROWS_AS(io::read_trials(dir / "bad_trials.csv"), ParseError);
    spit(dir / "bad_mask.csv", "1,2\n0,2\n");
    CHECK_THROWS_AS(io::read_mask(dir / "bad_mask.csv"), ParseError);
    Mask m(3, 4);
    m(2, 3) = m(0, 1) = 1;
    io::write_mask(dir / "mask.csv", m);
    CHECK(std::ranges::equal(io::read_mask(dir / "mask.csv").values(), m.values()));
    CHECK_THROWS_AS(io::read_grid(dir / "missing.csv"), InvalidInput);
    try {
        io::read_grid(dir / "bad_trials.csv");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("bad_trials.csv") != std::string::npos);
    }
}

TEST_CASE("PGM output") {
    const auto dir = scratch("pgm");
    Mask m(2, 3);
    m(0, 0) = m(1, 2) = 1;
    io::write_pgm(dir / "m.pgm", m);
    CHECK(slurp(dir / "m.pgm") == std::string("P5\n3 2\n255\n\xff\x00\x00\x00\x00\xff", 17));
    Field<double> p(1, 3, std::vector<double>{0.0, 0.5, 1.0});
    io::write_pgm(dir / "p.pgm", p);
    CHECK(slurp(dir / "p.pgm") == std::string("P5\n3 1\n255\n\x00\x80\xff", 14));
}

TEST_CASE("key-value files") {
    std::istringstream in("# comment\nrows = 50\n\n  family=poisson # trailing\nname = \"a b\"\n");
    const auto kv = io::parse_key_values(in);
    CHECK(kv.at("rows") == "50");
    CHECK(kv.at("family") == "poisson");
    CHECK(kv.at("name") == "a b");
    std::istringstream dup("a = 1\na = 2\n");
    CHECK_THROWS_AS(io::parse_key_values(dup), ParseError);
    std::istringstream junk("just words\n");
    CHECK_THROWS_AS(io::parse_key_values(junk), ParseError);
}

TEST_CASE("JSON reports") {
    ThresholdScan scan;
    scan.thresholds = {0.0, 1.0, 2.0};
    scan.belt_means = {std::nan(""), 0.5};
    scan.belt_counts = {0, 3};
    scan.chosen_belt = 1;
    scan.t_star = 1.5;
    const auto j = io::to_json(scan);
    CHECK(j.dump() == io::to_json(scan).dump());
    CHECK(j.dump().find("null") != std::string::npos);
    CHECK(j.dump().find("NaN") == std::string::npos);
}

TEST_CASE("cli: detect on the bundled example") {
    const auto dir = scratch("cli_detect");
    const std::string data = std::string(MCD_SOURCE_DIR) + "/data/disc_example/";
    REQUIRE(cli("detect -i " + data + "grid.csv -o " + (dir / "out").string(), dir) == 0);
    for (auto f : {"stat.csv", "var.csv", "mask.csv", "mask.pgm", "scan.json"}) CHECK(fs::exists(dir / "out" / f));
    const auto mask = io::read_mask(dir / "out" / "mask.csv");
    const auto truth = io::read_mask(data + "truth.csv");
    CHECK(jaccard(mask, truth) >= 0.8);
}

TEST_CASE("cli: constant grid gives an empty mask and a warning") {
    const auto dir = scratch("cli_constant");
    std::ostringstream g;
    io::write_grid(g, Grid(50, 50, 20.0), 100);
    spit(dir / "grid.csv", g.str());
    CHECK(cli("detect -i " + (dir / "grid.csv").string() + " -o " + (dir / "out").string(), dir) == 0);
    CHECK(count_on(io::read_mask(dir / "out" / "mask.csv")) == 0);
    CHECK(slurp(dir / "stderr.txt").find("warning") != std::string::npos);
}

TEST_CASE("cli: exit codes") {
    const auto dir = scratch("cli_codes");
    spit(dir / "short.csv", "3,3,10\n1,2,3\n4,5\n7,8,9\n");
    CHECK(cli("detect -i " + (dir / "short.csv").string() + " -o " + (dir / "o").string(), dir) == 2);
    CHECK(slurp(dir / "stderr.txt").find("line 3") != std::string::npos);

    std::ostringstream g;
    io::write_grid(g, Grid(10, 10, 1.5));
    spit(dir / "flat.csv", g.str());
    CHECK(cli("detect -f normal -i " + (dir / "flat.csv").string() + " -o " + (dir / "o").string(), dir) == 3);
    CHECK(cli("detect -f normal --sigma 1 -i " + (dir / "flat.csv").string() + " -o " + (dir / "o").string(), dir) ==
          0);

    CHECK(cli("theorems --reps 2", dir) == 2);
    CHECK(cli("", dir) == 2);
    CHECK(cli("detect", dir) == 2);
    CHECK(cli("detect -i " + (dir / "nope.csv").string(), dir) == 2);
    CHECK(cli("fdr --alpha 1.5 -f normal --sigma 1 -i " + (dir / "flat.csv").string() + " -o " + (dir / "o").string(),
              dir) == 2);
    spit(dir / "bad.conf", "rows = 30\ncolour = blue\n");
    CHECK(cli("simulate -c " + (dir / "bad.conf").string() + " -o " + (dir / "s").string(), dir) == 2);
    CHECK(slurp(dir / "stderr.txt").find("colour") != std::string::npos);
    CHECK(cli("--help", dir) == 0);
}

TEST_CASE("cli: simulate is byte-for-byte reproducible") {
    const auto dir = scratch("cli_simulate");
    const std::string args = "simulate --set rows=40 --set cols=40 --set shape=disc --set disc_radius=8 "
                             "--set alternatives=0.3 --set methods=mcd,fdr --replicates 2 --seed 5 -o ";
    REQUIRE(cli(args + (dir / "a").string(), dir) == 0);
    REQUIRE(cli(args + (dir / "b").string(), dir) == 0);
    const auto a = slurp(dir / "a" / "summary.json");
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(dir / "b" / "summary.json"));
    const auto j = io::Json::parse(a);
    CHECK(j["methods"]["mcd"]["settings"]["p1=0.3"].contains("sensitivity_mean"));
}
