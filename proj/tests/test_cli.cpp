#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef BSCAP_CLI_PATH
#error "BSCAP_CLI_PATH must name the CLI binary"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(BSCAP_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    Run r;
    if (!p) return r;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string stderr_of(const std::string& args) {
    const std::string cmd = std::string(BSCAP_CLI_PATH) + " " + args + " 2>&1 >/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    std::string s;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) s.append(buf.data(), n);
    pclose(p);
    return s;
}

// Data rows of a CSV (comments and the column header dropped), split on ','.
std::vector<std::vector<std::string>> rows(const std::string& csv) {
    std::vector<std::vector<std::string>> out;
    std::istringstream in(csv);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) cells.push_back(c);
        out.push_back(cells);
    }
    return out;
}

std::string without_timestamp(const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line))
        if (line.find("timestamp") == std::string::npos) out += line + '\n';
    return out;
}

fs::path temp(const std::string& name) { return fs::temp_directory_path() / ("bscap_cli_" + name); }

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

} // namespace

TEST(Cli, UsageAndVersion) {
    EXPECT_EQ(run("--version").code, 0);
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("nonsense").code, 2);
    EXPECT_EQ(run("capacity").code, 2);
    EXPECT_EQ(run("capacity --snr-db 1:x:2").code, 2);
    EXPECT_EQ(run("capacity --load bogus --snr-db 0").code, 2);
}

TEST(Cli, ReactiveAndResistiveRows) {
    auto r = run("capacity --load reactive --snr-db 20:20:1");
    ASSERT_EQ(r.code, 0);
    auto t = rows(r.out);
    ASSERT_EQ(t.size(), 1u);
    EXPECT_NEAR(std::stod(t[0][1]), 4.4239, 5e-3);
    EXPECT_NE(r.out.find("# command: capacity"), std::string::npos);

    r = run("capacity --load resistive --snr-db -10:-10:1");
    ASSERT_EQ(r.code, 0);
    t = rows(r.out);
    ASSERT_EQ(t.size(), 1u);
    EXPECT_NEAR(std::stod(t[0][1]), 0.1358, 5e-3);
}

TEST(Cli, GeneralCapacityRow) {
    const auto r = run("capacity --load general --snr-db 0:10:5");
    ASSERT_EQ(r.code, 0);
    const auto t = rows(r.out);
    ASSERT_EQ(t.size(), 3u);
    EXPECT_EQ(t[2][0], "10");
    EXPECT_NEAR(std::stod(t[2][1]), 2.9275, 0.01);
    EXPECT_EQ(t[0][2], "1");
}

TEST(Cli, DesignsAndMutualInformation) {
    const auto psk = temp("psk32.json");
    ASSERT_EQ(run("design psk --m 32 -o " + psk.string()).code, 0);
    auto r = run("mi " + psk.string() + " --snr-db 30");
    ASSERT_EQ(r.code, 0);
    auto j = json::parse(r.out);
    EXPECT_NEAR(j["mi_bpcu"].get<double>(), 4.9995, 5e-3);
    EXPECT_NEAR(j["source_entropy_bits"].get<double>(), 5.0, 1e-12);
    EXPECT_EQ(j["snr_db"].get<double>(), 30.0);

    const auto one = temp("single.json");
    write(one, R"({"points": [{"re": 0.3, "im": -0.4, "prob": 1}]})");
    r = run("mi " + one.string() + " --snr-db 10");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(json::parse(r.out)["mi_bpcu"].get<double>(), 0.0);

    const auto apsk = temp("apsk64.json");
    ASSERT_EQ(run("design apsk --m 64 --design-snr-db 15 -o " + apsk.string()).code, 0);
    std::ifstream f(apsk);
    j = json::parse(f);
    EXPECT_EQ(j["metadata"]["ring_sizes"], json({28, 20, 12, 4}));
    r = run("mi " + apsk.string() + " --snr-db 15");
    ASSERT_EQ(r.code, 0);
    EXPECT_NEAR(json::parse(r.out)["mi_bpcu"].get<double>(), 4.179, 0.1);

    r = run("design qam --m 256");
    ASSERT_EQ(r.code, 0);
    j = json::parse(r.out);
    double max_abs = 0.0;
    for (const auto& p : j["points"]) max_abs = std::max(max_abs, std::hypot(p["re"].get<double>(), p["im"].get<double>()));
    EXPECT_NEAR(max_abs, 1.0, 1e-12);
    EXPECT_EQ(j["points"].size(), 256u);

    r = run("design psk --m 16");
    ASSERT_EQ(r.code, 0);
    j = json::parse(r.out);
    EXPECT_EQ(j["points"].size(), 16u);
    for (const auto& p : j["points"])
        EXPECT_NEAR(std::hypot(p["re"].get<double>(), p["im"].get<double>()), 1.0, 1e-12);

    EXPECT_EQ(run("design hex --m 16").code, 2);
    EXPECT_EQ(run("design apsk --m 0").code, 2);
    for (const auto& p : {psk, one, apsk}) fs::remove(p);
}

TEST(Cli, MalformedConstellation) {
    const auto bad = temp("bad.json");
    write(bad, "{\n  \"points\": [\n    {\"re\": 1 \"im\": 0, \"prob\": 1}\n  ]\n}\n");
    EXPECT_EQ(run("mi " + bad.string() + " --snr-db 0").code, 2);
    EXPECT_NE(stderr_of("mi " + bad.string() + " --snr-db 0").find("line 3"), std::string::npos);
    EXPECT_EQ(run("mi " + temp("missing.json").string() + " --snr-db 0").code, 2);
    fs::remove(bad);
}

TEST(Cli, CircuitOutputRoundTrips) {
    EXPECT_EQ(run("circuit --caps 0 --res 0").code, 2);
    const auto out = temp("circuit.json");
    ASSERT_EQ(run("circuit --caps 2 --res 1 --seeds 1 --seed 3 -o " + out.string()).code, 0);
    std::ifstream f(out);
    const auto j = json::parse(f);
    EXPECT_EQ(j["state_table"].size(), 8u);
    EXPECT_EQ(j["topology"]["states"], 8);
    const auto r = run("mi " + out.string() + " --snr-db 20");
    ASSERT_EQ(r.code, 0);
    EXPECT_NEAR(json::parse(r.out)["mi_bpcu"].get<double>(), j["mi_bpcu"].get<double>(), 1e-6);
    fs::remove(out);
}

TEST(Cli, RegionCalibratedPredictions) {
    const auto r = run("region --delta 0.05,0.25,0.5,0.999999999");
    ASSERT_EQ(r.code, 0);
    const auto t = rows(r.out);
    ASSERT_EQ(t.size(), 4u);
    EXPECT_NEAR(std::stod(t[0][2]), 0.612, 1e-3);
    EXPECT_NEAR(std::stod(t[1][2]), 0.110, 0.015);
    EXPECT_NEAR(std::stod(t[1][3]), 0.168, 0.03);
    EXPECT_NEAR(std::stod(t[2][2]), 0.0385, 0.015);
    EXPECT_NEAR(std::stod(t[2][3]), 0.0566, 0.03);
    EXPECT_LT(std::stod(t[3][3]), std::stod(t[2][3]));
    EXPECT_EQ(run("region --delta 0.5,x").code, 2);
    EXPECT_EQ(run("region --delta 1.5 --q-factor 3").code, 2);
}

TEST(Cli, AmbientWithTableFile) {
    const auto table = temp("table.csv");
    ASSERT_EQ(run("capacity --load reactive --snr-db -30:30:0.5 -o " + table.string()).code, 0);
    auto r = run("ambient --fading constant --snr-db 0:10:5 --eps 0.1 --table " + table.string());
    ASSERT_EQ(r.code, 0);
    auto t = rows(r.out);
    ASSERT_EQ(t.size(), 3u);
    const auto cap = rows(run("capacity --load reactive --snr-db 10").out);
    EXPECT_NEAR(std::stod(t[2][1]), std::stod(cap[0][1]), 5e-3);
    EXPECT_EQ(std::stod(t[2][2]), 0.0);
    EXPECT_EQ(t[2][4], t[2][1]);

    r = run("ambient --fading gaussian --n-ambient 4 --snr-db 10 --eps 0.01,0.5 --samples 20000 --table " +
            table.string());
    ASSERT_EQ(r.code, 0);
    t = rows(r.out);
    ASSERT_EQ(t.size(), 2u);
    EXPECT_LE(std::stod(t[0][1]), std::stod(cap[0][1]) + 3.0 * std::stod(t[0][2]));
    EXPECT_LE(std::stod(t[0][4]), std::stod(t[1][4]));
    EXPECT_EQ(run("ambient --fading nakagami --table " + table.string()).code, 2);
    EXPECT_EQ(run("ambient --eps 1.5 --table " + table.string()).code, 2);
    fs::remove(table);
}

TEST(Cli, ReproducibleOutputs) {
    const std::string table = temp("table2.csv").string();
    ASSERT_EQ(run("capacity --load reactive --snr-db -30:30:1 -o " + table).code, 0);
    for (const std::string args :
         {"ambient --fading on-off --on-prob 0.3 --snr-db 0:20:10 --samples 5000 --seed 9 --table " + table,
          std::string("region --delta 0.1,0.3 --q-factor 4"), std::string("stats beta --a 0.6 --points 64"),
          std::string("stats z-disk --points 16"), std::string("design apsk --m 16 --design-snr-db 8")}) {
        const auto a = run(args), b = run(args);
        ASSERT_EQ(a.code, 0) << args;
        EXPECT_EQ(without_timestamp(a.out), without_timestamp(b.out)) << args;
        EXPECT_NE(a.out.find("timestamp"), std::string::npos) << args;
    }
    fs::remove(table);
}

TEST(Cli, StatsGrids) {
    auto r = run("stats reactance --points 3 --extent 1");
    ASSERT_EQ(r.code, 0);
    auto t = rows(r.out);
    ASSERT_EQ(t.size(), 3u);
    EXPECT_NEAR(std::stod(t[1][1]), 1.0 / std::numbers::pi, 1e-15);
    r = run("stats resistance --points 3 --extent 2");
    t = rows(r.out);
    EXPECT_NEAR(std::stod(t[1][2]), 0.5, 1e-15);
    EXPECT_EQ(run("stats bogus").code, 2);
    EXPECT_EQ(run("stats beta --a 1.0").code, 2);
}

TEST(Cli, RuntimeFailureExitCode) {
    EXPECT_EQ(run("design psk --m 4 -o /nonexistent-dir/sub/out.json").code, 3);
}
