#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <random>

#include "bscap/io.hpp"

using namespace bscap;

TEST(Format, ShortestRoundTrip) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        EXPECT_EQ(std::stod(io::fmt(v)), v);
    }
    EXPECT_EQ(io::fmt(0.5), "0.5");
    EXPECT_EQ(io::fmt(3.0), "3");
    EXPECT_EQ(io::join({1.0, 0.25, -2.0}), "1;0.25;-2");
    EXPECT_EQ(io::join({}), "");
    EXPECT_EQ(io::join({1.5, 2.0}, ','), "1.5,2");
}

TEST(Manifest, CsvHeaderAndJson) {
    io::RunManifest m{"capacity", {{"load", "general"}, {"snr_db", "0:5:1"}}, "7"};
    m.timestamp = "2000-01-01T00:00:00Z";
    EXPECT_EQ(m.csv_header(),
              "# command: capacity\n# param load: general\n# param snr_db: 0:5:1\n# seed: 7\n# version: " +
                  std::string(io::kToolVersion) + "\n# timestamp: 2000-01-01T00:00:00Z\n");
    const auto j = m.to_json();
    EXPECT_EQ(j["command"], "capacity");
    EXPECT_EQ(j["parameters"]["snr_db"], "0:5:1");
    EXPECT_EQ(j["seed"], "7");
    EXPECT_EQ(j["timestamp"], "2000-01-01T00:00:00Z");
    const io::RunManifest fresh{"x", {}};
    EXPECT_EQ(fresh.seed, "none");
    EXPECT_EQ(fresh.timestamp.size(), 20u);
    EXPECT_EQ(fresh.timestamp.back(), 'Z');
}

TEST(Constellation, JsonRoundTrip) {
    const DiscreteConstellation c({{0.1, -0.2}, {0.3, 1.0 / 3.0}, {-0.7, 0.0}}, {0.2, 0.3, 0.5});
    const auto back = io::parse_constellation(io::constellation_to_json(c).dump());
    ASSERT_EQ(back.size(), c.size());
    for (std::size_t m = 0; m < c.size(); ++m) {
        EXPECT_EQ(back.points()[m], c.points()[m]);
        EXPECT_EQ(back.probs()[m], c.probs()[m]);
    }
}

TEST(Constellation, ParseErrors) {
    try {
        io::parse_constellation("{\n  \"points\": [\n    {\"re\": 1, \"im\": 0, \"prob\": 1},,\n  ]\n}");
        FAIL() << "expected a parse error";
    } catch (const InvalidArgument& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
    EXPECT_THROW(io::parse_constellation("[]"), InvalidArgument);
    EXPECT_THROW(io::parse_constellation(R"({"points": [{"re": 1, "im": 0}]})"), InvalidArgument);
    EXPECT_THROW(io::parse_constellation(R"({"points": [{"re": "1", "im": 0, "prob": 1}]})"), InvalidArgument);
    EXPECT_THROW(io::parse_constellation(R"({"points": [{"re": 1, "im": 0, "prob": 0.9}]})"), InvalidArgument);
    EXPECT_THROW(io::parse_constellation(R"({"points": [{"re": 2, "im": 0, "prob": 1}]})"), InvalidArgument);
    EXPECT_NO_THROW(io::parse_constellation(R"({"points": [{"re": 1, "im": 0, "prob": 0.9999999999}]})"));
}

TEST(Files, WriteReadAndMissing) {
    const auto path = std::filesystem::temp_directory_path() / "bscap_io_test.json";
    const DiscreteConstellation c({{0.0, 1.0}, {0.0, -1.0}}, {0.5, 0.5});
    io::write_text(path.string(), io::constellation_to_json(c).dump(2));
    const auto back = io::read_constellation(path.string());
    EXPECT_EQ(back.points()[1], cplx(0.0, -1.0));
    std::filesystem::remove(path);
    EXPECT_THROW(io::read_file(path.string()), InvalidArgument);
    EXPECT_THROW(io::write_text("/nonexistent-dir/x/y.csv", "a"), Error);
}
