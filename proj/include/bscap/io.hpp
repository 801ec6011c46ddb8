#pragma once

// File formats: constellation JSON, run manifests for CSV/JSON outputs.

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bscap/error.hpp"
#include "bscap/input_laws.hpp"

namespace bscap::io {

inline constexpr const char* kToolVersion = "1.0.0";

using json = nlohmann::ordered_json;

// Shortest round-trip representation.
inline std::string fmt(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline std::string join(const std::vector<double>& v, char sep = ';') {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += sep;
        s += fmt(v[i]);
    }
    return s;
}

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> parameters;
    std::string seed = "none";
    std::string version = kToolVersion;
    std::string timestamp = utc_timestamp();

    // '#' lines; the timestamp sits on a line of its own.
    std::string csv_header() const {
        std::ostringstream o;
        o << "# command: " << command << '\n';
        for (const auto& [k, v] : parameters) o << "# param " << k << ": " << v << '\n';
        o << "# seed: " << seed << '\n';
        o << "# version: " << version << '\n';
        o << "# timestamp: " << timestamp << '\n';
        return o.str();
    }

    json to_json() const {
        json p = json::object();
        for (const auto& [k, v] : parameters) p[k] = v;
        return json{{"command", command}, {"parameters", p}, {"seed", seed}, {"version", version},
                    {"timestamp", timestamp}};
    }
};

inline json constellation_to_json(const DiscreteConstellation& c) {
    json pts = json::array();
    for (std::size_t m = 0; m < c.size(); ++m)
        pts.push_back({{"re", c.points()[m].real()}, {"im", c.points()[m].imag()}, {"prob", c.probs()[m]}});
    return json{{"points", pts}};
}

namespace detail {

inline std::string line_context(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

} // namespace detail

inline DiscreteConstellation parse_constellation(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidArgument("malformed constellation JSON at " + detail::line_context(text, e.byte) + ": " +
                              e.what());
    }
    if (!doc.is_object() || !doc.contains("points") || !doc["points"].is_array())
        throw InvalidArgument("constellation JSON needs a \"points\" array");
    std::vector<cplx> pts;
    std::vector<double> probs;
    for (const auto& p : doc["points"]) {
        if (!p.is_object() || !p.contains("re") || !p.contains("im") || !p.contains("prob") ||
            !p["re"].is_number() || !p["im"].is_number() || !p["prob"].is_number())
            throw InvalidArgument("each point needs numeric \"re\", \"im\" and \"prob\" fields");
        pts.emplace_back(p["re"].get<double>(), p["im"].get<double>());
        probs.push_back(p["prob"].get<double>());
    }
    return DiscreteConstellation(std::move(pts), std::move(probs), 1e-9);
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InvalidArgument("cannot open file: " + path);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

inline DiscreteConstellation read_constellation(const std::string& path) { return parse_constellation(read_file(path)); }

inline void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write file: " + path);
    f << text;
}

} // namespace bscap::io
