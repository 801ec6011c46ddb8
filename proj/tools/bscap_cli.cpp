// bscap: command-line front end producing CSV/JSON data for the capacity,
// constellation, circuit, region, ambient and impedance-statistics studies.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bscap/bscap.hpp"

using namespace bscap;
using io::fmt;
using io::json;

namespace {

struct DbRange {
    double start = 0.0, end = 0.0, step = 1.0;
};

DbRange parse_range(const std::string& text) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    try {
        while (std::getline(ss, item, ':')) {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size()) throw InvalidArgument("");
        }
    } catch (const std::exception&) {
        throw InvalidArgument("malformed SNR range '" + text + "', expected start:end:step in dB");
    }
    if (parts.size() == 1) return {parts[0], parts[0], 1.0};
    if (parts.size() == 2) return {parts[0], parts[1], 1.0};
    if (parts.size() != 3) throw InvalidArgument("malformed SNR range '" + text + "', expected start:end:step in dB");
    DbRange r{parts[0], parts[1], parts[2]};
    require(r.step > 0.0 && r.start <= r.end, "SNR range needs start <= end and a positive step");
    return r;
}

std::vector<double> expand(const DbRange& r) {
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((r.end - r.start) / r.step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(r.start + static_cast<double>(i) * r.step);
    return out;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw InvalidArgument("malformed number list '" + text + "'");
        }
    }
    require(!out.empty(), "empty number list");
    return out;
}

// Requested points merged into a fine warm-start grid.
std::vector<double> sweep_path(const std::vector<double>& wanted, double fine_step) {
    std::set<double> pts;
    const double lo = std::min(0.0, wanted.front());
    const auto n = static_cast<long>(std::floor((wanted.back() - lo) / fine_step + 1e-9));
    for (long i = 0; i <= n; ++i) pts.insert(std::round((lo + static_cast<double>(i) * fine_step) * 1e9) / 1e9);
    for (double w : wanted) pts.insert(std::round(w * 1e9) / 1e9);
    std::vector<double> out;
    for (double p : pts)
        if (out.empty() || p - out.back() > 1e-7) out.push_back(p);
    return out;
}

std::string law_columns(const InputLaw& law) {
    if (const auto* d = std::get_if<DauipDistribution>(&law))
        return std::to_string(d->k()) + "," + io::join(d->radii()) + "," + io::join(d->probs());
    if (const auto* c = std::get_if<RealConstellation>(&law))
        return std::to_string(c->size()) + "," + io::join(c->points()) + "," + io::join(c->probs());
    return ",,";
}

void cmd_capacity(const std::string& load, const std::string& range, double fine_step, const std::string& out) {
    const auto wanted = expand(parse_range(range));
    io::RunManifest m{"capacity", {{"load", load}, {"snr_db", range}, {"step_db", fmt(fine_step)}}};
    std::ostringstream o;
    o << m.csv_header();
    auto emit = [&](double db, const CapacityPoint& p) {
        o << fmt(db) << ',' << fmt(p.rate) << ',' << law_columns(p.input_law) << '\n';
        if (!p.converged) std::cerr << "warning: " << p.message << '\n';
    };
    if (load == "general") {
        o << "snr_db,rate_bpcu,k,radii,probs\n";
        const auto path = sweep_path(wanted, fine_step);
        SweepConfig cfg;
        cfg.allow_high_start = true;
        const auto pts = capacity_general_sweep_points(path, cfg);
        for (double w : wanted)
            for (std::size_t i = 0; i < path.size(); ++i)
                if (std::abs(path[i] - w) < 1e-7) emit(w, pts[i]);
    } else if (load == "reactive") {
        o << "snr_db,rate_bpcu,k,radii,probs\n";
        for (double w : wanted) emit(w, capacity_reactive(Snr::from_db(w)));
    } else if (load == "resistive") {
        o << "snr_db,rate_bpcu,m,points,probs\n";
        const auto pts = capacity_resistive_sweep_points(wanted);
        for (std::size_t i = 0; i < wanted.size(); ++i) emit(wanted[i], pts[i]);
    } else if (load == "uniform-disk") {
        o << "snr_db,rate_bpcu,k,radii,probs\n";
        for (double w : wanted) emit(w, rate_uniform_disk(Snr::from_db(w)));
    } else {
        throw InvalidArgument("unknown load class '" + load + "' (general, reactive, resistive, uniform-disk)");
    }
    io::write_text(out, o.str());
}

void cmd_mi(const std::string& file, double snr_db, bool real, int order, const std::string& out) {
    const auto c = io::read_constellation(file);
    const Snr rho = Snr::from_db(snr_db);
    double mi = 0.0;
    if (real) {
        std::vector<std::pair<double, double>> pts;
        for (std::size_t m = 0; m < c.size(); ++m) {
            require(std::abs(c.points()[m].imag()) <= 1e-12, "real channel needs points with zero imaginary part");
            pts.emplace_back(c.points()[m].real(), c.probs()[m]);
        }
        std::sort(pts.begin(), pts.end());
        std::vector<double> x, p;
        for (const auto& [pos, prob] : pts) {
            if (!x.empty() && pos == x.back()) {
                p.back() += prob;
            } else {
                x.push_back(pos);
                p.push_back(prob);
            }
        }
        mi = mi_real_discrete(RealConstellation(std::move(x), std::move(p)), rho);
    } else {
        mi = mi_complex_discrete(c, rho, order);
    }
    io::RunManifest m{"mi", {{"constellation", file}, {"snr_db", fmt(snr_db)}, {"real", real ? "true" : "false"},
                             {"order", std::to_string(order)}}};
    json j{{"snr_db", snr_db}, {"mi_bpcu", mi}, {"source_entropy_bits", source_entropy(c.probs())},
           {"manifest", m.to_json()}};
    io::write_text(out, j.dump(2) + "\n");
}

void cmd_design(const std::string& kind, std::size_t m, double snr_db, const std::string& out) {
    io::RunManifest man{"design", {{"kind", kind}, {"m", std::to_string(m)}, {"design_snr_db", fmt(snr_db)}}};
    json j;
    if (kind == "apsk") {
        const auto d = design_apsk(m, Snr::from_db(snr_db));
        j = io::constellation_to_json(d.constellation);
        j["metadata"] = {{"design_snr_db", snr_db},
                         {"K", d.k},
                         {"ring_sizes", d.ring_sizes},
                         {"ring_radii", d.ring_radii},
                         {"ring_probs", d.ring_probs},
                         {"solver_k_matched", d.solver_k_matched}};
    } else if (kind == "psk") {
        j = io::constellation_to_json(design_psk(m));
    } else if (kind == "qam") {
        j = io::constellation_to_json(design_qam(m));
    } else {
        throw InvalidArgument("unknown design '" + kind + "' (apsk, psk, qam)");
    }
    j["manifest"] = man.to_json();
    io::write_text(out, j.dump(2) + "\n");
}

void cmd_circuit(std::size_t caps, std::size_t res, double snr_db, int seeds, std::uint64_t seed,
                 const std::string& out) {
    const SwitchedLoadTopology t{caps, res};
    t.validate();
    require(seeds >= 1, "at least one seed is required");
    CircuitOptions opts;
    opts.starts = seeds;
    const auto d = optimize_circuit(t, Snr::from_db(snr_db), seed, opts);
    const auto c = d.constellation();
    json states = json::array();
    for (std::size_t w = 0; w < c.size(); ++w)
        states.push_back({{"switch_word", w}, {"gamma_re", c.points()[w].real()}, {"gamma_im", c.points()[w].imag()},
                          {"prob", c.probs()[w]}});
    io::RunManifest man{"circuit",
                        {{"caps", std::to_string(caps)}, {"res", std::to_string(res)}, {"design_snr_db", fmt(snr_db)},
                         {"seeds", std::to_string(seeds)}},
                        std::to_string(seed)};
    json j{{"topology", {{"n_caps", caps}, {"n_res", res}, {"states", t.states()}}},
           {"normalized_values", {{"b0", d.values.b0}, {"caps", d.values.caps}, {"res", d.values.res}}},
           {"state_table", states},
           {"mi_bpcu", d.mi_bpcu},
           {"design_snr_db", snr_db},
           {"converged", d.converged},
           {"best_seed", d.seed}};
    j["points"] = io::constellation_to_json(c)["points"];
    j["manifest"] = man.to_json();
    io::write_text(out, j.dump(2) + "\n");
}

void cmd_region(const std::string& deltas, double q_factor, double cal_delta, double cal_fraction,
                const std::string& out) {
    const auto ds = parse_list(deltas);
    double q = q_factor;
    if (!(q > 0.0)) q = calibrate_q_factor(cal_delta, cal_fraction);
    io::RunManifest m{"region",
                      {{"deltas", deltas}, {"q_factor", q_factor > 0.0 ? fmt(q_factor) : "calibrated"},
                       {"calibrate_delta", fmt(cal_delta)}, {"calibrate_fraction", fmt(cal_fraction)}}};
    std::ostringstream o;
    o << m.csv_header() << "delta,q_factor,excluded_area_fraction,rate_loss_bpcu\n";
    for (double d : ds) {
        const auto g = region_from_reactance_band({d, q});
        o << fmt(d) << ',' << fmt(q) << ',' << fmt(excluded_area_fraction(g)) << ',' << fmt(high_snr_rate_loss(g))
          << '\n';
    }
    io::write_text(out, o.str());
}

void cmd_ambient(const std::string& fading, double on_prob, std::size_t n_ambient, const std::string& range,
                 const std::string& eps_list, std::uint64_t seed, std::size_t samples, const std::string& table_path,
                 double table_max_db, const std::string& out) {
    const auto model = FadingModel::from_name(fading, on_prob);
    const auto eps = parse_list(eps_list);
    for (double e : eps) require(e > 0.0 && e < 1.0, "outage probabilities must lie in (0, 1)");
    require(samples > 0, "sample count must be positive");
    const auto table = table_path.empty() ? CapacityTable::general(-30.0, table_max_db) : CapacityTable::load_csv(table_path);
    io::RunManifest m{"ambient",
                      {{"fading", model.name()}, {"n_ambient", std::to_string(n_ambient)}, {"snr_db", range},
                       {"eps", eps_list}, {"samples", std::to_string(samples)},
                       {"table", table_path.empty() ? "computed" : table_path}},
                      std::to_string(seed)};
    std::ostringstream o;
    o << m.csv_header() << "snr_db,ergodic_bpcu,stderr,outage_eps,outage_bpcu\n";
    for (double db : expand(parse_range(range))) {
        const Snr rho = Snr::from_db(db);
        const auto erg = ergodic_capacity(model, n_ambient, rho, samples, seed, table);
        const auto outs = outage_capacities(model, n_ambient, rho, eps, samples, seed, table);
        for (std::size_t i = 0; i < eps.size(); ++i)
            o << fmt(db) << ',' << fmt(erg.rate) << ',' << fmt(erg.stderr_) << ',' << fmt(eps[i]) << ','
              << fmt(outs[i]) << '\n';
    }
    io::write_text(out, o.str());
}

void cmd_stats(const std::string& kind, double a, int points, double extent, const std::string& out) {
    require(points >= 2, "grid needs at least two points");
    io::RunManifest m{"stats", {{"kind", kind}, {"a", fmt(a)}, {"points", std::to_string(points)}, {"extent", fmt(extent)}}};
    std::ostringstream o;
    o << m.csv_header();
    const double tau = 2.0 * std::numbers::pi;
    if (kind == "beta") {
        o << "theta,beta,density\n";
        for (int i = 0; i < points; ++i) {
            const double th = tau * i / points;
            o << fmt(th) << ',' << fmt(beta_angle(th, a)) << ',' << fmt(conditional_angle_pdf(th, a)) << '\n';
        }
    } else if (kind == "reactance") {
        o << "x,density\n";
        for (int i = 0; i < points; ++i) {
            const double x = -extent + 2.0 * extent * i / (points - 1);
            o << fmt(x) << ',' << fmt(reactance_pdf_unit_circle(x)) << '\n';
        }
    } else if (kind == "resistance") {
        o << "r,density,cdf\n";
        for (int i = 0; i < points; ++i) {
            const double r = extent * i / (points - 1);
            const auto v = resistance_pdf_uniform_real(r);
            o << fmt(r) << ',' << fmt(v.pdf) << ',' << fmt(v.cdf) << '\n';
        }
    } else if (kind == "z-disk") {
        o << "r,x,density\n";
        for (int i = 1; i <= points; ++i)
            for (int k = 0; k < points; ++k) {
                const double r = extent * i / points;
                const double x = -extent + 2.0 * extent * k / (points - 1);
                o << fmt(r) << ',' << fmt(x) << ',' << fmt(z_pdf_uniform_disk({r, x})) << '\n';
            }
    } else {
        throw InvalidArgument("unknown stats kind '" + kind + "' (beta, reactance, resistance, z-disk)");
    }
    io::write_text(out, o.str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Backscatter load-modulation capacity toolkit"};
    app.set_version_flag("--version", io::kToolVersion);
    app.require_subcommand(1);

    std::string out = "-";
    auto add_out = [&](CLI::App* sub) { sub->add_option("-o,--out", out, "output file ('-' for stdout)"); };

    std::string load = "general", range;
    double fine_step = 0.1;
    auto* cap = app.add_subcommand("capacity", "capacity versus SNR");
    cap->add_option("--load", load, "general | reactive | resistive | uniform-disk");
    cap->add_option("--snr-db", range, "start:end:step in dB")->required();
    cap->add_option("--step-db", fine_step, "warm-start grid step of the general sweep")->check(CLI::PositiveNumber);
    add_out(cap);

    std::string file;
    double snr_db = 0.0;
    bool real = false;
    int order = ComplexDiscreteEvaluator::kPanelRule;
    auto* mi = app.add_subcommand("mi", "mutual information of a constellation file");
    mi->add_option("constellation", file, "constellation JSON")->required();
    mi->add_option("--snr-db", snr_db, "SNR in dB")->required();
    mi->add_flag("--real", real, "use the real-valued channel");
    mi->add_option("--order", order, "Gauss-Hermite order per dimension (0: composite panel rule)")
        ->check(CLI::Range(0, 128));
    add_out(mi);

    std::string kind;
    std::size_t m_count = 0;
    double design_db = 15.0;
    auto* des = app.add_subcommand("design", "APSK, PSK or QAM constellation");
    des->add_option("kind", kind, "apsk | psk | qam")->required();
    des->add_option("--m", m_count, "symbol count")->required();
    des->add_option("--design-snr-db", design_db, "design SNR in dB (APSK)");
    add_out(des);

    std::size_t caps = 5, res = 3;
    int seeds = 16;
    std::uint64_t seed = 1;
    double circuit_db = 20.0;
    auto* cir = app.add_subcommand("circuit", "switched-load circuit synthesis");
    cir->add_option("--caps", caps, "switched capacitors");
    cir->add_option("--res", res, "switched resistors");
    cir->add_option("--design-snr-db", circuit_db, "design SNR in dB");
    cir->add_option("--seeds", seeds, "number of random starts");
    cir->add_option("--seed", seed, "first seed");
    add_out(cir);

    std::string deltas = "0.05,0.15,0.25,0.5";
    double q_factor = 0.0, cal_delta = 0.05, cal_fraction = 0.612;
    auto* reg = app.add_subcommand("region", "reactance-band region analysis");
    reg->add_option("--delta", deltas, "comma-separated capacitance ranges");
    reg->add_option("--q-factor", q_factor, "coil Q-factor (calibrated when omitted)");
    reg->add_option("--calibrate-delta", cal_delta, "delta used for calibration");
    reg->add_option("--calibrate-fraction", cal_fraction, "excluded fraction targeted by calibration");
    add_out(reg);

    std::string fading = "gaussian", eps_list = "0.01,0.1", amb_range = "10", table_path;
    double on_prob = 0.5, table_max_db = 30.0;
    std::size_t n_ambient = 1, samples = 100000;
    std::uint64_t amb_seed = 1;
    auto* amb = app.add_subcommand("ambient", "ergodic and outage capacity under ambient fading");
    amb->add_option("--fading", fading, "constant | gaussian | on-off");
    amb->add_option("--on-prob", on_prob, "on probability of the on-off model");
    amb->add_option("--n-ambient", n_ambient, "ambient symbols per tag symbol")->check(CLI::PositiveNumber);
    amb->add_option("--snr-db", amb_range, "start:end:step in dB");
    amb->add_option("--eps", eps_list, "comma-separated outage probabilities");
    amb->add_option("--seed", amb_seed, "random seed");
    amb->add_option("--samples", samples, "Monte Carlo samples");
    amb->add_option("--table", table_path, "capacity table CSV (computed when omitted)");
    amb->add_option("--table-max-db", table_max_db, "upper end of the computed table");
    add_out(amb);

    std::string stats_kind = "beta";
    double stats_a = 0.5, extent = 5.0;
    int points = 256;
    auto* st = app.add_subcommand("stats", "impedance distribution grids");
    st->add_option("kind", stats_kind, "beta | reactance | resistance | z-disk");
    st->add_option("--a", stats_a, "circle radius for the beta law");
    st->add_option("--points", points, "grid points");
    st->add_option("--extent", extent, "coordinate extent");
    add_out(st);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*cap) cmd_capacity(load, range, fine_step, out);
        else if (*mi) cmd_mi(file, snr_db, real, order, out);
        else if (*des) cmd_design(kind, m_count, design_db, out);
        else if (*cir) cmd_circuit(caps, res, circuit_db, seeds, seed, out);
        else if (*reg) cmd_region(deltas, q_factor, cal_delta, cal_fraction, out);
        else if (*amb)
            cmd_ambient(fading, on_prob, n_ambient, amb_range, eps_list, amb_seed, samples, table_path, table_max_db, out);
        else if (*st) cmd_stats(stats_kind, stats_a, points, extent, out);
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
