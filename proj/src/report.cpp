#include "malign/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace malign {

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

double round_sig12(double x) {
    if (!std::isfinite(x)) return x;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

ordered_json json_num(double x) { return ordered_json(round_sig12(x)); }

ordered_json RunManifest::to_json() const {
    ordered_json j;
    j["schema"] = kSchemaVersion;
    j["command"] = command;
    j["config"] = config;
    j["digest"] = digest;
    j["code_version"] = code_version;
    j["wall_ms"] = round_sig12(wall_ms);
    return j;
}

RunManifest RunManifest::from_json(const ordered_json& j) {
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.config = j.at("config");
    m.digest = j.at("digest").get<std::uint64_t>();
    m.code_version = j.value("code_version", std::string(kCodeVersion));
    m.wall_ms = j.value("wall_ms", 0.0);
    if (m.digest != fnv1a64(m.config.dump()))
        throw Error(Errc::BadConfig, "manifest digest does not match its config");
    return m;
}

RunManifest make_manifest(const std::string& command, const ordered_json& config) {
    RunManifest m;
    m.command = command;
    m.config = config;
    m.digest = fnv1a64(config.dump());
    return m;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoError, "cannot write " + path);
    out << content;
    if (!out) throw Error(Errc::IoError, "write failed for " + path);
}

Instance load_instance_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw Error(Errc::IoError, std::string("bad instance JSON: ") + e.what());
    }
    if (!j.contains("sequences") || !j["sequences"].is_array())
        throw Error(Errc::BadConfig, "instance JSON needs a \"sequences\" array");
    Instance inst;
    for (const auto& seq : j["sequences"]) {
        std::vector<int> s;
        for (const auto& v : seq) s.push_back(v.get<int>());
        inst.sequences.push_back(std::move(s));
    }
    return inst;
}

Instance load_instance_file(const std::string& path) { return load_instance_json(read_file(path)); }

SequenceDistribution load_distribution_file(const std::string& path, int alphabet, int m) {
    if (path == "uniform") return SequenceDistribution::uniform(alphabet, m);
    ordered_json j;
    try {
        j = ordered_json::parse(read_file(path));
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(Errc::IoError, std::string("bad distribution JSON: ") + e.what());
    }
    if (!j.contains("probs")) throw Error(Errc::BadConfig, "distribution JSON needs \"probs\"");
    SequenceDistribution dist;
    for (const auto& row : j["probs"]) {
        std::vector<double> p;
        for (const auto& v : row) p.push_back(v.get<double>());
        dist.probs.push_back(std::move(p));
    }
    return dist;
}

namespace {

ordered_json base_report(const char* kind) {
    ordered_json j;
    j["schema"] = kSchemaVersion;
    j["kind"] = kind;
    return j;
}

} // namespace

ordered_json to_json(const AlignmentResult& r, const ScoreModel& model) {
    ordered_json j = base_report("score");
    j["L"] = score_to_rational_string(r.score, model.scale());
    j["L_raw"] = r.score;
    j["scale"] = model.scale();
    if (r.path) {
        ordered_json p = ordered_json::array();
        for (const auto& tuple : *r.path) p.push_back(tuple);
        j["path"] = p;
    }
    j["cells_visited"] = r.stats.cells_visited;
    return j;
}

ordered_json to_json(const BlockDecomposition& d) {
    ordered_json j = base_report("diag");
    j["v"] = d.v;
    j["d"] = d.d;
    j["breakpoints"] = d.breakpoints;
    ordered_json cells = ordered_json::array();
    for (const auto& cell : d.cells) {
        ordered_json c = ordered_json::array();
        for (const auto& range : cell) c.push_back(ordered_json{{"first", range.first}, {"last", range.last}});
        cells.push_back(c);
    }
    j["cells"] = cells;
    return j;
}

ordered_json to_json(const GammaCurveReport& r) {
    ordered_json j = base_report("gamma");
    ordered_json pts = ordered_json::array();
    for (const auto& p : r.points)
        pts.push_back(ordered_json{{"n", p.n},
                                   {"mean_L", json_num(p.mean_L)},
                                   {"se", json_num(p.se)},
                                   {"gamma_n", json_num(p.gamma_n)}});
    j["points"] = pts;
    ordered_json audits = ordered_json::array();
    for (const auto& a : r.superadditivity)
        audits.push_back(ordered_json{{"n", a.n},
                                      {"mean_2n", json_num(a.mean_2n)},
                                      {"twice_mean_n", json_num(a.twice_mean_n)},
                                      {"pooled_se", json_num(a.pooled_se)},
                                      {"ok", a.ok}});
    j["superadditivity"] = audits;
    j["fit_gamma"] = json_num(r.fit_gamma);
    j["fit_c"] = json_num(r.fit_c);
    return j;
}

ordered_json to_json(const SurfaceReport& r) {
    ordered_json j = base_report("surface");
    ordered_json pts = ordered_json::array();
    for (const auto& p : r.points) {
        ordered_json q = ordered_json::array();
        for (double v : p.q) q.push_back(json_num(v));
        pts.push_back(ordered_json{{"q", q},
                                   {"n", p.n},
                                   {"mean_L", json_num(p.mean_L)},
                                   {"se", json_num(p.se)},
                                   {"gamma_n", json_num(p.gamma_n)}});
    }
    j["points"] = pts;
    j["argmax"] = r.argmax;
    j["nearest_center"] = r.nearest_center;
    j["max_at_center"] = r.max_at_center;
    ordered_json checks = ordered_json::array();
    for (const auto& c : r.concavity)
        checks.push_back(ordered_json{{"left", c.left},
                                      {"right", c.right},
                                      {"mid", c.mid},
                                      {"lhs", json_num(c.lhs)},
                                      {"rhs", json_num(c.rhs)},
                                      {"slack", json_num(c.slack)},
                                      {"ok", c.ok}});
    j["concavity"] = checks;
    j["concavity_ok"] = r.concavity_ok;
    return j;
}

ordered_json to_json(const HoeffdingReport& r) {
    ordered_json j = base_report("hoeffding");
    j["n"] = r.n;
    j["replicates"] = r.replicates;
    ordered_json rows = ordered_json::array();
    for (const auto& row : r.rows)
        rows.push_back(ordered_json{{"t", json_num(row.t)},
                                    {"bound", json_num(row.bound)},
                                    {"freq_upper", json_num(row.freq_upper)},
                                    {"freq_lower", json_num(row.freq_lower)},
                                    {"flagged_upper", row.flagged_upper},
                                    {"flagged_lower", row.flagged_lower}});
    j["rows"] = rows;
    j["violations"] = r.violations;
    return j;
}

ordered_json to_json(const CltSeries& r) {
    ordered_json j = base_report("clt");
    ordered_json rows = ordered_json::array();
    for (const auto& row : r.rows)
        rows.push_back(ordered_json{{"n", row.n},
                                    {"degenerate", row.degenerate},
                                    {"var_hat", json_num(row.var_hat)},
                                    {"var_per_n", json_num(row.var_per_n)},
                                    {"dk", json_num(row.dk_hat)},
                                    {"dk_band", json_num(row.dk_band)},
                                    {"skew", json_num(row.skewness)},
                                    {"kurt", json_num(row.excess_kurtosis)},
                                    {"c_star_check", row.c_star_check}});
    j["rows"] = rows;
    j["c_star"] = json_num(r.c_star);
    j["dk_nonincreasing"] = r.dk_nonincreasing;
    j["var_slope_stable"] = r.var_slope_stable;
    return j;
}

ordered_json to_json(const SteinEstimate& r) {
    ordered_json j = base_report("stein");
    j["T"] = json_num(r.T);
    j["T_prime"] = json_num(r.T_prime);
    j["mode"] = r.mode == SteinMode::exact ? "exact" : "sampled";
    j["samples_used"] = r.samples_used;
    j["se_T"] = json_num(r.se_T);
    j["se_T_prime"] = json_num(r.se_T_prime);
    return j;
}

ordered_json to_json(const BoundReport& r) {
    ordered_json j = base_report("stein-bound");
    auto term = [](const BoundTerm& t) {
        return ordered_json{{"value", json_num(t.value)}, {"se", json_num(t.se)}};
    };
    j["term_varT"] = term(r.term_varT);
    j["term_varTprime"] = term(r.term_varTprime);
    j["term_sixth"] = term(r.term_sixth);
    j["term_third"] = term(r.term_third);
    j["total"] = json_num(r.total);
    j["sigma2"] = json_num(r.sigma2);
    return j;
}

ordered_json to_json(const BmReport& r) {
    ordered_json j = base_report("bm");
    j["n"] = r.cfg.n;
    j["mode"] = r.cfg.mode == BmMode::dependent ? "dependent" : "independent";
    j["p"] = json_num(r.cfg.p);
    j["alphabet"] = r.cfg.alphabet;
    j["replicates"] = r.cfg.replicates;
    j["mean_L"] = json_num(r.mean_L);
    j["se"] = json_num(r.se);
    j["skewness"] = json_num(r.skewness);
    return j;
}

ordered_json to_json(const PermReport& r) {
    ordered_json j = base_report("perm");
    j["n"] = r.cfg.n;
    j["c"] = json_num(r.cfg.c);
    j["literal_formula"] = r.cfg.literal_formula;
    j["replicates"] = r.cfg.replicates;
    j["mean_L"] = json_num(r.mean_L);
    j["se"] = json_num(r.se);
    j["mean_over_sqrt_n"] = json_num(r.mean_over_sqrt_n);
    return j;
}

namespace {

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

} // namespace

std::string csv_of(const GammaCurveReport& r) {
    std::string out = "n,mean_L,se,gamma_n\n";
    for (const auto& p : r.points)
        out += std::to_string(p.n) + "," + fmt(p.mean_L) + "," + fmt(p.se) + "," + fmt(p.gamma_n) + "\n";
    return out;
}

std::string csv_of(const SurfaceReport& r) {
    std::string out = "q,mean_L,se,gamma_n\n";
    for (const auto& p : r.points) {
        std::string q;
        for (std::size_t i = 0; i < p.q.size(); ++i) q += (i ? ";" : "") + fmt(p.q[i]);
        out += q + "," + fmt(p.mean_L) + "," + fmt(p.se) + "," + fmt(p.gamma_n) + "\n";
    }
    return out;
}

std::string csv_of(const HoeffdingReport& r) {
    std::string out = "t,bound,freq_upper,freq_lower,flagged_upper,flagged_lower\n";
    for (const auto& row : r.rows)
        out += fmt(row.t) + "," + fmt(row.bound) + "," + fmt(row.freq_upper) + "," +
               fmt(row.freq_lower) + "," + (row.flagged_upper ? "1" : "0") + "," +
               (row.flagged_lower ? "1" : "0") + "\n";
    return out;
}

std::string csv_of(const CltSeries& r) {
    std::string out = "n,var_hat,var_per_n,dk,dk_band,skew,kurt\n";
    for (const auto& row : r.rows)
        out += std::to_string(row.n) + "," + fmt(row.var_hat) + "," + fmt(row.var_per_n) + "," +
               fmt(row.dk_hat) + "," + fmt(row.dk_band) + "," + fmt(row.skewness) + "," +
               fmt(row.excess_kurtosis) + "\n";
    return out;
}

std::string svg_line_chart(const std::vector<double>& xs, const std::vector<double>& ys,
                           const std::string& x_label, const std::string& y_label) {
    if (xs.empty() || xs.size() != ys.size()) return "";
    const double w = 640, h = 400, ml = 60, mr = 20, mt = 20, mb = 40;
    double x_lo = std::log(xs.front()), x_hi = x_lo;
    double y_lo = ys.front(), y_hi = y_lo;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double lx = std::log(xs[i]);
        x_lo = std::min(x_lo, lx);
        x_hi = std::max(x_hi, lx);
        y_lo = std::min(y_lo, ys[i]);
        y_hi = std::max(y_hi, ys[i]);
    }
    if (x_hi == x_lo) x_hi = x_lo + 1;
    if (y_hi == y_lo) y_hi = y_lo + 1;

    std::string data;
    std::string pts;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        data += (i ? ";" : "") + fmt(xs[i]) + "," + fmt(ys[i]);
        const double px = ml + (std::log(xs[i]) - x_lo) / (x_hi - x_lo) * (w - ml - mr);
        const double py = h - mb - (ys[i] - y_lo) / (y_hi - y_lo) * (h - mt - mb);
        pts += (i ? " " : "") + fmt(px) + "," + fmt(py);
    }

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(w) +
                      "\" height=\"" + fmt(h) + "\">\n";
    svg += "<!-- data: " + data + " -->\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<line x1=\"" + fmt(ml) + "\" y1=\"" + fmt(h - mb) + "\" x2=\"" + fmt(w - mr) +
           "\" y2=\"" + fmt(h - mb) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + fmt(ml) + "\" y1=\"" + fmt(mt) + "\" x2=\"" + fmt(ml) + "\" y2=\"" +
           fmt(h - mb) + "\" stroke=\"black\"/>\n";
    svg += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"" + pts +
           "\"/>\n";
    svg += "<text x=\"" + fmt(w / 2) + "\" y=\"" + fmt(h - 8) + "\" text-anchor=\"middle\">" +
           x_label + " (log scale)</text>\n";
    svg += "<text x=\"14\" y=\"" + fmt(h / 2) + "\" transform=\"rotate(-90 14 " + fmt(h / 2) +
           ")\" text-anchor=\"middle\">" + y_label + "</text>\n";
    svg += "</svg>\n";
    return svg;
}

void emit_report(const ordered_json& report, const RunManifest& manifest, const std::string& base,
                 const EmitFormats& formats, const std::string& csv, const std::string& svg) {
    ordered_json full = report;
    full["config_digest"] = manifest.digest;
    write_file(base + ".json", full.dump(2) + "\n");
    write_file(base + ".manifest.json", manifest.to_json().dump(2) + "\n");
    if (formats.csv && !csv.empty()) write_file(base + ".csv", csv);
    if (formats.svg && !svg.empty()) write_file(base + ".svg", svg);
}

} // namespace malign
