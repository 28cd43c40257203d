#include "rdlab/report.hpp"

#include "rdlab/errors.hpp"

#include "json.hpp"

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>

namespace rdlab {

namespace {

using nlohmann::json;

std::string shortest(double x) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc{})
        throw ReportError("number formatting failed");
    return std::string(buf, p);
}

json series_json(const Series& s) {
    json j;
    j["name"] = s.name;
    j["quantity"] = s.quantity;
    j["points"] = s.t.size();
    j["file"] = s.name + ".csv";
    return j;
}

json fit_json(const FitRow& f) {
    json j;
    j["series"] = f.series;
    j["slope"] = f.slope;
    j["intercept"] = f.intercept;
    j["r_squared"] = f.r_squared;
    j["window"] = {f.window_lo, f.window_hi};
    j["log_correction"] = f.log_correction;
    return j;
}

json check_json(const CheckResult& c) {
    json j;
    j["name"] = c.name;
    j["claim"] = c.claim;
    j["measured"] = c.measured;
    j["expected"] = c.expected;
    j["tolerance"] = c.tolerance;
    j["pass"] = c.pass;
    return j;
}

json report_json(const Report& r, bool zero_wall) {
    json j;
    j["schema_version"] = 1;
    j["scenario"] = r.scenario;
    j["config_digest"] = r.config_digest;
    j["config"] = r.config_text;
    j["wall_seconds"] = zero_wall ? 0.0 : r.wall_seconds;
    j["all_pass"] = r.all_pass();
    j["series"] = json::array();
    for (const auto& s : r.series)
        j["series"].push_back(series_json(s));
    j["fits"] = json::array();
    for (const auto& f : r.fits)
        j["fits"].push_back(fit_json(f));
    j["checks"] = json::array();
    for (const auto& c : r.checks)
        j["checks"].push_back(check_json(c));
    j["scalars"] = json::object();
    for (const auto& [k, v] : r.scalars)
        j["scalars"][k] = v;
    return j;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ReportError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out)
        throw ReportError("write failed for " + path.string());
}

std::string series_csv(const Series& s) {
    if (!s.envelope.empty() && s.envelope.size() != s.t.size())
        throw ReportError("series " + s.name + ": envelope length mismatch");
    if (s.value.size() != s.t.size())
        throw ReportError("series " + s.name + ": value length mismatch");
    std::string out = s.envelope.empty() ? "t,value\n" : "t,value,envelope\n";
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        out += shortest(s.t[i]);
        out += ',';
        out += shortest(s.value[i]);
        if (!s.envelope.empty()) {
            out += ',';
            out += shortest(s.envelope[i]);
        }
        out += '\n';
    }
    return out;
}

std::string plot_script(const Report& r) {
    std::string gp;
    gp += "set datafile separator ','\n";
    gp += "set key top right\n";
    gp += "set logscale xy\n";
    gp += "set xlabel 't'\n";
    bool first = true;
    for (const auto& s : r.series) {
        if (s.t.size() < 2 || s.t.front() <= 0.0)
            continue; // profile-style series (abscissa not time) have their own csv
        gp += first ? "plot " : ", \\\n     ";
        first = false;
        gp += "'" + s.name + ".csv' using 1:2 with lines title '" + s.quantity + "'";
        if (!s.envelope.empty())
            gp += ", \\\n     '" + s.name + ".csv' using 1:3 with lines dt 2 title '" + s.name +
                  " fit'";
    }
    gp += "\n";
    return gp;
}

} // namespace

bool Report::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass)
            return false;
    return true;
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    static const char* digits = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = digits[h & 0xf];
        h >>= 4;
    }
    buf[16] = '\0';
    return std::string(buf, 16);
}

std::string determinism_digest(const Report& r) {
    // wall time is the only run-to-run varying field; hash everything else,
    // including the full numeric content of every series
    std::string blob = report_json(r, true).dump();
    for (const auto& s : r.series)
        blob += series_csv(s);
    return fnv1a_hex(blob);
}

void emit(const Report& r, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::path root(dir);
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec)
        throw ReportError("cannot create output directory " + root.string());

    // a re-emit must leave exactly this report's files behind
    for (const auto& entry : fs::directory_iterator(root, ec)) {
        if (!entry.is_regular_file())
            continue;
        const fs::path& p = entry.path();
        if (p.extension() == ".csv" || p.filename() == "report.json" ||
            p.filename() == "plot.gp")
            fs::remove(p, ec);
    }

    json j = report_json(r, false);
    j["determinism_digest"] = determinism_digest(r);
    write_file(root / "report.json", j.dump(2) + "\n");

    for (const auto& s : r.series)
        write_file(root / (s.name + ".csv"), series_csv(s));

    if (!r.series.empty())
        write_file(root / "plot.gp", plot_script(r));
}

} // namespace rdlab
