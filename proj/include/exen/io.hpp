#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "exen/error.hpp"
#include "exen/resample.hpp"
#include "exen/shape.hpp"

namespace exen {

// ---------------------------------------------------------------------------
// Numeric rendering. Values carry 17 significant digits so that every
// serialized double parses back to the identical bit pattern; labels (alpha
// keys, column suffixes) use the shortest exact representation instead.
// ---------------------------------------------------------------------------

inline std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_shortest(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::optional<double> parse_double(std::string_view field) {
    field = trim(field);
    if (field.empty()) return std::nullopt;
    double value{};
    const char* first = field.data();
    const char* last = field.data() + field.size();
    if (*first == '+') ++first; // from_chars rejects an explicit plus
    auto r = std::from_chars(first, last, value);
    if (r.ec != std::errc{} || r.ptr != last) return std::nullopt;
    if (!std::isfinite(value)) return std::nullopt;
    return value;
}

inline std::optional<std::uint64_t> parse_u64(std::string_view field) {
    field = trim(field);
    if (field.empty()) return std::nullopt;
    std::uint64_t value{};
    auto r = std::from_chars(field.data(), field.data() + field.size(), value);
    if (r.ec != std::errc{} || r.ptr != field.data() + field.size()) return std::nullopt;
    return value;
}

// Quote-aware CSV splitter; doubled quotes inside quoted fields unescape.
inline std::vector<std::string> split_csv(std::string_view line, std::size_t lineno) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw ParseError(lineno, "unterminated quoted field");
    out.push_back(std::move(cur));
    return out;
}

inline std::string csv_escape(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string json_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out += c;
            }
        }
    }
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Landmark files. Comma-separated UTF-8 text, LF or CRLF line endings,
// required header x1,y1,...,xk,yk, one observation per row, no missing
// values. Decimal or scientific notation.
// ---------------------------------------------------------------------------

struct LandmarkTable {
    std::vector<KAd> observations;
    std::vector<std::string> labels; // optional; empty or one per observation

    std::size_t k() const { return observations.empty() ? 0 : observations.front().k(); }
    std::size_t size() const { return observations.size(); }
};

inline LandmarkTable parse_landmark_file(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    std::size_t k = 0;
    bool header_seen = false;
    LandmarkTable table;

    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv = detail::trim(line);
        if (sv.empty()) continue;
        std::vector<std::string> fields = detail::split_csv(sv, lineno);

        if (!header_seen) {
            if (fields.size() % 2 != 0)
                throw ParseError(lineno, "header must list x/y column pairs");
            k = fields.size() / 2;
            if (k < 3) throw ParseError(lineno, "need at least 3 landmarks, header lists " +
                                                    std::to_string(k));
            for (std::size_t j = 0; j < k; ++j) {
                const std::string ex = "x" + std::to_string(j + 1);
                const std::string ey = "y" + std::to_string(j + 1);
                if (detail::trim(fields[2 * j]) != ex || detail::trim(fields[2 * j + 1]) != ey)
                    throw ParseError(lineno, "header must read x1,y1,...,xk,yk (found '" +
                                                 fields[2 * j] + "' where '" + ex + "' expected)");
            }
            header_seen = true;
            continue;
        }

        if (fields.size() != 2 * k)
            throw ParseError(lineno, "expected " + std::to_string(2 * k) + " fields, got " +
                                         std::to_string(fields.size()));
        ComplexVector pts(k);
        for (std::size_t j = 0; j < k; ++j) {
            const auto x = detail::parse_double(fields[2 * j]);
            const auto y = detail::parse_double(fields[2 * j + 1]);
            if (!x || !y)
                throw ParseError(lineno, "field " + std::to_string((x ? 2 * j + 1 : 2 * j) + 1) +
                                             " is not a finite number");
            pts[j] = {*x, *y};
        }
        table.observations.emplace_back(std::move(pts));
    }

    if (!header_seen) throw ParseError(lineno == 0 ? 1 : lineno, "missing header row");
    if (table.observations.empty()) throw ParseError(lineno, "no observations");
    return table;
}

inline LandmarkTable parse_landmark_file(const std::string& text) {
    std::istringstream in(text);
    return parse_landmark_file(in);
}

inline LandmarkTable load_landmark_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("cannot open landmark file: " + path.string());
    try {
        return parse_landmark_file(in);
    } catch (const ParseError& e) {
        throw ParseError(e.line(), path.string() + ": " + e.what());
    }
}

inline std::string write_landmarks(const LandmarkTable& table) {
    if (table.observations.empty()) throw InvalidInputError("cannot write an empty landmark table");
    const std::size_t k = table.k();
    std::string out;
    for (std::size_t j = 0; j < k; ++j) {
        if (j) out += ',';
        out += "x" + std::to_string(j + 1) + ",y" + std::to_string(j + 1);
    }
    out += '\n';
    for (const KAd& kad : table.observations) {
        if (kad.k() != k) throw InvalidInputError("landmark table mixes k");
        for (std::size_t j = 0; j < k; ++j) {
            if (j) out += ',';
            out += format_g17(kad[j].real());
            out += ',';
            out += format_g17(kad[j].imag());
        }
        out += '\n';
    }
    return out;
}

/// Two landmark groups to be compared; both must share one k.
struct GroupedDataset {
    LandmarkTable group_a;
    LandmarkTable group_b;
    std::pair<std::string, std::string> names;
};

inline GroupedDataset load_grouped_dataset(const std::filesystem::path& path_a,
                                           const std::filesystem::path& path_b) {
    GroupedDataset ds{load_landmark_file(path_a), load_landmark_file(path_b),
                      {path_a.stem().string(), path_b.stem().string()}};
    if (ds.group_a.k() != ds.group_b.k())
        throw InvalidInputError("landmark count mismatch: " + path_a.string() + " has k=" +
                                std::to_string(ds.group_a.k()) + ", " + path_b.string() +
                                " has k=" + std::to_string(ds.group_b.k()));
    return ds;
}

// ---------------------------------------------------------------------------
// Test reports. One flat record per run, serializable as JSON or CSV with
// identical field values; parsing either form recovers every field exactly.
// ---------------------------------------------------------------------------

enum class ReportFormat { json, csv };

struct ReportData {
    int schema_version = 1;
    std::string command;          // "test" | "simulate"
    std::string method;           // "bootstrap" | "permutation"
    std::string metric;           // "vw" | "vw-squared" | "euclidean"
    double alpha = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::uint64_t n1 = 0;
    std::uint64_t n2 = 0;
    std::uint64_t k = 0;
    std::optional<double> sigma;  // simulate only
    std::string input_a;          // file path or contour kind
    std::string input_b;
    double t_observed = 0.0;
    double energy = 0.0;
    double cross_mean = 0.0;
    double within_x_mean = 0.0;
    double within_y_mean = 0.0;
    double p_value = 0.0;
    std::vector<std::pair<double, double>> critical_values; // (alpha, value), alpha ascending
    bool reject = false;
};

/// Run metadata the statistical result does not carry itself.
struct RunInfo {
    std::string command;
    std::string metric;
    std::string input_a;
    std::string input_b;
    std::uint64_t seed = 0;
    std::size_t k = 0;
    std::optional<double> sigma;
};

inline ReportData make_report(const TwoSampleResult& result, const RunInfo& info) {
    ReportData d;
    d.command = info.command;
    d.method = result.calibration.plan.method == ResampleMethod::bootstrap_with_replacement
                   ? "bootstrap"
                   : "permutation";
    d.metric = info.metric;
    d.alpha = result.alpha;
    d.trials = result.calibration.plan.trials;
    d.seed = info.seed;
    d.n1 = result.report.n1;
    d.n2 = result.report.n2;
    d.k = info.k;
    d.sigma = info.sigma;
    d.input_a = info.input_a;
    d.input_b = info.input_b;
    d.t_observed = result.calibration.t_observed;
    d.energy = result.report.energy;
    d.cross_mean = result.report.cross_mean;
    d.within_x_mean = result.report.within_x_mean;
    d.within_y_mean = result.report.within_y_mean;
    d.p_value = result.calibration.p_value;
    for (const auto& [a, c] : result.calibration.critical_values) d.critical_values.emplace_back(a, c);
    d.reject = result.reject;
    return d;
}

inline std::string write_report_json(const ReportData& d) {
    std::string out = "{\n";
    auto str = [&](const char* key, const std::string& v) {
        out += "  \"" + std::string(key) + "\": \"" + detail::json_escape(v) + "\",\n";
    };
    auto raw = [&](const char* key, const std::string& v) {
        out += "  \"" + std::string(key) + "\": " + v + ",\n";
    };
    raw("schema_version", std::to_string(d.schema_version));
    str("command", d.command);
    str("method", d.method);
    str("metric", d.metric);
    raw("alpha", format_g17(d.alpha));
    raw("trials", std::to_string(d.trials));
    raw("seed", std::to_string(d.seed));
    raw("n1", std::to_string(d.n1));
    raw("n2", std::to_string(d.n2));
    raw("k", std::to_string(d.k));
    if (d.sigma) raw("sigma", format_g17(*d.sigma));
    str("input_a", d.input_a);
    str("input_b", d.input_b);
    raw("t_observed", format_g17(d.t_observed));
    raw("energy", format_g17(d.energy));
    raw("cross_mean", format_g17(d.cross_mean));
    raw("within_x_mean", format_g17(d.within_x_mean));
    raw("within_y_mean", format_g17(d.within_y_mean));
    raw("p_value", format_g17(d.p_value));
    out += "  \"critical_values\": {";
    for (std::size_t i = 0; i < d.critical_values.size(); ++i) {
        if (i) out += ", ";
        out += "\"" + format_shortest(d.critical_values[i].first) +
               "\": " + format_g17(d.critical_values[i].second);
    }
    out += "},\n";
    out += std::string("  \"reject\": ") + (d.reject ? "true" : "false") + "\n";
    out += "}\n";
    return out;
}

inline std::string write_report_csv(const ReportData& d) {
    std::string header = "schema_version,command,method,metric,alpha,trials,seed,n1,n2,k,sigma,"
                         "input_a,input_b,t_observed,energy,cross_mean,within_x_mean,"
                         "within_y_mean,p_value,reject";
    std::string row;
    auto add = [&row](const std::string& v) {
        if (!row.empty()) row += ',';
        row += v;
    };
    add(std::to_string(d.schema_version));
    add(detail::csv_escape(d.command));
    add(detail::csv_escape(d.method));
    add(detail::csv_escape(d.metric));
    add(format_g17(d.alpha));
    add(std::to_string(d.trials));
    add(std::to_string(d.seed));
    add(std::to_string(d.n1));
    add(std::to_string(d.n2));
    add(std::to_string(d.k));
    add(d.sigma ? format_g17(*d.sigma) : "");
    add(detail::csv_escape(d.input_a));
    add(detail::csv_escape(d.input_b));
    add(format_g17(d.t_observed));
    add(format_g17(d.energy));
    add(format_g17(d.cross_mean));
    add(format_g17(d.within_x_mean));
    add(format_g17(d.within_y_mean));
    add(format_g17(d.p_value));
    add(d.reject ? "true" : "false");
    for (const auto& [a, c] : d.critical_values) {
        header += ",critical_value_" + format_shortest(a);
        add(format_g17(c));
    }
    return header + "\n" + row + "\n";
}

inline std::string write_report(const ReportData& d, ReportFormat format) {
    return format == ReportFormat::json ? write_report_json(d) : write_report_csv(d);
}

inline std::string write_report(const TwoSampleResult& result, const RunInfo& info,
                                ReportFormat format) {
    return write_report(make_report(result, info), format);
}

inline ReportData parse_report_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(1, std::string("invalid report JSON: ") + e.what());
    }
    try {
        ReportData d;
        d.schema_version = j.at("schema_version").get<int>();
        d.command = j.at("command").get<std::string>();
        d.method = j.at("method").get<std::string>();
        d.metric = j.at("metric").get<std::string>();
        d.alpha = j.at("alpha").get<double>();
        d.trials = j.at("trials").get<std::uint64_t>();
        d.seed = j.at("seed").get<std::uint64_t>();
        d.n1 = j.at("n1").get<std::uint64_t>();
        d.n2 = j.at("n2").get<std::uint64_t>();
        d.k = j.at("k").get<std::uint64_t>();
        if (j.contains("sigma")) d.sigma = j.at("sigma").get<double>();
        d.input_a = j.at("input_a").get<std::string>();
        d.input_b = j.at("input_b").get<std::string>();
        d.t_observed = j.at("t_observed").get<double>();
        d.energy = j.at("energy").get<double>();
        d.cross_mean = j.at("cross_mean").get<double>();
        d.within_x_mean = j.at("within_x_mean").get<double>();
        d.within_y_mean = j.at("within_y_mean").get<double>();
        d.p_value = j.at("p_value").get<double>();
        for (const auto& [key, value] : j.at("critical_values").items()) {
            const auto a = detail::parse_double(key);
            if (!a) throw ParseError(1, "bad critical value key: " + key);
            d.critical_values.emplace_back(*a, value.get<double>());
        }
        std::sort(d.critical_values.begin(), d.critical_values.end());
        d.reject = j.at("reject").get<bool>();
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(1, std::string("report JSON missing or mistyped field: ") + e.what());
    }
}

inline ReportData parse_report_csv(const std::string& text) {
    std::istringstream in(text);
    std::string header_line, row_line;
    if (!std::getline(in, header_line)) throw ParseError(1, "empty report");
    if (!std::getline(in, row_line)) throw ParseError(2, "report has no data row");
    const auto names = detail::split_csv(detail::trim(header_line), 1);
    const auto values = detail::split_csv(detail::trim(row_line), 2);
    if (names.size() != values.size())
        throw ParseError(2, "report header and row have different field counts");

    ReportData d;
    auto need_double = [](const std::string& name, const std::string& v) {
        const auto x = detail::parse_double(v);
        if (!x) throw ParseError(2, "field " + name + " is not a number");
        return *x;
    };
    auto need_u64 = [](const std::string& name, const std::string& v) {
        const auto x = detail::parse_u64(v);
        if (!x) throw ParseError(2, "field " + name + " is not a nonnegative integer");
        return *x;
    };
    for (std::size_t i = 0; i < names.size(); ++i) {
        const std::string& name = names[i];
        const std::string& v = values[i];
        if (name == "schema_version") d.schema_version = static_cast<int>(need_u64(name, v));
        else if (name == "command") d.command = v;
        else if (name == "method") d.method = v;
        else if (name == "metric") d.metric = v;
        else if (name == "alpha") d.alpha = need_double(name, v);
        else if (name == "trials") d.trials = need_u64(name, v);
        else if (name == "seed") d.seed = need_u64(name, v);
        else if (name == "n1") d.n1 = need_u64(name, v);
        else if (name == "n2") d.n2 = need_u64(name, v);
        else if (name == "k") d.k = need_u64(name, v);
        else if (name == "sigma") { if (!detail::trim(v).empty()) d.sigma = need_double(name, v); }
        else if (name == "input_a") d.input_a = v;
        else if (name == "input_b") d.input_b = v;
        else if (name == "t_observed") d.t_observed = need_double(name, v);
        else if (name == "energy") d.energy = need_double(name, v);
        else if (name == "cross_mean") d.cross_mean = need_double(name, v);
        else if (name == "within_x_mean") d.within_x_mean = need_double(name, v);
        else if (name == "within_y_mean") d.within_y_mean = need_double(name, v);
        else if (name == "p_value") d.p_value = need_double(name, v);
        else if (name == "reject") d.reject = (detail::trim(v) == "true");
        else if (name.rfind("critical_value_", 0) == 0) {
            const auto a = detail::parse_double(name.substr(15));
            if (!a) throw ParseError(1, "bad critical value column: " + name);
            d.critical_values.emplace_back(*a, need_double(name, v));
        } else {
            throw ParseError(1, "unknown report column: " + name);
        }
    }
    std::sort(d.critical_values.begin(), d.critical_values.end());
    return d;
}

inline ReportData parse_report(const std::string& text, ReportFormat format) {
    return format == ReportFormat::json ? parse_report_json(text) : parse_report_csv(text);
}

} // namespace exen
