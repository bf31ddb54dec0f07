#pragma once

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "icl/config.hpp"
#include "icl/critical.hpp"
#include "icl/curve.hpp"
#include "icl/errors.hpp"
#include "icl/stability.hpp"
#include "icl/steiner.hpp"
#include "icl/variations.hpp"

namespace icl {

// 17 significant digits round-trips any double and, going through to_chars,
// is locale-independent and byte-stable across runs.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// minimal JSON document with insertion-ordered objects and pinned number
// formatting (library serializers pick their own float representation, which
// would break the byte-identical-rerun contract)

class JsonNode {
public:
    static JsonNode number(double v) { return JsonNode(v); }
    static JsonNode boolean(bool v) { return JsonNode(v); }
    static JsonNode text(std::string v) { return JsonNode(std::move(v)); }
    static JsonNode array() {
        JsonNode n;
        n.value_ = Array{};
        return n;
    }
    static JsonNode object() {
        JsonNode n;
        n.value_ = Object{};
        return n;
    }

    JsonNode& push(JsonNode v) {
        std::get<Array>(value_).push_back(std::move(v));
        return *this;
    }
    JsonNode& set(std::string key, JsonNode v) {
        std::get<Object>(value_).emplace_back(std::move(key), std::move(v));
        return *this;
    }

    std::string dump(int indent = 2) const {
        std::string out;
        write(out, indent, 0);
        out.push_back('\n');
        return out;
    }

private:
    struct Array;
    struct Object;
    using Value = std::variant<double, bool, std::string, Array, Object>;
    struct Array : std::vector<JsonNode> {};
    struct Object : std::vector<std::pair<std::string, JsonNode>> {};

    JsonNode() = default;
    explicit JsonNode(double v) : value_(v) {}
    explicit JsonNode(bool v) : value_(v) {}
    explicit JsonNode(std::string v) : value_(std::move(v)) {}

    static void escape_into(std::string& out, const std::string& s) {
        out.push_back('"');
        for (char ch : s) {
            switch (ch) {
                case '"': out += "\\\""; break;
                case '\\': out += "\\\\"; break;
                case '\n': out += "\\n"; break;
                case '\t': out += "\\t"; break;
                case '\r': out += "\\r"; break;
                default:
                    if (static_cast<unsigned char>(ch) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
                        out += buf;
                    } else {
                        out.push_back(ch);
                    }
            }
        }
        out.push_back('"');
    }

    void write(std::string& out, int indent, int depth) const {
        const std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
        const std::string close_pad(static_cast<std::size_t>(indent) * depth, ' ');
        if (const double* d = std::get_if<double>(&value_)) {
            out += format_double(*d);
        } else if (const bool* b = std::get_if<bool>(&value_)) {
            out += *b ? "true" : "false";
        } else if (const std::string* s = std::get_if<std::string>(&value_)) {
            escape_into(out, *s);
        } else if (const Array* arr = std::get_if<Array>(&value_)) {
            if (arr->empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < arr->size(); ++i) {
                out += pad;
                (*arr)[i].write(out, indent, depth + 1);
                out += (i + 1 < arr->size()) ? ",\n" : "\n";
            }
            out += close_pad + "]";
        } else if (const Object* obj = std::get_if<Object>(&value_)) {
            if (obj->empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            for (std::size_t i = 0; i < obj->size(); ++i) {
                out += pad;
                escape_into(out, (*obj)[i].first);
                out += ": ";
                (*obj)[i].second.write(out, indent, depth + 1);
                out += (i + 1 < obj->size()) ? ",\n" : "\n";
            }
            out += close_pad + "}";
        }
    }

    Value value_;
};

// ---------------------------------------------------------------------------
// file plumbing

inline std::filesystem::path output_directory(const RunConfig& config) {
    std::filesystem::path dir = config.output_dir;
    if (const char* env = std::getenv("ICL_OUTPUT_DIR"); env != nullptr && *env != '\0')
        dir = env;
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << content;
}

inline std::string csv_table(const std::vector<std::string>& header,
                             const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        out += header[i];
        out.push_back(i + 1 < header.size() ? ',' : '\n');
    }
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out += format_double(row[i]);
            out.push_back(i + 1 < row.size() ? ',' : '\n');
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// schema builders

inline std::string curve_csv(const DiscreteCurve& curve) {
    std::string out = "s,x,y\n";
    for (std::size_t i = 0; i < curve.s.size(); ++i) {
        out += format_double(curve.s[i]);
        out.push_back(',');
        out += format_double(curve.pts[i].x);
        out.push_back(',');
        out += format_double(curve.pts[i].y);
        out.push_back('\n');
    }
    return out;
}

inline JsonNode curve_json(const DiscreteCurve& curve) {
    JsonNode samples = JsonNode::array();
    for (std::size_t i = 0; i < curve.s.size(); ++i) {
        JsonNode row = JsonNode::array();
        row.push(JsonNode::number(curve.s[i]))
            .push(JsonNode::number(curve.pts[i].x))
            .push(JsonNode::number(curve.pts[i].y));
        samples.push(std::move(row));
    }
    JsonNode doc = JsonNode::object();
    doc.set("x0", JsonNode::number(curve.x0))
        .set("L", JsonNode::number(curve.L_half))
        .set("samples", std::move(samples));
    return doc;
}

inline JsonNode critical_report_json(const CriticalParams& params, double el_res,
                                     double hk_ratio) {
    JsonNode doc = JsonNode::object();
    doc.set("sigma", JsonNode::number(params.sigma))
        .set("kappa", JsonNode::number(params.kappa))
        .set("lambda", JsonNode::number(params.lambda))
        .set("area", JsonNode::number(area_closed_form(params)))
        .set("F", JsonNode::number(f_closed_form(params)))
        .set("el_residual", JsonNode::number(el_res))
        .set("hk_ratio", JsonNode::number(hk_ratio));
    return doc;
}

inline JsonNode stability_report_json(const StabilityReport& report) {
    JsonNode trace = JsonNode::array();
    for (const RegimeTraceEntry& entry : report.regime_trace) {
        JsonNode row = JsonNode::object();
        row.set("mu", JsonNode::number(entry.mu))
            .set("regime", JsonNode::text(regime_name(entry.regime)))
            .set("det", JsonNode::number(entry.det));
        trace.push(std::move(row));
    }
    JsonNode doc = JsonNode::object();
    doc.set("ratio", JsonNode::number(report.ratio))
        .set("mu0", JsonNode::number(report.mu0))
        .set("mu_w1_det", JsonNode::number(report.mu_w1_det))
        .set("mu_w1_rayleigh", JsonNode::number(report.mu_w1_rayleigh))
        .set("coercivity", JsonNode::number(report.coercivity))
        .set("regime_trace", std::move(trace))
        .set("pass", JsonNode::boolean(report.pass));
    return doc;
}

inline JsonNode variation_check_json(const VariationCheckReport& report) {
    JsonNode doc = JsonNode::object();
    doc.set("analytic", JsonNode::number(report.analytic))
        .set("finite_difference", JsonNode::number(report.finite_difference))
        .set("abs_err", JsonNode::number(report.abs_err))
        .set("rel_err", JsonNode::number(report.rel_err))
        .set("fd_step", JsonNode::number(report.fd_step));
    return doc;
}

inline JsonNode steiner_comparison_json(const FunctionalComparison& cmp) {
    JsonNode doc = JsonNode::object();
    doc.set("A_before", JsonNode::number(cmp.A_before))
        .set("A_after", JsonNode::number(cmp.A_after))
        .set("F_before", JsonNode::number(cmp.F_before))
        .set("F_after", JsonNode::number(cmp.F_after))
        .set("window_lo", JsonNode::number(cmp.window_lo))
        .set("window_hi", JsonNode::number(cmp.window_hi));
    return doc;
}

}  // namespace icl
