#pragma once

// Deterministic text output: reals in scientific notation with 17 significant digits, JSON with
// sorted keys, CSV with a fixed header.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "singtrack/core/errors.hpp"

namespace singtrack::io {

using json = nlohmann::json;

inline std::string fmt_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0) x = 0;  // drop the sign of -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

namespace detail {

inline void write_json(std::ostream& os, const json& j, int indent, int depth) {
    auto nl = [&](int d) {
        if (indent < 0) return;
        os << '\n' << std::string(size_t(indent * d), ' ');
    };
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) os << ',';
            first = false;
            nl(depth + 1);
            os << json(it.key()).dump() << (indent < 0 ? ":" : ": ");
            write_json(os, it.value(), indent, depth + 1);
        }
        nl(depth);
        os << '}';
        return;
    }
    case json::value_t::array: {
        if (j.empty()) {
            os << "[]";
            return;
        }
        // arrays of scalars stay on one line
        bool flat = true;
        for (const auto& v : j) flat = flat && !v.is_structured();
        os << '[';
        for (size_t i = 0; i < j.size(); ++i) {
            if (i) os << (flat ? ", " : ",");
            if (!flat) nl(depth + 1);
            write_json(os, j[i], indent, depth + 1);
        }
        if (!flat) nl(depth);
        os << ']';
        return;
    }
    case json::value_t::number_float: {
        double x = j.get<double>();
        // JSON has no NaN/Inf; write them as strings
        if (!std::isfinite(x)) os << '"' << fmt_real(x) << '"';
        else os << fmt_real(x);
        return;
    }
    default: os << j.dump();
    }
}

}  // namespace detail

inline std::string dump_json(const json& j, int indent = 2) {
    std::ostringstream os;
    detail::write_json(os, j, indent, 0);
    os << '\n';
    return os.str();
}

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    explicit Csv(std::vector<std::string> h) : header(std::move(h)) {}

    void add(std::vector<std::string> row) {
        if (row.size() != header.size()) throw Error(ErrorKind::InternalInconsistency, "csv row width mismatch");
        rows.push_back(std::move(row));
    }
    std::string str() const {
        std::string s;
        auto line = [&](const std::vector<std::string>& r) {
            for (size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + r[i];
            s += '\n';
        };
        line(header);
        for (const auto& r : rows) line(r);
        return s;
    }
};

// FNV-1a 64, hex.
inline std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline void write_file(const std::string& path, const std::string& data) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::StudyFailed, "cannot write " + path);
    f << data;
}

}  // namespace singtrack::io
