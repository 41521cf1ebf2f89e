#include "report_json.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace pwcalc::cli {

std::string format_double(double v) {
    if (!std::isfinite(v)) throw std::logic_error("non-finite value reached the JSON writer");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}

namespace {

bool is_scalar(const Json& j) { return !j.is_object() && !j.is_array(); }

void write(const Json& j, std::string& out, int depth) {
    const std::string pad(2 * static_cast<std::size_t>(depth), ' ');
    const std::string inner(2 * static_cast<std::size_t>(depth + 1), ' ');
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (const auto& [k, v] : j.items()) {
            if (!first) out += ",\n";
            first = false;
            out += inner + Json(k).dump() + ": ";
            write(v, out, depth + 1);
        }
        out += "\n" + pad + "}";
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        bool flat = true;
        for (const auto& v : j) flat = flat && is_scalar(v);
        if (flat) {
            out += "[";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ", ";
                write(j[i], out, depth + 1);
            }
            out += "]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) out += ",\n";
            out += inner;
            write(j[i], out, depth + 1);
        }
        out += "\n" + pad + "]";
        return;
    }
    case Json::value_t::number_float: out += format_double(j.get<double>()); return;
    default: out += j.dump(); return;
    }
}

} // namespace

std::string dump(const Json& j) {
    std::string out;
    write(j, out, 0);
    out += "\n";
    return out;
}

} // namespace pwcalc::cli
