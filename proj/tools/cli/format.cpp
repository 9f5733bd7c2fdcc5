#include "format.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <regex>
#include <sstream>

#include "slc/errors.hpp"

namespace slc::cli {

std::string fmt_num(double x) {
    char buf[64];
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    const double a = std::abs(x);
    if (a == 0.0 || (a >= 1e-4 && a < 1e8)) {
        std::snprintf(buf, sizeof buf, "%.12f", x == 0.0 ? 0.0 : x);
    } else {
        std::snprintf(buf, sizeof buf, "%.12e", x);
    }
    return buf;
}

namespace {

double parse_number(const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + s + "'");
    }
    if (pos != s.size()) throw ConfigError("not a number: '" + s + "'");
    return v;
}

}  // namespace

double parse_angle(const std::string& text) {
    static const std::regex pi_form(R"(^\s*([0-9.eE+-]*)\s*\*?\s*pi\s*(?:/\s*([0-9.eE+]+))?\s*$)");
    std::smatch m;
    if (std::regex_match(text, m, pi_form)) {
        const double c = m[1].length() ? parse_number(m[1].str()) : 1.0;
        const double d = m[2].length() ? parse_number(m[2].str()) : 1.0;
        if (d == 0.0) throw ConfigError("division by zero in angle '" + text + "'");
        return c * std::numbers::pi / d;
    }
    return parse_number(text);
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        out.push_back(parse_angle(item));
    }
    if (out.empty()) throw ConfigError("empty list '" + text + "'");
    return out;
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace slc::cli
