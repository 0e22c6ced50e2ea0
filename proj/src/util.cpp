#include "gafzero/util.hpp"

#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace gafzero {

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(text.substr(start));
            return out;
        }
        out.emplace_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_double_strict(std::string_view text, const std::string& what) {
    const std::string s(text);
    if (s.empty()) throw std::invalid_argument(what + ": empty number");
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) throw std::invalid_argument(what + ": bad number '" + s + "'");
    return v;
}

long long parse_int_strict(std::string_view text, const std::string& what) {
    const std::string s(text);
    if (s.empty()) throw std::invalid_argument(what + ": empty integer");
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size()) throw std::invalid_argument(what + ": bad integer '" + s + "'");
    return v;
}

}  // namespace gafzero
