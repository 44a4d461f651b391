#pragma once

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <string>
#include <string_view>

#include "cdrb/errors.hpp"

namespace cdrb {

/// Shortest decimal form that round-trips a double exactly.
inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Whitespace-token scanner for the text file formats. Every failure throws
/// IoError tagged with the reader's context string.
class TokenReader {
public:
    TokenReader(std::istream& in, std::string context)
        : in_(in), ctx_(std::move(context)) {}

    std::string token() {
        std::string t;
        if (!(in_ >> t)) throw IoError(ctx_ + ": unexpected end of file");
        return t;
    }

    void expect(std::string_view kw) {
        std::string t = token();
        if (t != kw)
            throw IoError(ctx_ + ": expected '" + std::string(kw) + "', got '" + t + "'");
    }

    long long integer() {
        std::string t = token();
        char* end = nullptr;
        long long v = std::strtoll(t.c_str(), &end, 10);
        if (end != t.c_str() + t.size())
            throw IoError(ctx_ + ": expected integer, got '" + t + "'");
        return v;
    }

    double real() {
        std::string t = token();
        char* end = nullptr;
        double v = std::strtod(t.c_str(), &end);
        if (end != t.c_str() + t.size())
            throw IoError(ctx_ + ": expected number, got '" + t + "'");
        return v;
    }

private:
    std::istream& in_;
    std::string ctx_;
};

}  // namespace cdrb
