#pragma once

#include <cstdio>
#include <string>

namespace seleval::detail {

// %.Ng formatting without locale surprises; all file outputs go through
// these so identical inputs yield byte-identical files.
inline std::string format_g(double v, int sig_digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", sig_digits, v);
    return buf;
}

// 12 significant digits: the precision of curve CSVs and score tables.
inline std::string sig12(double v) { return format_g(v, 12); }

// 17 significant digits round-trip any double exactly.
inline std::string exact(double v) { return format_g(v, 17); }

}  // namespace seleval::detail
