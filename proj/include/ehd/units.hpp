#pragma once

#include <charconv>
#include <string>
#include <string_view>

#include "ehd/errors.hpp"

// Unit handling at the program boundary. Everything inside the library is SI;
// quantities cross the boundary as "<number><suffix>" strings ("5.2kV",
// "260uN", "37mg") and CSV column names carry their unit ("voltage_kV").

namespace ehd::units {

enum class Dimension { voltage, current, force, mass, length, time };

/// Scale factor to SI for a unit suffix of the given dimension.
inline double suffix_scale(std::string_view suffix, Dimension dim) {
    switch (dim) {
        case Dimension::voltage:
            if (suffix == "V") return 1.0;
            if (suffix == "kV") return 1e3;
            break;
        case Dimension::current:
            if (suffix == "A") return 1.0;
            if (suffix == "mA") return 1e-3;
            if (suffix == "uA") return 1e-6;
            break;
        case Dimension::force:
            if (suffix == "N") return 1.0;
            if (suffix == "mN") return 1e-3;
            if (suffix == "uN") return 1e-6;
            break;
        case Dimension::mass:
            if (suffix == "kg") return 1.0;
            if (suffix == "g") return 1e-3;
            if (suffix == "mg") return 1e-6;
            break;
        case Dimension::length:
            if (suffix == "m") return 1.0;
            if (suffix == "mm") return 1e-3;
            break;
        case Dimension::time:
            if (suffix == "s") return 1.0;
            if (suffix == "ms") return 1e-3;
            break;
    }
    throw Error(ErrorCode::unit_error,
                "unknown unit suffix '" + std::string(suffix) + "'");
}

/// Strict decimal parse; the whole view must be consumed.
inline double parse_number(std::string_view text) {
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw Error(ErrorCode::parse_error,
                    "not a number: '" + std::string(text) + "'");
    return value;
}

/// Parses "<number>[suffix]" into SI. A bare number is taken as already SI.
inline double parse_quantity(std::string_view text, Dimension dim) {
    std::size_t split = text.size();
    while (split > 0) {
        const char c = text[split - 1];
        if ((c >= '0' && c <= '9') || c == '.' || c == '+' || c == '-' || c == 'e' ||
            c == 'E')
            break;
        --split;
    }
    // "1e3" ends in a digit; "5.2kV" splits before 'k'. An exponent's 'e' is
    // preceded by a digit or '.', a suffix letter is not.
    const std::string_view number = text.substr(0, split);
    const std::string_view suffix = text.substr(split);
    if (number.empty())
        throw Error(ErrorCode::parse_error,
                    "no numeric value in '" + std::string(text) + "'");
    const double value = parse_number(number);
    if (suffix.empty()) return value;
    return value * suffix_scale(suffix, dim);
}

/// Shortest decimal form that parses back to the identical double; this is
/// the canonical on-disk number format, so emit-parse cycles are byte-stable.
inline std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace ehd::units
