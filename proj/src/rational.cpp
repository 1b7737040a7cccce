#include "ctxscope/rational.hpp"

#include <cctype>
#include <cstdio>

#include "ctxscope/error.hpp"

namespace ctxscope {

namespace {

BigInt pow10(unsigned exponent) {
    BigInt result = 1;
    for (unsigned k = 0; k < exponent; ++k) {
        result *= 10;
    }
    return result;
}

bool all_digits(std::string_view s) {
    if (s.empty()) {
        return false;
    }
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            return false;
        }
    }
    return true;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

[[noreturn]] void bad_literal(std::string_view text) {
    fail(ErrorKind::Input, "not a rational literal: '" + std::string(text) + "'");
}

BigInt decimal(std::string_view digits) {
    const auto first = digits.find_first_not_of('0');
    return first == std::string_view::npos ? BigInt(0) : BigInt(std::string(digits.substr(first)));
}

BigInt parse_integer(std::string_view text, std::string_view whole) {
    bool negative = false;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    if (!all_digits(text)) {
        bad_literal(whole);
    }
    BigInt value = decimal(text);
    return negative ? BigInt(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view raw) {
    const std::string_view text = trim(raw);
    if (text.empty()) {
        bad_literal(raw);
    }

    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        const BigInt num = parse_integer(trim(text.substr(0, slash)), raw);
        const BigInt den = parse_integer(trim(text.substr(slash + 1)), raw);
        if (den == 0) {
            fail(ErrorKind::Input, "zero denominator in '" + std::string(raw) + "'");
        }
        return Rational(num, den);
    }

    std::string_view body = text;
    bool negative = false;
    if (body.front() == '-' || body.front() == '+') {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }

    long exponent = 0;
    if (const auto e = body.find_first_of("eE"); e != std::string_view::npos) {
        const BigInt exp_value = parse_integer(body.substr(e + 1), raw);
        if (exp_value > 1000 || exp_value < -1000) {
            bad_literal(raw);
        }
        exponent = exp_value.convert_to<long>();
        body = body.substr(0, e);
    }

    std::string digits;
    long fraction_digits = 0;
    if (const auto dot = body.find('.'); dot != std::string_view::npos) {
        const std::string_view int_part = body.substr(0, dot);
        const std::string_view frac_part = body.substr(dot + 1);
        if ((int_part.empty() && frac_part.empty()) || (!int_part.empty() && !all_digits(int_part)) ||
            (!frac_part.empty() && !all_digits(frac_part))) {
            bad_literal(raw);
        }
        digits = std::string(int_part) + std::string(frac_part);
        fraction_digits = static_cast<long>(frac_part.size());
    } else {
        if (!all_digits(body)) {
            bad_literal(raw);
        }
        digits = std::string(body);
    }

    Rational value{decimal(digits)};
    const long scale = exponent - fraction_digits;
    if (scale > 0) {
        value *= pow10(static_cast<unsigned>(scale));
    } else if (scale < 0) {
        value /= pow10(static_cast<unsigned>(-scale));
    }
    return negative ? Rational(-value) : value;
}

std::string to_fraction_string(const Rational& value) {
    return numerator(value).str() + "/" + denominator(value).str();
}

double to_double(const Rational& value) {
    return value.convert_to<double>();
}

std::string to_decimal_string(const Rational& value, int significant) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*g", significant, to_double(value));
    return buffer;
}

std::optional<std::string> to_exact_decimal(const Rational& value) {
    BigInt den = denominator(value);
    unsigned twos = 0;
    unsigned fives = 0;
    while (den % 2 == 0) {
        den /= 2;
        ++twos;
    }
    while (den % 5 == 0) {
        den /= 5;
        ++fives;
    }
    if (den != 1) {
        return std::nullopt;
    }
    const unsigned places = std::max(twos, fives);
    const BigInt scaled = numerator(value) * pow10(places) / denominator(value);
    const bool negative = scaled < 0;
    std::string digits = (negative ? BigInt(-scaled) : scaled).str();
    if (places > 0) {
        if (digits.size() <= places) {
            digits.insert(0, places - digits.size() + 1, '0');
        }
        digits.insert(digits.size() - places, ".");
    }
    return negative ? "-" + digits : digits;
}

std::string to_literal(const Rational& value) {
    if (auto decimal = to_exact_decimal(value)) {
        return *decimal;
    }
    return to_fraction_string(value);
}

}  // namespace ctxscope
