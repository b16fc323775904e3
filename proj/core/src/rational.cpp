#include "mdms/rational.hpp"

#include "mdms/errors.hpp"

namespace mdms {

namespace {

BigInt parse_bigint(const std::string& text) {
    if (text.empty()) throw SpecError("empty integer literal");
    std::size_t i = (text[0] == '-' || text[0] == '+') ? 1 : 0;
    if (i == text.size()) throw SpecError("sign without digits in '" + text + "'");
    for (; i < text.size(); ++i)
        if (text[i] < '0' || text[i] > '9')
            throw SpecError("invalid integer literal '" + text + "'");
    return BigInt(text);
}

}  // namespace

Rational parse_rational(const std::string& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos) return Rational(parse_bigint(text));
    BigInt num = parse_bigint(text.substr(0, slash));
    BigInt den = parse_bigint(text.substr(slash + 1));
    if (den == 0) throw SpecError("zero denominator in '" + text + "'");
    return Rational(num, den);
}

std::string rational_to_string(const Rational& value) {
    std::string num = numerator(value).str();
    BigInt den = denominator(value);
    if (den == 1) return num;
    return num + "/" + den.str();
}

std::string bigint_to_string(const BigInt& value) { return value.str(); }

BigInt rational_floor(const Rational& value) {
    return numerator(value) / denominator(value);
}

}  // namespace mdms
