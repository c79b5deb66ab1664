#include "oretile/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace oretile {

Integer floor_rat(const Rational& r)
{
    Integer n = numer(r), d = denom(r);
    Integer q = n / d;
    if (n < 0 && q * d != n)
        q -= 1;
    return q;
}

Integer ceil_rat(const Rational& r) { return -floor_rat(-r); }

Rational parse_rational(const std::string& raw)
{
    std::string text;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c)))
            text += c;
    if (text.empty())
        throw std::invalid_argument("empty rational literal");

    auto slash = text.find('/');
    if (slash != std::string::npos) {
        Rational num = parse_rational(text.substr(0, slash));
        Rational den = parse_rational(text.substr(slash + 1));
        if (den == 0)
            throw std::invalid_argument("zero denominator in '" + raw + "'");
        return num / den;
    }

    std::size_t pos = 0;
    bool neg = false;
    if (text[pos] == '+' || text[pos] == '-')
        neg = text[pos++] == '-';

    Integer mant = 0;
    Integer scale = 1;
    bool seen_digit = false, seen_dot = false;
    for (; pos < text.size(); ++pos) {
        char c = text[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            mant = mant * 10 + (c - '0');
            if (seen_dot)
                scale *= 10;
            seen_digit = true;
        }
        else if (c == '.' && ! seen_dot)
            seen_dot = true;
        else
            break;
    }
    if (! seen_digit)
        throw std::invalid_argument("malformed rational literal '" + raw + "'");

    Rational value(mant, scale);
    if (pos < text.size()) {
        if (text[pos] != 'e' && text[pos] != 'E')
            throw std::invalid_argument("malformed rational literal '" + raw + "'");
        std::string exp_text = text.substr(pos + 1);
        std::size_t used = 0;
        int e = 0;
        try {
            e = std::stoi(exp_text, &used);
        }
        catch (const std::exception&) {
            throw std::invalid_argument("malformed exponent in '" + raw + "'");
        }
        if (used != exp_text.size() || e > 64 || e < -64)
            throw std::invalid_argument("malformed exponent in '" + raw + "'");
        Integer ten = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(e < 0 ? -e : e));
        value = e < 0 ? value / Rational(ten) : value * Rational(ten);
    }
    return neg ? -value : value;
}

std::string to_string(const Rational& r)
{
    if (denom(r) == 1)
        return numer(r).str();
    return numer(r).str() + "/" + denom(r).str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational pow_rat(const Rational& base, unsigned exp)
{
    Rational result = 1;
    for (unsigned i = 0; i < exp; ++i)
        result *= base;
    return result;
}

} // namespace oretile
