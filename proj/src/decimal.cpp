#include "trailkit/decimal.hpp"

#include <cctype>
#include <cstdlib>

namespace trailkit {

Decimal Decimal::parse(const std::string& text) {
    if (text.empty()) throw CostError("empty decimal literal");
    size_t i = 0;
    bool neg = false;
    if (text[i] == '+' || text[i] == '-') {
        neg = text[i] == '-';
        ++i;
    }
    if (i >= text.size()) throw CostError("malformed decimal literal: " + text);
    int64_t whole = 0;
    bool any_digit = false;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        whole = whole * 10 + (text[i] - '0');
        any_digit = true;
        ++i;
    }
    int64_t frac = 0;
    if (i < text.size() && text[i] == '.') {
        ++i;
        int digits = 0;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            if (digits >= 9)
                throw CostError("decimal literal has more than 9 fractional digits: " + text);
            frac = frac * 10 + (text[i] - '0');
            ++digits;
            any_digit = true;
            ++i;
        }
        for (; digits < 9; ++digits) frac *= 10;
    }
    if (!any_digit || i != text.size())
        throw CostError("malformed decimal literal: " + text);
    int64_t nanos = whole * kScale + frac;
    return from_nanos(neg ? -nanos : nanos);
}

Decimal Decimal::operator/(Decimal o) const {
    if (o.nanos_ == 0) throw CostError("division by zero");
    __int128 num = static_cast<__int128>(nanos_) * kScale;
    __int128 den = o.nanos_;
    bool neg = (num < 0) != (den < 0);
    if (num < 0) num = -num;
    if (den < 0) den = -den;
    __int128 q = (num + den / 2) / den;  // half-up
    int64_t r = static_cast<int64_t>(q);
    return from_nanos(neg ? -r : r);
}

std::string Decimal::to_string() const {
    int64_t v = nanos_;
    std::string sign = v < 0 ? "-" : "";
    if (v < 0) v = -v;
    int64_t whole = v / kScale;
    int64_t frac = v % kScale;
    std::string out = sign + std::to_string(whole);
    if (frac != 0) {
        std::string f = std::to_string(frac);
        f.insert(0, 9 - f.size(), '0');
        while (!f.empty() && f.back() == '0') f.pop_back();
        out += "." + f;
    }
    return out;
}

std::string Decimal::to_display_string(int places) const {
    int64_t unit = kScale;
    for (int i = 0; i < places; ++i) unit /= 10;
    int64_t v = nanos_;
    std::string sign = v < 0 ? "-" : "";
    if (v < 0) v = -v;
    int64_t scaled = (v + unit / 2) / unit;  // half-up at `places`
    int64_t pow10 = 1;
    for (int i = 0; i < places; ++i) pow10 *= 10;
    int64_t whole = scaled / pow10;
    int64_t frac = scaled % pow10;
    std::string out = sign + std::to_string(whole);
    if (places > 0) {
        std::string f = std::to_string(frac);
        f.insert(0, static_cast<size_t>(places) - f.size(), '0');
        out += "." + f;
    }
    return out;
}

}  // namespace trailkit
