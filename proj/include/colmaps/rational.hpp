#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <string>

#include "colmaps/errors.hpp"

namespace colmaps {

// Exact fractions over 128-bit integers. Period detection must not suffer
// float drift (2^k/10 mod 1 never equals 1/10, but doubles cannot tell), so
// orbit and period computations run on these whenever the inputs are exact.
// Overflow throws instead of wrapping.
class Rational {
  public:
    Rational() : num_(0), den_(1) {}
    Rational(long long n) : num_(n), den_(1) {}
    Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }

    static Rational parse(const std::string& s);

    long long num() const { return clamp_ll(num_); }
    long long den() const { return clamp_ll(den_); }
    double to_double() const {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }

    bool is_zero() const { return num_ == 0; }

    Rational operator+(const Rational& o) const {
        return make(add_chk(mul_chk(num_, o.den_), mul_chk(o.num_, den_)),
                    mul_chk(den_, o.den_));
    }
    Rational operator-(const Rational& o) const {
        return make(add_chk(mul_chk(num_, o.den_), -mul_chk(o.num_, den_)),
                    mul_chk(den_, o.den_));
    }
    Rational operator*(const Rational& o) const {
        return make(mul_chk(num_, o.num_), mul_chk(den_, o.den_));
    }
    Rational operator/(const Rational& o) const {
        if (o.num_ == 0) throw NumericError("rational division by zero");
        return make(mul_chk(num_, o.den_), mul_chk(den_, o.num_));
    }
    Rational operator-() const { return make(-num_, den_); }

    bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const {
        return mul_chk(num_, o.den_) < mul_chk(o.num_, den_);
    }
    bool operator<=(const Rational& o) const { return *this < o || *this == o; }
    bool operator>(const Rational& o) const { return o < *this; }
    bool operator>=(const Rational& o) const { return o <= *this; }

    // x - floor(x), the mod-1 reduction used by circle maps.
    Rational mod1() const {
        __int128 q = num_ / den_;
        __int128 r = num_ % den_;
        if (r < 0) r += den_;
        (void)q;
        return make(r, den_);
    }

    Rational abs() const { return make(num_ < 0 ? -num_ : num_, den_); }

    std::string str() const;

    size_t hash() const {
        auto h = std::hash<unsigned long long>();
        return h(static_cast<unsigned long long>(num_)) * 1000003u ^
               h(static_cast<unsigned long long>(den_));
    }

  private:
    __int128 num_;
    __int128 den_;  // > 0 after normalize

    static Rational make(__int128 n, __int128 d) {
        Rational r;
        r.num_ = n;
        r.den_ = d;
        r.normalize();
        return r;
    }

    void normalize() {
        if (den_ == 0) throw NumericError("rational with zero denominator");
        if (den_ < 0) { num_ = -num_; den_ = -den_; }
        __int128 a = num_ < 0 ? -num_ : num_;
        __int128 b = den_;
        while (b != 0) { __int128 t = a % b; a = b; b = t; }
        if (a > 1) { num_ /= a; den_ /= a; }
    }

    // guard before multiplying: signed __int128 overflow is undefined and the
    // optimizer is allowed to drop an after-the-fact check
    static __int128 mul_chk(__int128 a, __int128 b) {
        if (a == 0 || b == 0) return 0;
        unsigned __int128 ua = a < 0 ? -static_cast<unsigned __int128>(a)
                                     : static_cast<unsigned __int128>(a);
        unsigned __int128 ub = b < 0 ? -static_cast<unsigned __int128>(b)
                                     : static_cast<unsigned __int128>(b);
        constexpr unsigned __int128 lim =
            (~static_cast<unsigned __int128>(0)) >> 2;  // stay well below 2^127
        if (ua > lim / ub) throw OverflowError("rational arithmetic overflow");
        return a * b;
    }
    static __int128 add_chk(__int128 a, __int128 b) {
        if ((b > 0 && a > (static_cast<__int128>(1) << 125) - b) ||
            (b < 0 && a < -(static_cast<__int128>(1) << 125) - b))
            throw OverflowError("rational arithmetic overflow");
        return a + b;
    }
    static long long clamp_ll(__int128 v) {
        if (v > INT64_MAX || v < INT64_MIN)
            throw OverflowError("rational component exceeds 64 bits");
        return static_cast<long long>(v);
    }
};

inline Rational Rational::parse(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) {
            // decimal or integer: keep it exact by scaling the fractional part
            auto dot = s.find('.');
            if (dot == std::string::npos) return Rational(std::stoll(s));
            std::string whole = s.substr(0, dot), frac = s.substr(dot + 1);
            if (frac.size() > 17) frac = frac.substr(0, 17);
            long long scale = 1;
            for (size_t i = 0; i < frac.size(); ++i) scale *= 10;
            long long w = whole.empty() || whole == "-" ? 0 : std::stoll(whole);
            long long f = frac.empty() ? 0 : std::stoll(frac);
            bool neg = !whole.empty() && whole[0] == '-';
            Rational r = Rational(std::llabs(w)) + Rational(f, scale);
            return neg ? -r : r;
        }
        return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    } catch (const std::invalid_argument&) {
        throw ValidationError("number", "cannot parse '" + s + "' as a rational");
    } catch (const std::out_of_range&) {
        throw ValidationError("number", "'" + s + "' out of range");
    }
}

inline std::string Rational::str() const {
    std::string s = std::to_string(num());
    if (den() != 1) s += "/" + std::to_string(den());
    return s;
}

struct RationalPairHash {
    size_t operator()(const std::pair<Rational, Rational>& p) const {
        return p.first.hash() * 2654435761u ^ p.second.hash();
    }
};

}  // namespace colmaps
