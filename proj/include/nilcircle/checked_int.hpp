#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace nilcircle {

// Lattice coordinates grow like n^d and central coordinates accumulate
// products of those, so plain int64 wraps silently in exactly the regimes
// we care about.  Int is a 128-bit integer whose arithmetic throws on
// overflow instead of wrapping.
class Int {
public:
    constexpr Int() : v_(0) {}
    constexpr Int(int v) : v_(v) {}
    constexpr Int(long v) : v_(v) {}
    constexpr Int(long long v) : v_(v) {}
    constexpr Int(unsigned v) : v_(v) {}
    constexpr explicit Int(__int128 v) : v_(v) {}

    constexpr __int128 raw() const { return v_; }

    friend Int operator+(Int a, Int b) {
        __int128 r;
        if (__builtin_add_overflow(a.v_, b.v_, &r)) overflow("add");
        return Int(r);
    }
    friend Int operator-(Int a, Int b) {
        __int128 r;
        if (__builtin_sub_overflow(a.v_, b.v_, &r)) overflow("sub");
        return Int(r);
    }
    friend Int operator*(Int a, Int b) {
        __int128 r;
        if (__builtin_mul_overflow(a.v_, b.v_, &r)) overflow("mul");
        return Int(r);
    }
    friend Int operator-(Int a) { return Int(0) - a; }

    Int& operator+=(Int b) { *this = *this + b; return *this; }
    Int& operator-=(Int b) { *this = *this - b; return *this; }
    Int& operator*=(Int b) { *this = *this * b; return *this; }

    // Truncating division / remainder (operands expected exact).
    friend Int operator/(Int a, Int b) {
        if (b.v_ == 0) throw std::domain_error("Int: division by zero");
        return Int(a.v_ / b.v_);
    }
    friend Int operator%(Int a, Int b) {
        if (b.v_ == 0) throw std::domain_error("Int: modulo by zero");
        return Int(a.v_ % b.v_);
    }

    friend bool operator==(Int a, Int b) { return a.v_ == b.v_; }
    friend bool operator!=(Int a, Int b) { return a.v_ != b.v_; }
    friend bool operator<(Int a, Int b) { return a.v_ < b.v_; }
    friend bool operator<=(Int a, Int b) { return a.v_ <= b.v_; }
    friend bool operator>(Int a, Int b) { return a.v_ > b.v_; }
    friend bool operator>=(Int a, Int b) { return a.v_ >= b.v_; }

    double to_double() const { return static_cast<double>(v_); }

    // Throws if the value does not fit in int64.
    long long to_int64() const {
        if (v_ > INT64_MAX || v_ < INT64_MIN)
            throw std::overflow_error("Int: value exceeds int64");
        return static_cast<long long>(v_);
    }

    std::string str() const {
        __int128 x = v_;
        if (x == 0) return "0";
        bool neg = x < 0;
        std::string s;
        while (x != 0) {
            int digit = static_cast<int>(neg ? -(x % 10) : (x % 10));
            s.push_back(static_cast<char>('0' + digit));
            x /= 10;
        }
        if (neg) s.push_back('-');
        return std::string(s.rbegin(), s.rend());
    }

private:
    [[noreturn]] static void overflow(const char* op) {
        throw std::overflow_error(std::string("Int: 128-bit overflow in ") + op);
    }
    __int128 v_;
};

inline Int abs(Int a) { return a < Int(0) ? -a : a; }

inline Int ipow(Int base, int e) {
    if (e < 0) throw std::domain_error("ipow: negative exponent");
    Int r(1);
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

// Floor modulo into [0, m).
inline Int floor_mod(Int a, Int m) {
    Int r = a % m;
    if (r < Int(0)) r += m;
    return r;
}

inline Int int_gcd(Int a, Int b) {
    a = abs(a); b = abs(b);
    while (b != Int(0)) { Int t = a % b; a = b; b = t; }
    return a;
}

inline long long llgcd(long long a, long long b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b) { long long t = a % b; a = b; b = t; }
    return a;
}

inline long long lcm_upto(int n) {
    long long l = 1;
    for (int i = 2; i <= n; ++i) {
        long long g = llgcd(l, i);
        if (l / g > INT64_MAX / i) throw std::overflow_error("lcm_upto: overflow");
        l = l / g * i;
    }
    return l;
}

struct IntHash {
    size_t operator()(const Int& x) const {
        unsigned __int128 u = static_cast<unsigned __int128>(x.raw());
        uint64_t lo = static_cast<uint64_t>(u);
        uint64_t hi = static_cast<uint64_t>(u >> 64);
        uint64_t h = lo * 0x9E3779B97F4A7C15ull;
        h ^= hi + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
        return static_cast<size_t>(h);
    }
};

} // namespace nilcircle
