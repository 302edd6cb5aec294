#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace conical {

/* An element of Q/Z, stored as the reduced representative num/den in [0,1).
 * Addition normalizes to the lcm of the denominators.  Local invariants of
 * quaternion algebras only ever produce 0 and 1/2; general torsion shows up
 * through truncation windows, whose bound the callers validate with
 * denominator_divides(). */
class QQZ {
public:
    QQZ() : num_(0), den_(1) {}

    QQZ(long long num, long long den) {
        if (den <= 0) throw std::invalid_argument("QQZ denominator must be positive");
        num %= den;
        if (num < 0) num += den;
        long long g = std::gcd(num, den);
        num_ = num / g;
        den_ = den / g;
    }

    static QQZ zero() { return QQZ(); }
    static QQZ half() { return QQZ(1, 2); }

    long long num() const { return num_; }
    long long den() const { return den_; }
    bool is_zero() const { return num_ == 0; }

    bool denominator_divides(long long n) const { return n % den_ == 0; }

    QQZ operator+(const QQZ& o) const {
        long long l = std::lcm(den_, o.den_);
        return QQZ(num_ * (l / den_) + o.num_ * (l / o.den_), l);
    }
    QQZ operator-() const { return QQZ(-num_, den_); }
    QQZ operator-(const QQZ& o) const { return *this + (-o); }

    /* integer multiple, e.g. restriction along a local extension of degree m */
    QQZ times(long long m) const {
        long long r = ((m % den_) * num_) % den_;
        return QQZ(r, den_);
    }

    friend bool operator==(const QQZ&, const QQZ&) = default;

    std::string str() const {
        if (num_ == 0) return "0";
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    static QQZ parse(const std::string& s) {
        auto slash = s.find('/');
        if (slash == std::string::npos) {
            long long n = std::stoll(s);
            if (n != 0) throw std::invalid_argument("integer in Q/Z must be 0");
            return zero();
        }
        return QQZ(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    }

private:
    long long num_, den_;
};

}  // namespace conical
