#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace conical {

/* A place of Q: either the real (archimedean) place or a finite prime p.
 * Places order real-first, then primes ascending; that ordering is used
 * everywhere a deterministic basis or support list is produced. */
class Place {
public:
    static Place real() { return Place(0); }
    static Place finite(long p) {
        if (p < 2) throw std::invalid_argument("finite place needs a prime >= 2");
        return Place(p);
    }

    bool is_real() const { return p_ == 0; }
    bool is_finite() const { return p_ != 0; }
    long prime() const {
        if (p_ == 0) throw std::logic_error("real place has no prime");
        return p_;
    }

    friend auto operator<=>(const Place&, const Place&) = default;

    std::string str() const { return p_ == 0 ? "real" : std::to_string(p_); }

    static Place parse(const std::string& s) {
        if (s == "real") return real();
        return finite(std::stol(s));
    }

private:
    explicit Place(long p) : p_(p) {}
    long p_;  // 0 encodes the real place
};

}  // namespace conical
