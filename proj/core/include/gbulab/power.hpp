#pragma once

#include <cmath>

namespace gbulab {

/// x^e for x >= 0 with a fixed exponent. Small integer and half-integer
/// exponents (the common p, q choices) skip std::pow.
class Power {
public:
    explicit Power(double e) : e_(e) {
        const double twice = 2.0 * e;
        if (e == 0.0) {
            kind_ = Kind::Zero;
        } else if (e > 0.0 && e <= 8.0 && e == std::floor(e)) {
            kind_ = Kind::Integer;
            k_ = static_cast<int>(e);
        } else if (e > 0.0 && e <= 8.5 && twice == std::floor(twice)) {
            kind_ = Kind::HalfInteger;
            k_ = static_cast<int>(std::floor(e));
        } else {
            kind_ = Kind::General;
        }
    }

    double exponent() const { return e_; }

    double operator()(double x) const {
        switch (kind_) {
        case Kind::Zero: return 1.0;
        case Kind::Integer: return ipow(x, k_);
        case Kind::HalfInteger: return std::sqrt(x) * ipow(x, k_);
        case Kind::General: break;
        }
        return std::pow(x, e_);
    }

private:
    enum class Kind { Zero, Integer, HalfInteger, General };

    static double ipow(double x, int k) {
        double r = 1.0;
        for (int i = 0; i < k; ++i) r *= x;
        return r;
    }

    double e_;
    Kind kind_ = Kind::General;
    int k_ = 0;
};

} // namespace gbulab
