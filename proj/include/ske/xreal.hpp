#pragma once

#include <cassert>
#include <cmath>
#include <ostream>

#include "ske/errors.hpp"

namespace ske {

// Extended real: a finite double, +inf, or -inf as an explicit state.
// Infinite states encode integrability-threshold branches; they are never
// produced by floating-point overflow leaking through arithmetic.
class xreal {
public:
    xreal() : v_(0.0), state_(0) {}
    xreal(double v) : v_(v), state_(0) {
        if (!std::isfinite(v)) throw error("xreal: nonfinite double");
    }

    static xreal pos_inf() { return xreal(1); }
    static xreal neg_inf() { return xreal(-1); }

    bool finite() const { return state_ == 0; }
    bool is_pos_inf() const { return state_ > 0; }
    bool is_neg_inf() const { return state_ < 0; }

    double value() const {
        if (!finite()) throw error("xreal: value() on infinite state");
        return v_;
    }
    // Collapses to an IEEE double (including +/-infinity) for reporting.
    double as_double() const {
        if (finite()) return v_;
        return state_ > 0 ? std::numeric_limits<double>::infinity()
                          : -std::numeric_limits<double>::infinity();
    }

    xreal operator+(const xreal& o) const {
        if (finite() && o.finite()) return xreal(v_ + o.v_);
        if (is_pos_inf() && o.is_neg_inf()) throw error("xreal: inf - inf");
        if (is_neg_inf() && o.is_pos_inf()) throw error("xreal: inf - inf");
        return finite() ? o : *this;
    }
    xreal operator-() const {
        if (finite()) return xreal(-v_);
        return state_ > 0 ? neg_inf() : pos_inf();
    }
    xreal operator-(const xreal& o) const { return *this + (-o); }

    // Scaling by a positive finite factor.
    xreal scaled(double a) const {
        assert(a > 0.0 && std::isfinite(a));
        return finite() ? xreal(a * v_) : *this;
    }

    bool operator<(const xreal& o) const {
        if (state_ != o.state_) return state_ < o.state_;
        return finite() ? v_ < o.v_ : false;
    }
    bool operator<=(const xreal& o) const { return !(o < *this); }

    friend std::ostream& operator<<(std::ostream& os, const xreal& x) {
        if (x.is_pos_inf()) return os << "+inf";
        if (x.is_neg_inf()) return os << "-inf";
        return os << x.v_;
    }

private:
    explicit xreal(int s) : v_(0.0), state_(s) {}
    double v_;
    int state_; // 0 finite, +1 pos_inf, -1 neg_inf
};

} // namespace ske
