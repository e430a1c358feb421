#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "impdiff/errors.hpp"

namespace impdiff {

// Neumaier's variant of compensated summation. The outer sums of the
// closed-form evaluators cancel heavily once |n| grows, so every term sum
// goes through one of these.
class CompensatedSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline long long factorial(int n) {
    if (n < 0 || n > 20)
        throw InvalidArgument("factorial: argument out of range: " + std::to_string(n));
    long long r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

// multinomial(sum(parts); parts...) as an exact integer. Computed as a
// product of binomials so intermediate values stay bounded by the result.
inline long long multinomial(std::span<const int> parts) {
    long long result = 1;
    long long total = 0;
    for (int p : parts) {
        if (p < 0) throw InvalidArgument("multinomial: negative part");
        for (int i = 1; i <= p; ++i) {
            ++total;
            result = result * total / i; // binomial(total, i) is integral at each step
        }
    }
    return result;
}

inline long long multinomial(const std::vector<int>& parts) {
    return multinomial(std::span<const int>(parts));
}

// Uniform double in [0,1) from the top 53 bits of the generator, so that
// sequences are identical across standard libraries for a fixed seed.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

} // namespace impdiff
