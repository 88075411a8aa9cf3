#include "latchsim/rng.hpp"

#include <cmath>

namespace latchsim {

double Rng::gaussian(double mean, double stddev) {
    if (has_spare_) {
        has_spare_ = false;
        return mean + stddev * spare_;
    }
    // u1 in (0, 1] so the log is finite.
    double u1 = 1.0 - uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return mean + stddev * r * std::cos(a);
}

uint64_t Rng::derive(uint64_t seed, uint64_t salt) {
    Rng mixer(seed ^ (salt * 0xd1342543de82ef95ull + 0x2545f4914f6cdd1dull));
    return mixer.next_u64();
}

}  // namespace latchsim
