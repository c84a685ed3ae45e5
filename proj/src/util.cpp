#include "qwalk/util.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>
#include <vector>

namespace qwalk {

namespace {
std::atomic<int> g_max_threads{1};
}

void set_max_threads(int n) {
    g_max_threads.store(std::max(1, n));
}

int max_threads() {
    return g_max_threads.load();
}

void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn) {
    const int cap = max_threads();
    if (cap <= 1 || n < 4096) {
        fn(0, n);
        return;
    }
    const int workers = static_cast<int>(std::min<std::int64_t>(cap, n));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::int64_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::int64_t lo = w * chunk;
        const std::int64_t hi = std::min<std::int64_t>(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

double wrap_angle(double a) {
    const double two_pi = 2.0 * M_PI;
    double r = std::remainder(a, two_pi);  // (-pi, pi]
    if (r >= M_PI) r -= two_pi;
    return r;
}

double wrap_delta(double x, double y, double extent) {
    double r = std::remainder(x - y, extent);  // (-extent/2, extent/2]
    if (r >= 0.5 * extent) r -= extent;
    return r;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace qwalk
