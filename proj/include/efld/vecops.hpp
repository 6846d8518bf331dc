#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "efld/errors.hpp"

namespace efld {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm_sq(const Vec& a) { return dot(a, a); }

inline double norm2(const Vec& a) { return std::sqrt(norm_sq(a)); }

inline double norm_inf(const Vec& a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::fabs(x));
    return m;
}

inline double dist_sq(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// y += c * x
inline void axpy(double c, const Vec& x, Vec& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

inline void scale(Vec& x, double c) {
    for (double& v : x) v *= c;
}

inline bool all_finite(const Vec& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

inline void require_same_size(const Vec& a, const Vec& b, const char* where) {
    if (a.size() != b.size())
        throw shape_error(std::string(where) + ": size mismatch " + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()));
}

inline void require_finite(const Vec& x, const char* where) {
    if (!all_finite(x)) throw domain_error(std::string(where) + ": non-finite input");
}

inline void require_finite(double x, const char* where) {
    if (!std::isfinite(x)) throw domain_error(std::string(where) + ": non-finite input");
}

}  // namespace efld
