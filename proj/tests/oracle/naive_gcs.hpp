#pragma once

// Straight-line reference for the coverage-score arithmetic. It works on a
// plain nested-vector tensor and shares no code with the library.

#include <algorithm>
#include <vector>

namespace oracle {

struct Verdict {
    bool yes;
    int confidence;
};

// [issue][criterion]
using RationaleT = std::vector<std::vector<Verdict>>;
// [n][k] -> rationale; every rationale of run n has the same issue count.
using Tensor = std::vector<std::vector<RationaleT>>;

inline double wcs(Verdict v, int tau) {
    if (v.confidence < tau) return 0.0;
    return v.yes ? v.confidence / 100.0 : 0.0;
}

inline double issue(const std::vector<Verdict>& crit, int tau) {
    double s = 0;
    for (const auto& v : crit) s += wcs(v, tau);
    return s / 4.0;
}

inline double rationale_mean(const RationaleT& r, int tau) {
    if (r.empty()) return 0.0;
    double s = 0;
    for (const auto& is : r) s += issue(is, tau);
    return s / static_cast<double>(r.size());
}

inline double rationale_max(const RationaleT& r, int tau) {
    double best = 0;
    for (const auto& is : r) best = std::max(best, issue(is, tau));
    return best;
}

template <class F>
double best_of_n(const Tensor& t, int tau, F per_rationale) {
    double best = 0;
    for (const auto& run : t) {
        double s = 0;
        for (const auto& r : run) s += per_rationale(r, tau);
        best = std::max(best, s / static_cast<double>(run.size()));
    }
    return best;
}

inline double gcs(const Tensor& t, int tau = 0) { return best_of_n(t, tau, rationale_mean); }
inline double h_gcs(const Tensor& t, int tau = 0) { return best_of_n(t, tau, rationale_max); }
inline double final_score(double sys, double gt) { return sys / gt; }

inline double diversity(long long authors, long long msgids) {
    // sqrt by bisection to stay independent of std::sqrt
    const double x = static_cast<double>(authors) * static_cast<double>(msgids);
    double lo = 0, hi = std::max(1.0, x);
    for (int i = 0; i < 200; ++i) {
        const double mid = (lo + hi) / 2;
        (mid * mid < x ? lo : hi) = mid;
    }
    return (lo + hi) / 2 * 10.0;
}

// kappa from a 2x2 table
inline double kappa(double tp, double fp, double fn, double tn) {
    const double n = tp + fp + fn + tn;
    const double po = (tp + tn) / n;
    const double pe = ((tp + fn) / n) * ((tp + fp) / n) + ((fp + tn) / n) * ((fn + tn) / n);
    return (po - pe) / (1 - pe);
}

} // namespace oracle
