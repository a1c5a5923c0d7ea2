#include "reviewlore/gcseval/score.hpp"

#include <algorithm>
#include <cmath>

#include "reviewlore/common/error.hpp"

namespace reviewlore::gcseval {

std::string_view to_string(CriterionKind kind) noexcept {
    switch (kind) {
    case CriterionKind::RootCause: return "root_cause";
    case CriterionKind::CodeLocation: return "code_location";
    case CriterionKind::FixingStrategy: return "fixing_strategy";
    case CriterionKind::KeywordOverlap: return "keyword_overlap";
    }
    return "unknown";
}

void CriterionJudgment::check() const {
    if (confidence < 1 || confidence > 100)
        throw DomainError("confidence " + std::to_string(confidence) + " outside [1, 100]");
}

void EvalConfig::check() const {
    if (n < 1) throw DomainError("N must be >= 1");
    if (k < 1) throw DomainError("K must be >= 1");
    if (confidence_threshold < 0 || confidence_threshold > 100)
        throw DomainError("confidence threshold must lie in [0, 100]");
}

double pairwise_sum(std::span<const double> xs) noexcept {
    if (xs.size() <= 8) {
        double s = 0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

double mean(std::span<const double> xs) noexcept {
    return xs.empty() ? 0.0 : pairwise_sum(xs) / static_cast<double>(xs.size());
}

double wcs(const CriterionJudgment& j) {
    j.check();
    return static_cast<double>(j.confidence) / 100.0 * (j.match ? 1.0 : 0.0);
}

double issue_score(const IssueJudgment& j) {
    if (j.criteria.size() != kCriteriaPerIssue)
        throw StructuralError("issue " + std::to_string(j.issue_index) + " has " +
                              std::to_string(j.criteria.size()) + " criterion judgments, expected 4");
    std::array<double, kCriteriaPerIssue> w{};
    for (std::size_t i = 0; i < kCriteriaPerIssue; ++i) w[i] = wcs(j.criteria[i]);
    return mean(w);
}

namespace {

// Per-issue scores ordered by issue index, after checking coverage.
std::vector<double> issue_scores(std::size_t issue_count, const Rationale& r) {
    if (r.issues.size() != issue_count)
        throw StructuralError("rationale judges " + std::to_string(r.issues.size()) + " issues, expected " +
                              std::to_string(issue_count));
    std::vector<double> scores(issue_count, 0.0);
    std::vector<bool> seen(issue_count, false);
    for (const auto& ij : r.issues) {
        if (ij.issue_index >= issue_count || seen[ij.issue_index])
            throw StructuralError("rationale has a missing or duplicate judgment for issue " +
                                  std::to_string(ij.issue_index));
        seen[ij.issue_index] = true;
        scores[ij.issue_index] = issue_score(ij);
    }
    return scores;
}

void check_shape(std::span<const Run> runs, const EvalConfig& cfg) {
    cfg.check();
    if (runs.size() != static_cast<std::size_t>(cfg.n))
        throw StructuralError("expected " + std::to_string(cfg.n) + " runs, got " + std::to_string(runs.size()));
    for (std::size_t n = 0; n < runs.size(); ++n) {
        if (runs[n].rationales.size() != static_cast<std::size_t>(cfg.k))
            throw StructuralError("run " + std::to_string(n) + " has " +
                                  std::to_string(runs[n].rationales.size()) + " rationales, expected " +
                                  std::to_string(cfg.k));
    }
}

template <class PerRationale>
std::vector<std::vector<double>> per_rationale(std::span<const Run> runs, int tau, PerRationale f) {
    std::vector<std::vector<double>> out;
    out.reserve(runs.size());
    for (const auto& run : runs) {
        std::vector<double> row;
        row.reserve(run.rationales.size());
        for (const auto& r : run.rationales) row.push_back(f(run.issue_count, apply_confidence_threshold(r, tau)));
        out.push_back(std::move(row));
    }
    return out;
}

double best_of_votes(const std::vector<std::vector<double>>& scores) {
    double best = 0;
    for (const auto& row : scores) best = std::max(best, mean(row));
    return best;
}

} // namespace

double score_rationale(std::size_t issue_count, const Rationale& r) {
    return mean(issue_scores(issue_count, r));
}

double score_rationale_max(std::size_t issue_count, const Rationale& r) {
    const auto scores = issue_scores(issue_count, r);
    return scores.empty() ? 0.0 : *std::max_element(scores.begin(), scores.end());
}

Rationale apply_confidence_threshold(Rationale r, int tau) {
    if (tau < 0 || tau > 100) throw DomainError("confidence threshold must lie in [0, 100]");
    if (tau == 0) return r;
    for (auto& ij : r.issues)
        for (auto& cj : ij.criteria)
            if (cj.confidence < tau) cj.match = false;
    return r;
}

std::vector<Rationale> apply_confidence_threshold(std::vector<Rationale> rs, int tau) {
    for (auto& r : rs) r = apply_confidence_threshold(std::move(r), tau);
    return rs;
}

double gcs(std::span<const Run> runs, const EvalConfig& cfg) {
    check_shape(runs, cfg);
    return best_of_votes(per_rationale(runs, cfg.confidence_threshold,
                                       [](std::size_t n, const Rationale& r) { return score_rationale(n, r); }));
}

double h_gcs(std::span<const Run> runs, const EvalConfig& cfg) {
    check_shape(runs, cfg);
    return best_of_votes(per_rationale(runs, cfg.confidence_threshold, [](std::size_t n, const Rationale& r) {
        return score_rationale_max(n, r);
    }));
}

ScoreBundle score_runs(std::span<const Run> runs, const EvalConfig& cfg) {
    check_shape(runs, cfg);
    ScoreBundle b;
    b.rationale_scores = per_rationale(runs, cfg.confidence_threshold,
                                       [](std::size_t n, const Rationale& r) { return score_rationale(n, r); });
    b.rationale_max_scores = per_rationale(runs, cfg.confidence_threshold, [](std::size_t n, const Rationale& r) {
        return score_rationale_max(n, r);
    });
    b.gcs = best_of_votes(b.rationale_scores);
    b.h_gcs = best_of_votes(b.rationale_max_scores);
    return b;
}

double final_score(double gcs_system, double gcs_ground_truth) {
    if (!(gcs_ground_truth > 0))
        throw DomainError("degenerate ground truth: coverage score " + std::to_string(gcs_ground_truth));
    return gcs_system / gcs_ground_truth;
}

KappaResult cohens_kappa_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
    const std::size_t total = tp + fp + fn + tn;
    if (total < 2) throw DomainError("kappa needs at least two paired labels");
    const double n = static_cast<double>(total);
    const double p_o = static_cast<double>(tp + tn) / n;
    const double a_yes = static_cast<double>(tp + fn) / n;
    const double b_yes = static_cast<double>(tp + fp) / n;
    const double p_e = a_yes * b_yes + (1 - a_yes) * (1 - b_yes);
    if (p_e >= 1.0) throw DomainError("kappa undefined: chance agreement is 1 (degenerate marginals)");

    KappaResult r;
    r.n = total;
    r.observed_agreement = p_o;
    r.chance_agreement = p_e;
    r.kappa = (p_o - p_e) / (1 - p_e);
    r.standard_error = std::sqrt(p_o * (1 - p_o) / (n * (1 - p_e) * (1 - p_e)));
    r.ci_low = std::max(-1.0, r.kappa - 1.96 * r.standard_error);
    r.ci_high = std::min(1.0, r.kappa + 1.96 * r.standard_error);
    return r;
}

KappaResult cohens_kappa(const std::vector<bool>& rater_a, const std::vector<bool>& rater_b) {
    if (rater_a.size() != rater_b.size()) throw DomainError("kappa label lists differ in length");
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < rater_a.size(); ++i) {
        if (rater_a[i] && rater_b[i]) ++tp;
        else if (!rater_a[i] && rater_b[i]) ++fp;
        else if (rater_a[i] && !rater_b[i]) ++fn;
        else ++tn;
    }
    return cohens_kappa_from_counts(tp, fp, fn, tn);
}

} // namespace reviewlore::gcseval
