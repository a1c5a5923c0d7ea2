#pragma once

// Coverage-score arithmetic: per-criterion weighted confidence, rationale
// averaging, K-vote / Best-of-N aggregation, the highest-issue variant,
// ground-truth normalisation, confidence thresholding and Cohen's kappa.
//
// Everything here is pure arithmetic over collected judgments. Means use
// pairwise summation so results are reproducible bit-for-bit.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace reviewlore::gcseval {

enum class CriterionKind { RootCause, CodeLocation, FixingStrategy, KeywordOverlap };

inline constexpr std::size_t kCriteriaPerIssue = 4;
inline constexpr std::array<CriterionKind, kCriteriaPerIssue> kAllCriterionKinds{
    CriterionKind::RootCause, CriterionKind::CodeLocation, CriterionKind::FixingStrategy,
    CriterionKind::KeywordOverlap};

std::string_view to_string(CriterionKind kind) noexcept;

struct Criterion {
    CriterionKind kind;
    std::string question;

    bool operator==(const Criterion&) const = default;
};

// One question per kind, in kAllCriterionKinds order.
using CriteriaSet = std::array<Criterion, kCriteriaPerIssue>;

struct CriterionJudgment {
    bool match = false;
    int confidence = 1;  // [1, 100]
    std::string reason;

    // Throws DomainError when confidence is outside [1, 100].
    void check() const;
};

struct IssueJudgment {
    std::size_t issue_index = 0;
    std::string title;
    // Recorded for audit only; never enters the score.
    bool overall_match = false;
    int overall_confidence = 0;
    std::vector<CriterionJudgment> criteria;  // one per CriterionKind, in order
};

// One verifier pass over every issue of one candidate issue set.
struct Rationale {
    std::vector<IssueJudgment> issues;
};

// The K rationales collected for one of the N candidate issue sets.
struct Run {
    std::size_t issue_count = 0;
    std::vector<Rationale> rationales;
};

struct EvalConfig {
    int n = 10;                    // Best-of-N
    int k = 3;                     // verifier votes
    int confidence_threshold = 0;  // 0 disables

    void check() const;
};

struct ScoreBundle {
    double gcs = 0;
    double h_gcs = 0;
    std::optional<double> final_score;
    // [n][k] rationale scores (mean over issues / max over issues).
    std::vector<std::vector<double>> rationale_scores;
    std::vector<std::vector<double>> rationale_max_scores;
};

double pairwise_sum(std::span<const double> xs) noexcept;
double mean(std::span<const double> xs) noexcept;

// (confidence / 100) * match.
double wcs(const CriterionJudgment& j);

// Mean WCS over the four criteria of one issue.
double issue_score(const IssueJudgment& j);

// Mean over issues of the per-issue criterion mean. The rationale must cover
// issue indices [0, issue_count) exactly once with four judgments each;
// anything else is a StructuralError. An empty issue set scores 0.
double score_rationale(std::size_t issue_count, const Rationale& r);

// As score_rationale but taking the best single issue instead of the mean.
double score_rationale_max(std::size_t issue_count, const Rationale& r);

// Judgments with confidence below tau count as non-matches. tau == 0 is identity.
Rationale apply_confidence_threshold(Rationale r, int tau);
std::vector<Rationale> apply_confidence_threshold(std::vector<Rationale> rs, int tau);

// Best-of-N maximum of the K-vote average. Requires exactly cfg.n runs of
// cfg.k rationales; ragged input is a StructuralError. cfg's confidence
// threshold is applied first.
double gcs(std::span<const Run> runs, const EvalConfig& cfg);
double h_gcs(std::span<const Run> runs, const EvalConfig& cfg);
ScoreBundle score_runs(std::span<const Run> runs, const EvalConfig& cfg);

// system / ground truth. A non-positive denominator is a DomainError.
double final_score(double gcs_system, double gcs_ground_truth);

struct KappaResult {
    double kappa = 0;
    double ci_low = 0;
    double ci_high = 0;
    double observed_agreement = 0;
    double chance_agreement = 0;
    double standard_error = 0;
    std::size_t n = 0;
};

// Cohen's kappa for two binary raters with a 95% interval from the
// asymptotic standard error sqrt(p_o (1 - p_o) / (n (1 - p_e)^2)),
// clipped to [-1, 1].
KappaResult cohens_kappa(const std::vector<bool>& rater_a, const std::vector<bool>& rater_b);

// Same, from a confusion matrix where "positive" is rater b's verdict and
// rater a is the reference: tp = both yes, fp = b yes / a no, fn = b no / a yes.
KappaResult cohens_kappa_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn);

} // namespace reviewlore::gcseval
