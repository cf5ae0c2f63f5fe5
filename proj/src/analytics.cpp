#include "cqa/analytics.hpp"

#include <algorithm>
#include <map>

#include "cqa/common.hpp"
#include "cqa/text.hpp"

namespace cqa {

namespace {

double pct(int64_t part, int64_t whole) {
    if (whole == 0) return 0.0;
    return 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

bool known_category(const QuestionRecord& q) {
    return q.close_event && q.close_event->category != CloseCategory::Unknown;
}

std::size_t cat_index(CloseCategory c) { return static_cast<std::size_t>(c); }

}  // namespace

int64_t CategoryDistribution::total_known() const {
    int64_t n = 0;
    for (int64_t c : counts) n += c;
    return n;
}

double CategoryDistribution::percentage(CloseCategory c) const {
    return pct(counts[cat_index(c)], total_known());
}

CategoryDistribution category_distribution(const Dataset& ds) {
    CategoryDistribution out;
    for (const auto& q : ds.questions) {
        if (!q.close_event) continue;
        if (q.close_event->category == CloseCategory::Unknown)
            ++out.unknown_count;
        else
            ++out.counts[cat_index(q.close_event->category)];
    }
    return out;
}

MonthlyClosedRatio monthly_closed_ratio(const Dataset& ds) {
    if (ds.questions.empty())
        fail_runtime("monthly closed ratio needs a dataset with questions");

    int64_t first = month_index(ds.questions.front().creation_time);
    int64_t last = first;
    for (const auto& q : ds.questions) {
        int64_t m = month_index(q.creation_time);
        first = std::min(first, m);
        last = std::max(last, m);
    }

    MonthlyClosedRatio out;
    out.rows.resize(static_cast<std::size_t>(last - first + 1));
    for (std::size_t i = 0; i < out.rows.size(); ++i) {
        out.rows[i].month_index = first + static_cast<int64_t>(i);
        out.rows[i].month = format_month(out.rows[i].month_index);
    }
    for (const auto& q : ds.questions) {
        auto& row = out.rows[static_cast<std::size_t>(month_index(q.creation_time) - first)];
        ++row.total;
        if (q.close_event) {
            ++row.closed;
            if (q.close_event->category != CloseCategory::Unknown)
                ++row.closed_by_category[cat_index(q.close_event->category)];
        }
    }
    for (auto& row : out.rows) {
        if (row.total > 0)
            row.ratio = static_cast<double>(row.closed) / static_cast<double>(row.total);
    }
    return out;
}

NewcomerCorrelation newcomer_correlation(const Dataset& ds) {
    if (ds.questions.empty() && ds.users.empty())
        fail_runtime("newcomer correlation needs a dataset with activity");

    bool any = false;
    int64_t first = 0, last = 0;
    auto see = [&](int64_t m) {
        if (!any) {
            first = last = m;
            any = true;
        } else {
            first = std::min(first, m);
            last = std::max(last, m);
        }
    };
    for (const auto& q : ds.questions) see(month_index(q.creation_time));
    for (const auto& u : ds.users) see(month_index(u.creation_time));

    NewcomerCorrelation out;
    out.rows.resize(static_cast<std::size_t>(last - first + 1));
    for (std::size_t i = 0; i < out.rows.size(); ++i) {
        out.rows[i].month_index = first + static_cast<int64_t>(i);
        out.rows[i].month = format_month(out.rows[i].month_index);
    }
    for (const auto& u : ds.users)
        ++out.rows[static_cast<std::size_t>(month_index(u.creation_time) - first)].new_users;
    for (const auto& q : ds.questions) {
        auto& row = out.rows[static_cast<std::size_t>(month_index(q.creation_time) - first)];
        ++row.questions;
        if (q.close_event) ++row.closed;
    }

    std::vector<double> cum_users_series, cum_pct_series;
    std::vector<double> monthly_users, monthly_pct;
    int64_t cum_users = 0, cum_questions = 0, cum_closed = 0;
    for (auto& row : out.rows) {
        cum_users += row.new_users;
        cum_questions += row.questions;
        cum_closed += row.closed;
        row.cumulative_users = static_cast<double>(cum_users);
        if (cum_questions > 0) {
            row.cumulative_closed_pct = pct(cum_closed, cum_questions);
            cum_users_series.push_back(static_cast<double>(cum_users));
            cum_pct_series.push_back(*row.cumulative_closed_pct);
        }
        if (row.questions > 0) {
            monthly_users.push_back(static_cast<double>(row.new_users));
            monthly_pct.push_back(pct(row.closed, row.questions));
        }
    }

    out.cumulative = stats::pearson(cum_users_series, cum_pct_series);
    try {
        out.per_month = stats::pearson(monthly_users, monthly_pct);
    } catch (const CqaError&) {
        out.per_month.reset();
    }
    return out;
}

int64_t CloseVoteDistribution::denominator() const {
    int64_t n = 0;
    for (int64_t b : buckets) n += b;
    return n;
}

CloseVoteDistribution close_vote_distribution(const Dataset& ds, bool by_category) {
    CloseVoteDistribution out;
    out.by_category = by_category;
    for (const auto& q : ds.questions) {
        if (!q.close_event) continue;
        const CloseEvent& ev = *q.close_event;
        if (!ev.has_vote_count()) {
            ++out.excluded_unknown;
            continue;
        }
        std::size_t bucket = static_cast<std::size_t>(ev.vote_count - 1);
        ++out.buckets[bucket];
        if (by_category && ev.category != CloseCategory::Unknown)
            ++out.category_buckets[cat_index(ev.category)][bucket];
    }
    return out;
}

FavoriteVoteCdf favorite_vote_cdf(const Dataset& ds, const std::vector<int>& thresholds,
                                  bool by_category) {
    FavoriteVoteCdf out;
    out.thresholds = thresholds;
    out.by_category = by_category;
    out.counts.assign(thresholds.size(), 0);
    for (auto& v : out.category_counts) v.assign(thresholds.size(), 0);

    for (const auto& q : ds.questions) {
        if (!q.close_event) continue;
        ++out.closed_total;
        bool categorized = by_category && known_category(q);
        if (categorized) ++out.category_totals[cat_index(q.close_event->category)];
        for (std::size_t i = 0; i < thresholds.size(); ++i) {
            if (q.favorite_count < thresholds[i]) continue;
            ++out.counts[i];
            if (categorized) ++out.category_counts[cat_index(q.close_event->category)][i];
        }
    }
    return out;
}

ClosureTimeStats closure_time_stats(const Dataset& ds) {
    std::array<std::vector<double>, kNumCloseCategories> per_cat;
    std::vector<double> all;
    for (const auto& q : ds.questions) {
        if (!q.close_event) continue;
        double hours = static_cast<double>(q.close_event->time - q.creation_time) / kSecondsPerHour;
        all.push_back(hours);
        if (q.close_event->category != CloseCategory::Unknown)
            per_cat[cat_index(q.close_event->category)].push_back(hours);
    }

    ClosureTimeStats out;
    for (int c = 0; c < kNumCloseCategories; ++c) {
        if (per_cat[static_cast<std::size_t>(c)].empty()) continue;
        ClosureTimeStats::Entry entry;
        entry.category = static_cast<CloseCategory>(c);
        entry.hours = stats::box_stats(std::move(per_cat[static_cast<std::size_t>(c)]));
        out.per_category.push_back(std::move(entry));
    }
    if (!all.empty()) out.overall = stats::box_stats(std::move(all));
    return out;
}

TagStatistics ntr(const Dataset& ds, double epsilon) {
    if (!(epsilon > 0.0)) fail_usage("epsilon must be positive");

    std::map<std::string, TagStatistics::Row> rows;
    int64_t cq_total = 0, ncq_total = 0;
    bool any_closed = false;
    for (const auto& q : ds.questions) {
        bool closed = q.is_closed();
        any_closed = any_closed || closed;
        for (const auto& t : q.tags) {
            auto& row = rows.try_emplace(t, TagStatistics::Row{t, 0, 0, 0, 0, 0}).first->second;
            if (closed) {
                ++row.cq_count;
                ++cq_total;
            } else {
                ++row.ncq_count;
                ++ncq_total;
            }
        }
    }
    if (!any_closed)
        fail_runtime("no_closed_questions", "tag ratio needs at least one closed question");

    TagStatistics out;
    out.epsilon = epsilon;
    out.cq_tag_occurrences = cq_total;
    out.ncq_tag_occurrences = ncq_total;
    for (auto& [tag, row] : rows) {
        if (row.cq_count == 0) continue;  // ranked list covers the closed corpus
        row.r_cq = cq_total ? static_cast<double>(row.cq_count) / static_cast<double>(cq_total) : 0.0;
        row.r_ncq = ncq_total ? static_cast<double>(row.ncq_count) / static_cast<double>(ncq_total) : 0.0;
        row.ntr = row.r_cq / (row.r_ncq + epsilon);
        out.rows.push_back(row);
    }
    std::sort(out.rows.begin(), out.rows.end(), [](const auto& a, const auto& b) {
        if (a.ntr != b.ntr) return a.ntr > b.ntr;
        return a.tag < b.tag;
    });
    return out;
}

AnswerPatternStats answer_pattern_stats(const Dataset& ds, int score_threshold) {
    struct Bucket {
        int64_t n = 0, answered = 0, accepted = 0, neg = 0, high = 0, zero = 0;
    };
    std::array<Bucket, kNumCloseCategories> cats;
    Bucket closed_all, open;

    auto add = [&](Bucket& b, const QuestionRecord& q) {
        ++b.n;
        if (q.answer_count >= 1) ++b.answered;
        if (q.accepted_answer_id) ++b.accepted;
        if (q.score < 0) ++b.neg;
        if (q.score >= score_threshold) ++b.high;
        if (q.score == 0) ++b.zero;
    };

    for (const auto& q : ds.questions) {
        if (q.close_event) {
            add(closed_all, q);
            if (known_category(q)) add(cats[cat_index(q.close_event->category)], q);
        } else {
            add(open, q);
        }
    }

    AnswerPatternStats out;
    out.score_threshold = score_threshold;
    auto emit = [&](const std::string& group, const Bucket& b) {
        AnswerPatternStats::Row row;
        row.group = group;
        row.n = b.n;
        row.pa = pct(b.answered, b.n);
        row.paa = pct(b.accepted, b.n);
        row.pac = pct(b.accepted, b.answered);
        row.qn = pct(b.neg, b.n);
        row.qt = pct(b.high, b.n);
        row.qz = pct(b.zero, b.n);
        out.rows.push_back(std::move(row));
    };
    for (int c = 0; c < kNumCloseCategories; ++c)
        emit(std::string(category_name(static_cast<CloseCategory>(c))),
             cats[static_cast<std::size_t>(c)]);
    emit("all_closed", closed_all);
    emit("non_closed", open);
    return out;
}

StatusDistribution question_status_distribution(const Dataset& ds) {
    StatusDistribution out;
    for (const auto& q : ds.questions) {
        if (!known_category(q)) continue;
        std::size_t c = cat_index(q.close_event->category);
        ++out.category_totals[c];
        const std::array<uint8_t, 3> flags = {kStatusLocked, kStatusCommunityWiki,
                                              kStatusProtected};
        for (std::size_t f = 0; f < flags.size(); ++f) {
            if (q.status_flags & flags[f]) {
                ++out.counts[c][f];
                ++out.flag_totals[f];
            }
        }
    }
    return out;
}

double CodePrevalence::closed_pct() const { return pct(closed_with_code, closed_total); }
double CodePrevalence::open_pct() const { return pct(open_with_code, open_total); }

CodePrevalence code_snippet_prevalence(const Dataset& ds) {
    CodePrevalence out;
    for (const auto& q : ds.questions) {
        bool has_code = text::analyze_body(q.body).code_snippet_length > 0;
        if (q.close_event) {
            ++out.closed_total;
            if (has_code) ++out.closed_with_code;
            if (known_category(q)) {
                std::size_t c = cat_index(q.close_event->category);
                ++out.category_totals[c];
                if (has_code) ++out.category_with_code[c];
            }
        } else {
            ++out.open_total;
            if (has_code) ++out.open_with_code;
        }
    }
    return out;
}

}  // namespace cqa
