#include "hsim/price_index.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hsim {

MaybePrice monthly_mean(std::span<const Transaction> log, int month) {
    double sum = 0.0;
    int n = 0;
    for (const auto& t : log) {
        if (t.month != month) continue;
        sum += t.deal_price;
        ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / n;
}

std::vector<MaybePrice> moving_average(std::span<const MaybePrice> series, int window) {
    if (window < 1) throw std::invalid_argument("moving average window must be >= 1");
    std::vector<MaybePrice> out(series.size());
    for (std::size_t t = 0; t < series.size(); ++t) {
        const std::size_t lo = t + 1 >= static_cast<std::size_t>(window) ? t + 1 - window : 0;
        double sum = 0.0;
        int n = 0;
        for (std::size_t k = lo; k <= t; ++k) {
            if (!series[k]) continue;
            sum += *series[k];
            ++n;
        }
        if (n > 0) out[t] = sum / n;
    }
    return out;
}

PriceSeries price_series(std::span<const Transaction> log, int months, int window) {
    PriceSeries s;
    std::vector<double> sum(static_cast<std::size_t>(months), 0.0);
    s.count.assign(static_cast<std::size_t>(months), 0);
    for (const auto& t : log) {
        if (t.month < 0 || t.month >= months) continue;
        sum[static_cast<std::size_t>(t.month)] += t.deal_price;
        ++s.count[static_cast<std::size_t>(t.month)];
    }
    s.mean.resize(static_cast<std::size_t>(months));
    for (std::size_t m = 0; m < sum.size(); ++m) {
        if (s.count[m] > 0) s.mean[m] = sum[m] / s.count[m];
    }
    s.moving_avg = moving_average(s.mean, window);
    return s;
}

double IndexSeries::at(int month) const { return std::exp(log_index[static_cast<std::size_t>(month)]); }

RepeatSalesRegression::RepeatSalesRegression(int months)
    : months_(months),
      xtx_(Eigen::MatrixXd::Zero(std::max(months - 1, 0), std::max(months - 1, 0))),
      xty_(Eigen::VectorXd::Zero(std::max(months - 1, 0))),
      touched_(static_cast<std::size_t>(months), 0) {}

void RepeatSalesRegression::add_sale(HouseId house, int month, double price) {
    const std::size_t i = index_of(house);
    if (i >= last_.size()) last_.resize(i + 1);
    LastSale& last = last_[i];
    if (last.month >= 0) add_pair(last.month, last.price, month, price);
    last = {month, price};
}

void RepeatSalesRegression::add_pair(int a, double pa, int b, double pb) {
    if (a == b || pa <= 0.0 || pb <= 0.0) return;  // same-month resales carry no information
    if (a < 0 || b < 0 || a >= months_ || b >= months_) throw std::out_of_range("repeat sale outside index window");
    const double y = std::log(pb / pa);
    // Dummy column k is month k+1; month 0 has no column.
    const int ia = a - 1;
    const int ib = b - 1;
    if (ia >= 0) {
        xtx_(ia, ia) += 1.0;
        xty_(ia) -= y;
    }
    if (ib >= 0) {
        xtx_(ib, ib) += 1.0;
        xty_(ib) += y;
    }
    if (ia >= 0 && ib >= 0) {
        xtx_(ia, ib) -= 1.0;
        xtx_(ib, ia) -= 1.0;
    }
    ++touched_[static_cast<std::size_t>(a)];
    ++touched_[static_cast<std::size_t>(b)];
    ++pairs_;
}

IndexSeries RepeatSalesRegression::solve(int through) const {
    through = std::min(through, months_ - 1);
    IndexSeries out;
    const auto n = static_cast<std::size_t>(through + 1);
    out.log_index.assign(n, 0.0);
    out.pair_count.assign(touched_.begin(), touched_.begin() + static_cast<std::ptrdiff_t>(n));
    if (through < 1 || pairs_ == 0) return out;

    const Eigen::VectorXd beta =
        xtx_.topLeftCorner(through, through).completeOrthogonalDecomposition().solve(xty_.head(through));
    std::vector<int> known{0};
    for (int m = 1; m <= through; ++m) {
        out.log_index[static_cast<std::size_t>(m)] = beta(m - 1);
        if (touched_[static_cast<std::size_t>(m)] > 0) known.push_back(m);
    }

    // Fill the gaps between identified months.
    std::size_t k = 0;
    for (int m = 1; m <= through; ++m) {
        while (k + 1 < known.size() && known[k + 1] <= m) ++k;
        if (known[k] == m) continue;
        const int lo = known[k];
        const double v_lo = out.log_index[static_cast<std::size_t>(lo)];
        if (k + 1 == known.size()) {
            out.log_index[static_cast<std::size_t>(m)] = v_lo;
            continue;
        }
        const int hi = known[k + 1];
        const double w = static_cast<double>(m - lo) / (hi - lo);
        out.log_index[static_cast<std::size_t>(m)] = v_lo + w * (out.log_index[static_cast<std::size_t>(hi)] - v_lo);
    }
    return out;
}

IndexSeries bmn_index(std::span<const Transaction> log, int months) {
    RepeatSalesRegression reg(months);
    // Chronological replay; within a month the log order decides which sale
    // pairs with which, but a house sells at most once per month.
    std::vector<const Transaction*> sorted;
    sorted.reserve(log.size());
    for (const auto& t : log) sorted.push_back(&t);
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Transaction* a, const Transaction* b) { return a->month < b->month; });
    for (const Transaction* t : sorted) reg.add_sale(t->house, t->month, t->deal_price);
    return reg.solve(months - 1);
}

double annual_change(const IndexSeries& index, int t) {
    if (t < 13 || t - 1 >= index.months()) return 0.0;
    return index.at(t - 1) / index.at(t - 13) - 1.0;
}

}  // namespace hsim
