#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hsim/market.hpp"

namespace hsim {

using MaybePrice = std::optional<double>;

/// Monthly price statistics over months [0, size).
struct PriceSeries {
    std::vector<MaybePrice> mean;        // none in months without deals
    std::vector<int> count;
    std::vector<MaybePrice> moving_avg;  // trailing window
};

/// Mean deal price of `month`, none without deals.
MaybePrice monthly_mean(std::span<const Transaction> log, int month);

/// Trailing mean over the last `window` months of the defined values only.
std::vector<MaybePrice> moving_average(std::span<const MaybePrice> series, int window = 12);

PriceSeries price_series(std::span<const Transaction> log, int months, int window = 12);

struct IndexSeries {
    std::vector<double> log_index;  // month 0 is the base, fixed at 0
    std::vector<int> pair_count;    // pairs touching each month

    double at(int month) const;  // exp(log_index)
    int months() const { return static_cast<int>(log_index.size()); }
};

/// Incremental repeat-sales (BMN) regression: each resale of a house adds the
/// log price ratio to its previous sale with -1/+1 dummies on the two months.
/// The normal equations are accumulated so a solve costs O(months^3)
/// regardless of how many pairs have been seen.
class RepeatSalesRegression {
public:
    explicit RepeatSalesRegression(int months);

    void add_sale(HouseId house, int month, double price);
    void add_pair(int first_month, double first_price, int second_month, double second_price);

    /// Index over months [0, through]. Months no pair touches are
    /// log-linearly interpolated between their identified neighbours and held
    /// flat beyond the ends; without any pair the index is flat at 1.
    IndexSeries solve(int through) const;

    int pairs() const { return pairs_; }

private:
    struct LastSale {
        int month = -1;
        double price = 0.0;
    };
    int months_;
    Eigen::MatrixXd xtx_;  // over months 1..months-1
    Eigen::VectorXd xty_;
    std::vector<int> touched_;
    std::vector<LastSale> last_;
    int pairs_ = 0;
};

/// Index from a full transaction log over `months` months.
IndexSeries bmn_index(std::span<const Transaction> log, int months);

/// index[t-1] / index[t-13] - 1, or 0 while t < 13.
double annual_change(const IndexSeries& index, int t);

}  // namespace hsim
