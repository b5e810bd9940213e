#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include "hsim/fiscal.hpp"
#include "hsim/market.hpp"
#include "hsim/population.hpp"
#include "hsim/price_index.hpp"
#include "hsim/pricing.hpp"
#include "hsim/scenario.hpp"

namespace hsim {

struct MonthDiagnostics {
    int month = 0;
    int households = 0;
    int houses = 0;
    int households_added = 0;
    int houses_built = 0;
    int household_bids = 0;
    int overseas_bids = 0;
    int clamped = 0;
    int new_listings = 0;
    int carried_listings = 0;
    int deals = 0;
    int coin_failures = 0;
    int voided = 0;
    double mortgage_rate = 0.0;
    double sold_to_list = 1.0;
    double hpi_change = 0.0;
    double mean_accepted_bid = 0.0;  // 0 without deals
};

/// Household-sector wealth balance of one month. Wealth of households that
/// enter in the month counts from the start.
struct MonthAccounts {
    double wealth_start = 0.0;
    double wealth_end = 0.0;
    MonthlyFlows flows;
    double buyer_outlays = 0.0;    // downpayments plus purchase tax
    double seller_proceeds = 0.0;  // price less discharged principal
    double rent_to_overseas = 0.0;
    double rent_internal = 0.0;    // paid to household landlords

    /// wealth_end - (wealth_start + flows - outlays + proceeds)
    double residual() const;
    /// Magnitude the residual is judged against.
    double scale() const;
};

/// One trajectory's mutable world. Copyable, so a month can be replayed
/// from a snapshot under a counterfactual.
class Simulation {
public:
    Simulation(const ScenarioConfig& config, std::uint64_t seed);

    /// Advances one month: demographics and construction, budgets, market
    /// statistics, bids, listings, clearing with settlement, tenancies, records.
    void step();

    int month() const { return state_.month; }
    bool finished() const { return state_.month >= config_->total_months(); }

    const ScenarioConfig& config() const { return *config_; }
    const PopulationState& state() const { return state_; }
    PopulationState& mutable_state() { return state_; }
    const MarketBook& book() const { return book_; }
    const MarketStats& stats() const { return stats_; }
    const std::vector<Transaction>& transactions() const { return log_; }
    const std::vector<MonthDiagnostics>& diagnostics() const { return diagnostics_; }
    const std::vector<MonthAccounts>& accounts() const { return accounts_; }
    const RepeatSalesRegression& regression() const { return regression_; }

    double aptitude() const { return aptitude_; }
    void set_aptitude(double h) { aptitude_ = h; }

    /// Called each month with the state and terms the bids were formed from.
    using BidObserver = std::function<void(const PopulationState&, const BidTerms&)>;
    void set_bid_observer(BidObserver observer) { bid_observer_ = std::move(observer); }

    /// Drop the transaction log as months complete (ensembles keep only the
    /// monthly aggregates).
    void set_keep_transactions(bool keep) { keep_log_ = keep; }
    const std::vector<double>& monthly_deal_sums() const { return deal_sum_; }
    const std::vector<int>& monthly_deal_counts() const { return deal_count_; }

    /// FNV-1a over the household and house state.
    std::uint64_t state_hash() const;

private:
    void refresh_stats();

    const ScenarioConfig* config_;
    Rng rng_;
    PopulationState state_;
    MarketBook book_;
    MarketStats stats_;
    RepeatSalesRegression regression_;
    double aptitude_;
    bool keep_log_ = true;
    BidObserver bid_observer_;
    std::vector<Transaction> log_;
    std::vector<Transaction> last_month_;
    std::vector<double> recent_prices_;
    std::deque<std::vector<double>> household_deals_;  // trailing 12 months
    std::vector<double> deal_sum_;
    std::vector<int> deal_count_;
    std::vector<MonthDiagnostics> diagnostics_;
    std::vector<MonthAccounts> accounts_;
};

struct TrajectoryOptions {
    bool keep_transactions = true;
    int moving_average_window = 12;
};

/// Calendar months only, except where noted.
struct TrajectoryOutput {
    std::uint64_t seed = 0;
    std::vector<YearMonth> months;
    PriceSeries prices;  // moving averages draw on equilibration months too
    IndexSeries index;   // rebased to 1 at the first reported month
    std::vector<double> hpi_change;  // feedback signal used in each month
    std::vector<Transaction> transactions;  // every month, simulation month numbering
    std::vector<MonthDiagnostics> diagnostics;
    std::vector<MonthAccounts> accounts;
    int equilibration_months = 0;
    /// Monthly means of the window - 1 months before the calendar start.
    std::vector<YearMonth> warmup_months;
    std::vector<MaybePrice> warmup_mean;
};

TrajectoryOutput run_trajectory(const ScenarioConfig& config, std::uint64_t seed, const TrajectoryOptions& options = {});

/// Type-7 sample quantile of `values` (sorted internally).
double quantile(std::vector<double> values, double p);

struct EnsembleOutput {
    std::uint64_t master_seed = 0;
    std::vector<std::uint64_t> seeds;
    std::vector<YearMonth> months;
    std::vector<std::vector<MaybePrice>> moving_avg;  // [trajectory][month]
    std::vector<std::vector<MaybePrice>> mean_price;  // [trajectory][month]
    std::vector<double> q5, q25, median, q75, q95;    // NaN where no trajectory has data
    std::vector<YearMonth> warmup_months;
    std::vector<std::vector<MaybePrice>> warmup_mean;  // [trajectory][month]
    int clamped = 0;
    int voided = 0;
    int deals = 0;

    int size() const { return static_cast<int>(seeds.size()); }
};

/// Trajectory i runs with derive_seed(master_seed, i). Output does not
/// depend on `jobs`.
EnsembleOutput run_ensemble(const ScenarioConfig& config, int n, std::uint64_t master_seed, int jobs);

struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<int> counts;
};

struct EnsembleSummary {
    std::optional<double> start_end_correlation;  // none for n < 2 or zero variance
    std::vector<std::pair<double, double>> start_end;
    double final_cv = 0.0;  // population std / mean of final-month moving averages
    std::vector<Histogram> histograms;  // per reported month
};

std::optional<double> pearson(const std::vector<std::pair<double, double>>& xy);
double coefficient_of_variation(const std::vector<double>& values);
Histogram histogram(const std::vector<double>& values, int bins);

EnsembleSummary ensemble_stats(const EnsembleOutput& out, int bins = 20);

}  // namespace hsim
