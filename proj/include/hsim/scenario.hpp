#pragma once

#include <compare>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hsim/rng.hpp"

namespace hsim {

/// Raised for anything wrong with scenario inputs: unreadable files, bad
/// syntax, or values that break a documented invariant.
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct YearMonth {
    int year = 2000;
    int month = 1;  // 1..12

    static YearMonth parse(const std::string& text);  // "YYYY-MM"
    std::string str() const;

    YearMonth plus(int months) const;
    /// Signed number of months from this to `later`.
    int months_until(const YearMonth& later) const;

    friend bool operator==(const YearMonth&, const YearMonth&) = default;
    friend auto operator<=>(const YearMonth&, const YearMonth&) = default;
};

/// Values on a contiguous monthly grid starting at `start`.
struct MonthlySeries {
    YearMonth start;
    std::vector<double> values;

    bool empty() const { return values.empty(); }
    YearMonth last() const { return start.plus(static_cast<int>(values.size()) - 1); }
    bool covers(const YearMonth& ym) const;
    double at(const YearMonth& ym) const;

    friend bool operator==(const MonthlySeries&, const MonthlySeries&) = default;
};

struct TaxBracket {
    double lower = 0.0;  // annual AUD
    double rate = 0.0;   // marginal rate above `lower`

    friend bool operator==(const TaxBracket&, const TaxBracket&) = default;
};

/// How a bracket distribution's amounts are expressed in its file.
enum class AmountBasis { stock, weekly, monthly, annual };

struct BracketDistribution {
    struct Bracket {
        double lower = 0.0;
        double mass = 0.0;
        friend bool operator==(const Bracket&, const Bracket&) = default;
    };
    std::vector<Bracket> brackets;
    AmountBasis basis = AmountBasis::stock;

    /// Factor turning a file amount into a monthly AUD flow (1 for stocks).
    double monthly_factor() const;
    /// Analytic mean under the uniform-within-bracket rule, in file units.
    double mean() const;

    friend bool operator==(const BracketDistribution&, const BracketDistribution&) = default;
};

/// Period-level environment: taxes, lending and the monthly series.
struct ExternalParams {
    std::vector<TaxBracket> tax_brackets;
    double house_owning_expense_rate = 0.042;  // annual, fraction of quality
    double purchase_tax_rate = 0.05;
    MonthlySeries mortgage_rate_series;  // annual fractions
    int mortgage_duration_months = 360;
    double lvr_mean = 0.6;
    double lvr_halfwidth = 0.125;
    double mortgage_income_coeff = 1141.7;
    double mortgage_income_exponent = 0.80;
    /// Divisor applied to annual income before the mortgage-income power law
    /// (the regression is in thousands of AUD).
    double mortgage_income_unit = 1000.0;
    MonthlySeries overseas_capacity_series;  // cumulative dwellings, real
    MonthlySeries construction_series;       // new dwellings per month, real
    MonthlySeries household_count_series;    // households, real
    double initial_dwelling_count = 0.0;     // real dwellings at calendar start

    friend bool operator==(const ExternalParams&, const ExternalParams&) = default;
};

/// Heterogeneous agent parameter: uniform on [mean - halfwidth, mean + halfwidth].
struct Spread {
    double mean = 0.0;
    double halfwidth = 0.0;
    friend bool operator==(const Spread&, const Spread&) = default;
};

/// Behavioural parameters, drawn per agent from uniform spreads.
struct InternalParams {
    Spread income_growth{0.002, 0.001};        // b_I
    Spread consumption_income{0.6, 0.0};       // b_CI
    Spread consumption_wealth{0.0025, 0.0};    // b_CW
    Spread rent_income{0.2, 0.1};              // b_RI
    Spread rent_mortgage{1.25, 0.25};          // b_RH
    Spread downpayment_to_wealth{0.9, 0.0};    // b_ATW
    Spread loan_to_value{0.9, 0.0};            // b_LTV
    Spread debt_to_income{0.4, 0.0};           // b_DTI
    Spread approval_rate{0.07, 0.0};           // b_M
    Spread bid_factor{1.29, 0.29};             // b_b
    Spread list_factor{1.70, 0.5};             // b_l
    Spread sold_to_list_exponent{0.22, 0.0};   // b_s
    Spread months_listed_exponent{0.01, 0.0};  // b_d
    double expectation_downshift = 0.6;
    double list_probability = 0.01;
    double clearance_probability = 0.8;

    friend bool operator==(const InternalParams&, const InternalParams&) = default;
};

enum class DealPriceRule { bid, list };

/// Model knobs the calibrated tables do not pin down. Every default here is
/// an engineering choice, not a published value.
struct ModelOptions {
    double buyer_urgency = 1.2;
    int buyer_urgency_months = 6;
    double seller_urgency = 0.9;
    int portfolio_cap = 5;
    double p1_denominator_floor = 0.005;
    double owner_occupier_fraction = 0.64;
    double investor_stock_share = 0.30;
    double initial_mortgage_fraction = 0.5;
    double settlement_overdraft = 0.0;
    int comparable_count = 10;
    DealPriceRule deal_price = DealPriceRule::bid;

    friend bool operator==(const ModelOptions&, const ModelOptions&) = default;
};

struct ScenarioConfig {
    std::string name;
    ExternalParams external;
    InternalParams internal;
    ModelOptions model;
    BracketDistribution income_dist;
    BracketDistribution wealth_dist;
    BracketDistribution rent_dist;
    BracketDistribution mortgage_dist;
    double trend_aptitude = 0.0;  // h
    double scale_factor = 10.0;   // real households per simulated household
    int n_sim_households = 0;
    int equilibration_months = 26;
    int calendar_months = 30;
    YearMonth calendar_start;
    double initial_price_mean = 0.0;
    double initial_price_sigma = 0.4;

    int total_months() const { return equilibration_months + calendar_months; }
    /// Calendar date of simulation month `m` (month 0 is the first
    /// equilibration month).
    YearMonth date_of(int m) const { return calendar_start.plus(m - equilibration_months); }

    /// Level-type series value at simulation month `m`; months the series
    /// does not cover take the calendar-start value.
    double level_at(const MonthlySeries& series, int m) const;
    /// Flow-type series value at simulation month `m`; uncovered months are 0.
    double flow_at(const MonthlySeries& series, int m) const;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

using Overrides = std::map<std::string, std::string>;

/// Loads `path` (a scenario directory holding scenario.conf, or the conf file
/// itself). Overrides replace conf values before validation.
ScenarioConfig load_scenario(const std::filesystem::path& path, const Overrides& overrides = {});

/// Writes a scenario directory that loads back to an identical config.
void save_scenario(const ScenarioConfig& config, const std::filesystem::path& dir);

/// Throws ScenarioError naming the first violated invariant.
void validate(const ScenarioConfig& config);

/// Changes the simulated population size, rescaling so the real-count series
/// stay consistent.
void set_household_count(ScenarioConfig& config, int n_sim_households);

double sample_bracket(const BracketDistribution& dist, Rng& rng);
double sample_internal(const Spread& spread, Rng& rng);

/// Average tax rate of a progressive schedule; income below the first bound
/// is untaxed.
double effective_tax_rate(double annual_income, const std::vector<TaxBracket>& brackets);

std::vector<std::string> scenario_keys();

}  // namespace hsim
