#include "hsim/pricing.hpp"

#include <algorithm>
#include <cmath>

namespace hsim {

BidTerms BidTerms::from(const ScenarioConfig& config, double mortgage_rate, double hpi_change) {
    const auto& e = config.external;
    BidTerms t;
    t.owning_rate = e.house_owning_expense_rate;
    t.mortgage_rate = mortgage_rate;
    t.lvr_mean = e.lvr_mean;
    t.income_coeff = e.mortgage_income_coeff;
    t.income_exponent = e.mortgage_income_exponent;
    t.income_unit = e.mortgage_income_unit;
    t.aptitude = config.trend_aptitude;
    t.hpi_change = hpi_change;
    t.denominator_floor = config.model.p1_denominator_floor;
    return t;
}

double BidCandidates::bid() const { return std::min({desired, wealth_limited, income_limited}); }

BidCandidates bid_candidates(const Household& hh, double urgency, const BidTerms& t) {
    const Behavior& b = hh.behavior;
    const double annual_income = 12.0 * hh.income;
    BidCandidates c;

    double denom = t.lvr_mean * t.mortgage_rate + t.owning_rate - t.aptitude * t.hpi_change;
    if (denom < t.denominator_floor) {
        denom = t.denominator_floor;
        c.clamped = true;
    }
    c.desired = b.bid_factor * t.income_coeff * std::pow(annual_income / t.income_unit, t.income_exponent) * urgency /
                denom;
    c.wealth_limited = b.downpayment_to_wealth * hh.wealth / (1.0 - b.loan_to_value);
    c.income_limited = b.debt_to_income * annual_income / (b.loan_to_value * b.approval_rate);
    return c;
}

BidDecision decide_bid(const Household& hh, double urgency, const BidTerms& terms, double downshift) {
    BidDecision d;
    d.candidates = bid_candidates(hh, urgency, terms);
    const double bid = d.candidates.bid();
    if (d.candidates.desired > 0.0 && bid > 0.0 && bid / d.candidates.desired > downshift) d.price = bid;
    return d;
}

double buyer_urgency(const Household& hh, const ModelOptions& options) {
    if (hh.months_since_sale >= 0 && hh.months_since_sale <= options.buyer_urgency_months) {
        return options.buyer_urgency;
    }
    return 1.0;
}

double seller_urgency(const Household& owner, const House& house, const ModelOptions& options) {
    const bool vacant_investment =
        house.occupancy == Occupancy::vacant && !(owner.tenure == Tenure::owner && owner.residence == house.id);
    if (owner.wealth < 0.0 || vacant_investment) return options.seller_urgency;
    return 1.0;
}

double comparable_quality(const House& house, const QualityIndex& index, int k) {
    return index.comparable_mean(house.id, house.quality, k);
}

double list_price(double list_factor, double comparable_quality, double sold_to_list, double sold_to_list_exponent,
                  double urgency, int months_on_market, double months_listed_exponent) {
    return list_factor * comparable_quality * std::pow(sold_to_list, sold_to_list_exponent) * urgency /
           std::pow(1.0 + months_on_market, months_listed_exponent);
}

}  // namespace hsim
