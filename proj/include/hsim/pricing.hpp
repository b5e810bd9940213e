#pragma once

#include <optional>

#include "hsim/household.hpp"
#include "hsim/population.hpp"
#include "hsim/scenario.hpp"

namespace hsim {

struct BidRecord {
    Party bidder;
    double price = 0.0;  // P_b
    int month = 0;
    std::uint32_t seq = 0;  // distinguishes multiple overseas bids
};

struct ListRecord {
    Party seller;
    HouseId house{};
    double price = 0.0;  // P_l
    int months_on_market = 0;  // D_h
};

/// Market-wide signals the agents react to, refreshed once per month from
/// completed months only.
struct MarketStats {
    double sold_to_list = 1.0;  // S
    double hpi_change = 0.0;    // annual fractional change of the repeat-sales index
    double median_deal_price = 0.0;  // 0 until the first deals
};

/// Period-level inputs of the bid formula at one month.
struct BidTerms {
    double owning_rate = 0.0;    // Phi_H, annual
    double mortgage_rate = 0.0;  // Phi_M[t], annual
    double lvr_mean = 0.0;       // Phi_LTV
    double income_coeff = 0.0;   // Phi_b
    double income_exponent = 0.0;  // Phi_I
    double income_unit = 1000.0;
    double aptitude = 0.0;  // h
    double hpi_change = 0.0;
    double denominator_floor = 0.005;

    static BidTerms from(const ScenarioConfig& config, double mortgage_rate, double hpi_change);
};

struct BidCandidates {
    double desired = 0.0;         // P1: mortgage-income capacity with trend feedback
    double wealth_limited = 0.0;  // P2: downpayment constraint
    double income_limited = 0.0;  // P3: debt-to-income constraint
    bool clamped = false;         // P1 denominator hit the floor

    double bid() const;
};

/// P1 = b_b Phi_b (12 I / unit)^Phi_I U_b / max(Phi_LTV Phi_M + Phi_H - h dHPI, floor)
/// P2 = b_ATW W / (1 - b_LTV)
/// P3 = b_DTI (12 I) / (b_LTV b_M)
BidCandidates bid_candidates(const Household& hh, double buyer_urgency, const BidTerms& terms);

struct BidDecision {
    std::optional<double> price;
    BidCandidates candidates;
};

/// Bids min(P1, P2, P3) when that is more than `downshift` of P1.
BidDecision decide_bid(const Household& hh, double buyer_urgency, const BidTerms& terms, double downshift);

double buyer_urgency(const Household& hh, const ModelOptions& options);

/// Below 1 when the owner is in debt or the listed house is an empty
/// investment property.
double seller_urgency(const Household& owner, const House& house, const ModelOptions& options);

/// Qbar_h: mean quality of the `k` houses most similar to `house`.
double comparable_quality(const House& house, const QualityIndex& index, int k);

/// P_l = b_l Qbar S^b_s U_l / (1 + D)^b_d
double list_price(double list_factor, double comparable_quality, double sold_to_list, double sold_to_list_exponent,
                  double urgency, int months_on_market, double months_listed_exponent);

}  // namespace hsim
