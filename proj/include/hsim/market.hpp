#pragma once

#include <functional>
#include <vector>

#include "hsim/population.hpp"
#include "hsim/pricing.hpp"
#include "hsim/rng.hpp"
#include "hsim/scenario.hpp"

namespace hsim {

struct Transaction {
    int month = 0;
    HouseId house{};
    Party buyer;
    Party seller;
    double deal_price = 0.0;
    double list_price = 0.0;
    int months_on_market = 0;
};

/// This month's bids plus listings, which persist across months until sold.
struct MarketBook {
    std::vector<BidRecord> bids;
    std::vector<ListRecord> listings;
};

/// Book ordering: price descending, then house id / bidder ascending.
bool listing_before(const ListRecord& a, const ListRecord& b);
bool bid_before(const BidRecord& a, const BidRecord& b);

struct ListingSummary {
    int new_listings = 0;
    int carried = 0;
};

/// Lists each unlisted household-owned house with the list probability and
/// every unlisted developer house; reprices listings carried from earlier
/// months. Overseas holdings are never listed.
ListingSummary collect_listings(MarketBook& book, PopulationState& state, const ScenarioConfig& config,
                                const MarketStats& stats, Rng& rng);

struct BidSummary {
    int household_bids = 0;
    int overseas_bids = 0;
    int clamped = 0;  // P1 denominators that hit the floor
};

/// One bid per household under the portfolio cap that passes the
/// expectation-downshift gate, plus (capacity - holdings) overseas bids at the
/// median recent deal price times the mean bid factor.
BidSummary collect_bids(MarketBook& book, const PopulationState& state, const ScenarioConfig& config,
                        const BidTerms& terms, const MarketStats& stats, int month);

struct Match {
    ListRecord listing;
    BidRecord bid;
};

/// Returns false when settlement voids the deal.
using SettleFn = std::function<bool(const ListRecord&, const BidRecord&)>;

struct ClearingResult {
    std::vector<Match> deals;
    int coin_failures = 0;
    int voided = 0;
};

/// One pass over listings from the highest list price down; each takes the
/// highest remaining bid at or above its price (never the seller's own).
/// A found pair trades with `clearance_probability`; otherwise the bid is
/// spent for the month and the listing waits. Unsold listings carry over
/// with one more month on market. Empties the bids.
ClearingResult clear(MarketBook& book, double clearance_probability, Rng& rng, const SettleFn& settle);

}  // namespace hsim
