#include "hsim/market.hpp"

#include <algorithm>
#include <cmath>

namespace hsim {

bool listing_before(const ListRecord& a, const ListRecord& b) {
    if (a.price != b.price) return a.price > b.price;
    return a.house < b.house;
}

bool bid_before(const BidRecord& a, const BidRecord& b) {
    if (a.price != b.price) return a.price > b.price;
    if (a.bidder != b.bidder) return a.bidder < b.bidder;
    return a.seq < b.seq;
}

namespace {

double price_listing(const House& h, const PopulationState& state, const ScenarioConfig& config,
                     const MarketStats& stats, int months_on_market) {
    const double qbar = comparable_quality(h, state.quality_index, config.model.comparable_count);
    if (h.owner.is_household()) {
        const Household& owner = state.household(h.owner.household);
        const Behavior& b = owner.behavior;
        return list_price(b.list_factor, qbar, stats.sold_to_list, b.sold_to_list_exponent,
                          seller_urgency(owner, h, config.model), months_on_market, b.months_listed_exponent);
    }
    const auto& p = config.internal;
    return list_price(p.list_factor.mean, qbar, stats.sold_to_list, p.sold_to_list_exponent.mean, 1.0,
                      months_on_market, p.months_listed_exponent.mean);
}

}  // namespace

ListingSummary collect_listings(MarketBook& book, PopulationState& state, const ScenarioConfig& config,
                                const MarketStats& stats, Rng& rng) {
    ListingSummary summary;
    for (auto& l : book.listings) {
        l.price = price_listing(state.house(l.house), state, config, stats, l.months_on_market);
        ++summary.carried;
    }
    const double p = config.internal.list_probability;
    for (auto& h : state.houses) {
        if (h.listed) continue;
        bool list = false;
        switch (h.owner.kind) {
            case PartyKind::household: list = bernoulli(rng, p); break;
            case PartyKind::developer: list = true; break;
            case PartyKind::overseas: break;
        }
        if (!list) continue;
        h.listed = true;
        book.listings.push_back({h.owner, h.id, price_listing(h, state, config, stats, 0), 0});
        ++summary.new_listings;
    }
    return summary;
}

BidSummary collect_bids(MarketBook& book, const PopulationState& state, const ScenarioConfig& config,
                        const BidTerms& terms, const MarketStats& stats, int month) {
    BidSummary summary;
    const double downshift = config.internal.expectation_downshift;
    for (const auto& hh : state.households) {
        if (static_cast<int>(hh.owned.size()) >= config.model.portfolio_cap) continue;
        const BidDecision d = decide_bid(hh, buyer_urgency(hh, config.model), terms, downshift);
        if (d.candidates.clamped) ++summary.clamped;
        if (!d.price) continue;
        book.bids.push_back({Party::of(hh.id), *d.price, month, 0});
        ++summary.household_bids;
    }

    if (stats.median_deal_price > 0.0) {
        const long shortfall = static_cast<long>(std::floor(state.overseas_capacity + 1e-9)) - state.overseas_holdings;
        const double price = stats.median_deal_price * config.internal.bid_factor.mean;
        for (long i = 0; i < shortfall; ++i) {
            book.bids.push_back({Party::overseas(), price, month, static_cast<std::uint32_t>(i)});
            ++summary.overseas_bids;
        }
    }
    return summary;
}

ClearingResult clear(MarketBook& book, double clearance_probability, Rng& rng, const SettleFn& settle) {
    ClearingResult result;
    std::sort(book.listings.begin(), book.listings.end(), listing_before);
    std::sort(book.bids.begin(), book.bids.end(), bid_before);

    std::vector<char> used(book.bids.size(), 0);
    std::vector<ListRecord> carried;
    std::size_t top = 0;
    for (auto& l : book.listings) {
        while (top < book.bids.size() && used[top]) ++top;
        std::size_t j = top;
        while (j < book.bids.size() && (used[j] || book.bids[j].bidder == l.seller)) ++j;

        if (j < book.bids.size() && book.bids[j].price >= l.price) {
            used[j] = 1;
            const bool coin = clearance_probability >= 1.0 || bernoulli(rng, clearance_probability);
            if (!coin) {
                ++result.coin_failures;
            } else if (settle(l, book.bids[j])) {
                result.deals.push_back({l, book.bids[j]});
                continue;
            } else {
                ++result.voided;
            }
        }
        ++l.months_on_market;
        carried.push_back(l);
    }
    book.listings = std::move(carried);
    book.bids.clear();
    return result;
}

}  // namespace hsim
