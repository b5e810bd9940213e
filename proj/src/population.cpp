#include "hsim/population.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "hsim/fiscal.hpp"

namespace hsim {

std::string to_string(const Party& party) {
    switch (party.kind) {
        case PartyKind::household: return "hh:" + std::to_string(index_of(party.household));
        case PartyKind::developer: return "developer";
        case PartyKind::overseas: return "overseas";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// QualityIndex

void QualityIndex::insert(HouseId id, double quality) {
    const Entry e{quality, id};
    const auto it = std::lower_bound(entries_.begin(), entries_.end(), e, [](const Entry& a, const Entry& b) {
        return a.quality < b.quality || (a.quality == b.quality && a.id < b.id);
    });
    entries_.insert(it, e);
}

double QualityIndex::comparable_mean(HouseId id, double quality, int k) const {
    const auto less = [](const Entry& a, const Entry& b) {
        return a.quality < b.quality || (a.quality == b.quality && a.id < b.id);
    };
    const auto pos = static_cast<std::ptrdiff_t>(
        std::lower_bound(entries_.begin(), entries_.end(), Entry{quality, id}, less) - entries_.begin());
    const auto n = static_cast<std::ptrdiff_t>(entries_.size());
    const bool self = pos < n && entries_[pos].id == id;
    if (n - (self ? 1 : 0) == 0) return quality;

    // Candidates: k nearest on each side plus any run tied with the k-th.
    std::vector<Entry> pool;
    pool.reserve(static_cast<std::size_t>(2 * k + 4));
    for (std::ptrdiff_t i = pos - 1, taken = 0; i >= 0; --i, ++taken) {
        if (taken >= k && entries_[i].quality != pool.back().quality) break;
        pool.push_back(entries_[i]);
    }
    for (std::ptrdiff_t i = pos + (self ? 1 : 0), taken = 0; i < n; ++i, ++taken) {
        if (taken >= k && entries_[i].quality != pool.back().quality) break;
        pool.push_back(entries_[i]);
    }
    std::sort(pool.begin(), pool.end(), [quality](const Entry& a, const Entry& b) {
        const double da = std::abs(a.quality - quality);
        const double db = std::abs(b.quality - quality);
        return da < db || (da == db && a.id < b.id);
    });
    const std::size_t take = std::min(pool.size(), static_cast<std::size_t>(k));
    double sum = 0.0;
    for (std::size_t i = 0; i < take; ++i) sum += pool[i].quality;
    return sum / static_cast<double>(take);
}

HouseId PopulationState::add_house(double quality, Party owner) {
    const HouseId id{static_cast<std::uint32_t>(houses.size())};
    House h;
    h.id = id;
    h.quality = quality;
    h.owner = owner;
    houses.push_back(h);
    quality_index.insert(id, quality);
    if (owner.kind == PartyKind::developer) ++developer_inventory;
    if (owner.kind == PartyKind::overseas) ++overseas_holdings;
    return id;
}

// ---------------------------------------------------------------------------
// Sampling

Behavior sample_behavior(const InternalParams& p, Rng& rng) {
    Behavior b;
    b.income_growth = sample_internal(p.income_growth, rng);
    b.consumption_income = sample_internal(p.consumption_income, rng);
    b.consumption_wealth = sample_internal(p.consumption_wealth, rng);
    b.rent_income = sample_internal(p.rent_income, rng);
    b.rent_mortgage = sample_internal(p.rent_mortgage, rng);
    b.downpayment_to_wealth = sample_internal(p.downpayment_to_wealth, rng);
    b.loan_to_value = sample_internal(p.loan_to_value, rng);
    b.debt_to_income = sample_internal(p.debt_to_income, rng);
    b.approval_rate = sample_internal(p.approval_rate, rng);
    b.bid_factor = sample_internal(p.bid_factor, rng);
    b.list_factor = sample_internal(p.list_factor, rng);
    b.sold_to_list_exponent = sample_internal(p.sold_to_list_exponent, rng);
    b.months_listed_exponent = sample_internal(p.months_listed_exponent, rng);
    return b;
}

Household sample_household(HouseholdId id, const ScenarioConfig& config, Rng& rng) {
    Household hh;
    hh.id = id;
    hh.income = sample_bracket(config.income_dist, rng) * config.income_dist.monthly_factor();
    hh.wealth = sample_bracket(config.wealth_dist, rng) * config.wealth_dist.monthly_factor();
    hh.behavior = sample_behavior(config.internal, rng);
    return hh;
}

double sample_initial_quality(const ScenarioConfig& config, Rng& rng) {
    const double s = config.initial_price_sigma;
    std::lognormal_distribution<double> dist(std::log(config.initial_price_mean) - 0.5 * s * s, s);
    return dist(rng);
}

namespace {

void transfer_to_household(PopulationState& state, House& house, Household& hh) {
    if (house.owner.kind == PartyKind::developer) --state.developer_inventory;
    house.owner = Party::of(hh.id);
    hh.owned.push_back(house.id);
}

}  // namespace

PopulationState synthesize_population(const ScenarioConfig& config, Rng& rng) {
    PopulationState s;
    const int n = config.n_sim_households;
    s.households.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        s.households.push_back(sample_household(HouseholdId(static_cast<std::uint32_t>(i)), config, rng));
    }

    const long n_houses = std::max(1L, std::lround(config.external.initial_dwelling_count / config.scale_factor));
    s.houses.reserve(static_cast<std::size_t>(n_houses));
    for (long i = 0; i < n_houses; ++i) s.add_house(sample_initial_quality(config, rng), Party::developer());

    std::vector<std::uint32_t> agents(static_cast<std::size_t>(n));
    std::iota(agents.begin(), agents.end(), 0u);
    std::shuffle(agents.begin(), agents.end(), rng);
    std::vector<std::uint32_t> stock(static_cast<std::size_t>(n_houses));
    std::iota(stock.begin(), stock.end(), 0u);
    std::shuffle(stock.begin(), stock.end(), rng);

    const auto& opt = config.model;
    const long n_owners = std::min<long>(std::lround(opt.owner_occupier_fraction * n), n_houses);
    std::size_t next_house = 0;
    for (long k = 0; k < n_owners; ++k) {
        Household& hh = s.households[agents[static_cast<std::size_t>(k)]];
        House& h = s.houses[stock[next_house++]];
        transfer_to_household(s, h, hh);
        h.occupancy = Occupancy::owner_occupied;
        hh.tenure = Tenure::owner;
        hh.residence = h.id;
    }

    const long n_valence =
        n_owners == 0 ? 0
                      : std::min<long>(std::lround(opt.investor_stock_share * static_cast<double>(n_houses)),
                                       n_houses - n_owners);
    for (long k = 0; k < n_valence; ++k) {
        // Rejection-sample an owner-occupier below the portfolio cap.
        Household* investor = nullptr;
        for (int attempt = 0; attempt < 64 && !investor; ++attempt) {
            const auto pick = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n_owners));
            Household& cand = s.households[agents[std::min(pick, static_cast<std::size_t>(n_owners - 1))]];
            if (static_cast<int>(cand.owned.size()) < opt.portfolio_cap) investor = &cand;
        }
        if (!investor) break;
        House& h = s.houses[stock[next_house++]];
        transfer_to_household(s, h, *investor);
    }

    // Existing loans: repayment from the mortgage brackets, random seasoning.
    const double rate = config.level_at(config.external.mortgage_rate_series, 0);
    const int term = config.external.mortgage_duration_months;
    for (auto& hh : s.households) {
        for (HouseId id : hh.owned) {
            if (!bernoulli(rng, opt.initial_mortgage_fraction)) continue;
            Mortgage m;
            m.house = id;
            m.monthly_payment = sample_bracket(config.mortgage_dist, rng) * config.mortgage_dist.monthly_factor();
            m.remaining_months = 1 + static_cast<int>(uniform01(rng) * term);
            m.annual_rate = rate;
            m.principal = annuity_principal(m.monthly_payment, rate, m.remaining_months);
            if (m.monthly_payment > 0.0) hh.mortgages.push_back(m);
        }
    }

    s.overseas_capacity = config.level_at(config.external.overseas_capacity_series, 0) / config.scale_factor;
    update_tenancies(s, config, rng);
    return s;
}

DemographicChange apply_demographics(PopulationState& state, const ScenarioConfig& config, int m,
                                     std::span<const double> recent_deal_prices, Rng& rng) {
    DemographicChange change;
    const auto& ext = config.external;
    const double scale = config.scale_factor;

    if (m > 0) {
        const double delta =
            config.level_at(ext.household_count_series, m) - config.level_at(ext.household_count_series, m - 1);
        // Shrinking populations are not modelled; agents never leave.
        const long entering = delta > 0.0 ? stochastic_round(delta / scale, rng) : 0;
        for (long i = 0; i < entering; ++i) {
            const HouseholdId id{static_cast<std::uint32_t>(state.households.size())};
            state.households.push_back(sample_household(id, config, rng));
            ++change.households_added;
        }
    }

    const long built = stochastic_round(config.flow_at(ext.construction_series, m) / scale, rng);
    for (long i = 0; i < built; ++i) {
        double quality = 0.0;
        if (!recent_deal_prices.empty()) {
            const auto pick = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(recent_deal_prices.size()));
            quality = recent_deal_prices[std::min(pick, recent_deal_prices.size() - 1)];
        } else {
            quality = sample_initial_quality(config, rng);
        }
        state.add_house(quality, Party::developer());
        ++change.houses_built;
    }

    state.overseas_capacity = config.level_at(ext.overseas_capacity_series, m) / scale;
    return change;
}

void export_population(const PopulationState& state, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream hh(dir / "households.csv");
    hh << "id,income,wealth,tenure,residence,houses_owned,mortgages,months_since_sale\n";
    for (const auto& h : state.households) {
        const char* tenure = h.tenure == Tenure::owner ? "owner" : h.tenure == Tenure::tenant ? "tenant" : "unhoused";
        hh << index_of(h.id) << ',' << h.income << ',' << h.wealth << ',' << tenure << ',';
        if (h.tenure != Tenure::unhoused) hh << index_of(h.residence);
        hh << ',' << h.owned.size() << ',' << h.mortgages.size() << ',' << h.months_since_sale << '\n';
    }
    std::ofstream hs(dir / "houses.csv");
    hs << "id,quality,owner,occupancy,tenant,rent,listed\n";
    for (const auto& h : state.houses) {
        const char* occ = h.occupancy == Occupancy::owner_occupied ? "owner"
                          : h.occupancy == Occupancy::rented       ? "rented"
                                                                   : "vacant";
        hs << index_of(h.id) << ',' << h.quality << ',' << to_string(h.owner) << ',' << occ << ',';
        if (h.occupancy == Occupancy::rented) hs << index_of(h.tenant);
        hs << ',' << h.rent << ',' << (h.listed ? 1 : 0) << '\n';
    }
}

}  // namespace hsim
