#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "hsim/household.hpp"
#include "hsim/rng.hpp"
#include "hsim/scenario.hpp"

namespace hsim {

/// Houses ordered by (quality, id) for nearest-quality queries.
class QualityIndex {
public:
    void insert(HouseId id, double quality);

    /// Mean quality of the `k` houses closest in quality to `id` (itself
    /// excluded), ties broken by smaller house id. Fewer than `k` other houses
    /// means all of them; a lone house returns its own quality.
    double comparable_mean(HouseId id, double quality, int k) const;

    std::size_t size() const { return entries_.size(); }

private:
    struct Entry {
        double quality;
        HouseId id;
    };
    std::vector<Entry> entries_;
};

struct PopulationState {
    std::vector<Household> households;  // indexed by HouseholdId
    std::vector<House> houses;          // indexed by HouseId
    QualityIndex quality_index;
    int developer_inventory = 0;
    int overseas_holdings = 0;
    double overseas_capacity = 0.0;  // simulated dwellings
    int month = 0;

    Household& household(HouseholdId id) { return households[index_of(id)]; }
    const Household& household(HouseholdId id) const { return households[index_of(id)]; }
    House& house(HouseId id) { return houses[index_of(id)]; }
    const House& house(HouseId id) const { return houses[index_of(id)]; }

    HouseId add_house(double quality, Party owner);
};

Behavior sample_behavior(const InternalParams& params, Rng& rng);

/// A fresh agent with no houses, sampled from the scenario distributions.
Household sample_household(HouseholdId id, const ScenarioConfig& config, Rng& rng);

double sample_initial_quality(const ScenarioConfig& config, Rng& rng);

PopulationState synthesize_population(const ScenarioConfig& config, Rng& rng);

struct DemographicChange {
    int households_added = 0;
    int houses_built = 0;
};

/// Applies month `m`'s household growth and construction. New houses belong to
/// the developer; their quality is drawn from `recent_deal_prices` when any
/// exist, otherwise from the initial log-normal.
DemographicChange apply_demographics(PopulationState& state, const ScenarioConfig& config, int m,
                                     std::span<const double> recent_deal_prices, Rng& rng);

/// Debug dump: households.csv and houses.csv in `dir`.
void export_population(const PopulationState& state, const std::filesystem::path& dir);

}  // namespace hsim
