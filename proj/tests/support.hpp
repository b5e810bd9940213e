#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "hsim/scenario.hpp"

namespace hsim::test {

inline MonthlySeries flat_series(YearMonth start, int months, double value) {
    return {start, std::vector<double>(static_cast<std::size_t>(months), value)};
}

inline std::vector<TaxBracket> tax_2016() {
    return {{18200, 0.19}, {37000, 0.325}, {87000, 0.37}, {180000, 0.45}};
}

/// Small self-contained world: flat series, one-bracket distributions,
/// deterministic agent parameters. Scale factor 1.
inline ScenarioConfig toy_config(int households = 100, int equilibration = 2, int calendar = 3) {
    ScenarioConfig c;
    c.name = "toy";
    c.calendar_start = {2016, 7};
    c.equilibration_months = equilibration;
    c.calendar_months = calendar;
    c.initial_price_mean = 600000.0;
    c.initial_price_sigma = 0.3;
    c.trend_aptitude = 0.0;

    auto& e = c.external;
    e.tax_brackets = tax_2016();
    e.mortgage_rate_series = flat_series(c.calendar_start, calendar, 0.05);
    e.overseas_capacity_series = flat_series(c.calendar_start, calendar, 0.0);
    e.construction_series = flat_series(c.calendar_start, calendar, 0.0);
    e.household_count_series = flat_series(c.calendar_start, calendar, households);
    e.initial_dwelling_count = households;

    auto& in = c.internal;
    for (Spread* s : {&in.income_growth, &in.rent_income, &in.rent_mortgage, &in.bid_factor, &in.list_factor}) {
        s->halfwidth = 0.0;
    }

    c.income_dist = {{{4000.0, 1.0}}, AmountBasis::monthly};
    c.wealth_dist = {{{50000.0, 1.0}}, AmountBasis::stock};
    c.rent_dist = {{{1500.0, 1.0}}, AmountBasis::monthly};
    c.mortgage_dist = {{{2000.0, 1.0}}, AmountBasis::monthly};

    set_household_count(c, households);
    validate(c);
    return c;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("hsim_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace hsim::test
