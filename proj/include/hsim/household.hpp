#pragma once

#include <algorithm>
#include <vector>

#include "hsim/types.hpp"

namespace hsim {

/// Per-agent draws of the internal parameters (one value of each b_* term).
struct Behavior {
    double income_growth = 0.0;          // b_I
    double consumption_income = 0.0;     // b_CI
    double consumption_wealth = 0.0;     // b_CW
    double rent_income = 0.0;            // b_RI
    double rent_mortgage = 0.0;          // b_RH
    double downpayment_to_wealth = 0.0;  // b_ATW
    double loan_to_value = 0.0;          // b_LTV
    double debt_to_income = 0.0;         // b_DTI
    double approval_rate = 0.0;          // b_M
    double bid_factor = 0.0;             // b_b
    double list_factor = 0.0;            // b_l
    double sold_to_list_exponent = 0.0;  // b_s
    double months_listed_exponent = 0.0; // b_d
};

struct Mortgage {
    HouseId house{};
    double principal = 0.0;
    double monthly_payment = 0.0;
    int remaining_months = 0;
    double annual_rate = 0.0;
};

enum class Tenure : std::uint8_t { unhoused, owner, tenant };

struct Household {
    HouseholdId id{};
    double income = 0.0;  // AUD per month
    double wealth = 0.0;  // AUD, may be negative
    std::vector<HouseId> owned;
    Tenure tenure = Tenure::unhoused;
    HouseId residence{};  // meaningful unless unhoused
    std::vector<Mortgage> mortgages;
    int months_since_sale = -1;  // -1: never sold
    Behavior behavior;

    bool owns(HouseId h) const { return std::find(owned.begin(), owned.end(), h) != owned.end(); }

    const Mortgage* mortgage_on(HouseId h) const {
        for (const auto& m : mortgages) {
            if (m.house == h) return &m;
        }
        return nullptr;
    }

    double mortgage_payment_on(HouseId h) const {
        const Mortgage* m = mortgage_on(h);
        return m ? m->monthly_payment : 0.0;
    }
};

enum class Occupancy : std::uint8_t { vacant, owner_occupied, rented };

struct House {
    HouseId id{};
    double quality = 0.0;  // AUD, fixed at creation
    Party owner = Party::developer();
    Occupancy occupancy = Occupancy::vacant;
    HouseholdId tenant{};  // meaningful when rented
    double rent = 0.0;     // fixed for the tenancy
    bool listed = false;
};

}  // namespace hsim
