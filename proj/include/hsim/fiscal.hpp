#pragma once

#include <span>

#include "hsim/household.hpp"
#include "hsim/population.hpp"
#include "hsim/rng.hpp"
#include "hsim/scenario.hpp"

namespace hsim {

/// One household's budget terms for one month, AUD.
struct MonthlyFlows {
    double income_after_tax = 0.0;
    double consumption_from_income = 0.0;
    double consumption_from_wealth = 0.0;
    double rent_paid = 0.0;
    double rent_received = 0.0;
    double owning_expenses = 0.0;
    double mortgage_paid = 0.0;

    double net() const {
        return income_after_tax - consumption_from_income - consumption_from_wealth - rent_paid +
               rent_received - owning_expenses - mortgage_paid;
    }
    MonthlyFlows& operator+=(const MonthlyFlows& o);
};

/// Fixed monthly payment amortizing `principal` over `months`.
double annuity_payment(double principal, double annual_rate, int months);

/// Principal left after `payments_made` payments of the annuity above.
double remaining_principal(double principal, double annual_rate, int months, int payments_made);

/// Principal that `payment` per month services over `months`.
double annuity_principal(double payment, double annual_rate, int months);

/// Advances income and wealth by one month: income grows by b_I, then
///   W <- W - b_CW*max(W,0) + (1-b_CI)(1-T)I - R_r - sum_h(Phi_H/12*Q_h + M_h - R_h)
/// with T the average tax rate on 12*I and R_h the rent collected on owned
/// houses that are let. Mortgages amortize by one payment; repaid loans drop.
MonthlyFlows update_budget(Household& hh, std::span<const House> houses, const ExternalParams& env);

/// R_h = (Phi_R + b_RI * I + b_RH * M_h) / 3.
double compute_rent(double rent_draw, double rent_income_share, double tenant_income, double rent_mortgage_share,
                    double mortgage_payment);

/// Rent for `tenant` moving into `house`, drawing Phi_R from the rent brackets.
double draw_rent(const Household& tenant, const House& house, const PopulationState& state,
                 const ScenarioConfig& config, Rng& rng);

enum class SettlementStatus { settled, voided };

struct SettlementResult {
    SettlementStatus status = SettlementStatus::settled;
    double loan = 0.0;
    double downpayment = 0.0;
    double purchase_tax = 0.0;
    double buyer_outlay = 0.0;     // household buyers only
    double seller_proceeds = 0.0;  // household sellers only
    double discharged_principal = 0.0;
};

/// Transfers `house` to `buyer` at `price`.
///
/// Household buyers borrow max(LVR * price, min(price - b_ATW * W, b_LTV * price))
/// with LVR ~ U(lvr_mean +- lvr_halfwidth) clamped to [0,1]; the deal is voided
/// if the downpayment exceeds wealth plus the configured overdraft. The buyer
/// also pays the purchase tax. A household seller receives the price less the
/// principal of the discharged mortgage. Tenants stay with the house; a buyer
/// without a residence moves into a vacant purchase.
SettlementResult settle_purchase(PopulationState& state, HouseId house, Party buyer, double price,
                                 const ScenarioConfig& config, double mortgage_rate, Rng& rng);

struct TenancyChange {
    int moved_in = 0;
    int new_tenancies = 0;
};

/// Owners without a residence move into a vacant house they own (ending any
/// tenancy), then unhoused agents rent vacant houses of household or overseas
/// landlords, in random order.
TenancyChange update_tenancies(PopulationState& state, const ScenarioConfig& config, Rng& rng);

}  // namespace hsim
