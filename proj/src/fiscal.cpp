#include "hsim/fiscal.hpp"

#include <algorithm>
#include <cmath>

namespace hsim {

MonthlyFlows& MonthlyFlows::operator+=(const MonthlyFlows& o) {
    income_after_tax += o.income_after_tax;
    consumption_from_income += o.consumption_from_income;
    consumption_from_wealth += o.consumption_from_wealth;
    rent_paid += o.rent_paid;
    rent_received += o.rent_received;
    owning_expenses += o.owning_expenses;
    mortgage_paid += o.mortgage_paid;
    return *this;
}

double annuity_payment(double principal, double annual_rate, int months) {
    if (principal <= 0.0) return 0.0;
    const double r = annual_rate / 12.0;
    if (r == 0.0) return principal / months;
    return principal * r / (1.0 - std::pow(1.0 + r, -months));
}

double remaining_principal(double principal, double annual_rate, int months, int payments_made) {
    if (payments_made >= months) return 0.0;
    const double r = annual_rate / 12.0;
    if (r == 0.0) return principal * (1.0 - static_cast<double>(payments_made) / months);
    const double g = std::pow(1.0 + r, payments_made);
    const double pay = annuity_payment(principal, annual_rate, months);
    return principal * g - pay * (g - 1.0) / r;
}

double annuity_principal(double payment, double annual_rate, int months) {
    if (payment <= 0.0) return 0.0;
    const double r = annual_rate / 12.0;
    if (r == 0.0) return payment * months;
    return payment * (1.0 - std::pow(1.0 + r, -months)) / r;
}

MonthlyFlows update_budget(Household& hh, std::span<const House> houses, const ExternalParams& env) {
    const Behavior& b = hh.behavior;
    hh.income *= 1.0 + b.income_growth;
    const double tax_rate = effective_tax_rate(12.0 * hh.income, env.tax_brackets);

    MonthlyFlows f;
    f.income_after_tax = (1.0 - tax_rate) * hh.income;
    f.consumption_from_income = b.consumption_income * f.income_after_tax;
    f.consumption_from_wealth = b.consumption_wealth * std::max(hh.wealth, 0.0);
    if (hh.tenure == Tenure::tenant) f.rent_paid = houses[index_of(hh.residence)].rent;
    for (HouseId id : hh.owned) {
        const House& h = houses[index_of(id)];
        f.owning_expenses += env.house_owning_expense_rate / 12.0 * h.quality;
        if (h.occupancy == Occupancy::rented) f.rent_received += h.rent;
    }
    for (auto& m : hh.mortgages) {
        f.mortgage_paid += m.monthly_payment;
        const double interest = m.principal * m.annual_rate / 12.0;
        m.principal -= m.monthly_payment - interest;
        if (--m.remaining_months <= 0) m.principal = 0.0;
    }
    std::erase_if(hh.mortgages, [](const Mortgage& m) { return m.remaining_months <= 0; });

    hh.wealth += f.net();
    return f;
}

double compute_rent(double rent_draw, double rent_income_share, double tenant_income, double rent_mortgage_share,
                    double mortgage_payment) {
    return (rent_draw + rent_income_share * tenant_income + rent_mortgage_share * mortgage_payment) / 3.0;
}

double draw_rent(const Household& tenant, const House& house, const PopulationState& state,
                 const ScenarioConfig& config, Rng& rng) {
    const double phi_r = sample_bracket(config.rent_dist, rng) * config.rent_dist.monthly_factor();
    const double mortgage =
        house.owner.is_household() ? state.household(house.owner.household).mortgage_payment_on(house.id) : 0.0;
    return compute_rent(phi_r, tenant.behavior.rent_income, tenant.income, tenant.behavior.rent_mortgage, mortgage);
}

namespace {

void vacate_rental(PopulationState& state, Household& hh) {
    House& old = state.house(hh.residence);
    old.occupancy = Occupancy::vacant;
    old.rent = 0.0;
}

void move_in(PopulationState& state, Household& hh, House& h) {
    if (hh.tenure == Tenure::tenant) vacate_rental(state, hh);
    h.occupancy = Occupancy::owner_occupied;
    h.rent = 0.0;
    hh.tenure = Tenure::owner;
    hh.residence = h.id;
}

}  // namespace

SettlementResult settle_purchase(PopulationState& state, HouseId house_id, Party buyer, double price,
                                 const ScenarioConfig& config, double mortgage_rate, Rng& rng) {
    const auto& ext = config.external;
    SettlementResult r;
    House& h = state.house(house_id);
    const Party seller = h.owner;

    if (buyer.is_household()) {
        Household& b = state.household(buyer.household);
        const double lvr =
            std::clamp(uniform(rng, ext.lvr_mean - ext.lvr_halfwidth, ext.lvr_mean + ext.lvr_halfwidth), 0.0, 1.0);
        const double capacity = b.behavior.downpayment_to_wealth * std::max(b.wealth, 0.0);
        double loan = std::max(lvr * price, std::min(price - capacity, b.behavior.loan_to_value * price));
        loan = std::clamp(loan, 0.0, std::max(price, 0.0));
        const double downpayment = price - loan;
        if (downpayment > b.wealth + config.model.settlement_overdraft) {
            r.status = SettlementStatus::voided;
            return r;
        }
        r.loan = loan;
        r.downpayment = downpayment;
        r.purchase_tax = ext.purchase_tax_rate * price;
        r.buyer_outlay = downpayment + r.purchase_tax;
        b.wealth -= r.buyer_outlay;
        if (loan > 0.0) {
            const int term = ext.mortgage_duration_months;
            b.mortgages.push_back({house_id, loan, annuity_payment(loan, mortgage_rate, term), term, mortgage_rate});
        }
        b.owned.push_back(house_id);
    } else if (buyer.kind == PartyKind::overseas) {
        ++state.overseas_holdings;
    }

    switch (seller.kind) {
        case PartyKind::household: {
            Household& s = state.household(seller.household);
            const auto mortgage = std::find_if(s.mortgages.begin(), s.mortgages.end(),
                                               [&](const Mortgage& m) { return m.house == house_id; });
            if (mortgage != s.mortgages.end()) {
                r.discharged_principal = mortgage->principal;
                s.mortgages.erase(mortgage);
            }
            r.seller_proceeds = price - r.discharged_principal;
            s.wealth += r.seller_proceeds;
            std::erase(s.owned, house_id);
            if (s.tenure == Tenure::owner && s.residence == house_id) {
                s.tenure = Tenure::unhoused;
                h.occupancy = Occupancy::vacant;
            }
            s.months_since_sale = 0;
            break;
        }
        case PartyKind::developer: --state.developer_inventory; break;
        case PartyKind::overseas: --state.overseas_holdings; break;
    }

    h.owner = buyer;
    h.listed = false;
    if (buyer.is_household()) {
        Household& b = state.household(buyer.household);
        if (h.occupancy == Occupancy::rented && h.tenant == b.id) {
            b.tenure = Tenure::unhoused;  // already living here; the lease simply ends
            move_in(state, b, h);
        } else if (b.tenure != Tenure::owner && h.occupancy == Occupancy::vacant) {
            move_in(state, b, h);
        }
    }
    return r;
}

TenancyChange update_tenancies(PopulationState& state, const ScenarioConfig& config, Rng& rng) {
    TenancyChange change;
    for (auto& hh : state.households) {
        if (hh.tenure == Tenure::owner || hh.owned.empty()) continue;
        for (HouseId id : hh.owned) {
            House& h = state.house(id);
            if (h.occupancy == Occupancy::vacant) {
                move_in(state, hh, h);
                ++change.moved_in;
                break;
            }
        }
    }

    std::vector<HouseholdId> seekers;
    for (const auto& hh : state.households) {
        if (hh.tenure == Tenure::unhoused) seekers.push_back(hh.id);
    }
    if (seekers.empty()) return change;
    std::shuffle(seekers.begin(), seekers.end(), rng);

    std::size_t next = 0;
    for (auto& h : state.houses) {
        if (next == seekers.size()) break;
        if (h.occupancy != Occupancy::vacant || h.owner.kind == PartyKind::developer) continue;
        Household& tenant = state.household(seekers[next++]);
        h.occupancy = Occupancy::rented;
        h.tenant = tenant.id;
        h.rent = draw_rent(tenant, h, state, config, rng);
        tenant.tenure = Tenure::tenant;
        tenant.residence = h.id;
        ++change.new_tenancies;
    }
    return change;
}

}  // namespace hsim
