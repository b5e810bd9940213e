#include "hsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

namespace hsim {

double MonthAccounts::residual() const {
    return wealth_end - (wealth_start + flows.net() - buyer_outlays + seller_proceeds);
}

double MonthAccounts::scale() const {
    return std::max({std::abs(wealth_start), std::abs(wealth_end), flows.income_after_tax + buyer_outlays +
                                                                        seller_proceeds + flows.mortgage_paid,
                     1.0});
}

Simulation::Simulation(const ScenarioConfig& config, std::uint64_t seed)
    : config_(&config),
      rng_(seed),
      state_(synthesize_population(config, rng_)),
      regression_(config.total_months()),
      aptitude_(config.trend_aptitude) {}

void Simulation::refresh_stats() {
    const int m = state_.month;
    if (!last_month_.empty()) {
        double ratio = 0.0;
        for (const auto& t : last_month_) ratio += t.deal_price / t.list_price;
        stats_.sold_to_list = ratio / static_cast<double>(last_month_.size());
    }
    // Overseas bids key off household purchases of the past year, so the
    // overseas agent never chases its own prices.
    std::vector<double> window;
    for (const auto& month : household_deals_) window.insert(window.end(), month.begin(), month.end());
    if (!window.empty()) stats_.median_deal_price = quantile(std::move(window), 0.5);
    stats_.hpi_change = m >= 13 ? annual_change(regression_.solve(m - 1), m) : 0.0;
}

void Simulation::step() {
    const ScenarioConfig& cfg = *config_;
    const int m = state_.month;
    MonthDiagnostics d;
    d.month = m;
    MonthAccounts acc;

    for (auto& hh : state_.households) {
        if (hh.months_since_sale >= 0) ++hh.months_since_sale;
    }

    // (1) demographics and developer supply
    const DemographicChange demo = apply_demographics(state_, cfg, m, recent_prices_, rng_);
    d.households_added = demo.households_added;
    d.houses_built = demo.houses_built;
    for (const auto& hh : state_.households) acc.wealth_start += hh.wealth;

    // (2) budgets
    for (auto& hh : state_.households) {
        if (hh.tenure == Tenure::tenant) {
            const House& h = state_.house(hh.residence);
            (h.owner.kind == PartyKind::overseas ? acc.rent_to_overseas : acc.rent_internal) += h.rent;
        }
        acc.flows += update_budget(hh, state_.houses, cfg.external);
    }

    // (3) statistics from completed months
    refresh_stats();

    // (4) bids, (5) listings
    const double rate = cfg.level_at(cfg.external.mortgage_rate_series, m);
    BidTerms terms = BidTerms::from(cfg, rate, stats_.hpi_change);
    terms.aptitude = aptitude_;
    const BidSummary bids = collect_bids(book_, state_, cfg, terms, stats_, m);
    if (bid_observer_) bid_observer_(state_, terms);
    const ListingSummary listings = collect_listings(book_, state_, cfg, stats_, rng_);

    // (6) clearing with (7) settlement
    last_month_.clear();
    double accepted_bids = 0.0;
    const auto settle = [&](const ListRecord& l, const BidRecord& b) {
        const double price = cfg.model.deal_price == DealPriceRule::bid ? b.price : l.price;
        const Party seller = state_.house(l.house).owner;
        const SettlementResult r = settle_purchase(state_, l.house, b.bidder, price, cfg, rate, rng_);
        if (r.status == SettlementStatus::voided) return false;
        acc.buyer_outlays += r.buyer_outlay;
        acc.seller_proceeds += r.seller_proceeds;
        accepted_bids += b.price;
        last_month_.push_back({m, l.house, b.bidder, seller, price, l.price, l.months_on_market});
        regression_.add_sale(l.house, m, price);
        return true;
    };
    const ClearingResult cleared = clear(book_, cfg.internal.clearance_probability, rng_, settle);
    update_tenancies(state_, cfg, rng_);

    // (8) records
    double sum = 0.0;
    for (const auto& t : last_month_) sum += t.deal_price;
    deal_sum_.push_back(sum);
    deal_count_.push_back(static_cast<int>(last_month_.size()));
    if (!last_month_.empty()) {
        recent_prices_.clear();
        for (const auto& t : last_month_) recent_prices_.push_back(t.deal_price);
    }
    std::vector<double> bought;
    for (const auto& t : last_month_) {
        if (t.buyer.kind == PartyKind::household) bought.push_back(t.deal_price);
    }
    household_deals_.push_back(std::move(bought));
    if (household_deals_.size() > 12) household_deals_.pop_front();
    if (keep_log_) log_.insert(log_.end(), last_month_.begin(), last_month_.end());

    for (const auto& hh : state_.households) acc.wealth_end += hh.wealth;
    d.households = static_cast<int>(state_.households.size());
    d.houses = static_cast<int>(state_.houses.size());
    d.household_bids = bids.household_bids;
    d.overseas_bids = bids.overseas_bids;
    d.clamped = bids.clamped;
    d.new_listings = listings.new_listings;
    d.carried_listings = listings.carried;
    d.deals = static_cast<int>(cleared.deals.size());
    d.coin_failures = cleared.coin_failures;
    d.voided = cleared.voided;
    d.mortgage_rate = rate;
    d.sold_to_list = stats_.sold_to_list;
    d.hpi_change = stats_.hpi_change;
    d.mean_accepted_bid = d.deals > 0 ? accepted_bids / d.deals : 0.0;
    diagnostics_.push_back(d);
    accounts_.push_back(acc);
    ++state_.month;
}

namespace {

struct Fnv {
    std::uint64_t h = 0xcbf29ce484222325ull;
    template <class T>
    void add(const T& v) {
        unsigned char bytes[sizeof(T)];
        std::memcpy(bytes, &v, sizeof(T));
        for (unsigned char c : bytes) {
            h ^= c;
            h *= 0x100000001b3ull;
        }
    }
};

}  // namespace

std::uint64_t Simulation::state_hash() const {
    Fnv f;
    f.add(state_.month);
    for (const auto& hh : state_.households) {
        f.add(hh.income);
        f.add(hh.wealth);
        f.add(hh.tenure);
        f.add(hh.owned.size());
        for (const auto& mg : hh.mortgages) f.add(mg.principal);
    }
    for (const auto& h : state_.houses) {
        f.add(h.owner.kind);
        f.add(h.owner.household);
        f.add(h.occupancy);
        f.add(h.rent);
    }
    for (const auto& t : log_) f.add(t.deal_price);
    return f.h;
}

TrajectoryOutput run_trajectory(const ScenarioConfig& config, std::uint64_t seed, const TrajectoryOptions& options) {
    Simulation sim(config, seed);
    sim.set_keep_transactions(options.keep_transactions);
    while (!sim.finished()) sim.step();

    const int total = config.total_months();
    const int eq = config.equilibration_months;
    TrajectoryOutput out;
    out.seed = seed;
    out.equilibration_months = eq;

    std::vector<MaybePrice> mean(static_cast<std::size_t>(total));
    for (int m = 0; m < total; ++m) {
        const auto i = static_cast<std::size_t>(m);
        if (sim.monthly_deal_counts()[i] > 0) mean[i] = sim.monthly_deal_sums()[i] / sim.monthly_deal_counts()[i];
    }
    const auto ma = moving_average(mean, options.moving_average_window);
    const IndexSeries full = sim.regression().solve(total - 1);

    const double base = full.log_index[static_cast<std::size_t>(eq)];
    for (int m = std::max(0, eq - options.moving_average_window + 1); m < eq; ++m) {
        out.warmup_months.push_back(config.date_of(m));
        out.warmup_mean.push_back(mean[static_cast<std::size_t>(m)]);
    }
    for (int m = eq; m < total; ++m) {
        const auto i = static_cast<std::size_t>(m);
        out.months.push_back(config.date_of(m));
        out.prices.mean.push_back(mean[i]);
        out.prices.count.push_back(sim.monthly_deal_counts()[i]);
        out.prices.moving_avg.push_back(ma[i]);
        out.index.log_index.push_back(full.log_index[i] - base);
        out.index.pair_count.push_back(full.pair_count[i]);
        out.hpi_change.push_back(sim.diagnostics()[i].hpi_change);
        out.diagnostics.push_back(sim.diagnostics()[i]);
        out.accounts.push_back(sim.accounts()[i]);
    }
    out.transactions = sim.transactions();
    return out;
}

double quantile(std::vector<double> v, double p) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

EnsembleOutput run_ensemble(const ScenarioConfig& config, int n, std::uint64_t master_seed, int jobs) {
    if (n < 1) throw std::invalid_argument("ensemble needs at least one trajectory");
    EnsembleOutput out;
    out.master_seed = master_seed;
    for (int i = 0; i < n; ++i) out.seeds.push_back(derive_seed(master_seed, static_cast<std::uint64_t>(i)));

    std::vector<TrajectoryOutput> members(static_cast<std::size_t>(n));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
    std::atomic<int> next{0};
    const auto work = [&] {
        TrajectoryOptions opt;
        opt.keep_transactions = false;
        for (int i = next++; i < n; i = next++) {
            const auto k = static_cast<std::size_t>(i);
            try {
                members[k] = run_trajectory(config, out.seeds[k], opt);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const int workers = std::clamp(jobs, 1, n);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (int i = 0; i < n; ++i) {
        const auto& e = errors[static_cast<std::size_t>(i)];
        if (!e) continue;
        std::string what = "unknown error";
        try {
            std::rethrow_exception(e);
        } catch (const std::exception& ex) {
            what = ex.what();
        } catch (...) {
        }
        throw std::runtime_error("trajectory " + std::to_string(i) + " (seed " +
                                 std::to_string(out.seeds[static_cast<std::size_t>(i)]) + ") failed: " + what);
    }

    out.months = members.front().months;
    out.warmup_months = members.front().warmup_months;
    for (auto& mbr : members) {
        out.warmup_mean.push_back(std::move(mbr.warmup_mean));
        out.moving_avg.push_back(std::move(mbr.prices.moving_avg));
        out.mean_price.push_back(std::move(mbr.prices.mean));
        for (const auto& d : mbr.diagnostics) {
            out.clamped += d.clamped;
            out.voided += d.voided;
            out.deals += d.deals;
        }
    }
    for (std::size_t m = 0; m < out.months.size(); ++m) {
        std::vector<double> v;
        for (const auto& traj : out.moving_avg) {
            if (traj[m]) v.push_back(*traj[m]);
        }
        out.q5.push_back(quantile(v, 0.05));
        out.q25.push_back(quantile(v, 0.25));
        out.median.push_back(quantile(v, 0.50));
        out.q75.push_back(quantile(v, 0.75));
        out.q95.push_back(quantile(v, 0.95));
    }
    return out;
}

std::optional<double> pearson(const std::vector<std::pair<double, double>>& xy) {
    if (xy.size() < 2) return std::nullopt;
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : xy) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(xy.size());
    my /= static_cast<double>(xy.size());
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (const auto& [x, y] : xy) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

double coefficient_of_variation(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size());
    return mean != 0.0 ? std::sqrt(var) / std::abs(mean) : 0.0;
}

Histogram histogram(const std::vector<double>& values, int bins) {
    Histogram h;
    h.counts.assign(static_cast<std::size_t>(std::max(bins, 1)), 0);
    if (values.empty()) return h;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    h.lo = *lo;
    h.hi = *hi;
    const double width = (h.hi - h.lo) / static_cast<double>(h.counts.size());
    for (double v : values) {
        std::size_t b = width > 0.0 ? static_cast<std::size_t>((v - h.lo) / width) : 0;
        ++h.counts[std::min(b, h.counts.size() - 1)];
    }
    return h;
}

EnsembleSummary ensemble_stats(const EnsembleOutput& out, int bins) {
    EnsembleSummary s;
    if (out.months.empty()) return s;
    const std::size_t last = out.months.size() - 1;
    std::vector<double> finals;
    for (const auto& traj : out.moving_avg) {
        if (traj.front() && traj.back()) s.start_end.emplace_back(*traj.front(), *traj.back());
        if (traj[last]) finals.push_back(*traj[last]);
    }
    s.start_end_correlation = pearson(s.start_end);
    s.final_cv = coefficient_of_variation(finals);
    for (std::size_t m = 0; m < out.months.size(); ++m) {
        std::vector<double> v;
        for (const auto& traj : out.moving_avg) {
            if (traj[m]) v.push_back(*traj[m]);
        }
        s.histograms.push_back(histogram(v, bins));
    }
    return s;
}

}  // namespace hsim
