#include "hsim/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace hsim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
    if (!std::isfinite(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    return f;
}

}  // namespace

std::string format_price(const MaybePrice& p) { return p ? num(*p) : std::string{}; }

void write_manifest(const RunManifest& m, const fs::path& dir) {
    fs::create_directories(dir);
    json j;
    j["command"] = m.command;
    j["argv"] = m.argv;
    j["scenario"] = m.scenario;
    j["seed"] = m.seed;
    j["n_trajectories"] = m.n_trajectories;
    j["jobs"] = m.jobs;
    j["out"] = m.out;
    j["overrides"] = m.overrides;
    j["tool_version"] = m.tool_version;
    open_out(dir / "manifest.json") << j.dump(2) << '\n';
}

RunManifest read_manifest(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read manifest " + path.string());
    const json j = json::parse(f);
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.argv = j.value("argv", std::vector<std::string>{});
    m.scenario = j.at("scenario").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.n_trajectories = j.value("n_trajectories", 1);
    m.jobs = j.value("jobs", 1);
    m.out = j.value("out", std::string{});
    m.overrides = j.value("overrides", Overrides{});
    m.tool_version = j.value("tool_version", std::string{});
    return m;
}

void write_trajectory(const TrajectoryOutput& out, const ScenarioConfig& config, const fs::path& dir) {
    fs::create_directories(dir);
    const std::size_t n = out.months.size();

    auto prices = open_out(dir / "prices.csv");
    prices << "year_month,mean_price,n_deals,moving_avg\n";
    for (std::size_t i = 0; i < n; ++i) {
        prices << out.months[i].str() << ',' << format_price(out.prices.mean[i]) << ',' << out.prices.count[i] << ','
               << format_price(out.prices.moving_avg[i]) << '\n';
    }

    auto index = open_out(dir / "index.csv");
    index << "year_month,index,delta_hpi,mean_price,moving_avg,n_deals\n";
    for (std::size_t i = 0; i < n; ++i) {
        index << out.months[i].str() << ',' << num(out.index.at(static_cast<int>(i))) << ','
              << num(out.hpi_change[i]) << ',' << format_price(out.prices.mean[i]) << ','
              << format_price(out.prices.moving_avg[i]) << ',' << out.prices.count[i] << '\n';
    }

    auto tx = open_out(dir / "transactions.csv");
    tx << "month,house_id,buyer,seller,deal_price,list_price,months_on_market\n";
    for (const auto& t : out.transactions) {
        tx << config.date_of(t.month).str() << ',' << index_of(t.house) << ',' << to_string(t.buyer) << ','
           << to_string(t.seller) << ',' << num(t.deal_price) << ',' << num(t.list_price) << ','
           << t.months_on_market << '\n';
    }

    auto diag = open_out(dir / "diagnostics.csv");
    diag << "year_month,households,houses,households_added,houses_built,household_bids,overseas_bids,clamped,"
            "new_listings,carried_listings,deals,coin_failures,voided,mortgage_rate,sold_to_list,delta_hpi,"
            "wealth_residual\n";
    for (std::size_t i = 0; i < n; ++i) {
        const auto& d = out.diagnostics[i];
        diag << out.months[i].str() << ',' << d.households << ',' << d.houses << ',' << d.households_added << ','
             << d.houses_built << ',' << d.household_bids << ',' << d.overseas_bids << ',' << d.clamped << ','
             << d.new_listings << ',' << d.carried_listings << ',' << d.deals << ',' << d.coin_failures << ','
             << d.voided << ',' << num(d.mortgage_rate) << ',' << num(d.sold_to_list) << ',' << num(d.hpi_change)
             << ',' << num(out.accounts[i].residual()) << '\n';
    }

    json s;
    s["seed"] = out.seed;
    s["scenario"] = config.name;
    s["calendar_start"] = config.calendar_start.str();
    s["equilibration_months"] = out.equilibration_months;
    s["reported_months"] = n;
    int deals = 0, clamped = 0, voided = 0;
    for (const auto& d : out.diagnostics) {
        deals += d.deals;
        clamped += d.clamped;
        voided += d.voided;
    }
    s["deals"] = deals;
    s["clamped"] = clamped;
    s["voided"] = voided;
    if (n > 0) {
        s["first_moving_avg"] = out.prices.moving_avg.front() ? json(*out.prices.moving_avg.front()) : json(nullptr);
        s["last_moving_avg"] = out.prices.moving_avg.back() ? json(*out.prices.moving_avg.back()) : json(nullptr);
        s["final_index"] = out.index.at(static_cast<int>(n) - 1);
    }
    open_out(dir / "summary.json") << s.dump(2) << '\n';
}

void write_ensemble(const EnsembleOutput& out, const EnsembleSummary& summary, const fs::path& dir) {
    fs::create_directories(dir);
    const std::size_t n = out.months.size();

    auto q = open_out(dir / "quantiles.csv");
    q << "year_month,q5,q25,median,q75,q95\n";
    for (std::size_t i = 0; i < n; ++i) {
        q << out.months[i].str() << ',' << num(out.q5[i]) << ',' << num(out.q25[i]) << ',' << num(out.median[i])
          << ',' << num(out.q75[i]) << ',' << num(out.q95[i]) << '\n';
    }

    auto paths = open_out(dir / "trajectories.csv");
    paths << "trajectory,seed,year_month,mean_price,moving_avg\n";
    for (std::size_t t = 0; t < out.seeds.size(); ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            paths << t << ',' << out.seeds[t] << ',' << out.months[i].str() << ','
                  << format_price(out.mean_price[t][i]) << ',' << format_price(out.moving_avg[t][i]) << '\n';
        }
    }

    auto se = open_out(dir / "start_end.csv");
    se << "start_moving_avg,end_moving_avg\n";
    for (const auto& [a, b] : summary.start_end) se << num(a) << ',' << num(b) << '\n';

    json s;
    s["master_seed"] = out.master_seed;
    s["n_trajectories"] = out.size();
    s["seeds"] = out.seeds;
    s["final_cv"] = summary.final_cv;
    s["start_end_correlation"] =
        summary.start_end_correlation ? json(*summary.start_end_correlation) : json(nullptr);
    s["deals"] = out.deals;
    s["clamped"] = out.clamped;
    s["voided"] = out.voided;
    json months = json::array();
    for (std::size_t i = 0; i < n; ++i) {
        const Histogram& h = summary.histograms[i];
        months.push_back({{"year_month", out.months[i].str()},
                          {"median", num_or_null(out.median[i])},
                          {"q5", num_or_null(out.q5[i])},
                          {"q95", num_or_null(out.q95[i])},
                          {"histogram", {{"lo", h.lo}, {"hi", h.hi}, {"counts", h.counts}}}});
    }
    s["months"] = std::move(months);
    open_out(dir / "summary.json") << s.dump(2) << '\n';
}

}  // namespace hsim
