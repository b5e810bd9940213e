#include <doctest.h>

#include <cmath>

#include "hsim/engine.hpp"
#include "hsim/output.hpp"
#include "support.hpp"

using namespace hsim;

TEST_CASE("single household hand trace") {
    ScenarioConfig c = test::toy_config(1, 0, 3);
    c.model.owner_occupier_fraction = 1.0;
    c.model.investor_stock_share = 0.0;
    c.model.initial_mortgage_fraction = 0.0;
    c.internal.list_probability = 0.0;
    Simulation sim(c, 42);
    auto& s = sim.mutable_state();
    REQUIRE(s.households.size() == 1);
    REQUIRE(s.houses.size() == 1);
    s.households[0].income = 8000;
    s.households[0].wealth = 100000;
    s.houses[0].quality = 600000;

    // W <- W - 0.0025 W + 0.4 (1 - T) I - 0.042/12 * 600,000 with I growing 0.2% a month.
    const double expected[] = {100082.298667, 100168.431651, 100258.397446};
    for (double w : expected) {
        sim.step();
        CHECK(std::abs(sim.state().households[0].wealth - w) < 0.005);
    }
    CHECK(sim.state().households[0].income == doctest::Approx(8048.096064));
    CHECK(sim.transactions().empty());
    CHECK(sim.finished());
}

TEST_CASE("empty market month") {
    ScenarioConfig c = test::toy_config(30, 0, 2);
    c.internal.list_probability = 0.0;
    c.model.investor_stock_share = 0.0;
    c.model.owner_occupier_fraction = 1.0;
    Simulation sim(c, 1);
    sim.step();
    CHECK(sim.month() == 1);
    CHECK(sim.transactions().empty());
    CHECK(sim.diagnostics().back().deals == 0);
}

TEST_CASE("trajectory shape") {
    ScenarioConfig c = test::toy_config(300, 26, 30);
    const TrajectoryOutput out = run_trajectory(c, 7);
    CHECK(out.months.size() == 30);
    CHECK(out.diagnostics.size() == 30);
    CHECK(out.months.front() == c.calendar_start);
    CHECK(out.index.at(0) == doctest::Approx(1.0));
    CHECK(out.warmup_months.size() == 11);
    CHECK(out.diagnostics.front().month == 26);

    ScenarioConfig one = test::toy_config(100, 4, 1);
    CHECK(run_trajectory(one, 7).months.size() == 1);
}

TEST_CASE("determinism") {
    const ScenarioConfig c = test::toy_config(300, 6, 10);
    Simulation a(c, 5), b(c, 5), d(c, 6);
    while (!a.finished()) {
        a.step();
        b.step();
        d.step();
    }
    CHECK(a.state_hash() == b.state_hash());
    CHECK(a.state_hash() != d.state_hash());

    // A copied simulation continues identically.
    Simulation e(c, 5);
    for (int i = 0; i < 3; ++i) e.step();
    Simulation f = e;
    while (!e.finished()) {
        e.step();
        f.step();
    }
    CHECK(e.state_hash() == a.state_hash());
    CHECK(f.state_hash() == a.state_hash());
}

TEST_CASE("household wealth is conserved by the month's flows") {
    const ScenarioConfig c = test::toy_config(400, 6, 12);
    Simulation sim(c, 3);
    while (!sim.finished()) sim.step();
    for (const auto& acc : sim.accounts()) CHECK(std::abs(acc.residual()) <= 1e-9 * acc.scale());
}

TEST_CASE("ensembles") {
    const ScenarioConfig c = test::toy_config(150, 4, 8);
    const EnsembleOutput serial = run_ensemble(c, 5, 77, 1);
    const EnsembleOutput parallel = run_ensemble(c, 5, 77, 3);
    CHECK(serial.seeds == parallel.seeds);
    CHECK(serial.moving_avg == parallel.moving_avg);
    CHECK(serial.median == parallel.median);
    CHECK(serial.seeds[2] == derive_seed(77, 2));

    const EnsembleOutput single = run_ensemble(c, 1, 77, 1);
    const TrajectoryOutput t = run_trajectory(c, derive_seed(77, 0));
    for (std::size_t m = 0; m < single.months.size(); ++m) {
        if (t.prices.moving_avg[m]) CHECK(single.median[m] == *t.prices.moving_avg[m]);
    }
    for (std::size_t m = 0; m < serial.months.size(); ++m) {
        CHECK(serial.q5[m] <= serial.q25[m]);
        CHECK(serial.q25[m] <= serial.median[m]);
        CHECK(serial.median[m] <= serial.q75[m]);
        CHECK(serial.q75[m] <= serial.q95[m]);
    }
    CHECK_THROWS_AS(run_ensemble(c, 0, 1, 1), std::invalid_argument);

    const auto a = test::scratch_dir("ens_a"), b = test::scratch_dir("ens_b");
    write_ensemble(serial, ensemble_stats(serial), a);
    write_ensemble(parallel, ensemble_stats(parallel), b);
    for (const char* f : {"quantiles.csv", "trajectories.csv", "start_end.csv", "summary.json"}) {
        CHECK(test::slurp(a / f) == test::slurp(b / f));
    }
}

TEST_CASE("ensemble statistics") {
    CHECK(quantile({1, 2, 3, 4}, 0.5) == 2.5);
    CHECK(quantile({5}, 0.95) == 5);
    CHECK(quantile({1, 2, 3, 4, 5}, 0.05) == doctest::Approx(1.2));

    EnsembleOutput same;
    same.months = {YearMonth{2016, 7}, YearMonth{2016, 8}};
    same.moving_avg = {{1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}};
    const EnsembleSummary s = ensemble_stats(same);
    CHECK(s.final_cv == 0.0);
    CHECK_FALSE(s.start_end_correlation.has_value());

    EnsembleOutput two;
    two.months = {YearMonth{2016, 7}};
    two.moving_avg = {{1.0}, {3.0}};
    const EnsembleSummary h = ensemble_stats(two, 10);
    int nonzero = 0;
    for (int k : h.histograms[0].counts) nonzero += k > 0;
    CHECK(nonzero == 2);
    CHECK(coefficient_of_variation({1.0, 3.0}) == doctest::Approx(0.5));

    Rng rng(4);
    std::vector<std::pair<double, double>> xy;
    for (int i = 0; i < 20000; ++i) xy.emplace_back(uniform01(rng), uniform01(rng));
    CHECK(std::abs(*pearson(xy)) < 0.03);
    CHECK(*pearson({{1, 2}, {2, 4}, {3, 6}}) == doctest::Approx(1.0));
}

TEST_CASE("trajectory files") {
    const ScenarioConfig c = test::toy_config(200, 3, 6);
    const TrajectoryOutput out = run_trajectory(c, 2);
    const auto dir = test::scratch_dir("traj");
    write_trajectory(out, c, dir);
    for (const char* f : {"prices.csv", "index.csv", "transactions.csv", "diagnostics.csv", "summary.json"}) {
        CHECK(std::filesystem::exists(dir / f));
    }
    const std::string tx = test::slurp(dir / "transactions.csv");
    CHECK(tx.rfind("month,house_id,buyer,seller,deal_price,list_price,months_on_market\n", 0) == 0);
}
