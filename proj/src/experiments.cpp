#include "hsim/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace hsim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::string num(double v) {
    if (!std::isfinite(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

ReferenceSeries ReferenceSeries::load(const fs::path& csv) {
    std::ifstream in(csv);
    if (!in) throw ScenarioError("cannot read reference series " + csv.string());
    ReferenceSeries r;
    std::string line;
    int row = 0;
    while (std::getline(in, line)) {
        ++row;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ScenarioError(csv.string() + ":" + std::to_string(row) + ": expected 2 columns");
        const std::string ym = trim(line.substr(0, comma));
        if (ym == "year_month") continue;
        const YearMonth date = YearMonth::parse(ym);
        double value = 0.0;
        try {
            value = std::stod(line.substr(comma + 1));
        } catch (const std::exception&) {
            throw ScenarioError(csv.string() + ":" + std::to_string(row) + ": bad price");
        }
        if (r.mean_price.values.empty()) {
            r.mean_price.start = date;
        } else if (date != r.mean_price.last().plus(1)) {
            throw ScenarioError(csv.string() + ":" + std::to_string(row) + ": months must be contiguous");
        }
        r.mean_price.values.push_back(value);
    }
    if (r.mean_price.values.empty()) throw ScenarioError("reference series " + csv.string() + " is empty");
    return r;
}

void ReferenceSeries::save(const fs::path& csv) const {
    if (csv.has_parent_path()) fs::create_directories(csv.parent_path());
    std::ofstream out(csv);
    if (!out) throw std::runtime_error("cannot write " + csv.string());
    out << "year_month,mean_price\n";
    for (std::size_t i = 0; i < mean_price.values.size(); ++i) {
        out << mean_price.start.plus(static_cast<int>(i)).str() << ',' << num(mean_price.values[i]) << '\n';
    }
}

std::vector<double> ReferenceSeries::calendar_moving_average(const ScenarioConfig& config, int window) const {
    const YearMonth first = config.calendar_start;
    const YearMonth last = first.plus(config.calendar_months - 1);
    if (!mean_price.covers(first) || !mean_price.covers(last)) {
        throw ScenarioError("reference series " + mean_price.start.str() + ".." + mean_price.last().str() +
                            " does not cover the calendar window " + first.str() + ".." + last.str());
    }
    std::vector<MaybePrice> values;
    for (double v : mean_price.values) values.emplace_back(v);
    const auto ma = moving_average(values, window);
    const int offset = mean_price.start.months_until(first);
    std::vector<double> out;
    for (int k = 0; k < config.calendar_months; ++k) out.push_back(*ma[static_cast<std::size_t>(offset + k)]);
    return out;
}

ReferenceSeries reference_from_ensemble(const EnsembleOutput& ens) {
    ReferenceSeries r;
    const auto median_at = [&](const std::vector<std::vector<MaybePrice>>& rows, std::size_t m) {
        std::vector<double> v;
        for (const auto& row : rows) {
            if (row[m]) v.push_back(*row[m]);
        }
        return quantile(v, 0.5);
    };
    // Leading warm-up months without any deals are dropped; later gaps cannot
    // be represented on a contiguous grid, so they take the previous value.
    bool started = false;
    double previous = 0.0;
    const auto push = [&](const YearMonth& ym, double v) {
        if (!std::isfinite(v)) {
            if (!started) return;
            v = previous;
        }
        if (!started) r.mean_price.start = ym;
        started = true;
        r.mean_price.values.push_back(v);
        previous = v;
    };
    for (std::size_t m = 0; m < ens.warmup_months.size(); ++m) push(ens.warmup_months[m], median_at(ens.warmup_mean, m));
    for (std::size_t m = 0; m < ens.months.size(); ++m) push(ens.months[m], median_at(ens.mean_price, m));
    return r;
}

double calibration_distance(const std::vector<double>& median, const std::vector<double>& reference) {
    double sum = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < std::min(median.size(), reference.size()); ++i) {
        if (!std::isfinite(median[i]) || !std::isfinite(reference[i])) continue;
        const double d = median[i] - reference[i];
        sum += d * d;
        ++n;
    }
    return n > 0 ? sum / n : std::numeric_limits<double>::infinity();
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (trim(item.substr(used)).size() > 0) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad grid '" + text + "': expected lo:hi:step");
        }
    }
    if (parts.size() == 1) return parts;
    if (parts.size() != 3) throw std::invalid_argument("bad grid '" + text + "': expected lo:hi:step");
    const double lo = parts[0], hi = parts[1], step = parts[2];
    if (!(step > 0.0) || hi < lo) throw std::invalid_argument("bad grid '" + text + "': need step > 0 and lo <= hi");
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> grid;
    for (long i = 0; i < n; ++i) {
        // Snap to the step's decimal resolution so 0.05 steps print cleanly.
        grid.push_back(std::round((lo + static_cast<double>(i) * step) * 1e9) / 1e9);
    }
    return grid;
}

CalibrationResult calibrate_h(const ScenarioConfig& config, const ReferenceSeries& reference,
                              const std::vector<double>& grid, const CalibrationOptions& options) {
    if (grid.empty()) throw std::invalid_argument("calibration grid is empty");
    CalibrationResult result;
    result.reference = reference.calendar_moving_average(config);
    for (int k = 0; k < config.calendar_months; ++k) result.months.push_back(config.calendar_start.plus(k));

    for (std::size_t i = 0; i < grid.size(); ++i) {
        ScenarioConfig c = config;
        c.trend_aptitude = grid[i];
        CalibrationPoint p;
        p.h = grid[i];
        p.master_seed = options.common_random_numbers ? options.master_seed
                                                      : derive_seed(options.master_seed, 0x6361'6c00ull + i);
        const EnsembleOutput ens = run_ensemble(c, options.n_trajectories, p.master_seed, options.jobs);
        p.median = ens.median;
        p.distance = calibration_distance(p.median, result.reference);
        result.points.push_back(std::move(p));
    }

    const CalibrationPoint* best = &result.points.front();
    for (const auto& p : result.points) {
        if (p.distance < best->distance || (p.distance == best->distance && std::abs(p.h) < std::abs(best->h))) {
            best = &p;
        }
    }
    result.best_h = best->h;
    result.best_distance = best->distance;
    return result;
}

void write_calibration(const CalibrationResult& r, const fs::path& dir) {
    fs::create_directories(dir);
    json j;
    j["best_h"] = r.best_h;
    j["best_distance"] = num_or_null(r.best_distance);
    json points = json::array();
    for (const auto& p : r.points) {
        points.push_back({{"h", p.h}, {"distance", num_or_null(p.distance)}, {"master_seed", p.master_seed}});
    }
    j["grid"] = std::move(points);
    std::ofstream(dir / "calibration.json") << j.dump(2) << '\n';

    std::ofstream csv(dir / "medians.csv");
    csv << "year_month,reference";
    for (const auto& p : r.points) csv << ",h=" << num(p.h);
    csv << '\n';
    for (std::size_t m = 0; m < r.months.size(); ++m) {
        csv << r.months[m].str() << ',' << num(r.reference[m]);
        for (const auto& p : r.points) csv << ',' << num(p.median[m]);
        csv << '\n';
    }
}

const std::vector<std::string>& alternative_fields() {
    static const std::vector<std::string> fields{
        "mortgage_rate_series", "mortgage_income",          "initial_price_mean", "wealth_dist",
        "income_dist",          "mortgage_dist",            "overseas_capacity_series",
        "trend_aptitude",       "household_count_series",   "construction_series"};
    return fields;
}

ScenarioConfig alternative_history(const ScenarioConfig& base, const std::string& field, const ScenarioConfig& donor) {
    ScenarioConfig out = base;
    const int shift = donor.calendar_start.months_until(base.calendar_start);
    const auto realign = [shift](MonthlySeries s) {
        s.start = s.start.plus(shift);
        return s;
    };
    auto& e = out.external;
    const auto& d = donor.external;
    if (field == "mortgage_rate_series" || field == "mortgage_rate") {
        e.mortgage_rate_series = realign(d.mortgage_rate_series);
    } else if (field == "mortgage_income" || field == "mortgage_income_coeff" || field == "mortgage_income_exponent") {
        e.mortgage_income_coeff = d.mortgage_income_coeff;
        e.mortgage_income_exponent = d.mortgage_income_exponent;
    } else if (field == "initial_price_mean") {
        out.initial_price_mean = donor.initial_price_mean;
    } else if (field == "wealth_dist") {
        out.wealth_dist = donor.wealth_dist;
    } else if (field == "income_dist") {
        out.income_dist = donor.income_dist;
    } else if (field == "mortgage_dist") {
        out.mortgage_dist = donor.mortgage_dist;
    } else if (field == "overseas_capacity_series") {
        e.overseas_capacity_series = realign(d.overseas_capacity_series);
    } else if (field == "trend_aptitude") {
        out.trend_aptitude = donor.trend_aptitude;
    } else if (field == "household_count_series") {
        e.household_count_series = realign(d.household_count_series);
    } else if (field == "construction_series") {
        e.construction_series = realign(d.construction_series);
    } else {
        std::string list;
        for (const auto& f : alternative_fields()) list += (list.empty() ? "" : ", ") + f;
        throw std::invalid_argument("unknown alternative-history field '" + field + "'; choose one of: " + list);
    }
    validate(out);
    return out;
}

std::vector<VariabilityRow> variability_report(
    const std::vector<std::pair<std::string, const EnsembleOutput*>>& runs) {
    std::vector<VariabilityRow> rows;
    for (const auto& [name, ens] : runs) {
        const EnsembleSummary s = ensemble_stats(*ens);
        VariabilityRow row;
        row.name = name;
        row.n_trajectories = ens->size();
        row.final_cv = s.final_cv;
        row.start_end_correlation = s.start_end_correlation;
        double width = 0.0;
        int n = 0;
        for (std::size_t m = 0; m < ens->months.size(); ++m) {
            if (!std::isfinite(ens->q95[m]) || !std::isfinite(ens->q5[m])) continue;
            width += ens->q95[m] - ens->q5[m];
            ++n;
        }
        row.mean_band_width = n > 0 ? width / n : 0.0;
        rows.push_back(row);
    }
    return rows;
}

void write_variability(const std::vector<VariabilityRow>& rows, const fs::path& dir) {
    fs::create_directories(dir);
    std::ofstream csv(dir / "variability.csv");
    csv << "name,n_trajectories,final_cv,mean_band_width,start_end_correlation\n";
    json j = json::array();
    for (const auto& r : rows) {
        csv << r.name << ',' << r.n_trajectories << ',' << num(r.final_cv) << ',' << num(r.mean_band_width) << ','
            << (r.start_end_correlation ? num(*r.start_end_correlation) : "") << '\n';
        j.push_back({{"name", r.name},
                     {"n_trajectories", r.n_trajectories},
                     {"final_cv", r.final_cv},
                     {"mean_band_width", r.mean_band_width},
                     {"start_end_correlation",
                      r.start_end_correlation ? json(*r.start_end_correlation) : json(nullptr)}});
    }
    std::ofstream(dir / "variability.json") << j.dump(2) << '\n';
}

}  // namespace hsim
