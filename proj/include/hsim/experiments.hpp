#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hsim/engine.hpp"
#include "hsim/scenario.hpp"

namespace hsim {

/// Observed mean deal prices on a contiguous monthly grid. Rows before the
/// calendar window only feed the moving average.
struct ReferenceSeries {
    MonthlySeries mean_price;

    static ReferenceSeries load(const std::filesystem::path& csv);
    void save(const std::filesystem::path& csv) const;

    /// Trailing moving average at each calendar month of `config`; throws
    /// ScenarioError unless every calendar month is present.
    std::vector<double> calendar_moving_average(const ScenarioConfig& config, int window = 12) const;
};

/// Per-month ensemble median of monthly mean prices, including the months
/// before the calendar window that the ensemble retained.
ReferenceSeries reference_from_ensemble(const EnsembleOutput& ensemble);

/// Mean over calendar months of (median - reference)^2; months where either
/// side is undefined are skipped.
double calibration_distance(const std::vector<double>& median, const std::vector<double>& reference);

/// "lo:hi:step", inclusive of hi when it lies on the grid.
std::vector<double> parse_grid(const std::string& text);

struct CalibrationOptions {
    int n_trajectories = 64;
    std::uint64_t master_seed = 1;
    int jobs = 1;
    bool common_random_numbers = false;  // every h reuses master_seed
};

struct CalibrationPoint {
    double h = 0.0;
    double distance = 0.0;
    std::uint64_t master_seed = 0;
    std::vector<double> median;  // ensemble median of the moving average
};

struct CalibrationResult {
    std::vector<CalibrationPoint> points;
    std::vector<double> reference;  // reference moving average, calendar months
    std::vector<YearMonth> months;
    double best_h = 0.0;
    double best_distance = 0.0;
};

/// Grid search for the trend-following aptitude. Ties go to the smaller |h|.
CalibrationResult calibrate_h(const ScenarioConfig& config, const ReferenceSeries& reference,
                              const std::vector<double>& grid, const CalibrationOptions& options);

void write_calibration(const CalibrationResult& result, const std::filesystem::path& dir);

/// Fields that may be swapped between periods. mortgage_income moves the
/// coefficient and exponent together.
const std::vector<std::string>& alternative_fields();

/// `base` with one whitelisted field taken from `donor`. Monthly series are
/// shifted so the donor's calendar start lands on the base's.
ScenarioConfig alternative_history(const ScenarioConfig& base, const std::string& field, const ScenarioConfig& donor);

struct VariabilityRow {
    std::string name;
    int n_trajectories = 0;
    double final_cv = 0.0;
    double mean_band_width = 0.0;  // q95 - q5 averaged over months
    std::optional<double> start_end_correlation;
};

std::vector<VariabilityRow> variability_report(const std::vector<std::pair<std::string, const EnsembleOutput*>>& runs);
void write_variability(const std::vector<VariabilityRow>& rows, const std::filesystem::path& dir);

}  // namespace hsim
