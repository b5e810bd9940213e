#include "hsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>

namespace hsim {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// YearMonth / MonthlySeries

YearMonth YearMonth::parse(const std::string& text) {
    int y = 0;
    int m = 0;
    char dash = 0;
    std::istringstream in(text);
    if (!(in >> y >> dash >> m) || dash != '-' || m < 1 || m > 12) {
        throw ScenarioError("malformed year-month '" + text + "' (expected YYYY-MM)");
    }
    std::string rest;
    if (in >> rest) throw ScenarioError("malformed year-month '" + text + "'");
    return {y, m};
}

std::string YearMonth::str() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    return buf;
}

YearMonth YearMonth::plus(int months) const {
    const int total = year * 12 + (month - 1) + months;
    const int y = total >= 0 ? total / 12 : (total - 11) / 12;
    return {y, total - y * 12 + 1};
}

int YearMonth::months_until(const YearMonth& later) const {
    return (later.year - year) * 12 + (later.month - month);
}

bool MonthlySeries::covers(const YearMonth& ym) const {
    const int k = start.months_until(ym);
    return k >= 0 && k < static_cast<int>(values.size());
}

double MonthlySeries::at(const YearMonth& ym) const {
    if (!covers(ym)) throw ScenarioError("series has no value for " + ym.str());
    return values[static_cast<std::size_t>(start.months_until(ym))];
}

// ---------------------------------------------------------------------------
// Distributions and sampling

double BracketDistribution::monthly_factor() const {
    switch (basis) {
        case AmountBasis::weekly: return 52.0 / 12.0;
        case AmountBasis::annual: return 1.0 / 12.0;
        case AmountBasis::monthly:
        case AmountBasis::stock: break;
    }
    return 1.0;
}

namespace {

double upper_bound_of(const std::vector<BracketDistribution::Bracket>& b, std::size_t i) {
    return i + 1 < b.size() ? b[i + 1].lower : b[i].lower + std::abs(b[i].lower);
}

}  // namespace

double BracketDistribution::mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < brackets.size(); ++i) {
        m += brackets[i].mass * 0.5 * (brackets[i].lower + upper_bound_of(brackets, i));
    }
    return m;
}

double sample_bracket(const BracketDistribution& dist, Rng& rng) {
    const auto& b = dist.brackets;
    const double u = uniform01(rng);
    std::size_t i = 0;
    double cum = b[0].mass;
    while (u >= cum && i + 1 < b.size()) {
        ++i;
        cum += b[i].mass;
    }
    return uniform(rng, b[i].lower, upper_bound_of(b, i));
}

double sample_internal(const Spread& spread, Rng& rng) {
    if (spread.halfwidth == 0.0) return spread.mean;
    return uniform(rng, spread.mean - spread.halfwidth, spread.mean + spread.halfwidth);
}

double effective_tax_rate(double annual_income, const std::vector<TaxBracket>& brackets) {
    if (annual_income <= 0.0) return 0.0;
    double tax = 0.0;
    for (std::size_t i = 0; i < brackets.size(); ++i) {
        const double lo = brackets[i].lower;
        if (annual_income <= lo) break;
        const double hi = i + 1 < brackets.size() ? std::min(annual_income, brackets[i + 1].lower)
                                                  : annual_income;
        tax += brackets[i].rate * (hi - lo);
    }
    return tax / annual_income;
}

// ---------------------------------------------------------------------------
// ScenarioConfig helpers

double ScenarioConfig::level_at(const MonthlySeries& series, int m) const {
    const YearMonth d = date_of(m);
    if (series.covers(d)) return series.at(d);
    if (d < calendar_start) return series.at(calendar_start);
    throw ScenarioError("series has no value for " + d.str());
}

double ScenarioConfig::flow_at(const MonthlySeries& series, int m) const {
    const YearMonth d = date_of(m);
    if (series.covers(d)) return series.at(d);
    if (d < calendar_start) return 0.0;
    throw ScenarioError("series has no value for " + d.str());
}

void set_household_count(ScenarioConfig& config, int n_sim_households) {
    if (n_sim_households <= 0) throw ScenarioError("household count must be positive");
    const double real = config.external.household_count_series.at(config.calendar_start);
    config.n_sim_households = n_sim_households;
    config.scale_factor = real / n_sim_households;
}

// ---------------------------------------------------------------------------
// File format

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v)) {
        throw ScenarioError("malformed number for '" + key + "': '" + text + "'");
    }
    return v;
}

int parse_int(const std::string& key, const std::string& text) {
    const double v = parse_double(key, text);
    if (v != std::floor(v) || std::abs(v) > 1e9) {
        throw ScenarioError("expected an integer for '" + key + "': '" + text + "'");
    }
    return static_cast<int>(v);
}

std::vector<std::string> split_ws(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> out;
    for (std::string tok; in >> tok;) out.push_back(tok);
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(trim(cell));
    return out;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path, std::size_t columns) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot read file '" + path.string() + "'");
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool header = true;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        auto cells = split_csv_line(line);
        if (cells.size() != columns) {
            throw ScenarioError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                                std::to_string(columns) + " columns");
        }
        rows.push_back(std::move(cells));
    }
    return rows;
}

MonthlySeries read_series(const fs::path& path) {
    MonthlySeries s;
    const auto rows = read_csv(path, 2);
    if (rows.empty()) throw ScenarioError("series file '" + path.string() + "' has no rows");
    s.start = YearMonth::parse(rows.front()[0]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (YearMonth::parse(rows[i][0]) != s.start.plus(static_cast<int>(i))) {
            throw ScenarioError("series file '" + path.string() + "' is not a contiguous monthly grid at " +
                                rows[i][0]);
        }
        s.values.push_back(parse_double(path.filename().string(), rows[i][1]));
    }
    return s;
}

void write_series(const MonthlySeries& s, const fs::path& path) {
    std::ofstream out(path);
    out << "year_month,value\n";
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        out << s.start.plus(static_cast<int>(i)).str() << ',' << fmt_double(s.values[i]) << '\n';
    }
    if (!out) throw ScenarioError("cannot write '" + path.string() + "'");
}

std::vector<BracketDistribution::Bracket> read_brackets(const fs::path& path) {
    std::vector<BracketDistribution::Bracket> out;
    for (const auto& row : read_csv(path, 2)) {
        out.push_back({parse_double("lower_bound", row[0]), parse_double("mass", row[1])});
    }
    return out;
}

void write_brackets(const BracketDistribution& d, const fs::path& path) {
    std::ofstream out(path);
    out << "lower_bound,mass\n";
    for (const auto& b : d.brackets) out << fmt_double(b.lower) << ',' << fmt_double(b.mass) << '\n';
    if (!out) throw ScenarioError("cannot write '" + path.string() + "'");
}

AmountBasis parse_basis(const std::string& text) {
    if (text == "stock") return AmountBasis::stock;
    if (text == "weekly") return AmountBasis::weekly;
    if (text == "monthly") return AmountBasis::monthly;
    if (text == "annual") return AmountBasis::annual;
    throw ScenarioError("unknown amount basis '" + text + "' (stock|weekly|monthly|annual)");
}

std::string basis_name(AmountBasis b) {
    switch (b) {
        case AmountBasis::stock: return "stock";
        case AmountBasis::weekly: return "weekly";
        case AmountBasis::monthly: return "monthly";
        case AmountBasis::annual: return "annual";
    }
    return "stock";
}

std::vector<TaxBracket> parse_tax(const std::string& key, const std::string& text) {
    std::vector<TaxBracket> out;
    for (const auto& tok : split_ws(text)) {
        const auto colon = tok.find(':');
        if (colon == std::string::npos) {
            throw ScenarioError("malformed tax bracket '" + tok + "' (expected lower:rate)");
        }
        out.push_back({parse_double(key, tok.substr(0, colon)), parse_double(key, tok.substr(colon + 1))});
    }
    return out;
}

std::string fmt_tax(const std::vector<TaxBracket>& brackets) {
    std::string out;
    for (const auto& b : brackets) {
        if (!out.empty()) out += ' ';
        out += fmt_double(b.lower) + ":" + fmt_double(b.rate);
    }
    return out;
}

Spread parse_spread(const std::string& key, const std::string& text) {
    const auto toks = split_ws(text);
    if (toks.empty() || toks.size() > 2) {
        throw ScenarioError("malformed spread for '" + key + "' (expected: mean [halfwidth])");
    }
    return {parse_double(key, toks[0]), toks.size() == 2 ? parse_double(key, toks[1]) : 0.0};
}

/// One scenario.conf key. File-backed keys (series, distributions) hold a
/// file name relative to the scenario directory.
struct Field {
    std::string name;
    bool required;
    std::function<void(ScenarioConfig&, const std::string&, const fs::path&)> set;
    std::function<std::string(const ScenarioConfig&)> get;
    std::function<void(const ScenarioConfig&, const fs::path&)> write_file;
};

template <class Member>
Field number_field(std::string name, bool required, Member member) {
    return {name, required,
            [member, name](ScenarioConfig& c, const std::string& v, const fs::path&) {
                std::invoke(member, c) = parse_double(name, v);
            },
            [member](const ScenarioConfig& c) { return fmt_double(std::invoke(member, const_cast<ScenarioConfig&>(c))); },
            {}};
}

template <class Member>
Field int_field(std::string name, bool required, Member member) {
    return {name, required,
            [member, name](ScenarioConfig& c, const std::string& v, const fs::path&) {
                std::invoke(member, c) = parse_int(name, v);
            },
            [member](const ScenarioConfig& c) { return std::to_string(std::invoke(member, const_cast<ScenarioConfig&>(c))); },
            {}};
}

template <class Member>
Field spread_field(std::string name, Member member) {
    return {name, false,
            [member, name](ScenarioConfig& c, const std::string& v, const fs::path&) {
                std::invoke(member, c) = parse_spread(name, v);
            },
            [member](const ScenarioConfig& c) {
                const Spread& s = std::invoke(member, const_cast<ScenarioConfig&>(c));
                return fmt_double(s.mean) + " " + fmt_double(s.halfwidth);
            },
            {}};
}

template <class Member>
Field series_field(std::string name, Member member) {
    const std::string file = name + ".csv";
    return {name, true,
            [member](ScenarioConfig& c, const std::string& v, const fs::path& base) {
                std::invoke(member, c) = read_series(base / trim(v));
            },
            [file](const ScenarioConfig&) { return file; },
            [member, file](const ScenarioConfig& c, const fs::path& dir) {
                write_series(std::invoke(member, const_cast<ScenarioConfig&>(c)), dir / file);
            }};
}

template <class Member>
std::vector<Field> dist_fields(std::string name, Member member) {
    const std::string file = name + ".csv";
    return {{name, true,
             [member](ScenarioConfig& c, const std::string& v, const fs::path& base) {
                 std::invoke(member, c).brackets = read_brackets(base / trim(v));
             },
             [file](const ScenarioConfig&) { return file; },
             [member, file](const ScenarioConfig& c, const fs::path& dir) {
                 write_brackets(std::invoke(member, const_cast<ScenarioConfig&>(c)), dir / file);
             }},
            {name + "_basis", false,
             [member](ScenarioConfig& c, const std::string& v, const fs::path&) {
                 std::invoke(member, c).basis = parse_basis(trim(v));
             },
             [member](const ScenarioConfig& c) { return basis_name(std::invoke(member, const_cast<ScenarioConfig&>(c)).basis); },
             {}}};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = [] {
        using C = ScenarioConfig;
        std::vector<Field> f;
        f.push_back({"name", false,
                     [](C& c, const std::string& v, const fs::path&) { c.name = trim(v); },
                     [](const C& c) { return c.name; },
                     {}});
        f.push_back({"calendar_start", true,
                     [](C& c, const std::string& v, const fs::path&) {
                         c.calendar_start = YearMonth::parse(trim(v));
                     },
                     [](const C& c) { return c.calendar_start.str(); },
                     {}});
        f.push_back(int_field("calendar_months", false, &C::calendar_months));
        f.push_back(int_field("equilibration_months", false, &C::equilibration_months));
        f.push_back(number_field("scale_factor", false, &C::scale_factor));
        f.push_back(int_field("n_sim_households", false, &C::n_sim_households));
        f.push_back(number_field("trend_aptitude", true, &C::trend_aptitude));
        f.push_back(number_field("initial_price_mean", true, &C::initial_price_mean));
        f.push_back(number_field("initial_price_sigma", false, &C::initial_price_sigma));

        f.push_back({"tax_brackets", true,
                     [](C& c, const std::string& v, const fs::path&) {
                         c.external.tax_brackets = parse_tax("tax_brackets", v);
                     },
                     [](const C& c) { return fmt_tax(c.external.tax_brackets); },
                     {}});
        auto ext_number = [&](std::string name, bool required, auto member) {
            return Field{name, required,
                         [member, name](C& c, const std::string& v, const fs::path&) {
                             std::invoke(member, c.external) = parse_double(name, v);
                         },
                         [member](const C& c) { return fmt_double(std::invoke(member, c.external)); },
                         {}};
        };
        using E = ExternalParams;
        f.push_back(ext_number("house_owning_expense_rate", false, &E::house_owning_expense_rate));
        f.push_back(ext_number("purchase_tax_rate", false, &E::purchase_tax_rate));
        f.push_back({"mortgage_duration_months", false,
                     [](C& c, const std::string& v, const fs::path&) {
                         c.external.mortgage_duration_months = parse_int("mortgage_duration_months", v);
                     },
                     [](const C& c) { return std::to_string(c.external.mortgage_duration_months); },
                     {}});
        f.push_back(ext_number("lvr_mean", true, &E::lvr_mean));
        f.push_back(ext_number("lvr_halfwidth", false, &E::lvr_halfwidth));
        f.push_back(ext_number("mortgage_income_coeff", true, &E::mortgage_income_coeff));
        f.push_back(ext_number("mortgage_income_exponent", true, &E::mortgage_income_exponent));
        f.push_back(ext_number("mortgage_income_unit", false, &E::mortgage_income_unit));
        f.push_back(ext_number("initial_dwelling_count", true, &E::initial_dwelling_count));
        f.push_back(series_field("mortgage_rate_series",
                                 [](C& c) -> MonthlySeries& { return c.external.mortgage_rate_series; }));
        f.push_back(series_field("overseas_capacity_series",
                                 [](C& c) -> MonthlySeries& { return c.external.overseas_capacity_series; }));
        f.push_back(series_field("construction_series",
                                 [](C& c) -> MonthlySeries& { return c.external.construction_series; }));
        f.push_back(series_field("household_count_series",
                                 [](C& c) -> MonthlySeries& { return c.external.household_count_series; }));

        for (auto&& d : dist_fields("income_dist", &C::income_dist)) f.push_back(std::move(d));
        for (auto&& d : dist_fields("wealth_dist", &C::wealth_dist)) f.push_back(std::move(d));
        for (auto&& d : dist_fields("rent_dist", &C::rent_dist)) f.push_back(std::move(d));
        for (auto&& d : dist_fields("mortgage_dist", &C::mortgage_dist)) f.push_back(std::move(d));

        auto internal = [](Spread InternalParams::*m) {
            return [m](C& c) -> Spread& { return c.internal.*m; };
        };
        using I = InternalParams;
        f.push_back(spread_field("income_growth", internal(&I::income_growth)));
        f.push_back(spread_field("consumption_income", internal(&I::consumption_income)));
        f.push_back(spread_field("consumption_wealth", internal(&I::consumption_wealth)));
        f.push_back(spread_field("rent_income", internal(&I::rent_income)));
        f.push_back(spread_field("rent_mortgage", internal(&I::rent_mortgage)));
        f.push_back(spread_field("downpayment_to_wealth", internal(&I::downpayment_to_wealth)));
        f.push_back(spread_field("loan_to_value", internal(&I::loan_to_value)));
        f.push_back(spread_field("debt_to_income", internal(&I::debt_to_income)));
        f.push_back(spread_field("approval_rate", internal(&I::approval_rate)));
        f.push_back(spread_field("bid_factor", internal(&I::bid_factor)));
        f.push_back(spread_field("list_factor", internal(&I::list_factor)));
        f.push_back(spread_field("sold_to_list_exponent", internal(&I::sold_to_list_exponent)));
        f.push_back(spread_field("months_listed_exponent", internal(&I::months_listed_exponent)));
        f.push_back(number_field("expectation_downshift", false,
                                 [](C& c) -> double& { return c.internal.expectation_downshift; }));
        f.push_back(number_field("list_probability", false,
                                 [](C& c) -> double& { return c.internal.list_probability; }));
        f.push_back(number_field("clearance_probability", false,
                                 [](C& c) -> double& { return c.internal.clearance_probability; }));

        auto model_number = [](std::string name, double ModelOptions::*m) {
            return number_field(name, false, [m](C& c) -> double& { return c.model.*m; });
        };
        auto model_int = [](std::string name, int ModelOptions::*m) {
            return int_field(name, false, [m](C& c) -> int& { return c.model.*m; });
        };
        using M = ModelOptions;
        f.push_back(model_number("buyer_urgency", &M::buyer_urgency));
        f.push_back(model_int("buyer_urgency_months", &M::buyer_urgency_months));
        f.push_back(model_number("seller_urgency", &M::seller_urgency));
        f.push_back(model_int("portfolio_cap", &M::portfolio_cap));
        f.push_back(model_number("p1_denominator_floor", &M::p1_denominator_floor));
        f.push_back(model_number("owner_occupier_fraction", &M::owner_occupier_fraction));
        f.push_back(model_number("investor_stock_share", &M::investor_stock_share));
        f.push_back(model_number("initial_mortgage_fraction", &M::initial_mortgage_fraction));
        f.push_back(model_number("settlement_overdraft", &M::settlement_overdraft));
        f.push_back(model_int("comparable_count", &M::comparable_count));
        f.push_back({"deal_price", false,
                     [](C& c, const std::string& v, const fs::path&) {
                         const auto t = trim(v);
                         if (t == "bid") c.model.deal_price = DealPriceRule::bid;
                         else if (t == "list") c.model.deal_price = DealPriceRule::list;
                         else throw ScenarioError("deal_price must be 'bid' or 'list', got '" + t + "'");
                     },
                     [](const C& c) { return std::string(c.model.deal_price == DealPriceRule::bid ? "bid" : "list"); },
                     {}});
        return f;
    }();
    return table;
}

const Field* find_field(const std::string& key) {
    for (const auto& f : fields()) {
        if (f.name == key) return &f;
    }
    return nullptr;
}

std::map<std::string, std::string> read_conf(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw ScenarioError("cannot read scenario file '" + file.string() + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ScenarioError(file.string() + ":" + std::to_string(lineno) + ": expected key = value");
        }
        const auto key = trim(line.substr(0, eq));
        if (!find_field(key)) {
            throw ScenarioError(file.string() + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
        if (!kv.emplace(key, trim(line.substr(eq + 1))).second) {
            throw ScenarioError(file.string() + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
    }
    return kv;
}

void require_fraction(double v, const std::string& what) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw ScenarioError(what + " must be a fraction in [0,1], got " + fmt_double(v));
    }
}

void validate_dist(const BracketDistribution& d, const std::string& what) {
    if (d.brackets.empty()) throw ScenarioError(what + " has no brackets");
    double total = 0.0;
    for (std::size_t i = 0; i < d.brackets.size(); ++i) {
        if (!(d.brackets[i].mass >= 0.0)) throw ScenarioError(what + " has a negative bracket mass");
        if (i > 0 && !(d.brackets[i].lower > d.brackets[i - 1].lower)) {
            throw ScenarioError(what + " lower bounds are not strictly increasing");
        }
        total += d.brackets[i].mass;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ScenarioError(what + " masses sum to " + fmt_double(total) + ", expected 1");
    }
}

void validate_series(const ScenarioConfig& c, const MonthlySeries& s, const std::string& what) {
    const YearMonth end = c.calendar_start.plus(c.calendar_months - 1);
    if (s.empty() || !s.covers(c.calendar_start) || !s.covers(end)) {
        throw ScenarioError(what + " does not cover the calendar window " + c.calendar_start.str() + " .. " +
                            end.str());
    }
}

void validate_spread(const Spread& s, const std::string& what) {
    if (!(s.halfwidth >= 0.0)) throw ScenarioError(what + " half-width must be >= 0");
    if (!(s.mean - s.halfwidth >= 0.0)) throw ScenarioError(what + " mean - half-width must be >= 0");
}

}  // namespace

std::vector<std::string> scenario_keys() {
    std::vector<std::string> keys;
    for (const auto& f : fields()) keys.push_back(f.name);
    return keys;
}

void validate(const ScenarioConfig& c) {
    const auto& e = c.external;
    if (c.n_sim_households <= 0) throw ScenarioError("n_sim_households must be > 0");
    if (c.equilibration_months < 0) throw ScenarioError("equilibration_months must be >= 0");
    if (c.calendar_months < 1) throw ScenarioError("calendar_months must be >= 1");
    if (!(c.scale_factor >= 1.0)) throw ScenarioError("scale_factor must be >= 1");
    if (!(c.initial_price_mean > 0.0)) throw ScenarioError("initial_price_mean must be > 0");
    if (!(c.initial_price_sigma >= 0.0)) throw ScenarioError("initial_price_sigma must be >= 0");

    for (std::size_t i = 0; i < e.tax_brackets.size(); ++i) {
        require_fraction(e.tax_brackets[i].rate, "tax rate");
        if (i > 0 && !(e.tax_brackets[i].lower > e.tax_brackets[i - 1].lower)) {
            throw ScenarioError("tax brackets must be strictly increasing by lower bound");
        }
    }
    require_fraction(e.house_owning_expense_rate, "house_owning_expense_rate");
    require_fraction(e.purchase_tax_rate, "purchase_tax_rate");
    require_fraction(e.lvr_mean, "lvr_mean");
    require_fraction(e.lvr_halfwidth, "lvr_halfwidth");
    if (e.mortgage_duration_months <= 0) throw ScenarioError("mortgage_duration_months must be > 0");
    if (!(e.mortgage_income_coeff > 0.0)) throw ScenarioError("mortgage_income_coeff must be > 0");
    if (!(e.mortgage_income_unit > 0.0)) throw ScenarioError("mortgage_income_unit must be > 0");
    if (!(e.initial_dwelling_count > 0.0)) throw ScenarioError("initial_dwelling_count must be > 0");

    validate_series(c, e.mortgage_rate_series, "mortgage_rate_series");
    validate_series(c, e.overseas_capacity_series, "overseas_capacity_series");
    validate_series(c, e.construction_series, "construction_series");
    validate_series(c, e.household_count_series, "household_count_series");
    for (double r : e.mortgage_rate_series.values) require_fraction(r, "mortgage rate");
    for (double v : e.construction_series.values) {
        if (v < 0.0) throw ScenarioError("construction_series values must be >= 0");
    }
    for (double v : e.overseas_capacity_series.values) {
        if (v < 0.0) throw ScenarioError("overseas_capacity_series values must be >= 0");
    }
    if (!(e.household_count_series.at(c.calendar_start) > 0.0)) {
        throw ScenarioError("household count at calendar start must be > 0");
    }

    validate_dist(c.income_dist, "income_dist");
    validate_dist(c.wealth_dist, "wealth_dist");
    validate_dist(c.rent_dist, "rent_dist");
    validate_dist(c.mortgage_dist, "mortgage_dist");

    const auto& in = c.internal;
    validate_spread(in.income_growth, "income_growth");
    validate_spread(in.consumption_income, "consumption_income");
    validate_spread(in.consumption_wealth, "consumption_wealth");
    validate_spread(in.rent_income, "rent_income");
    validate_spread(in.rent_mortgage, "rent_mortgage");
    validate_spread(in.downpayment_to_wealth, "downpayment_to_wealth");
    validate_spread(in.loan_to_value, "loan_to_value");
    validate_spread(in.debt_to_income, "debt_to_income");
    validate_spread(in.approval_rate, "approval_rate");
    validate_spread(in.bid_factor, "bid_factor");
    validate_spread(in.list_factor, "list_factor");
    validate_spread(in.sold_to_list_exponent, "sold_to_list_exponent");
    validate_spread(in.months_listed_exponent, "months_listed_exponent");
    if (!(in.loan_to_value.mean + in.loan_to_value.halfwidth < 1.0)) {
        throw ScenarioError("loan_to_value must stay below 1");
    }
    require_fraction(in.expectation_downshift, "expectation_downshift");
    require_fraction(in.list_probability, "list_probability");
    require_fraction(in.clearance_probability, "clearance_probability");

    const auto& m = c.model;
    require_fraction(m.owner_occupier_fraction, "owner_occupier_fraction");
    require_fraction(m.investor_stock_share, "investor_stock_share");
    require_fraction(m.initial_mortgage_fraction, "initial_mortgage_fraction");
    if (!(m.buyer_urgency > 0.0) || !(m.seller_urgency > 0.0)) throw ScenarioError("urgencies must be > 0");
    if (m.buyer_urgency_months < 0) throw ScenarioError("buyer_urgency_months must be >= 0");
    if (m.portfolio_cap < 1) throw ScenarioError("portfolio_cap must be >= 1");
    if (!(m.p1_denominator_floor > 0.0)) throw ScenarioError("p1_denominator_floor must be > 0");
    if (!(m.settlement_overdraft >= 0.0)) throw ScenarioError("settlement_overdraft must be >= 0");
    if (m.comparable_count < 1) throw ScenarioError("comparable_count must be >= 1");
}

ScenarioConfig load_scenario(const fs::path& path, const Overrides& overrides) {
    fs::path file = path;
    std::error_code ec;
    if (fs::is_directory(path, ec)) file = path / "scenario.conf";
    if (!fs::exists(file, ec)) throw ScenarioError("scenario not found: '" + path.string() + "'");
    const fs::path base = file.parent_path();

    auto kv = read_conf(file);
    for (const auto& [key, value] : overrides) {
        if (!find_field(key)) throw ScenarioError("unknown override key '" + key + "'");
        kv[key] = value;
    }
    // An explicit population override wins over the file's scale factor.
    if (overrides.count("n_sim_households") && !overrides.count("scale_factor")) kv.erase("scale_factor");

    ScenarioConfig config;
    for (const auto& f : fields()) {
        const auto it = kv.find(f.name);
        if (it == kv.end()) {
            if (f.required) throw ScenarioError("missing required key '" + f.name + "' in " + file.string());
            continue;
        }
        f.set(config, it->second, base);
    }

    const bool has_scale = kv.count("scale_factor") > 0;
    const bool has_n = kv.count("n_sim_households") > 0;
    const auto& households = config.external.household_count_series;
    if (!households.covers(config.calendar_start)) {
        throw ScenarioError("household_count_series does not cover calendar_start " + config.calendar_start.str());
    }
    const double real = households.at(config.calendar_start);
    if (has_n && !has_scale) {
        set_household_count(config, config.n_sim_households);
    } else if (!has_n) {
        if (!(config.scale_factor > 0.0)) throw ScenarioError("scale_factor must be > 0");
        config.n_sim_households = static_cast<int>(std::lround(real / config.scale_factor));
    } else if (std::lround(real / config.scale_factor) != config.n_sim_households) {
        throw ScenarioError("n_sim_households and scale_factor disagree with the household count at start");
    }
    validate(config);
    return config;
}

void save_scenario(const ScenarioConfig& config, const fs::path& dir) {
    fs::create_directories(dir);
    std::ofstream out(dir / "scenario.conf");
    if (!out) throw ScenarioError("cannot write scenario to '" + dir.string() + "'");
    for (const auto& f : fields()) {
        out << f.name << " = " << f.get(config) << '\n';
        if (f.write_file) f.write_file(config, dir);
    }
}

}  // namespace hsim
