#include "intorder/io.hpp"

#include "intorder/errors.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <vector>

namespace intorder {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string location(std::size_t line, std::size_t col)
{
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

std::string_view to_string(Transform t)
{
    switch (t) {
    case Transform::Identity:
        return "identity";
    case Transform::Logit:
        return "logit";
    case Transform::Log:
        return "log";
    case Transform::Probit:
        return "probit";
    }
    return "?";
}

std::optional<Transform> parse_transform(std::string_view name)
{
    for (Transform t : {Transform::Identity, Transform::Logit, Transform::Log, Transform::Probit}) {
        if (name == to_string(t)) {
            return t;
        }
    }
    return std::nullopt;
}

double apply_transform(Transform t, double x)
{
    switch (t) {
    case Transform::Identity:
        return x;
    case Transform::Logit:
        if (!(x > 0.0 && x < 1.0)) {
            throw DomainError("logit needs values in (0, 1), got " + std::to_string(x));
        }
        return std::log(x / (1.0 - x));
    case Transform::Log:
        if (!(x > 0.0)) {
            throw DomainError("log needs positive values, got " + std::to_string(x));
        }
        return std::log(x);
    case Transform::Probit:
        if (!(x > 0.0 && x < 1.0)) {
            throw DomainError("probit needs values in (0, 1), got " + std::to_string(x));
        }
        return std::numbers::sqrt2 * boost::math::erf_inv(2.0 * x - 1.0);
    }
    return x;
}

double inverse_transform(Transform t, double y)
{
    switch (t) {
    case Transform::Identity:
        return y;
    case Transform::Logit:
        return 1.0 / (1.0 + std::exp(-y));
    case Transform::Log:
        return std::exp(y);
    case Transform::Probit:
        return 0.5 * std::erfc(-y / std::numbers::sqrt2);
    }
    return y;
}

FunctionalPanel parse_panel(std::istream& in, const IngestConfig& cfg)
{
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header_pending = cfg.has_header;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        if (header_pending) {
            header_pending = false;
            continue;
        }
        std::vector<double> row;
        std::string_view rest(line);
        std::size_t col = 0;
        for (;;) {
            ++col;
            const auto pos = rest.find(cfg.delimiter);
            const std::string_view cell = trim(rest.substr(0, pos));
            double value = 0.0;
            const char* end = cell.data() + cell.size();
            const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
            if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
                throw ParseError("non-numeric cell '" + std::string(cell) + "' at " + location(line_no, col));
            }
            try {
                row.push_back(apply_transform(cfg.transform, value));
            } catch (const DomainError& e) {
                throw ParseError(std::string(e.what()) + " at " + location(line_no, col));
            }
            if (pos == std::string_view::npos) {
                break;
            }
            rest.remove_prefix(pos + 1);
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ParseError("ragged row at line " + std::to_string(line_no) + ": " + std::to_string(row.size()) +
                             " cells, expected " + std::to_string(rows.front().size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2) {
        throw ParseError("panel needs at least two rows of data, found " + std::to_string(rows.size()));
    }

    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto g = static_cast<Eigen::Index>(rows.front().size());
    Eigen::MatrixXd values(n, g);
    for (Eigen::Index t = 0; t < n; ++t) {
        for (Eigen::Index i = 0; i < g; ++i) {
            values(t, i) = rows[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
        }
    }
    if (cfg.initialize) {
        const Eigen::RowVectorXd first = values.row(0);
        values.rowwise() -= first;
    }
    const Grid grid = g == 1 ? Grid::scalar() : Grid(static_cast<std::size_t>(g), cfg.grid_lower, cfg.grid_upper);
    return FunctionalPanel(grid, std::move(values), 1);
}

FunctionalPanel ingest(const IngestConfig& cfg)
{
    std::ifstream in(cfg.path);
    if (!in) {
        throw IoError("cannot open " + cfg.path.string());
    }
    return parse_panel(in, cfg);
}

void write_panel_csv(std::ostream& out, const FunctionalPanel& panel, char delimiter)
{
    const Eigen::MatrixXd& v = panel.values();
    char buf[32];
    for (Eigen::Index t = 0; t < v.rows(); ++t) {
        for (Eigen::Index i = 0; i < v.cols(); ++i) {
            if (i > 0) {
                out.put(delimiter);
            }
            std::snprintf(buf, sizeof buf, "%.17g", v(t, i));
            out << buf;
        }
        out.put('\n');
    }
}

void write_panel_csv(const std::filesystem::path& path, const FunctionalPanel& panel, char delimiter)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    write_panel_csv(out, panel, delimiter);
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

nlohmann::json to_json(const TestReport& r)
{
    return {
        {"schema", kTestReportSchema},
        {"order", r.order},
        {"demeaned", r.demeaned},
        {"statistic", r.statistic},
        {"p_value", r.p_value},
        {"p_value_floor", r.limit_reps > 0 ? 1.0 / static_cast<double>(r.limit_reps) : 0.0},
        {"decision", to_string(r.decision)},
        {"alpha", r.alpha},
        {"q", r.q},
        {"n_obs", r.n_obs},
        {"limit", to_string(r.limit)},
        {"lower_quantile", r.lower_quantile},
        {"upper_quantile", r.upper_quantile},
        {"limit_reps", r.limit_reps},
        {"eigen_gap", r.eigen_gap},
        {"degenerate_direction", r.degenerate_direction},
        {"direction_source", r.direction_from_levels ? "levels" : "differenced"},
    };
}

nlohmann::json to_json(const SequentialReport& r)
{
    nlohmann::json stages = nlohmann::json::array();
    for (const TestReport& s : r.stages) {
        stages.push_back(to_json(s));
    }
    return {
        {"schema", kSequentialSchema},
        {"d_seq", r.d_seq},
        {"interval", to_string(r.interval)},
        {"integer_order", is_integer(r.interval)},
        {"reversed", r.reversed},
        {"max_order", r.max_order},
        {"stages", std::move(stages)},
    };
}

nlohmann::json to_json(const DgpRealization& real)
{
    nlohmann::json arma = nlohmann::json::array();
    for (const ArmaCoeffs& c : real.arma) {
        arma.push_back({{"phi", c.phi}, {"theta", c.theta}});
    }
    const DgpConfig& cfg = real.config;
    return {
        {"schema", kRealizationSchema},
        {"config",
         {{"T", cfg.T},
          {"G", cfg.G},
          {"d1", cfg.d1},
          {"regime", to_string(cfg.regime)},
          {"local_c", cfg.local_c},
          {"b", cfg.b},
          {"with_intercept", cfg.with_intercept},
          {"coordinate_cap", cfg.coordinate_cap},
          {"q_rule", to_string(cfg.q_rule)},
          {"seed", cfg.seed}}},
        {"d1", real.d1},
        {"drawn_d", real.spectrum.d},
        {"drawn_p", real.spectrum.p},
        {"coordinates", real.spectrum.coordinates()},
        {"basis_perm", real.basis_perm},
        {"arma", std::move(arma)},
        {"intercept", real.intercept},
        {"notes",
         "memory blocks are drawn until the coordinate cap is reached; coordinates are scaled by l^-2"},
    };
}

}  // namespace intorder
