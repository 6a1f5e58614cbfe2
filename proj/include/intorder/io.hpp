#pragma once

// Panel CSV ingestion (with pre-test transforms) and JSON serialization of
// reports and simulated realizations.

#include "intorder/dgp.hpp"
#include "intorder/funcspace.hpp"
#include "intorder/vtests.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace intorder {

enum class Transform { Identity, Logit, Log, Probit };

std::string_view to_string(Transform t);
std::optional<Transform> parse_transform(std::string_view name);

// Throws DomainError outside the transform's domain: (0, 1) for logit and
// probit, (0, inf) for log.
double apply_transform(Transform t, double x);
double inverse_transform(Transform t, double y);

struct IngestConfig {
    std::filesystem::path path;
    Transform transform = Transform::Identity;
    bool initialize = true;  // subtract the first curve from every row
    bool has_header = false;
    char delimiter = ',';
    double grid_lower = 0.0;
    double grid_upper = 1.0;
};

// Rows are time, columns grid points. Errors name the offending line/column.
FunctionalPanel parse_panel(std::istream& in, const IngestConfig& cfg);
FunctionalPanel ingest(const IngestConfig& cfg);

// Full round-trip precision (%.17g), one curve per line.
void write_panel_csv(std::ostream& out, const FunctionalPanel& panel, char delimiter = ',');
void write_panel_csv(const std::filesystem::path& path, const FunctionalPanel& panel, char delimiter = ',');

inline constexpr std::string_view kTestReportSchema = "intorder.test_report/1";
inline constexpr std::string_view kSequentialSchema = "intorder.sequential_report/1";
inline constexpr std::string_view kRealizationSchema = "intorder.dgp_realization/1";

nlohmann::json to_json(const TestReport& report);
nlohmann::json to_json(const SequentialReport& report);
nlohmann::json to_json(const DgpRealization& realization);

}  // namespace intorder
