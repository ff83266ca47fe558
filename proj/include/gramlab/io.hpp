#pragma once

#include "gramlab/bounds.hpp"
#include "gramlab/covariance.hpp"
#include "gramlab/harness.hpp"
#include "gramlab/regression.hpp"
#include "gramlab/scenarios.hpp"
#include "gramlab/types.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace gramlab {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Malformed CSV content; row and column are 1-based, row counting the header.
class CsvError : public InvalidInput {
public:
    CsvError(const std::string& what, std::size_t row, std::size_t column);
    std::size_t row;
    std::size_t column;
};

struct Table {
    std::vector<std::string> header;
    Matrix values;
};

// Shortest decimal that reads back to the same double; "nan", "inf", "-inf".
std::string format_double(double v);
// Whole-field parse; throws InvalidInput on anything else.
double parse_double(std::string_view text);

Table parse_csv(std::istream& in);
Table read_csv(const std::string& path);
std::string format_csv(const Table& table);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);
void write_csv(const std::string& path, const Table& table);

Sample sample_from_table(const Table& t);
// The last column is the label.
LabeledSample labeled_from_table(const Table& t);
Table table_from_sample(const LabeledSample& s);

Json to_json(const Matrix& m);
Json to_json(const Vector& v);
Json to_json(const BoundsReport& r);
Json to_json(const GramEstimate& g);
Json to_json(const CovarianceEstimate& c);
Json to_json(const RegressionFit& f);
Json to_json(const ExperimentResult& r);
Json to_json(const Scenario& s);
// Doubles with non-finite values become null.
Json number_or_null(double v);

Matrix matrix_from_json(const Json& j);

// {"name": ..., "params": {...}}; unknown keys are rejected.
Scenario scenario_from_json(const Json& j);

Table records_table(const ExperimentResult& r);
Table quantile_csv_table(const QuantileTable& q);

}  // namespace gramlab
