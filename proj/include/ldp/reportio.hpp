#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ldp/erm.hpp"
#include "ldp/multi.hpp"
#include "ldp/schema.hpp"

namespace ldp {

// Formats a double so that parsing the text recovers the exact bits.
std::string format_double(double v);

// On-disk description of a virtual projection matrix, enough to rebuild
// it without storing entries.
struct MatrixDesc {
  FrequencyMatrix::Kind kind = FrequencyMatrix::Kind::orthogonal;
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  std::uint64_t seed = 0;
};

MatrixDesc describe_matrix(const FrequencyMatrix& matrix);
FrequencyMatrix rebuild_matrix(const MatrixDesc& desc);

// A perturbed-report file: '#key=value' header lines carrying the
// context an aggregator needs (method, epsilon, seed, population size,
// schema attributes, matrix descriptors), then one CSV row per report.
// Attribute indices and projection row indices are 1-based on the wire;
// in-memory structures are 0-based. Row forms:
//   <user_id>,<attr_index>,N,<sign>[,<scale>]        one-bit numeric
//   <user_id>,<attr_index>,C,<s>,<alpha>[,<scale>]   frequency-oracle cell
//   <user_id>,<attr_index>,D,<v1;v2;...>             dense vector
// The scale column appears only for method=multi. A dense row with
// attr_index 0 is a block covering the numeric attributes in schema
// order (the budget-splitting baseline's first report).
struct ReportRow {
  std::uint64_t user_id = 0;
  std::size_t attr_index = 0;  // 0-based; kBlockIndex for a numeric block
  char tag = 'N';
  int sign = +1;                // N
  std::uint64_t s = 0;          // C
  double alpha = 0.0;           // C
  std::vector<double> dense;    // D
  std::size_t scale = 1;
};

inline constexpr std::size_t kBlockIndex = static_cast<std::size_t>(-1);

struct ReportFile {
  std::string method;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t n = 0;
  Schema schema;
  std::map<std::size_t, MatrixDesc> matrices;
  std::vector<ReportRow> rows;
};

void write_report_file(std::ostream& out, const ReportFile& file);
void write_report_file(const std::string& path, const ReportFile& file);
ReportFile read_report_file(std::istream& in);
ReportFile read_report_file(const std::string& path);

// Conversions between wire rows and the mechanism structs.
ReportRow row_from_numeric(std::uint64_t user_id, const NumericReport& report);
ReportRow row_from_categorical(std::uint64_t user_id, const CategoricalReport& report);
ReportRow row_from_multi(std::uint64_t user_id, const MultiReport& report);
NumericReport numeric_from_row(const ReportRow& row, double epsilon, std::size_t d);
CategoricalReport categorical_from_row(const ReportRow& row);
MultiReport multi_from_row(const ReportRow& row, double epsilon, std::size_t d);

// Trained-model text record: mode, loss, lambda, epsilon, r, seed, the
// alpha entries at full precision, and the projection seed when dimension
// reduction was used.
std::string serialize_model(const TrainConfig& config, const TrainResult& result, std::uint64_t seed);

struct ParsedModel {
  TrainConfig config;
  std::uint64_t seed = 0;
  std::vector<double> alpha;
  std::optional<std::uint64_t> reduction_seed;
};

ParsedModel parse_model(std::istream& in);

const char* loss_name(LossKind kind);
const char* mode_name(TrainMode mode);
LossKind loss_from_name(const std::string& name);
TrainMode mode_from_name(const std::string& name);

}  // namespace ldp
