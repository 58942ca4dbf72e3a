#include "ldp/reportio.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ldp {

namespace {

std::vector<std::string> split_on(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError("cannot parse " + what + ": '" + s + "'");
  }
}

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size() || (!s.empty() && s[0] == '-')) throw std::invalid_argument("bad");
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw ParseError("cannot parse " + what + ": '" + s + "'");
  }
}

long long parse_i64(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError("cannot parse " + what + ": '" + s + "'");
  }
}

const char* kind_name(FrequencyMatrix::Kind kind) {
  return kind == FrequencyMatrix::Kind::orthogonal ? "orthogonal" : "random_projection";
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

MatrixDesc describe_matrix(const FrequencyMatrix& matrix) {
  return MatrixDesc{matrix.kind(), matrix.rows(), matrix.cols(), matrix.seed()};
}

FrequencyMatrix rebuild_matrix(const MatrixDesc& desc) {
  if (desc.kind == FrequencyMatrix::Kind::orthogonal) {
    FrequencyMatrix m = FrequencyMatrix::orthogonal(desc.cols);
    if (m.rows() != desc.rows) {
      throw ParseError("orthogonal matrix descriptor rows " + std::to_string(desc.rows) + " do not match " +
                       std::to_string(m.rows()) + " for " + std::to_string(desc.cols) + " columns");
    }
    return m;
  }
  return FrequencyMatrix::random_projection(desc.rows, desc.cols, desc.seed);
}

void write_report_file(std::ostream& out, const ReportFile& file) {
  out << "#method=" << file.method << "\n";
  out << "#epsilon=" << format_double(file.epsilon) << "\n";
  out << "#seed=" << file.seed << "\n";
  out << "#n=" << file.n << "\n";
  for (std::size_t i = 0; i < file.schema.size(); ++i) {
    const auto& a = file.schema.at(i);
    if (a.kind == AttrKind::numeric) {
      out << "#attr=" << a.name << ",numeric," << format_double(a.raw_min) << "," << format_double(a.raw_max) << "\n";
    } else {
      out << "#attr=" << a.name << ",categorical," << a.k << "\n";
    }
  }
  for (const auto& [idx, desc] : file.matrices) {
    out << "#matrix=" << (idx + 1) << ":" << kind_name(desc.kind) << ":" << desc.rows << ":" << desc.cols << ":"
        << desc.seed << "\n";
  }
  const bool with_scale = file.method == "multi";
  for (const auto& row : file.rows) {
    const std::uint64_t wire_index = row.attr_index == kBlockIndex ? 0 : static_cast<std::uint64_t>(row.attr_index) + 1;
    out << row.user_id << "," << wire_index << "," << row.tag;
    if (row.tag == 'N') {
      out << "," << (row.sign > 0 ? "+1" : "-1");
    } else if (row.tag == 'C') {
      out << "," << (row.s + 1) << "," << format_double(row.alpha);
    } else {
      out << ",";
      for (std::size_t i = 0; i < row.dense.size(); ++i) {
        if (i) out << ";";
        out << format_double(row.dense[i]);
      }
    }
    if (with_scale) out << "," << row.scale;
    out << "\n";
  }
}

void write_report_file(const std::string& path, const ReportFile& file) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open report file for writing: " + path);
  write_report_file(out, file);
}

ReportFile read_report_file(std::istream& in) {
  ReportFile file;
  std::vector<AttributeSpec> attrs;
  std::vector<std::pair<std::size_t, MatrixDesc>> matrices;
  bool have_method = false;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const auto eq = t.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = t.substr(1, eq - 1);
      const std::string value = t.substr(eq + 1);
      if (key == "method") {
        file.method = value;
        have_method = true;
      } else if (key == "epsilon") {
        file.epsilon = parse_double(value, "epsilon");
      } else if (key == "seed") {
        file.seed = parse_u64(value, "seed");
      } else if (key == "n") {
        file.n = parse_u64(value, "n");
      } else if (key == "attr") {
        const auto fields = split_on(value, ',');
        if (fields.size() < 2) throw ParseError("report line " + std::to_string(lineno) + ": bad attr header");
        if (trim(fields[1]) == "numeric") {
          if (fields.size() != 4) throw ParseError("report line " + std::to_string(lineno) + ": bad numeric attr");
          attrs.push_back(AttributeSpec::make_numeric(trim(fields[0]), parse_double(trim(fields[2]), "raw_min"),
                                                      parse_double(trim(fields[3]), "raw_max")));
        } else if (trim(fields[1]) == "categorical") {
          if (fields.size() != 3) throw ParseError("report line " + std::to_string(lineno) + ": bad categorical attr");
          attrs.push_back(AttributeSpec::make_categorical(trim(fields[0]), parse_u64(trim(fields[2]), "k")));
        } else {
          throw ParseError("report line " + std::to_string(lineno) + ": unknown attr kind '" + fields[1] + "'");
        }
      } else if (key == "matrix") {
        const auto fields = split_on(value, ':');
        if (fields.size() != 5) throw ParseError("report line " + std::to_string(lineno) + ": bad matrix header");
        const std::uint64_t wire_index = parse_u64(fields[0], "matrix attribute index");
        if (wire_index == 0) throw ParseError("report line " + std::to_string(lineno) + ": matrix index must be >= 1");
        MatrixDesc desc;
        if (fields[1] == "orthogonal") {
          desc.kind = FrequencyMatrix::Kind::orthogonal;
        } else if (fields[1] == "random_projection") {
          desc.kind = FrequencyMatrix::Kind::random_projection;
        } else {
          throw ParseError("report line " + std::to_string(lineno) + ": unknown matrix kind '" + fields[1] + "'");
        }
        desc.rows = parse_u64(fields[2], "matrix rows");
        desc.cols = parse_u64(fields[3], "matrix cols");
        desc.seed = parse_u64(fields[4], "matrix seed");
        matrices.emplace_back(wire_index - 1, desc);
      }
      continue;
    }

    const auto fields = split_on(t, ',');
    if (fields.size() < 3) throw ParseError("report line " + std::to_string(lineno) + ": too few fields");
    ReportRow row;
    row.user_id = parse_u64(trim(fields[0]), "user_id");
    const std::uint64_t wire_index = parse_u64(trim(fields[1]), "attr_index");
    row.attr_index = wire_index == 0 ? kBlockIndex : static_cast<std::size_t>(wire_index - 1);
    const std::string tag = trim(fields[2]);
    if (tag.size() != 1 || (tag[0] != 'N' && tag[0] != 'C' && tag[0] != 'D')) {
      throw ParseError("report line " + std::to_string(lineno) + ": unknown payload tag '" + tag + "'");
    }
    row.tag = tag[0];
    std::size_t consumed = 3;
    if (row.tag == 'N') {
      if (fields.size() < 4) throw ParseError("report line " + std::to_string(lineno) + ": missing sign");
      const long long sign = parse_i64(trim(fields[3]), "sign");
      if (sign != 1 && sign != -1) throw ParseError("report line " + std::to_string(lineno) + ": sign must be +1/-1");
      row.sign = static_cast<int>(sign);
      consumed = 4;
    } else if (row.tag == 'C') {
      if (fields.size() < 5) throw ParseError("report line " + std::to_string(lineno) + ": missing s or alpha");
      const std::uint64_t wire_s = parse_u64(trim(fields[3]), "s");
      if (wire_s == 0) throw ParseError("report line " + std::to_string(lineno) + ": s must be >= 1");
      row.s = wire_s - 1;
      row.alpha = parse_double(trim(fields[4]), "alpha");
      consumed = 5;
    } else {
      if (fields.size() < 4) throw ParseError("report line " + std::to_string(lineno) + ": missing dense payload");
      for (const auto& piece : split_on(trim(fields[3]), ';')) {
        row.dense.push_back(parse_double(trim(piece), "dense entry"));
      }
      consumed = 4;
    }
    if (fields.size() > consumed) {
      row.scale = parse_u64(trim(fields[consumed]), "scale");
      ++consumed;
    }
    if (fields.size() > consumed) {
      throw ParseError("report line " + std::to_string(lineno) + ": trailing fields");
    }
    file.rows.push_back(std::move(row));
  }

  if (!have_method) throw ParseError("report file is missing the #method header");
  if (attrs.empty()) throw ParseError("report file is missing #attr headers");
  file.schema = Schema(std::move(attrs));
  for (auto& [idx, desc] : matrices) {
    if (idx >= file.schema.size() || file.schema.at(idx).kind != AttrKind::categorical) {
      throw ParseError("matrix header names attribute " + std::to_string(idx + 1) + ", which is not categorical");
    }
    file.matrices.emplace(idx, desc);
  }
  return file;
}

ReportFile read_report_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open report file: " + path);
  return read_report_file(in);
}

ReportRow row_from_numeric(std::uint64_t user_id, const NumericReport& report) {
  ReportRow row;
  row.user_id = user_id;
  row.attr_index = report.attr_index;
  row.tag = 'N';
  row.sign = report.sign;
  return row;
}

ReportRow row_from_categorical(std::uint64_t user_id, const CategoricalReport& report) {
  ReportRow row;
  row.user_id = user_id;
  row.attr_index = report.attr_index;
  row.tag = 'C';
  row.s = report.s;
  row.alpha = report.alpha;
  return row;
}

ReportRow row_from_multi(std::uint64_t user_id, const MultiReport& report) {
  ReportRow row;
  if (const auto* numeric = std::get_if<NumericReport>(&report.payload)) {
    row = row_from_numeric(user_id, *numeric);
  } else {
    row = row_from_categorical(user_id, std::get<CategoricalReport>(report.payload));
  }
  row.attr_index = report.attr_index;
  row.scale = report.scale;
  return row;
}

NumericReport numeric_from_row(const ReportRow& row, double epsilon, std::size_t d) {
  if (row.tag != 'N') throw KindMismatch("report row does not carry a numeric payload");
  NumericReport report;
  report.attr_index = row.attr_index;
  report.sign = row.sign;
  report.epsilon = epsilon;
  report.d = d;
  return report;
}

CategoricalReport categorical_from_row(const ReportRow& row) {
  if (row.tag != 'C') throw KindMismatch("report row does not carry a categorical payload");
  CategoricalReport report;
  report.s = row.s;
  report.alpha = row.alpha;
  report.attr_index = row.attr_index;
  return report;
}

MultiReport multi_from_row(const ReportRow& row, double epsilon, std::size_t d) {
  MultiReport report;
  report.attr_index = row.attr_index;
  report.scale = row.scale;
  if (row.tag == 'N') {
    report.payload = numeric_from_row(row, epsilon, d);
  } else {
    report.payload = categorical_from_row(row);
  }
  return report;
}

const char* loss_name(LossKind kind) {
  switch (kind) {
    case LossKind::linear: return "linear";
    case LossKind::logistic: return "logistic";
    case LossKind::hinge: return "hinge";
  }
  return "linear";
}

const char* mode_name(TrainMode mode) {
  switch (mode) {
    case TrainMode::private_sgd: return "private_sgd";
    case TrainMode::mgd: return "mgd";
    case TrainMode::mgd_dr: return "mgd_dr";
    case TrainMode::nonprivate_sgd: return "nonprivate_sgd";
  }
  return "mgd";
}

LossKind loss_from_name(const std::string& name) {
  if (name == "linear") return LossKind::linear;
  if (name == "logistic") return LossKind::logistic;
  if (name == "hinge") return LossKind::hinge;
  throw ParseError("unknown loss '" + name + "' (expected linear, logistic, or hinge)");
}

TrainMode mode_from_name(const std::string& name) {
  if (name == "private_sgd") return TrainMode::private_sgd;
  if (name == "mgd") return TrainMode::mgd;
  if (name == "mgd_dr") return TrainMode::mgd_dr;
  if (name == "nonprivate_sgd") return TrainMode::nonprivate_sgd;
  throw ParseError("unknown mode '" + name + "' (expected private_sgd, mgd, mgd_dr, or nonprivate_sgd)");
}

std::string serialize_model(const TrainConfig& config, const TrainResult& result, std::uint64_t seed) {
  std::ostringstream out;
  out << "mode=" << mode_name(config.mode) << "\n";
  out << "loss=" << loss_name(config.loss) << "\n";
  out << "lambda=" << format_double(config.lambda) << "\n";
  out << "epsilon=" << format_double(config.epsilon) << "\n";
  out << "r=" << config.r << "\n";
  out << "seed=" << seed << "\n";
  for (const double a : result.params.alpha) out << "alpha=" << format_double(a) << "\n";
  if (result.reduction) out << "reduction_seed=" << result.reduction->seed() << "\n";
  return out.str();
}

ParsedModel parse_model(std::istream& in) {
  ParsedModel model;
  bool have_mode = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError("model line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = t.substr(0, eq);
    const std::string value = t.substr(eq + 1);
    if (key == "mode") {
      model.config.mode = mode_from_name(value);
      have_mode = true;
    } else if (key == "loss") {
      model.config.loss = loss_from_name(value);
    } else if (key == "lambda") {
      model.config.lambda = parse_double(value, "lambda");
    } else if (key == "epsilon") {
      model.config.epsilon = parse_double(value, "epsilon");
    } else if (key == "r") {
      model.config.r = parse_u64(value, "r");
    } else if (key == "seed") {
      model.seed = parse_u64(value, "seed");
    } else if (key == "alpha") {
      model.alpha.push_back(parse_double(value, "alpha"));
    } else if (key == "reduction_seed") {
      model.reduction_seed = parse_u64(value, "reduction_seed");
    } else {
      throw ParseError("model line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  if (!have_mode) throw ParseError("model file is missing the mode line");
  if (model.alpha.empty()) throw ParseError("model file has no alpha entries");
  return model;
}

}  // namespace ldp
