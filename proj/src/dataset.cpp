#include "ldp/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ldp/random.hpp"

namespace ldp {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double_at(const std::string& s, std::size_t lineno, const std::string& column) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError("row " + std::to_string(lineno) + ", column '" + column + "': cannot parse number '" + s + "'");
  }
}

}  // namespace

Dataset load_dataset(const std::string& csv_path, const std::string& schema_path) {
  const Schema schema = Schema::load(schema_path);
  std::ifstream in(csv_path);
  if (!in) throw ParseError("cannot open dataset file: " + csv_path);
  return load_dataset(in, schema);
}

Dataset load_dataset(std::istream& csv, const Schema& schema) {
  Dataset ds;
  ds.schema = schema;

  std::string line;
  std::size_t lineno = 0;

  // Header row: map schema attributes to file columns by name.
  std::vector<std::size_t> column_of(schema.size());
  {
    do {
      if (!std::getline(csv, line)) throw EmptyInput("dataset file is empty");
      ++lineno;
      line = trim(line);
    } while (line.empty() || line[0] == '#');
    const auto header = split_csv(line);
    for (std::size_t i = 0; i < schema.size(); ++i) {
      const std::string& want = schema.at(i).name;
      bool found = false;
      for (std::size_t c = 0; c < header.size(); ++c) {
        if (trim(header[c]) == want) {
          column_of[i] = c;
          found = true;
          break;
        }
      }
      if (!found) throw ParseError("dataset header is missing column '" + want + "'");
    }
  }

  // Index assignment for categorical labels, in order of first appearance.
  std::map<std::size_t, std::map<std::string, std::uint64_t>> label_index;

  while (std::getline(csv, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto fields = split_csv(t);
    std::vector<double> values(schema.size());
    for (std::size_t i = 0; i < schema.size(); ++i) {
      const auto& attr = schema.at(i);
      if (column_of[i] >= fields.size()) {
        throw ParseError("row " + std::to_string(lineno) + ": missing column '" + attr.name + "'");
      }
      const std::string raw = trim(fields[column_of[i]]);
      if (attr.kind == AttrKind::numeric) {
        const double v = parse_double_at(raw, lineno, attr.name);
        try {
          values[i] = normalize_numeric(v, attr.raw_min, attr.raw_max);
        } catch (const DomainViolation& e) {
          throw ParseError("row " + std::to_string(lineno) + ", column '" + attr.name + "': " + e.what());
        }
      } else {
        if (raw.empty()) throw ParseError("row " + std::to_string(lineno) + ": empty label for '" + attr.name + "'");
        auto& idx = label_index[i];
        auto it = idx.find(raw);
        if (it == idx.end()) {
          if (idx.size() >= attr.k) {
            throw ParseError("row " + std::to_string(lineno) + ", column '" + attr.name + "': label '" + raw +
                             "' exceeds the declared " + std::to_string(attr.k) + " values");
          }
          const std::uint64_t assigned = idx.size() + 1;
          idx.emplace(raw, assigned);
          ds.labels[i].push_back(raw);
          values[i] = static_cast<double>(assigned);
        } else {
          values[i] = static_cast<double>(it->second);
        }
      }
    }
    ds.tuples.emplace_back(std::move(values));
  }
  if (ds.tuples.empty()) throw EmptyInput("dataset has no rows");
  return ds;
}

OneHotResult onehot_transform(const std::vector<UserTuple>& tuples, const Schema& schema) {
  std::vector<AttributeSpec> out_attrs;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const auto& attr = schema.at(i);
    if (attr.kind == AttrKind::numeric) {
      out_attrs.push_back(AttributeSpec::make_numeric(attr.name, -1.0, 1.0));
    } else {
      for (std::uint64_t l = 1; l < attr.k; ++l) {
        out_attrs.push_back(AttributeSpec::make_numeric(attr.name + "." + std::to_string(l), -1.0, 1.0));
      }
    }
  }
  if (out_attrs.empty()) throw DegenerateParams("one-hot encoding produced no attributes");

  OneHotResult result{Schema(std::move(out_attrs)), {}};
  result.tuples.reserve(tuples.size());
  for (const auto& tuple : tuples) {
    validate_tuple(schema, tuple);
    std::vector<double> enc;
    enc.reserve(result.schema.size());
    for (std::size_t i = 0; i < schema.size(); ++i) {
      const auto& attr = schema.at(i);
      if (attr.kind == AttrKind::numeric) {
        enc.push_back(tuple[i]);
      } else {
        const auto value = static_cast<std::uint64_t>(tuple[i]);
        for (std::uint64_t l = 1; l < attr.k; ++l) {
          enc.push_back(value == l ? 1.0 : -1.0);
        }
      }
    }
    result.tuples.emplace_back(std::move(enc));
  }
  return result;
}

double mean_of(const std::vector<double>& values) {
  if (values.empty()) throw EmptyInput("mean of empty vector");
  double sum = 0.0;
  for (const double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

std::vector<double> binarize_label(const std::vector<double>& values) {
  return binarize_label(values, mean_of(values));
}

std::vector<double> binarize_label(const std::vector<double>& values, double threshold) {
  std::vector<double> out;
  out.reserve(values.size());
  for (const double v : values) out.push_back(v >= threshold ? 1.0 : -1.0);
  return out;
}

SynthSpec parse_synth_spec(const std::string& text) {
  SynthSpec spec;
  std::stringstream ss(text);
  std::string token;
  while (ss >> token) {
    SynthAttribute attr;
    if (token.rfind("num:", 0) == 0) {
      attr.kind = AttrKind::numeric;
      const std::string body = token.substr(4);
      std::size_t pos = 0;
      try {
        attr.mean = std::stod(body, &pos);
      } catch (const std::exception&) {
        throw ParseError("bad numeric mean in synth token '" + token + "'");
      }
      if (pos != body.size()) throw ParseError("bad numeric mean in synth token '" + token + "'");
      if (!(attr.mean > -1.0 && attr.mean < 1.0)) {
        throw DomainViolation("synth numeric mean must lie strictly inside (-1,1)");
      }
    } else if (token.rfind("cat:", 0) == 0) {
      attr.kind = AttrKind::categorical;
      std::stringstream fs(token.substr(4));
      std::string field;
      double total = 0.0;
      while (std::getline(fs, field, ',')) {
        std::size_t pos = 0;
        double p = 0.0;
        try {
          p = std::stod(field, &pos);
        } catch (const std::exception&) {
          throw ParseError("bad frequency in synth token '" + token + "'");
        }
        if (pos != field.size()) throw ParseError("bad frequency in synth token '" + token + "'");
        if (p < 0.0) throw DomainViolation("synth frequencies must be nonnegative");
        attr.freqs.push_back(p);
        total += p;
      }
      if (attr.freqs.size() < 2) throw DomainViolation("synth categorical attribute needs at least two values");
      if (std::abs(total - 1.0) > 1e-9) throw DomainViolation("synth frequencies must sum to 1");
    } else {
      throw ParseError("unknown synth token '" + token + "' (expected num:<mean> or cat:<p1,p2,...>)");
    }
    spec.attrs.push_back(std::move(attr));
  }
  if (spec.attrs.empty()) throw EmptyInput("synth spec has no attributes");
  return spec;
}

SynthResult synth_generate(const SynthSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw EmptyInput("synth population size must be positive");
  if (spec.attrs.empty()) throw EmptyInput("synth spec has no attributes");

  std::vector<AttributeSpec> attrs;
  SynthResult result;
  for (std::size_t i = 0; i < spec.attrs.size(); ++i) {
    const auto& sa = spec.attrs[i];
    const std::string name = "a" + std::to_string(i);
    if (sa.kind == AttrKind::numeric) {
      attrs.push_back(AttributeSpec::make_numeric(name, -1.0, 1.0));
      result.numeric_means.push_back(sa.mean);
    } else {
      attrs.push_back(AttributeSpec::make_categorical(name, sa.freqs.size()));
      result.cat_freqs[i] = sa.freqs;
    }
  }
  result.schema = Schema(std::move(attrs));

  RandomSource rng(seed);
  result.tuples.reserve(n);
  for (std::size_t u = 0; u < n; ++u) {
    std::vector<double> values(spec.attrs.size());
    for (std::size_t i = 0; i < spec.attrs.size(); ++i) {
      const auto& sa = spec.attrs[i];
      if (sa.kind == AttrKind::numeric) {
        // Uniform on the widest interval centered at the target mean that
        // stays inside [-1,1], so the population mean equals the target.
        const double half = 1.0 - std::abs(sa.mean);
        values[i] = sa.mean + (2.0 * rng.next_double() - 1.0) * half;
      } else {
        const double roll = rng.next_double();
        double acc = 0.0;
        std::uint64_t value = sa.freqs.size();
        for (std::size_t l = 0; l < sa.freqs.size(); ++l) {
          acc += sa.freqs[l];
          if (roll < acc) {
            value = l + 1;
            break;
          }
        }
        values[i] = static_cast<double>(value);
      }
    }
    result.tuples.emplace_back(std::move(values));
  }
  return result;
}

ErmSynthResult erm_synth_generate(const ErmSynthSpec& spec, std::size_t n, std::uint64_t seed) {
  if (spec.d == 0) throw DegenerateParams("planted model needs at least one feature");
  if (n == 0) throw EmptyInput("planted model population size must be positive");
  if (!(spec.noise >= 0.0)) throw DomainViolation("noise level must be nonnegative");

  RandomSource rng(seed);
  ErmSynthResult result;
  result.beta_star.resize(spec.d);
  const double entry = spec.beta_norm / std::sqrt(static_cast<double>(spec.d));
  for (std::size_t j = 0; j < spec.d; ++j) {
    result.beta_star[j] = rng.bernoulli(0.5) ? entry : -entry;
  }

  result.data.reserve(n);
  for (std::size_t u = 0; u < n; ++u) {
    LabeledTuple row;
    row.x.resize(spec.d);
    double dot = 0.0;
    for (std::size_t j = 0; j < spec.d; ++j) {
      row.x[j] = 2.0 * rng.next_double() - 1.0;
      dot += row.x[j] * result.beta_star[j];
    }
    const double signal = dot + spec.noise * rng.normal();
    if (spec.classification) {
      row.y = signal >= 0.0 ? 1.0 : -1.0;
    } else {
      row.y = std::clamp(signal, -1.0, 1.0);
    }
    result.data.push_back(std::move(row));
  }
  return result;
}

}  // namespace ldp
