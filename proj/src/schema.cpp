#include "ldp/schema.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

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

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw ParseError("trailing characters in " + what + ": '" + s + "'");
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("cannot parse " + what + ": '" + s + "'");
  }
}

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size() || v < 0) throw ParseError("bad " + what + ": '" + s + "'");
    return static_cast<std::uint64_t>(v);
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError("cannot parse " + what + ": '" + s + "'");
  }
}

}  // namespace

AttributeSpec AttributeSpec::make_numeric(std::string name, double raw_min, double raw_max) {
  if (!(raw_min < raw_max)) {
    throw DegenerateParams("numeric attribute '" + name + "' needs raw_min < raw_max");
  }
  AttributeSpec a;
  a.name = std::move(name);
  a.kind = AttrKind::numeric;
  a.raw_min = raw_min;
  a.raw_max = raw_max;
  return a;
}

AttributeSpec AttributeSpec::make_categorical(std::string name, std::uint64_t k) {
  if (k == 0) throw DegenerateParams("categorical attribute '" + name + "' needs k >= 1");
  AttributeSpec a;
  a.name = std::move(name);
  a.kind = AttrKind::categorical;
  a.k = k;
  return a;
}

Schema::Schema(std::vector<AttributeSpec> attrs) : attrs_(std::move(attrs)) {
  for (std::size_t i = 0; i < attrs_.size(); ++i) {
    for (std::size_t j = i + 1; j < attrs_.size(); ++j) {
      if (attrs_[i].name == attrs_[j].name) {
        throw ParseError("duplicate attribute name '" + attrs_[i].name + "'");
      }
    }
  }
}

const AttributeSpec& Schema::at(std::size_t i) const {
  if (i >= attrs_.size()) throw LengthMismatch("attribute index out of range");
  return attrs_[i];
}

std::size_t Schema::numeric_count() const {
  std::size_t n = 0;
  for (const auto& a : attrs_) n += (a.kind == AttrKind::numeric);
  return n;
}

std::size_t Schema::categorical_count() const { return attrs_.size() - numeric_count(); }

std::vector<std::size_t> Schema::numeric_indices() const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < attrs_.size(); ++i) {
    if (attrs_[i].kind == AttrKind::numeric) idx.push_back(i);
  }
  return idx;
}

std::vector<std::size_t> Schema::categorical_indices() const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < attrs_.size(); ++i) {
    if (attrs_[i].kind == AttrKind::categorical) idx.push_back(i);
  }
  return idx;
}

Schema Schema::parse(std::istream& in) {
  std::vector<AttributeSpec> attrs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto fields = split_csv(t);
    if (fields.size() < 2) throw ParseError("schema line " + std::to_string(lineno) + ": expected name,kind,...");
    const std::string name = trim(fields[0]);
    const std::string kind = trim(fields[1]);
    if (name.empty()) throw ParseError("schema line " + std::to_string(lineno) + ": empty attribute name");
    if (kind == "numeric") {
      if (fields.size() != 4) {
        throw ParseError("schema line " + std::to_string(lineno) + ": numeric needs name,numeric,raw_min,raw_max");
      }
      attrs.push_back(AttributeSpec::make_numeric(name, parse_double(trim(fields[2]), "raw_min"),
                                                  parse_double(trim(fields[3]), "raw_max")));
    } else if (kind == "categorical") {
      if (fields.size() != 3) {
        throw ParseError("schema line " + std::to_string(lineno) + ": categorical needs name,categorical,k");
      }
      attrs.push_back(AttributeSpec::make_categorical(name, parse_u64(trim(fields[2]), "k")));
    } else {
      throw ParseError("schema line " + std::to_string(lineno) + ": unknown kind '" + kind + "'");
    }
  }
  if (attrs.empty()) throw ParseError("schema has no attributes");
  return Schema(std::move(attrs));
}

Schema Schema::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open schema file: " + path);
  return parse(in);
}

std::string Schema::to_text() const {
  std::ostringstream out;
  for (const auto& a : attrs_) {
    if (a.kind == AttrKind::numeric) {
      out << a.name << ",numeric," << a.raw_min << "," << a.raw_max << "\n";
    } else {
      out << a.name << ",categorical," << a.k << "\n";
    }
  }
  return out.str();
}

PrivacyBudget::PrivacyBudget(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw DomainViolation("epsilon must be positive and finite");
  }
}

PrivacyBudget PrivacyBudget::split(std::size_t d) const {
  if (d == 0) throw DegenerateParams("cannot split a budget across zero attributes");
  return PrivacyBudget(epsilon_ / static_cast<double>(d));
}

double normalize_numeric(double raw, double raw_min, double raw_max) {
  if (!(raw_min < raw_max)) throw DegenerateParams("normalize needs raw_min < raw_max");
  if (!std::isfinite(raw)) throw DomainViolation("raw value is not finite");
  if (raw < raw_min || raw > raw_max) {
    throw DomainViolation("raw value " + std::to_string(raw) + " outside [" + std::to_string(raw_min) + "," +
                          std::to_string(raw_max) + "]");
  }
  return 2.0 * (raw - raw_min) / (raw_max - raw_min) - 1.0;
}

double denormalize_numeric(double normalized, double raw_min, double raw_max) {
  if (!(raw_min < raw_max)) throw DegenerateParams("denormalize needs raw_min < raw_max");
  return raw_min + (normalized + 1.0) * 0.5 * (raw_max - raw_min);
}

void validate_tuple(const Schema& schema, const UserTuple& tuple) {
  if (tuple.size() != schema.size()) {
    throw LengthMismatch("tuple has " + std::to_string(tuple.size()) + " values, schema has " +
                         std::to_string(schema.size()));
  }
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    const auto& attr = schema.at(i);
    const double v = tuple[i];
    if (!std::isfinite(v)) throw DomainViolation("attribute '" + attr.name + "' is not finite");
    if (attr.kind == AttrKind::numeric) {
      if (v < -1.0 || v > 1.0) {
        throw DomainViolation("numeric attribute '" + attr.name + "' = " + std::to_string(v) + " outside [-1,1]");
      }
    } else {
      if (v != std::floor(v) || v < 1.0 || v > static_cast<double>(attr.k)) {
        throw DomainViolation("categorical attribute '" + attr.name + "' = " + std::to_string(v) +
                              " not an integer in 1.." + std::to_string(attr.k));
      }
    }
  }
}

}  // namespace ldp
