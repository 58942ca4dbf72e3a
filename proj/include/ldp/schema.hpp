#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ldp/errors.hpp"

namespace ldp {

enum class AttrKind { numeric, categorical };

// One column of a user tuple. Numeric attributes carry the raw interval
// they are rescaled from; categorical ones carry the category count k,
// with values encoded as integers 1..k.
struct AttributeSpec {
  std::string name;
  AttrKind kind = AttrKind::numeric;
  double raw_min = -1.0;
  double raw_max = 1.0;
  std::uint64_t k = 0;

  static AttributeSpec make_numeric(std::string name, double raw_min, double raw_max);
  static AttributeSpec make_categorical(std::string name, std::uint64_t k);
};

class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<AttributeSpec> attrs);

  std::size_t size() const { return attrs_.size(); }
  const AttributeSpec& at(std::size_t i) const;
  const std::vector<AttributeSpec>& attrs() const { return attrs_; }

  std::size_t numeric_count() const;
  std::size_t categorical_count() const;
  std::vector<std::size_t> numeric_indices() const;
  std::vector<std::size_t> categorical_indices() const;

  // Parses the comma-separated schema format:
  //   name,numeric,raw_min,raw_max
  //   name,categorical,k
  // Blank lines and lines starting with '#' are skipped.
  static Schema parse(std::istream& in);
  static Schema load(const std::string& path);

  std::string to_text() const;

 private:
  std::vector<AttributeSpec> attrs_;
};

// A single user's row, already normalized: numeric entries in [-1,1],
// categorical entries integral values in 1..k stored as doubles.
struct UserTuple {
  std::vector<double> values;

  UserTuple() = default;
  explicit UserTuple(std::vector<double> v) : values(std::move(v)) {}
  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

// Privacy budget; positivity is checked once at construction so the
// mechanisms can assume epsilon > 0.
class PrivacyBudget {
 public:
  explicit PrivacyBudget(double epsilon);
  double epsilon() const { return epsilon_; }

  // Even split across d attributes, used by per-attribute baselines.
  PrivacyBudget split(std::size_t d) const;

 private:
  double epsilon_;
};

// Rescales a raw numeric reading onto [-1,1].
double normalize_numeric(double raw, double raw_min, double raw_max);

// Maps a normalized value back to raw units.
double denormalize_numeric(double normalized, double raw_min, double raw_max);

// Checks tuple length and every entry against its attribute's domain.
// Throws LengthMismatch or DomainViolation; returns normally otherwise.
void validate_tuple(const Schema& schema, const UserTuple& tuple);

}  // namespace ldp
