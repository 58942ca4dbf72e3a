#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ldp/erm.hpp"
#include "ldp/schema.hpp"

namespace ldp {

struct Dataset {
  Schema schema;
  std::vector<UserTuple> tuples;
  // Categorical attribute index -> label strings in index order, so value
  // v corresponds to labels[v-1].
  std::map<std::size_t, std::vector<std::string>> labels;
};

// CSV with a header row matching the schema names. Numeric columns are
// normalized from their declared raw range onto [-1,1]; categorical
// labels are assigned indices 1..k in order of first appearance.
Dataset load_dataset(const std::string& csv_path, const std::string& schema_path);
Dataset load_dataset(std::istream& csv, const Schema& schema);

struct OneHotResult {
  Schema schema;  // numeric-only
  std::vector<UserTuple> tuples;
};

// Encodes each categorical attribute with k values as k-1 binary
// attributes in {-1, 1}: value l < k puts +1 at position l, value k puts
// -1 everywhere. Numeric attributes pass through.
OneHotResult onehot_transform(const std::vector<UserTuple>& tuples, const Schema& schema);

double mean_of(const std::vector<double>& values);

// Thresholds at the mean of the supplied values: >= mean maps to +1.
std::vector<double> binarize_label(const std::vector<double>& values);
std::vector<double> binarize_label(const std::vector<double>& values, double threshold);

// Synthetic population spec: whitespace-separated attribute tokens,
//   num:<mean>            numeric attribute with the given mean in (-1,1)
//   cat:<p1>,<p2>,...     categorical attribute with the given frequencies
struct SynthAttribute {
  AttrKind kind = AttrKind::numeric;
  double mean = 0.0;
  std::vector<double> freqs;
};

struct SynthSpec {
  std::vector<SynthAttribute> attrs;
};

SynthSpec parse_synth_spec(const std::string& text);

struct SynthResult {
  Schema schema;
  std::vector<UserTuple> tuples;
  std::vector<double> numeric_means;                       // ground truth per numeric attr index
  std::map<std::size_t, std::vector<double>> cat_freqs;    // ground truth per categorical attr
};

// Draws n tuples i.i.d.: numeric attributes uniform on the widest
// interval inside [-1,1] centered to hit the target mean, categorical
// attributes from their frequency vectors.
SynthResult synth_generate(const SynthSpec& spec, std::size_t n, std::uint64_t seed);

// Planted linear model for training runs: x uniform in [-1,1]^d,
// y = x . beta_star + noise, clamped to [-1,1] for the linear loss and
// taken as the sign for classification losses.
struct ErmSynthSpec {
  std::size_t d = 40;
  double beta_norm = 0.6;  // L2 norm of beta_star, entries +/- beta_norm/sqrt(d)
  double noise = 0.3;
  bool classification = false;
};

struct ErmSynthResult {
  std::vector<LabeledTuple> data;
  std::vector<double> beta_star;
};

ErmSynthResult erm_synth_generate(const ErmSynthSpec& spec, std::size_t n, std::uint64_t seed);

}  // namespace ldp
