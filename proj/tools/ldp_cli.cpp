#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>

#include "CLI11.hpp"
#include "json.hpp"

#include "ldp/aggregate.hpp"
#include "ldp/audit.hpp"
#include "ldp/dataset.hpp"
#include "ldp/experiment.hpp"
#include "ldp/reportio.hpp"

namespace {

using nlohmann::json;

std::uint64_t matrix_seed(std::uint64_t seed, std::size_t attr_index) {
  return ldp::cell_hash(seed, 0x5eed, attr_index);
}

ldp::FrequencyMatrix choose_matrix(const std::string& variant, std::uint64_t k, std::uint64_t n, double epsilon,
                                   double beta, std::uint64_t seed) {
  std::string choice = variant;
  if (choice == "auto") {
    choice = static_cast<double>(k) <= std::sqrt(static_cast<double>(n)) ? "orthogonal" : "random_projection";
  }
  if (choice == "orthogonal") return ldp::FrequencyMatrix::orthogonal(k);
  const ldp::BSParams params = ldp::bs_params(k, n, epsilon, beta);
  return ldp::FrequencyMatrix::random_projection(params.m, k, seed);
}

std::unique_ptr<std::ofstream> open_output(const std::string& path, std::ostream*& out) {
  if (path.empty() || path == "-") {
    out = &std::cout;
    return nullptr;
  }
  auto file = std::make_unique<std::ofstream>(path);
  if (!*file) throw ldp::ParseError("cannot open output file: " + path);
  out = file.get();
  return file;
}

int run_perturb(const std::string& dataset_path, const std::string& schema_path, const std::string& method,
                double epsilon, std::uint64_t seed, const std::string& output, const std::string& freq_variant,
                double beta) {
  const ldp::Dataset ds = ldp::load_dataset(dataset_path, schema_path);
  const ldp::PrivacyBudget budget(epsilon);
  const std::uint64_t n = ds.tuples.size();
  const std::size_t d = ds.schema.size();
  ldp::RandomSource rng(seed);

  ldp::ReportFile file;
  file.method = method;
  file.epsilon = epsilon;
  file.seed = seed;
  file.n = n;
  file.schema = ds.schema;

  ldp::MatrixMap matrices;
  auto build_matrices = [&](double eps_per_attr) {
    for (const std::size_t idx : ds.schema.categorical_indices()) {
      ldp::FrequencyMatrix m =
          choose_matrix(freq_variant, ds.schema.at(idx).k, n, eps_per_attr, beta, matrix_seed(seed, idx));
      file.matrices.emplace(idx, ldp::describe_matrix(m));
      matrices.emplace(idx, std::move(m));
    }
  };

  if (method == "laplace" || method == "duchi_original" || method == "duchi_fixed" || method == "onebit") {
    ldp::require_all_numeric(ds.schema);
    std::uint64_t user_id = 1;
    for (const auto& tuple : ds.tuples) {
      ldp::ReportRow row;
      row.user_id = user_id++;
      if (method == "onebit") {
        row = ldp::row_from_numeric(row.user_id, ldp::onebit_perturb(ds.schema, tuple, budget, rng));
      } else {
        row.attr_index = ldp::kBlockIndex;
        row.tag = 'D';
        if (method == "laplace") {
          row.dense = ldp::laplace_perturb(ds.schema, tuple, budget, rng);
        } else {
          const auto variant = method == "duchi_fixed" ? ldp::DuchiVariant::fixed : ldp::DuchiVariant::original;
          row.dense = ldp::duchi_perturb(ds.schema, tuple, budget, variant, rng);
        }
      }
      file.rows.push_back(std::move(row));
    }
  } else if (method == "bs") {
    if (d != 1 || ds.schema.at(0).kind != ldp::AttrKind::categorical) {
      throw ldp::KindMismatch("method bs expects a schema with exactly one categorical attribute");
    }
    build_matrices(epsilon);
    const auto& matrix = matrices.at(0);
    std::uint64_t user_id = 1;
    for (const auto& tuple : ds.tuples) {
      const auto value = static_cast<std::uint64_t>(tuple[0]);
      file.rows.push_back(ldp::row_from_categorical(user_id++, ldp::bs_perturb(value, matrix, budget, rng)));
    }
  } else if (method == "multi") {
    build_matrices(epsilon);
    std::uint64_t user_id = 1;
    for (const auto& tuple : ds.tuples) {
      file.rows.push_back(ldp::row_from_multi(user_id++, ldp::multi_perturb(tuple, ds.schema, budget, matrices, rng)));
    }
  } else if (method == "hybrid") {
    build_matrices(epsilon / static_cast<double>(d));
    std::uint64_t user_id = 1;
    for (const auto& tuple : ds.tuples) {
      const ldp::HybridReport report = ldp::hybrid_perturb(tuple, ds.schema, budget, matrices, rng);
      if (!report.numeric_block.empty()) {
        ldp::ReportRow row;
        row.user_id = user_id;
        row.attr_index = ldp::kBlockIndex;
        row.tag = 'D';
        row.dense = report.numeric_block;
        file.rows.push_back(std::move(row));
      }
      for (const auto& cell : report.cells) {
        file.rows.push_back(ldp::row_from_categorical(user_id, cell));
      }
      ++user_id;
    }
  } else {
    throw ldp::ParseError("unknown method '" + method + "'");
  }

  std::ostream* out = nullptr;
  auto holder = open_output(output, out);
  ldp::write_report_file(*out, file);
  return 0;
}

void print_numeric_estimate(std::ostream& out, const ldp::AttributeSpec& attr, double mean, double deviation_bound,
                            bool with_bound) {
  json j;
  j["attr"] = attr.name;
  j["kind"] = "numeric";
  j["mean"] = mean;
  j["raw_mean"] = ldp::denormalize_numeric(std::clamp(mean, -1.0, 1.0), attr.raw_min, attr.raw_max);
  if (with_bound) j["deviation_bound"] = deviation_bound;
  out << j.dump() << "\n";
}

void print_freq_estimate(std::ostream& out, const ldp::AttributeSpec& attr, const std::vector<double>& freqs) {
  json j;
  j["attr"] = attr.name;
  j["kind"] = "categorical";
  j["freqs"] = freqs;
  out << j.dump() << "\n";
}

int run_aggregate(const std::string& report_path, const std::string& output, bool clip, double beta, double c) {
  const ldp::ReportFile file = ldp::read_report_file(report_path);
  const ldp::Schema& schema = file.schema;
  const std::size_t d = schema.size();
  std::ostream* out = nullptr;
  auto holder = open_output(output, out);

  auto freq_postprocess = [&](std::vector<double> freqs) {
    return clip ? ldp::clip_frequencies(freqs) : freqs;
  };

  if (file.method == "onebit") {
    ldp::require_all_numeric(schema);
    ldp::MeanAccumulator acc(d);
    for (const auto& row : file.rows) acc.add_report(ldp::numeric_from_row(row, file.epsilon, d));
    const ldp::MeanSummary summary = ldp::finalize_means(acc, file.epsilon, beta, c);
    for (std::size_t i = 0; i < d; ++i) {
      print_numeric_estimate(*out, schema.at(i), summary.estimates[i], summary.deviation_bound, true);
    }
  } else if (file.method == "laplace" || file.method == "duchi_original" || file.method == "duchi_fixed") {
    ldp::require_all_numeric(schema);
    ldp::MeanAccumulator acc(d);
    for (const auto& row : file.rows) {
      if (row.tag != 'D') throw ldp::ParseError("dense-method report contains a non-dense row");
      acc.add_decoded(row.dense);
    }
    if (acc.count() == 0) throw ldp::EmptyInput("report file has no rows");
    for (std::size_t i = 0; i < d; ++i) {
      print_numeric_estimate(*out, schema.at(i), acc.sums()[i] / static_cast<double>(acc.count()), 0.0, false);
    }
  } else if (file.method == "bs") {
    if (d != 1 || schema.at(0).kind != ldp::AttrKind::categorical) {
      throw ldp::KindMismatch("method bs expects a schema with exactly one categorical attribute");
    }
    const ldp::FrequencyMatrix matrix = ldp::rebuild_matrix(file.matrices.at(0));
    ldp::FreqAccumulator acc(matrix.rows());
    for (const auto& row : file.rows) acc.add(ldp::categorical_from_row(row));
    print_freq_estimate(*out, schema.at(0), freq_postprocess(acc.finalize(matrix, file.n)));
  } else if (file.method == "multi") {
    ldp::MatrixMap matrices;
    for (const auto& [idx, desc] : file.matrices) matrices.emplace(idx, ldp::rebuild_matrix(desc));
    std::vector<ldp::MultiReport> reports;
    reports.reserve(file.rows.size());
    for (const auto& row : file.rows) reports.push_back(ldp::multi_from_row(row, file.epsilon, d));
    const ldp::AttributeEstimates est = ldp::estimate_from_multi(reports, schema, matrices);
    for (std::size_t i = 0; i < d; ++i) {
      if (schema.at(i).kind == ldp::AttrKind::numeric) {
        print_numeric_estimate(*out, schema.at(i), est.numeric_means.at(i), 0.0, false);
      } else {
        print_freq_estimate(*out, schema.at(i), freq_postprocess(est.categorical_freqs.at(i)));
      }
    }
  } else if (file.method == "hybrid") {
    ldp::MatrixMap matrices;
    for (const auto& [idx, desc] : file.matrices) matrices.emplace(idx, ldp::rebuild_matrix(desc));
    std::map<std::uint64_t, ldp::HybridReport> by_user;
    for (const auto& row : file.rows) {
      auto& report = by_user[row.user_id];
      if (row.tag == 'D') {
        report.numeric_block = row.dense;
      } else {
        report.cells.push_back(ldp::categorical_from_row(row));
      }
    }
    std::vector<ldp::HybridReport> reports;
    reports.reserve(by_user.size());
    for (auto& [user, report] : by_user) reports.push_back(std::move(report));
    const ldp::AttributeEstimates est = ldp::estimate_from_hybrid(reports, schema, matrices);
    for (std::size_t i = 0; i < d; ++i) {
      if (schema.at(i).kind == ldp::AttrKind::numeric) {
        print_numeric_estimate(*out, schema.at(i), est.numeric_means.at(i), 0.0, false);
      } else {
        print_freq_estimate(*out, schema.at(i), freq_postprocess(est.categorical_freqs.at(i)));
      }
    }
  } else {
    throw ldp::ParseError("cannot aggregate method '" + file.method + "'");
  }
  return 0;
}

int run_train(const std::string& dataset_path, const std::string& schema_path, const std::string& label,
              const std::string& loss, const std::string& mode, double epsilon, double lambda, std::uint64_t r,
              std::uint64_t g, std::uint64_t seed, std::uint64_t max_users, double stop_delta,
              const std::string& output) {
  const ldp::Dataset ds = ldp::load_dataset(dataset_path, schema_path);
  std::size_t label_index = ds.schema.size();
  if (label.empty()) {
    for (std::size_t i = ds.schema.size(); i-- > 0;) {
      if (ds.schema.at(i).kind == ldp::AttrKind::numeric) {
        label_index = i;
        break;
      }
    }
    if (label_index == ds.schema.size()) throw ldp::KindMismatch("no numeric attribute available as the label");
  } else {
    for (std::size_t i = 0; i < ds.schema.size(); ++i) {
      if (ds.schema.at(i).name == label) label_index = i;
    }
    if (label_index == ds.schema.size()) throw ldp::ParseError("label attribute '" + label + "' is not in the schema");
    if (ds.schema.at(label_index).kind != ldp::AttrKind::numeric) {
      throw ldp::KindMismatch("label attribute '" + label + "' must be numeric");
    }
  }

  std::vector<ldp::AttributeSpec> feature_attrs;
  for (std::size_t i = 0; i < ds.schema.size(); ++i) {
    if (i != label_index) feature_attrs.push_back(ds.schema.at(i));
  }
  if (feature_attrs.empty()) throw ldp::DegenerateParams("no feature attributes besides the label");
  const ldp::Schema feature_schema(std::move(feature_attrs));

  std::vector<ldp::UserTuple> feature_tuples;
  std::vector<double> labels;
  for (const auto& tuple : ds.tuples) {
    std::vector<double> features;
    for (std::size_t i = 0; i < tuple.size(); ++i) {
      if (i != label_index) features.push_back(tuple[i]);
    }
    feature_tuples.emplace_back(std::move(features));
    labels.push_back(tuple[label_index]);
  }
  ldp::OneHotResult encoded = ldp::onehot_transform(feature_tuples, feature_schema);

  ldp::TrainConfig config;
  config.loss = ldp::loss_from_name(loss);
  config.mode = ldp::mode_from_name(mode);
  config.lambda = lambda;
  config.r = r;
  config.epsilon = epsilon;
  config.max_users = max_users;
  config.stop_delta = stop_delta;
  config.reduction_seed = ldp::cell_hash(seed, 0xda7a, 0);

  if (config.loss != ldp::LossKind::linear) labels = ldp::binarize_label(labels);

  std::vector<ldp::LabeledTuple> data;
  data.reserve(encoded.tuples.size());
  for (std::size_t i = 0; i < encoded.tuples.size(); ++i) {
    data.push_back(ldp::LabeledTuple{std::move(encoded.tuples[i].values), labels[i]});
  }

  const std::size_t dim = encoded.schema.size();
  if (g == 0) {
    if (config.mode == ldp::TrainMode::mgd) {
      config.g = ldp::batch_size_rule(dim, epsilon, data.size());
    } else if (config.mode == ldp::TrainMode::mgd_dr) {
      config.g = ldp::batch_size_rule(config.r, epsilon, data.size());
    } else {
      config.g = 1;
    }
  } else {
    config.g = g;
  }

  ldp::RandomSource rng(seed);
  const ldp::TrainResult result = ldp::mgd_train(data, config, rng);

  std::ostream* out = nullptr;
  auto holder = open_output(output, out);
  *out << ldp::serialize_model(config, result, seed);

  json stats;
  stats["users_consumed"] = result.stats.users_consumed;
  stats["updates_applied"] = result.stats.updates_applied;
  stats["perturbations"] = result.stats.perturbations;
  stats["stopped_early"] = result.stats.stopped_early;
  stats["g"] = config.g;
  stats["dim"] = dim;
  stats["train_metric"] = ldp::evaluate(result.params, result.reduction, data, config.loss);
  std::cerr << stats.dump() << "\n";
  return 0;
}

int run_audit(const std::string& mechanism, double epsilon, std::uint64_t d, std::uint64_t k, std::uint64_t m,
              std::uint64_t seed, const std::string& schema_path, const std::string& output) {
  ldp::AuditMechanism mech = ldp::AuditMechanism::rr_binary();
  std::vector<ldp::UserTuple> grid;

  if (mechanism == "onebit") {
    mech = ldp::AuditMechanism::onebit(d);
    grid = ldp::lattice_inputs(d);
  } else if (mechanism == "duchi_original" || mechanism == "duchi_fixed") {
    mech = ldp::AuditMechanism::duchi(
        d, mechanism == "duchi_fixed" ? ldp::DuchiVariant::fixed : ldp::DuchiVariant::original);
    grid = ldp::lattice_inputs(d);
  } else if (mechanism == "rr") {
    mech = ldp::AuditMechanism::rr_binary();
    grid = {ldp::UserTuple({-1.0}), ldp::UserTuple({1.0})};
  } else if (mechanism == "bs") {
    ldp::FrequencyMatrix matrix = m == 0 ? ldp::FrequencyMatrix::orthogonal(k)
                                         : ldp::FrequencyMatrix::random_projection(m, k, seed);
    mech = ldp::AuditMechanism::frequency_oracle(std::move(matrix));
    grid = ldp::categorical_inputs(k);
  } else if (mechanism == "multi") {
    if (schema_path.empty()) throw ldp::ParseError("audit multi needs --schema");
    ldp::Schema schema = ldp::Schema::load(schema_path);
    ldp::MatrixMap matrices;
    for (const std::size_t idx : schema.categorical_indices()) {
      if (m == 0) {
        matrices.emplace(idx, ldp::FrequencyMatrix::orthogonal(schema.at(idx).k));
      } else {
        matrices.emplace(idx, ldp::FrequencyMatrix::random_projection(m, schema.at(idx).k, ldp::cell_hash(seed, 0x5eed, idx)));
      }
    }
    grid = ldp::mixed_grid(schema, {-1.0, -0.5, 0.0, 0.5, 1.0});
    mech = ldp::AuditMechanism::multi(std::move(schema), std::move(matrices));
  } else {
    throw ldp::ParseError("unknown mechanism '" + mechanism + "'");
  }

  const ldp::RatioReport report = ldp::max_ldp_ratio(mech, grid, epsilon);
  const double bound = std::exp(epsilon);
  const bool pass = report.ratio <= bound + 1e-9;

  json j;
  j["mechanism"] = mechanism;
  j["epsilon"] = epsilon;
  if (mechanism == "onebit" || mechanism == "duchi_original" || mechanism == "duchi_fixed") j["d"] = d;
  if (mechanism == "bs") j["k"] = k;
  j["max_ratio"] = std::isfinite(report.ratio) ? json(report.ratio) : json("inf");
  j["bound"] = bound;
  j["witness_a"] = report.witness_a.values;
  j["witness_b"] = report.witness_b.values;
  j["witness_output"] = report.witness_output;
  j["pass"] = pass;

  std::ostream* out = nullptr;
  auto holder = open_output(output, out);
  *out << j.dump() << "\n";
  return pass ? 0 : 1;
}

int run_experiment_cmd(const std::string& config_path, const std::string& output_override) {
  ldp::ExperimentConfig config = ldp::load_experiment_config(config_path);
  const std::string output = output_override.empty() ? config.output : output_override;
  std::ostream* out = nullptr;
  auto holder = open_output(output, out);
  ldp::run_experiment(config, *out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local-differential-privacy toolkit: perturbation, estimation, training, auditing, experiments"};
  app.require_subcommand(1);

  std::string dataset_path, schema_path, method = "multi", output, freq_variant = "auto";
  double epsilon = 1.0, beta = 0.05;
  std::uint64_t seed = 1;

  auto* perturb = app.add_subcommand("perturb", "Perturb a dataset into a report file");
  perturb->add_option("--dataset", dataset_path, "CSV dataset path")->required();
  perturb->add_option("--schema", schema_path, "Schema path")->required();
  perturb->add_option("--method", method,
                      "laplace | duchi_original | duchi_fixed | onebit | bs | multi | hybrid");
  perturb->add_option("--epsilon", epsilon, "Privacy budget")->required();
  perturb->add_option("--seed", seed, "Random seed");
  perturb->add_option("--output,-o", output, "Report file path (default stdout)");
  perturb->add_option("--freq-variant", freq_variant, "auto | orthogonal | random_projection");
  perturb->add_option("--beta", beta, "Failure probability for the projection size rule");

  std::string report_path;
  bool clip = false;
  double dev_c = 2.0;
  auto* aggregate = app.add_subcommand("aggregate", "Estimate means/frequencies from a report file");
  aggregate->add_option("--report", report_path, "Report file path")->required();
  aggregate->add_option("--output,-o", output, "Estimates path (default stdout)");
  aggregate->add_flag("--clip", clip, "Clamp frequency estimates to [0,1] and renormalize");
  aggregate->add_option("--beta", beta, "Failure probability for the deviation bound");
  aggregate->add_option("--c", dev_c, "Deviation bound constant");

  std::string label, loss = "linear", mode = "mgd";
  double lambda = 1e-4, stop_delta = 1e-6;
  std::uint64_t r = 20, g = 0, max_users = 0;
  auto* train = app.add_subcommand("train", "Fit a model with perturbed gradients");
  train->add_option("--dataset", dataset_path, "CSV dataset path")->required();
  train->add_option("--schema", schema_path, "Schema path")->required();
  train->add_option("--label", label, "Label attribute (default: last numeric attribute)");
  train->add_option("--loss", loss, "linear | logistic | hinge");
  train->add_option("--mode", mode, "private_sgd | mgd | mgd_dr | nonprivate_sgd");
  train->add_option("--epsilon", epsilon, "Privacy budget")->required();
  train->add_option("--lambda", lambda, "L2 regularization factor");
  train->add_option("--r", r, "Reduced dimension");
  train->add_option("--g", g, "Mini-batch size (0: the max{2 dim ln dim / eps^2, n/1000} rule)");
  train->add_option("--seed", seed, "Random seed");
  train->add_option("--max-users", max_users, "Cap on users consumed (0: all)");
  train->add_option("--stop-delta", stop_delta, "Early-stop threshold on the applied update");
  train->add_option("--output,-o", output, "Model file path (default stdout)");

  std::string mechanism = "onebit";
  std::uint64_t audit_d = 1, audit_k = 2, audit_m = 0;
  auto* audit = app.add_subcommand("audit", "Exact privacy-ratio verdict for a mechanism");
  audit->add_option("--mechanism", mechanism, "onebit | duchi_original | duchi_fixed | rr | bs | multi")->required();
  audit->add_option("--epsilon", epsilon, "Privacy budget")->required();
  audit->add_option("--d", audit_d, "Attribute count (onebit, duchi)");
  audit->add_option("--k", audit_k, "Category count (bs)");
  audit->add_option("--m", audit_m, "Projection rows; 0 selects the orthogonal variant (bs, multi)");
  audit->add_option("--seed", seed, "Projection seed");
  audit->add_option("--schema", schema_path, "Schema path (multi)");
  audit->add_option("--output,-o", output, "Verdict path (default stdout)");

  std::string config_path;
  auto* experiment = app.add_subcommand("experiment", "Run a configured sweep, emitting metrics lines");
  experiment->add_option("--config", config_path, "key=value config path")->required();
  experiment->add_option("--output,-o", output, "Metrics path (overrides the config's output=)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (perturb->parsed()) {
      return run_perturb(dataset_path, schema_path, method, epsilon, seed, output, freq_variant, beta);
    }
    if (aggregate->parsed()) {
      return run_aggregate(report_path, output, clip, beta, dev_c);
    }
    if (train->parsed()) {
      return run_train(dataset_path, schema_path, label, loss, mode, epsilon, lambda, r, g, seed, max_users,
                       stop_delta, output);
    }
    if (audit->parsed()) {
      return run_audit(mechanism, epsilon, audit_d, audit_k, audit_m, seed, schema_path, output);
    }
    if (experiment->parsed()) {
      return run_experiment_cmd(config_path, output);
    }
  } catch (const ldp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
