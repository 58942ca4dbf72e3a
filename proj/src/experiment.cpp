#include "ldp/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "ldp/aggregate.hpp"
#include "ldp/reportio.hpp"

namespace ldp {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(s);
  while (std::getline(ss, field, ',')) {
    const std::string t = trim(field);
    if (!t.empty()) out.push_back(t);
  }
  return out;
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

bool parse_bool(const std::string& s, const std::string& what) {
  if (s == "on" || s == "true" || s == "1") return true;
  if (s == "off" || s == "false" || s == "0") return false;
  throw ParseError("cannot parse " + what + ": '" + s + "' (expected on/off)");
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
  std::uint64_t s = mix64(base + 0x6a09e667f3bcc909ULL);
  s = mix64(s ^ mix64(a + 1));
  s = mix64(s ^ mix64(b + 1));
  s = mix64(s ^ mix64(c + 1));
  s = mix64(s ^ mix64(d + 1));
  return s;
}

struct Population {
  Schema schema;
  std::vector<UserTuple> tuples;
};

Population load_population(const ExperimentConfig& config) {
  const bool have_dataset = !config.dataset_path.empty() || !config.schema_path.empty();
  const bool have_synth = !config.synth.empty();
  if (have_dataset && have_synth) throw ParseError("config declares both a dataset and a synthetic population");
  if (have_dataset) {
    if (config.dataset_path.empty() || config.schema_path.empty()) {
      throw ParseError("dataset mode needs both dataset= and schema=");
    }
    Dataset ds = load_dataset(config.dataset_path, config.schema_path);
    return Population{std::move(ds.schema), std::move(ds.tuples)};
  }
  if (!have_synth) throw ParseError("config declares neither a dataset nor a synthetic population");
  if (config.n == 0) throw ParseError("synthetic population needs n= > 0");
  SynthResult synth = synth_generate(parse_synth_spec(config.synth), config.n, config.seed);
  return Population{std::move(synth.schema), std::move(synth.tuples)};
}

FrequencyMatrix build_matrix(const ExperimentConfig& config, std::uint64_t k, std::uint64_t n, double epsilon,
                             std::uint64_t seed) {
  FreqVariantChoice choice = config.freq_variant;
  if (choice == FreqVariantChoice::automatic) {
    choice = static_cast<double>(k) <= std::sqrt(static_cast<double>(n)) ? FreqVariantChoice::orthogonal
                                                                         : FreqVariantChoice::random_projection;
  }
  if (choice == FreqVariantChoice::orthogonal) return FrequencyMatrix::orthogonal(k);
  const BSParams params = bs_params(k, n, epsilon, config.beta);
  return FrequencyMatrix::random_projection(params.m, k, seed);
}

struct Emitter {
  std::ostream& out;
  void operator()(const MetricsRecord& record) {
    out << to_json_line(record) << "\n";
    out.flush();
  }
};

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void run_means_freqs(const ExperimentConfig& config, Emitter& emit) {
  std::vector<std::string> methods = config.methods;
  if (methods.empty()) methods = {"ours", "hybrid"};
  for (auto& m : methods) {
    if (m == "multi") m = "ours";
    if (m != "ours" && m != "hybrid") {
      throw ParseError("unknown method '" + m + "' for means_freqs (expected ours or hybrid)");
    }
  }

  const Population pop = load_population(config);
  const AttributeEstimates truth = empirical_truth(pop.schema, pop.tuples);
  const std::uint64_t n = pop.tuples.size();
  const std::size_t d = pop.schema.size();
  const auto cat_indices = pop.schema.categorical_indices();
  const auto num_indices = pop.schema.numeric_indices();

  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    const std::string& method = methods[mi];
    for (std::size_t ei = 0; ei < config.epsilons.size(); ++ei) {
      const double epsilon = config.epsilons[ei];
      const PrivacyBudget budget(epsilon);
      // The frequency oracle inside the budget-splitting baseline runs at
      // a 1/d share, which changes its projection size.
      const double cat_epsilon = method == "hybrid" ? epsilon / static_cast<double>(d) : epsilon;

      for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
        const auto start = std::chrono::steady_clock::now();
        MatrixMap matrices;
        for (const std::size_t idx : cat_indices) {
          matrices.emplace(idx, build_matrix(config, pop.schema.at(idx).k, n, cat_epsilon,
                                             derive_seed(config.seed, mi, ei, rep, idx)));
        }
        RandomSource rng(derive_seed(config.seed, mi, ei, rep, 0xfeed));

        AttributeEstimates estimates;
        if (method == "ours") {
          std::vector<MultiReport> reports;
          reports.reserve(pop.tuples.size());
          for (const auto& tuple : pop.tuples) {
            reports.push_back(multi_perturb(tuple, pop.schema, budget, matrices, rng));
          }
          estimates = estimate_from_multi(reports, pop.schema, matrices);
        } else {
          std::vector<HybridReport> reports;
          reports.reserve(pop.tuples.size());
          for (const auto& tuple : pop.tuples) {
            reports.push_back(hybrid_perturb(tuple, pop.schema, budget, matrices, rng));
          }
          estimates = estimate_from_hybrid(reports, pop.schema, matrices);
        }

        const double wall = config.timing ? elapsed_seconds(start) : 0.0;
        if (!num_indices.empty()) {
          double err = 0.0;
          for (const std::size_t idx : num_indices) {
            err = std::max(err, std::abs(estimates.numeric_means.at(idx) - truth.numeric_means.at(idx)));
          }
          emit(MetricsRecord{method, "means_freqs", epsilon, rep, "linf_means", err, wall});
        }
        if (!cat_indices.empty()) {
          double err = 0.0;
          for (const std::size_t idx : cat_indices) {
            std::vector<double> est = estimates.categorical_freqs.at(idx);
            if (config.clip) est = clip_frequencies(est);
            err = std::max(err, linf_error(est, truth.categorical_freqs.at(idx)));
          }
          emit(MetricsRecord{method, "means_freqs", epsilon, rep, "linf_freqs", err, wall});
        }
      }
    }
  }
}

struct ErmPopulation {
  std::vector<LabeledTuple> data;   // labels raw (regression targets) or +/-1
  bool labels_need_binarize = false;  // classification on a real-valued label
};

ErmPopulation load_erm_population(const ExperimentConfig& config) {
  const bool have_dataset = !config.dataset_path.empty() || !config.schema_path.empty();
  ErmPopulation pop;
  if (have_dataset) {
    if (config.dataset_path.empty() || config.schema_path.empty()) {
      throw ParseError("dataset mode needs both dataset= and schema=");
    }
    Dataset ds = load_dataset(config.dataset_path, config.schema_path);

    std::size_t label_index = ds.schema.size();
    if (config.label.empty()) {
      // Default: the last numeric attribute.
      for (std::size_t i = ds.schema.size(); i-- > 0;) {
        if (ds.schema.at(i).kind == AttrKind::numeric) {
          label_index = i;
          break;
        }
      }
      if (label_index == ds.schema.size()) throw KindMismatch("no numeric attribute available as the label");
    } else {
      for (std::size_t i = 0; i < ds.schema.size(); ++i) {
        if (ds.schema.at(i).name == config.label) {
          label_index = i;
          break;
        }
      }
      if (label_index == ds.schema.size()) throw ParseError("label attribute '" + config.label + "' is not in the schema");
      if (ds.schema.at(label_index).kind != AttrKind::numeric) {
        throw KindMismatch("label attribute '" + config.label + "' must be numeric");
      }
    }

    std::vector<AttributeSpec> feature_attrs;
    for (std::size_t i = 0; i < ds.schema.size(); ++i) {
      if (i != label_index) feature_attrs.push_back(ds.schema.at(i));
    }
    if (feature_attrs.empty()) throw DegenerateParams("no feature attributes besides the label");
    const Schema feature_schema(std::move(feature_attrs));

    std::vector<UserTuple> feature_tuples;
    std::vector<double> labels;
    feature_tuples.reserve(ds.tuples.size());
    labels.reserve(ds.tuples.size());
    for (const auto& tuple : ds.tuples) {
      std::vector<double> features;
      features.reserve(tuple.size() - 1);
      for (std::size_t i = 0; i < tuple.size(); ++i) {
        if (i != label_index) features.push_back(tuple[i]);
      }
      feature_tuples.emplace_back(std::move(features));
      labels.push_back(tuple[label_index]);
    }

    OneHotResult encoded = onehot_transform(feature_tuples, feature_schema);
    pop.data.reserve(encoded.tuples.size());
    for (std::size_t i = 0; i < encoded.tuples.size(); ++i) {
      pop.data.push_back(LabeledTuple{std::move(encoded.tuples[i].values), labels[i]});
    }
    pop.labels_need_binarize = config.loss != LossKind::linear;
    return pop;
  }

  if (config.n == 0) throw ParseError("planted-model population needs n= > 0");
  ErmSynthSpec spec;
  spec.d = config.erm_d;
  spec.beta_norm = config.erm_beta_norm;
  spec.noise = config.erm_noise;
  spec.classification = config.loss != LossKind::linear;
  pop.data = erm_synth_generate(spec, config.n, config.seed).data;
  pop.labels_need_binarize = false;
  return pop;
}

void run_erm(const ExperimentConfig& config, Emitter& emit) {
  std::vector<std::string> methods = config.methods;
  if (methods.empty()) {
    methods = {"nonprivate_sgd", "private_sgd", "mgd"};
    if (config.loss == LossKind::linear) methods.push_back("mgd_dr");
  }
  std::vector<TrainMode> modes;
  for (const auto& m : methods) {
    const TrainMode mode = mode_from_name(m);
    if (mode == TrainMode::mgd_dr && config.loss != LossKind::linear) {
      throw SpecError("dimension reduction is only defined for the linear loss");
    }
    modes.push_back(mode);
  }

  const ErmPopulation pop = load_erm_population(config);
  if (pop.data.size() < config.folds) throw InsufficientData("fewer rows than cross-validation folds");
  const std::size_t dim = pop.data[0].x.size();
  const char* metric_name = config.loss == LossKind::linear ? "mse" : "misclass";

  for (std::size_t mi = 0; mi < modes.size(); ++mi) {
    const TrainMode mode = modes[mi];
    for (std::size_t ei = 0; ei < config.epsilons.size(); ++ei) {
      const double epsilon = config.epsilons[ei];
      for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
        const auto start = std::chrono::steady_clock::now();
        // Fold assignment depends only on (seed, rep) so every mode and
        // epsilon sees the same splits and comparisons are paired.
        RandomSource fold_rng = RandomSource(config.seed).fork(0xf01d).fork(rep);
        const auto fold_of = assign_folds(pop.data.size(), config.folds, fold_rng);

        double metric_sum = 0.0;
        std::vector<double> fold_metrics(config.folds, 0.0);
        for (std::size_t fold = 0; fold < config.folds; ++fold) {
          std::vector<LabeledTuple> train;
          std::vector<LabeledTuple> test;
          for (std::size_t i = 0; i < pop.data.size(); ++i) {
            (fold_of[i] == fold ? test : train).push_back(pop.data[i]);
          }
          if (train.empty() || test.empty()) throw InsufficientData("empty cross-validation fold");

          if (pop.labels_need_binarize) {
            std::vector<double> train_labels;
            train_labels.reserve(train.size());
            for (const auto& row : train) train_labels.push_back(row.y);
            const double threshold = mean_of(train_labels);
            for (auto& row : train) row.y = row.y >= threshold ? 1.0 : -1.0;
            for (auto& row : test) row.y = row.y >= threshold ? 1.0 : -1.0;
          }

          TrainConfig tc;
          tc.loss = config.loss;
          tc.mode = mode;
          tc.lambda = config.lambda;
          tc.r = config.r;
          tc.epsilon = epsilon;
          tc.stop_delta = config.stop_delta;
          tc.reduction_seed = derive_seed(config.seed, 0xd1, ei, rep, fold);
          if (mode == TrainMode::mgd) {
            tc.g = batch_size_rule(dim, epsilon, train.size());
          } else if (mode == TrainMode::mgd_dr) {
            tc.g = batch_size_rule(config.r, epsilon, train.size());
          } else {
            tc.g = 1;
          }

          RandomSource rng(derive_seed(config.seed, mi + 0x100, ei, rep, fold));
          const TrainResult result = mgd_train(train, tc, rng);
          const double metric = evaluate(result.params, result.reduction, test, config.loss);
          fold_metrics[fold] = metric;
          metric_sum += metric;
        }

        const double wall = config.timing ? elapsed_seconds(start) : 0.0;
        const std::string method = mode_name(mode);
        for (std::size_t fold = 0; fold < config.folds; ++fold) {
          emit(MetricsRecord{method, "erm", epsilon, rep, std::string(metric_name) + ".fold" + std::to_string(fold),
                             fold_metrics[fold], wall});
        }
        emit(MetricsRecord{method, "erm", epsilon, rep, std::string(metric_name) + ".mean",
                           metric_sum / static_cast<double>(config.folds), wall});
      }
    }
  }
}

}  // namespace

ExperimentConfig parse_experiment_config(std::istream& in) {
  ExperimentConfig config;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key == "task") {
      if (value == "means_freqs") {
        config.task = TaskKind::means_freqs;
      } else if (value == "erm") {
        config.task = TaskKind::erm;
      } else {
        throw ParseError("config line " + std::to_string(lineno) + ": unknown task '" + value + "'");
      }
    } else if (key == "methods") {
      config.methods = split_list(value);
    } else if (key == "epsilons") {
      config.epsilons.clear();
      for (const auto& e : split_list(value)) config.epsilons.push_back(parse_double(e, "epsilon"));
    } else if (key == "repetitions") {
      config.repetitions = parse_u64(value, "repetitions");
    } else if (key == "seed") {
      config.seed = parse_u64(value, "seed");
    } else if (key == "output") {
      config.output = value;
    } else if (key == "timing") {
      config.timing = parse_bool(value, "timing");
    } else if (key == "dataset") {
      config.dataset_path = value;
    } else if (key == "schema") {
      config.schema_path = value;
    } else if (key == "synth") {
      config.synth = value;
    } else if (key == "n") {
      config.n = parse_u64(value, "n");
    } else if (key == "beta") {
      config.beta = parse_double(value, "beta");
    } else if (key == "freq_variant") {
      if (value == "auto") {
        config.freq_variant = FreqVariantChoice::automatic;
      } else if (value == "orthogonal") {
        config.freq_variant = FreqVariantChoice::orthogonal;
      } else if (value == "random_projection") {
        config.freq_variant = FreqVariantChoice::random_projection;
      } else {
        throw ParseError("config line " + std::to_string(lineno) + ": unknown freq_variant '" + value + "'");
      }
    } else if (key == "clip") {
      config.clip = parse_bool(value, "clip");
    } else if (key == "loss") {
      config.loss = loss_from_name(value);
    } else if (key == "lambda") {
      config.lambda = parse_double(value, "lambda");
    } else if (key == "r") {
      config.r = parse_u64(value, "r");
    } else if (key == "folds") {
      config.folds = parse_u64(value, "folds");
    } else if (key == "stop_delta") {
      config.stop_delta = parse_double(value, "stop_delta");
    } else if (key == "label") {
      config.label = value;
    } else if (key == "erm_d") {
      config.erm_d = parse_u64(value, "erm_d");
    } else if (key == "erm_beta_norm") {
      config.erm_beta_norm = parse_double(value, "erm_beta_norm");
    } else if (key == "erm_noise") {
      config.erm_noise = parse_double(value, "erm_noise");
    } else {
      throw ParseError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  if (config.repetitions < 1) throw ParseError("repetitions must be >= 1");
  if (config.folds < 2) throw ParseError("folds must be >= 2");
  if (config.epsilons.empty()) throw ParseError("epsilon grid is empty");
  for (const double e : config.epsilons) {
    if (!(e > 0.0) || !std::isfinite(e)) throw ParseError("epsilon grid entries must be positive");
  }
  return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  return parse_experiment_config(in);
}

std::string to_json_line(const MetricsRecord& record) {
  nlohmann::json j;
  j["method"] = record.method;
  j["task"] = record.task;
  j["epsilon"] = record.epsilon;
  j["repetition"] = record.repetition;
  j["metric"] = record.metric;
  j["value"] = record.value;
  j["wall_time_s"] = record.wall_time_s;
  return j.dump();
}

std::size_t batch_size_rule(std::size_t dim, double epsilon, std::size_t n) {
  if (dim == 0) throw DegenerateParams("batch size rule needs dim >= 1");
  if (!(epsilon > 0.0)) throw DomainViolation("batch size rule needs epsilon > 0");
  const double by_dim = 2.0 * static_cast<double>(dim) * std::log(static_cast<double>(dim)) / (epsilon * epsilon);
  const double by_n = static_cast<double>(n) / 1000.0;
  const double g = std::max(std::ceil(std::max(by_dim, by_n)), 1.0);
  return static_cast<std::size_t>(g);
}

std::vector<std::size_t> assign_folds(std::size_t n, std::size_t folds, RandomSource& rng) {
  if (folds == 0) throw DegenerateParams("fold count must be positive");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng.uniform_index(i);
    std::swap(order[i - 1], order[j]);
  }
  std::vector<std::size_t> fold_of(n);
  for (std::size_t pos = 0; pos < n; ++pos) fold_of[order[pos]] = pos % folds;
  return fold_of;
}

AttributeEstimates empirical_truth(const Schema& schema, const std::vector<UserTuple>& tuples) {
  if (tuples.empty()) throw EmptyInput("empirical truth of an empty population");
  AttributeEstimates truth;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (schema.at(i).kind == AttrKind::numeric) {
      truth.numeric_means[i] = 0.0;
    } else {
      truth.categorical_freqs[i] = std::vector<double>(schema.at(i).k, 0.0);
    }
  }
  for (const auto& tuple : tuples) {
    validate_tuple(schema, tuple);
    for (std::size_t i = 0; i < schema.size(); ++i) {
      if (schema.at(i).kind == AttrKind::numeric) {
        truth.numeric_means[i] += tuple[i];
      } else {
        truth.categorical_freqs[i][static_cast<std::size_t>(tuple[i]) - 1] += 1.0;
      }
    }
  }
  const double n = static_cast<double>(tuples.size());
  for (auto& [idx, mean] : truth.numeric_means) mean /= n;
  for (auto& [idx, freqs] : truth.categorical_freqs) {
    for (auto& f : freqs) f /= n;
  }
  return truth;
}

void run_experiment(const ExperimentConfig& config, std::ostream& out) {
  Emitter emit{out};
  if (config.task == TaskKind::means_freqs) {
    run_means_freqs(config, emit);
  } else {
    run_erm(config, emit);
  }
}

}  // namespace ldp
