#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ldp/audit.hpp"
#include "ldp/dataset.hpp"
#include "ldp/experiment.hpp"
#include "ldp/reportio.hpp"

namespace py = pybind11;

namespace {

ldp::DuchiVariant variant_from_name(const std::string& name) {
  if (name == "original") return ldp::DuchiVariant::original;
  if (name == "fixed") return ldp::DuchiVariant::fixed;
  throw ldp::ParseError("unknown variant '" + name + "' (expected original or fixed)");
}

}  // namespace

PYBIND11_MODULE(_ldp, m) {
  m.doc() = "Local-differential-privacy toolkit: perturbation, estimation, training, auditing";

  py::register_exception<ldp::Error>(m, "LdpError");

  py::enum_<ldp::AttrKind>(m, "AttrKind")
      .value("numeric", ldp::AttrKind::numeric)
      .value("categorical", ldp::AttrKind::categorical);

  py::class_<ldp::AttributeSpec>(m, "AttributeSpec")
      .def_static("numeric", &ldp::AttributeSpec::make_numeric, py::arg("name"), py::arg("raw_min"),
                  py::arg("raw_max"))
      .def_static("categorical", &ldp::AttributeSpec::make_categorical, py::arg("name"), py::arg("k"))
      .def_readonly("name", &ldp::AttributeSpec::name)
      .def_readonly("kind", &ldp::AttributeSpec::kind)
      .def_readonly("raw_min", &ldp::AttributeSpec::raw_min)
      .def_readonly("raw_max", &ldp::AttributeSpec::raw_max)
      .def_readonly("k", &ldp::AttributeSpec::k);

  py::class_<ldp::Schema>(m, "Schema")
      .def(py::init<std::vector<ldp::AttributeSpec>>())
      .def_static("parse",
                  [](const std::string& text) {
                    std::istringstream in(text);
                    return ldp::Schema::parse(in);
                  })
      .def_static("load", &ldp::Schema::load)
      .def("__len__", &ldp::Schema::size)
      .def("at", &ldp::Schema::at, py::return_value_policy::reference_internal)
      .def("numeric_indices", &ldp::Schema::numeric_indices)
      .def("categorical_indices", &ldp::Schema::categorical_indices)
      .def("to_text", &ldp::Schema::to_text);

  py::class_<ldp::UserTuple>(m, "UserTuple")
      .def(py::init<std::vector<double>>(), py::arg("values"))
      .def_readwrite("values", &ldp::UserTuple::values)
      .def("__len__", &ldp::UserTuple::size)
      .def("__getitem__", [](const ldp::UserTuple& t, std::size_t i) {
        if (i >= t.size()) throw py::index_error();
        return t[i];
      });
  py::implicitly_convertible<py::sequence, ldp::UserTuple>();

  py::class_<ldp::RandomSource>(m, "RandomSource")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("next_u64", &ldp::RandomSource::next_u64)
      .def("next_double", &ldp::RandomSource::next_double)
      .def("bernoulli", &ldp::RandomSource::bernoulli)
      .def("uniform_index", &ldp::RandomSource::uniform_index)
      .def("laplace", &ldp::RandomSource::laplace)
      .def("normal", &ldp::RandomSource::normal)
      .def("fork", &ldp::RandomSource::fork)
      .def("position", &ldp::RandomSource::position);

  m.def("normalize_numeric", &ldp::normalize_numeric);
  m.def("denormalize_numeric", &ldp::denormalize_numeric);
  m.def("validate_tuple", &ldp::validate_tuple);
  m.def("rr_scale", &ldp::rr_scale);

  py::class_<ldp::NumericReport>(m, "NumericReport")
      .def_readonly("attr_index", &ldp::NumericReport::attr_index)
      .def_readonly("sign", &ldp::NumericReport::sign)
      .def_readonly("epsilon", &ldp::NumericReport::epsilon)
      .def_readonly("d", &ldp::NumericReport::d);

  m.def(
      "laplace_perturb",
      [](const ldp::UserTuple& t, double eps, ldp::RandomSource& rng) {
        return ldp::laplace_perturb(t, ldp::PrivacyBudget(eps), rng);
      },
      py::arg("tuple"), py::arg("epsilon"), py::arg("rng"));
  m.def(
      "duchi_perturb",
      [](const ldp::UserTuple& t, double eps, const std::string& variant, ldp::RandomSource& rng) {
        return ldp::duchi_perturb(t, ldp::PrivacyBudget(eps), variant_from_name(variant), rng);
      },
      py::arg("tuple"), py::arg("epsilon"), py::arg("variant"), py::arg("rng"));
  m.def(
      "onebit_perturb",
      [](const ldp::UserTuple& t, double eps, ldp::RandomSource& rng) {
        return ldp::onebit_perturb(t, ldp::PrivacyBudget(eps), rng);
      },
      py::arg("tuple"), py::arg("epsilon"), py::arg("rng"));
  m.def("decode_numeric_report", &ldp::decode_numeric_report);

  py::class_<ldp::BSParams>(m, "BSParams")
      .def_readonly("k", &ldp::BSParams::k)
      .def_readonly("n", &ldp::BSParams::n)
      .def_readonly("epsilon", &ldp::BSParams::epsilon)
      .def_readonly("beta", &ldp::BSParams::beta)
      .def_readonly("gamma", &ldp::BSParams::gamma)
      .def_readonly("m", &ldp::BSParams::m);
  m.def("bs_params", &ldp::bs_params, py::arg("k"), py::arg("n"), py::arg("epsilon"), py::arg("beta"));

  py::class_<ldp::FrequencyMatrix>(m, "FrequencyMatrix")
      .def_static("random_projection", &ldp::FrequencyMatrix::random_projection, py::arg("rows"), py::arg("cols"),
                  py::arg("seed"))
      .def_static("orthogonal", &ldp::FrequencyMatrix::orthogonal, py::arg("k"))
      .def_property_readonly("rows", &ldp::FrequencyMatrix::rows)
      .def_property_readonly("cols", &ldp::FrequencyMatrix::cols)
      .def("sign", &ldp::FrequencyMatrix::sign)
      .def("entry", &ldp::FrequencyMatrix::entry)
      .def("column_dot_raw", &ldp::FrequencyMatrix::column_dot_raw)
      .def("column_dot", &ldp::FrequencyMatrix::column_dot);

  py::class_<ldp::CategoricalReport>(m, "CategoricalReport")
      .def_readonly("s", &ldp::CategoricalReport::s)
      .def_readonly("alpha", &ldp::CategoricalReport::alpha)
      .def_readonly("attr_index", &ldp::CategoricalReport::attr_index);

  m.def(
      "rr_binary_perturb",
      [](double value, double eps, ldp::RandomSource& rng) {
        return ldp::rr_binary_perturb(value, ldp::PrivacyBudget(eps), rng);
      },
      py::arg("value"), py::arg("epsilon"), py::arg("rng"));
  m.def(
      "bs_perturb",
      [](std::uint64_t value, const ldp::FrequencyMatrix& matrix, double eps, ldp::RandomSource& rng) {
        return ldp::bs_perturb(value, matrix, ldp::PrivacyBudget(eps), rng);
      },
      py::arg("value"), py::arg("matrix"), py::arg("epsilon"), py::arg("rng"));
  m.def("estimate_frequencies", &ldp::estimate_frequencies, py::arg("reports"), py::arg("matrix"), py::arg("n"));
  m.def("clip_frequencies", &ldp::clip_frequencies);

  py::class_<ldp::MultiReport>(m, "MultiReport")
      .def_readonly("attr_index", &ldp::MultiReport::attr_index)
      .def_readonly("scale", &ldp::MultiReport::scale)
      .def_property_readonly("numeric",
                             [](const ldp::MultiReport& r) -> py::object {
                               if (const auto* p = std::get_if<ldp::NumericReport>(&r.payload)) return py::cast(*p);
                               return py::none();
                             })
      .def_property_readonly("categorical", [](const ldp::MultiReport& r) -> py::object {
        if (const auto* p = std::get_if<ldp::CategoricalReport>(&r.payload)) return py::cast(*p);
        return py::none();
      });

  py::class_<ldp::HybridReport>(m, "HybridReport")
      .def_readonly("numeric_block", &ldp::HybridReport::numeric_block)
      .def_readonly("cells", &ldp::HybridReport::cells);

  py::class_<ldp::AttributeEstimates>(m, "AttributeEstimates")
      .def_readonly("numeric_means", &ldp::AttributeEstimates::numeric_means)
      .def_readonly("categorical_freqs", &ldp::AttributeEstimates::categorical_freqs);

  m.def(
      "multi_perturb",
      [](const ldp::UserTuple& t, const ldp::Schema& schema, double eps, const ldp::MatrixMap& matrices,
         ldp::RandomSource& rng) { return ldp::multi_perturb(t, schema, ldp::PrivacyBudget(eps), matrices, rng); },
      py::arg("tuple"), py::arg("schema"), py::arg("epsilon"), py::arg("matrices"), py::arg("rng"));
  m.def(
      "hybrid_perturb",
      [](const ldp::UserTuple& t, const ldp::Schema& schema, double eps, const ldp::MatrixMap& matrices,
         ldp::RandomSource& rng) { return ldp::hybrid_perturb(t, schema, ldp::PrivacyBudget(eps), matrices, rng); },
      py::arg("tuple"), py::arg("schema"), py::arg("epsilon"), py::arg("matrices"), py::arg("rng"));
  m.def("estimate_from_multi", &ldp::estimate_from_multi, py::arg("reports"), py::arg("schema"), py::arg("matrices"));
  m.def("estimate_from_hybrid", &ldp::estimate_from_hybrid, py::arg("reports"), py::arg("schema"),
        py::arg("matrices"));

  py::class_<ldp::AuditMechanism>(m, "AuditMechanism")
      .def_static("onebit", &ldp::AuditMechanism::onebit, py::arg("d"))
      .def_static("duchi",
                  [](std::size_t d, const std::string& variant) {
                    return ldp::AuditMechanism::duchi(d, variant_from_name(variant));
                  })
      .def_static("rr_binary", &ldp::AuditMechanism::rr_binary)
      .def_static("frequency_oracle", &ldp::AuditMechanism::frequency_oracle, py::arg("matrix"))
      .def_static("multi", &ldp::AuditMechanism::multi, py::arg("schema"), py::arg("matrices"));

  py::class_<ldp::Outcome>(m, "Outcome")
      .def_readonly("label", &ldp::Outcome::label)
      .def_readonly("probability", &ldp::Outcome::probability)
      .def_readonly("decoded", &ldp::Outcome::decoded);

  py::class_<ldp::OutcomeDistribution>(m, "OutcomeDistribution")
      .def_readonly("outcomes", &ldp::OutcomeDistribution::outcomes)
      .def("total_mass", &ldp::OutcomeDistribution::total_mass);

  py::class_<ldp::RatioReport>(m, "RatioReport")
      .def_readonly("ratio", &ldp::RatioReport::ratio)
      .def_readonly("witness_a", &ldp::RatioReport::witness_a)
      .def_readonly("witness_b", &ldp::RatioReport::witness_b)
      .def_readonly("witness_output", &ldp::RatioReport::witness_output);

  py::class_<ldp::Moments>(m, "Moments")
      .def_readonly("mean", &ldp::Moments::mean)
      .def_readonly("variance", &ldp::Moments::variance);

  m.def("enumerate_distribution", &ldp::enumerate_distribution, py::arg("mechanism"), py::arg("input"),
        py::arg("epsilon"));
  m.def("max_ldp_ratio", &ldp::max_ldp_ratio, py::arg("mechanism"), py::arg("grid"), py::arg("epsilon"));
  m.def("exact_moments", &ldp::exact_moments, py::arg("mechanism"), py::arg("input"), py::arg("epsilon"));
  m.def("corner_inputs", &ldp::corner_inputs);
  m.def("lattice_inputs", &ldp::lattice_inputs);
  m.def("categorical_inputs", &ldp::categorical_inputs);
  m.def("mixed_grid", &ldp::mixed_grid);

  py::enum_<ldp::LossKind>(m, "LossKind")
      .value("linear", ldp::LossKind::linear)
      .value("logistic", ldp::LossKind::logistic)
      .value("hinge", ldp::LossKind::hinge);

  py::enum_<ldp::TrainMode>(m, "TrainMode")
      .value("private_sgd", ldp::TrainMode::private_sgd)
      .value("mgd", ldp::TrainMode::mgd)
      .value("mgd_dr", ldp::TrainMode::mgd_dr)
      .value("nonprivate_sgd", ldp::TrainMode::nonprivate_sgd);

  py::class_<ldp::TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("loss", &ldp::TrainConfig::loss)
      .def_readwrite("mode", &ldp::TrainConfig::mode)
      .def_readwrite("lambda_", &ldp::TrainConfig::lambda)
      .def_readwrite("r", &ldp::TrainConfig::r)
      .def_readwrite("g", &ldp::TrainConfig::g)
      .def_readwrite("epsilon", &ldp::TrainConfig::epsilon)
      .def_readwrite("max_users", &ldp::TrainConfig::max_users)
      .def_readwrite("stop_delta", &ldp::TrainConfig::stop_delta)
      .def_readwrite("reduction_seed", &ldp::TrainConfig::reduction_seed);

  py::class_<ldp::LabeledTuple>(m, "LabeledTuple")
      .def(py::init([](std::vector<double> x, double y) {
             ldp::LabeledTuple t;
             t.x = std::move(x);
             t.y = y;
             return t;
           }),
           py::arg("x"), py::arg("y"))
      .def_readwrite("x", &ldp::LabeledTuple::x)
      .def_readwrite("y", &ldp::LabeledTuple::y);

  py::class_<ldp::ModelParams>(m, "ModelParams").def_readonly("alpha", &ldp::ModelParams::alpha);

  py::class_<ldp::TrainStats>(m, "TrainStats")
      .def_readonly("users_consumed", &ldp::TrainStats::users_consumed)
      .def_readonly("updates_applied", &ldp::TrainStats::updates_applied)
      .def_readonly("perturbations", &ldp::TrainStats::perturbations)
      .def_readonly("stopped_early", &ldp::TrainStats::stopped_early);

  py::class_<ldp::TrainResult>(m, "TrainResult")
      .def_readonly("params", &ldp::TrainResult::params)
      .def_readonly("stats", &ldp::TrainResult::stats)
      .def_property_readonly("reduction_seed", [](const ldp::TrainResult& r) -> py::object {
        if (r.reduction) return py::cast(r.reduction->seed());
        return py::none();
      });

  m.def("loss_value", &ldp::loss_value);
  m.def("loss_gradient", &ldp::loss_gradient);
  m.def("clip_gradient", &ldp::clip_gradient);
  m.def("mgd_train", &ldp::mgd_train, py::arg("data"), py::arg("config"), py::arg("rng"));
  m.def(
      "evaluate",
      [](const ldp::ModelParams& params, const std::vector<ldp::LabeledTuple>& test, ldp::LossKind kind) {
        return ldp::evaluate(params, std::nullopt, test, kind);
      },
      py::arg("params"), py::arg("test"), py::arg("kind"));
  m.def(
      "evaluate_result",
      [](const ldp::TrainResult& result, const std::vector<ldp::LabeledTuple>& test, ldp::LossKind kind) {
        return ldp::evaluate(result.params, result.reduction, test, kind);
      },
      py::arg("result"), py::arg("test"), py::arg("kind"));

  py::class_<ldp::Dataset>(m, "Dataset")
      .def_readonly("schema", &ldp::Dataset::schema)
      .def_readonly("tuples", &ldp::Dataset::tuples)
      .def_readonly("labels", &ldp::Dataset::labels);
  m.def("load_dataset", py::overload_cast<const std::string&, const std::string&>(&ldp::load_dataset),
        py::arg("csv_path"), py::arg("schema_path"));

  py::class_<ldp::OneHotResult>(m, "OneHotResult")
      .def_readonly("schema", &ldp::OneHotResult::schema)
      .def_readonly("tuples", &ldp::OneHotResult::tuples);
  m.def("onehot_transform", &ldp::onehot_transform);
  m.def("binarize_label", py::overload_cast<const std::vector<double>&>(&ldp::binarize_label));
  m.def("mean_of", &ldp::mean_of);

  py::class_<ldp::SynthResult>(m, "SynthResult")
      .def_readonly("schema", &ldp::SynthResult::schema)
      .def_readonly("tuples", &ldp::SynthResult::tuples)
      .def_readonly("numeric_means", &ldp::SynthResult::numeric_means)
      .def_readonly("cat_freqs", &ldp::SynthResult::cat_freqs);
  m.def(
      "synth_generate",
      [](const std::string& spec, std::size_t n, std::uint64_t seed) {
        return ldp::synth_generate(ldp::parse_synth_spec(spec), n, seed);
      },
      py::arg("spec"), py::arg("n"), py::arg("seed"));

  m.def("batch_size_rule", &ldp::batch_size_rule, py::arg("dim"), py::arg("epsilon"), py::arg("n"));
  m.def(
      "run_experiment",
      [](const std::string& config_text) {
        std::istringstream in(config_text);
        const ldp::ExperimentConfig config = ldp::parse_experiment_config(in);
        std::ostringstream out;
        ldp::run_experiment(config, out);
        return out.str();
      },
      py::arg("config_text"), "Parse a key=value config from text, run the sweep, return the metrics lines");
}
