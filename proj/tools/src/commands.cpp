// Copyright 2026 The AGT Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "commands.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "agt/errors.hpp"
#include "agt/mechanisms.hpp"
#include "agt/oracle.hpp"
#include "agt/serialize.hpp"
#include "json.hpp"

namespace agt::cli {
namespace {

namespace fs = std::filesystem;

std::string num(double v) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, v);
  return std::string(buffer, result.ptr);
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

double nominal_accuracy(const Mlp& model, std::span<const LabeledExample> queries) {
  if (queries.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& q : queries) correct += argmax(predict_logits(model, q.x)) == q.label;
  return static_cast<double>(correct) / static_cast<double>(queries.size());
}

struct Options {
  std::string config;
  std::string out;
  std::string bundle;
  std::optional<std::uint64_t> seed_override;
  bool negative_control = false;
};

// Fraction of each box's extent kept by --negative-control.
constexpr double kNegativeControlShrink = 0.1;

ExperimentConfig resolve_config(const Options& options) {
  ExperimentConfig config = load_config(options.config);
  if (options.seed_override) apply_seed_override(config, *options.seed_override);
  return config;
}

CertificateBundle load_matching_bundle(const Options& options, const ExperimentConfig& config) {
  const fs::path path = options.bundle.empty() ? fs::path(options.out) / "bundle.json" : fs::path(options.bundle);
  CertificateBundle bundle;
  try {
    bundle = load_bundle(path);
  } catch (const std::runtime_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (bundle.config_hash != config_hash(config)) {
    throw ConfigError("bundle " + path.string() + " was built from config " + hex64(bundle.config_hash) +
                      ", not " + hex64(config_hash(config)));
  }
  return bundle;
}

void check_model_shape(const CertificateBundle& bundle, const DatasetSplit& data) {
  const Mlp& model = bundle.nominal();
  if (model.input_dim() != data.train.n_features || model.output_dim() != data.train.n_classes) {
    throw ConfigError("bundle model shape does not match the dataset");
  }
}

int cmd_train(const Options& options, std::ostream& out, std::ostream& err) {
  const ExperimentConfig config = resolve_config(options);
  const DatasetSplit data = load_experiment_data(config);
  const CertificateBundle bundle = train_bundle(config, data);

  const fs::path dir(options.out);
  fs::create_directories(dir);
  save_bundle(bundle, dir / "bundle.json");

  const std::vector<double> fractions = certified_fraction(bundle, data.test.examples);
  const nlohmann::json manifest{
      {"format", "agt-manifest"},
      {"version", kArtifactVersion},
      {"config_hash", hex64(bundle.config_hash)},
      {"bundle_hash", hex64(fnv1a64(bundle_to_json(bundle)))},
      {"config", nlohmann::json::parse(canonical_json(config))},
      {"n_train", data.train.size()},
      {"n_test", data.test.size()},
      {"nominal_test_accuracy", nominal_accuracy(bundle.nominal(), data.test.examples)},
      {"kset", bundle.kset},
      {"certified_fraction", fractions},
      {"max_box_width", [&] {
         std::vector<double> w;
         for (const auto& box : bundle.boxes) w.push_back(box.max_width());
         return w;
       }()}};
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
  err << "trained " << bundle.boxes.size() << " boxes, config " << hex64(bundle.config_hash) << "\n";
  out << (dir / "bundle.json").string() << "\n";
  return kExitOk;
}

int cmd_certify(const Options& options, std::ostream& out, std::optional<PerturbationMode> require_mode) {
  const ExperimentConfig config = resolve_config(options);
  const DatasetSplit data = load_experiment_data(config);
  CertificateBundle bundle;
  if (require_mode && options.bundle.empty() && !fs::exists(fs::path(options.out) / "bundle.json")) {
    ExperimentConfig forced = config;
    forced.mode = *require_mode;
    bundle = train_bundle(forced, data);
  } else {
    bundle = load_matching_bundle(options, config);
  }
  check_model_shape(bundle, data);
  if (require_mode && bundle.mode != *require_mode) {
    throw ConfigError("bundle was trained in " + to_string(bundle.mode) + " mode, expected " +
                      to_string(*require_mode));
  }
  const fs::path dir(options.out);
  auto certs = open_output(dir / "certificates.csv");
  write_certificates_csv(certs, bundle, data.test.examples);
  auto summary = open_output(dir / "certified_fraction.csv");
  write_certified_fraction_csv(summary, bundle, data.test.examples);
  out << (dir / "certificates.csv").string() << "\n";
  return kExitOk;
}

int cmd_privacy_eval(const Options& options, std::ostream& out) {
  const ExperimentConfig config = resolve_config(options);
  const DatasetSplit data = load_experiment_data(config);
  const CertificateBundle bundle = load_matching_bundle(options, config);
  check_model_shape(bundle, data);
  if (data.train.n_classes != 2) throw ConfigError("privacy-eval supports binary tasks only");
  const fs::path path = fs::path(options.out) / "privacy_eval.csv";
  auto csv = open_output(path);
  write_privacy_eval_csv(csv, bundle, data.test.examples, config.privacy);
  auto accounting = open_output(fs::path(options.out) / "accounting.csv");
  write_accounting_csv(accounting, bundle, data.test.examples, config.privacy);
  out << path.string() << "\n";
  return kExitOk;
}

int cmd_oracle(const Options& options, std::ostream& out, std::ostream& err) {
  const ExperimentConfig config = resolve_config(options);
  const DatasetSplit data = load_experiment_data(config);
  const CertificateBundle bundle = load_matching_bundle(options, config);
  check_model_shape(bundle, data);
  const auto widths = config.widths(data.train.n_features, data.train.n_classes);
  const auto pool = make_candidate_pool(data.train.examples, data.test.examples);

  const fs::path path = fs::path(options.out) / "oracle_report.csv";
  auto csv = open_output(path);
  write_trial_csv_header(csv);
  std::size_t violations = 0;
  for (std::size_t i = 0; i < bundle.kset.size(); ++i) {
    const std::size_t k = bundle.kset[i];
    const ParamBox box = options.negative_control ? bundle.boxes[i].shrunk(kNegativeControlShrink) : bundle.boxes[i];
    // Nominal parameters are unchanged by shrinking, so the trial's
    // reproducibility check still applies.
    const SoundnessReport report =
        soundness_trial(data.train.examples, widths, config.training,
                        PerturbationModel::for_mode(bundle.mode, k), box, pool, config.oracle);
    write_trial_csv(csv, k, report);
    violations += report.violations;
    err << "k=" << k << ": " << report.violations << " violations, worst excess "
        << num(report.worst_excess) << "\n";
  }
  out << "violations " << violations << "\n";
  return violations == 0 ? kExitOk : kExitViolation;
}

}  // namespace

DatasetSplit load_experiment_data(const ExperimentConfig& config) {
  return load_dataset(config.dataset);
}

CertificateBundle train_bundle(const ExperimentConfig& config, const DatasetSplit& data) {
  if (data.train.empty()) throw ConfigError("training split is empty");
  const auto widths = config.widths(data.train.n_features, data.train.n_classes);
  CertificateBundle bundle;
  bundle.mode = config.mode;
  bundle.beta = config.certify_beta();
  bundle.config_hash = config_hash(config);
  bundle.kset = config.kset;
  for (std::size_t k : config.kset) {
    bundle.boxes.push_back(
        train(data.train.examples, widths, config.training, PerturbationModel::for_mode(config.mode, k)));
  }
  bundle.validate();
  return bundle;
}

void write_certificates_csv(std::ostream& out, const CertificateBundle& bundle,
                            std::span<const LabeledExample> queries) {
  out << "index,label,predicted,k_prime,smooth_bound\n";
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const QueryCertificate cert = certify_query(bundle, queries[i].x, bundle.beta);
    out << i << ',' << queries[i].label << ',' << cert.predicted << ',';
    if (cert.k_prime) out << *cert.k_prime;
    out << ',' << num(cert.smooth_bound) << '\n';
  }
}

void write_certified_fraction_csv(std::ostream& out, const CertificateBundle& bundle,
                                  std::span<const LabeledExample> queries) {
  out << "k,certified_fraction\n";
  if (queries.empty()) return;
  const std::vector<double> fractions = certified_fraction(bundle, queries);
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    out << bundle.kset[i] << ',' << num(fractions[i]) << '\n';
  }
}

void write_privacy_eval_csv(std::ostream& out, const CertificateBundle& bundle,
                            std::span<const LabeledExample> queries, const PrivacySection& privacy) {
  out << "epsilon,mechanism,accuracy,noiseless_accuracy,mean_smooth_sensitivity,mean_eps_s\n";
  if (queries.empty()) return;
  const Mlp& model = bundle.nominal();
  std::vector<int> predicted;
  std::vector<std::optional<std::size_t>> k_prime;
  for (const auto& q : queries) {
    predicted.push_back(argmax(predict_logits(model, q.x)));
    k_prime.push_back(find_k_prime(bundle, q.x));
  }
  const double n = static_cast<double>(queries.size());
  const double draws = static_cast<double>(privacy.n_draws);
  const double noiseless = nominal_accuracy(model, queries);

  for (std::size_t e = 0; e < privacy.epsilons.size(); ++e) {
    const double eps = privacy.epsilons[e];
    Rng rng(mix_seed(privacy.seed, e));

    double global_correct = 0.0;
    double eps_s_total = 0.0;
    for (std::size_t i = 0; i < queries.size(); ++i) {
      for (std::size_t d = 0; d < privacy.n_draws; ++d) {
        global_correct += release_binary(predicted[i], eps, rng) == queries[i].label;
      }
      const std::size_t k_star = k_prime[i] ? *k_prime[i] + 1 : 1;
      eps_s_total += tighter_epsilon(eps, privacy.delta, k_star).eps_s;
    }
    out << num(eps) << ",global_laplace," << num(global_correct / (n * draws)) << ',' << num(noiseless)
        << ",1," << num(eps_s_total / n) << '\n';

    const PrivacySpec specs[] = {PrivacySpec::for_cauchy(eps),
                                 PrivacySpec::for_laplace(eps, privacy.delta)};
    const char* names[] = {"smooth_cauchy", "smooth_laplace"};
    for (int m = 0; m < 2; ++m) {
      double correct = 0.0;
      double sensitivity = 0.0;
      for (std::size_t i = 0; i < queries.size(); ++i) {
        const double s = smooth_bound_from_k_prime(k_prime[i], specs[m].beta);
        sensitivity += s;
        for (std::size_t d = 0; d < privacy.n_draws; ++d) {
          const double noisy = m == 0 ? release_smooth_cauchy(predicted[i], s, specs[m], rng)
                                      : release_smooth_laplace(predicted[i], s, specs[m], rng);
          correct += threshold_label(noisy) == queries[i].label;
        }
      }
      out << num(eps) << ',' << names[m] << ',' << num(correct / (n * draws)) << ',' << num(noiseless)
          << ',' << num(sensitivity / n) << ",\n";
    }
  }
}

void write_accounting_csv(std::ostream& out, const CertificateBundle& bundle,
                          std::span<const LabeledExample> queries, const PrivacySection& privacy) {
  out << "query_index,epsilon,delta,k_prime,k_star,smooth_bound,eps_s\n";
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto k_prime = find_k_prime(bundle, queries[i].x);
    const std::size_t k_star = k_prime ? *k_prime + 1 : 1;
    for (double eps : privacy.epsilons) {
      const double beta = privacy.mechanism == Mechanism::kCauchy
                              ? PrivacySpec::for_cauchy(eps).beta
                              : PrivacySpec::for_laplace(eps, privacy.delta).beta;
      out << i << ',' << num(eps) << ',' << num(privacy.delta) << ',';
      if (k_prime) out << *k_prime;
      out << ',' << k_star << ',' << num(smooth_bound_from_k_prime(k_prime, beta)) << ','
          << num(tighter_epsilon(eps, privacy.delta, k_star).eps_s) << '\n';
    }
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certified training, certification and private prediction for small MLPs", "agt"};
  app.require_subcommand(1);
  Options options;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub, bool needs_bundle) {
    sub->add_option("--config", options.config, "Experiment config (JSON)")->required();
    sub->add_option("--out", options.out, "Output directory")->required();
    sub->add_option("--seed-override", seed, "Derive every seed in the config from this value");
    if (needs_bundle) sub->add_option("--bundle", options.bundle, "Bundle file (default: <out>/bundle.json)");
  };
  CLI::App* train_cmd = app.add_subcommand("train", "Train the nominal model and one box per k");
  add_common(train_cmd, false);
  CLI::App* certify_cmd = app.add_subcommand("certify", "Per-query certificates on the test split");
  add_common(certify_cmd, true);
  CLI::App* privacy_cmd = app.add_subcommand("privacy-eval", "Noisy-release accuracy over an epsilon grid");
  add_common(privacy_cmd, true);
  CLI::App* oracle_cmd = app.add_subcommand("oracle", "Check every box against perturbed retraining");
  add_common(oracle_cmd, true);
  oracle_cmd->add_flag("--negative-control", options.negative_control,
                       "Shrink every box to a tenth of its size first; violations are expected");
  CLI::App* unlearning_cmd =
      app.add_subcommand("unlearning-eval", "Certify in unlearning mode (trains if no bundle exists)");
  add_common(unlearning_cmd, true);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  for (CLI::App* sub : app.get_subcommands()) {
    if (sub->count("--seed-override")) options.seed_override = seed;
  }

  try {
    if (*train_cmd) return cmd_train(options, out, err);
    if (*certify_cmd) return cmd_certify(options, out, std::nullopt);
    if (*privacy_cmd) return cmd_privacy_eval(options, out);
    if (*oracle_cmd) return cmd_oracle(options, out, err);
    if (*unlearning_cmd) return cmd_certify(options, out, PerturbationMode::kUnlearning);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitConfigError;
}

}  // namespace agt::cli
