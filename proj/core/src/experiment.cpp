#include "overgrad/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "config_json.hpp"
#include "overgrad/error.hpp"
#include "overgrad/gram.hpp"
#include "overgrad/plots.hpp"
#include "overgrad/spectral.hpp"
#include "overgrad/trace_io.hpp"

namespace overgrad {
namespace detail {
namespace {

/// Pulls typed fields out of one JSON object, recording problems instead of
/// throwing so that every bad field is reported at once.
class FieldReader {
 public:
  FieldReader(const json& obj, std::string prefix, std::vector<std::string>& problems)
      : obj_(obj), prefix_(std::move(prefix)), problems_(problems) {
    if (!obj_.is_object()) {
      problems_.push_back(prefix_ + " must be an object");
      valid_ = false;
    }
  }

  template <typename T>
  std::optional<T> get(const std::string& key, bool required) {
    seen_.insert(key);
    if (!valid_ || !obj_.contains(key) || obj_.at(key).is_null()) {
      if (required && valid_) problems_.push_back(prefix_ + "." + key + " is required");
      return std::nullopt;
    }
    const json& v = obj_.at(key);
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw std::invalid_argument("not a number");
        return v.get<double>();
      } else if constexpr (std::is_same_v<T, std::uint64_t> || std::is_same_v<T, std::size_t>) {
        if (!v.is_number_unsigned()) throw std::invalid_argument("not a non-negative integer");
        return v.get<T>();
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw std::invalid_argument("not a boolean");
        return v.get<bool>();
      } else {
        if (!v.is_string()) throw std::invalid_argument("not a string");
        return v.get<std::string>();
      }
    } catch (const std::exception& e) {
      problems_.push_back(prefix_ + "." + key + ": " + e.what());
      return std::nullopt;
    }
  }

  template <typename T>
  T get_or(const std::string& key, T fallback) {
    return get<T>(key, false).value_or(fallback);
  }

  void reject_unknown() {
    if (!valid_) return;
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.contains(key)) problems_.push_back(prefix_ + "." + key + " is not a known field");
    }
  }

  json sub(const std::string& key) {
    seen_.insert(key);
    if (!valid_ || !obj_.contains(key)) {
      if (valid_) problems_.push_back(prefix_ + "." + key + " is required");
      return json::object();
    }
    return obj_.at(key);
  }

 private:
  const json& obj_;
  std::string prefix_;
  std::vector<std::string>& problems_;
  std::set<std::string> seen_;
  bool valid_ = true;
};

template <typename Enum, typename Parse>
Enum parse_enum(const std::optional<std::string>& text, Enum fallback, Parse parse,
                const std::string& field, std::vector<std::string>& problems) {
  if (!text) return fallback;
  try {
    return parse(*text);
  } catch (const Error& e) {
    problems.push_back(field + ": " + e.what());
    return fallback;
  }
}

DatasetSource parse_source(std::string_view s) {
  if (s == "iid") return DatasetSource::Iid;
  if (s == "correlated") return DatasetSource::Correlated;
  if (s == "csv") return DatasetSource::Csv;
  throw InvalidArgument("unknown dataset source '" + std::string(s) + "'");
}

std::string_view source_name(DatasetSource s) {
  switch (s) {
    case DatasetSource::Iid: return "iid";
    case DatasetSource::Correlated: return "correlated";
    case DatasetSource::Csv: return "csv";
  }
  return "iid";
}

EtaRule parse_eta_rule(std::string_view s) {
  if (s == "fixed") return EtaRule::Fixed;
  if (s == "h_infinity") return EtaRule::HInfinity;
  if (s == "h_initial") return EtaRule::HInitial;
  throw InvalidArgument("unknown eta rule '" + std::string(s) + "'");
}

std::string_view eta_rule_name(EtaRule r) {
  switch (r) {
    case EtaRule::Fixed: return "fixed";
    case EtaRule::HInfinity: return "h_infinity";
    case EtaRule::HInitial: return "h_initial";
  }
  return "fixed";
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

ExperimentConfig config_from_object(const json& root, std::vector<std::string>& problems) {
  ExperimentConfig cfg;
  FieldReader top(root, "config", problems);

  {
    const json obj = top.sub("dataset");
    FieldReader r(obj, "dataset", problems);
    auto& ds = cfg.dataset;
    ds.source = parse_enum(r.get<std::string>("source", true), DatasetSource::Iid, parse_source,
                           "dataset.source", problems);
    const bool csv = ds.source == DatasetSource::Csv;
    ds.n = r.get<std::size_t>("n", !csv).value_or(0);
    ds.d = r.get<std::size_t>("d", !csv).value_or(0);
    ds.seed = r.get<std::uint64_t>("seed", !csv).value_or(0);
    ds.rho = r.get_or<double>("rho", 0.0);
    ds.label_mode = parse_enum(r.get<std::string>("label_mode", false), LabelMode::Uniform,
                               parse_label_mode, "dataset.label_mode", problems);
    ds.path = r.get<std::string>("path", csv).value_or("");
    ds.normalize = r.get_or<bool>("normalize", false);
    r.reject_unknown();
  }
  {
    const json obj = top.sub("network");
    FieldReader r(obj, "network", problems);
    cfg.network.m = r.get<std::size_t>("m", true).value_or(0);
    cfg.network.seed = r.get<std::uint64_t>("seed", true).value_or(0);
    r.reject_unknown();
  }
  {
    const json obj = top.sub("optimizer");
    FieldReader r(obj, "optimizer", problems);
    auto& op = cfg.optimizer;
    op.method = parse_enum(r.get<std::string>("method", true), Method::Adaptive, parse_method,
                           "optimizer.method", problems);
    op.variant = parse_enum(r.get<std::string>("variant", false), BUpdate::AdaLoss,
                            parse_b_update, "optimizer.variant", problems);
    op.eta_rule = parse_enum(r.get<std::string>("eta_rule", false), EtaRule::Fixed,
                             parse_eta_rule, "optimizer.eta_rule", problems);
    op.eta = r.get<double>("eta", op.eta_rule == EtaRule::Fixed).value_or(0.0);
    op.c_eta = r.get_or<double>("c_eta", 1.0);
    op.b0 = r.get<double>("b0", false);
    op.alpha = r.get<double>("alpha", false);
    op.epsilon = r.get<double>("epsilon", false);
    op.max_iters = r.get<std::size_t>("max_iters", true).value_or(0);
    r.reject_unknown();
  }
  if (root.is_object() && root.contains("diagnostics")) {
    const json obj = top.sub("diagnostics");
    FieldReader r(obj, "diagnostics", problems);
    auto& dg = cfg.diagnostics;
    dg.gram_every = r.get_or<std::size_t>("gram_every", dg.gram_every);
    dg.drift_every = r.get_or<std::size_t>("drift_every", dg.drift_every);
    dg.flip_every = r.get_or<std::size_t>("flip_every", dg.flip_every);
    dg.eig_tol = r.get_or<double>("eig_tol", dg.eig_tol);
    dg.eig_max_iters = r.get_or<std::size_t>("eig_max_iters", dg.eig_max_iters);
    dg.t0_threshold = r.get<double>("t0_threshold", false);
    dg.emit_plots = r.get_or<bool>("emit_plots", dg.emit_plots);
    dg.save_network = r.get_or<bool>("save_network", dg.save_network);
    r.reject_unknown();
  }
  cfg.output_dir = top.get_or<std::string>("output_dir", "");
  cfg.run_seed = top.get_or<std::uint64_t>("run_seed", 0);
  top.get<std::size_t>("schema_version", false);
  top.reject_unknown();
  return cfg;
}

json config_to_object(const ExperimentConfig& cfg) {
  json ds = {
      {"source", source_name(cfg.dataset.source)},
      {"n", cfg.dataset.n},
      {"d", cfg.dataset.d},
      {"seed", cfg.dataset.seed},
      {"rho", cfg.dataset.rho},
      {"label_mode", to_string(cfg.dataset.label_mode)},
      {"path", cfg.dataset.path.string()},
      {"normalize", cfg.dataset.normalize},
  };
  json net = {{"m", cfg.network.m}, {"seed", cfg.network.seed}};
  json op = {
      {"method", to_string(cfg.optimizer.method)},
      {"variant", to_string(cfg.optimizer.variant)},
      {"eta_rule", eta_rule_name(cfg.optimizer.eta_rule)},
      {"eta", cfg.optimizer.eta},
      {"c_eta", cfg.optimizer.c_eta},
      {"b0", optional_number(cfg.optimizer.b0)},
      {"alpha", optional_number(cfg.optimizer.alpha)},
      {"epsilon", optional_number(cfg.optimizer.epsilon)},
      {"max_iters", cfg.optimizer.max_iters},
  };
  json dg = {
      {"gram_every", cfg.diagnostics.gram_every},
      {"drift_every", cfg.diagnostics.drift_every},
      {"flip_every", cfg.diagnostics.flip_every},
      {"eig_tol", cfg.diagnostics.eig_tol},
      {"eig_max_iters", cfg.diagnostics.eig_max_iters},
      {"t0_threshold", optional_number(cfg.diagnostics.t0_threshold)},
      {"emit_plots", cfg.diagnostics.emit_plots},
      {"save_network", cfg.diagnostics.save_network},
  };
  return json{
      {"schema_version", 1},   {"dataset", ds},
      {"network", net},        {"optimizer", op},
      {"diagnostics", dg},     {"output_dir", cfg.output_dir.string()},
      {"run_seed", cfg.run_seed},
  };
}

}  // namespace detail

ExperimentConfig config_from_json(std::string_view text) {
  detail::json root;
  try {
    root = detail::json::parse(text);
  } catch (const detail::json::parse_error& e) {
    throw ConfigError({std::string("config is not valid JSON: ") + e.what()});
  }
  std::vector<std::string> problems;
  ExperimentConfig cfg = detail::config_from_object(root, problems);
  if (!problems.empty()) {
    for (auto& v : validate(cfg)) {
      const std::string field = v.substr(0, v.find(' '));
      const bool reported = std::any_of(problems.begin(), problems.end(), [&](const std::string& p) {
        return p.rfind(field, 0) == 0;
      });
      if (!reported) problems.push_back(std::move(v));
    }
    throw ConfigError(std::move(problems));
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config " + path.string()});
  std::stringstream buffer;
  buffer << in.rdbuf();
  return config_from_json(buffer.str());
}

std::string config_to_json(const ExperimentConfig& config) {
  return detail::config_to_object(config).dump(2) + "\n";
}

std::vector<std::string> validate(const ExperimentConfig& cfg) {
  std::vector<std::string> out;
  const auto& ds = cfg.dataset;
  if (ds.source == DatasetSource::Csv) {
    if (ds.path.empty()) {
      out.push_back("dataset.path is required for csv datasets");
    } else if (!std::filesystem::exists(ds.path)) {
      out.push_back("dataset.path does not exist: " + ds.path.string());
    }
  } else {
    if (ds.n == 0) out.push_back("dataset.n must be at least 1");
    if (ds.d == 0) out.push_back("dataset.d must be at least 1");
  }
  if (ds.source == DatasetSource::Correlated && !(ds.rho >= 0.0 && ds.rho < 1.0)) {
    out.push_back("dataset.rho must lie in [0, 1)");
  }
  if (cfg.network.m == 0) out.push_back("network.m must be at least 1");

  const auto& op = cfg.optimizer;
  if (op.eta_rule == EtaRule::Fixed && !(op.eta > 0.0)) out.push_back("optimizer.eta must be positive");
  if (!(op.c_eta > 0.0)) out.push_back("optimizer.c_eta must be positive");
  if (op.b0 && !(*op.b0 > 0.0)) out.push_back("optimizer.b0 must be positive");
  if (op.alpha && !(*op.alpha > 0.0)) out.push_back("optimizer.alpha must be positive");
  if (op.epsilon && !(*op.epsilon > 0.0)) out.push_back("optimizer.epsilon must be positive");

  const auto& dg = cfg.diagnostics;
  if (dg.gram_every == 0) out.push_back("diagnostics.gram_every must be at least 1");
  if (dg.drift_every == 0) out.push_back("diagnostics.drift_every must be at least 1");
  if (dg.flip_every == 0) out.push_back("diagnostics.flip_every must be at least 1");
  if (!(dg.eig_tol > 0.0)) out.push_back("diagnostics.eig_tol must be positive");
  if (dg.eig_max_iters == 0) out.push_back("diagnostics.eig_max_iters must be positive");
  if (dg.t0_threshold && !(*dg.t0_threshold > 0.0)) {
    out.push_back("diagnostics.t0_threshold must be positive");
  }
  return out;
}

ExperimentConfig recipe(std::string_view name) {
  ExperimentConfig cfg;
  if (name == "figure1_iid" || name == "figure1_correlated") {
    const bool correlated = name == "figure1_correlated";
    cfg.dataset = {correlated ? DatasetSource::Correlated : DatasetSource::Iid,
                   1000, 200, 1, correlated ? 0.95 : 0.0, LabelMode::Uniform, {}, false};
    cfg.network = {5000, 1};
    cfg.optimizer.method = Method::GradientDescent;
    cfg.optimizer.eta_rule = EtaRule::Fixed;
    cfg.optimizer.eta = correlated ? 5e-5 : 5e-4;
    cfg.optimizer.epsilon = 1e-6;
    cfg.optimizer.max_iters = 100;
    cfg.diagnostics.gram_every = 1;
    return cfg;
  }
  if (name == "smoke") {
    cfg.dataset = {DatasetSource::Iid, 10, 5, 1, 0.0, LabelMode::Uniform, {}, false};
    cfg.network = {200, 1};
    cfg.optimizer.method = Method::Adaptive;
    cfg.optimizer.variant = BUpdate::AdaLoss;
    cfg.optimizer.eta = 1.0;
    cfg.optimizer.epsilon = 0.1;
    cfg.optimizer.max_iters = 10000;
    cfg.diagnostics.gram_every = 10;
    return cfg;
  }
  throw InvalidArgument("unknown recipe '" + std::string(name) + "'");
}

std::vector<std::string> recipe_names() { return {"figure1_iid", "figure1_correlated", "smoke"}; }

std::filesystem::path resolve_output_dir(const ExperimentConfig& config) {
  if (!config.output_dir.empty()) return config.output_dir;
  if (const char* env = std::getenv("OVERGRAD_OUT"); env && *env) return env;
  return "overgrad_out";
}

Dataset make_dataset(const DatasetSpec& spec) {
  switch (spec.source) {
    case DatasetSource::Iid:
      return gen_iid_gaussian(spec.n, spec.d, spec.seed, spec.label_mode);
    case DatasetSource::Correlated:
      return gen_correlated_gaussian(spec.n, spec.d, spec.seed, spec.rho, spec.label_mode);
    case DatasetSource::Csv: {
      CsvLoadOptions options;
      options.normalize = spec.normalize;
      return load_csv(spec.path, options);
    }
  }
  throw InvalidArgument("unknown dataset source");
}

RunArtifacts run_experiment(const ExperimentConfig& config) {
  if (auto problems = validate(config); !problems.empty()) throw ConfigError(std::move(problems));

  RunArtifacts art;
  art.output_dir = resolve_output_dir(config);
  std::filesystem::create_directories(art.output_dir);

  const Dataset data = make_dataset(config.dataset);
  const NetworkState net0 = init_network(config.network.m, data.d(), config.network.seed);

  EigenOptions eigen;
  eigen.tol = config.diagnostics.eig_tol;
  eigen.max_iterations = config.diagnostics.eig_max_iters;
  eigen.seed = config.run_seed;

  const SpectralSummary hinf = extreme_eigenvalues(h_infinity(data), eigen);
  art.lambda0 = hinf.lambda_min;
  art.lambda_max_hinf = hinf.lambda_max;

  ExperimentConfig resolved = config;
  resolved.output_dir = art.output_dir;
  auto& op = resolved.optimizer;
  double eta = op.eta;
  if (op.eta_rule == EtaRule::HInfinity) {
    eta = suggested_gd_eta(hinf, op.c_eta);
  } else if (op.eta_rule == EtaRule::HInitial) {
    eta = suggested_gd_eta(extreme_eigenvalues(h_empirical(data, net0), eigen), op.c_eta);
  }
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(data.n()));
  if (!op.b0) op.b0 = eta;
  if (!op.alpha) op.alpha = inv_sqrt_n;
  if (!op.epsilon) op.epsilon = inv_sqrt_n;
  resolved.dataset.n = data.n();
  resolved.dataset.d = data.d();

  OptimizerConfig oc;
  oc.method = op.method;
  oc.variant = op.variant;
  oc.eta = eta;
  oc.b0 = *op.b0;
  oc.alpha = *op.alpha;
  oc.epsilon = *op.epsilon;
  oc.max_iters = op.max_iters;

  DiagnosticsConfig dc;
  dc.gram_every = config.diagnostics.gram_every;
  dc.drift_every = config.diagnostics.drift_every;
  dc.flip_every = config.diagnostics.flip_every;
  dc.t0_threshold = config.diagnostics.t0_threshold;
  dc.eigen = eigen;

  TrainResult result = run_training(data, net0, oc, dc);
  art.trace = std::move(result.trace);
  art.resolved = resolved;
  art.eta = eta;

  art.trace_csv = art.output_dir / "trace.csv";
  write_trace_csv(art.trace, art.trace_csv);

  art.config_echo = art.output_dir / "config.json";
  {
    std::ofstream out(art.config_echo, std::ios::binary);
    out << config_to_json(resolved);
    if (!out) throw FormatError("failed writing " + art.config_echo.string());
  }

  const TraceSummary& s = art.trace.summary;
  detail::json summary = {
      {"converged", s.converged},
      {"diverged", s.diverged},
      {"iterations", s.iterations},
      {"final_loss", std::isfinite(s.final_loss) ? detail::json(s.final_loss) : detail::json(nullptr)},
      {"T0_observed", s.t0_observed ? detail::json(*s.t0_observed) : detail::json(nullptr)},
      {"t0_threshold", s.t0_threshold},
      {"eta", eta},
      {"lambda0", art.lambda0},
      {"lambda_max_Hinf", art.lambda_max_hinf},
      {"trace_schema_version", kTraceSchemaVersion},
      {"config_echo", detail::config_to_object(resolved)},
  };
  art.summary_json = art.output_dir / "summary.json";
  {
    std::ofstream out(art.summary_json, std::ios::binary);
    out << summary.dump(2) << "\n";
    if (!out) throw FormatError("failed writing " + art.summary_json.string());
  }

  if (config.diagnostics.emit_plots && !art.trace.rows.empty()) {
    art.plot_script = emit_plots(art.trace_csv, art.output_dir);
  }
  if (config.diagnostics.save_network) {
    art.network_checkpoint = art.output_dir / "network.bin";
    save_network(result.net, *art.network_checkpoint);
  }
  return art;
}

}  // namespace overgrad
