#include <CLI11.hpp>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "pinnproj/errors.hpp"
#include "pinnproj/evaluation.hpp"
#include "pinnproj/spectra.hpp"
#include "pinnproj/training.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace pinnproj;

namespace {

/// Failure of a run whose configuration was valid (missing artifact, solver
/// blow-up, unreadable file, ...).
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string pde = "advection1d";
  std::vector<std::string> variants{"pinn"};
  std::vector<std::uint64_t> seeds{0};
  std::string quantity = "Both";
  int nx = 0;
  int ny = 0;
  int nt = 0;
  double grad_tol = 0.0;
  int max_epochs = 20000;
  int collocation = 10000;
  int data = 0;
  std::string data_selection = "full";
  double lambda = 10.0;
  std::vector<double> lambdas{0.0, 1.0, 10.0, 100.0};
  std::string residual = "frozen";
  std::string statistics = "interpolated";
  bool scale_inputs = true;
  int hidden_layers = 9;
  int width = 20;
  std::string format = "binary";
  int probes = 10;
  int steps = 100;
  std::uint64_t slq_seed = 0;
  bool spectra = false;
  bool timing = false;
  int jobs = 1;
  std::string out = "runs";
};

json config_json(const Config& c) {
  return {{"pde", c.pde},
          {"variants", c.variants},
          {"seeds", c.seeds},
          {"quantity", c.quantity},
          {"nx", c.nx},
          {"ny", c.ny},
          {"nt", c.nt},
          {"grad_tol", c.grad_tol},
          {"max_epochs", c.max_epochs},
          {"collocation", c.collocation},
          {"data", c.data},
          {"data_selection", c.data_selection},
          {"lambda", c.lambda},
          {"lambdas", c.lambdas},
          {"residual", c.residual},
          {"statistics", c.statistics},
          {"scale_inputs", c.scale_inputs},
          {"hidden_layers", c.hidden_layers},
          {"width", c.width},
          {"format", c.format},
          {"probes", c.probes},
          {"steps", c.steps},
          {"slq_seed", c.slq_seed}};
}

/// Options that differ from the preset, for the manifests.
json overrides(const Config& c) {
  const json def = config_json(Config{});
  const json cur = config_json(c);
  json out = json::object();
  for (const auto& [k, v] : cur.items()) {
    if (def.at(k) != v) out[k] = v;
  }
  return out;
}

std::string config_hash(const Config& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_json(c).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ProjectionKind parse_quantity(const std::string& q) {
  if (q == "L") return ProjectionKind::Linear;
  if (q == "Q") return ProjectionKind::Quadratic;
  if (q == "Both") return ProjectionKind::Both;
  throw ConfigError("unknown quantity '" + q + "' (expected L, Q or Both)");
}

std::string quantity_label(ProjectionKind k) {
  switch (k) {
    case ProjectionKind::None: return "-";
    case ProjectionKind::Linear: return "L";
    case ProjectionKind::Quadratic: return "Q";
    case ProjectionKind::Both: return "Both";
  }
  return "-";
}

/// "pinn", "pinn-sc-<q>" or "pinn-proj-<q>".
ModelVariant parse_variant(const std::string& label, double lambda) {
  if (label == "pinn") return ModelVariant::pinn();
  for (const char* prefix : {"pinn-sc-", "pinn-proj-"}) {
    const std::string p(prefix);
    if (label.rfind(p, 0) == 0) {
      const ProjectionKind k = parse_quantity(label.substr(p.size()));
      return p == "pinn-sc-" ? ModelVariant::soft(k, lambda) : ModelVariant::projected(k);
    }
  }
  throw ConfigError("unknown variant '" + label + "'");
}

PdeSpec pde_spec(const Config& c) { return PdeSpec::standard(parse_pde_kind(c.pde)); }

Grid make_grid(const Config& c, const PdeSpec& spec) {
  Grid g = spec.dims() == 2 ? Grid::standard_2d() : Grid::standard_1d();
  const double x_extent = g.x_max() - g.x0;
  const double y_extent = g.y_max() - g.y0;
  const double t_extent = g.t_max();
  if (c.nx > 0) {
    g.nx = c.nx;
    g.dx = x_extent / c.nx;
  }
  if (c.ny > 0 && g.dims == 2) {
    g.ny = c.ny;
    g.dy = y_extent / c.ny;
  }
  if (c.nt > 0) {
    if (c.nt < 2) throw ConfigError("nt must be at least 2");
    g.nt = c.nt;
    g.dt = t_extent / (c.nt - 1);
  }
  g.validate();
  return g;
}

void validate(const Config& c) {
  const PdeSpec spec = pde_spec(c);
  make_grid(c, spec);
  for (const auto& v : c.variants) parse_variant(v, c.lambda).validate();
  parse_quantity(c.quantity);
  parse_residual_mode(c.residual);
  parse_statistics_mode(c.statistics);
  if (c.seeds.empty()) throw ConfigError("at least one seed is required");
  if (c.max_epochs < 0 || c.collocation < 0 || c.data < 0) throw ConfigError("counts must be non-negative");
  if (c.hidden_layers < 1 || c.width < 1) throw ConfigError("network needs at least one hidden unit");
  if (c.data_selection != "full" && c.data_selection != "initial-boundary") {
    throw ConfigError("data selection must be 'full' or 'initial-boundary'");
  }
  if (c.format != "binary" && c.format != "csv") throw ConfigError("format must be 'binary' or 'csv'");
  if (c.jobs < 1) throw ConfigError("jobs must be positive");
  for (double l : c.lambdas) {
    if (!(l >= 0.0)) throw ConfigError("lambda values must be non-negative");
  }
}

fs::path pde_dir(const Config& c) { return fs::path(c.out) / c.pde; }
fs::path dataset_path(const Config& c) { return pde_dir(c) / (c.format == "csv" ? "dataset.csv" : "dataset.bin"); }
fs::path variant_dir(const Config& c, const std::string& label) { return pde_dir(c) / label; }
fs::path checkpoint_path(const Config& c, const std::string& label, std::uint64_t seed) {
  return variant_dir(c, label) / ("seed_" + std::to_string(seed) + ".ckpt");
}
fs::path record_path(const Config& c, const std::string& label, std::uint64_t seed) {
  return variant_dir(c, label) / ("record_" + std::to_string(seed) + ".json");
}
fs::path timing_path(const Config& c, const std::string& label, std::uint64_t seed) {
  return variant_dir(c, label) / ("timing_" + std::to_string(seed) + ".json");
}

void require(const fs::path& p) {
  if (!fs::exists(p)) throw RuntimeFailure("missing artifact: " + p.string());
}

void write_json(const json& j, const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw RuntimeFailure("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  require(path);
  std::ifstream is(path);
  return json::parse(is);
}

/// Runs body(i) for i in [0, n) on up to `jobs` threads; the first exception
/// is rethrown after all workers finish.
template <class Body>
void parallel_for(std::size_t n, int jobs, Body body) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        const std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

struct Experiment {
  PdeSpec spec;
  Field field;
  Problem problem;
};

Experiment load_experiment(const Config& c) {
  require(dataset_path(c));
  DatasetHeader header;
  Field field = read_dataset(dataset_path(c), &header);
  if (header.spec.kind != parse_pde_kind(c.pde)) throw ConfigError("dataset PDE does not match --pde");
  const Grid expected = make_grid(c, header.spec);
  if (expected.nx != field.grid.nx || expected.ny != field.grid.ny || expected.nt != field.grid.nt) {
    throw ConfigError("dataset grid does not match the configured grid; rerun generate");
  }
  Problem problem = Problem::from_field(header.spec, field);
  return {header.spec, std::move(field), std::move(problem)};
}

TrainingSet training_set(const Config& c, const Experiment& e, std::uint64_t seed) {
  const std::size_t n_data = c.data > 0 ? static_cast<std::size_t>(c.data) : (e.spec.dims() == 2 ? 1000 : 100);
  const DataSelection sel = c.data_selection == "full" ? DataSelection::FullGrid : DataSelection::InitialBoundary;
  return make_training_set(e.field, n_data, static_cast<std::size_t>(c.collocation), seed, sel);
}

LossFunction loss_for(const Config& c, const Experiment& e, const ModelVariant& v, std::uint64_t seed) {
  LossOptions lo;
  lo.residual_mode = parse_residual_mode(c.residual);
  lo.statistics = parse_statistics_mode(c.statistics);
  lo.scale_inputs = c.scale_inputs;
  return LossFunction(e.problem, training_set(c, e, seed), v, lo);
}

std::vector<int> layer_sizes(const Config& c, const PdeSpec& spec) {
  return standard_layer_sizes(spec.dims() + 1, c.hidden_layers, c.width);
}

TrainOptions train_options(const Config& c, const PdeSpec& spec) {
  TrainOptions to;
  to.lbfgs.grad_tol = c.grad_tol > 0.0 ? c.grad_tol : (spec.dims() == 2 ? 1e-7 : 1e-6);
  to.lbfgs.max_iterations = c.max_epochs;
  to.layer_sizes = layer_sizes(c, spec);
  return to;
}

struct TrialOutcome {
  std::uint64_t seed = 0;
  std::string status = "ok";
  TrainRecord record;
};

/// Trains every seed of one variant, writes checkpoints and records, and
/// returns the per-trial outcomes.
std::vector<TrialOutcome> train_variant(const Config& c, const Experiment& e, const std::string& label,
                                        const ModelVariant& v, const std::string& hash) {
  fs::create_directories(variant_dir(c, label));
  std::vector<TrialOutcome> out(c.seeds.size());
  std::mutex log_mu;
  parallel_for(c.seeds.size(), c.jobs, [&](std::size_t i) {
    const std::uint64_t seed = c.seeds[i];
    TrialOutcome& t = out[i];
    t.seed = seed;
    try {
      const LossFunction loss = loss_for(c, e, v, seed);
      TrainResult r = train(loss, seed, train_options(c, e.spec));
      save_checkpoint(r.params, checkpoint_path(c, label, seed));
      t.record = r.record;
    } catch (const TrainingDiverged& ex) {
      t.status = std::string("diverged: ") + ex.what();
    }
    TrainRecord stored = t.record;
    stored.wall_seconds = 0.0;
    write_record(stored, record_path(c, label, seed));
    write_json({{"config_hash", hash}, {"seed", seed}, {"wall_seconds", t.record.wall_seconds}}, timing_path(c, label, seed));
    const std::lock_guard lock(log_mu);
    std::cerr << label << " seed " << seed << ": " << t.status << ", " << t.record.epochs << " epochs, stop "
              << t.record.stop_reason << ", loss " << t.record.final_loss << '\n';
  });
  return out;
}

json trials_json(const std::vector<TrialOutcome>& trials) {
  json arr = json::array();
  double epochs = 0.0;
  int ok = 0;
  for (const auto& t : trials) {
    arr.push_back({{"seed", t.seed},
                   {"status", t.status},
                   {"epochs", t.record.epochs},
                   {"stop_reason", t.record.stop_reason},
                   {"final_loss", t.record.final_loss},
                   {"final_grad_inf", t.record.final_grad_inf}});
    if (t.status == "ok") {
      epochs += t.record.epochs;
      ++ok;
    }
  }
  return {{"trials", arr}, {"completed", ok}, {"mean_epochs", ok > 0 ? epochs / ok : 0.0}};
}

json manifest_base(const Config& c, const std::string& hash, const char* command) {
  return {{"command", command}, {"config_hash", hash}, {"config", config_json(c)}, {"overrides", overrides(c)}};
}

int cmd_generate(const Config& c) {
  const std::string hash = config_hash(c);
  const PdeSpec spec = pde_spec(c);
  const Grid grid = make_grid(c, spec);
  std::cerr << "solving " << c.pde << " on " << grid.nx << "x" << grid.ny << "x" << grid.nt << '\n';
  const Field field = solve_reference(spec, grid);
  fs::create_directories(pde_dir(c));
  write_dataset(field, spec, solver_tag(spec.kind), dataset_path(c),
                c.format == "csv" ? DatasetFormat::Csv : DatasetFormat::Binary, hash);
  const SeriesMode mode = spec.conserved ? SeriesMode::Constant : SeriesMode::TimeVarying;
  json drift = json::object();
  for (ConservedKind k : {ConservedKind::Linear, ConservedKind::Quadratic}) {
    const ConservedSeries s = conserved_series(field, k, mode);
    const std::string name(to_string(k));
    write_series(s, pde_dir(c) / ("series_" + name + ".json"), hash);
    drift[name] = relative_drift(integral_series(field, k));
  }
  json m = manifest_base(c, hash, "generate");
  m["dataset"] = dataset_path(c).filename().string();
  m["solver"] = solver_tag(spec.kind);
  m["series_mode"] = spec.conserved ? "constant" : "time_varying";
  m["reference_relative_drift"] = drift;
  write_json(m, pde_dir(c) / "manifest_generate.json");
  return 0;
}

int cmd_train(const Config& c) {
  const std::string hash = config_hash(c);
  const Experiment e = load_experiment(c);
  json m = manifest_base(c, hash, "train");
  json timing = {{"config_hash", hash}};
  for (const auto& label : c.variants) {
    const auto trials = train_variant(c, e, label, parse_variant(label, c.lambda), hash);
    m["variants"][label] = trials_json(trials);
    double seconds = 0.0;
    for (const auto& t : trials) seconds += t.record.wall_seconds;
    timing[label] = {{"mean_seconds", seconds / static_cast<double>(trials.size())}};
  }
  write_json(m, pde_dir(c) / "manifest_train.json");
  write_json(timing, pde_dir(c) / "timing_train.json");
  return 0;
}

SpectralDensity variant_spectrum(const Config& c, const Experiment& e, const std::string& label,
                                 const MlpParams& params, std::uint64_t seed) {
  const LossFunction loss = loss_for(c, e, parse_variant(label, c.lambda), seed);
  SlqOptions so;
  so.probes = c.probes;
  so.steps = std::min<int>(c.steps, static_cast<int>(params.values.size()));
  so.seed = c.slq_seed;
  so.threads = c.jobs;
  return slq(loss.gradient_fn(params.layer_sizes), params.values, so);
}

int cmd_spectra_impl(const Config& c, const Experiment& e, const std::string& hash) {
  json summary = manifest_base(c, hash, "spectra");
  for (const auto& label : c.variants) {
    const std::uint64_t seed = c.seeds.front();
    require(checkpoint_path(c, label, seed));
    const MlpParams params = load_checkpoint(checkpoint_path(c, label, seed));
    std::cerr << "spectrum of " << label << " (seed " << seed << ")\n";
    const SpectralDensity d = variant_spectrum(c, e, label, params, seed);
    write_density_csv(d, pde_dir(c) / ("spectrum_" + label + ".csv"), hash);
    summary["variants"][label] = {{"seed", seed}, {"max_eig", max_eig(d)}, {"density_mass", density_mass(d)},
                                  {"variance", d.variance}};
  }
  write_json(summary, pde_dir(c) / "spectra.json");
  return 0;
}

int cmd_spectra(const Config& c) { return cmd_spectra_impl(c, load_experiment(c), config_hash(c)); }

int cmd_evaluate(const Config& c) {
  const std::string hash = config_hash(c);
  const Experiment e = load_experiment(c);
  const InputScaling scaling = make_scaling(e.field.grid, c.scale_inputs);
  std::vector<ResultRow> rows;
  for (const auto& label : c.variants) {
    const ModelVariant v = parse_variant(label, c.lambda);
    std::vector<Metrics> trials;
    std::optional<Field> first;
    for (std::uint64_t seed : c.seeds) {
      require(checkpoint_path(c, label, seed));
      const MlpParams params = load_checkpoint(checkpoint_path(c, label, seed));
      const TrainRecord rec = read_record(record_path(c, label, seed));
      Field pred = predict_field(params, scaling, e.problem, v.kind);
      Metrics m = evaluate_model(params, scaling, e.problem, e.field, v.kind);
      m.epochs = rec.epochs;
      if (c.timing) m.wall_seconds = read_json(timing_path(c, label, seed)).at("wall_seconds").get<double>();
      trials.push_back(m);
      if (!first) first = std::move(pred);
    }
    rows.push_back({c.pde, label, quantity_label(v.kind), aggregate(trials), static_cast<int>(trials.size())});

    std::vector<double> times;
    for (int n = 0; n < e.field.grid.nt; ++n) times.push_back(e.field.grid.t(n));
    std::vector<std::pair<std::string, std::vector<double>>> cols;
    for (ConservedKind k : {ConservedKind::Linear, ConservedKind::Quadratic}) {
      const std::string name(to_string(k));
      cols.emplace_back(name + "_reference", integral_series(e.field, k));
      cols.emplace_back(name + "_predicted", c_trajectory(*first, k));
    }
    write_trajectory_csv(times, cols, pde_dir(c) / ("trajectory_" + label + ".csv"), hash);
  }
  write_results_csv(rows, pde_dir(c) / "results.csv", hash, c.timing);
  if (c.spectra) cmd_spectra_impl(c, e, hash);
  return 0;
}

int cmd_sweep_lambda(const Config& c) {
  const std::string hash = config_hash(c);
  const Experiment e = load_experiment(c);
  const ProjectionKind kind = parse_quantity(c.quantity);
  const InputScaling scaling = make_scaling(e.field.grid, c.scale_inputs);
  json m = manifest_base(c, hash, "sweep-lambda");
  std::vector<ResultRow> rows;
  for (double lambda : c.lambdas) {
    Config sub = c;
    sub.lambda = lambda;
    const std::string label = "pinn-sc-" + quantity_label(kind) + "-lambda-" + format_number(lambda);
    const ModelVariant v = ModelVariant::soft(kind, lambda);
    const auto outcomes = train_variant(sub, e, label, v, hash);
    m["lambdas"][format_number(lambda)] = trials_json(outcomes);
    std::vector<Metrics> trials;
    for (const auto& t : outcomes) {
      if (t.status != "ok") continue;
      const MlpParams params = load_checkpoint(checkpoint_path(sub, label, t.seed));
      Metrics met = evaluate_model(params, scaling, e.problem, e.field, ProjectionKind::None);
      met.epochs = t.record.epochs;
      met.wall_seconds = t.record.wall_seconds;
      trials.push_back(met);
    }
    if (trials.empty()) throw RuntimeFailure("every trial diverged at lambda " + format_number(lambda));
    rows.push_back({c.pde, label, quantity_label(kind), aggregate(trials),
                    static_cast<int>(trials.size())});
  }
  write_results_csv(rows, pde_dir(c) / "sweep_lambda.csv", hash, c.timing);
  write_json(m, pde_dir(c) / "manifest_sweep_lambda.json");
  return 0;
}

void add_options(CLI::App& app, Config& c) {
  app.add_option("--pde", c.pde, "advection1d, advection2d, wave, kdv or reaction_diffusion");
  app.add_option("--variant", c.variants, "pinn, pinn-sc-<L|Q|Both> or pinn-proj-<L|Q|Both>; repeatable");
  app.add_option("--seeds", c.seeds, "Trial seeds (sampling and initialisation)");
  app.add_option("--quantity", c.quantity, "Constrained quantity of the lambda sweep: L, Q or Both");
  app.add_option("--nx", c.nx, "Spatial points along x (0: preset)");
  app.add_option("--ny", c.ny, "Spatial points along y (0: preset)");
  app.add_option("--nt", c.nt, "Time levels (0: preset)");
  app.add_option("--grad-tol", c.grad_tol, "Gradient max-norm stopping threshold (0: preset)");
  app.add_option("--max-epochs", c.max_epochs, "L-BFGS iteration cap");
  app.add_option("--collocation", c.collocation, "Collocation points");
  app.add_option("--data", c.data, "Data points (0: preset)");
  app.add_option("--data-selection", c.data_selection, "full or initial-boundary");
  app.add_option("--lambda", c.lambda, "Soft-constraint weight");
  app.add_option("--lambdas", c.lambdas, "Weights of the lambda sweep");
  app.add_option("--residual", c.residual, "Residual through the projection: frozen, full or raw");
  app.add_option("--statistics", c.statistics, "Slice statistics of the frozen residual: interpolated or exact");
  app.add_option("--scale-inputs", c.scale_inputs, "Map inputs onto [-1, 1]");
  app.add_option("--hidden-layers", c.hidden_layers, "Hidden layers");
  app.add_option("--width", c.width, "Units per hidden layer");
  app.add_option("--format", c.format, "Dataset format: binary or csv");
  app.add_option("--probes", c.probes, "Lanczos probes per spectrum");
  app.add_option("--steps", c.steps, "Lanczos steps per probe");
  app.add_option("--slq-seed", c.slq_seed, "Seed of the probe vectors");
  app.add_flag("--spectra", c.spectra, "Also emit Hessian spectra during evaluate");
  app.add_flag("--timing", c.timing, "Fill the seconds column from measured wall time");
  app.add_option("--jobs,-j", c.jobs, "Worker threads for independent trials");
  app.add_option("--out,-o", c.out, "Output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conservation-projected PINN experiments"};
  app.set_config("--config", "", "Read options from a TOML or INI file");
  app.require_subcommand(1);
  app.fallthrough();
  Config cfg;
  add_options(app, cfg);
  auto* generate = app.add_subcommand("generate", "Solve the reference PDE and write the dataset");
  auto* train_cmd = app.add_subcommand("train", "Train every variant for every seed");
  auto* evaluate = app.add_subcommand("evaluate", "Score checkpoints and write tables and trajectories");
  auto* sweep = app.add_subcommand("sweep-lambda", "Train and score soft-constraint models over lambda");
  auto* spectra = app.add_subcommand("spectra", "Hessian spectral densities of trained checkpoints");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    validate(cfg);
    if (*generate) return cmd_generate(cfg);
    if (*train_cmd) return cmd_train(cfg);
    if (*evaluate) return cmd_evaluate(cfg);
    if (*sweep) return cmd_sweep_lambda(cfg);
    if (*spectra) return cmd_spectra(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
