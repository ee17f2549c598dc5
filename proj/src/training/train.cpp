#include <chrono>
#include <cmath>
#include <fstream>
#include <json.hpp>

#include "pinnproj/errors.hpp"
#include "pinnproj/training.hpp"

namespace pinnproj {

TrainResult train(const LossFunction& loss, std::uint64_t init_seed, const TrainOptions& options) {
  std::vector<int> sizes = options.layer_sizes;
  if (sizes.empty()) sizes = standard_layer_sizes(loss.problem().grid.dims + 1);
  TrainResult result;
  result.params = init_xavier(sizes, init_seed);
  TrainRecord& rec = result.record;
  rec.init_seed = init_seed;

  LossBreakdown last;
  const ad::GradientFn fn = [&](std::span<const double> x, std::span<double> g) {
    MlpParams p;
    p.layer_sizes = sizes;
    p.values.assign(x.begin(), x.end());
    last = loss.evaluate(p, g);
    return last.total();
  };
  auto on_epoch = [&](int, double, double) {
    rec.trace.push_back({last.data, last.residual, last.constraint});
    return true;
  };

  const auto start = std::chrono::steady_clock::now();
  const LbfgsResult r = minimize(fn, result.params.values, options.lbfgs, on_epoch);
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!std::isfinite(r.f)) throw TrainingDiverged("training: loss became non-finite");
  result.params.values = r.x;
  rec.epochs = r.iterations;
  rec.evaluations = r.evaluations;
  rec.stop_reason = std::string(to_string(r.reason));
  rec.final_grad_inf = r.grad_inf;
  rec.final_loss = r.f;
  return result;
}

void write_record(const TrainRecord& rec, const std::filesystem::path& path) {
  nlohmann::json trace = {{"data", nlohmann::json::array()},
                          {"residual", nlohmann::json::array()},
                          {"constraint", nlohmann::json::array()}};
  for (const EpochLoss& e : rec.trace) {
    trace["data"].push_back(e.data);
    trace["residual"].push_back(e.residual);
    trace["constraint"].push_back(e.constraint);
  }
  const nlohmann::json j = {{"epochs", rec.epochs},
                            {"evaluations", rec.evaluations},
                            {"wall_seconds", rec.wall_seconds},
                            {"stop_reason", rec.stop_reason},
                            {"final_grad_inf", rec.final_grad_inf},
                            {"final_loss", rec.final_loss},
                            {"init_seed", rec.init_seed},
                            {"trace", trace}};
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

TrainRecord read_record(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open training record " + path.string());
  const nlohmann::json j = nlohmann::json::parse(is);
  TrainRecord rec;
  rec.epochs = j.at("epochs").get<int>();
  rec.evaluations = j.value("evaluations", 0);
  rec.wall_seconds = j.value("wall_seconds", 0.0);
  rec.stop_reason = j.value("stop_reason", "");
  rec.final_grad_inf = j.value("final_grad_inf", 0.0);
  rec.final_loss = j.value("final_loss", 0.0);
  rec.init_seed = j.value("init_seed", std::uint64_t{0});
  const auto& t = j.at("trace");
  const auto d = t.at("data").get<std::vector<double>>();
  const auto r = t.at("residual").get<std::vector<double>>();
  const auto c = t.at("constraint").get<std::vector<double>>();
  for (std::size_t k = 0; k < d.size(); ++k) rec.trace.push_back({d[k], r.at(k), c.at(k)});
  return rec;
}

}  // namespace pinnproj
