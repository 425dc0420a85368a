#include "svae/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "svae/errors.hpp"

namespace svae::metrics {

namespace {

void check_lengths(const std::vector<geom::Position>& a, const std::vector<geom::Position>& b,
                   const char* op) {
  if (a.size() != b.size()) {
    throw ContractError(std::string(op) + ": length mismatch (" + std::to_string(a.size()) +
                        " vs " + std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw ContractError(std::string(op) + ": empty trajectories");
}

}  // namespace

double ade(const std::vector<geom::Position>& prediction,
           const std::vector<geom::Position>& truth) {
  check_lengths(prediction, truth, "ade");
  double acc = 0;
  for (std::size_t t = 0; t < prediction.size(); ++t) acc += (prediction[t] - truth[t]).norm();
  return acc / static_cast<double>(prediction.size());
}

double fde(const std::vector<geom::Position>& prediction,
           const std::vector<geom::Position>& truth) {
  check_lengths(prediction, truth, "fde");
  return (prediction.back() - truth.back()).norm();
}

BestOfK best_of_k(const std::vector<std::vector<geom::Position>>& predictions,
                  const std::vector<geom::Position>& truth, BestMode mode) {
  if (predictions.empty()) throw InvalidInputError("best_of_k: empty prediction set");
  BestOfK out;
  out.ade = std::numeric_limits<double>::infinity();
  out.fde = std::numeric_limits<double>::infinity();
  double fde_of_best_ade = 0;
  for (const auto& p : predictions) {
    const double a = ade(p, truth);
    const double f = fde(p, truth);
    if (a < out.ade) {
      out.ade = a;
      fde_of_best_ade = f;
    }
    out.fde = std::min(out.fde, f);
  }
  if (mode == BestMode::joint) out.fde = fde_of_best_ade;
  return out;
}

NllResult nll_kde(const std::vector<std::vector<geom::Position>>& samples,
                  const std::vector<geom::Position>& truth, double bandwidth_floor) {
  if (samples.size() < 2) throw InvalidInputError("nll_kde: need at least 2 samples per step");
  const std::size_t horizon = truth.size();
  if (horizon == 0) throw InvalidInputError("nll_kde: empty ground truth");
  for (const auto& s : samples) {
    if (s.size() != horizon) throw ContractError("nll_kde: sample length mismatch");
  }

  const double n = static_cast<double>(samples.size());
  const double scott = std::pow(n, -1.0 / 6.0);  // Scott's rule exponent for d = 2

  NllResult out;
  for (std::size_t t = 0; t < horizon; ++t) {
    double mean_x = 0, mean_y = 0;
    for (const auto& s : samples) {
      mean_x += s[t].x;
      mean_y += s[t].y;
    }
    mean_x /= n;
    mean_y /= n;
    double var_x = 0, var_y = 0;
    for (const auto& s : samples) {
      var_x += (s[t].x - mean_x) * (s[t].x - mean_x);
      var_y += (s[t].y - mean_y) * (s[t].y - mean_y);
    }
    var_x /= (n - 1);
    var_y /= (n - 1);
    const double hx = std::max(std::sqrt(var_x) * scott, bandwidth_floor);
    const double hy = std::max(std::sqrt(var_y) * scott, bandwidth_floor);

    // log p(x) = logsumexp_s(-0.5 * z_s) - log(n * 2*pi * hx * hy)
    double max_e = -std::numeric_limits<double>::infinity();
    std::vector<double> exponents;
    exponents.reserve(samples.size());
    for (const auto& s : samples) {
      const double zx = (truth[t].x - s[t].x) / hx;
      const double zy = (truth[t].y - s[t].y) / hy;
      const double e = -0.5 * (zx * zx + zy * zy);
      exponents.push_back(e);
      max_e = std::max(max_e, e);
    }
    double acc = 0;
    for (double e : exponents) acc += std::exp(e - max_e);
    const double log_p = max_e + std::log(acc) -
                         std::log(n * 2.0 * 3.14159265358979323846 * hx * hy);
    out.total += -log_p;
  }
  out.per_step = out.total / static_cast<double>(horizon);
  return out;
}

std::vector<geom::Position> linear_baseline(const data::ObservationWindow& window,
                                            VelocityMode mode) {
  if (window.T < 2) throw InvalidInputError("linear_baseline: need at least 2 observed frames");
  geom::Displacement v;
  if (mode == VelocityMode::mean_displacement) {
    const auto d = geom::displacements(window.obs);
    for (const auto& x : d) v += x;
    v = v * (1.0 / static_cast<double>(d.size()));
  } else {
    v = window.obs.back() - window.obs[window.obs.size() - 2];
  }
  std::vector<geom::Position> out;
  out.reserve(static_cast<std::size_t>(window.H));
  geom::Position p = window.obs.back();
  for (int t = 0; t < window.H; ++t) {
    p += v;
    out.push_back(p);
  }
  return out;
}

namespace {

nlohmann::json entry_to_json(const MetricEntry& e) {
  nlohmann::json j;
  j["count"] = e.count;
  j["ade"] = e.ade;
  j["fde"] = e.fde;
  if (std::isfinite(e.nll)) {
    j["nll"] = e.nll;
    j["nll_total"] = e.nll_total;
  }
  if (e.has_fpc) {
    j["ade_fpc"] = e.ade_fpc;
    j["fde_fpc"] = e.fde_fpc;
  }
  return j;
}

}  // namespace

std::string MetricReport::to_json() const {
  nlohmann::json j;
  j["aggregate"] = entry_to_json(aggregate);
  for (const auto& [scene, entry] : per_scene) j["scenes"][scene] = entry_to_json(entry);
  return j.dump(2);
}

std::string MetricReport::to_csv() const {
  std::ostringstream out;
  out << "scene,count,ade,fde,nll,nll_total,ade_fpc,fde_fpc\n";
  auto row = [&out](const std::string& name, const MetricEntry& e) {
    out << name << ',' << e.count << ',' << e.ade << ',' << e.fde << ',';
    if (std::isfinite(e.nll)) {
      out << e.nll << ',' << e.nll_total;
    } else {
      out << ',';
    }
    out << ',';
    if (e.has_fpc) {
      out << e.ade_fpc << ',' << e.fde_fpc;
    } else {
      out << ',';
    }
    out << '\n';
  };
  for (const auto& [scene, entry] : per_scene) row(scene, entry);
  row("ALL", aggregate);
  return out.str();
}

}  // namespace svae::metrics
