#ifndef SVAE_METRICS_HPP
#define SVAE_METRICS_HPP

#include <map>
#include <string>
#include <vector>

#include "svae/geometry.hpp"
#include "svae/windows.hpp"

namespace svae::metrics {

// Mean Euclidean distance over all frames. Both sequences must have equal,
// nonzero length.
double ade(const std::vector<geom::Position>& prediction, const std::vector<geom::Position>& truth);

// Euclidean distance at the final frame only.
double fde(const std::vector<geom::Position>& prediction, const std::vector<geom::Position>& truth);

enum class BestMode {
  independent,  // min ADE and min FDE taken separately over the samples
  joint,        // FDE read from the ADE-minimizing sample
};

struct BestOfK {
  double ade = 0;
  double fde = 0;
};

BestOfK best_of_k(const std::vector<std::vector<geom::Position>>& predictions,
                  const std::vector<geom::Position>& truth,
                  BestMode mode = BestMode::independent);

struct NllResult {
  double per_step = 0;  // total / H
  double total = 0;
};

// Negative log likelihood of the ground truth under per-step 2D Gaussian
// kernel density estimates built from the samples (Scott's rule per step and
// dimension, bandwidth floored at bandwidth_floor). Steps are treated as
// independent: the trajectory NLL is the sum of per-step NLLs.
NllResult nll_kde(const std::vector<std::vector<geom::Position>>& samples,
                  const std::vector<geom::Position>& truth, double bandwidth_floor = 1e-6);

enum class VelocityMode {
  mean_displacement,  // velocity = mean of the observed displacements
  last_displacement,
};

// Constant-velocity extrapolation of a window's observation over its horizon.
std::vector<geom::Position> linear_baseline(const data::ObservationWindow& window,
                                            VelocityMode mode = VelocityMode::mean_displacement);

// Aggregated evaluation numbers, sliceable per scene.
struct MetricEntry {
  std::int64_t count = 0;
  double ade = 0;
  double fde = 0;
  double nll = 0;          // per-step average; NaN when not evaluated
  double nll_total = 0;
  bool has_fpc = false;
  double ade_fpc = 0;
  double fde_fpc = 0;
};

struct MetricReport {
  MetricEntry aggregate;
  std::map<std::string, MetricEntry> per_scene;

  std::string to_json() const;
  std::string to_csv() const;
};

}  // namespace svae::metrics

#endif
