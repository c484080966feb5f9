#pragma once
#include <cstddef>
#include <string>
#include <vector>

#include "fplab/fixpoint.hpp"
#include "fplab/init.hpp"

namespace fplab {

struct TrainingClass {
    Point center;  // the designated target the class should map to
    double radius = 0.0;
    std::vector<Point> points;
};

struct TrainingSet {
    std::vector<TrainingClass> classes;
    std::size_t total_points() const;
};

struct OptimizerConfig {
    double learning_rate = 0.05;
    std::size_t batch_size = 16;
    std::size_t max_epochs = 5000;
    double target_loss = 1e-4;
};

struct TrainConfig {
    std::vector<std::size_t> widths = {2, 100, 100, 2};
    ActivationKind activation = ActivationKind::HardTanh;
    OptimizerConfig optimizer;
    DistributionSpec init;  // InverseSqrtDepth by default
    Seed seed;
    TrainConfig() { init.scale_rule = ScaleRule::InverseSqrtDepth; }
};

struct TrainTrace {
    std::vector<double> loss_history;  // per epoch, after updates
    Network final_network;
};

// K disjoint discs in Omega: centers by seeded rejection sampling with min
// separation 0.5 (or a fixed ring layout), points uniform in each disc, the
// center itself always included as points[0].
TrainingSet make_discs(std::size_t K, double radius, const GridSpec& grid,
                       std::size_t points_per_class, const Seed& seed, bool fixed_ring = false);

// Sum over classes and points of ||Phi(x) - center_k||^2 (a sum, not a mean).
double loss(const Network& net, const TrainingSet& ts);

struct ParamGrad {
    std::vector<Mat> dW;
    std::vector<std::vector<double>> db;
};

// Exact reverse-mode gradient of loss() w.r.t. every weight and bias.
ParamGrad gradient(const Network& net, const TrainingSet& ts);

// Mini-batch SGD with a seeded shuffle per epoch; the update uses the batch
// mean gradient. Stops at target_loss or max_epochs; loss > 1e6 throws
// DivergenceError with the trace attached.
TrainTrace train(const TrainConfig& cfg, const TrainingSet& ts);

struct ClassVerification {
    double center_distance = 0.0;   // nearest matched fixed point, inf if none
    double own_basin_fraction = 0.0;
};

struct VerificationReport {
    FixedPointReport fp_report;
    std::vector<ClassVerification> per_class;
    std::vector<int> fp_class;  // class of the nearest center per fixed point
    bool all_points_own_basin = false;
};

// find_fixed_points, match each fixed point to its nearest class center, then
// check that every training point iterates into its own class's basin.
VerificationReport verify_trained(const Network& net, const TrainingSet& ts,
                                  const GridSpec& grid, const IterationPolicy& policy,
                                  double cluster_radius = 1e-3, std::size_t jobs = 1);

std::string training_set_to_json(const TrainingSet& ts);
std::string loss_history_to_csv(const TrainTrace& trace);
std::string verification_to_json(const VerificationReport& rep);

}  // namespace fplab
