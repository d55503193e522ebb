#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "strkm/data.hpp"
#include "strkm/model.hpp"
#include "strkm/objective.hpp"

namespace strkm {

struct ModelConfig {
  int input_dim = 256;
  int latent_dim = 16;
  int subspace_dim = 4;
  std::vector<int> encoder_hidden{128, 64};  // decoder mirrors it
  Activation activation = Activation::prelu;
  double prelu_alpha = kDefaultPreluAlpha;
};

struct TrainConfig {
  int epochs = 200;
  int batch_size = 256;
  double lr_adam = 2e-4;
  double lr_cayley = 1e-4;
  std::uint64_t seed = 0;
  int cayley_iterations = 2;
  int log_every = 0;  // progress callback interval in steps, 0 = never
  ModelConfig model;
  ObjectiveConfig objective;
  // Seed of the frozen U in fixed-U mode; defaults to `seed` when unset.
  std::int64_t frozen_u_seed = -1;

  void validate() const;

  // Sets one dotted key; unknown keys and malformed values throw ParseError.
  void set(const std::string& key, const std::string& value, std::size_t offset = 0);
  // Applies `key = value` text on top of the current values.
  void apply(std::string_view text);
  static TrainConfig parse(std::string_view text);
  // Every key, one per line, in a fixed order.
  std::string to_kv() const;
};

// Encoder [d, hidden..., l] (linear output) and mirrored decoder [l, ..., d]
// (sigmoid output), initialized from the run seed, and the initial U.
StRkmModel init_model(const TrainConfig& cfg);

struct SvdCorrection {
  StiefelPoint u;
  Vec lambda;  // m, descending, clamped at 0
  Vec mean;    // l
  Mat covariance;
};

// Full-data feature mean and covariance (1/n normalization) and the top-m
// eigenpairs of the covariance.
SvdCorrection final_svd_correction(const Network& encoder, const Mat& images, int m);

struct Checkpoint {
  static constexpr std::uint32_t kFormatVersion = 1;

  StRkmModel model;
  TrainConfig config;
  double final_objective = 0.0;

  void validate() const;
};

bool operator==(const Checkpoint& a, const Checkpoint& b);

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(std::span<const std::uint8_t> bytes);
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

struct LossRecord {
  std::int64_t step = 0;
  int epoch = 0;
  double objective = 0.0;
  double ae = 0.0;
  double pca = 0.0;
  double orth_error = 0.0;  // ||U^T U - I||_F after the step
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<LossRecord> log;
  double initial_objective = 0.0;  // full-data objective at initialization
};

using ProgressFn = std::function<void(const LossRecord&)>;

// Per minibatch: an Adam step on the networks, then (unless
// fixed-U mode is on) a Cayley-Adam step on U with a fresh gradient. Ends
// with the SVD correction; in fixed-U mode U is kept and only lambda and the
// mean are filled in.
TrainResult train(const FactorDataset& data, const TrainConfig& cfg, const ProgressFn& progress = {});

// Same as train with objective.fixed_u.enabled forced on.
TrainResult train_fixed_u(const FactorDataset& data, TrainConfig cfg,
                          const ProgressFn& progress = {});

// Full-data objective value with a fixed evaluation noise stream.
double full_objective(const StRkmModel& model, const Mat& images, const TrainConfig& cfg);

void write_loss_csv(const std::vector<LossRecord>& log, const std::filesystem::path& path);
std::string loss_csv(const std::vector<LossRecord>& log);

}  // namespace strkm
