#include "strkm/trainer.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

#include "strkm/binio.hpp"
#include "strkm/errors.hpp"
#include "strkm/kvconfig.hpp"
#include "strkm/stiefel.hpp"

namespace strkm {

namespace {

// RNG stream ids; minibatch shuffles use the epoch number as stream.
constexpr std::uint64_t kStreamBase = 1ull << 40;
constexpr std::uint64_t kEncoderStream = kStreamBase + 1;
constexpr std::uint64_t kDecoderStream = kStreamBase + 2;
constexpr std::uint64_t kSubspaceStream = kStreamBase + 3;
constexpr std::uint64_t kNoiseStream = kStreamBase + 4;
constexpr std::uint64_t kEvalStream = kStreamBase + 5;
// Noise for the U pass; separate so that fixed-U runs see the same network noise.
constexpr std::uint64_t kSubspaceNoiseStream = kStreamBase + 6;

constexpr char kMagic[] = "STRKM1";
constexpr std::size_t kMagicLen = 6;
constexpr char kFinalObjectiveKey[] = "result.final_objective";

std::uint64_t frozen_seed(const TrainConfig& cfg) {
  return cfg.frozen_u_seed >= 0 ? static_cast<std::uint64_t>(cfg.frozen_u_seed) : cfg.seed;
}

Mat concat_rows(const Mat& images, std::span<const int> idx) {
  Mat out(static_cast<Eigen::Index>(idx.size()), images.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = images.row(idx[k]);
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 0) throw ConfigError("train.epochs must be >= 0");
  if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (!(lr_adam > 0.0) || !(lr_cayley > 0.0)) throw ConfigError("learning rates must be > 0");
  if (cayley_iterations < 1) throw ConfigError("train.cayley_iterations must be >= 1");
  if (log_every < 0) throw ConfigError("train.log_every must be >= 0");
  if (model.input_dim < 1 || model.latent_dim < 1 || model.subspace_dim < 1) {
    throw ConfigError("model dims must be >= 1");
  }
  if (model.subspace_dim > model.latent_dim) {
    throw ConfigError("model.subspace_dim exceeds model.latent_dim");
  }
  if (!(model.prelu_alpha >= 0.0)) throw ConfigError("model.prelu_alpha must be >= 0");
  objective.validate();
}

void TrainConfig::set(const std::string& key, const std::string& value, std::size_t offset) {
  const kv::Entry e{key, value, offset};
  auto to_i = [&](std::int64_t lo) {
    const std::int64_t v = kv::to_int(e);
    if (v < lo || v > (1ll << 31) - 1) throw ParseError(offset, "key '" + key + "' out of range");
    return static_cast<int>(v);
  };
  if (key == "train.epochs") epochs = to_i(0);
  else if (key == "train.batch_size") batch_size = to_i(1);
  else if (key == "train.lr_adam") lr_adam = kv::to_double(e);
  else if (key == "train.lr_cayley") lr_cayley = kv::to_double(e);
  else if (key == "train.seed") seed = kv::to_uint(e);
  else if (key == "train.cayley_iterations") cayley_iterations = to_i(1);
  else if (key == "train.log_every") log_every = to_i(0);
  else if (key == "model.input_dim") model.input_dim = to_i(1);
  else if (key == "model.latent_dim") model.latent_dim = to_i(1);
  else if (key == "model.subspace_dim") model.subspace_dim = to_i(1);
  else if (key == "model.encoder_hidden") model.encoder_hidden = kv::to_int_list(e);
  else if (key == "model.activation") {
    try {
      model.activation = activation_from_string(value);
    } catch (const ConfigError& err) {
      throw ParseError(offset, err.what());
    }
  } else if (key == "model.prelu_alpha") model.prelu_alpha = kv::to_double(e);
  else if (key == "objective.lambda") objective.lambda = kv::to_double(e);
  else if (key == "objective.loss") {
    try {
      objective.loss.type = loss_type_from_string(value);
    } catch (const ConfigError& err) {
      throw ParseError(offset, err.what());
    }
  } else if (key == "objective.sigma") objective.loss.sigma = kv::to_double(e);
  else if (key == "objective.mc_samples") objective.loss.mc_samples = to_i(1);
  else if (key == "objective.fixed_u") objective.fixed_u.enabled = kv::to_bool(e);
  else if (key == "objective.epsilon") objective.fixed_u.epsilon = kv::to_double(e);
  else if (key == "objective.frozen_u_seed") {
    frozen_u_seed = kv::to_int(e);
    if (frozen_u_seed < -1) throw ParseError(offset, "objective.frozen_u_seed must be >= -1");
  } else {
    throw ParseError(offset, "unknown key '" + key + "'");
  }
}

void TrainConfig::apply(std::string_view text) {
  for (const kv::Entry& e : kv::parse(text)) set(e.key, e.value, e.offset);
}

TrainConfig TrainConfig::parse(std::string_view text) {
  TrainConfig cfg;
  cfg.apply(text);
  return cfg;
}

std::string TrainConfig::to_kv() const {
  std::ostringstream os;
  os << "train.epochs = " << epochs << '\n'
     << "train.batch_size = " << batch_size << '\n'
     << "train.lr_adam = " << kv::format(lr_adam) << '\n'
     << "train.lr_cayley = " << kv::format(lr_cayley) << '\n'
     << "train.seed = " << seed << '\n'
     << "train.cayley_iterations = " << cayley_iterations << '\n'
     << "train.log_every = " << log_every << '\n'
     << "model.input_dim = " << model.input_dim << '\n'
     << "model.latent_dim = " << model.latent_dim << '\n'
     << "model.subspace_dim = " << model.subspace_dim << '\n'
     << "model.encoder_hidden = ";
  for (std::size_t i = 0; i < model.encoder_hidden.size(); ++i) {
    os << (i ? "," : "") << model.encoder_hidden[i];
  }
  os << '\n'
     << "model.activation = " << to_string(model.activation) << '\n'
     << "model.prelu_alpha = " << kv::format(model.prelu_alpha) << '\n'
     << "objective.lambda = " << kv::format(objective.lambda) << '\n'
     << "objective.loss = " << to_string(objective.loss.type) << '\n'
     << "objective.sigma = " << kv::format(objective.loss.sigma) << '\n'
     << "objective.mc_samples = " << objective.loss.mc_samples << '\n'
     << "objective.fixed_u = " << (objective.fixed_u.enabled ? "true" : "false") << '\n'
     << "objective.epsilon = " << kv::format(objective.fixed_u.epsilon) << '\n'
     << "objective.frozen_u_seed = " << frozen_u_seed << '\n';
  return os.str();
}

StRkmModel init_model(const TrainConfig& cfg) {
  cfg.validate();
  const ModelConfig& mc = cfg.model;
  NetworkSpec enc{{}, {}, mc.prelu_alpha};
  enc.sizes.push_back(mc.input_dim);
  for (int h : mc.encoder_hidden) {
    enc.sizes.push_back(h);
    enc.activations.push_back(mc.activation);
  }
  enc.sizes.push_back(mc.latent_dim);
  enc.activations.push_back(Activation::linear);

  NetworkSpec dec{{}, {}, mc.prelu_alpha};
  dec.sizes.push_back(mc.latent_dim);
  for (auto it = mc.encoder_hidden.rbegin(); it != mc.encoder_hidden.rend(); ++it) {
    dec.sizes.push_back(*it);
    dec.activations.push_back(mc.activation);
  }
  dec.sizes.push_back(mc.input_dim);
  dec.activations.push_back(Activation::sigmoid);

  Network encoder = Network::init(enc, Rng(cfg.seed, kEncoderStream).next_u64());
  Network decoder = Network::init(dec, Rng(cfg.seed, kDecoderStream).next_u64());
  const std::uint64_t useed = cfg.objective.fixed_u.enabled ? frozen_seed(cfg) : cfg.seed;
  Rng urng(useed, kSubspaceStream);
  StiefelPoint u = StiefelPoint::random(mc.latent_dim, mc.subspace_dim, urng);
  return StRkmModel(std::move(encoder), std::move(decoder), std::move(u));
}

SvdCorrection final_svd_correction(const Network& encoder, const Mat& images, int m) {
  if (images.rows() < 1) throw ContractError("final_svd_correction: empty dataset");
  const Eigen::Index l = encoder.output_dim();
  if (m < 1 || m > l) throw ConfigError("final_svd_correction: m must lie in [1, l]");
  const Mat phi = encoder.forward_batch(images);
  const Vec mean = phi.colwise().mean().transpose();
  const Mat centered = phi.rowwise() - mean.transpose();
  Mat c = (centered.transpose() * centered) / static_cast<double>(phi.rows());
  c = 0.5 * (c + c.transpose()).eval();
  EighResult eg = eigh(c);
  Mat top = eg.vectors.leftCols(m);
  Vec lambda = eg.values.head(m).cwiseMax(0.0);
  return {StiefelPoint(qr_orthonormalize(top)), lambda, mean, c};
}

void Checkpoint::validate() const {
  model.validate();
  if (model.u.orthonormality_error() > kStiefelTolerance) {
    throw ContractError("checkpoint: U is not orthonormal");
  }
  if (model.principal_values.size() != model.subspace_dim()) {
    throw ContractError("checkpoint: principal values missing");
  }
  for (Eigen::Index j = 0; j < model.principal_values.size(); ++j) {
    if (model.principal_values[j] < 0.0) throw ContractError("checkpoint: negative lambda");
    if (j > 0 && model.principal_values[j] > model.principal_values[j - 1]) {
      throw ContractError("checkpoint: lambda not descending");
    }
  }
  if (model.feature_mean.size() != model.latent_dim()) {
    throw ContractError("checkpoint: feature mean has wrong size");
  }
}

bool operator==(const Checkpoint& a, const Checkpoint& b) {
  return serialize_checkpoint(a) == serialize_checkpoint(b);
}

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt) {
  ckpt.validate();
  const StRkmModel& mdl = ckpt.model;
  binio::Writer w;
  w.bytes(std::string_view(kMagic, kMagicLen));
  w.u32(Checkpoint::kFormatVersion);
  w.u32(static_cast<std::uint32_t>(mdl.input_dim()));
  w.u32(static_cast<std::uint32_t>(mdl.latent_dim()));
  w.u32(static_cast<std::uint32_t>(mdl.subspace_dim()));
  for (const Network* net : {&mdl.encoder, &mdl.decoder}) {
    w.u32(static_cast<std::uint32_t>(net->layers().size()));
    for (const Layer& layer : net->layers()) {
      w.u32(static_cast<std::uint32_t>(layer.weight.rows()));
      w.u32(static_cast<std::uint32_t>(layer.weight.cols()));
      w.u8(static_cast<std::uint8_t>(layer.activation));
    }
  }
  for (const Network* net : {&mdl.encoder, &mdl.decoder}) {
    for (const Layer& layer : net->layers()) {
      for (Eigen::Index i = 0; i < layer.weight.size(); ++i) w.f64(layer.weight.data()[i]);
      for (Eigen::Index i = 0; i < layer.bias.size(); ++i) w.f64(layer.bias.data()[i]);
    }
  }
  const Mat& u = mdl.u.matrix();
  for (Eigen::Index j = 0; j < u.cols(); ++j)
    for (Eigen::Index i = 0; i < u.rows(); ++i) w.f64(u(i, j));
  for (Eigen::Index i = 0; i < mdl.feature_mean.size(); ++i) w.f64(mdl.feature_mean[i]);
  for (Eigen::Index i = 0; i < mdl.principal_values.size(); ++i) w.f64(mdl.principal_values[i]);

  std::string blob = ckpt.config.to_kv();
  blob += std::string(kFinalObjectiveKey) + " = " + kv::format(ckpt.final_objective) + "\n";
  w.u32(static_cast<std::uint32_t>(blob.size()));
  w.bytes(blob);
  return w.take();
}

Checkpoint parse_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMagicLen ||
      std::memcmp(bytes.data(), kMagic, kMagicLen) != 0) {
    throw ParseError(0, "bad magic, expected STRKM1");
  }
  binio::Reader r(bytes);
  r.bytes(kMagicLen, "magic");
  std::size_t at = r.offset();
  const std::uint32_t version = r.u32("format version");
  if (version != Checkpoint::kFormatVersion) {
    throw ParseError(at, "unsupported format version " + std::to_string(version));
  }
  at = r.offset();
  const std::uint32_t d = r.u32("d");
  const std::uint32_t l = r.u32("l");
  const std::uint32_t m = r.u32("m");
  if (d == 0 || l == 0 || m == 0 || m > l || d > (1u << 24) || l > (1u << 24)) {
    throw ParseError(at, "inconsistent dims");
  }

  struct Shape {
    std::uint32_t rows, cols;
    Activation act;
  };
  std::vector<Shape> shapes[2];
  std::size_t n_values = 0;
  for (auto& list : shapes) {
    at = r.offset();
    const std::uint32_t count = r.u32("layer count");
    if (count == 0 || count > 1024) throw ParseError(at, "bad layer count");
    for (std::uint32_t k = 0; k < count; ++k) {
      at = r.offset();
      Shape s{r.u32("layer rows"), r.u32("layer cols"), Activation::linear};
      const std::uint8_t tag = r.u8("activation tag");
      if (tag > static_cast<std::uint8_t>(Activation::tanh)) {
        throw ParseError(at + 8, "unknown activation tag " + std::to_string(tag));
      }
      if (s.rows == 0 || s.cols == 0 || s.rows > (1u << 24) || s.cols > (1u << 24)) {
        throw ParseError(at, "bad layer shape");
      }
      if (!list.empty() && list.back().rows != s.cols) throw ParseError(at, "layer chain mismatch");
      s.act = static_cast<Activation>(tag);
      n_values += static_cast<std::size_t>(s.rows) * s.cols + s.rows;
      list.push_back(s);
    }
  }
  if (shapes[0].front().cols != d || shapes[0].back().rows != l || shapes[1].front().cols != l ||
      shapes[1].back().rows != d) {
    throw ParseError(at, "network dims do not match header");
  }
  n_values += static_cast<std::size_t>(l) * m + l + m;
  r.require(n_values * 8, "parameter arrays");

  std::vector<Layer> layers[2];
  for (int k = 0; k < 2; ++k) {
    for (const Shape& s : shapes[k]) {
      Layer layer;
      layer.weight.resize(s.rows, s.cols);
      layer.bias.resize(1, s.rows);
      layer.activation = s.act;
      for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = r.f64("weight");
      for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias.data()[i] = r.f64("bias");
      layers[k].push_back(std::move(layer));
    }
  }
  Mat u(l, m);
  for (Eigen::Index j = 0; j < u.cols(); ++j)
    for (Eigen::Index i = 0; i < u.rows(); ++i) u(i, j) = r.f64("U");
  Vec mean(l), lambda(m);
  for (Eigen::Index i = 0; i < mean.size(); ++i) mean[i] = r.f64("feature mean");
  for (Eigen::Index i = 0; i < lambda.size(); ++i) lambda[i] = r.f64("principal values");

  at = r.offset();
  const std::uint32_t blob_len = r.u32("config blob length");
  const std::size_t blob_at = r.offset();
  const std::string blob = r.bytes(blob_len, "config blob");
  if (r.remaining() != 0) {
    throw ParseError(r.offset(), std::to_string(r.remaining()) + " trailing bytes");
  }

  TrainConfig cfg;
  double final_objective = std::nan("");
  bool have_objective = false;
  for (const kv::Entry& e : kv::parse(blob)) {
    if (e.key == kFinalObjectiveKey) {
      kv::Entry shifted = e;
      shifted.offset += blob_at;
      final_objective = kv::to_double(shifted);
      have_objective = true;
    } else {
      cfg.set(e.key, e.value, blob_at + e.offset);
    }
  }
  if (!have_objective) throw ParseError(blob_at, "config blob lacks " + std::string(kFinalObjectiveKey));

  try {
    Network encoder(std::move(layers[0]), cfg.model.prelu_alpha);
    Network decoder(std::move(layers[1]), cfg.model.prelu_alpha);
    StRkmModel model(std::move(encoder), std::move(decoder), StiefelPoint(std::move(u)));
    model.feature_mean = mean;
    model.principal_values = lambda;
    Checkpoint ckpt{std::move(model), cfg, final_objective};
    ckpt.validate();
    return ckpt;
  } catch (const ParseError&) {
    throw;
  } catch (const Error& err) {
    throw ParseError(at, std::string("invalid checkpoint contents: ") + err.what());
  }
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  binio::write_file(path, serialize_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint(binio::read_file(path));
}

double full_objective(const StRkmModel& model, const Mat& images, const TrainConfig& cfg) {
  Rng rng(cfg.seed, kEvalStream);
  return evaluate_objective(model, images, cfg.objective, rng, GradTarget::none).total;
}

TrainResult train(const FactorDataset& data, const TrainConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  data.validate();
  if (data.size() < 1) throw ContractError("train: empty dataset");
  if (data.pixel_count() != cfg.model.input_dim) {
    throw ConfigError("model.input_dim " + std::to_string(cfg.model.input_dim) +
                      " does not match dataset pixel count " + std::to_string(data.pixel_count()));
  }
  const bool fixed = cfg.objective.fixed_u.enabled;
  StRkmModel model = init_model(cfg);

  double initial = 0.0;
  try {
    initial = full_objective(model, data.images, cfg);
  } catch (const NumericError& err) {
    throw NumericError(std::string("training aborted before step 0: ") + err.what());
  }
  TrainResult result{Checkpoint{model, cfg, 0.0}, {}, initial};

  AdamState adam(AdamConfig{cfg.lr_adam, 0.9, 0.999, 1e-8});
  CayleyAdamState cayley(CayleyAdamConfig{cfg.lr_cayley, 0.9, 0.999, 1e-8, cfg.cayley_iterations});
  Rng noise(cfg.seed, kNoiseStream);
  Rng u_noise(cfg.seed, kSubspaceNoiseStream);

  std::vector<Mat*> params = model.encoder.parameters();
  for (Mat* p : model.decoder.parameters()) params.push_back(p);

  const int n = static_cast<int>(data.size());
  std::int64_t step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (const std::vector<int>& batch :
         minibatches(n, cfg.batch_size, cfg.seed, static_cast<std::uint64_t>(epoch))) {
      const Mat x = concat_rows(data.images, batch);
      LossRecord rec;
      rec.step = step;
      rec.epoch = epoch;
      try {
        ObjectiveEvaluation ev = evaluate_objective(model, x, cfg.objective, noise, GradTarget::networks);
        rec.objective = ev.total;
        rec.ae = ev.ae;
        rec.pca = ev.pca;
        std::vector<Mat> grads = std::move(ev.encoder_grads);
        for (Mat& g : ev.decoder_grads) grads.push_back(std::move(g));
        adam_step(adam, params, grads);

        if (!fixed) {
          ObjectiveEvaluation eu = evaluate_objective(model, x, cfg.objective, u_noise, GradTarget::subspace);
          model.u = cayley_adam_step(cayley, model.u, eu.u_grad);
        }
      } catch (const NumericError& err) {
        throw NumericError("training aborted at step " + std::to_string(step) + " (epoch " +
                           std::to_string(epoch) + "): " + err.what());
      }
      rec.orth_error = model.u.orthonormality_error();
      if (rec.orth_error > kStiefelTolerance) {
        throw ContractError("training aborted at step " + std::to_string(step) +
                            ": U left the Stiefel manifold");
      }
      result.log.push_back(rec);
      if (progress && cfg.log_every > 0 && step % cfg.log_every == 0) progress(rec);
      ++step;
    }
  }

  const double final_value = full_objective(model, data.images, cfg);
  SvdCorrection corr = final_svd_correction(model.encoder, data.images, cfg.model.subspace_dim);
  if (fixed) {
    model.principal_values = corr.lambda;
  } else {
    model.u = corr.u;
    model.principal_values = corr.lambda;
  }
  model.feature_mean = corr.mean;
  result.checkpoint = Checkpoint{std::move(model), cfg, final_value};
  result.checkpoint.validate();
  return result;
}

TrainResult train_fixed_u(const FactorDataset& data, TrainConfig cfg, const ProgressFn& progress) {
  cfg.objective.fixed_u.enabled = true;
  return train(data, cfg, progress);
}

std::string loss_csv(const std::vector<LossRecord>& log) {
  std::string out = "step,epoch,objective,ae_term,pca_term\n";
  for (const LossRecord& r : log) {
    out += std::to_string(r.step) + ',' + std::to_string(r.epoch) + ',' + kv::format(r.objective) +
           ',' + kv::format(r.ae) + ',' + kv::format(r.pca) + '\n';
  }
  return out;
}

void write_loss_csv(const std::vector<LossRecord>& log, const std::filesystem::path& path) {
  const std::string text = loss_csv(log);
  binio::write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace strkm
